#include "ksym/kernels.hpp"

#include <cstddef>

#if defined(__AVX2__)
#include <immintrin.h>
#endif
#if defined(__ARM_NEON)
#include <arm_neon.h>
#endif

namespace ksym::kern {

#if defined(__AVX2__)

bool avx2_compiled() { return true; }

// Vectorizes the k loop four lanes wide.  mul + add, never fma: the scalar
// kernel is built with contraction off and the two must agree bitwise.
void bracket_accum_avx2(const double* x, const double* y, const double* c,
                        int n, double scale, double* out) {
  for (int i = 0; i < n; ++i) {
    const double xi = scale * x[i];
    for (int j = 0; j < n; ++j) {
      const double t = xi * y[j];
      const double* row = c + (static_cast<std::size_t>(i) * n + j) * n;
      const __m256d vt = _mm256_set1_pd(t);
      int k = 0;
      for (; k + 4 <= n; k += 4) {
        __m256d vout = _mm256_loadu_pd(out + k);
        const __m256d vc = _mm256_loadu_pd(row + k);
        vout = _mm256_add_pd(vout, _mm256_mul_pd(vt, vc));
        _mm256_storeu_pd(out + k, vout);
      }
      for (; k < n; ++k) out[k] += t * row[k];
    }
  }
}

#else

bool avx2_compiled() { return false; }

void bracket_accum_avx2(const double* x, const double* y, const double* c,
                        int n, double scale, double* out) {
  bracket_accum_scalar(x, y, c, n, scale, out);
}

#endif

#if defined(__ARM_NEON)

bool neon_compiled() { return true; }

void bracket_accum_neon(const double* x, const double* y, const double* c,
                        int n, double scale, double* out) {
  for (int i = 0; i < n; ++i) {
    const double xi = scale * x[i];
    for (int j = 0; j < n; ++j) {
      const double t = xi * y[j];
      const double* row = c + (static_cast<std::size_t>(i) * n + j) * n;
      const float64x2_t vt = vdupq_n_f64(t);
      int k = 0;
      for (; k + 2 <= n; k += 2) {
        float64x2_t vout = vld1q_f64(out + k);
        const float64x2_t vc = vld1q_f64(row + k);
        vout = vaddq_f64(vout, vmulq_f64(vt, vc));
        vst1q_f64(out + k, vout);
      }
      for (; k < n; ++k) out[k] += t * row[k];
    }
  }
}

#else

bool neon_compiled() { return false; }

void bracket_accum_neon(const double* x, const double* y, const double* c,
                        int n, double scale, double* out) {
  bracket_accum_scalar(x, y, c, n, scale, out);
}

#endif

}  // namespace ksym::kern
