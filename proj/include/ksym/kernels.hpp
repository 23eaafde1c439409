#pragma once

// Structure-constant contraction kernels.
//
// The single hot loop of the library is
//     out[k] += scale * sum_{i,j} x[i] * y[j] * c[(i*n + j)*n + k]
// which evaluates a bilinear bracket in coordinates.  A scalar reference
// implementation and SIMD variants (AVX2, NEON) are provided; all of them
// accumulate lane k in the same (i,j) order with separate mul and add, so with
// contraction disabled at compile time their results are bitwise identical.
// The active variant is picked once at startup from cpu capabilities and can
// be forced with the environment variable KSYM_KERNEL=scalar|avx2|neon.

namespace ksym::kern {

using BracketFn = void (*)(const double* x, const double* y, const double* c,
                           int n, double scale, double* out);

void bracket_accum_scalar(const double* x, const double* y, const double* c,
                          int n, double scale, double* out);
void bracket_accum_avx2(const double* x, const double* y, const double* c,
                        int n, double scale, double* out);
void bracket_accum_neon(const double* x, const double* y, const double* c,
                        int n, double scale, double* out);

bool avx2_compiled();
bool neon_compiled();

// Active kernel after dispatch; stable for the lifetime of the process.
BracketFn active_kernel();
const char* backend_name();

// out = contraction with scale 1 (out is zeroed first).
inline void bracket(const double* x, const double* y, const double* c, int n,
                    double* out) {
  for (int k = 0; k < n; ++k) out[k] = 0.0;
  active_kernel()(x, y, c, n, 1.0, out);
}

}  // namespace ksym::kern
