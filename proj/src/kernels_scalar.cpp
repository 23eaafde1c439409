#include "ksym/kernels.hpp"

#include <cstddef>

namespace ksym::kern {

// Reference kernel.  Dense on purpose: zero entries are multiplied through, so
// every variant performs the identical sequence of rounded operations per lane.
void bracket_accum_scalar(const double* x, const double* y, const double* c,
                          int n, double scale, double* out) {
  for (int i = 0; i < n; ++i) {
    const double xi = scale * x[i];
    for (int j = 0; j < n; ++j) {
      const double t = xi * y[j];
      const double* row = c + (static_cast<std::size_t>(i) * n + j) * n;
      for (int k = 0; k < n; ++k) out[k] += t * row[k];
    }
  }
}

}  // namespace ksym::kern
