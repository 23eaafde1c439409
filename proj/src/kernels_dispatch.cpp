#include "ksym/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace ksym::kern {

namespace {

struct Choice {
  BracketFn fn;
  const char* name;
};

Choice pick() {
  const char* force = std::getenv("KSYM_KERNEL");
  if (force != nullptr) {
    if (std::strcmp(force, "scalar") == 0) return {bracket_accum_scalar, "scalar"};
    if (std::strcmp(force, "avx2") == 0 && avx2_compiled()) return {bracket_accum_avx2, "avx2"};
    if (std::strcmp(force, "neon") == 0 && neon_compiled()) return {bracket_accum_neon, "neon"};
    return {bracket_accum_scalar, "scalar"};
  }
#if defined(__x86_64__) || defined(_M_X64)
  if (avx2_compiled() && __builtin_cpu_supports("avx2")) return {bracket_accum_avx2, "avx2"};
#endif
  if (neon_compiled()) return {bracket_accum_neon, "neon"};
  return {bracket_accum_scalar, "scalar"};
}

const Choice& chosen() {
  static const Choice c = pick();
  return c;
}

}  // namespace

BracketFn active_kernel() { return chosen().fn; }

const char* backend_name() { return chosen().name; }

}  // namespace ksym::kern
