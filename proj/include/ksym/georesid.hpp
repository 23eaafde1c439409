#pragma once

#include <vector>

#include "ksym/autodecomp.hpp"
#include "ksym/lattice.hpp"

namespace ksym {

// Real ambient maps cut from a graded decomposition.  pn projects onto the
// reductive complement of g_0; for even order that complement splits further
// into the m-levels (pm) and the top vertical block (pv).  f0 is the
// invariant structure sum_j i(P(-j) - P(j)) over the m-levels: a complex
// structure when the order is odd, an f-structure vanishing on g_0 + g_k when
// it is even.
struct GradedMaps {
  int kprime = 0;
  bool even = false;
  int levels = 0;
  RMat p0;
  RMat pn;
  RMat pm;
  RMat pv;
  RMat f0;
};
GradedMaps graded_maps(const GradedDecomposition& dec);

// Tension cells d*(alpha_n) + [a_0, a_n] + [b_0, b_n].  The would-be
// t-dependent correction is the cell of [alpha_m ^ *alpha_m], which vanishes
// identically because the wedge bracket is symmetric and *(a,b) = (-b,a).
AlgebraField tension_cells(const AlgebraForm1& alpha, const GradedMaps& maps);
AlgebraField harmonic_residual(const AlgebraForm1& alpha,
                               const GradedDecomposition& dec);

// Vertical part of the tension: d*(alpha_v) + [a_0, a_v] + [b_0, b_v] with v
// the top block g_k of an even-order decomposition.  Twice the imaginary part
// of the top band equation on band-limited data.
AlgebraField vertical_harmonic_residual(const AlgebraForm1& alpha,
                                        const GradedDecomposition& dec);

// Band of (1,0)-coefficients u_j = (P(-j) alpha)' = (P(-j)a - i P(-j)b)/2,
// j = 0..mband, and the inverse assembly a = sum (u_j + conj u_j),
// b = sum i(u_j - conj u_j).
std::vector<AlgebraField> band_from_form(const AlgebraForm1& alpha,
                                         const GradedDecomposition& dec,
                                         int mband);
AlgebraForm1 form_from_band(const std::vector<AlgebraField>& band);

// Graded components of the combined flatness-plus-harmonicity system for a
// band u_0..u_m.  Index 0 holds the real equation
//   (i dx - dy)u_0 + (-i dx - dy)(conj u_0) - sum_i 2i [u_i, conj u_i],
// index j >= 1 the g_{-j} equation
//   (i dx - dy)u_j + sum_{i <= m-j} 2i [conj u_i, u_{i+j}].
std::vector<AlgebraField> graded_system_cells(
    const std::vector<AlgebraField>& band);

// Holomorphic-harmonicity residual for odd-order decompositions, computed two
// ways from the same samples: the graded band equation (full band, mband =
// k'-1) and the invariant route through torsion and tension cells,
//   R = [a_n, b_n]_n + f0 (tension),
//   P(-1) R = 2 (band eq 1) - P(-1) (flatness cells),
//   P(+1)(-R) = 2 (band eq k'-1) - P(+1) (flatness cells).
// t = 1 selects the first projection, t = 0 the second.  agreement is the
// largest pointwise gap between the two routes.
struct HolHarmonicResult {
  AlgebraField graded;
  AlgebraField invariant;
  double agreement = 0.0;
};
HolHarmonicResult hol_harmonic_residual(const AlgebraForm1& alpha,
                                        const GradedDecomposition& dec, int t);

// Maurer-Cartan-level residuals of the four torsion-modified harmonicity
// equations.  With t = tension, F = f0, q(x) shorthand for wedge-bracket
// cells W(x, y) and m/v the projected forms:
//   Dot           t - 1/2 F W(F alpha, F alpha)
//   Star, odd     t + 1/2 pn W(F alpha, alpha)
//                   - 1/4 F (W(F alpha, F alpha) + W(alpha_n, alpha_n))
//   Star, even    t + pv W(F alpha_m, alpha_m) - F [F a_m, F b_m]
//                   + 2 W(F alpha_m, alpha_v)
// Each agrees pointwise with the tensor route -tension + (F act torsion)
// built from the homogeneous-geometry module.  parity must match the
// decomposition.
enum class StringyVariant { Dot, Star };
enum class SystemParity { Odd, Even };
AlgebraField stringy_residual(const AlgebraForm1& alpha,
                              const GradedDecomposition& dec,
                              StringyVariant variant, SystemParity parity);

}  // namespace ksym
