#pragma once

#include <memory>
#include <string>
#include <vector>

#include "ksym/autodecomp.hpp"
#include "ksym/lattice.hpp"

namespace ksym {

// Finite Laurent band of algebra values per lattice point:
//   eta(lambda) = sum_{|d| <= m} lambda^d eta_d.
// Invariants checked against a grading: twist (eta_d lies in the d-th
// eigenspace mod the order) and reality (eta_{-d} = conj(eta_d)), which
// together make eta(lambda) a real algebra element for |lambda| = 1.
struct LoopBandField {
  int m = 0;
  std::vector<AlgebraField> coeff;  // degree d stored at coeff[d + m]

  LoopBandField() = default;
  LoopBandField(const LatticeGrid& g, std::shared_ptr<const LieAlgebra> alg,
                int m);

  const AlgebraField& at_degree(int d) const { return coeff[d + m]; }
  AlgebraField& at_degree(int d) { return coeff[d + m]; }

  // sign +1 checks eta_d against P(d) (standard twist); -1 against P(-d)
  // (the inverse-automorphism twist carried by plus-convention data).
  double twist_residual(const GradedDecomposition& dec, int sign = +1) const;
  double reality_residual() const;
  double max_abs() const;
};

// Band-valued 1-form: the pair of direction samples of alpha(lambda).
struct LoopForm1 {
  LoopBandField a, b;

  LoopForm1() = default;
  LoopForm1(const LatticeGrid& g, std::shared_ptr<const LieAlgebra> alg,
            int m);

  int band() const { return a.m; }
  AlgebraForm1 component(int d) const;  // (a_d, b_d)
  AlgebraForm1 at_unit() const;         // alpha evaluated at lambda = 1
  double twist_residual(const GradedDecomposition& dec, int sign = +1) const;
  double reality_residual() const;
};

// Grading convention for the coefficient data: Minus places u_j in the
// (-j)-eigenspace (the default system), Plus in the (+j)-eigenspace (the
// mirrored system, equivalent to the default one for the inverse
// automorphism).  The equations themselves are identical.
enum class SystemConvention { Minus, Plus };

// Coefficient data (u_0, ..., u_m) of the order-m system: complex fields
// holding the (1,0)-direction samples, u_j graded per the convention.
struct SystemData {
  SystemConvention convention = SystemConvention::Minus;
  std::vector<AlgebraField> u;

  int order() const { return static_cast<int>(u.size()) - 1; }
  double grading_residual(const GradedDecomposition& dec) const;
};

// Independent uniform noise per point and coordinate, projected onto the
// convention's eigenspaces.
SystemData random_system(const LatticeGrid& g, const GradedDecomposition& dec,
                         int m, SystemConvention convention, unsigned seed);

// alpha(lambda) = sum_j lambda^{-j} u_j + lambda^{+j} conj(u_j) as a 1-form,
// where u_j stands for the (1,0)-form u_j dz, so the direction samples of the
// degree -j part are (u_j, i u_j).  Validates the grading first.
LoopForm1 assemble_alpha(const SystemData& data,
                         const GradedDecomposition& dec, double tol = 1e-8);

// Extracts (u_0, ..., u_m) back out of a band form: u_j = (1,0)-part of the
// degree -j component.
SystemData system_from_form(const LoopForm1& alpha,
                            SystemConvention convention);

// Laurent coefficients of d alpha + 1/2 [alpha ^ alpha] per cell, degrees
// -2m .. 2m (degree p at index p + 2m).  Entries beyond the input band are
// identically zero by band arithmetic.
std::vector<AlgebraField> curvature_coefficients(const LoopForm1& alpha);

// Per-equation cells and sup norms of the graded first-order system.  The
// zero-curvature equivalence: max_norm and the curvature coefficient sup of
// the assembled form vanish together (degree -p of the curvature equals the
// p-th equation cell for cell, 0 <= p <= m).
struct SystemResiduals {
  std::vector<AlgebraField> cells;  // S_0 .. S_m
  std::vector<double> norms;
  double max_norm = 0.0;
};
SystemResiduals system_residuals(const SystemData& data,
                                 const GradedDecomposition& dec,
                                 double tol = 1e-8);

// Zero-pads (u_0..u_m) to order m_prime >= m.  The shared equations keep
// their residual values exactly: the padded terms enter as brackets with
// zero fields, appended after the existing sum.
SystemData embed_order(const SystemData& data, int m_prime);

// alpha_d -> Ad(U0^-1) alpha_d for every degree, plus the left-logarithmic
// derivative of U0 on degree 0.  U0 must preserve the grading pointwise
// (commute with the automorphism); flat forms stay flat and the graded
// residual norms are preserved up to the derivative discretization of U0.
LoopForm1 gauge_transform(const LoopForm1& alpha, const GroupField& u0,
                          const GradedDecomposition& dec, double tol = 1e-8);

// Diagonal lift into the (q+1)-fold product algebra with the cyclic-shift
// automorphism: block c of the lifted degree-d coefficient is
// omega_lift^{c d} alpha_d, omega_lift the primitive root for the lifted
// order (q+1)k'.  This samples alpha at lambda, wl*lambda, ..., wl^q*lambda,
// satisfies the lifted twist exactly, and scales each block's equation cells
// by unit phases, so residual sup norms carry over unchanged.
// q defaults to m / k' (the regrouping that lands in the determined band);
// q = 0 returns the input unchanged.  Requires m >= k' unless q = 0.
struct LiftedEquivalence {
  int q = 0;
  GradedDecomposition dec;  // grading of the lifted automorphism
  LoopForm1 form;
};
LiftedEquivalence underdetermined_equiv(const LoopForm1& alpha,
                                        const GradedDecomposition& dec,
                                        int q = -1);

// Solution fixture: an automorphism fixture reference plus per-degree
// coefficient fields on a grid ({automorphism_file, kprime, m, nx, ny, h,
// u: [{re, im}]} with re/im indexed [y][x][coordinate]).
struct FieldFixture {
  GradedDecomposition dec;
  LatticeGrid grid;
  SystemData data;
};
FieldFixture load_field_fixture(const std::string& path);

}  // namespace ksym
