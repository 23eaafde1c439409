#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "ksym/autodecomp.hpp"
#include "ksym/liealg.hpp"

namespace ksym {

// Flat 3-index tensor over an n-dimensional space, layout (i*n + j)*n + k.
// Used for vector-valued bilinear maps: M(e_i, e_j) = sum_k at(i,j,k) e_k.
struct Tens3 {
  int n = 0;
  std::vector<double> v;

  Tens3() = default;
  explicit Tens3(int n_) : n(n_), v(static_cast<std::size_t>(n_) * n_ * n_, 0.0) {}
  double& at(int i, int j, int k) {
    return v[(static_cast<std::size_t>(i) * n + j) * n + k];
  }
  double at(int i, int j, int k) const {
    return v[(static_cast<std::size_t>(i) * n + j) * n + k];
  }
  double max_abs() const;
};

// Splitting g = h + n with h the isotropy algebra and n the reductive
// complement, in orthonormal column bases.  All later tensors live in
// n-coordinates.  For a graded source, n = m_1 + ... + m_cnt (+ g_k when the
// order is even); the g_k block sits in the trailing vertical_dim coordinates.
struct ReductiveSplit {
  std::shared_ptr<const LieAlgebra> algebra;
  std::optional<GradedDecomposition> decomposition;
  RMat h_basis;
  RMat n_basis;
  int vertical_dim = 0;

  Tens3 c_nnn;              // n-part of [n_i, n_j] in n-coordinates
  RMat c_nnh;               // h-part of [n_i, n_j]; row i*n+j, column over h
  std::vector<RMat> ad_h;   // action of each h basis vector on n

  double reductivity_residual = 0;   // [h, n] leakage outside n
  double completeness_residual = 0;  // h + n span failure

  int h_dim() const { return static_cast<int>(h_basis.cols()); }
  int n_dim() const { return static_cast<int>(n_basis.cols()); }
  int horizontal_dim() const { return n_dim() - vertical_dim; }
  bool is_horizontal(int i) const { return i < horizontal_dim(); }

  RVec n_coords(const RVec& ambient) const { return n_basis.transpose() * ambient; }
  RVec to_ambient(const RVec& nc) const { return n_basis * nc; }

  // n-part of the bracket of two n-coordinate vectors.
  RVec bracket_n(const RVec& x, const RVec& y) const;
  // h-part, in h-coordinates.
  RVec bracket_h(const RVec& x, const RVec& y) const;
};

ReductiveSplit reductive_split(const GradedDecomposition& d, double tol = 1e-9);
// User-supplied split; the vertical block is the trailing vertical_dim columns
// of n_basis.
ReductiveSplit reductive_split(std::shared_ptr<const LieAlgebra> g, RMat h_basis,
                               RMat n_basis, int vertical_dim = 0,
                               double tol = 1e-9);

// Inner product on n-coordinates, checked ad h-invariant on construction.
struct InvariantMetric {
  RMat gram;
  double invariance_residual = 0;
  bool tau_orthogonal = false;
};

InvariantMetric make_metric(const ReductiveSplit& s, RMat gram, double tol = 1e-9);
// gram_ij = scale * K(n_i, n_j); rejects non positive-definite results.
InvariantMetric killing_metric(const ReductiveSplit& s, double scale = -1.0);

// Invariant affine connection at the origin, described by a bilinear map
// Lambda on n.  Torsion and curvature are derived once from Lambda:
//   T(X,Y) = Lambda(X)Y - Lambda(Y)X - [X,Y]_n
//   R(X,Y) = [Lambda(X),Lambda(Y)] - Lambda([X,Y]_n) - ad_n([X,Y]_h)
struct OriginConnection {
  int dim = 0;
  Tens3 lambda;
  Tens3 torsion;
  std::vector<double> curvature;  // (((i*n+j)*n+a)*n+b, entry (a,b) of R(e_i,e_j)

  RMat lambda_mat(int i) const;          // matrix of Lambda(e_i)
  RMat curvature_mat(int i, int j) const;
};

OriginConnection connection_from_lambda(const ReductiveSplit& s, Tens3 lambda);
// Lambda^t(X)Y = t [X,Y]_n; torsion (2t-1)[X,Y]_n.
OriginConnection connection_family(const ReductiveSplit& s, double t);
// Lambda = t([X,Y]_n + U(X,Y)) with <U(X,Y),Z> = <[Z,X]_n,Y> + <X,[Z,Y]_n>;
// metric for every t, torsion-free at t = 1/2.
OriginConnection metric_family(const ReductiveSplit& s, const InvariantMetric& h,
                               double t, double tol = 1e-9);
Tens3 natural_reductivity_term(const ReductiveSplit& s, const InvariantMetric& h);
// max |<Lambda(X)Y,Z> + <Y,Lambda(X)Z>| over basis triples.
double metricity_residual(const OriginConnection& c, const InvariantMetric& h);

// Endomorphism F of n with F^3 + F = 0; level records which partial structure
// it is.  Horizontal = image of F, vertical = kernel.
struct OriginFStructure {
  RMat f;
  int level = 0;
  double f_identity_residual() const;  // ||F^3 + F||_max
};

// Partial structure of the given level: +i on the eigenspaces of negative
// grade down to -m, -i on their conjugates, 0 on the rest of n.  Requires the
// split to carry its graded decomposition.  Top level in the odd case is a
// complex structure on all of n.
OriginFStructure canonical_structures(const ReductiveSplit& s, int m);
// tau restricted to n, in n-coordinates (needs the decomposition).
RMat tau_on_n(const ReductiveSplit& s);

// Trilinear form in n-coordinates.  `lowered` distinguishes scalar forms
// B(X,Y,Z) = <B(X,Y),Z> from raw vector-valued layouts.
struct TrilinearForm {
  int dim = 0;
  bool lowered = true;
  std::vector<double> v;

  TrilinearForm() = default;
  TrilinearForm(int dim_, bool lowered_)
      : dim(dim_), lowered(lowered_),
        v(static_cast<std::size_t>(dim_) * dim_ * dim_, 0.0) {}
  double& at(int i, int j, int k) {
    return v[(static_cast<std::size_t>(i) * dim + j) * dim + k];
  }
  double at(int i, int j, int k) const {
    return v[(static_cast<std::size_t>(i) * dim + j) * dim + k];
  }
  double max_abs() const;
  double antisym12_residual() const;    // B(X,Y,.) + B(Y,X,.)
  double antisym_full_residual() const; // deviation from total alternation
};

TrilinearForm lower(const Tens3& t, const InvariantMetric& h);
Tens3 raise(const TrilinearForm& b, const InvariantMetric& h);
TrilinearForm lowered_torsion(const OriginConnection& c, const InvariantMetric& h);

// (eps, eps') component with respect to J acting on the two form slots:
//   -1/4 (ee' B(JX,JY,Z) - e B(JX,Y,JZ) - e' B(X,JY,JZ) - B(X,Y,Z)).
// The four components sum back to B.
TrilinearForm component_split(const TrilinearForm& b, const OriginFStructure& j,
                              int eps, int epsp);

// Vector-valued Nijenhuis tensor from the torsion identity
//   N_F(X,Y) = -(T(FX,FY) - F T(FX,Y) - F T(X,FY) - P T(X,Y)),  P = -F^2.
// Requires the connection to preserve F (Lambda(X) commutes with F).
Tens3 nijenhuis(const OriginFStructure& f, const OriginConnection& conn,
                double tol = 1e-9);

enum class JAction { Dot, Circ, Star, Bullet };
// Dot:    B(J.,J.,J.)
// Circ:   B(J.,.,.) + B(.,J.,.) + B(.,.,J.)
// Bullet: Dot + Circ applied to (B - B(P.,P.,P.)),  P = -F^2
// Star:   (Bullet + Circ)/2
TrilinearForm j_actions(const TrilinearForm& b, const OriginFStructure& j,
                        JAction which);
// Lowered form of X,Y -> J(B(X,Y)): equals -B(.,.,J.) for metric-skew J.
TrilinearForm value_action(const OriginFStructure& j, const TrilinearForm& b);

// Alternating invariant form of degree 1..4 on n-coordinates, flat row-major.
struct InvariantForm {
  int degree = 0;
  int dim = 0;
  std::vector<double> v;

  static InvariantForm zero(int degree, int dim);
  double& at(int i);
  double& at(int i, int j);
  double& at(int i, int j, int k);
  double& at(int i, int j, int k, int l);
  double at(int i) const;
  double at(int i, int j) const;
  double at(int i, int j, int k) const;
  double at(int i, int j, int k, int l) const;
  double max_abs() const;
};

double form_invariance_residual(const InvariantForm& a, const ReductiveSplit& s);
// Bracket-only exterior differential, valid on ad h-invariant forms:
//   (da)(X_0..X_p) = sum_{i<j} (-1)^{i+j} a([X_i,X_j]_n, ..no X_i.., ..no X_j..)
InvariantForm invariant_d(const InvariantForm& a, const ReductiveSplit& s,
                          double tol = 1e-9);

InvariantForm kaehler_form(const OriginFStructure& f, const InvariantMetric& h);
TrilinearForm to_trilinear(const InvariantForm& a);
InvariantForm to_form(const TrilinearForm& b);

// Cyclic slot sum B(X,Y,Z) + B(Y,Z,X) + B(Z,X,Y).
TrilinearForm skew(const TrilinearForm& b);

// Horizontal curvature Phi(X,Y) = -[X^h, Y^h]_V and vertical curvature
// R_V(X,Y) = -[X^v, Y^v]_H, metric-lowered.
TrilinearForm horizontal_curvature(const ReductiveSplit& s, const InvariantMetric& h);
TrilinearForm vertical_curvature(const ReductiveSplit& s, const InvariantMetric& h);

// N_F + Phi + R_V(Z^v,X^v,Y^h) + R_V(Y^v,Z^v,X^h), metric-lowered.
TrilinearForm extended_nijenhuis(const ReductiveSplit& s, const OriginFStructure& f,
                                 const InvariantMetric& h);

// Torsion of the characteristic connection of an almost complex structure:
// T = -d^cOmega + N, with d^c beta = -(d beta)(J.,J.,J.).  Gated on N being
// totally skew; the reconstructed connection is checked to preserve J and the
// metric.
TrilinearForm characteristic_torsion_complex(const ReductiveSplit& s,
                                             const OriginFStructure& j,
                                             const InvariantMetric& h,
                                             const TrilinearForm& d_omega,
                                             double tol = 1e-8);

// f-structure version: T = (-d^cOmega_F + N_F|HHH) + skew(Phi) + skew(R_V) + a
// with a supported on three vertical slots.  Gated on the extended Nijenhuis
// form being skew on the two-horizontal-one-vertical patterns (reductive
// type) and globally (global type).
TrilinearForm characteristic_torsion_f(const ReductiveSplit& s,
                                       const OriginFStructure& f,
                                       const InvariantMetric& h,
                                       const TrilinearForm& phi,
                                       const TrilinearForm& rv,
                                       const TrilinearForm& alpha,
                                       double tol = 1e-8);

}  // namespace ksym
