#pragma once

#include <memory>
#include <string>
#include <vector>

#include "ksym/liealg.hpp"

namespace ksym {

// Uniform grid on a rectangle, spacing h in both directions.  Periodic
// boundaries wrap indices; clamped boundaries switch the difference stencils
// to one-sided second-order forms at the edges, so every derivative below is
// O(h^2) in either mode.
struct LatticeGrid {
  enum class Boundary { Periodic, Clamped };

  int nx = 0;
  int ny = 0;
  double h = 0.0;
  Boundary boundary = Boundary::Periodic;

  LatticeGrid() = default;
  LatticeGrid(int nx_, int ny_, double h_,
              Boundary boundary_ = Boundary::Periodic);

  int npoints() const { return nx * ny; }
  int index(int x, int y) const { return y * nx + x; }
  bool periodic() const { return boundary == Boundary::Periodic; }
  bool same_shape(const LatticeGrid& other) const;
};

// Algebra-valued function on the grid, one coefficient vector per point.
// Values are complex; real data simply carries zero imaginary parts, which
// keeps graded projections and band arithmetic uniform.
struct AlgebraField {
  LatticeGrid grid;
  std::shared_ptr<const LieAlgebra> algebra;
  std::vector<CVec> value;

  AlgebraField() = default;
  AlgebraField(const LatticeGrid& g, std::shared_ptr<const LieAlgebra> alg);

  const CVec& at(int x, int y) const { return value[grid.index(x, y)]; }
  CVec& at(int x, int y) { return value[grid.index(x, y)]; }

  double max_abs() const;       // max over points of the coefficient sup norm
  double max_point_norm() const;  // max over points of the Euclidean norm
  double max_imag() const;

  AlgebraField applied(const CMat& map) const;
  AlgebraField applied(const RMat& map) const;
  AlgebraField conjugated() const;
  AlgebraField real_part() const;
  AlgebraField imag_part() const;
};

AlgebraField operator+(const AlgebraField& f, const AlgebraField& g);
AlgebraField operator-(const AlgebraField& f, const AlgebraField& g);
AlgebraField operator*(const Cplx& s, const AlgebraField& f);

// Algebra-valued 1-form alpha = a dx + b dy sampled on the grid.
struct AlgebraForm1 {
  LatticeGrid grid;
  std::shared_ptr<const LieAlgebra> algebra;
  AlgebraField a;
  AlgebraField b;

  AlgebraForm1() = default;
  AlgebraForm1(const LatticeGrid& g, std::shared_ptr<const LieAlgebra> alg);

  double max_abs() const;
  double max_imag() const;
  bool is_real(double tol = 1e-12) const { return max_imag() <= tol; }

  AlgebraForm1 applied(const CMat& map) const;
  AlgebraForm1 applied(const RMat& map) const;
};

AlgebraForm1 operator+(const AlgebraForm1& f, const AlgebraForm1& g);
AlgebraForm1 operator-(const AlgebraForm1& f, const AlgebraForm1& g);
AlgebraForm1 operator*(const Cplx& s, const AlgebraForm1& f);

// Hodge star on 1-forms for the flat metric, *(a dx + b dy) = a dy - b dx.
// Squares to minus the identity.
AlgebraForm1 hodge(const AlgebraForm1& form);

// Central x / y derivatives of a field (one-sided second order at clamped
// edges).  Derivatives of linear images commute with applied().
AlgebraField dx_field(const AlgebraField& f);
AlgebraField dy_field(const AlgebraField& f);

// Cell values of the exterior operations.  A 2-form w dx^dy is identified
// with its coefficient field w, so:
//   d alpha        -> dx(b) - dy(a)
//   d* alpha       -> dx(a) + dy(b)     (codifferential, up to overall sign)
//   [beta ^ gamma] -> [beta_a, gamma_b] - [beta_b, gamma_a]
// The wedge bracket is symmetric in its two arguments.
AlgebraField d_cells(const AlgebraForm1& form);
AlgebraField dstar_cells(const AlgebraForm1& form);
AlgebraField wedge_bracket(const AlgebraForm1& beta, const AlgebraForm1& gamma);

// Flatness residual d alpha + 1/2 [alpha ^ alpha] per cell.
AlgebraField mc_cells(const AlgebraForm1& form);
double mc_residual(const AlgebraForm1& form);

// Group-valued function, one adjoint-representation matrix per point.  The
// adjoint image is faithful for the semisimple fixtures shipped here, and it
// preserves the Killing form, so membership is orthogonality in a
// Killing-orthonormal basis plus compatibility with the bracket.
struct GroupField {
  LatticeGrid grid;
  std::shared_ptr<const LieAlgebra> algebra;
  std::vector<RMat> matrix;

  GroupField() = default;
  GroupField(const LatticeGrid& g, std::shared_ptr<const LieAlgebra> alg);
  static GroupField identity(const LatticeGrid& g,
                             std::shared_ptr<const LieAlgebra> alg);

  const RMat& at(int x, int y) const { return matrix[grid.index(x, y)]; }
  RMat& at(int x, int y) { return matrix[grid.index(x, y)]; }

  double membership_residual() const;
};

// exp(ad xi) for a coefficient vector xi.
RMat group_exp(const LieAlgebra& alg, const RVec& xi);

// Left-logarithmic derivative alpha = U^-1 dU by central differences, with
// the matrix M^-1 dM pulled back to coefficients through ad (least squares;
// exact for fields that are genuinely ad-images).  O(h^2).
AlgebraForm1 maurer_cartan_form(const GroupField& field);

// Solves U^-1 dU = alpha by midpoint exponentials, first along the y = 0 row
// and then up each column.  Throws StructureError when the flatness residual
// of alpha exceeds flatness_tol: without flatness the answer depends on the
// integration path.  path_residual integrates columns-then-rows instead and
// reports the largest pointwise deviation between the two orders.
struct IntegrationResult {
  GroupField field;
  double mc_max = 0.0;
  double path_residual = 0.0;
  double reconstruction_residual = 0.0;  // max |coords(U^-1 dU) - alpha|
};
IntegrationResult integrate_mc(const AlgebraForm1& alpha,
                               double flatness_tol = 1e-6);

}  // namespace ksym
