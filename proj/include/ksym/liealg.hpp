#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ksym/errors.hpp"

namespace ksym {

using RVec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;
using Cplx = std::complex<double>;

// Real Lie algebra given by structure constants: [e_i, e_j] = sum_k c_ijk e_k.
// The flat array is the ground truth; matrix realizations appear only in tests
// as oracles.  Complexification is implicit: every bracket accepts complex
// coordinates over the same constants.
struct LieAlgebra {
  int dim = 0;
  std::vector<std::string> labels;
  std::vector<double> c;  // c[(i*dim + j)*dim + k]

  double cijk(int i, int j, int k) const {
    return c[(static_cast<std::size_t>(i) * dim + j) * dim + k];
  }

  RVec bracket(const RVec& x, const RVec& y) const;
  CVec bracket(const CVec& x, const CVec& y) const;

  // Accumulating forms: out += scale * [x, y].
  void bracket_accum(const RVec& x, const RVec& y, double scale, RVec& out) const;
  void bracket_accum(const CVec& x, const CVec& y, Cplx scale, CVec& out) const;

  // Matrix of ad(x): column j holds [x, e_j].
  RMat ad(const RVec& x) const;
  CMat ad(const CVec& x) const;

  // max_{i<j,k} |c_ijk + c_jik|
  double antisymmetry_residual() const;
  // max over basis triples of ||[[e_i,e_j],e_k] + [[e_j,e_k],e_i] + [[e_k,e_i],e_j]||_inf
  double jacobi_residual() const;

  // Killing form K(x, y) = tr(ad x . ad y) and its Gram matrix on the basis.
  double killing(const RVec& x, const RVec& y) const;
  RMat killing_matrix() const;
  // max over basis triples of |K([z,x],y) + K(x,[z,y])|
  double killing_invariance_residual() const;
};

// Coordinate vector bound to its algebra.  Stored complex; real elements are
// the ones with vanishing imaginary part.
struct AlgebraElement {
  const LieAlgebra* algebra = nullptr;
  CVec coords;

  bool is_real(double tol = 1e-12) const;
};

AlgebraElement bracket(const AlgebraElement& x, const AlgebraElement& y);

LieAlgebra abelian_algebra(int dim);

}  // namespace ksym
