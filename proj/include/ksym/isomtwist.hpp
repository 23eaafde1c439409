#pragma once

#include <vector>

#include "ksym/liealg.hpp"

namespace ksym {

// Special-orthogonal matrix of finite order 2k with no eigenvalue +-1 and at
// least one eigenvalue angle pi*j/k with j coprime to 2k. These are the
// points of the order-2k twistor family on R^{2n}.
struct FiniteIsometry {
  RMat matrix;
  int k = 0;      // matrix^{2k} = Id
  int n = 0;      // half the ambient dimension
  int order = 0;  // minimal power reaching Id; 2k for valid members
  int r = 0;      // order of conjugation by matrix: k if matrix^k = -Id, else 2k
  bool no_eig_plus1 = false;
  bool no_eig_minus1 = false;
};

// Validates membership. InputError for malformed input (non-square, odd
// dimension, k < 1); StructureError when the matrix is not special
// orthogonal, has the wrong order, has an eigenvalue +-1, or misses the
// coprime-angle condition.
FiniteIsometry make_isometry(RMat a, int k, double tol = 1e-8);

// Connected-component data: p_j = dim_C ker(A - omega_{2k}^j), j = 1..k-1,
// and the orientation sign eps of the eigenbasis intertwiner to the
// canonical block form. Two members are SO(2n)-conjugate iff these agree.
struct ComponentInvariant {
  int eps = 0;
  std::vector<int> p;
  int r = 0;
};
ComponentInvariant component_invariant(const FiniteIsometry& a);

// Orthogonal M with M^T A M = blockdiag of plane rotations by pi*j/k,
// angles ascending with multiplicity p_j. Column pairs are
// (sqrt2*Im v, sqrt2*Re v) per unit eigenvector v; any complex-orthonormal
// eigenbasis yields the same det sign, which is the eps invariant.
struct CanonicalFrame {
  RMat m;
  RMat j0;
  double residual = 0.0;  // max |M^T A M - J0|
};
CanonicalFrame canonical_frame(const FiniteIsometry& a);

// Eigenspace decomposition of X -> A X A^{-1} on End(R^{2n}), eigenvalues
// omega_r^j. Projectors act on column-major vectorized matrices. rank_so
// and rank_jso count the intersections with so(2n)^C and (A.so(2n))^C.
struct AdjEigenspaces {
  int r = 0;
  int dim = 0;  // (2n)^2
  std::vector<CMat> proj;
  std::vector<int> rank_full;
  std::vector<int> rank_so;
  std::vector<int> rank_jso;
  double idempotence = 0.0;
  double resolution = 0.0;
};
AdjEigenspaces adj_eigenspaces(const FiniteIsometry& a);

// Compares the eigenspaces of conjugation by A^power, computed directly,
// against the regrouped sums of the conjugation-by-A eigenspaces. The
// eigenvalue index l on the left picks indices l' + q*(r/gcd) on the right,
// with l' = l times the inverse of power/gcd modulo r/gcd.
struct PowerSplitReport {
  int power = 0;
  int gcd = 0;
  int suborder = 0;  // r / gcd, order of conjugation by A^power
  std::vector<double> residual_l;
  double max_residual = 0.0;
};
PowerSplitReport power_eigenspace_check(const FiniteIsometry& a, int power);

// Tangent space at A: power = 1 gives the full family (kernel of the
// differential of X -> X^{2k} restricted to A.so, reduced to order r);
// power = j > 1 cuts it with the kernel of the differential of X -> X^j,
// the tangent of the j-th power fiber. Computed twice: as a brute-force
// kernel and as the span of the structurally nonzero twisted eigenspace
// blocks; agreement is the gap between the two subspace projectors.
struct TangentSpace {
  int power = 1;
  int dim_kernel = 0;
  int dim_blocks = 0;
  RMat basis;  // orthonormal columns, vectorized 2n x 2n matrices
  double agreement = 0.0;
};
TangentSpace tangent_space(const FiniteIsometry& a, int power = 1);

}  // namespace ksym
