#pragma once

#include <memory>
#include <vector>

#include "ksym/liealg.hpp"

namespace ksym {

// Order-k' automorphism of a Lie algebra, validated on construction:
// tau[X,Y] = [tauX, tauY] on basis pairs and tau^{k'} = Id with k' minimal.
struct FiniteOrderAutomorphism {
  std::shared_ptr<const LieAlgebra> algebra;
  RMat map;
  int order = 0;
};

double automorphism_residual(const LieAlgebra& g, const RMat& m);
// Smallest p in [1, max_order] with ||m^p - Id||_max < tol, or 0 if none.
int minimal_power_identity(const RMat& m, int max_order, double tol = 1e-8);

FiniteOrderAutomorphism make_automorphism(std::shared_ptr<const LieAlgebra> g,
                                          RMat m, int order,
                                          double tol = 1e-8);
FiniteOrderAutomorphism make_automorphism(LieAlgebra g, RMat m, int order,
                                          double tol = 1e-8);

// Root-of-unity resolvent projector onto the omega^j eigenspace of tau.
CMat eigenprojector(const FiniteOrderAutomorphism& tau, int j);

struct DecompositionResiduals {
  double idempotence = 0;   // max ||P_j^2 - P_j||
  double resolution = 0;    // ||sum_j P_j - Id||
  double equivariance = 0;  // max ||tau P_j - omega^j P_j||
  double reality = 0;       // max ||conj(P_j) - P_{-j}||
  double grading = 0;       // max ||(Id - P_{i+j}) [P_i X, P_j Y]||
  double max() const;
};

// Eigenspace decomposition data for an order-k' automorphism.  Real bases are
// orthonormal; m_j columns come from Re/Im parts of a complex basis of the
// (-j)-eigenspace.
struct GradedDecomposition {
  std::shared_ptr<const LieAlgebra> algebra;
  int kprime = 0;
  Cplx omega;
  RMat tau;
  std::vector<CMat> projectors;  // P_0 .. P_{k'-1}
  RMat basis_g0;
  std::vector<RMat> basis_mj;  // j = 1 .. m_count(), column blocks
  RMat basis_gk;               // even k' only; 0 columns otherwise

  const CMat& P(int j) const;  // index mod k'
  int dim_gj(int j) const;     // complex dimension of the omega^j eigenspace
  int m_count() const;         // k-1 for k'=2k, k for k'=2k+1
  bool even() const { return kprime % 2 == 0; }
};

GradedDecomposition grade(const FiniteOrderAutomorphism& tau, double tol = 1e-9);
DecompositionResiduals decomposition_residuals(const GradedDecomposition& d);
// True when ad restricted to g_0 acts injectively on the complement.
bool effectivity(const GradedDecomposition& d, double tol = 1e-9);

enum class SystemKind {
  Primitive,
  MinimalDetermined,
  IntermediateDetermined,
  MaximalDetermined,
  Underdetermined,
};
const char* to_string(SystemKind k);

// Position of the order-m system relative to the thresholds:
// threshold floor((k'+1)/2) (0 for k'=1); determined band up to k'-1.
// At the boundaries both flags can hold at once (e.g. k'=2,3 minimal band).
struct SystemClass {
  int m = 0;
  int kprime = 0;
  int m_threshold = 0;
  SystemKind kind = SystemKind::Primitive;
  bool minimal_determined = false;
  bool maximal_determined = false;
};
SystemClass classify_system(int m, int kprime);

// Product algebra g^{q+1} with the cyclic-shift automorphism
// (a_0,...,a_q) -> (a_1,...,a_q, tau(a_0)); order (q+1)k', verified.
struct LiftedSystem {
  LieAlgebra algebra;
  RMat matrix;
  int order = 0;
  int q = 0;
};
LiftedSystem underdetermined_lift(const LieAlgebra& g, const RMat& tau,
                                  int kprime, int m);

// Orthonormal basis of the column span; deterministic column pivoting.
RMat orthonormal_columns(const RMat& a, double tol = 1e-9);
// Complex orthonormal basis of the image of a projector (singular values > 0.5).
CMat projector_image(const CMat& p);

}  // namespace ksym
