#pragma once

#include <vector>

#include "ksym/georesid.hpp"
#include "ksym/homogeo.hpp"
#include "ksym/lattice.hpp"

namespace ksym {

// Discrete sigma-model energy 1/2 sum_cells (|a_n|^2 + |b_n|^2) h^2 of the
// left-logarithmic derivative, in coordinates.  The shipped bases are
// Killing-orthonormal up to one overall scale, so this is the invariant
// normal-metric energy up to that scale.
double harmonic_energy(const AlgebraForm1& alpha, const GradedMaps& maps);

// Gradient descent on the harmonic energy.  Each step retracts through the
// exponential: U <- U exp(rate * ad(tension cell)), which is the discrete
// heat-flow update (the first variation of the energy along ad(xi) is
// -<xi, tension> summed over cells).  Fails with DivergenceError after 10
// consecutive energy increases.  residual_history records the sup norm of
// the harmonic residual every record_every steps (and at the last step).
struct SolveOptions {
  int steps = 1000;
  double rate = 1e-3;
  double residual_tol = 0.0;  // stop early once the sup residual drops below
  int record_every = 10;
};
struct SolveResult {
  GroupField field;
  std::vector<double> energy_history;
  std::vector<double> residual_history;
  int steps_taken = 0;
  bool reached_tol = false;
  double initial_residual = 0.0;
  double final_residual = 0.0;
};
SolveResult solve_harmonic(const GradedDecomposition& dec,
                           const GroupField& initial,
                           const SolveOptions& opts);

// Two routes to the first variation of the discrete action
//   S = E + WZ,   delta WZ = sum_cells H(a_n, b_n, delta) h^2.
// fd:       two-sided finite difference of E along the orbit tangent at form
//           level, alpha + eps (d delta + [alpha, delta]), plus the WZ
//           variation cell sum over the closed lowered 3-form H (no 3-chain
//           is ever built).
// analytic: sum_cells <-(tension) + W(a_n, b_n), delta> h^2 with W the
//           vector-valued torsion-action tensor of the target geometry.
// The two agree when H pairs as W, which ties the harmonicity equation to
// the sigma-model-with-boundary-term variation.  Zero-dimensional H and W
// reduce the check to the plain energy gradient.  direction is a real
// ambient-coordinate field; only its n-part enters either side.
struct GradientCheck {
  double fd = 0.0;
  double analytic = 0.0;
  double rel_gap = 0.0;
};
GradientCheck action_gradient_check(const ReductiveSplit& split,
                                    const TrilinearForm& wz_form,
                                    const Tens3& torsion_action,
                                    const GroupField& field,
                                    const AlgebraField& direction,
                                    double fd_step);

}  // namespace ksym
