#include "ksym/solver.hpp"

#include <algorithm>
#include <cmath>

#include "ksym/errors.hpp"

namespace ksym {

double harmonic_energy(const AlgebraForm1& alpha, const GradedMaps& maps) {
  AlgebraForm1 an = alpha.applied(maps.pn);
  double e = 0.0;
  for (std::size_t p = 0; p < an.a.value.size(); ++p)
    e += an.a.value[p].squaredNorm() + an.b.value[p].squaredNorm();
  return 0.5 * e * alpha.grid.h * alpha.grid.h;
}

SolveResult solve_harmonic(const GradedDecomposition& dec,
                           const GroupField& initial,
                           const SolveOptions& opts) {
  if (initial.algebra->dim != dec.algebra->dim)
    throw InputError("initial field and decomposition disagree on the algebra");
  if (opts.steps < 0 || !(opts.rate > 0.0))
    throw InputError("solver needs steps >= 0 and a positive rate");

  GradedMaps maps = graded_maps(dec);
  const LieAlgebra& alg = *initial.algebra;

  SolveResult result;
  result.field = initial;
  GroupField& u = result.field;

  double prev_energy = 0.0;
  int rising = 0;

  auto record = [&](double energy, double residual) {
    result.energy_history.push_back(energy);
    result.residual_history.push_back(residual);
  };

  for (int step = 0;; ++step) {
    AlgebraForm1 alpha = maurer_cartan_form(u);
    AlgebraField tau = tension_cells(alpha, maps);
    double energy = harmonic_energy(alpha, maps);
    double residual = tau.max_abs();

    // Rounding-level jitter near an energy floor is not divergence; only
    // count increases that clear a relative threshold.
    const double rise_tol = 1e-12 * std::max(1.0, std::abs(prev_energy));
    if (step == 0) {
      result.initial_residual = residual;
    } else if (energy > prev_energy + rise_tol) {
      if (++rising >= 10)
        throw DivergenceError("energy increased for 10 consecutive steps");
    } else if (energy <= prev_energy) {
      rising = 0;
    }
    prev_energy = energy;

    if (step % opts.record_every == 0 || step == opts.steps) record(energy, residual);

    result.steps_taken = step;
    result.final_residual = residual;
    if (opts.residual_tol > 0.0 && residual <= opts.residual_tol) {
      result.reached_tol = true;
      break;
    }
    if (step == opts.steps) break;

    for (int p = 0; p < u.grid.npoints(); ++p) {
      RVec xi = opts.rate * tau.value[p].real();
      u.matrix[p] = u.matrix[p] * group_exp(alg, xi);
    }
  }
  return result;
}

namespace {

double contract(const TrilinearForm& h, const RVec& x, const RVec& y,
                const RVec& z) {
  double acc = 0.0;
  for (int i = 0; i < h.dim; ++i) {
    if (x(i) == 0.0) continue;
    for (int j = 0; j < h.dim; ++j) {
      if (y(j) == 0.0) continue;
      double xy = x(i) * y(j);
      for (int k = 0; k < h.dim; ++k) acc += h.at(i, j, k) * xy * z(k);
    }
  }
  return acc;
}

GradedMaps split_maps(const ReductiveSplit& split) {
  GradedMaps maps;
  maps.p0 = split.h_basis * split.h_basis.transpose();
  maps.pn = split.n_basis * split.n_basis.transpose();
  const int d = split.algebra->dim;
  maps.pm = RMat::Zero(d, d);
  maps.pv = RMat::Zero(d, d);
  maps.f0 = RMat::Zero(d, d);
  return maps;
}

}  // namespace

GradientCheck action_gradient_check(const ReductiveSplit& split,
                                    const TrilinearForm& wz_form,
                                    const Tens3& torsion_action,
                                    const GroupField& field,
                                    const AlgebraField& direction,
                                    double fd_step) {
  if (!(fd_step > 0.0)) throw InputError("finite-difference step must be positive");
  const bool has_wz = wz_form.dim > 0;
  const bool has_act = torsion_action.n > 0;
  if (has_wz) {
    if (!wz_form.lowered) throw InputError("the 3-form must be lowered");
    if (wz_form.dim != split.n_dim())
      throw InputError("3-form dimension does not match the split");
  }
  if (has_act && torsion_action.n != split.n_dim())
    throw InputError("action tensor dimension does not match the split");

  GradedMaps maps = split_maps(split);
  const LieAlgebra& alg = *field.algebra;
  const double cell = field.grid.h * field.grid.h;

  // Orbit tangent at the level of the logarithmic derivative: moving the
  // field by exp(eps delta) moves the form by eps (d delta + [alpha, delta])
  // to first order.  Differencing the energy along this line checks the
  // summation-by-parts identity behind the tension cells without the
  // second-order error of re-extracting the form from a retracted field.
  AlgebraForm1 alpha = maurer_cartan_form(field);
  AlgebraField dreal = direction.real_part();
  AlgebraForm1 var(alpha.grid, alpha.algebra);
  {
    AlgebraField dxd = dx_field(dreal), dyd = dy_field(dreal);
    for (std::size_t p = 0; p < var.a.value.size(); ++p) {
      const CVec& d = dreal.value[p];
      var.a.value[p] = dxd.value[p] + alg.bracket(alpha.a.value[p], d);
      var.b.value[p] = dyd.value[p] + alg.bracket(alpha.b.value[p], d);
    }
  }
  GradientCheck out;
  out.fd = (harmonic_energy(alpha + fd_step * var, maps) -
            harmonic_energy(alpha + (-fd_step) * var, maps)) /
           (2.0 * fd_step);
  AlgebraField tau = tension_cells(alpha, maps);
  const int nd = split.n_dim();
  for (int p = 0; p < field.grid.npoints(); ++p) {
    RVec d = direction.value[p].real();
    RVec dn = split.n_coords(d);
    RVec tn = split.n_coords(tau.value[p].real());
    out.analytic -= cell * tn.dot(dn);
    if (!has_wz && !has_act) continue;
    RVec an = split.n_coords(alpha.a.value[p].real());
    RVec bn = split.n_coords(alpha.b.value[p].real());
    if (has_wz) out.fd += cell * contract(wz_form, an, bn, dn);
    if (has_act) {
      RVec w = RVec::Zero(nd);
      for (int i = 0; i < nd; ++i)
        for (int j = 0; j < nd; ++j) {
          double xy = an(i) * bn(j);
          if (xy == 0.0) continue;
          for (int k = 0; k < nd; ++k) w(k) += torsion_action.at(i, j, k) * xy;
        }
      out.analytic += cell * w.dot(dn);
    }
  }

  double scale = std::max(std::abs(out.fd), std::abs(out.analytic));
  out.rel_gap = scale > 0.0 ? std::abs(out.fd - out.analytic) / scale : 0.0;
  return out;
}

}  // namespace ksym
