#include "ksym/georesid.hpp"

#include <cmath>

#include "ksym/errors.hpp"

namespace ksym {

namespace {

RMat real_checked(const CMat& m, const char* what) {
  if (m.imag().cwiseAbs().maxCoeff() > 1e-10)
    throw StructureError(std::string(what) + " is not real");
  return m.real();
}

CVec apply_real(const RMat& map, const CVec& v) {
  RVec re = map * v.real();
  RVec im = map * v.imag();
  return re.cast<Cplx>() + Cplx(0.0, 1.0) * im.cast<Cplx>();
}

}  // namespace

GradedMaps graded_maps(const GradedDecomposition& dec) {
  const int d = dec.algebra->dim;
  GradedMaps maps;
  maps.kprime = dec.kprime;
  maps.even = dec.even();
  maps.levels = dec.m_count();
  maps.p0 = real_checked(dec.P(0), "invariant projector");
  maps.pn = RMat::Identity(d, d) - maps.p0;
  maps.pv = maps.even
                ? real_checked(dec.P(dec.kprime / 2), "vertical projector")
                : RMat::Zero(d, d);
  maps.pm = maps.pn - maps.pv;
  CMat f = CMat::Zero(d, d);
  for (int j = 1; j <= maps.levels; ++j)
    f += Cplx(0.0, 1.0) * (dec.P(-j) - dec.P(j));
  maps.f0 = real_checked(f, "invariant structure map");
  return maps;
}

AlgebraField tension_cells(const AlgebraForm1& alpha, const GradedMaps& maps) {
  AlgebraForm1 an = alpha.applied(maps.pn);
  AlgebraForm1 a0 = alpha.applied(maps.p0);
  AlgebraField out = dstar_cells(an);
  const LieAlgebra& alg = *alpha.algebra;
  for (std::size_t p = 0; p < out.value.size(); ++p)
    out.value[p] += alg.bracket(a0.a.value[p], an.a.value[p]) +
                    alg.bracket(a0.b.value[p], an.b.value[p]);
  return out;
}

AlgebraField harmonic_residual(const AlgebraForm1& alpha,
                               const GradedDecomposition& dec) {
  return tension_cells(alpha, graded_maps(dec));
}

AlgebraField vertical_harmonic_residual(const AlgebraForm1& alpha,
                                        const GradedDecomposition& dec) {
  if (!dec.even())
    throw InputError("vertical residual needs an even-order decomposition");
  GradedMaps maps = graded_maps(dec);
  AlgebraForm1 av = alpha.applied(maps.pv);
  AlgebraForm1 a0 = alpha.applied(maps.p0);
  AlgebraField out = dstar_cells(av);
  const LieAlgebra& alg = *alpha.algebra;
  for (std::size_t p = 0; p < out.value.size(); ++p)
    out.value[p] += alg.bracket(a0.a.value[p], av.a.value[p]) +
                    alg.bracket(a0.b.value[p], av.b.value[p]);
  return out;
}

std::vector<AlgebraField> band_from_form(const AlgebraForm1& alpha,
                                         const GradedDecomposition& dec,
                                         int mband) {
  if (mband < 0) throw InputError("band degree must be nonnegative");
  std::vector<AlgebraField> band;
  band.reserve(static_cast<std::size_t>(mband) + 1);
  const Cplx ih(0.0, 1.0);
  for (int j = 0; j <= mband; ++j) {
    const CMat& pj = dec.P(-j);
    AlgebraField u = Cplx(0.5, 0.0) *
                     (alpha.a.applied(pj) - ih * alpha.b.applied(pj));
    band.push_back(std::move(u));
  }
  return band;
}

AlgebraForm1 form_from_band(const std::vector<AlgebraField>& band) {
  if (band.empty()) throw InputError("band is empty");
  AlgebraForm1 out(band[0].grid, band[0].algebra);
  const Cplx ih(0.0, 1.0);
  for (const AlgebraField& u : band) {
    AlgebraField cu = u.conjugated();
    out.a = out.a + u + cu;
    out.b = out.b + ih * u - ih * cu;
  }
  return out;
}

namespace {

AlgebraField dbar_cells(const AlgebraField& u) {
  return Cplx(0.0, 1.0) * dx_field(u) - dy_field(u);
}

AlgebraField del_cells(const AlgebraField& v) {
  return Cplx(0.0, -1.0) * dx_field(v) - dy_field(v);
}

}  // namespace

std::vector<AlgebraField> graded_system_cells(
    const std::vector<AlgebraField>& band) {
  if (band.empty()) throw InputError("band is empty");
  const int m = static_cast<int>(band.size()) - 1;
  const LieAlgebra& alg = *band[0].algebra;
  const Cplx two_i(0.0, 2.0);
  std::vector<AlgebraField> cells;
  cells.reserve(band.size());

  AlgebraField real_eq = dbar_cells(band[0]) + del_cells(band[0].conjugated());
  for (int i = 0; i <= m; ++i)
    for (std::size_t p = 0; p < real_eq.value.size(); ++p)
      real_eq.value[p] -= two_i * alg.bracket(band[i].value[p],
                                              band[i].value[p].conjugate());
  cells.push_back(std::move(real_eq));

  for (int j = 1; j <= m; ++j) {
    AlgebraField eq = dbar_cells(band[j]);
    for (int i = 0; i + j <= m; ++i)
      for (std::size_t p = 0; p < eq.value.size(); ++p)
        eq.value[p] += two_i * alg.bracket(band[i].value[p].conjugate(),
                                           band[i + j].value[p]);
    cells.push_back(std::move(eq));
  }
  return cells;
}

HolHarmonicResult hol_harmonic_residual(const AlgebraForm1& alpha,
                                        const GradedDecomposition& dec,
                                        int t) {
  if (dec.even())
    throw StructureError(
        "even-order decomposition carries no invariant complex structure");
  if (t != 0 && t != 1) throw InputError("t must be 0 or 1");

  GradedMaps maps = graded_maps(dec);
  const int kp = dec.kprime;
  std::vector<AlgebraField> band = band_from_form(alpha, dec, kp - 1);
  std::vector<AlgebraField> cells = graded_system_cells(band);
  AlgebraField mc = mc_cells(alpha);
  AlgebraField tau = tension_cells(alpha, maps);

  AlgebraForm1 an = alpha.applied(maps.pn);
  AlgebraField torsion(alpha.grid, alpha.algebra);
  const LieAlgebra& alg = *alpha.algebra;
  for (std::size_t p = 0; p < torsion.value.size(); ++p)
    torsion.value[p] =
        apply_real(maps.pn, alg.bracket(an.a.value[p], an.b.value[p])) +
        apply_real(maps.f0, tau.value[p]);

  HolHarmonicResult result;
  if (t == 1) {
    result.graded = cells[1];
    result.invariant =
        (Cplx(0.5, 0.0) * (torsion + mc)).applied(dec.P(-1));
  } else {
    result.graded = cells[static_cast<std::size_t>(kp) - 1];
    result.invariant = (Cplx(0.5, 0.0) * (mc - torsion)).applied(dec.P(1));
  }
  result.agreement = (result.graded - result.invariant).max_abs();
  return result;
}

AlgebraField stringy_residual(const AlgebraForm1& alpha,
                              const GradedDecomposition& dec,
                              StringyVariant variant, SystemParity parity) {
  GradedMaps maps = graded_maps(dec);
  if ((parity == SystemParity::Even) != maps.even)
    throw InputError("parity does not match the decomposition order");
  if (alpha.max_imag() > 1e-9)
    throw InputError("stringy residuals are defined for real forms");

  AlgebraField tau = tension_cells(alpha, maps);
  AlgebraForm1 fa = alpha.applied(maps.f0);

  if (variant == StringyVariant::Dot) {
    AlgebraField q = wedge_bracket(fa, fa);
    return tau + Cplx(-0.5, 0.0) * q.applied(maps.f0);
  }

  if (parity == SystemParity::Odd) {
    AlgebraForm1 cn = alpha.applied(maps.pn);
    AlgebraField mid = wedge_bracket(fa, cn).applied(maps.pn);
    AlgebraField quart =
        (wedge_bracket(fa, fa) + wedge_bracket(cn, cn)).applied(maps.f0);
    return tau + Cplx(0.5, 0.0) * mid + Cplx(-0.25, 0.0) * quart;
  }

  AlgebraForm1 cm = alpha.applied(maps.pm);
  AlgebraForm1 cv = alpha.applied(maps.pv);
  AlgebraField mid = wedge_bracket(fa, cm).applied(maps.pv);
  AlgebraField vert = Cplx(2.0, 0.0) * wedge_bracket(fa, cv);
  AlgebraField mline(alpha.grid, alpha.algebra);
  const LieAlgebra& alg = *alpha.algebra;
  for (std::size_t p = 0; p < mline.value.size(); ++p)
    mline.value[p] =
        apply_real(maps.f0, alg.bracket(fa.a.value[p], fa.b.value[p]));
  return tau + mid - mline + vert;
}

}  // namespace ksym
