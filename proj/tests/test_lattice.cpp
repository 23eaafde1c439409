#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <memory>
#include <random>
#include <vector>

#include "ksym/errors.hpp"
#include "ksym/georesid.hpp"
#include "ksym/homogeo.hpp"
#include "ksym/jsonio.hpp"
#include "ksym/lattice.hpp"
#include "ksym/solver.hpp"

using namespace ksym;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

GradedDecomposition dec_of(const std::string& name) {
  const AutomorphismFixture f =
      load_automorphism_fixture(fixture_dir() + "/" + name);
  return grade(make_automorphism(f.algebra, f.matrix, f.order));
}

// alpha(d) for U = exp(p): sum_k (-ad p)^k dp / (k+1)!.
RVec log_derivative(const LieAlgebra& alg, const RVec& p, const RVec& dp) {
  RMat a = alg.ad(p);
  RVec cur = dp;
  RVec acc = dp;
  double fact = 1.0;
  for (int k = 1; k <= 36; ++k) {
    cur = -(a * cur);
    fact *= static_cast<double>(k + 1);
    acc += cur / fact;
  }
  return acc;
}

// Coefficient function with exact partial derivatives, plus its value as an
// algebra exponent: p(x,y) = sum_d c_d(x,y) xi_d.
struct SmoothExponent {
  std::vector<RVec> dirs;
  std::vector<std::function<double(double, double)>> val, ddx, ddy;

  RVec p(double x, double y) const {
    RVec out = RVec::Zero(dirs[0].size());
    for (std::size_t d = 0; d < dirs.size(); ++d) out += val[d](x, y) * dirs[d];
    return out;
  }
  RVec px(double x, double y) const {
    RVec out = RVec::Zero(dirs[0].size());
    for (std::size_t d = 0; d < dirs.size(); ++d) out += ddx[d](x, y) * dirs[d];
    return out;
  }
  RVec py(double x, double y) const {
    RVec out = RVec::Zero(dirs[0].size());
    for (std::size_t d = 0; d < dirs.size(); ++d) out += ddy[d](x, y) * dirs[d];
    return out;
  }
};

// Periodic two-direction exponent on a fixture algebra.
SmoothExponent trig_exponent(const LieAlgebra& alg, const RMat& pn) {
  SmoothExponent s;
  RVec xi1 = pn * RVec::Unit(alg.dim, 0);
  RVec xi2 = pn * RVec::Unit(alg.dim, 3);
  xi1.normalize();
  xi2 -= xi2.dot(xi1) * xi1;
  xi2.normalize();
  s.dirs = {xi1, xi2};
  s.val = {[](double x, double y) {
             return 0.3 * std::sin(kTwoPi * x) + 0.1 * std::cos(kTwoPi * y);
           },
           [](double x, double y) {
             return 0.2 * std::cos(kTwoPi * x) * std::sin(kTwoPi * y);
           }};
  s.ddx = {[](double x, double) { return 0.3 * kTwoPi * std::cos(kTwoPi * x); },
           [](double x, double y) {
             return -0.2 * kTwoPi * std::sin(kTwoPi * x) * std::sin(kTwoPi * y);
           }};
  s.ddy = {[](double, double y) { return -0.1 * kTwoPi * std::sin(kTwoPi * y); },
           [](double x, double y) {
             return 0.2 * kTwoPi * std::cos(kTwoPi * x) * std::cos(kTwoPi * y);
           }};
  return s;
}

// Exact samples of U^-1 dU for U = exp(p) on the grid.
AlgebraForm1 sampled_log_derivative(const LatticeGrid& grid,
                                    std::shared_ptr<const LieAlgebra> alg,
                                    const SmoothExponent& s) {
  AlgebraForm1 out(grid, alg);
  for (int y = 0; y < grid.ny; ++y)
    for (int x = 0; x < grid.nx; ++x) {
      double xr = x * grid.h, yr = y * grid.h;
      RVec p = s.p(xr, yr);
      out.a.at(x, y) = log_derivative(*alg, p, s.px(xr, yr)).cast<Cplx>();
      out.b.at(x, y) = log_derivative(*alg, p, s.py(xr, yr)).cast<Cplx>();
    }
  return out;
}

GroupField sampled_group(const LatticeGrid& grid,
                         std::shared_ptr<const LieAlgebra> alg,
                         const SmoothExponent& s) {
  GroupField out(grid, alg);
  for (int y = 0; y < grid.ny; ++y)
    for (int x = 0; x < grid.nx; ++x)
      out.at(x, y) = group_exp(*alg, s.p(x * grid.h, y * grid.h));
  return out;
}

AlgebraForm1 random_real_form(const LatticeGrid& grid,
                              std::shared_ptr<const LieAlgebra> alg,
                              unsigned seed, double scale = 1.0) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  AlgebraForm1 out(grid, alg);
  for (int p = 0; p < grid.npoints(); ++p)
    for (int i = 0; i < alg->dim; ++i) {
      out.a.value[p](i) = u(rng);
      out.b.value[p](i) = u(rng);
    }
  return out;
}

std::vector<AlgebraField> random_band(const LatticeGrid& grid,
                                      const GradedDecomposition& dec, int m,
                                      unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<AlgebraField> band;
  for (int j = 0; j <= m; ++j) {
    AlgebraField f(grid, dec.algebra);
    for (int p = 0; p < grid.npoints(); ++p) {
      CVec raw(dec.algebra->dim);
      for (int i = 0; i < dec.algebra->dim; ++i)
        raw(i) = Cplx(u(rng), u(rng));
      f.value[p] = dec.P(-j) * raw;
    }
    band.push_back(std::move(f));
  }
  return band;
}

double imag_gap(const AlgebraField& real_field, const AlgebraField& cplx,
                double factor) {
  return (real_field - Cplx(factor, 0.0) * cplx.imag_part()).max_abs();
}

}  // namespace

TEST_CASE("hodge star squares to minus the identity") {
  auto dec = dec_of("su3_order3.json");
  LatticeGrid grid(5, 4, 0.25);
  AlgebraForm1 f = random_real_form(grid, dec.algebra, 11);
  AlgebraForm1 twice = hodge(hodge(f));
  CHECK((twice + f).max_abs() == 0.0);
}

TEST_CASE("wedge bracket is symmetric and kills form-wedge-star-form") {
  auto dec = dec_of("su3_order3.json");
  LatticeGrid grid(6, 6, 1.0 / 6);
  AlgebraForm1 f = random_real_form(grid, dec.algebra, 21);
  AlgebraForm1 g = random_real_form(grid, dec.algebra, 22);
  CHECK((wedge_bracket(f, g) - wedge_bracket(g, f)).max_abs() <= 1e-13);
  // The t-dependent tension correction is this cell; it vanishes identically.
  CHECK(wedge_bracket(f, hodge(f)).max_abs() <= 1e-13);
}

TEST_CASE("clamped derivatives are exact on quadratics including edges") {
  auto dec = dec_of("su3_order3.json");
  LatticeGrid grid(9, 9, 0.125, LatticeGrid::Boundary::Clamped);
  AlgebraField f(grid, dec.algebra);
  RVec xi = RVec::Unit(dec.algebra->dim, 0);
  for (int y = 0; y < grid.ny; ++y)
    for (int x = 0; x < grid.nx; ++x) {
      double xr = x * grid.h;
      f.at(x, y) = (xr * xr * xi).cast<Cplx>();
    }
  AlgebraField d = dx_field(f);
  double worst = 0.0;
  for (int y = 0; y < grid.ny; ++y)
    for (int x = 0; x < grid.nx; ++x)
      worst = std::max(worst,
                       (d.at(x, y) - (2.0 * x * grid.h * xi).cast<Cplx>())
                           .cwiseAbs()
                           .maxCoeff());
  CHECK(worst <= 1e-12);
}

TEST_CASE("flatness residual: commuting constants, flat fields, random data") {
  auto dec = dec_of("su3_order3.json");
  auto alg = dec.algebra;

  // Two Cartan directions commute; the constant form is exactly flat.
  LatticeGrid grid(8, 8, 0.125);
  AlgebraForm1 form(grid, alg);
  for (int p = 0; p < grid.npoints(); ++p) {
    form.a.value[p] = CVec::Unit(alg->dim, 2);
    form.b.value[p] = CVec::Unit(alg->dim, 7);
  }
  REQUIRE(alg->bracket(RVec(RVec::Unit(alg->dim, 2)),
                       RVec(RVec::Unit(alg->dim, 7)))
              .cwiseAbs()
              .maxCoeff() <= 1e-14);
  CHECK(mc_residual(form) <= 1e-13);

  // Exact left-logarithmic derivative of a smooth exponential: O(h^2),
  // quartering under refinement.
  GradedMaps maps = graded_maps(dec);
  SmoothExponent s = trig_exponent(*alg, maps.pn);
  double r8 = mc_residual(
      sampled_log_derivative(LatticeGrid(8, 8, 1.0 / 8), alg, s));
  double r16 = mc_residual(
      sampled_log_derivative(LatticeGrid(16, 16, 1.0 / 16), alg, s));
  double r32 = mc_residual(
      sampled_log_derivative(LatticeGrid(32, 32, 1.0 / 32), alg, s));
  CHECK(r8 / r16 == doctest::Approx(4.0).epsilon(0.2));
  CHECK(r16 / r32 == doctest::Approx(4.0).epsilon(0.2));

  // Random data is nowhere near flat.
  CHECK(mc_residual(random_real_form(grid, alg, 31)) > 0.1);
}

TEST_CASE("sampled log derivative matches a one-step exponential") {
  auto dec = dec_of("su3_order3.json");
  auto alg = dec.algebra;
  GradedMaps maps = graded_maps(dec);
  SmoothExponent s = trig_exponent(*alg, maps.pn);
  // U(x+e)^-1 U(x) exp(e a(x)) should be the identity up to O(e^2).
  double x = 0.37, y = 0.59, e = 1e-6;
  RMat u0 = group_exp(*alg, s.p(x, y));
  RMat u1 = group_exp(*alg, s.p(x + e, y));
  RVec a = log_derivative(*alg, s.p(x, y), s.px(x, y));
  RMat gap = u1.transpose() * u0 * group_exp(*alg, RVec(e * a)) -
             RMat::Identity(alg->dim, alg->dim);
  CHECK(gap.cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("tension cells: geodesics are harmonic, residual is O(h^2)") {
  auto dec = dec_of("su3_order3.json");
  auto alg = dec.algebra;
  GradedMaps maps = graded_maps(dec);

  RVec xi = maps.pn * RVec::Unit(alg->dim, 0);
  xi.normalize();
  REQUIRE((maps.p0 * xi).cwiseAbs().maxCoeff() <= 1e-12);

  LatticeGrid grid(8, 8, 0.125);
  AlgebraForm1 geod(grid, alg);
  for (int p = 0; p < grid.npoints(); ++p) geod.a.value[p] = xi.cast<Cplx>();
  CHECK(harmonic_residual(geod, dec).max_abs() <= 1e-14);

  // Geodesic composed with a harmonic function: zero tension in the limit,
  // O(h^2) on the lattice (clamped patch; the function is not periodic).
  auto residual_at = [&](int n) {
    LatticeGrid g(n, n, 1.0 / (n - 1), LatticeGrid::Boundary::Clamped);
    AlgebraForm1 f(g, alg);
    for (int y = 0; y < g.ny; ++y)
      for (int x = 0; x < g.nx; ++x) {
        double xr = x * g.h, yr = y * g.h;
        f.a.at(x, y) = (0.5 * std::exp(xr) * std::cos(yr) * xi).cast<Cplx>();
        f.b.at(x, y) = (-0.5 * std::exp(xr) * std::sin(yr) * xi).cast<Cplx>();
      }
    return harmonic_residual(f, dec).max_abs();
  };
  double r8 = residual_at(9), r16 = residual_at(17), r32 = residual_at(33);
  CHECK(r8 / r16 == doctest::Approx(4.0).epsilon(0.3));
  CHECK(r16 / r32 == doctest::Approx(4.0).epsilon(0.3));
}

TEST_CASE("vertical residual is the imaginary part of the top band equation") {
  auto dec = dec_of("su3_order4.json");
  LatticeGrid grid(6, 5, 0.2);
  auto band = random_band(grid, dec, 2, 41);
  AlgebraForm1 alpha = form_from_band(band);
  REQUIRE(alpha.max_imag() <= 1e-12);

  auto cells = graded_system_cells(band);
  AlgebraField vert = vertical_harmonic_residual(alpha, dec);
  CHECK(imag_gap(vert, cells[2], 2.0) <= 1e-12);

  // Flatness companion: the vertical projection of the flatness cells is
  // twice the real part of the same equation.
  AlgebraField mc_v = mc_cells(alpha).applied(dec.P(2));
  CHECK((mc_v - Cplx(2.0, 0.0) * cells[2].real_part()).max_abs() <= 1e-12);

  // A form without vertical part has zero vertical residual.
  GradedMaps maps = graded_maps(dec);
  RMat keep = RMat::Identity(dec.algebra->dim, dec.algebra->dim) - maps.pv;
  CHECK(vertical_harmonic_residual(alpha.applied(keep), dec).max_abs() <=
        1e-13);

  CHECK_THROWS_AS(vertical_harmonic_residual(alpha, dec_of("su3_order3.json")),
                  InputError);
}

TEST_CASE("band assembly round-trips through a real form") {
  auto dec = dec_of("su3_order5b.json");
  LatticeGrid grid(5, 5, 0.2);
  auto band = random_band(grid, dec, dec.kprime - 1, 51);
  AlgebraForm1 alpha = form_from_band(band);
  REQUIRE(alpha.max_imag() <= 1e-12);
  auto back = band_from_form(alpha, dec, dec.kprime - 1);
  double worst = 0.0;
  for (std::size_t j = 0; j < band.size(); ++j)
    worst = std::max(worst, (band[j] - back[j]).max_abs());
  CHECK(worst <= 1e-12);
}

TEST_CASE("holomorphic harmonicity: dual routes agree on random data") {
  for (const char* name : {"su3_order3.json", "su3_order5b.json"}) {
    auto dec = dec_of(name);
    LatticeGrid grid(6, 6, 1.0 / 6);
    AlgebraForm1 alpha = random_real_form(grid, dec.algebra, 61);
    for (int t : {0, 1}) {
      HolHarmonicResult r = hol_harmonic_residual(alpha, dec, t);
      CHECK(r.agreement <= 1e-12);
      CHECK(r.graded.max_abs() > 1e-3);  // random data is not a solution
    }
  }
}

TEST_CASE("holomorphic curves solve the anti-holomorphic equation exactly") {
  auto dec = dec_of("su3_order3.json");
  LatticeGrid grid(7, 6, 0.15);
  auto band = random_band(grid, dec, dec.kprime - 1, 71);
  // Curve pattern: no (1,0)-component of positive grade.
  for (std::size_t p = 0; p < band[2].value.size(); ++p)
    band[2].value[p].setZero();
  AlgebraForm1 alpha = form_from_band(band);

  HolHarmonicResult anti = hol_harmonic_residual(alpha, dec, 0);
  CHECK(anti.graded.max_abs() <= 1e-13);
  CHECK(anti.agreement <= 1e-12);
  HolHarmonicResult holo = hol_harmonic_residual(alpha, dec, 1);
  CHECK(holo.graded.max_abs() > 1e-3);
}

TEST_CASE("torsion-free harmonic fields are holomorphically harmonic") {
  auto dec = dec_of("su3_order3.json");
  GradedMaps maps = graded_maps(dec);
  RVec xi = maps.pn * RVec::Unit(dec.algebra->dim, 0);
  xi.normalize();
  LatticeGrid grid(6, 6, 1.0 / 6);
  AlgebraForm1 geod(grid, dec.algebra);
  for (int p = 0; p < grid.npoints(); ++p) geod.a.value[p] = xi.cast<Cplx>();
  for (int t : {0, 1}) {
    HolHarmonicResult r = hol_harmonic_residual(geod, dec, t);
    CHECK(r.graded.max_abs() <= 1e-13);
    CHECK(r.invariant.max_abs() <= 1e-13);
  }
}

TEST_CASE("holomorphic harmonicity rejects even orders and bad t") {
  auto dec4 = dec_of("su3_order4.json");
  LatticeGrid grid(5, 5, 0.2);
  AlgebraForm1 alpha = random_real_form(grid, dec4.algebra, 81);
  CHECK_THROWS_AS(hol_harmonic_residual(alpha, dec4, 1), StructureError);
  auto dec3 = dec_of("su3_order3.json");
  AlgebraForm1 beta = random_real_form(grid, dec3.algebra, 82);
  CHECK_THROWS_AS(hol_harmonic_residual(beta, dec3, 2), InputError);
}

TEST_CASE("holomorphic residual is O(h^2) on an analytic solution") {
  auto dec = dec_of("su3_order3.json");
  auto alg = dec.algebra;
  GradedMaps maps = graded_maps(dec);
  RVec xi = maps.pn * RVec::Unit(alg->dim, 0);
  xi.normalize();
  auto residual_at = [&](int n) {
    LatticeGrid g(n, n, 1.0 / (n - 1), LatticeGrid::Boundary::Clamped);
    AlgebraForm1 f(g, alg);
    for (int y = 0; y < g.ny; ++y)
      for (int x = 0; x < g.nx; ++x) {
        double xr = x * g.h, yr = y * g.h;
        f.a.at(x, y) = (0.5 * std::exp(xr) * std::cos(yr) * xi).cast<Cplx>();
        f.b.at(x, y) = (-0.5 * std::exp(xr) * std::sin(yr) * xi).cast<Cplx>();
      }
    HolHarmonicResult r = hol_harmonic_residual(f, dec, 1);
    CHECK(r.agreement <= 1e-12);
    return r.graded.max_abs();
  };
  double r8 = residual_at(9), r16 = residual_at(17), r32 = residual_at(33);
  CHECK(r8 / r16 == doctest::Approx(4.0).epsilon(0.3));
  CHECK(r16 / r32 == doctest::Approx(4.0).epsilon(0.3));
}

namespace {

// Tensor route: residual = tension - (F act T)(a_n, b_n) cell by cell.
AlgebraField tensor_route(const AlgebraForm1& alpha,
                          const GradedDecomposition& dec, JAction action) {
  ReductiveSplit split = reductive_split(dec);
  InvariantMetric metric =
      make_metric(split, RMat::Identity(split.n_dim(), split.n_dim()));
  OriginConnection conn = connection_family(split, 0.0);
  TrilinearForm tlow = lowered_torsion(conn, metric);
  OriginFStructure f = canonical_structures(split, dec.m_count());
  Tens3 w = raise(j_actions(tlow, f, action), metric);

  GradedMaps maps = graded_maps(dec);
  AlgebraField tau = tension_cells(alpha, maps);
  AlgebraField out(alpha.grid, alpha.algebra);
  const int nd = split.n_dim();
  for (std::size_t p = 0; p < out.value.size(); ++p) {
    RVec an = split.n_coords(alpha.a.value[p].real());
    RVec bn = split.n_coords(alpha.b.value[p].real());
    RVec act = RVec::Zero(nd);
    for (int i = 0; i < nd; ++i)
      for (int j = 0; j < nd; ++j) {
        double xy = an(i) * bn(j);
        if (xy == 0.0) continue;
        for (int k = 0; k < nd; ++k) act(k) += w.at(i, j, k) * xy;
      }
    out.value[p] = tau.value[p] - split.to_ambient(act).cast<Cplx>();
  }
  return out;
}

}  // namespace

TEST_CASE("stringy residuals match the tensor route pointwise") {
  struct Case {
    const char* fixture;
    StringyVariant variant;
    SystemParity parity;
    JAction action;
  };
  const Case cases[] = {
      {"su3_order5b.json", StringyVariant::Dot, SystemParity::Odd,
       JAction::Dot},
      {"su3_order5b.json", StringyVariant::Star, SystemParity::Odd,
       JAction::Star},
      {"su4_order6.json", StringyVariant::Dot, SystemParity::Even,
       JAction::Dot},
      {"su4_order6.json", StringyVariant::Star, SystemParity::Even,
       JAction::Bullet},
  };
  for (const Case& c : cases) {
    CAPTURE(c.fixture);
    auto dec = dec_of(c.fixture);
    LatticeGrid grid(5, 4, 0.25);
    AlgebraForm1 alpha = random_real_form(grid, dec.algebra, 91);
    AlgebraField display = stringy_residual(alpha, dec, c.variant, c.parity);
    AlgebraField tensor = tensor_route(alpha, dec, c.action);
    CHECK((display - tensor).max_abs() <= 1e-10);
    CHECK(display.max_abs() > 1e-3);
  }
}

TEST_CASE("stringy residual vanishes without a reductive component") {
  auto dec = dec_of("su4_order6.json");
  GradedMaps maps = graded_maps(dec);
  LatticeGrid grid(5, 4, 0.25);
  AlgebraForm1 alpha =
      random_real_form(grid, dec.algebra, 92).applied(maps.p0);
  for (auto variant : {StringyVariant::Dot, StringyVariant::Star})
    CHECK(stringy_residual(alpha, dec, variant, SystemParity::Even)
              .max_abs() <= 1e-13);
}

TEST_CASE("model degeneracy: 3-symmetric star residual is the rotated"
          " holomorphic defect") {
  auto dec = dec_of("su3_order3.json");
  GradedMaps maps = graded_maps(dec);
  LatticeGrid grid(6, 5, 0.2);
  AlgebraForm1 alpha = random_real_form(grid, dec.algebra, 93);

  AlgebraField star =
      stringy_residual(alpha, dec, StringyVariant::Star, SystemParity::Odd);

  AlgebraForm1 an = alpha.applied(maps.pn);
  AlgebraField tau = tension_cells(alpha, maps);
  AlgebraField rot(alpha.grid, alpha.algebra);
  const LieAlgebra& alg = *alpha.algebra;
  for (std::size_t p = 0; p < rot.value.size(); ++p) {
    CVec r = alg.bracket(an.a.value[p], an.b.value[p]);
    RVec rr = maps.pn * r.real() + maps.f0 * tau.value[p].real();
    rot.value[p] = (-(maps.f0 * rr)).cast<Cplx>();
  }
  CHECK((star - rot).max_abs() <= 1e-12);
}

TEST_CASE("stringy residual rejects a mismatched parity") {
  auto dec = dec_of("su3_order5b.json");
  LatticeGrid grid(5, 4, 0.25);
  AlgebraForm1 alpha = random_real_form(grid, dec.algebra, 94);
  CHECK_THROWS_AS(
      stringy_residual(alpha, dec, StringyVariant::Dot, SystemParity::Even),
      InputError);
}

TEST_CASE("integration: constant form gives a one-parameter subgroup") {
  auto dec = dec_of("su3_order3.json");
  auto alg = dec.algebra;
  GradedMaps maps = graded_maps(dec);
  RVec xi = maps.pn * RVec::Unit(alg->dim, 0);
  xi.normalize();
  LatticeGrid grid(8, 6, 0.125);
  AlgebraForm1 form(grid, alg);
  for (int p = 0; p < grid.npoints(); ++p) form.a.value[p] = xi.cast<Cplx>();

  IntegrationResult res = integrate_mc(form);
  double worst = 0.0;
  for (int y = 0; y < grid.ny; ++y)
    for (int x = 0; x < grid.nx; ++x) {
      RMat expect = group_exp(*alg, RVec(x * grid.h * xi));
      worst = std::max(worst,
                       (res.field.at(x, y) - expect).cwiseAbs().maxCoeff());
    }
  CHECK(worst <= 1e-12);
  CHECK(res.path_residual <= 1e-12);
  CHECK(res.field.membership_residual() <= 1e-11);
}

TEST_CASE("integration reconstructs flat smooth forms at O(h^2)") {
  auto dec = dec_of("su3_order3.json");
  auto alg = dec.algebra;
  GradedMaps maps = graded_maps(dec);
  SmoothExponent s = trig_exponent(*alg, maps.pn);

  auto run = [&](int n) {
    AlgebraForm1 form =
        sampled_log_derivative(LatticeGrid(n, n, 1.0 / n), alg, s);
    return integrate_mc(form, 1.0);
  };
  IntegrationResult r16 = run(16), r32 = run(32);
  CHECK(r16.reconstruction_residual / r32.reconstruction_residual ==
        doctest::Approx(4.0).epsilon(0.3));
  CHECK(r32.path_residual <= 1e-2);
  CHECK(r32.path_residual < r16.path_residual);

  // Non-flat data is rejected before any path ordering happens.
  LatticeGrid grid(8, 8, 0.125);
  CHECK_THROWS_AS(integrate_mc(random_real_form(grid, alg, 101), 1e-6),
                  StructureError);
}

namespace {

GroupField perturbed_geodesic(const LatticeGrid& grid,
                              std::shared_ptr<const LieAlgebra> alg,
                              double amplitude) {
  GroupField u(grid, alg);
  for (int y = 0; y < grid.ny; ++y)
    for (int x = 0; x < grid.nx; ++x) {
      double xr = x * grid.h, yr = y * grid.h;
      RVec base = RVec::Zero(alg->dim);
      base(0) = kTwoPi * xr;
      RVec bump = RVec::Zero(alg->dim);
      bump(1) = amplitude * std::sin(kTwoPi * xr) * std::cos(kTwoPi * yr);
      bump(2) = amplitude * std::cos(kTwoPi * yr);
      u.at(x, y) = group_exp(*alg, base) * group_exp(*alg, bump);
    }
  return u;
}

}  // namespace

TEST_CASE("relaxation: geodesics need no steps, perturbations relax") {
  auto dec = dec_of("su2_involution.json");
  auto alg = dec.algebra;
  LatticeGrid grid(16, 16, 1.0 / 16);

  SolveOptions opts;
  opts.steps = 100;
  opts.rate = grid.h * grid.h / 4.0;
  opts.residual_tol = 1e-10;
  SolveResult exact =
      solve_harmonic(dec, perturbed_geodesic(grid, alg, 0.0), opts);
  CHECK(exact.steps_taken == 0);
  CHECK(exact.reached_tol);

  opts.steps = 3000;
  opts.residual_tol = 0.0;
  SolveResult run =
      solve_harmonic(dec, perturbed_geodesic(grid, alg, 0.05), opts);
  CHECK(run.initial_residual > 1.0);
  CHECK(run.final_residual <= run.initial_residual / 1000.0);
  for (std::size_t i = 1; i < run.energy_history.size(); ++i)
    CHECK(run.energy_history[i] <= run.energy_history[i - 1] + 1e-9);

  // Supercritical rate (the wide-stencil stability bound is h^2): the
  // stiffest modes grow geometrically and the energy rises monotonically
  // long before saturation.
  SolveOptions bad = opts;
  bad.rate = 2.0 * grid.h * grid.h;
  bad.steps = 500;
  CHECK_THROWS_AS(
      solve_harmonic(dec, perturbed_geodesic(grid, alg, 0.05), bad),
      DivergenceError);
}

TEST_CASE("action gradient: energy-only check on the symmetric fixture") {
  auto dec = dec_of("su2_involution.json");
  ReductiveSplit split = reductive_split(dec);
  LatticeGrid grid(16, 16, 1.0 / 16);
  GroupField field = perturbed_geodesic(grid, dec.algebra, 0.05);
  // Direction sharing the perturbation modes, so the pairing with the
  // tension does not cancel by lattice trig orthogonality.
  AlgebraField dir(grid, dec.algebra);
  for (int y = 0; y < grid.ny; ++y)
    for (int x = 0; x < grid.nx; ++x) {
      RVec v = RVec::Zero(dec.algebra->dim);
      v(0) = std::sin(kTwoPi * x * grid.h) * std::sin(kTwoPi * y * grid.h);
      v(1) = std::sin(kTwoPi * x * grid.h) * std::cos(kTwoPi * y * grid.h);
      dir.at(x, y) = v.cast<Cplx>();
    }
  GradientCheck check = action_gradient_check(split, TrilinearForm(), Tens3(),
                                              field, dir, 1e-5);
  REQUIRE(std::abs(check.analytic) > 1e-3);
  CHECK(check.rel_gap <= 1e-3);

  AlgebraField zero(grid, dec.algebra);
  GradientCheck trivial = action_gradient_check(split, TrilinearForm(),
                                                Tens3(), field, zero, 1e-5);
  CHECK(trivial.fd == 0.0);
  CHECK(trivial.analytic == 0.0);
  CHECK(trivial.rel_gap == 0.0);
}

TEST_CASE("action gradient: boundary-term form against the torsion action") {
  auto dec = dec_of("su3_order3.json");
  ReductiveSplit split = reductive_split(dec);
  InvariantMetric metric =
      make_metric(split, RMat::Identity(split.n_dim(), split.n_dim()));
  OriginFStructure f = canonical_structures(split, dec.m_count());
  InvariantForm omega = kaehler_form(f, metric);
  InvariantForm domega = invariant_d(omega, split);
  TrilinearForm h = to_trilinear(domega);
  for (double& v : h.v) v /= 3.0;

  OriginConnection conn = connection_family(split, 0.0);
  TrilinearForm tlow = lowered_torsion(conn, metric);
  TrilinearForm wlow = j_actions(tlow, f, JAction::Dot);
  Tens3 w = raise(wlow, metric);

  // The boundary-term 3-form pairs exactly as the J-action of the torsion.
  double worst = 0.0;
  for (int i = 0; i < split.n_dim(); ++i)
    for (int j = 0; j < split.n_dim(); ++j)
      for (int k = 0; k < split.n_dim(); ++k)
        worst = std::max(worst, std::abs(h.at(i, j, k) - wlow.at(i, j, k)));
  CHECK(worst <= 1e-12);

  GradedMaps maps = graded_maps(dec);
  SmoothExponent s = trig_exponent(*dec.algebra, maps.pn);
  LatticeGrid grid(16, 16, 1.0 / 16);
  GroupField field = sampled_group(grid, dec.algebra, s);

  // Direction built from the field's own exponent modes plus one mixed
  // mode, so neither pairing collapses by lattice trig orthogonality.
  AlgebraField dir(grid, dec.algebra);
  RVec d2 = maps.pn * RVec::Unit(dec.algebra->dim, 4);
  REQUIRE(d2.norm() > 0.1);
  for (int y = 0; y < grid.ny; ++y)
    for (int x = 0; x < grid.nx; ++x) {
      double xr = x * grid.h, yr = y * grid.h;
      dir.at(x, y) = (s.p(xr, yr) +
                      0.15 * std::sin(kTwoPi * (xr + yr)) * d2)
                         .cast<Cplx>();
    }
  GradientCheck check =
      action_gradient_check(split, h, w, field, dir, 1e-5);
  REQUIRE(std::abs(check.fd) > 1e-6);
  CHECK(check.rel_gap <= 1e-3);
}
