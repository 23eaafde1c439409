#include "ksym/loopsys.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <utility>

#include "ksym/errors.hpp"
#include "ksym/georesid.hpp"
#include "ksym/jsonio.hpp"

namespace ksym {

namespace {

AlgebraField zero_field(const LatticeGrid& g,
                        std::shared_ptr<const LieAlgebra> alg) {
  return AlgebraField(g, std::move(alg));
}

// Per-point real matrix applied to a complex field (Eigen has no mixed
// real-complex products, so the parts are mapped separately).
CVec apply_real_point(const RMat& map, const CVec& v) {
  RVec re = map * v.real();
  RVec im = map * v.imag();
  return re.cast<Cplx>() + Cplx(0.0, 1.0) * im.cast<Cplx>();
}

}  // namespace

LoopBandField::LoopBandField(const LatticeGrid& g,
                             std::shared_ptr<const LieAlgebra> alg, int m_)
    : m(m_) {
  if (m_ < 0) throw InputError("band order must be nonnegative");
  coeff.assign(2 * static_cast<std::size_t>(m_) + 1, AlgebraField(g, alg));
}

double LoopBandField::twist_residual(const GradedDecomposition& dec,
                                     int sign) const {
  double worst = 0.0;
  for (int d = -m; d <= m; ++d) {
    const AlgebraField& f = at_degree(d);
    worst = std::max(worst, (f - f.applied(dec.P(sign * d))).max_abs());
  }
  return worst;
}

double LoopBandField::reality_residual() const {
  double worst = 0.0;
  for (int d = 0; d <= m; ++d)
    worst = std::max(
        worst, (at_degree(-d) - at_degree(d).conjugated()).max_abs());
  return worst;
}

double LoopBandField::max_abs() const {
  double worst = 0.0;
  for (const AlgebraField& f : coeff) worst = std::max(worst, f.max_abs());
  return worst;
}

LoopForm1::LoopForm1(const LatticeGrid& g,
                     std::shared_ptr<const LieAlgebra> alg, int m)
    : a(g, alg, m), b(g, alg, m) {}

AlgebraForm1 LoopForm1::component(int d) const {
  AlgebraForm1 out(a.coeff[0].grid, a.coeff[0].algebra);
  out.a = a.at_degree(d);
  out.b = b.at_degree(d);
  return out;
}

AlgebraForm1 LoopForm1::at_unit() const {
  AlgebraForm1 out(a.coeff[0].grid, a.coeff[0].algebra);
  for (int d = -band(); d <= band(); ++d) {
    out.a = out.a + a.at_degree(d);
    out.b = out.b + b.at_degree(d);
  }
  return out;
}

double LoopForm1::twist_residual(const GradedDecomposition& dec,
                                 int sign) const {
  return std::max(a.twist_residual(dec, sign), b.twist_residual(dec, sign));
}

double LoopForm1::reality_residual() const {
  return std::max(a.reality_residual(), b.reality_residual());
}

double SystemData::grading_residual(const GradedDecomposition& dec) const {
  const int sign = convention == SystemConvention::Minus ? -1 : +1;
  double worst = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    const AlgebraField& f = u[j];
    worst = std::max(
        worst,
        (f - f.applied(dec.P(sign * static_cast<int>(j)))).max_abs());
  }
  return worst;
}

SystemData random_system(const LatticeGrid& g, const GradedDecomposition& dec,
                         int m, SystemConvention convention, unsigned seed) {
  if (m < 0) throw InputError("system order must be nonnegative");
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> noise(-1.0, 1.0);
  const int sign = convention == SystemConvention::Minus ? -1 : +1;
  SystemData data;
  data.convention = convention;
  for (int j = 0; j <= m; ++j) {
    AlgebraField f(g, dec.algebra);
    const CMat& pj = dec.P(sign * j);
    for (int p = 0; p < g.npoints(); ++p) {
      CVec raw(dec.algebra->dim);
      for (int i = 0; i < dec.algebra->dim; ++i)
        raw(i) = Cplx(noise(rng), noise(rng));
      f.value[p] = pj * raw;
    }
    data.u.push_back(std::move(f));
  }
  return data;
}

LoopForm1 assemble_alpha(const SystemData& data,
                         const GradedDecomposition& dec, double tol) {
  if (data.u.empty()) throw InputError("system data is empty");
  const double gr = data.grading_residual(dec);
  if (gr > tol)
    throw InputError("system component off its eigenspace, residual " +
                     std::to_string(gr));
  const int m = data.order();
  const LatticeGrid& grid = data.u[0].grid;
  LoopForm1 out(grid, data.u[0].algebra, m);
  const Cplx ih(0.0, 1.0);
  for (int j = 0; j <= m; ++j) {
    const AlgebraField& uj = data.u[j];
    AlgebraField cu = uj.conjugated();
    out.a.at_degree(-j) = out.a.at_degree(-j) + uj;
    out.b.at_degree(-j) = out.b.at_degree(-j) + ih * uj;
    out.a.at_degree(j) = out.a.at_degree(j) + cu;
    out.b.at_degree(j) = out.b.at_degree(j) + Cplx(0.0, -1.0) * cu;
  }
  return out;
}

SystemData system_from_form(const LoopForm1& alpha,
                            SystemConvention convention) {
  SystemData data;
  data.convention = convention;
  const Cplx half(0.5, 0.0), mih(0.0, -0.5);
  for (int j = 0; j <= alpha.band(); ++j)
    data.u.push_back(half * alpha.a.at_degree(-j) +
                     mih * alpha.b.at_degree(-j));
  return data;
}

std::vector<AlgebraField> curvature_coefficients(const LoopForm1& alpha) {
  if (alpha.a.m != alpha.b.m)
    throw InputError("direction samples carry different band orders");
  const int m = alpha.band();
  const LatticeGrid& grid = alpha.a.coeff[0].grid;
  auto alg = alpha.a.coeff[0].algebra;
  std::vector<AlgebraField> out;
  out.reserve(4 * static_cast<std::size_t>(m) + 1);
  for (int p = -2 * m; p <= 2 * m; ++p) {
    AlgebraField c = std::abs(p) <= m ? d_cells(alpha.component(p))
                                      : zero_field(grid, alg);
    const int qlo = std::max(-m, p - m), qhi = std::min(m, p + m);
    for (int q = qlo; q <= qhi; ++q)
      c = c + Cplx(0.5, 0.0) *
                  wedge_bracket(alpha.component(q), alpha.component(p - q));
    out.push_back(std::move(c));
  }
  return out;
}

SystemResiduals system_residuals(const SystemData& data,
                                 const GradedDecomposition& dec, double tol) {
  if (data.u.empty()) throw InputError("system data is empty");
  const double gr = data.grading_residual(dec);
  if (gr > tol)
    throw InputError("system component off its eigenspace, residual " +
                     std::to_string(gr));
  SystemResiduals out;
  out.cells = graded_system_cells(data.u);
  out.norms.reserve(out.cells.size());
  for (const AlgebraField& c : out.cells) {
    out.norms.push_back(c.max_abs());
    out.max_norm = std::max(out.max_norm, out.norms.back());
  }
  return out;
}

SystemData embed_order(const SystemData& data, int m_prime) {
  if (data.u.empty()) throw InputError("system data is empty");
  if (m_prime < data.order())
    throw InputError("embedding target order is below the input order");
  SystemData out = data;
  const LatticeGrid& grid = data.u[0].grid;
  auto alg = data.u[0].algebra;
  for (int j = data.order(); j < m_prime; ++j)
    out.u.push_back(zero_field(grid, alg));
  return out;
}

LoopForm1 gauge_transform(const LoopForm1& alpha, const GroupField& u0,
                          const GradedDecomposition& dec, double tol) {
  const LatticeGrid& grid = alpha.a.coeff[0].grid;
  if (!grid.same_shape(u0.grid))
    throw InputError("gauge field grid does not match the form");
  const double member = u0.membership_residual();
  if (member > tol)
    throw InputError("gauge field is not group-valued, residual " +
                     std::to_string(member));
  double twist = 0.0;
  for (const RMat& mat : u0.matrix)
    twist = std::max(twist, (mat * dec.tau - dec.tau * mat)
                                .cwiseAbs()
                                .maxCoeff());
  if (twist > tol)
    throw InputError("gauge field does not preserve the grading, residual " +
                     std::to_string(twist));

  const int m = alpha.band();
  LoopForm1 out(grid, alpha.a.coeff[0].algebra, m);
  for (int d = -m; d <= m; ++d)
    for (int p = 0; p < grid.npoints(); ++p) {
      const RMat adj_inv = u0.matrix[p].transpose();
      out.a.at_degree(d).value[p] =
          apply_real_point(adj_inv, alpha.a.at_degree(d).value[p]);
      out.b.at_degree(d).value[p] =
          apply_real_point(adj_inv, alpha.b.at_degree(d).value[p]);
    }
  AlgebraForm1 inhom = maurer_cartan_form(u0);
  out.a.at_degree(0) = out.a.at_degree(0) + inhom.a;
  out.b.at_degree(0) = out.b.at_degree(0) + inhom.b;
  return out;
}

LiftedEquivalence underdetermined_equiv(const LoopForm1& alpha,
                                        const GradedDecomposition& dec,
                                        int q) {
  const int m = alpha.band();
  if (q < 0) {
    if (m < dec.kprime)
      throw InputError("band order below the automorphism order");
    q = m / dec.kprime;
  }
  if (q == 0) return LiftedEquivalence{0, dec, alpha};
  if (m < dec.kprime)
    throw InputError("band order below the automorphism order");

  LiftedSystem lift =
      underdetermined_lift(*dec.algebra, dec.tau, dec.kprime, q * dec.kprime);
  GradedDecomposition ldec =
      grade(make_automorphism(std::move(lift.algebra), lift.matrix,
                              lift.order));

  const LatticeGrid& grid = alpha.a.coeff[0].grid;
  const int n = dec.algebra->dim;
  LoopForm1 out(grid, ldec.algebra, m);
  for (int d = -m; d <= m; ++d)
    for (int c = 0; c <= q; ++c) {
      const Cplx phase =
          std::polar(1.0, 2.0 * M_PI * c * d / ldec.kprime);
      for (int p = 0; p < grid.npoints(); ++p) {
        out.a.at_degree(d).value[p].segment(c * n, n) =
            phase * alpha.a.at_degree(d).value[p];
        out.b.at_degree(d).value[p].segment(c * n, n) =
            phase * alpha.b.at_degree(d).value[p];
      }
    }
  return LiftedEquivalence{q, std::move(ldec), std::move(out)};
}

FieldFixture load_field_fixture(const std::string& path) {
  const Json j = load_json_file(path);
  for (const char* key :
       {"automorphism_file", "kprime", "m", "nx", "ny", "h", "u"})
    if (!j.contains(key))
      throw InputError(std::string("field fixture missing key: ") + key);

  const auto slash = path.find_last_of('/');
  const std::string dir =
      slash == std::string::npos ? std::string(".") : path.substr(0, slash);
  const AutomorphismFixture af =
      load_automorphism_fixture(dir + "/" +
                                j["automorphism_file"].get<std::string>());
  FieldFixture out{grade(make_automorphism(af.algebra, af.matrix, af.order)),
                   LatticeGrid(j["nx"].get<int>(), j["ny"].get<int>(),
                               j["h"].get<double>()),
                   SystemData{}};
  if (out.dec.kprime != j["kprime"].get<int>())
    throw InputError("field fixture order disagrees with its automorphism");

  const int m = j["m"].get<int>();
  const auto& uarr = j["u"];
  if (!uarr.is_array() || static_cast<int>(uarr.size()) != m + 1)
    throw InputError("field fixture has the wrong number of components");
  const int dim = out.dec.algebra->dim;
  for (const auto& entry : uarr) {
    AlgebraField f(out.grid, out.dec.algebra);
    const auto& re = entry.at("re");
    const auto& im = entry.at("im");
    if (static_cast<int>(re.size()) != out.grid.ny ||
        static_cast<int>(im.size()) != out.grid.ny)
      throw InputError("field fixture row count mismatch");
    for (int y = 0; y < out.grid.ny; ++y) {
      const auto& rrow = re.at(y);
      const auto& irow = im.at(y);
      if (static_cast<int>(rrow.size()) != out.grid.nx ||
          static_cast<int>(irow.size()) != out.grid.nx)
        throw InputError("field fixture column count mismatch");
      for (int x = 0; x < out.grid.nx; ++x) {
        const auto& rv = rrow.at(x);
        const auto& iv = irow.at(x);
        if (static_cast<int>(rv.size()) != dim ||
            static_cast<int>(iv.size()) != dim)
          throw InputError("field fixture coordinate count mismatch");
        CVec v(dim);
        for (int i = 0; i < dim; ++i)
          v(i) = Cplx(rv.at(i).get<double>(), iv.at(i).get<double>());
        f.at(x, y) = v;
      }
    }
    out.data.u.push_back(std::move(f));
  }
  return out;
}

}  // namespace ksym
