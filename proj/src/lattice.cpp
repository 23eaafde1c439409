#include "ksym/lattice.hpp"

#include <cmath>
#include <utility>

#include <unsupported/Eigen/MatrixFunctions>

#include "ksym/errors.hpp"

namespace ksym {

LatticeGrid::LatticeGrid(int nx_, int ny_, double h_, Boundary boundary_)
    : nx(nx_), ny(ny_), h(h_), boundary(boundary_) {
  if (nx < 3 || ny < 3) throw InputError("lattice grid needs nx, ny >= 3");
  if (!(h > 0.0)) throw InputError("lattice spacing must be positive");
}

bool LatticeGrid::same_shape(const LatticeGrid& other) const {
  return nx == other.nx && ny == other.ny && h == other.h &&
         boundary == other.boundary;
}

AlgebraField::AlgebraField(const LatticeGrid& g,
                           std::shared_ptr<const LieAlgebra> alg)
    : grid(g), algebra(std::move(alg)) {
  value.assign(static_cast<std::size_t>(grid.npoints()),
               CVec::Zero(algebra->dim));
}

double AlgebraField::max_abs() const {
  double m = 0.0;
  for (const CVec& v : value) m = std::max(m, v.cwiseAbs().maxCoeff());
  return m;
}

double AlgebraField::max_point_norm() const {
  double m = 0.0;
  for (const CVec& v : value) m = std::max(m, v.norm());
  return m;
}

double AlgebraField::max_imag() const {
  double m = 0.0;
  for (const CVec& v : value) m = std::max(m, v.imag().cwiseAbs().maxCoeff());
  return m;
}

AlgebraField AlgebraField::applied(const CMat& map) const {
  AlgebraField out(grid, algebra);
  for (std::size_t p = 0; p < value.size(); ++p) out.value[p] = map * value[p];
  return out;
}

AlgebraField AlgebraField::applied(const RMat& map) const {
  AlgebraField out(grid, algebra);
  for (std::size_t p = 0; p < value.size(); ++p) {
    RVec re = map * value[p].real();
    RVec im = map * value[p].imag();
    out.value[p] = re.cast<Cplx>() + Cplx(0.0, 1.0) * im.cast<Cplx>();
  }
  return out;
}

AlgebraField AlgebraField::conjugated() const {
  AlgebraField out(grid, algebra);
  for (std::size_t p = 0; p < value.size(); ++p)
    out.value[p] = value[p].conjugate();
  return out;
}

AlgebraField AlgebraField::real_part() const {
  AlgebraField out(grid, algebra);
  for (std::size_t p = 0; p < value.size(); ++p)
    out.value[p] = value[p].real().cast<Cplx>();
  return out;
}

AlgebraField AlgebraField::imag_part() const {
  AlgebraField out(grid, algebra);
  for (std::size_t p = 0; p < value.size(); ++p)
    out.value[p] = value[p].imag().cast<Cplx>();
  return out;
}

namespace {

void check_compatible(const AlgebraField& f, const AlgebraField& g) {
  if (!f.grid.same_shape(g.grid) || f.algebra->dim != g.algebra->dim)
    throw InputError("algebra fields live on different grids or algebras");
}

}  // namespace

AlgebraField operator+(const AlgebraField& f, const AlgebraField& g) {
  check_compatible(f, g);
  AlgebraField out(f.grid, f.algebra);
  for (std::size_t p = 0; p < out.value.size(); ++p)
    out.value[p] = f.value[p] + g.value[p];
  return out;
}

AlgebraField operator-(const AlgebraField& f, const AlgebraField& g) {
  check_compatible(f, g);
  AlgebraField out(f.grid, f.algebra);
  for (std::size_t p = 0; p < out.value.size(); ++p)
    out.value[p] = f.value[p] - g.value[p];
  return out;
}

AlgebraField operator*(const Cplx& s, const AlgebraField& f) {
  AlgebraField out(f.grid, f.algebra);
  for (std::size_t p = 0; p < out.value.size(); ++p)
    out.value[p] = s * f.value[p];
  return out;
}

AlgebraForm1::AlgebraForm1(const LatticeGrid& g,
                           std::shared_ptr<const LieAlgebra> alg)
    : grid(g), algebra(alg), a(g, alg), b(g, std::move(alg)) {}

double AlgebraForm1::max_abs() const {
  return std::max(a.max_abs(), b.max_abs());
}

double AlgebraForm1::max_imag() const {
  return std::max(a.max_imag(), b.max_imag());
}

AlgebraForm1 AlgebraForm1::applied(const CMat& map) const {
  AlgebraForm1 out(grid, algebra);
  out.a = a.applied(map);
  out.b = b.applied(map);
  return out;
}

AlgebraForm1 AlgebraForm1::applied(const RMat& map) const {
  AlgebraForm1 out(grid, algebra);
  out.a = a.applied(map);
  out.b = b.applied(map);
  return out;
}

AlgebraForm1 operator+(const AlgebraForm1& f, const AlgebraForm1& g) {
  AlgebraForm1 out(f.grid, f.algebra);
  out.a = f.a + g.a;
  out.b = f.b + g.b;
  return out;
}

AlgebraForm1 operator-(const AlgebraForm1& f, const AlgebraForm1& g) {
  AlgebraForm1 out(f.grid, f.algebra);
  out.a = f.a - g.a;
  out.b = f.b - g.b;
  return out;
}

AlgebraForm1 operator*(const Cplx& s, const AlgebraForm1& f) {
  AlgebraForm1 out(f.grid, f.algebra);
  out.a = s * f.a;
  out.b = s * f.b;
  return out;
}

AlgebraForm1 hodge(const AlgebraForm1& form) {
  AlgebraForm1 out(form.grid, form.algebra);
  out.a = Cplx(-1.0, 0.0) * form.b;
  out.b = form.a;
  return out;
}

namespace {

// Second-order difference along one axis.  Central in the interior and under
// periodic wrap; one-sided three-point at clamped edges.
template <typename Next>
CVec axis_derivative(const std::vector<CVec>& v, int i, int n, double h,
                     bool periodic, Next next) {
  if (periodic) {
    int ip = (i + 1) % n;
    int im = (i + n - 1) % n;
    return (v[next(ip)] - v[next(im)]) / (2.0 * h);
  }
  if (i == 0)
    return (-3.0 * v[next(0)] + 4.0 * v[next(1)] - v[next(2)]) / (2.0 * h);
  if (i == n - 1)
    return (3.0 * v[next(n - 1)] - 4.0 * v[next(n - 2)] + v[next(n - 3)]) /
           (2.0 * h);
  return (v[next(i + 1)] - v[next(i - 1)]) / (2.0 * h);
}

}  // namespace

AlgebraField dx_field(const AlgebraField& f) {
  AlgebraField out(f.grid, f.algebra);
  const LatticeGrid& g = f.grid;
  for (int y = 0; y < g.ny; ++y)
    for (int x = 0; x < g.nx; ++x)
      out.at(x, y) = axis_derivative(f.value, x, g.nx, g.h, g.periodic(),
                                     [&](int i) { return g.index(i, y); });
  return out;
}

AlgebraField dy_field(const AlgebraField& f) {
  AlgebraField out(f.grid, f.algebra);
  const LatticeGrid& g = f.grid;
  for (int y = 0; y < g.ny; ++y)
    for (int x = 0; x < g.nx; ++x)
      out.at(x, y) = axis_derivative(f.value, y, g.ny, g.h, g.periodic(),
                                     [&](int i) { return g.index(x, i); });
  return out;
}

AlgebraField d_cells(const AlgebraForm1& form) {
  return dx_field(form.b) - dy_field(form.a);
}

AlgebraField dstar_cells(const AlgebraForm1& form) {
  return dx_field(form.a) + dy_field(form.b);
}

AlgebraField wedge_bracket(const AlgebraForm1& beta, const AlgebraForm1& gamma) {
  check_compatible(beta.a, gamma.a);
  AlgebraField out(beta.grid, beta.algebra);
  const LieAlgebra& alg = *beta.algebra;
  for (std::size_t p = 0; p < out.value.size(); ++p)
    out.value[p] = alg.bracket(beta.a.value[p], gamma.b.value[p]) -
                   alg.bracket(beta.b.value[p], gamma.a.value[p]);
  return out;
}

AlgebraField mc_cells(const AlgebraForm1& form) {
  AlgebraField out = d_cells(form);
  const LieAlgebra& alg = *form.algebra;
  for (std::size_t p = 0; p < out.value.size(); ++p)
    out.value[p] += alg.bracket(form.a.value[p], form.b.value[p]);
  return out;
}

double mc_residual(const AlgebraForm1& form) { return mc_cells(form).max_abs(); }

GroupField::GroupField(const LatticeGrid& g,
                       std::shared_ptr<const LieAlgebra> alg)
    : grid(g), algebra(std::move(alg)) {
  matrix.assign(static_cast<std::size_t>(grid.npoints()),
                RMat::Zero(algebra->dim, algebra->dim));
}

GroupField GroupField::identity(const LatticeGrid& g,
                                std::shared_ptr<const LieAlgebra> alg) {
  GroupField out(g, std::move(alg));
  for (RMat& m : out.matrix) m = RMat::Identity(m.rows(), m.cols());
  return out;
}

double GroupField::membership_residual() const {
  const int d = algebra->dim;
  const RMat id = RMat::Identity(d, d);
  double worst = 0.0;
  RVec ei = RVec::Zero(d), ej = RVec::Zero(d);
  for (const RMat& m : matrix) {
    worst = std::max(worst, (m.transpose() * m - id).cwiseAbs().maxCoeff());
    // Automorphism check on basis pairs: m [e_i, e_j] = [m e_i, m e_j].
    for (int i = 0; i < d; ++i) {
      ei.setZero();
      ei(i) = 1.0;
      for (int j = i + 1; j < d; ++j) {
        ej.setZero();
        ej(j) = 1.0;
        RVec lhs = m * algebra->bracket(ei, ej);
        RVec rhs = algebra->bracket(RVec(m.col(i)), RVec(m.col(j)));
        worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
      }
    }
  }
  return worst;
}

RMat group_exp(const LieAlgebra& alg, const RVec& xi) {
  return alg.ad(xi).exp();
}

namespace {

// Least-squares pullback of a matrix through ad: rows of A are vec(ad e_i).
struct AdSolver {
  Eigen::JacobiSVD<RMat> svd;

  explicit AdSolver(const LieAlgebra& alg) {
    const int d = alg.dim;
    RMat a(d * d, d);
    RVec e = RVec::Zero(d);
    for (int i = 0; i < d; ++i) {
      e.setZero();
      e(i) = 1.0;
      RMat adi = alg.ad(e);
      a.col(i) = Eigen::Map<RVec>(adi.data(), d * d);
    }
    svd.compute(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  }

  RVec coords(const RMat& m) const {
    RMat copy = m;
    return svd.solve(Eigen::Map<RVec>(copy.data(), m.rows() * m.cols()));
  }
};

}  // namespace

AlgebraForm1 maurer_cartan_form(const GroupField& field) {
  const LatticeGrid& g = field.grid;
  const LieAlgebra& alg = *field.algebra;
  AdSolver solver(alg);
  AlgebraForm1 out(g, field.algebra);

  auto shifted = [&](int x, int y, int dx, int dy, bool& ok) -> int {
    int xs = x + dx, ys = y + dy;
    if (g.periodic()) {
      xs = (xs + g.nx) % g.nx;
      ys = (ys + g.ny) % g.ny;
      ok = true;
    } else {
      ok = xs >= 0 && xs < g.nx && ys >= 0 && ys < g.ny;
    }
    return ok ? g.index(xs, ys) : 0;
  };

  auto derivative = [&](int x, int y, int dx, int dy) -> RMat {
    bool okp = false, okm = false;
    int ip = shifted(x, y, dx, dy, okp);
    int im = shifted(x, y, -dx, -dy, okm);
    if (okp && okm)
      return (field.matrix[ip] - field.matrix[im]) / (2.0 * g.h);
    // Clamped edge: second-order one-sided stencil.
    int s = okp ? 1 : -1;
    bool ok = false;
    int i1 = shifted(x, y, s * dx, s * dy, ok);
    int i2 = shifted(x, y, 2 * s * dx, 2 * s * dy, ok);
    return static_cast<double>(s) *
           (-3.0 * field.at(x, y) + 4.0 * field.matrix[i1] - field.matrix[i2]) /
           (2.0 * g.h);
  };

  for (int y = 0; y < g.ny; ++y)
    for (int x = 0; x < g.nx; ++x) {
      RMat inv = field.at(x, y).transpose();  // orthogonal in this basis
      RVec ax = solver.coords(inv * derivative(x, y, 1, 0));
      RVec ay = solver.coords(inv * derivative(x, y, 0, 1));
      out.a.at(x, y) = ax.cast<Cplx>();
      out.b.at(x, y) = ay.cast<Cplx>();
    }
  return out;
}

IntegrationResult integrate_mc(const AlgebraForm1& alpha, double flatness_tol) {
  const LatticeGrid& g = alpha.grid;
  const LieAlgebra& alg = *alpha.algebra;
  if (alpha.max_imag() > 1e-12)
    throw InputError("integration needs a real-valued form");

  IntegrationResult result;
  result.mc_max = mc_residual(alpha);
  if (result.mc_max > flatness_tol)
    throw StructureError("form is not flat: integration is path-dependent");

  auto areal = [&](int x, int y) -> RVec { return alpha.a.at(x, y).real(); };
  auto breal = [&](int x, int y) -> RVec { return alpha.b.at(x, y).real(); };

  auto step = [&](const RMat& u, const RVec& mid) -> RMat {
    return u * group_exp(alg, RVec(g.h * mid));
  };

  GroupField rows_first = GroupField::identity(g, alpha.algebra);
  for (int x = 1; x < g.nx; ++x)
    rows_first.at(x, 0) =
        step(rows_first.at(x - 1, 0), 0.5 * (areal(x - 1, 0) + areal(x, 0)));
  for (int x = 0; x < g.nx; ++x)
    for (int y = 1; y < g.ny; ++y)
      rows_first.at(x, y) =
          step(rows_first.at(x, y - 1), 0.5 * (breal(x, y - 1) + breal(x, y)));

  GroupField cols_first = GroupField::identity(g, alpha.algebra);
  for (int y = 1; y < g.ny; ++y)
    cols_first.at(0, y) =
        step(cols_first.at(0, y - 1), 0.5 * (breal(0, y - 1) + breal(0, y)));
  for (int y = 0; y < g.ny; ++y)
    for (int x = 1; x < g.nx; ++x)
      cols_first.at(x, y) =
          step(cols_first.at(x - 1, y), 0.5 * (areal(x - 1, y) + areal(x, y)));

  for (int p = 0; p < g.npoints(); ++p)
    result.path_residual =
        std::max(result.path_residual,
                 (rows_first.matrix[p] - cols_first.matrix[p])
                     .cwiseAbs()
                     .maxCoeff());

  // Reconstruction is measured on a clamped copy: the integrated field is a
  // patch primitive and need not close up around periodic directions.
  GroupField patch = rows_first;
  patch.grid.boundary = LatticeGrid::Boundary::Clamped;
  AlgebraForm1 back = maurer_cartan_form(patch);
  AlgebraForm1 sample = alpha;
  sample.grid.boundary = LatticeGrid::Boundary::Clamped;
  sample.a.grid.boundary = LatticeGrid::Boundary::Clamped;
  sample.b.grid.boundary = LatticeGrid::Boundary::Clamped;
  result.reconstruction_residual = (back - sample).max_abs();

  result.field = std::move(rows_first);
  return result;
}

}  // namespace ksym
