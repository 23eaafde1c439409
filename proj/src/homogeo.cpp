#include "ksym/homogeo.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace ksym {

namespace {

double max_abs_range(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

void check_orthonormal_blocks(const RMat& h, const RMat& n, double tol) {
  const auto gate = [tol](double r, const char* what) {
    if (r > tol)
      throw InputError(std::string("reductive split: ") + what +
                       " (residual " + std::to_string(r) + ")");
  };
  if (h.cols() > 0)
    gate((h.transpose() * h - RMat::Identity(h.cols(), h.cols()))
             .lpNorm<Eigen::Infinity>(),
         "isotropy basis not orthonormal");
  if (n.cols() > 0)
    gate((n.transpose() * n - RMat::Identity(n.cols(), n.cols()))
             .lpNorm<Eigen::Infinity>(),
         "complement basis not orthonormal");
  if (h.cols() > 0 && n.cols() > 0)
    gate((h.transpose() * n).lpNorm<Eigen::Infinity>(),
         "isotropy and complement bases not orthogonal");
}

ReductiveSplit build_split(std::shared_ptr<const LieAlgebra> g,
                           std::optional<GradedDecomposition> dec, RMat h,
                           RMat n, int vertical_dim, double tol) {
  check_orthonormal_blocks(h, n, tol);
  ReductiveSplit s;
  s.algebra = std::move(g);
  s.decomposition = std::move(dec);
  s.h_basis = std::move(h);
  s.n_basis = std::move(n);
  s.vertical_dim = vertical_dim;

  const int dim = s.algebra->dim;
  const int dh = s.h_dim();
  const int dn = s.n_dim();
  if (dh + dn != dim) {
    s.completeness_residual = 1.0;
  } else {
    RMat b(dim, dim);
    if (dh > 0) b.leftCols(dh) = s.h_basis;
    b.rightCols(dn) = s.n_basis;
    s.completeness_residual =
        (b * b.transpose() - RMat::Identity(dim, dim)).lpNorm<Eigen::Infinity>();
  }
  if (s.completeness_residual > tol)
    throw InputError("reductive split: bases do not span the algebra");

  s.c_nnn = Tens3(dn);
  s.c_nnh = RMat::Zero(dn * dn, dh);
  for (int i = 0; i < dn; ++i)
    for (int j = 0; j < dn; ++j) {
      const RVec w = s.algebra->bracket(RVec(s.n_basis.col(i)),
                                        RVec(s.n_basis.col(j)));
      const RVec wn = s.n_basis.transpose() * w;
      for (int k = 0; k < dn; ++k) s.c_nnn.at(i, j, k) = wn[k];
      if (dh > 0) s.c_nnh.row(i * dn + j) = (s.h_basis.transpose() * w).transpose();
    }

  s.ad_h.resize(dh);
  for (int a = 0; a < dh; ++a) {
    s.ad_h[a] = RMat::Zero(dn, dn);
    for (int i = 0; i < dn; ++i) {
      const RVec w = s.algebra->bracket(RVec(s.h_basis.col(a)),
                                        RVec(s.n_basis.col(i)));
      s.ad_h[a].col(i) = s.n_basis.transpose() * w;
      s.reductivity_residual =
          std::max(s.reductivity_residual,
                   (w - s.n_basis * s.ad_h[a].col(i)).lpNorm<Eigen::Infinity>());
    }
  }
  if (s.reductivity_residual > tol)
    throw StructureError("reductive split: [h, n] leaks outside n, residual " +
                         std::to_string(s.reductivity_residual));
  return s;
}

}  // namespace

double Tens3::max_abs() const { return max_abs_range(v); }

RVec ReductiveSplit::bracket_n(const RVec& x, const RVec& y) const {
  const int dn = n_dim();
  RVec out = RVec::Zero(dn);
  for (int i = 0; i < dn; ++i)
    for (int j = 0; j < dn; ++j) {
      const double t = x[i] * y[j];
      if (t == 0.0) continue;
      for (int k = 0; k < dn; ++k) out[k] += t * c_nnn.at(i, j, k);
    }
  return out;
}

RVec ReductiveSplit::bracket_h(const RVec& x, const RVec& y) const {
  const int dn = n_dim();
  RVec out = RVec::Zero(h_dim());
  for (int i = 0; i < dn; ++i)
    for (int j = 0; j < dn; ++j) {
      const double t = x[i] * y[j];
      if (t == 0.0) continue;
      out += t * c_nnh.row(i * dn + j).transpose();
    }
  return out;
}

ReductiveSplit reductive_split(const GradedDecomposition& d, double tol) {
  const int dim = d.algebra->dim;
  int dn = 0;
  for (const auto& b : d.basis_mj) dn += static_cast<int>(b.cols());
  const int dv = static_cast<int>(d.basis_gk.cols());
  RMat n(dim, dn + dv);
  int at = 0;
  for (const auto& b : d.basis_mj) {
    n.middleCols(at, static_cast<int>(b.cols())) = b;
    at += static_cast<int>(b.cols());
  }
  if (dv > 0) n.rightCols(dv) = d.basis_gk;
  return build_split(d.algebra, d, d.basis_g0, std::move(n), dv, tol);
}

ReductiveSplit reductive_split(std::shared_ptr<const LieAlgebra> g, RMat h_basis,
                               RMat n_basis, int vertical_dim, double tol) {
  if (vertical_dim < 0 || vertical_dim > n_basis.cols())
    throw InputError("reductive split: vertical dimension out of range");
  return build_split(std::move(g), std::nullopt, std::move(h_basis),
                     std::move(n_basis), vertical_dim, tol);
}

InvariantMetric make_metric(const ReductiveSplit& s, RMat gram, double tol) {
  const int dn = s.n_dim();
  if (gram.rows() != dn || gram.cols() != dn)
    throw InputError("metric: gram shape does not match the complement");
  if ((gram - gram.transpose()).lpNorm<Eigen::Infinity>() > tol)
    throw InputError("metric: gram not symmetric");
  Eigen::SelfAdjointEigenSolver<RMat> es(gram);
  if (es.eigenvalues().minCoeff() <= tol)
    throw StructureError("metric: gram not positive definite, min eigenvalue " +
                         std::to_string(es.eigenvalues().minCoeff()));
  InvariantMetric m;
  m.gram = std::move(gram);
  for (const auto& ad : s.ad_h)
    m.invariance_residual =
        std::max(m.invariance_residual,
                 (ad.transpose() * m.gram + m.gram * ad).lpNorm<Eigen::Infinity>());
  if (s.decomposition) {
    const RMat t = s.n_basis.transpose() * s.decomposition->tau * s.n_basis;
    m.tau_orthogonal =
        (t.transpose() * m.gram * t - m.gram).lpNorm<Eigen::Infinity>() < tol;
  }
  return m;
}

InvariantMetric killing_metric(const ReductiveSplit& s, double scale) {
  const int dn = s.n_dim();
  RMat gram(dn, dn);
  for (int i = 0; i < dn; ++i)
    for (int j = i; j < dn; ++j) {
      gram(i, j) = scale * s.algebra->killing(RVec(s.n_basis.col(i)),
                                              RVec(s.n_basis.col(j)));
      gram(j, i) = gram(i, j);
    }
  return make_metric(s, std::move(gram));
}

RMat OriginConnection::lambda_mat(int i) const {
  RMat m(dim, dim);
  for (int j = 0; j < dim; ++j)
    for (int k = 0; k < dim; ++k) m(k, j) = lambda.at(i, j, k);
  return m;
}

RMat OriginConnection::curvature_mat(int i, int j) const {
  RMat m(dim, dim);
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b)
      m(a, b) = curvature[((static_cast<std::size_t>(i) * dim + j) * dim + a) * dim + b];
  return m;
}

OriginConnection connection_from_lambda(const ReductiveSplit& s, Tens3 lambda) {
  const int dn = s.n_dim();
  OriginConnection c;
  c.dim = dn;
  c.lambda = std::move(lambda);
  c.torsion = Tens3(dn);
  for (int i = 0; i < dn; ++i)
    for (int j = 0; j < dn; ++j)
      for (int k = 0; k < dn; ++k)
        c.torsion.at(i, j, k) =
            c.lambda.at(i, j, k) - c.lambda.at(j, i, k) - s.c_nnn.at(i, j, k);

  std::vector<RMat> lmat(dn);
  for (int i = 0; i < dn; ++i) lmat[i] = c.lambda_mat(i);
  c.curvature.assign(static_cast<std::size_t>(dn) * dn * dn * dn, 0.0);
  for (int i = 0; i < dn; ++i)
    for (int j = 0; j < dn; ++j) {
      RMat r = lmat[i] * lmat[j] - lmat[j] * lmat[i];
      for (int k = 0; k < dn; ++k) r -= s.c_nnn.at(i, j, k) * lmat[k];
      for (int a = 0; a < s.h_dim(); ++a) r -= s.c_nnh(i * dn + j, a) * s.ad_h[a];
      for (int a = 0; a < dn; ++a)
        for (int b = 0; b < dn; ++b)
          c.curvature[((static_cast<std::size_t>(i) * dn + j) * dn + a) * dn + b] =
              r(a, b);
    }
  return c;
}

OriginConnection connection_family(const ReductiveSplit& s, double t) {
  const int dn = s.n_dim();
  Tens3 lambda(dn);
  for (std::size_t q = 0; q < lambda.v.size(); ++q) lambda.v[q] = t * s.c_nnn.v[q];
  return connection_from_lambda(s, std::move(lambda));
}

Tens3 natural_reductivity_term(const ReductiveSplit& s, const InvariantMetric& h) {
  const int dn = s.n_dim();
  const RMat ginv = h.gram.inverse();
  Tens3 u(dn);
  for (int i = 0; i < dn; ++i)
    for (int j = 0; j < dn; ++j) {
      RVec low = RVec::Zero(dn);
      for (int k = 0; k < dn; ++k) {
        double acc = 0;
        for (int l = 0; l < dn; ++l)
          acc += s.c_nnn.at(k, i, l) * h.gram(l, j) + h.gram(i, l) * s.c_nnn.at(k, j, l);
        low[k] = acc;
      }
      const RVec up = ginv * low;
      for (int a = 0; a < dn; ++a) u.at(i, j, a) = up[a];
    }
  return u;
}

OriginConnection metric_family(const ReductiveSplit& s, const InvariantMetric& h,
                               double t, double tol) {
  if (h.invariance_residual > tol)
    throw InputError("metric connection family: metric is not ad-invariant, "
                     "residual " + std::to_string(h.invariance_residual));
  const Tens3 u = natural_reductivity_term(s, h);
  const int dn = s.n_dim();
  Tens3 lambda(dn);
  for (std::size_t q = 0; q < lambda.v.size(); ++q)
    lambda.v[q] = t * (s.c_nnn.v[q] + u.v[q]);
  return connection_from_lambda(s, std::move(lambda));
}

double metricity_residual(const OriginConnection& c, const InvariantMetric& h) {
  const int dn = c.dim;
  double r = 0;
  for (int i = 0; i < dn; ++i)
    for (int j = 0; j < dn; ++j)
      for (int k = 0; k < dn; ++k) {
        double acc = 0;
        for (int a = 0; a < dn; ++a)
          acc += c.lambda.at(i, j, a) * h.gram(a, k) +
                 h.gram(j, a) * c.lambda.at(i, k, a);
        r = std::max(r, std::abs(acc));
      }
  return r;
}

double OriginFStructure::f_identity_residual() const {
  return ((f * f * f) + f).lpNorm<Eigen::Infinity>();
}

OriginFStructure canonical_structures(const ReductiveSplit& s, int m) {
  if (!s.decomposition)
    throw InputError("canonical structure: split has no graded decomposition");
  const GradedDecomposition& d = *s.decomposition;
  const int k = d.even() ? d.kprime / 2 : (d.kprime - 1) / 2;
  const int top = d.even() ? k - 1 : k;
  if (m < 1 || m > top)
    throw InputError("canonical structure: level " + std::to_string(m) +
                     " outside 1.." + std::to_string(top));
  const int dim = d.algebra->dim;
  CMat a = CMat::Zero(dim, dim);
  const Cplx iu(0.0, 1.0);
  for (int j = 1; j <= m; ++j) a += iu * (d.P(-j) - d.P(j));
  if (a.imag().lpNorm<Eigen::Infinity>() > 1e-10)
    throw StructureError("canonical structure: assembled map is not real");
  OriginFStructure f;
  f.level = m;
  f.f = s.n_basis.transpose() * a.real() * s.n_basis;
  return f;
}

RMat tau_on_n(const ReductiveSplit& s) {
  if (!s.decomposition)
    throw InputError("tau restriction: split has no graded decomposition");
  return s.n_basis.transpose() * s.decomposition->tau * s.n_basis;
}

double TrilinearForm::max_abs() const { return max_abs_range(v); }

double TrilinearForm::antisym12_residual() const {
  double r = 0;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      for (int k = 0; k < dim; ++k)
        r = std::max(r, std::abs(at(i, j, k) + at(j, i, k)));
  return r;
}

double TrilinearForm::antisym_full_residual() const {
  // Adjacent transpositions generate the symmetric group.
  double r = 0;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      for (int k = 0; k < dim; ++k) {
        r = std::max(r, std::abs(at(i, j, k) + at(j, i, k)));
        r = std::max(r, std::abs(at(i, j, k) + at(i, k, j)));
      }
  return r;
}

TrilinearForm lower(const Tens3& t, const InvariantMetric& h) {
  TrilinearForm b(t.n, true);
  for (int i = 0; i < t.n; ++i)
    for (int j = 0; j < t.n; ++j)
      for (int k = 0; k < t.n; ++k) {
        double acc = 0;
        for (int a = 0; a < t.n; ++a) acc += t.at(i, j, a) * h.gram(a, k);
        b.at(i, j, k) = acc;
      }
  return b;
}

Tens3 raise(const TrilinearForm& b, const InvariantMetric& h) {
  const RMat ginv = h.gram.inverse();
  Tens3 t(b.dim);
  for (int i = 0; i < b.dim; ++i)
    for (int j = 0; j < b.dim; ++j)
      for (int a = 0; a < b.dim; ++a) {
        double acc = 0;
        for (int k = 0; k < b.dim; ++k) acc += ginv(a, k) * b.at(i, j, k);
        t.at(i, j, a) = acc;
      }
  return t;
}

TrilinearForm lowered_torsion(const OriginConnection& c, const InvariantMetric& h) {
  return lower(c.torsion, h);
}

TrilinearForm component_split(const TrilinearForm& b, const OriginFStructure& j,
                              int eps, int epsp) {
  if (!b.lowered) throw InputError("component split: expects a lowered form");
  if (std::abs(eps) != 1 || std::abs(epsp) != 1)
    throw InputError("component split: signs must be +-1");
  const int n = b.dim;
  const RMat& f = j.f;
  TrilinearForm out(n, true);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      for (int z = 0; z < n; ++z) {
        double jj = 0, jz1 = 0, jz2 = 0;
        for (int a = 0; a < n; ++a)
          for (int c = 0; c < n; ++c) {
            jj += f(a, x) * f(c, y) * b.at(a, c, z);
            jz1 += f(a, x) * f(c, z) * b.at(a, y, c);
            jz2 += f(a, y) * f(c, z) * b.at(x, a, c);
          }
        out.at(x, y, z) =
            -0.25 * (eps * epsp * jj - eps * jz1 - epsp * jz2 - b.at(x, y, z));
      }
  return out;
}

Tens3 nijenhuis(const OriginFStructure& f, const OriginConnection& conn,
                double tol) {
  const int n = conn.dim;
  if (f.f.rows() != n)
    throw InputError("nijenhuis: structure and connection dimensions differ");
  for (int i = 0; i < n; ++i) {
    const RMat l = conn.lambda_mat(i);
    if ((l * f.f - f.f * l).lpNorm<Eigen::Infinity>() > tol)
      throw StructureError("nijenhuis: connection does not preserve the structure");
  }
  const RMat p = -(f.f * f.f);
  const auto tors = [&](const RVec& x, const RVec& y) {
    RVec out = RVec::Zero(n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        const double t = x[a] * y[b];
        if (t == 0.0) continue;
        for (int k = 0; k < n; ++k) out[k] += t * conn.torsion.at(a, b, k);
      }
    return out;
  };
  Tens3 out(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const RVec ei = RVec::Unit(n, i), ej = RVec::Unit(n, j);
      const RVec fi = f.f.col(i), fj = f.f.col(j);
      const RVec val = -(tors(fi, fj) - f.f * tors(fi, ej) - f.f * tors(ei, fj) -
                         p * tors(ei, ej));
      for (int k = 0; k < n; ++k) out.at(i, j, k) = val[k];
    }
  return out;
}

namespace {

TrilinearForm dot_with(const TrilinearForm& b, const RMat& f) {
  const int n = b.dim;
  TrilinearForm out(n, true);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      for (int z = 0; z < n; ++z) {
        double acc = 0;
        for (int a = 0; a < n; ++a)
          for (int c = 0; c < n; ++c)
            for (int e = 0; e < n; ++e)
              acc += f(a, x) * f(c, y) * f(e, z) * b.at(a, c, e);
        out.at(x, y, z) = acc;
      }
  return out;
}

TrilinearForm circ_with(const TrilinearForm& b, const RMat& f) {
  const int n = b.dim;
  TrilinearForm out(n, true);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      for (int z = 0; z < n; ++z) {
        double acc = 0;
        for (int a = 0; a < n; ++a)
          acc += f(a, x) * b.at(a, y, z) + f(a, y) * b.at(x, a, z) +
                 f(a, z) * b.at(x, y, a);
        out.at(x, y, z) = acc;
      }
  return out;
}

}  // namespace

TrilinearForm j_actions(const TrilinearForm& b, const OriginFStructure& j,
                        JAction which) {
  if (!b.lowered) throw InputError("j action: expects a lowered form");
  switch (which) {
    case JAction::Dot:
      return dot_with(b, j.f);
    case JAction::Circ:
      return circ_with(b, j.f);
    case JAction::Bullet: {
      const RMat p = -(j.f * j.f);
      TrilinearForm corr = b;
      const TrilinearForm bp = dot_with(b, p);
      for (std::size_t q = 0; q < corr.v.size(); ++q) corr.v[q] -= bp.v[q];
      TrilinearForm out = dot_with(b, j.f);
      const TrilinearForm c = circ_with(corr, j.f);
      for (std::size_t q = 0; q < out.v.size(); ++q) out.v[q] += c.v[q];
      return out;
    }
    case JAction::Star: {
      TrilinearForm out = j_actions(b, j, JAction::Bullet);
      const TrilinearForm c = circ_with(b, j.f);
      for (std::size_t q = 0; q < out.v.size(); ++q)
        out.v[q] = 0.5 * (out.v[q] + c.v[q]);
      return out;
    }
  }
  throw InputError("j action: unknown action");
}

TrilinearForm value_action(const OriginFStructure& j, const TrilinearForm& b) {
  if (!b.lowered) throw InputError("value action: expects a lowered form");
  const int n = b.dim;
  TrilinearForm out(n, true);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      for (int z = 0; z < n; ++z) {
        double acc = 0;
        for (int a = 0; a < n; ++a) acc -= b.at(x, y, a) * j.f(a, z);
        out.at(x, y, z) = acc;
      }
  return out;
}

namespace {

std::size_t form_size(int degree, int dim) {
  std::size_t s = 1;
  for (int i = 0; i < degree; ++i) s *= static_cast<std::size_t>(dim);
  return s;
}

}  // namespace

InvariantForm InvariantForm::zero(int degree, int dim) {
  InvariantForm f;
  f.degree = degree;
  f.dim = dim;
  f.v.assign(form_size(degree, dim), 0.0);
  return f;
}

double& InvariantForm::at(int i) { return v[static_cast<std::size_t>(i)]; }
double& InvariantForm::at(int i, int j) {
  return v[static_cast<std::size_t>(i) * dim + j];
}
double& InvariantForm::at(int i, int j, int k) {
  return v[(static_cast<std::size_t>(i) * dim + j) * dim + k];
}
double& InvariantForm::at(int i, int j, int k, int l) {
  return v[((static_cast<std::size_t>(i) * dim + j) * dim + k) * dim + l];
}
double InvariantForm::at(int i) const { return v[static_cast<std::size_t>(i)]; }
double InvariantForm::at(int i, int j) const {
  return v[static_cast<std::size_t>(i) * dim + j];
}
double InvariantForm::at(int i, int j, int k) const {
  return v[(static_cast<std::size_t>(i) * dim + j) * dim + k];
}
double InvariantForm::at(int i, int j, int k, int l) const {
  return v[((static_cast<std::size_t>(i) * dim + j) * dim + k) * dim + l];
}
double InvariantForm::max_abs() const { return max_abs_range(v); }

double form_invariance_residual(const InvariantForm& a, const ReductiveSplit& s) {
  const int n = a.dim;
  if (n != s.n_dim())
    throw InputError("form invariance: dimension mismatch");
  double r = 0;
  for (const RMat& ad : s.ad_h) {
    if (a.degree == 1) {
      for (int i = 0; i < n; ++i) {
        double acc = 0;
        for (int q = 0; q < n; ++q) acc += ad(q, i) * a.at(q);
        r = std::max(r, std::abs(acc));
      }
    } else if (a.degree == 2) {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double acc = 0;
          for (int q = 0; q < n; ++q)
            acc += ad(q, i) * a.at(q, j) + ad(q, j) * a.at(i, q);
          r = std::max(r, std::abs(acc));
        }
    } else if (a.degree == 3) {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k) {
            double acc = 0;
            for (int q = 0; q < n; ++q)
              acc += ad(q, i) * a.at(q, j, k) + ad(q, j) * a.at(i, q, k) +
                     ad(q, k) * a.at(i, j, q);
            r = std::max(r, std::abs(acc));
          }
    } else if (a.degree == 4) {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l) {
              double acc = 0;
              for (int q = 0; q < n; ++q)
                acc += ad(q, i) * a.at(q, j, k, l) + ad(q, j) * a.at(i, q, k, l) +
                       ad(q, k) * a.at(i, j, q, l) + ad(q, l) * a.at(i, j, k, q);
              r = std::max(r, std::abs(acc));
            }
    } else {
      throw InputError("form invariance: unsupported degree");
    }
  }
  return r;
}

InvariantForm invariant_d(const InvariantForm& a, const ReductiveSplit& s,
                          double tol) {
  const double inv = form_invariance_residual(a, s);
  if (inv > tol)
    throw InputError("exterior differential: form is not invariant, residual " +
                     std::to_string(inv));
  const int n = a.dim;
  const auto cb = [&](int i, int j, auto&& eval) {
    // contracts a(., rest) against [e_i, e_j]_n
    double acc = 0;
    for (int q = 0; q < n; ++q) {
      const double c = s.c_nnn.at(i, j, q);
      if (c != 0.0) acc += c * eval(q);
    }
    return acc;
  };
  if (a.degree == 1) {
    InvariantForm d = InvariantForm::zero(2, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        d.at(i, j) = -cb(i, j, [&](int q) { return a.at(q); });
    return d;
  }
  if (a.degree == 2) {
    InvariantForm d = InvariantForm::zero(3, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          d.at(i, j, k) = -cb(i, j, [&](int q) { return a.at(q, k); }) +
                          cb(i, k, [&](int q) { return a.at(q, j); }) -
                          cb(j, k, [&](int q) { return a.at(q, i); });
    return d;
  }
  if (a.degree == 3) {
    InvariantForm d = InvariantForm::zero(4, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l)
            d.at(i, j, k, l) = -cb(i, j, [&](int q) { return a.at(q, k, l); }) +
                               cb(i, k, [&](int q) { return a.at(q, j, l); }) -
                               cb(i, l, [&](int q) { return a.at(q, j, k); }) -
                               cb(j, k, [&](int q) { return a.at(q, i, l); }) +
                               cb(j, l, [&](int q) { return a.at(q, i, k); }) -
                               cb(k, l, [&](int q) { return a.at(q, i, j); });
    return d;
  }
  throw InputError("exterior differential: unsupported degree");
}

InvariantForm kaehler_form(const OriginFStructure& f, const InvariantMetric& h) {
  const int n = static_cast<int>(f.f.rows());
  InvariantForm o = InvariantForm::zero(2, n);
  const RMat m = f.f.transpose() * h.gram;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) o.at(i, j) = m(i, j);
  return o;
}

TrilinearForm to_trilinear(const InvariantForm& a) {
  if (a.degree != 3) throw InputError("form conversion: degree must be 3");
  TrilinearForm b(a.dim, true);
  b.v = a.v;
  return b;
}

InvariantForm to_form(const TrilinearForm& b) {
  InvariantForm a = InvariantForm::zero(3, b.dim);
  a.v = b.v;
  return a;
}

TrilinearForm skew(const TrilinearForm& b) {
  TrilinearForm out(b.dim, b.lowered);
  for (int i = 0; i < b.dim; ++i)
    for (int j = 0; j < b.dim; ++j)
      for (int k = 0; k < b.dim; ++k)
        out.at(i, j, k) = b.at(i, j, k) + b.at(j, k, i) + b.at(k, i, j);
  return out;
}

TrilinearForm horizontal_curvature(const ReductiveSplit& s,
                                   const InvariantMetric& h) {
  const int n = s.n_dim();
  TrilinearForm out(n, true);
  for (int i = 0; i < n; ++i) {
    if (!s.is_horizontal(i)) continue;
    for (int j = 0; j < n; ++j) {
      if (!s.is_horizontal(j)) continue;
      for (int k = 0; k < n; ++k) {
        double acc = 0;
        for (int l = s.horizontal_dim(); l < n; ++l)
          acc -= s.c_nnn.at(i, j, l) * h.gram(l, k);
        out.at(i, j, k) = acc;
      }
    }
  }
  return out;
}

TrilinearForm vertical_curvature(const ReductiveSplit& s,
                                 const InvariantMetric& h) {
  const int n = s.n_dim();
  TrilinearForm out(n, true);
  for (int i = s.horizontal_dim(); i < n; ++i)
    for (int j = s.horizontal_dim(); j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double acc = 0;
        for (int l = 0; l < s.horizontal_dim(); ++l)
          acc -= s.c_nnn.at(i, j, l) * h.gram(l, k);
        out.at(i, j, k) = acc;
      }
  return out;
}

TrilinearForm extended_nijenhuis(const ReductiveSplit& s,
                                 const OriginFStructure& f,
                                 const InvariantMetric& h) {
  const int n = s.n_dim();
  const TrilinearForm nlow = lower(nijenhuis(f, connection_family(s, 0.0)), h);
  const TrilinearForm phi = horizontal_curvature(s, h);
  const TrilinearForm rv = vertical_curvature(s, h);
  TrilinearForm out = nlow;
  const auto hor = [&](int i) { return s.is_horizontal(i); };
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      for (int z = 0; z < n; ++z) {
        double acc = phi.at(x, y, z);
        if (!hor(z) && !hor(x) && hor(y)) acc += rv.at(z, x, y);
        if (!hor(y) && !hor(z) && hor(x)) acc += rv.at(y, z, x);
        out.at(x, y, z) += acc;
      }
  return out;
}

namespace {

// Λ = Levi-Civita + T/2 with T raised; checks structure preservation and
// metricity of the result.
void verify_characteristic(const ReductiveSplit& s, const RMat& f,
                           const InvariantMetric& h, const TrilinearForm& t,
                           double tol) {
  const OriginConnection lc = metric_family(s, h, 0.5);
  const Tens3 tv = raise(t, h);
  Tens3 lam = lc.lambda;
  for (std::size_t q = 0; q < lam.v.size(); ++q) lam.v[q] += 0.5 * tv.v[q];
  const OriginConnection c = connection_from_lambda(s, std::move(lam));
  const double metr = metricity_residual(c, h);
  if (metr > tol)
    throw StructureError("characteristic connection: not metric, residual " +
                         std::to_string(metr));
  for (int i = 0; i < c.dim; ++i) {
    const RMat l = c.lambda_mat(i);
    const double comm = (l * f - f * l).lpNorm<Eigen::Infinity>();
    if (comm > tol)
      throw StructureError(
          "characteristic connection: structure not parallel, residual " +
          std::to_string(comm));
  }
}

}  // namespace

TrilinearForm characteristic_torsion_complex(const ReductiveSplit& s,
                                             const OriginFStructure& j,
                                             const InvariantMetric& h,
                                             const TrilinearForm& d_omega,
                                             double tol) {
  const int n = s.n_dim();
  if ((j.f * j.f + RMat::Identity(n, n)).lpNorm<Eigen::Infinity>() > tol)
    throw InputError("characteristic torsion: structure is not a complex one");
  const TrilinearForm nlow = lower(nijenhuis(j, connection_family(s, 0.0)), h);
  if (nlow.antisym_full_residual() > tol)
    throw NotG1Error("characteristic torsion: Nijenhuis form is not skew, "
                     "residual " + std::to_string(nlow.antisym_full_residual()));
  // -d^c omega = (d omega)(J.,J.,J.)
  TrilinearForm t = j_actions(d_omega, j, JAction::Dot);
  for (std::size_t q = 0; q < t.v.size(); ++q) t.v[q] += nlow.v[q];
  if (t.antisym_full_residual() > tol)
    throw StructureError("characteristic torsion: result is not a 3-form");
  verify_characteristic(s, j.f, h, t, tol);
  return t;
}

TrilinearForm characteristic_torsion_f(const ReductiveSplit& s,
                                       const OriginFStructure& f,
                                       const InvariantMetric& h,
                                       const TrilinearForm& phi,
                                       const TrilinearForm& rv,
                                       const TrilinearForm& alpha,
                                       double tol) {
  const int n = s.n_dim();
  const int hd = s.horizontal_dim();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        if ((s.is_horizontal(i) || s.is_horizontal(j) || s.is_horizontal(k)) &&
            alpha.at(i, j, k) != 0.0)
          throw InputError("characteristic torsion: alpha must live on three "
                           "vertical slots");

  const TrilinearForm tn = extended_nijenhuis(s, f, h);
  // Skewness on the two-horizontal-one-vertical patterns gates the reductive
  // type; skewness everywhere gates the global type.
  double mixed = 0, global = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const double r = std::max(std::abs(tn.at(i, j, k) + tn.at(j, i, k)),
                                  std::abs(tn.at(i, j, k) + tn.at(i, k, j)));
        global = std::max(global, r);
        const int nh = (i < hd) + (j < hd) + (k < hd);
        if (nh == 2) mixed = std::max(mixed, r);
      }
  if (mixed > tol)
    throw NotReductiveError("characteristic torsion: extended Nijenhuis not "
                            "skew on mixed slots, residual " + std::to_string(mixed));
  if (global > tol)
    throw NotGlobalG1Error("characteristic torsion: extended Nijenhuis not "
                           "skew, residual " + std::to_string(global));

  const InvariantForm omega = kaehler_form(f, h);
  const TrilinearForm d_omega = to_trilinear(invariant_d(omega, s, tol));
  TrilinearForm t = j_actions(d_omega, f, JAction::Dot);  // = -d^c omega

  TrilinearForm nlow = lower(nijenhuis(f, connection_family(s, 0.0)), h);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        if (!(s.is_horizontal(i) && s.is_horizontal(j) && s.is_horizontal(k)))
          nlow.at(i, j, k) = 0.0;

  const TrilinearForm sp = skew(phi), sr = skew(rv);
  for (std::size_t q = 0; q < t.v.size(); ++q)
    t.v[q] += nlow.v[q] + sp.v[q] + sr.v[q] + alpha.v[q];
  if (t.antisym_full_residual() > tol)
    throw StructureError("characteristic torsion: result is not a 3-form");
  verify_characteristic(s, f.f, h, t, tol);
  return t;
}

}  // namespace ksym
