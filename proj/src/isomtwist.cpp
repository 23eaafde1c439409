#include "ksym/isomtwist.hpp"

#include <cmath>
#include <complex>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ksym/autodecomp.hpp"
#include "ksym/errors.hpp"

namespace ksym {
namespace {

constexpr double kPi = 3.14159265358979323846;

RMat kron(const RMat& a, const RMat& b) {
  RMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

RMat matpow(const RMat& a, int p) {
  RMat out = RMat::Identity(a.rows(), a.cols());
  for (int i = 0; i < p; ++i) out = out * a;
  return out;
}

// Projector onto the omega_order^j eigenspace of a matrix of finite order.
CMat resolvent(const RMat& u, int order, int j) {
  const int d = static_cast<int>(u.rows());
  CMat out = CMat::Zero(d, d);
  RMat pw = RMat::Identity(d, d);
  for (int l = 0; l < order; ++l) {
    const double ang = -2.0 * kPi * j * l / order;
    out += std::polar(1.0 / order, ang) * pw.cast<Cplx>();
    pw = pw * u;
  }
  return out;
}

// vec(X^T) = T vec(X) for column-major vec on d x d matrices.
RMat transpose_op(int d) {
  RMat t = RMat::Zero(d * d, d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) t(i + d * j, j + d * i) = 1.0;
  return t;
}

int proj_rank(const CMat& p, const std::string& what) {
  const Cplx tr = p.trace();
  const double rounded = std::round(tr.real());
  if (std::abs(tr.imag()) > 1e-6 || std::abs(tr.real() - rounded) > 1e-6)
    throw StructureError("isometry: " + what + " projector trace " +
                         std::to_string(tr.real()) + " not close to an integer");
  return static_cast<int>(rounded);
}

int inv_mod(int a, int m) {
  int t = 0, nt = 1, r = m, nr = ((a % m) + m) % m;
  while (nr != 0) {
    const int q = r / nr;
    const int tmp_t = t - q * nt;
    t = nt;
    nt = tmp_t;
    const int tmp_r = r - q * nr;
    r = nr;
    nr = tmp_r;
  }
  if (r != 1) throw InputError("inverse of " + std::to_string(a) + " mod " +
                               std::to_string(m) + " does not exist");
  return ((t % m) + m) % m;
}

// Orthonormal basis of A.so(2n), one vectorized column per pair i < j.
RMat twisted_skew_basis(const RMat& a) {
  const int d = static_cast<int>(a.rows());
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  RMat out(d * d, d * (d - 1) / 2);
  int col = 0;
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      RMat s = RMat::Zero(d, d);
      s(i, j) = inv_sqrt2;
      s(j, i) = -inv_sqrt2;
      const RMat as = a * s;
      out.col(col++) = Eigen::Map<const RVec>(as.data(), d * d);
    }
  }
  return out;
}

// B -> sum over p + l = c - 1 of A^p B A^l, as a matrix on vec.
RMat power_diff_op(const RMat& a, int c) {
  const int d = static_cast<int>(a.rows());
  RMat out = RMat::Zero(d * d, d * d);
  for (int p = 0; p < c; ++p) {
    const int l = c - 1 - p;
    out += kron(matpow(a, l).transpose(), matpow(a, p));
  }
  return out;
}

// Projector onto (A.so)^C in vec coordinates: X -> (X - A X^T A) / 2.
RMat twisted_skew_projector(const RMat& a) {
  const int d = static_cast<int>(a.rows());
  const RMat id = RMat::Identity(d * d, d * d);
  return 0.5 * (id - kron(a.transpose(), a) * transpose_op(d));
}

std::vector<int> eigen_multiplicities(const RMat& a, int k) {
  std::vector<int> p;
  for (int j = 1; j < k; ++j)
    p.push_back(proj_rank(resolvent(a, 2 * k, j), "eigenvalue"));
  return p;
}

}  // namespace

FiniteIsometry make_isometry(RMat a, int k, double tol) {
  if (a.rows() != a.cols() || a.rows() < 2 || a.rows() % 2 != 0)
    throw InputError("isometry: matrix must be square of even dimension >= 2");
  if (k < 1) throw InputError("isometry: k must be positive");
  const int d = static_cast<int>(a.rows());

  FiniteIsometry out;
  out.k = k;
  out.n = d / 2;

  const double orth = (a.transpose() * a - RMat::Identity(d, d))
                          .lpNorm<Eigen::Infinity>();
  if (orth > tol)
    throw StructureError("isometry: not orthogonal, residual " +
                         std::to_string(orth));
  if (a.determinant() < 0.0)
    throw StructureError("isometry: determinant is -1, not special orthogonal");

  out.order = minimal_power_identity(a, 2 * k, std::max(tol, 1e-9));
  if (out.order == 0 || (2 * k) % out.order != 0)
    throw StructureError("isometry: matrix^" + std::to_string(2 * k) +
                         " != Id");

  if (proj_rank(resolvent(a, 2 * k, 0), "eigenvalue +1") != 0)
    throw StructureError("isometry: eigenvalue +1 present");
  out.no_eig_plus1 = true;
  if (proj_rank(resolvent(a, 2 * k, k), "eigenvalue -1") != 0)
    throw StructureError("isometry: eigenvalue -1 present");
  out.no_eig_minus1 = true;

  const std::vector<int> p = eigen_multiplicities(a, k);
  int total = 0;
  bool coprime = false;
  for (int j = 1; j < k; ++j) {
    total += p[static_cast<std::size_t>(j - 1)];
    if (p[static_cast<std::size_t>(j - 1)] > 0 && std::gcd(j, 2 * k) == 1)
      coprime = true;
  }
  if (total != out.n)
    throw StructureError("isometry: eigenvalue multiplicities sum to " +
                         std::to_string(total) + ", expected " +
                         std::to_string(out.n));
  if (!coprime)
    throw StructureError(
        "isometry: no eigenvalue angle with index coprime to 2k; order is "
        "smaller than " + std::to_string(2 * k));
  if (out.order != 2 * k)
    throw StructureError("isometry: minimal order " + std::to_string(out.order) +
                         " != " + std::to_string(2 * k));

  const double half = (matpow(a, k) + RMat::Identity(d, d))
                          .lpNorm<Eigen::Infinity>();
  out.r = half <= tol ? k : 2 * k;
  out.matrix = std::move(a);
  return out;
}

CanonicalFrame canonical_frame(const FiniteIsometry& a) {
  const int d = 2 * a.n;
  CanonicalFrame f;
  f.m = RMat(d, d);
  f.j0 = RMat::Zero(d, d);
  const double sqrt2 = std::sqrt(2.0);
  int col = 0;
  for (int j = 1; j < a.k; ++j) {
    const CMat basis = projector_image(resolvent(a.matrix, 2 * a.k, j));
    const double c = std::cos(kPi * j / a.k);
    const double s = std::sin(kPi * j / a.k);
    for (int v = 0; v < basis.cols(); ++v) {
      f.m.col(col) = sqrt2 * basis.col(v).imag();
      f.m.col(col + 1) = sqrt2 * basis.col(v).real();
      f.j0(col, col) = c;
      f.j0(col, col + 1) = -s;
      f.j0(col + 1, col) = s;
      f.j0(col + 1, col + 1) = c;
      col += 2;
    }
  }
  if (col != d)
    throw StructureError("isometry: eigenbasis spans dimension " +
                         std::to_string(col) + " of " + std::to_string(d));
  const double orth = (f.m.transpose() * f.m - RMat::Identity(d, d))
                          .lpNorm<Eigen::Infinity>();
  if (orth > 1e-8)
    throw StructureError("isometry: intertwiner not orthogonal, residual " +
                         std::to_string(orth));
  f.residual = (f.m.transpose() * a.matrix * f.m - f.j0)
                   .lpNorm<Eigen::Infinity>();
  if (f.residual > 1e-8)
    throw StructureError("isometry: intertwiner fails to canonicalize, residual " +
                         std::to_string(f.residual));
  return f;
}

ComponentInvariant component_invariant(const FiniteIsometry& a) {
  ComponentInvariant inv;
  inv.p = eigen_multiplicities(a.matrix, a.k);
  inv.r = a.r;
  const CanonicalFrame f = canonical_frame(a);
  const double det = f.m.determinant();
  if (std::abs(std::abs(det) - 1.0) > 1e-8)
    throw StructureError("isometry: |det| of the intertwiner is " +
                         std::to_string(std::abs(det)));
  inv.eps = det > 0.0 ? 1 : -1;
  return inv;
}

AdjEigenspaces adj_eigenspaces(const FiniteIsometry& a) {
  const int d = 2 * a.n;
  AdjEigenspaces out;
  out.r = a.r;
  out.dim = d * d;

  const RMat adj = kron(a.matrix, a.matrix);
  const RMat t = transpose_op(d);
  const RMat p_so = 0.5 * (RMat::Identity(d * d, d * d) - t);
  const RMat p_jso = twisted_skew_projector(a.matrix);

  CMat sum = CMat::Zero(d * d, d * d);
  for (int j = 0; j < out.r; ++j) {
    CMat pi = resolvent(adj, out.r, j);
    out.idempotence = std::max(out.idempotence,
                               (pi * pi - pi).lpNorm<Eigen::Infinity>());
    sum += pi;
    out.rank_full.push_back(proj_rank(pi, "adjoint eigenspace"));
    out.rank_so.push_back(
        proj_rank(pi * p_so.cast<Cplx>(), "skew intersection"));
    out.rank_jso.push_back(
        proj_rank(pi * p_jso.cast<Cplx>(), "twisted skew intersection"));
    out.proj.push_back(std::move(pi));
  }
  out.resolution = (sum - CMat::Identity(d * d, d * d))
                       .lpNorm<Eigen::Infinity>();
  return out;
}

PowerSplitReport power_eigenspace_check(const FiniteIsometry& a, int power) {
  if (power < 1) throw InputError("power must be positive");
  const int d = 2 * a.n;
  const int r = a.r;

  PowerSplitReport rep;
  rep.power = power;
  rep.gcd = std::gcd(r, power);
  rep.suborder = r / rep.gcd;

  const RMat adj = kron(a.matrix, a.matrix);
  const RMat adj_pow = matpow(adj, power);
  const int jp = (power / rep.gcd) % rep.suborder;
  const int jp_inv = inv_mod(jp, rep.suborder);

  for (int l = 0; l < rep.suborder; ++l) {
    const CMat lhs = resolvent(adj_pow, rep.suborder, l);
    const int lp = (jp_inv * l) % rep.suborder;
    CMat rhs = CMat::Zero(d * d, d * d);
    for (int q = 0; q < rep.gcd; ++q)
      rhs += resolvent(adj, r, q * rep.suborder + lp);
    const double res = (lhs - rhs).lpNorm<Eigen::Infinity>();
    rep.residual_l.push_back(res);
    rep.max_residual = std::max(rep.max_residual, res);
  }
  return rep;
}

TangentSpace tangent_space(const FiniteIsometry& a, int power) {
  if (power < 1) throw InputError("power must be positive");
  const int d = 2 * a.n;
  const int r = a.r;

  TangentSpace out;
  out.power = power;

  const RMat basis = twisted_skew_basis(a.matrix);
  RMat stacked;
  if (power == 1) {
    stacked = power_diff_op(a.matrix, r) * basis;
  } else {
    stacked.resize(2 * d * d, basis.cols());
    stacked.topRows(d * d) = power_diff_op(a.matrix, r) * basis;
    stacked.bottomRows(d * d) = power_diff_op(a.matrix, power) * basis;
  }

  Eigen::JacobiSVD<RMat> svd(stacked, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > 1e-6) ++rank;
  out.dim_kernel = static_cast<int>(basis.cols()) - rank;
  out.basis = basis * svd.matrixV().rightCols(out.dim_kernel);

  // Structurally surviving twisted eigenspace blocks: everything off the
  // invariant block for the full family, the multiples of r/gcd for a fiber.
  const RMat adj = kron(a.matrix, a.matrix);
  const RMat p_jso = twisted_skew_projector(a.matrix);
  CMat q_sum = CMat::Zero(d * d, d * d);
  if (power == 1) {
    for (int q = 1; q < r; ++q)
      q_sum += resolvent(adj, r, q) * p_jso.cast<Cplx>();
  } else {
    const int g = std::gcd(r, power);
    const int sub = r / g;
    for (int q = 1; q < g; ++q)
      q_sum += resolvent(adj, r, q * sub) * p_jso.cast<Cplx>();
  }
  const double imag = q_sum.imag().lpNorm<Eigen::Infinity>();
  if (imag > 1e-8)
    throw StructureError("isometry: block projector has imaginary part " +
                         std::to_string(imag));
  const RMat q_real = q_sum.real();
  out.dim_blocks = proj_rank(q_sum, "tangent block");
  out.agreement = (out.basis * out.basis.transpose() - q_real)
                      .lpNorm<Eigen::Infinity>();
  return out;
}

}  // namespace ksym
