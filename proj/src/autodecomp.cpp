#include "ksym/autodecomp.hpp"

#include <cmath>

#include <Eigen/SVD>

namespace ksym {

double automorphism_residual(const LieAlgebra& g, const RMat& m) {
  const int n = g.dim;
  double r = 0.0;
  RVec ei = RVec::Zero(n), ej = RVec::Zero(n);
  for (int i = 0; i < n; ++i) {
    ei.setZero();
    ei[i] = 1.0;
    const RVec ti = m.col(i);
    for (int j = 0; j < n; ++j) {
      ej.setZero();
      ej[j] = 1.0;
      const RVec lhs = m * g.bracket(ei, ej);
      const RVec rhs = g.bracket(ti, RVec(m.col(j)));
      r = std::max(r, (lhs - rhs).lpNorm<Eigen::Infinity>());
    }
  }
  return r;
}

int minimal_power_identity(const RMat& m, int max_order, double tol) {
  const RMat id = RMat::Identity(m.rows(), m.cols());
  RMat p = m;
  for (int k = 1; k <= max_order; ++k) {
    if ((p - id).lpNorm<Eigen::Infinity>() < tol) return k;
    p = m * p;
  }
  return 0;
}

FiniteOrderAutomorphism make_automorphism(std::shared_ptr<const LieAlgebra> g,
                                          RMat m, int order, double tol) {
  if (m.rows() != g->dim || m.cols() != g->dim)
    throw InputError("automorphism: matrix shape does not match algebra");
  const double ar = automorphism_residual(*g, m);
  if (ar > tol)
    throw StructureError("automorphism: bracket equivariance fails, residual " +
                         std::to_string(ar));
  const int found = minimal_power_identity(m, order, tol);
  if (found == 0)
    throw StructureError("automorphism: map^order != Id");
  if (found != order)
    throw StructureError("automorphism: order " + std::to_string(order) +
                         " not minimal, Id reached at power " + std::to_string(found));
  return {std::move(g), std::move(m), order};
}

FiniteOrderAutomorphism make_automorphism(LieAlgebra g, RMat m, int order,
                                          double tol) {
  return make_automorphism(std::make_shared<const LieAlgebra>(std::move(g)),
                           std::move(m), order, tol);
}

CMat eigenprojector(const FiniteOrderAutomorphism& tau, int j) {
  const int n = tau.algebra->dim;
  const int kp = tau.order;
  const Cplx omega = std::polar(1.0, 2.0 * M_PI / kp);
  CMat p = CMat::Zero(n, n);
  RMat power = RMat::Identity(n, n);
  for (int l = 0; l < kp; ++l) {
    const Cplx w = std::pow(omega, Cplx(static_cast<double>(-j * l)));
    p += (w / static_cast<double>(kp)) * power.cast<Cplx>();
    power = tau.map * power;
  }
  return p;
}

RMat orthonormal_columns(const RMat& a, double tol) {
  if (a.cols() == 0) return RMat(a.rows(), 0);
  Eigen::ColPivHouseholderQR<RMat> qr(a);
  const RMat r = qr.matrixR();
  int rank = 0;
  const double gate = std::max(tol, 1e-12) * std::max(1.0, std::abs(r(0, 0)));
  for (int i = 0; i < std::min(r.rows(), r.cols()); ++i)
    if (std::abs(r(i, i)) > gate) ++rank;
  RMat q = qr.householderQ();
  return q.leftCols(rank);
}

CMat projector_image(const CMat& p) {
  Eigen::JacobiSVD<CMat> svd(p, Eigen::ComputeThinU);
  int rank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] > 0.5) ++rank;
  return svd.matrixU().leftCols(rank);
}

const CMat& GradedDecomposition::P(int j) const {
  int r = j % kprime;
  if (r < 0) r += kprime;
  return projectors[static_cast<std::size_t>(r)];
}

int GradedDecomposition::dim_gj(int j) const {
  const CMat b = projector_image(P(j));
  return static_cast<int>(b.cols());
}

int GradedDecomposition::m_count() const {
  return even() ? kprime / 2 - 1 : (kprime - 1) / 2;
}

GradedDecomposition grade(const FiniteOrderAutomorphism& tau, double tol) {
  GradedDecomposition d;
  d.algebra = tau.algebra;
  d.kprime = tau.order;
  d.omega = std::polar(1.0, 2.0 * M_PI / tau.order);
  d.tau = tau.map;
  d.projectors.reserve(tau.order);
  for (int j = 0; j < tau.order; ++j) d.projectors.push_back(eigenprojector(tau, j));

  // g_0 and (even) g_k are conjugation-stable; their real points are spanned by
  // the real and imaginary parts of any complex basis.
  const auto real_points = [&](const CMat& b) {
    RMat cand(b.rows(), 2 * b.cols());
    cand << b.real(), b.imag();
    return orthonormal_columns(cand, tol);
  };
  d.basis_g0 = real_points(projector_image(d.P(0)));
  if (d.even()) d.basis_gk = real_points(projector_image(d.P(d.kprime / 2)));
  else d.basis_gk = RMat(tau.algebra->dim, 0);

  for (int j = 1; j <= d.m_count(); ++j) {
    // m_j is the real form of g_{-j} + g_{+j}; Re/Im of a basis of g_{-j}.
    const CMat b = projector_image(d.P(-j));
    RMat cand(b.rows(), 2 * b.cols());
    for (int c = 0; c < b.cols(); ++c) {
      cand.col(2 * c) = std::sqrt(2.0) * b.col(c).real();
      cand.col(2 * c + 1) = std::sqrt(2.0) * b.col(c).imag();
    }
    d.basis_mj.push_back(orthonormal_columns(cand, tol));
  }
  return d;
}

double DecompositionResiduals::max() const {
  double m = idempotence;
  m = std::max(m, resolution);
  m = std::max(m, equivariance);
  m = std::max(m, reality);
  m = std::max(m, grading);
  return m;
}

DecompositionResiduals decomposition_residuals(const GradedDecomposition& d) {
  DecompositionResiduals r;
  const int n = d.algebra->dim;
  const int kp = d.kprime;
  CMat sum = CMat::Zero(n, n);
  for (int j = 0; j < kp; ++j) {
    const CMat& p = d.P(j);
    sum += p;
    r.idempotence = std::max(r.idempotence, (p * p - p).cwiseAbs().maxCoeff());
    const Cplx wj = std::pow(d.omega, Cplx(static_cast<double>(j)));
    r.equivariance = std::max(
        r.equivariance, (d.tau.cast<Cplx>() * p - wj * p).cwiseAbs().maxCoeff());
    r.reality = std::max(r.reality, (p.conjugate() - d.P(-j)).cwiseAbs().maxCoeff());
  }
  r.resolution = (sum - CMat::Identity(n, n)).cwiseAbs().maxCoeff();

  CVec ea = CVec::Zero(n), eb = CVec::Zero(n);
  for (int i = 0; i < kp; ++i)
    for (int j = 0; j < kp; ++j) {
      const CMat& pij = d.P(i + j);
      for (int a = 0; a < n; ++a) {
        ea.setZero();
        ea[a] = 1.0;
        const CVec xa = d.P(i) * ea;
        for (int b = 0; b < n; ++b) {
          eb.setZero();
          eb[b] = 1.0;
          const CVec v = d.algebra->bracket(xa, CVec(d.P(j) * eb));
          const CVec w = v - pij * v;
          r.grading = std::max(r.grading, w.cwiseAbs().maxCoeff());
        }
      }
    }
  return r;
}

bool effectivity(const GradedDecomposition& d, double tol) {
  const int n = d.algebra->dim;
  const int d0 = static_cast<int>(d.basis_g0.cols());
  if (d0 == 0) return true;
  // Complement basis: everything the non-zero eigenspaces span.
  RMat comp(n, 0);
  {
    std::vector<RMat> blocks;
    for (const auto& b : d.basis_mj) blocks.push_back(b);
    if (d.basis_gk.cols() > 0) blocks.push_back(d.basis_gk);
    int total = 0;
    for (const auto& b : blocks) total += static_cast<int>(b.cols());
    comp.resize(n, total);
    int at = 0;
    for (const auto& b : blocks) {
      comp.middleCols(at, static_cast<int>(b.cols())) = b;
      at += static_cast<int>(b.cols());
    }
  }
  const int dn = static_cast<int>(comp.cols());
  if (dn == 0) return false;
  RMat stacked(n * dn, d0);
  for (int v = 0; v < d0; ++v) {
    const RMat adv = d.algebra->ad(RVec(d.basis_g0.col(v)));
    const RMat onn = adv * comp;
    for (int c = 0; c < dn; ++c)
      stacked.block(n * c, v, n, 1) = onn.col(c);
  }
  Eigen::JacobiSVD<RMat> svd(stacked);
  const auto& sv = svd.singularValues();
  return sv.size() >= d0 && sv[d0 - 1] > tol;
}

const char* to_string(SystemKind k) {
  switch (k) {
    case SystemKind::Primitive: return "primitive";
    case SystemKind::MinimalDetermined: return "minimal_determined";
    case SystemKind::IntermediateDetermined: return "intermediate_determined";
    case SystemKind::MaximalDetermined: return "maximal_determined";
    case SystemKind::Underdetermined: return "underdetermined";
  }
  return "?";
}

SystemClass classify_system(int m, int kprime) {
  if (m < 0 || kprime < 1) throw InputError("classify_system: bad arguments");
  SystemClass s;
  s.m = m;
  s.kprime = kprime;
  s.m_threshold = kprime == 1 ? 0 : (kprime + 1) / 2;
  if (m >= kprime) {
    s.kind = SystemKind::Underdetermined;
    return s;
  }
  if (m < s.m_threshold) {
    s.kind = SystemKind::Primitive;
    return s;
  }
  s.minimal_determined = (m == s.m_threshold);
  s.maximal_determined = (m == kprime - 1);
  if (s.maximal_determined) s.kind = SystemKind::MaximalDetermined;
  else if (s.minimal_determined) s.kind = SystemKind::MinimalDetermined;
  else s.kind = SystemKind::IntermediateDetermined;
  return s;
}

LiftedSystem underdetermined_lift(const LieAlgebra& g, const RMat& tau,
                                  int kprime, int m) {
  if (m < kprime)
    throw InputError("underdetermined_lift: m < k', lift undefined");
  const int q = m / kprime;
  const int n = g.dim;
  const int nb = n * (q + 1);
  LiftedSystem out;
  out.q = q;
  out.algebra.dim = nb;
  out.algebra.labels.resize(nb);
  for (int blk = 0; blk <= q; ++blk)
    for (int i = 0; i < n; ++i)
      out.algebra.labels[blk * n + i] = g.labels[i] + "_" + std::to_string(blk);
  out.algebra.c.assign(static_cast<std::size_t>(nb) * nb * nb, 0.0);
  for (int blk = 0; blk <= q; ++blk)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          out.algebra.c[(static_cast<std::size_t>(blk * n + i) * nb + blk * n + j) * nb +
                        blk * n + k] = g.cijk(i, j, k);
  out.matrix = RMat::Zero(nb, nb);
  for (int blk = 0; blk < q; ++blk)
    out.matrix.block(blk * n, (blk + 1) * n, n, n) = RMat::Identity(n, n);
  out.matrix.block(q * n, 0, n, n) = tau;
  out.order = (q + 1) * kprime;
  const int found = minimal_power_identity(out.matrix, out.order);
  if (found != out.order)
    throw StructureError("underdetermined_lift: shift automorphism order mismatch");
  return out;
}

}  // namespace ksym
