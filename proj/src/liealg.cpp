#include "ksym/liealg.hpp"

#include <cmath>

#include "ksym/kernels.hpp"

namespace ksym {

RVec LieAlgebra::bracket(const RVec& x, const RVec& y) const {
  RVec out = RVec::Zero(dim);
  kern::active_kernel()(x.data(), y.data(), c.data(), dim, 1.0, out.data());
  return out;
}

void LieAlgebra::bracket_accum(const RVec& x, const RVec& y, double scale,
                               RVec& out) const {
  kern::active_kernel()(x.data(), y.data(), c.data(), dim, scale, out.data());
}

// Complex bracket as four real contractions; keeps the kernel the single
// code path for every bracket in the library.
CVec LieAlgebra::bracket(const CVec& x, const CVec& y) const {
  CVec out = CVec::Zero(dim);
  bracket_accum(x, y, Cplx(1.0, 0.0), out);
  return out;
}

void LieAlgebra::bracket_accum(const CVec& x, const CVec& y, Cplx scale,
                               CVec& out) const {
  const RVec xr = x.real(), xi = x.imag(), yr = y.real(), yi = y.imag();
  RVec re = RVec::Zero(dim), im = RVec::Zero(dim);
  auto k = kern::active_kernel();
  k(xr.data(), yr.data(), c.data(), dim, 1.0, re.data());
  k(xi.data(), yi.data(), c.data(), dim, -1.0, re.data());
  k(xr.data(), yi.data(), c.data(), dim, 1.0, im.data());
  k(xi.data(), yr.data(), c.data(), dim, 1.0, im.data());
  for (int a = 0; a < dim; ++a) out[a] += scale * Cplx(re[a], im[a]);
}

RMat LieAlgebra::ad(const RVec& x) const {
  RMat m(dim, dim);
  for (int j = 0; j < dim; ++j)
    for (int k = 0; k < dim; ++k) {
      double s = 0.0;
      for (int i = 0; i < dim; ++i) s += x[i] * cijk(i, j, k);
      m(k, j) = s;
    }
  return m;
}

CMat LieAlgebra::ad(const CVec& x) const {
  CMat m(dim, dim);
  for (int j = 0; j < dim; ++j)
    for (int k = 0; k < dim; ++k) {
      Cplx s = 0.0;
      for (int i = 0; i < dim; ++i) s += x[i] * cijk(i, j, k);
      m(k, j) = s;
    }
  return m;
}

double LieAlgebra::antisymmetry_residual() const {
  double r = 0.0;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      for (int k = 0; k < dim; ++k)
        r = std::max(r, std::abs(cijk(i, j, k) + cijk(j, i, k)));
  return r;
}

double LieAlgebra::jacobi_residual() const {
  double r = 0.0;
  RVec ei = RVec::Zero(dim), ej = RVec::Zero(dim), ek = RVec::Zero(dim);
  for (int i = 0; i < dim; ++i) {
    ei.setZero();
    ei[i] = 1.0;
    for (int j = 0; j < dim; ++j) {
      ej.setZero();
      ej[j] = 1.0;
      const RVec bij = bracket(ei, ej);
      for (int k = 0; k < dim; ++k) {
        ek.setZero();
        ek[k] = 1.0;
        RVec s = bracket(bij, ek);
        s += bracket(bracket(ej, ek), ei);
        s += bracket(bracket(ek, ei), ej);
        r = std::max(r, s.lpNorm<Eigen::Infinity>());
      }
    }
  }
  return r;
}

double LieAlgebra::killing(const RVec& x, const RVec& y) const {
  return (ad(x) * ad(y)).trace();
}

RMat LieAlgebra::killing_matrix() const {
  std::vector<RMat> ads(dim);
  RVec e = RVec::Zero(dim);
  for (int a = 0; a < dim; ++a) {
    e.setZero();
    e[a] = 1.0;
    ads[a] = ad(e);
  }
  RMat K(dim, dim);
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b) K(a, b) = (ads[a] * ads[b]).trace();
  return K;
}

double LieAlgebra::killing_invariance_residual() const {
  const RMat K = killing_matrix();
  double r = 0.0;
  RVec ez = RVec::Zero(dim), ex = RVec::Zero(dim), ey = RVec::Zero(dim);
  for (int z = 0; z < dim; ++z) {
    ez.setZero();
    ez[z] = 1.0;
    for (int x = 0; x < dim; ++x) {
      ex.setZero();
      ex[x] = 1.0;
      const RVec zx = bracket(ez, ex);
      for (int y = 0; y < dim; ++y) {
        ey.setZero();
        ey[y] = 1.0;
        const RVec zy = bracket(ez, ey);
        const double v = zx.dot(K.col(y)) + K.row(x).dot(zy);
        r = std::max(r, std::abs(v));
      }
    }
  }
  return r;
}

bool AlgebraElement::is_real(double tol) const {
  return coords.imag().lpNorm<Eigen::Infinity>() <= tol;
}

AlgebraElement bracket(const AlgebraElement& x, const AlgebraElement& y) {
  if (x.algebra == nullptr || y.algebra == nullptr)
    throw InputError("bracket: element without algebra");
  if (x.algebra != y.algebra)
    throw InputError("bracket: elements belong to different algebras");
  if (x.coords.size() != x.algebra->dim || y.coords.size() != y.algebra->dim)
    throw InputError("bracket: coordinate length does not match algebra dimension");
  return {x.algebra, x.algebra->bracket(x.coords, y.coords)};
}

LieAlgebra abelian_algebra(int dim) {
  LieAlgebra g;
  g.dim = dim;
  g.labels.resize(dim);
  for (int i = 0; i < dim; ++i) g.labels[i] = "e" + std::to_string(i + 1);
  g.c.assign(static_cast<std::size_t>(dim) * dim * dim, 0.0);
  return g;
}

}  // namespace ksym
