#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ksym/autodecomp.hpp"
#include "ksym/jsonio.hpp"

using namespace ksym;

namespace {

FiniteOrderAutomorphism load_tau(const std::string& name) {
  const AutomorphismFixture f =
      load_automorphism_fixture(fixture_dir() + "/" + name);
  return make_automorphism(f.algebra, f.matrix, f.order);
}

}  // namespace

TEST_CASE("construction rejects shape, equivariance and order failures") {
  const LieAlgebra g = algebra_from_json(load_json_file(fixture_dir() + "/su2.json"));
  CHECK_THROWS_AS(make_automorphism(g, RMat::Identity(2, 2), 1), InputError);
  RMat bad = RMat::Identity(3, 3);
  bad(2, 2) = 2.0;  // scales one side of [e1,e2]=e3 only
  CHECK_THROWS_AS(make_automorphism(g, bad, 1), StructureError);
  CHECK_THROWS_AS(make_automorphism(g, RMat::Identity(3, 3), 2), StructureError);
  CHECK_NOTHROW(make_automorphism(g, RMat::Identity(3, 3), 1));
}

TEST_CASE("involution splits the cyclic algebra into 1 + 2") {
  const auto tau = load_tau("su2_involution.json");
  const GradedDecomposition d = grade(tau);
  CHECK(d.kprime == 2);
  CHECK(d.even());
  CHECK(d.m_count() == 0);
  CHECK(d.dim_gj(0) == 1);
  CHECK(d.dim_gj(1) == 2);
  CHECK(d.basis_g0.cols() == 1);
  CHECK(d.basis_gk.cols() == 2);
  CHECK(decomposition_residuals(d).max() < 1e-12);
  CHECK(effectivity(d));
}

TEST_CASE("order three inner automorphism has eigenspace ranks 2,3,3") {
  const auto tau = load_tau("su3_order3.json");
  const GradedDecomposition d = grade(tau);
  CHECK(d.kprime == 3);
  CHECK_FALSE(d.even());
  CHECK(d.m_count() == 1);
  CHECK(d.dim_gj(0) == 2);
  CHECK(d.dim_gj(1) == 3);
  CHECK(d.dim_gj(2) == 3);
  CHECK(d.basis_g0.cols() == 2);
  REQUIRE(d.basis_mj.size() == 1);
  CHECK(d.basis_mj[0].cols() == 6);
  const DecompositionResiduals r = decomposition_residuals(d);
  CHECK(r.idempotence < 1e-12);
  CHECK(r.resolution < 1e-12);
  CHECK(r.equivariance < 1e-12);
  CHECK(r.reality < 1e-12);
  CHECK(r.grading < 1e-12);
  CHECK(effectivity(d));
}

TEST_CASE("order four inner automorphism splits as 2,2,2,2") {
  const auto tau = load_tau("su3_order4.json");
  const GradedDecomposition d = grade(tau);
  CHECK(d.kprime == 4);
  CHECK(d.m_count() == 1);
  for (int j = 0; j < 4; ++j) CHECK(d.dim_gj(j) == 2);
  CHECK(d.basis_g0.cols() == 2);
  REQUIRE(d.basis_mj.size() == 1);
  CHECK(d.basis_mj[0].cols() == 4);
  CHECK(d.basis_gk.cols() == 2);
  CHECK(decomposition_residuals(d).max() < 1e-12);
}

TEST_CASE("order five inner automorphism splits as 2,1,2,2,1") {
  const auto tau = load_tau("su3_order5.json");
  const GradedDecomposition d = grade(tau);
  CHECK(d.kprime == 5);
  CHECK(d.m_count() == 2);
  CHECK(d.dim_gj(0) == 2);
  CHECK(d.dim_gj(1) == 1);
  CHECK(d.dim_gj(2) == 2);
  CHECK(d.dim_gj(3) == 2);
  CHECK(d.dim_gj(4) == 1);
  REQUIRE(d.basis_mj.size() == 2);
  CHECK(d.basis_mj[0].cols() == 2);  // from the -1 eigenspace, complex dim 1
  CHECK(d.basis_mj[1].cols() == 4);
  CHECK(d.basis_gk.cols() == 0);
  CHECK(decomposition_residuals(d).max() < 1e-12);
  CHECK(effectivity(d));
}

TEST_CASE("projector index wraps modulo the order") {
  const auto tau = load_tau("su3_order3.json");
  const GradedDecomposition d = grade(tau);
  CHECK((d.P(-1) - d.P(2)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((d.P(4) - d.P(1)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("rotation automorphism of an abelian plane has empty fixed part") {
  LieAlgebra g = abelian_algebra(2);
  RMat rot(2, 2);
  rot << 0, -1, 1, 0;
  const auto tau = make_automorphism(g, rot, 4);
  const GradedDecomposition d = grade(tau);
  CHECK(d.dim_gj(0) == 0);
  CHECK(d.dim_gj(1) == 1);
  CHECK(d.dim_gj(2) == 0);
  CHECK(d.dim_gj(3) == 1);
  CHECK(d.basis_g0.cols() == 0);
  CHECK(d.basis_gk.cols() == 0);
  REQUIRE(d.basis_mj.size() == 1);
  CHECK(d.basis_mj[0].cols() == 2);
  CHECK(decomposition_residuals(d).max() < 1e-14);
  CHECK(effectivity(d));  // vacuous: nothing in the zero component
}

TEST_CASE("identity automorphism is not effective on a nonabelian algebra") {
  const LieAlgebra g = algebra_from_json(load_json_file(fixture_dir() + "/su2.json"));
  const auto tau = make_automorphism(g, RMat::Identity(3, 3), 1);
  const GradedDecomposition d = grade(tau);
  CHECK(d.m_count() == 0);
  CHECK(d.basis_g0.cols() == 3);
  CHECK_FALSE(effectivity(d));
}

TEST_CASE("system classification thresholds") {
  auto kindof = [](int m, int kp) { return classify_system(m, kp).kind; };

  CHECK(kindof(0, 2) == SystemKind::Primitive);
  // Single-point determined band: reported as maximal, minimal flag also set.
  CHECK(kindof(1, 2) == SystemKind::MaximalDetermined);
  CHECK(classify_system(1, 2).minimal_determined);
  CHECK(kindof(2, 2) == SystemKind::Underdetermined);

  CHECK(kindof(1, 3) == SystemKind::Primitive);
  CHECK(kindof(2, 3) == SystemKind::MaximalDetermined);
  CHECK(classify_system(2, 3).minimal_determined);
  CHECK(kindof(3, 3) == SystemKind::Underdetermined);

  CHECK(classify_system(2, 4).m_threshold == 2);
  CHECK(kindof(2, 4) == SystemKind::MinimalDetermined);
  CHECK_FALSE(classify_system(2, 4).maximal_determined);
  CHECK(kindof(3, 4) == SystemKind::MaximalDetermined);

  CHECK(kindof(2, 5) == SystemKind::Primitive);
  CHECK(kindof(3, 5) == SystemKind::MinimalDetermined);
  CHECK(kindof(4, 5) == SystemKind::MaximalDetermined);
  CHECK(kindof(7, 5) == SystemKind::Underdetermined);

  CHECK(classify_system(3, 7).m_threshold == 4);
  CHECK(kindof(3, 7) == SystemKind::Primitive);
  CHECK(kindof(4, 7) == SystemKind::MinimalDetermined);
  CHECK(kindof(5, 7) == SystemKind::IntermediateDetermined);
  CHECK(kindof(6, 7) == SystemKind::MaximalDetermined);

  // Order one: only m = 0 fits in the determined band.
  CHECK(classify_system(0, 1).m_threshold == 0);
  CHECK(kindof(0, 1) == SystemKind::MaximalDetermined);
  CHECK(classify_system(0, 1).minimal_determined);
  CHECK(kindof(1, 1) == SystemKind::Underdetermined);

  CHECK_THROWS_AS(classify_system(-1, 3), InputError);
}

TEST_CASE("underdetermined lift produces the cyclic shift of the right order") {
  const auto tau2 = load_tau("su2_involution.json");
  CHECK_THROWS_AS(underdetermined_lift(*tau2.algebra, tau2.map, 2, 1), InputError);

  const LiftedSystem l = underdetermined_lift(*tau2.algebra, tau2.map, 2, 2);
  CHECK(l.q == 1);
  CHECK(l.order == 4);
  CHECK(l.algebra.dim == 6);
  CHECK(l.algebra.jacobi_residual() < 1e-14);
  CHECK(automorphism_residual(l.algebra, l.matrix) < 1e-12);

  // m = 3 sits in the same window [k', 2k'), so the lift is the same size.
  CHECK(underdetermined_lift(*tau2.algebra, tau2.map, 2, 3).order == 4);
}

TEST_CASE("lift of an order three automorphism at m = 7 has order 9") {
  const auto tau3 = load_tau("su3_order3.json");
  const LiftedSystem l = underdetermined_lift(*tau3.algebra, tau3.map, 3, 7);
  CHECK(l.q == 2);
  CHECK(l.order == 9);
  CHECK(l.algebra.dim == 24);

  const auto lifted = make_automorphism(l.algebra, l.matrix, l.order);
  const GradedDecomposition d = grade(lifted);
  int total = 0;
  for (int j = 0; j < 9; ++j) total += d.dim_gj(j);
  CHECK(total == 24);
  CHECK(decomposition_residuals(d).grading < 1e-12);
}

TEST_CASE("lift of the identity at m = 1 is the two block swap") {
  const LieAlgebra g = algebra_from_json(load_json_file(fixture_dir() + "/su2.json"));
  const LiftedSystem l = underdetermined_lift(g, RMat::Identity(3, 3), 1, 1);
  CHECK(l.q == 1);
  CHECK(l.order == 2);
  RMat swap = RMat::Zero(6, 6);
  swap.block(0, 3, 3, 3) = RMat::Identity(3, 3);
  swap.block(3, 0, 3, 3) = RMat::Identity(3, 3);
  CHECK((l.matrix - swap).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("even order four case brackets m into the fixed plus middle part") {
  // tau^2 acts as -Id on m_1 here, so [m, m] lands in g_0 + g_2.
  const auto tau = load_tau("su3_order4.json");
  const GradedDecomposition d = grade(tau);
  const int n = d.algebra->dim;
  RMat h(n, d.basis_g0.cols() + d.basis_gk.cols());
  h << d.basis_g0, d.basis_gk;
  const RMat proj = h * h.transpose();  // columns orthonormal
  const RMat& m1 = d.basis_mj[0];
  for (int a = 0; a < m1.cols(); ++a)
    for (int b = 0; b < m1.cols(); ++b) {
      const RVec w = d.algebra->bracket(RVec(m1.col(a)), RVec(m1.col(b)));
      CHECK((w - proj * w).lpNorm<Eigen::Infinity>() < 1e-12);
    }
}

TEST_CASE("blocks of the product algebra commute with each other") {
  const auto tau2 = load_tau("su2_involution.json");
  const LiftedSystem l = underdetermined_lift(*tau2.algebra, tau2.map, 2, 2);
  RVec x = RVec::Zero(6), y = RVec::Zero(6);
  x[0] = 1.0;  // block 0
  y[4] = 1.0;  // block 1
  CHECK(l.algebra.bracket(x, y).lpNorm<Eigen::Infinity>() == 0.0);
}
