#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "generators.hpp"
#include "isonorm/foliation.hpp"
#include "isonorm/profile.hpp"

using namespace isonorm;
using doctest::Approx;

namespace {

std::vector<FoliationModel> models() {
  return {FoliationModel::d1(3), FoliationModel::d1(5), FoliationModel::d2(4, 2), FoliationModel::d2(6, 2),
          FoliationModel::d2(7, 3), FoliationModel::cartan3()};
}

Eigen::VectorXd random_unit(gen::Gen& g, int n) {
  std::normal_distribution<double> nd;
  Eigen::VectorXd u(n);
  for (int i = 0; i < n; ++i) u(i) = nd(g.rng());
  return u.normalized();
}

}  // namespace

TEST_CASE("model construction and parsing") {
  CHECK(FoliationModel::parse("d1:3").d() == 1);
  CHECK(FoliationModel::parse("d2:6:2").k() == 2);
  CHECK(FoliationModel::parse("cartan3").n() == 5);
  CHECK(FoliationModel::parse("d2:7:3").name() == "d2:7:3");
  for (const char* bad : {"d3:4", "d1:x", "d2:4", "d1:2", "d2:4:1", "d2:4:3", "cartan", ""})
    CHECK_THROWS_AS(FoliationModel::parse(bad), std::invalid_argument);
}

TEST_CASE("multiplicities and focal dimensions") {
  CHECK(FoliationModel::d1(5).multiplicities() == std::vector<int>{3});
  CHECK(FoliationModel::d1(5).focal_dimensions() == std::pair{0, 0});
  CHECK(FoliationModel::d2(7, 3).multiplicities() == std::vector<int>{3, 2});
  CHECK(FoliationModel::d2(7, 3).focal_dimensions() == std::pair{2, 3});
  CHECK(FoliationModel::cartan3().multiplicities() == std::vector<int>{1, 1, 1});
  CHECK(FoliationModel::cartan3().focal_dimensions() == std::pair{2, 2});
  for (const auto& m : models()) {
    int s = 0;
    for (int v : m.multiplicities()) s += v;
    CHECK(s == m.n() - 2);
  }
}

TEST_CASE("property: Cartan-Muenzner equations for the polynomials") {
  // |grad p|^2 = d^2 r^(2d-2), Laplacian p = (m2 - m1) d^2 r^(d-2) / 2
  gen::Gen g(31);
  for (const auto& m : models()) {
    const auto mult = m.multiplicities();
    const int d = m.d();
    const double m1 = mult[0], m2 = d == 1 ? mult[0] : mult[1];
    for (int rep = 0; rep < 20; ++rep) {
      const double r = g.uniform(0.5, 1.5);
      const Eigen::VectorXd x = r * random_unit(g, m.n());
      const Eigen::VectorXd gr = m.poly_gradient<double>(x);
      CHECK(gr.squaredNorm() == Approx(d * d * std::pow(r, 2 * d - 2)).epsilon(1e-12));
      const double h = 1e-4;
      double lap = 0.0;
      for (int i = 0; i < m.n(); ++i) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(m.n());
        e(i) = h;
        lap += (m.poly<double>(x + e) - 2 * m.poly<double>(x) + m.poly<double>(x - e)) / (h * h);
        // gradient against central differences
        CHECK(std::abs((m.poly<double>(x + e) - m.poly<double>(x - e)) / (2 * h) - gr(i)) < 1e-6);
      }
      const double expect = d == 1 ? 0.0 : 0.5 * (m2 - m1) * d * d * std::pow(r, d - 2);
      CHECK(std::abs(lap - expect) < 1e-5);
    }
  }
}

TEST_CASE("t coordinate") {
  const FoliationModel a = FoliationModel::d1(3);
  Eigen::VectorXd x(3);
  x << std::cos(0.7), std::sin(0.7) * 0.6, std::sin(0.7) * 0.8;
  CHECK(a.t_coord(2.0 * x).t == Approx(0.7).epsilon(1e-14));
  CHECK(a.t_coord(2.0 * x).r == Approx(2.0));

  const FoliationModel c = FoliationModel::cartan3();
  for (double s : {0.01, 0.3, 0.52, 0.9, 1.04}) {
    Eigen::VectorXd u(5);
    u << std::cos(s), 0, 0, 0, std::sin(s);
    CHECK(c.t_coord(u).t == Approx(s).epsilon(1e-11));
    CHECK(c.eval_poly(u) == Approx(std::cos(3 * s)).epsilon(1e-13));
  }
  CHECK_THROWS_AS(c.eval_poly(Eigen::VectorXd::Ones(5)), std::invalid_argument);
  CHECK_THROWS_AS(c.t_coord(Eigen::VectorXd::Zero(5)), std::invalid_argument);
  CHECK_THROWS_AS(c.t_coord(Eigen::VectorXd::Ones(4)), std::invalid_argument);
}

TEST_CASE("property: t is 0-homogeneous and cos(d t) = p(u)") {
  gen::Gen g(32);
  for (const auto& m : models())
    for (int rep = 0; rep < 30; ++rep) {
      const Eigen::VectorXd u = random_unit(g, m.n());
      const double t = m.t_coord(u).t;
      CHECK(t >= 0.0);
      CHECK(t <= m.half_period());
      CHECK(std::abs(m.t_coord(3.7 * u).t - t) < 1e-13);
      CHECK(std::abs(std::cos(m.d() * t) - m.eval_poly(u)) < 1e-12);
    }
}

TEST_CASE("property: normal plane basis") {
  gen::Gen g(33);
  for (const auto& m : models())
    for (int rep = 0; rep < 20; ++rep) {
      const double t = g.interior_t(m.d());
      const Eigen::VectorXd u = m.leaf_point(t, g.rng());
      CHECK(u.norm() == Approx(1.0));
      CHECK(m.t_coord(u).t == Approx(t).epsilon(1e-9));
      const NormalPlane np = m.normal_plane_basis(2.0 * u);
      CHECK(np.r == Approx(2.0));
      CHECK(std::abs(np.v1.norm() - 1) < 1e-12);
      CHECK(std::abs(np.v2.norm() - 1) < 1e-12);
      CHECK(std::abs(np.v1.dot(np.v2)) < 1e-12);
      CHECK((std::cos(t) * np.v1 + std::sin(t) * np.v2 - u).norm() < 1e-9);
      // the normal circle cuts through every leaf at its own angle
      for (double s : {0.12, 0.5 * m.half_period(), m.half_period() - 0.12}) {
        const Eigen::VectorXd y = std::cos(s) * np.v1 + std::sin(s) * np.v2;
        CHECK(m.t_coord(y).t == Approx(s).epsilon(1e-9));
      }
      CHECK(std::abs(m.eval_poly(np.v1) - 1.0) < 1e-9);
      // moving along w increases t
      const double h = 1e-6;
      const Eigen::VectorXd y = u + h * np.w;
      CHECK((m.t_coord(y).t - t) / h == Approx(1.0).epsilon(1e-4));
    }
}

TEST_CASE("focal guard") {
  const FoliationModel m = FoliationModel::cartan3();
  Eigen::VectorXd u(5);
  u << std::cos(0.01), 0, 0, 0, std::sin(0.01);
  CHECK_THROWS_AS(m.normal_plane_basis(u), FocalProximityError);
  CHECK_THROWS_AS(m.shape_spectrum(u), FocalProximityError);
  CHECK_NOTHROW(m.normal_plane_basis(u, 0.005));
  u << std::cos(1.04), 0, 0, 0, std::sin(1.04);
  CHECK_THROWS_AS(m.normal_plane_basis(u), FocalProximityError);
}

TEST_CASE("property: shape spectrum is cot(t + k pi / d) with the right multiplicities") {
  gen::Gen g(34);
  for (const auto& m : models())
    for (int rep = 0; rep < 10; ++rep) {
      const double t = g.interior_t(m.d());
      const Eigen::VectorXd u = m.leaf_point(t, g.rng());
      const auto spec = m.shape_spectrum(u);
      const auto mult = m.multiplicities();
      REQUIRE(spec.size() == mult.size());
      for (const auto& e : spec) {
        CHECK(e.multiplicity == mult[static_cast<std::size_t>(e.k)]);
        CHECK(e.kappa_exact == Approx(1.0 / std::tan(t + e.k * kPi / m.d())).epsilon(1e-8));
        CHECK(std::abs(e.kappa - e.kappa_exact) < 1e-5 * std::max(1.0, std::abs(e.kappa_exact)));
        CHECK(e.basis.rows() == m.n());
        CHECK(e.basis.cols() == e.multiplicity);
        // eigenvectors are tangent to the leaf
        CHECK(e.basis.transpose().cwiseAbs().maxCoeff() <= 1.0 + 1e-12);
        CHECK((e.basis.transpose() * u).norm() < 1e-8);
        CHECK((e.basis.transpose() * e.basis - Eigen::MatrixXd::Identity(e.multiplicity, e.multiplicity)).norm() < 1e-8);
      }
    }
}

TEST_CASE("fold angle") {
  CHECK(fold_angle(0.3, 3) == Approx(0.3));
  CHECK(fold_angle(-0.3, 3) == Approx(0.3));
  CHECK(fold_angle(2 * kPi / 3 + 0.2, 3) == Approx(0.2));
  CHECK(fold_angle(2 * kPi / 3 - 0.2, 3) == Approx(0.2));
  CHECK(fold_angle(kPi, 1) == Approx(kPi));
}
