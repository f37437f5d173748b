#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "generators.hpp"
#include "isonorm/isometry.hpp"

using namespace isonorm;
using doctest::Approx;

namespace {

double max_res(const IsometryTriple& tr) { return max_ode_residual(tr, 512); }

IsometryTriple legendre_triple(const Profile& f) {
  return {f, dual_profile(PlanarNorm(f), 1024, kGlueFitTerms), ThetaMap::legendre()};
}

Profile cartan_base(double eps = 0.005) {
  return Profile::cosine(3, {0.5 + 10 * eps / 32, 0, 15 * eps / 32, 0, 6 * eps / 32, 0, eps / 32});
}

std::vector<Sector> two_sectors() {
  return {{0.0, kPi / 6, SectorMode::Scale, 1.0}, {kPi / 6, kPi / 3, SectorMode::LegendreScale, 1.0}};
}

}  // namespace

TEST_CASE("monotone cubic") {
  std::vector<double> x = linspace(0.0, kPi / 2, 41), y;
  for (double t : x) y.push_back(t + 0.1 * std::sin(4 * t));
  const MonotoneCubic c(2, x, y);
  CHECK(c.value(0.0) == 0.0);
  CHECK(c.value(kPi / 2) == Approx(kPi / 2));
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(c.value(x[i]) == Approx(y[i]).epsilon(1e-14));
  const auto ts = linspace(-3.0, 3.0, 999);
  for (std::size_t i = 1; i < ts.size(); ++i) CHECK(c.value(ts[i]) > c.value(ts[i - 1]));
  for (double t : {0.3, 1.1, -0.4}) {
    CHECK(c.value(-t) == Approx(-c.value(t)));
    CHECK(c.value(t + kPi) == Approx(c.value(t) + kPi));
    CHECK(std::abs(c.value(t) - (t + 0.1 * std::sin(4 * t))) < 1e-4);
    const double h = 1e-6;
    CHECK((c.value(t + h) - c.value(t - h)) / (2 * h) == Approx(c.derivative(t)).epsilon(1e-6));
  }
  // the sampled curve is odd about the fixed points, so the symmetric slope is the secant
  CHECK(c.endpoint_derivative_mismatch() < 0.05);

  // exact slopes reproduce a smooth map to fourth order
  std::vector<double> m;
  for (double t : x) m.push_back(1 + 0.4 * std::cos(4 * t));
  const MonotoneCubic e(2, x, y, m);
  for (double t : {0.3, 1.1}) {
    CHECK(std::abs(e.value(t) - (t + 0.1 * std::sin(4 * t))) < 1e-6);
    CHECK(std::abs(e.derivative(t) - (1 + 0.4 * std::cos(4 * t))) < 1e-4);
  }

  CHECK_THROWS_AS(MonotoneCubic(2, x, std::vector<double>(x.size(), 0.0)), std::invalid_argument);
  y[0] = 0.1;
  CHECK_THROWS_AS(MonotoneCubic(2, x, y), std::invalid_argument);
}

TEST_CASE("theta maps: derivatives agree with FD") {
  const Profile f = Profile::cosine(2, {0.6, 0.1, 0.02});
  std::vector<ThetaMap> maps{ThetaMap::identity(), ThetaMap::linear(1.0, 1.7), ThetaMap::legendre(),
                             ThetaMap::scaled(1.0, 0.6)};
  for (const auto& th : maps)
    for (double t : {0.2, 0.9, 1.4, -2.0}) {
      const double h = 1e-6;
      CHECK((th.value(f, t + h) - th.value(f, t - h)) / (2 * h) == Approx(th.derivative(f, t)).epsilon(1e-7));
    }
  // linear maps fix the coordinate axes
  CHECK(ThetaMap::linear(1.0, 3.0).value(f, kPi / 2) == Approx(kPi / 2));
  CHECK(std::string(to_string(ThetaKind::ScaledLegendre)) == "ScaledLegendre");
  CHECK_THROWS_AS(ThetaMap::linear(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ThetaMap::scaled(1.0, -1.0), std::invalid_argument);
}

TEST_CASE("property: identity, scalar and Legendre triples solve every equation") {
  gen::Gen g(51);
  int resolved = 0;
  for (int rep = 0; rep < 12; ++rep) {
    const int d = g.d_value();
    const Profile f = g.valid_profile(d, 4, 0.25 / d);
    CHECK(max_res({f, f, ThetaMap::identity()}) < 1e-12);
    CHECK(max_res({f, f.scaled(g.uniform(0.3, 3.0)), ThetaMap::identity()}) < 1e-12);
    const IsometryTriple L = legendre_triple(f);
    CHECK(ode_residuals(L, 0.3 / d).size() == static_cast<std::size_t>(d) + 1);
    // the second-order equation sees h'', so fit error in the dual shows up amplified
    if (L.h.fit_residual() < 1e-12) {
      ++resolved;
      CHECK(max_res(L) < 1e-6);
    }
  }
  CHECK(resolved >= 6);
}

TEST_CASE("non-isometries have visible residuals") {
  const Profile f = Profile::cosine(2, {0.6, 0.1, 0.02});
  CHECK(max_res({f, f, ThetaMap::linear(1.0, 2.0)}) > 1e-2);
  CHECK(max_res({f, Profile::constant(2, 0.5), ThetaMap::identity()}) > 1e-2);
  CHECK_THROWS_AS(ode_residuals({f, Profile::constant(1, 0.5), ThetaMap::identity()}, 0.3), std::invalid_argument);
}

TEST_CASE("property: both roots solve the quadratic") {
  gen::Gen g(52);
  for (int rep = 0; rep < 100; ++rep) {
    const int d = g.d_value();
    const Profile f = g.valid_profile(d, 4, 0.25);
    const double t = g.interior_t(d), th = g.interior_t(d);
    QuadraticRoots q;
    try {
      q = quadratic_and_roots(f, t, th);
    } catch (const std::domain_error&) {
      continue;
    }
    for (double r : q.roots) CHECK(std::abs(q.A * r * r + q.B * r + q.C) < 1e-10);
    CHECK(std::abs(q.discriminant - q.discriminant_closed) < 1e-9 * std::max(1.0, std::abs(q.discriminant)));
    CHECK(q.outside_d_gt_2 == (d <= 2));
  }
}

TEST_CASE("roots are the two branch right-hand sides") {
  const Profile f = Profile::cosine(3, {0.5, 0.03, -0.004});
  const double t = 0.4;
  const double th = theta_legendre(f, t);
  const auto q = quadratic_and_roots(f, t, th);
  CHECK(q.roots[1] == Approx(theta_legendre_derivative(f, t)).epsilon(1e-10));
  const auto qi = quadratic_and_roots(f, t, t);
  CHECK(qi.roots[0] == Approx(1.0).epsilon(1e-14));
  CHECK(q.A != 0.0);
}

TEST_CASE("integrate_branch examples") {
  const Profile f = Profile::cosine(1, {0.5, 0.1, 0.05});
  const auto one = integrate_branch(f, Branch::One, kPi / 4, std::atan(2.0), kPi / 3);
  CHECK(one.theta.back() == Approx(std::atan(2.0 * std::tan(kPi / 3))).epsilon(1e-9));
  CHECK(one.theta.back() == Approx(1.289761).epsilon(1e-6));
  CHECK(one.t.size() == 4097);

  const auto two = integrate_branch(Profile::constant(2, 0.5), Branch::Two, 0.2, 0.2, 1.3);
  for (std::size_t i = 0; i < two.t.size(); i += 97) CHECK(std::abs(two.theta[i] - two.t[i]) < 1e-12);
  const auto fix = integrate_branch(f, Branch::One, 0.5, 0.5, 1.2);
  CHECK(std::abs(fix.theta.back() - 1.2) < 1e-12);

  CHECK_THROWS_AS(integrate_branch(f, Branch::One, 0.0, 0.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(integrate_branch(f, Branch::One, 0.5, 3.5, 1.0), std::invalid_argument);
  // atan(c tan t) with c = tan 1 / tan 0.2 passes pi/3 before t = 0.8
  CHECK_THROWS_AS(integrate_branch(Profile::constant(3, 0.5), Branch::One, 0.2, 1.0, 0.8), std::domain_error);
}

TEST_CASE("property: integrate_branch agrees with the closed forms") {
  gen::Gen g(53);
  for (int rep = 0; rep < 20; ++rep) {
    const int d = g.integer(1, 3);
    const Profile f = g.valid_profile(d, 4, 0.25);
    // the branch equations lose uniqueness where theta reaches pi/2, so stay below it
    const double top = std::min(kPi / d, kPi / 2);
    const double t0 = g.uniform(0.1, top - 0.3), t1 = g.uniform(t0 + 0.1, top - 0.05);
    for (Branch b : {Branch::One, Branch::Two}) {
      const double ref = b == Branch::One ? t0 : theta_legendre(f, t0);
      const double th0 = std::clamp(ref + g.uniform(-0.05, 0.05), 0.05, top - 0.05);
      BranchSolution s;
      try {
        s = integrate_branch(f, b, t0, th0, t1);
      } catch (const std::domain_error&) {
        continue;
      }
      double err = 0.0;
      for (std::size_t i = 0; i < s.t.size(); ++i)
        err = std::max(err, std::abs(s.theta[i] - branch_closed_form(f, b, t0, th0, s.t[i])));
      CHECK(err < 1e-6);
    }
  }
}

TEST_CASE("build_h_from_theta recovers the closed-form partners") {
  const Profile f = Profile::cosine(2, {0.6, 0.1, 0.02});
  const Profile hi = build_h_from_theta(f, ThetaMap::identity(), 0.7, 2.0 * f.eval(0.7));
  for (double t : {0.1, 0.5, 1.2}) CHECK(hi.eval(t) == Approx(2.0 * f.eval(t)).epsilon(1e-10));

  const Profile dual = dual_profile(PlanarNorm(f), 1024, kGlueFitTerms);
  const double t0 = 0.5;
  const Profile hl =
      build_h_from_theta(f, ThetaMap::legendre(), t0, dual.eval(theta_legendre(f, t0)), 512, kGlueFitTerms);
  for (double t : {0.05, 0.4, 1.0, 1.5}) CHECK(std::abs(hl.eval(t) - dual.eval(t)) < 1e-8);
  CHECK(max_res({f, hl, ThetaMap::legendre()}) < 1e-6);

  // doubling h0 doubles h
  const Profile h2 = build_h_from_theta(f, ThetaMap::legendre(), t0, 2.0 * dual.eval(theta_legendre(f, t0)), 512,
                                        kGlueFitTerms);
  for (double t : {0.05, 0.4, 1.0}) CHECK(h2.eval(t) == Approx(2.0 * hl.eval(t)).epsilon(1e-12));

  CHECK_THROWS_AS(build_h_from_theta(f, ThetaMap::identity(), 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(build_h_from_theta(f, ThetaMap::identity(), 0.5, -1.0), std::invalid_argument);
  // a linear map with a != b does not fix pi/3
  CHECK_THROWS_AS(build_h_from_theta(Profile::constant(3, 0.5), ThetaMap::linear(1.0, 2.0), 0.5, 1.0),
                  std::domain_error);
}

TEST_CASE("branch solutions on d = 1 give full isometries") {
  // for d = 1 the branch equations are the whole system
  const Profile f = Profile::cosine(1, {0.5, 0.1, 0.05});
  for (Branch b : {Branch::One, Branch::Two}) {
    const ThetaMap th = branch_theta(f, b, 1.0, 1.1);
    const IsometryTriple tr{f, build_h_from_theta(f, th, 1.0, 0.5), th};
    CHECK(max_res(tr) < 1e-6);
    CHECK(check_hessian_isometry(PlanarNorm(tr.f), PlanarNorm(tr.h), planar_lift(tr), 32) < 1e-4);
  }
}

TEST_CASE("planar lifts and metric checks") {
  const Profile f = Profile::cosine(2, {0.6, 0.1, 0.02});
  const PlanarNorm F(f);
  const IsometryTriple id{f, f, ThetaMap::identity()};
  Eigen::VectorXd x(2);
  x << 0.3, -0.7;
  CHECK((planar_lift(id)(x) - x).norm() < 1e-14);
  const IsometryTriple sc{f, f.scaled(4.0), ThetaMap::identity()};
  CHECK((planar_lift(sc)(x) - 0.5 * x).norm() < 1e-14);

  const IsometryTriple L = legendre_triple(f);
  const PlanarNorm G(L.h);
  CHECK(check_hessian_isometry(F, G, planar_lift(L), 64) < 1e-4);
  // the Legendre lift is grad E
  for (const auto& p : indicatrix_samples(F, 16)) {
    const Eigen::Vector2d y = F.legendre_map({p(0), p(1)});
    CHECK((planar_lift(L)(p) - Eigen::VectorXd(y)).norm() < 1e-9);
  }
  // a rotation is not an isometry between these norms
  const PointMap rot = [](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    Eigen::Matrix2d R;
    R << std::cos(0.3), -std::sin(0.3), std::sin(0.3), std::cos(0.3);
    return R * v;
  };
  CHECK(check_hessian_isometry(F, F, rot, 64) > 1e-3);
}

TEST_CASE("(d)-property of the Legendre map and the rotation control") {
  const Profile f = Profile::cosine(2, {0.6, 0.1, 0.02});
  const IsometryTriple L = legendre_triple(f);
  const PlanarNorm F(f), G(L.h);
  for (int k = 0; k < 8; ++k)
    CHECK(check_d_property(F, G, planar_lift(L), Decomposition::planar(k * kPi / 8 + 0.1), 64) < 1e-6);
  const PointMap rot = [](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    Eigen::Matrix2d R;
    R << std::cos(0.3), -std::sin(0.3), std::sin(0.3), std::cos(0.3);
    return R * v;
  };
  CHECK(check_d_property(F, F, rot, Decomposition::planar(0.4), 64) > 1e-3);
}

TEST_CASE("property: k-th ODE residual equals the (d)-residual at angle -k pi / d") {
  gen::Gen g(54);
  for (int rep = 0; rep < 8; ++rep) {
    const int d = g.d_value();
    const Profile f = g.valid_profile(d, 3, 0.25), h = g.valid_profile(d, 3, 0.25);
    const std::vector<ThetaMap> maps{ThetaMap::identity(), ThetaMap::legendre(), ThetaMap::scaled(1.0, 1.0)};
    const IsometryTriple tr{f, h, maps[static_cast<std::size_t>(rep % 3)]};
    const PlanarNorm F(f), H(h);
    const PointMap phi = planar_lift(tr);
    const auto g1 = metric_of(F), g2 = metric_of(H);
    for (int s = 0; s < 10; ++s) {
      const double t = g.interior_t(d, 0.05);
      const Eigen::VectorXd x = F.indicatrix_point(t);
      const auto res = ode_residuals(tr, t);
      for (int k = 0; k < d; ++k) {
        const double dr = d_property_residual(g1, g2, phi, Decomposition::planar(-k * kPi / d), x);
        CHECK(std::min(std::abs(dr - res[k + 1]), std::abs(dr + res[k + 1])) < 1e-8);
      }
    }
  }
}

TEST_CASE("(d)-property in R^n") {
  const FoliationModel m = FoliationModel::d2(4, 2);
  const Profile f = Profile::cosine(2, {0.6, 0.1, 0.02});
  const IsometryTriple L = legendre_triple(f);
  const InducedNorm F(m, f), G(m, L.h);
  // x' = first two coordinates is the decomposition of the model
  CHECK(check_d_property(F, G, lift_to_nd(L, m), Decomposition::from_basis(Eigen::MatrixXd::Identity(4, 4), 2), 12) < 1e-6);
  CHECK_THROWS_AS(Decomposition::from_basis(Eigen::MatrixXd::Ones(4, 4), 2), std::invalid_argument);
}

TEST_CASE("lifts to R^n") {
  gen::Gen g(55);
  for (const auto& m : {FoliationModel::d1(3), FoliationModel::d2(4, 2), FoliationModel::cartan3()}) {
    const Profile f = g.valid_profile(m.d(), 3, 0.2 / m.d());
    const IsometryTriple id{f, f, ThetaMap::identity()};
    const Eigen::VectorXd x = 1.3 * m.leaf_point(g.interior_t(m.d(), 0.12), g.rng());
    CHECK((lift_to_nd(id, m)(x) - x).norm() < 1e-12);
    const IsometryTriple sc{f, f.scaled(9.0), ThetaMap::identity()};
    CHECK((lift_to_nd(sc, m)(x) - x / 3.0).norm() < 1e-12);

    const IsometryTriple L = legendre_triple(f);
    REQUIRE(max_res(L) < 1e-6);
    const InducedNorm F(m, f), G(m, L.h);
    CHECK(check_hessian_isometry(F, G, lift_to_nd(L, m), 12, 7) < 1e-4);
    // the Legendre lift is grad E
    CHECK((lift_to_nd(L, m)(x) - fd_energy_gradient(F, x)).norm() < 1e-5);
  }
  CHECK_THROWS_AS(lift_to_nd({Profile::constant(2, 0.5), Profile::constant(2, 0.5), ThetaMap::identity()},
                             FoliationModel::cartan3()),
                  std::invalid_argument);
}

TEST_CASE("glue: single sectors") {
  const Profile f = Profile::cosine(3, {0.5, 0.03, -0.004});
  const auto s = glue_construct(f, {{0.0, kPi / 3, SectorMode::Scale, 1.0}});
  CHECK(s.triple.theta.kind() == ThetaKind::Identity);
  CHECK(s.interior_residual < 1e-12);
  const auto l = glue_construct(f, {{0.0, kPi / 3, SectorMode::LegendreScale, 2.0}});
  CHECK(l.triple.theta.kind() == ThetaKind::LegendreClosedForm);
  CHECK(l.interior_residual < 1e-6);
  const Profile dual = dual_profile(PlanarNorm(f), 1024);
  CHECK(l.triple.h.eval(0.3) == Approx(dual.eval(0.3) / 4.0).epsilon(1e-9));
}

TEST_CASE("glue: two sectors on a base round at the boundary") {
  const Profile f = cartan_base();
  const GlueResult g = glue_construct(f, two_sectors());
  CHECK(g.triple.theta.kind() == ThetaKind::SampledMonotone);
  CHECK(g.interior_residual < 1e-6);
  CHECK(g.band_residual < 1e-6);
  CHECK(g.band_roundness < 1e-6);
  CHECK(g.fit_residual < 1e-8);
  REQUIRE(g.effective_scales.size() == 2);
  CHECK(g.effective_scales[1] == Approx(1.0).epsilon(1e-4));

  const auto iv = classify_sectors(g.triple);
  bool has_id = false, has_lg = false;
  for (const auto& s : iv) {
    has_id = has_id || s.label == SectorLabel::IdentityType;
    has_lg = has_lg || s.label == SectorLabel::LegendreType;
    if (s.label == SectorLabel::Transition) CHECK(s.t1 - s.t0 < 3 * kDefaultBlend);
  }
  CHECK(has_id);
  CHECK(has_lg);
  CHECK(iv.front().t0 == 0.0);
  CHECK(iv.back().t1 == Approx(kPi / 3));

  // a requested scale on the second sector is overridden for continuity
  auto secs = two_sectors();
  secs[0].lambda = 2.0;
  secs[1].lambda = 5.0;
  const GlueResult g2 = glue_construct(f, secs);
  CHECK(g2.effective_scales[0] == 2.0);
  CHECK(g2.effective_scales[1] == Approx(2.0).epsilon(1e-4));
  CHECK(g2.interior_residual < 1e-6);
}

TEST_CASE("glue: bad layouts are rejected") {
  const Profile f = cartan_base();
  CHECK_THROWS_AS(glue_construct(f, {}), std::invalid_argument);
  CHECK_THROWS_AS(glue_construct(f, {{0.0, 0.5, SectorMode::Scale, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(glue_construct(f, {{0.0, 0.5, SectorMode::Scale, 1.0}, {0.6, kPi / 3, SectorMode::Scale, 1.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(glue_construct(f, {{0.0, 0.005, SectorMode::Scale, 1.0}, {0.005, kPi / 3, SectorMode::Scale, 1.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(glue_construct(f, two_sectors(), -0.1), std::invalid_argument);
  auto secs = two_sectors();
  secs[0].lambda = 0.0;
  CHECK_THROWS_AS(glue_construct(f, secs), std::invalid_argument);
}

TEST_CASE("classify: closed-form triples") {
  const Profile f = Profile::cosine(3, {0.5, 0.03, -0.004});
  const auto a = classify_sectors({f, f, ThetaMap::identity()});
  REQUIRE(a.size() == 1);
  CHECK(a[0].label == SectorLabel::IdentityType);
  const auto b = classify_sectors(legendre_triple(f));
  REQUIRE(b.size() == 1);
  CHECK(b[0].label == SectorLabel::LegendreType);
  CHECK(b[0].t1 == Approx(kPi / 3));
  const auto c = classify_sectors({f, f, ThetaMap::scaled(1.0, 1.2)});
  CHECK(c[0].label == SectorLabel::Transition);
  CHECK(std::string(to_string(SectorLabel::LegendreType)) == "LegendreType");
}

TEST_CASE("glued lift is a Hessian isometry on cartan3") {
  const Profile f = cartan_base();
  const GlueResult g = glue_construct(f, two_sectors());
  const FoliationModel m = FoliationModel::cartan3();
  const InducedNorm F(m, f), G(m, g.triple.h);
  CHECK(check_hessian_isometry(F, G, lift_to_nd(g.triple, m), 16, 3) < 1e-4);
}
