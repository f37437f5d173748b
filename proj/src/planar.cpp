#include "isonorm/planar.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace isonorm {

PlanarNorm::PlanarNorm(Profile profile, MinkowskiCheck check)
    : profile_(std::move(profile)), check_(check) {}

PlanarNorm::PlanarNorm(Profile profile) : profile_(std::move(profile)) {
  check_ = is_minkowski(profile_);
  if (!check_.valid)
    throw std::invalid_argument(std::string("planar norm: profile is ") + to_string(check_.status) +
                                " (min_gap " + std::to_string(check_.min_gap) + ")");
}

PlanarNorm PlanarNorm::unchecked(Profile profile) {
  MinkowskiCheck c = is_minkowski(profile);
  return PlanarNorm(std::move(profile), c);
}

double PlanarNorm::value(const Eigen::Vector2d& x) const {
  const double r = x.norm();
  if (r == 0.0) return 0.0;
  return r * std::sqrt(2.0 * profile_.eval(std::atan2(x.y(), x.x())));
}

double PlanarNorm::energy(const Eigen::Vector2d& x) const {
  const double r2 = x.squaredNorm();
  if (r2 == 0.0) return 0.0;
  return r2 * profile_.eval(std::atan2(x.y(), x.x()));
}

Eigen::Matrix2d PlanarNorm::fundamental_tensor(const Eigen::Vector2d& x) const {
  if (x.squaredNorm() == 0.0) throw std::invalid_argument("fundamental_tensor: x = 0");
  const double t = std::atan2(x.y(), x.x());
  const double f = profile_.eval(t, 0), f1 = profile_.eval(t, 1), f2 = profile_.eval(t, 2);
  Eigen::Matrix2d m;
  m << 2.0 * f, f1, f1, f2 + 2.0 * f;
  Eigen::Matrix2d rot;
  rot << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  return rot * m * rot.transpose();
}

Eigen::Vector2d PlanarNorm::legendre_map(const Eigen::Vector2d& x) const {
  const double r = x.norm();
  if (r == 0.0) throw std::invalid_argument("legendre_map: x = 0");
  const double t = std::atan2(x.y(), x.x());
  const double f = profile_.eval(t, 0), f1 = profile_.eval(t, 1);
  const double c = std::cos(t), s = std::sin(t);
  return r * Eigen::Vector2d(2.0 * f * c - f1 * s, 2.0 * f * s + f1 * c);
}

Eigen::Vector2d PlanarNorm::indicatrix_point(double t) const {
  const double rho = 1.0 / std::sqrt(2.0 * profile_.eval(t));
  return rho * Eigen::Vector2d(std::cos(t), std::sin(t));
}

double theta_legendre(const Profile& f, double t) {
  // grad E = r (2f e_r + f' e_t), so its angle is t plus a tilt inside (-pi/2, pi/2)
  return t + std::atan2(f.eval(t, 1), 2.0 * f.eval(t, 0));
}

double theta_legendre_derivative(const Profile& f, double t) {
  const double f0 = f.eval(t, 0), f1 = f.eval(t, 1);
  return convexity_gap(f, t) / (4.0 * f0 * f0 + f1 * f1);
}

double theta_scaled(const Profile& f, double t, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("theta_scaled: a and b must be positive");
  const double f0 = f.eval(t, 0), f1 = f.eval(t, 1);
  const double c = std::cos(t), s = std::sin(t);
  const double X = a * (2.0 * f0 * c - f1 * s);
  const double Y = b * (2.0 * f0 * s + f1 * c);
  // measure against e_r(t) so the lift stays continuous past t = pi
  return t + std::atan2(Y * c - X * s, X * c + Y * s);
}

double theta_scaled_derivative(const Profile& f, double t, double a, double b) {
  const double f0 = f.eval(t, 0), f1 = f.eval(t, 1);
  const double c = std::cos(t), s = std::sin(t);
  const double X = 2.0 * f0 * c - f1 * s;
  const double Y = 2.0 * f0 * s + f1 * c;
  return a * b * convexity_gap(f, t) / (a * a * X * X + b * b * Y * Y);
}

double legendre_theta_ode_rhs(const Profile& f, double t, double theta) {
  const double f0 = f.eval(t, 0), f1 = f.eval(t, 1);
  const double c = std::cos(t), s = std::sin(t);
  return convexity_gap(f, t) * std::sin(theta) * std::cos(theta) /
         ((c * f1 + 2.0 * s * f0) * (-s * f1 + 2.0 * c * f0));
}

Profile dual_profile(const PlanarNorm& nm, int grid_size, int fit_terms) {
  if (grid_size < 128) throw std::invalid_argument("dual_profile: grid_size must be >= 128");
  const Profile& f = nm.profile();
  const double hp = f.half_period();
  const auto ts = linspace(0.0, hp, static_cast<std::size_t>(grid_size));
  std::vector<double> theta(ts.size()), h(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const Eigen::Vector2d y = nm.legendre_map(nm.indicatrix_point(ts[i]));
    theta[i] = theta_legendre(f, ts[i]);
    h[i] = 1.0 / (2.0 * y.squaredNorm());
  }
  // the endpoints are fixed by symmetry; pin them against rounding
  theta.front() = std::clamp(theta.front(), 0.0, hp);
  theta.back() = std::clamp(theta.back(), 0.0, hp);
  for (std::size_t i = 1; i < theta.size(); ++i)
    if (!(theta[i] > theta[i - 1]))
      throw std::runtime_error("dual_profile: image angles not strictly increasing near t = " +
                               std::to_string(ts[i]));
  return Profile::sampled(f.d(), std::move(theta), std::move(h), fit_terms);
}

}  // namespace isonorm
