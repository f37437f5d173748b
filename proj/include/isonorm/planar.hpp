#pragma once

#include <Eigen/Dense>

#include "isonorm/profile.hpp"

namespace isonorm {

// F = r sqrt(2 f(t)) on R^2, E = F^2 / 2 = r^2 f(t).
class PlanarNorm {
 public:
  // throws std::invalid_argument unless is_minkowski(profile) is valid
  explicit PlanarNorm(Profile profile);
  // skips the validity gate; used by negative tests
  static PlanarNorm unchecked(Profile profile);

  const Profile& profile() const { return profile_; }
  const MinkowskiCheck& check() const { return check_; }
  int dim() const { return 2; }

  double value(const Eigen::Vector2d& x) const;
  double energy(const Eigen::Vector2d& x) const;
  Eigen::Matrix2d fundamental_tensor(const Eigen::Vector2d& x) const;
  Eigen::Vector2d legendre_map(const Eigen::Vector2d& x) const;
  // point of the indicatrix at polar angle t
  Eigen::Vector2d indicatrix_point(double t) const;

 private:
  PlanarNorm(Profile profile, MinkowskiCheck check);
  Profile profile_;
  MinkowskiCheck check_;
};

// polar angle of grad E at polar angle t, as a continuous lift
double theta_legendre(const Profile& f, double t);
double theta_legendre_derivative(const Profile& f, double t);
inline double theta_legendre(const PlanarNorm& nm, double t) { return theta_legendre(nm.profile(), t); }

// polar angle of (a dE/dx1, b dE/dx2) at polar angle t
double theta_scaled(const Profile& f, double t, double a, double b);
double theta_scaled_derivative(const Profile& f, double t, double a, double b);
inline double theta_scaled(const PlanarNorm& nm, double t, double a, double b) {
  return theta_scaled(nm.profile(), t, a, b);
}

// right-hand side of the first-order ODE solved by theta_legendre
double legendre_theta_ode_rhs(const Profile& f, double t, double theta);

// throws std::runtime_error if the image angles are not strictly increasing
Profile dual_profile(const PlanarNorm& nm, int grid_size = 512, int fit_terms = Profile::kDefaultFitTerms);

}  // namespace isonorm
