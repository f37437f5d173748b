#pragma once

#include <Eigen/Dense>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace isonorm {

inline constexpr double kFocalGuard = 0.05;

class FocalProximityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class SpectrumError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TCoord {
  double r = 0.0;
  double t = 0.0;
};

struct NormalPlane {
  Eigen::VectorXd v1, v2, w;  // v1 = gamma(0) in M_0, v2 = gamma(pi/2), w = unit d/dt
  double r = 0.0;
  double t = 0.0;
};

struct SpectrumEntry {
  int k = 0;              // kappa ~ cot(t + k pi / d)
  double kappa = 0.0;     // measured
  double kappa_exact = 0.0;
  int multiplicity = 0;
  Eigen::MatrixXd basis;  // n x multiplicity, orthonormal; empty for exact_spectrum
};

class FoliationModel {
 public:
  static FoliationModel d1(int n);
  // x' = first k coordinates, M_0 = {x'' = 0}
  static FoliationModel d2(int n, int k);
  static FoliationModel cartan3();
  // "d1:n", "d2:n:k" or "cartan3"
  static FoliationModel parse(const std::string& text);

  int d() const { return d_; }
  int n() const { return n_; }
  int k() const { return k_; }
  std::string name() const;
  double half_period() const;

  double eval_poly(const Eigen::VectorXd& u) const;
  TCoord t_coord(const Eigen::VectorXd& x) const;

  // templated kernels, instantiated for double and long double
  template <class T>
  T poly(const Eigen::Matrix<T, Eigen::Dynamic, 1>& x) const;
  template <class T>
  Eigen::Matrix<T, Eigen::Dynamic, 1> poly_gradient(const Eigen::Matrix<T, Eigen::Dynamic, 1>& x) const;
  // t of x / |x|; defined on R^n \ 0 and constant along rays
  template <class T>
  T t_of(const Eigen::Matrix<T, Eigen::Dynamic, 1>& x) const;

  NormalPlane normal_plane_basis(const Eigen::VectorXd& x, double delta = kFocalGuard) const;
  std::vector<SpectrumEntry> shape_spectrum(const Eigen::VectorXd& x, double delta = kFocalGuard) const;
  std::vector<SpectrumEntry> exact_spectrum(double t) const;

  // multiplicity of cot(t + k pi / d), k = 0..d-1
  std::vector<int> multiplicities() const;
  std::pair<int, int> focal_dimensions() const;

  // unit vector with the given t, with a random position along the leaf
  Eigen::VectorXd leaf_point(double t, std::mt19937_64& rng) const;

 private:
  FoliationModel(int d, int n, int k) : d_(d), n_(n), k_(k) {}
  void check_dim(Eigen::Index size) const;
  int d_, n_, k_;
};

// the D_{2d} fold of s into [0, pi/d]
double fold_angle(double s, int d);

}  // namespace isonorm
