#include "isonorm/foliation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "isonorm/profile.hpp"

namespace isonorm {

namespace {

template <class T>
using VecT = Eigen::Matrix<T, Eigen::Dynamic, 1>;

constexpr double kHessStep = 1e-4;

}  // namespace

FoliationModel FoliationModel::d1(int n) {
  if (n < 3) throw std::invalid_argument("foliation d1: need n >= 3");
  return FoliationModel(1, n, 0);
}

FoliationModel FoliationModel::d2(int n, int k) {
  if (n < 4) throw std::invalid_argument("foliation d2: need n >= 4");
  if (k < 2 || n - k < 2)
    throw std::invalid_argument("foliation d2: need 2 <= k <= n-2 so both curvatures occur");
  return FoliationModel(2, n, k);
}

FoliationModel FoliationModel::cartan3() { return FoliationModel(3, 5, 0); }

FoliationModel FoliationModel::parse(const std::string& text) {
  if (text == "cartan3") return cartan3();
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  std::vector<int> nums;
  try {
    for (std::size_t i = 1; i < parts.size(); ++i) nums.push_back(std::stoi(parts[i]));
  } catch (const std::logic_error&) {
    nums.clear();
  }
  if (parts.size() == 2 && parts[0] == "d1" && nums.size() == 1) return d1(nums[0]);
  if (parts.size() == 3 && parts[0] == "d2" && nums.size() == 2) return d2(nums[0], nums[1]);
  throw std::invalid_argument("unknown foliation model '" + text + "' (use d1:n, d2:n:k or cartan3)");
}

std::string FoliationModel::name() const {
  if (d_ == 1) return "d1:" + std::to_string(n_);
  if (d_ == 2) return "d2:" + std::to_string(n_) + ":" + std::to_string(k_);
  return "cartan3";
}

double FoliationModel::half_period() const { return kPi / d_; }

void FoliationModel::check_dim(Eigen::Index size) const {
  if (size != n_) throw std::invalid_argument("foliation: vector has wrong dimension for " + name());
}

template <class T>
T FoliationModel::poly(const VecT<T>& x) const {
  if (d_ == 1) return x(0);
  if (d_ == 2) return x.head(k_).squaredNorm() - x.tail(n_ - k_).squaredNorm();
  const T s3 = std::sqrt(T(3));
  const T a = x(0), b = x(1), p = x(2), q = x(3), z = x(4);
  return a * a * a - T(3) * a * b * b + T(1.5) * a * (p * p + q * q - T(2) * z * z) +
         T(1.5) * s3 * b * (p * p - q * q) + T(3) * s3 * p * q * z;
}

template <class T>
VecT<T> FoliationModel::poly_gradient(const VecT<T>& x) const {
  VecT<T> g = VecT<T>::Zero(n_);
  if (d_ == 1) {
    g(0) = T(1);
  } else if (d_ == 2) {
    g.head(k_) = T(2) * x.head(k_);
    g.tail(n_ - k_) = T(-2) * x.tail(n_ - k_);
  } else {
    const T s3 = std::sqrt(T(3));
    const T a = x(0), b = x(1), p = x(2), q = x(3), z = x(4);
    g(0) = T(3) * (a * a - b * b) + T(1.5) * (p * p + q * q - T(2) * z * z);
    g(1) = T(-6) * a * b + T(1.5) * s3 * (p * p - q * q);
    g(2) = T(3) * a * p + T(3) * s3 * b * p + T(3) * s3 * q * z;
    g(3) = T(3) * a * q - T(3) * s3 * b * q + T(3) * s3 * p * z;
    g(4) = T(-6) * a * z + T(3) * s3 * p * q;
  }
  return g;
}

template <class T>
T FoliationModel::t_of(const VecT<T>& x) const {
  const T r = x.norm();
  if (d_ == 1) return std::atan2(x.tail(n_ - 1).norm(), x(0));
  if (d_ == 2) return std::atan2(x.tail(n_ - k_).norm(), x.head(k_).norm());
  // cos(3t) = p(u) and sin(3t) = |tangential part of grad p| / 3 on the unit sphere;
  // the second is accurate next to the focal sets where arccos is not
  const VecT<T> u = x / r;
  const T p = poly<T>(u);
  const VecT<T> g = poly_gradient<T>(u);
  const T s = (g - T(3) * p * u).norm() / T(3);
  return std::atan2(s, p) / T(3);
}

template double FoliationModel::poly<double>(const VecT<double>&) const;
template long double FoliationModel::poly<long double>(const VecT<long double>&) const;
template VecT<double> FoliationModel::poly_gradient<double>(const VecT<double>&) const;
template VecT<long double> FoliationModel::poly_gradient<long double>(const VecT<long double>&) const;
template double FoliationModel::t_of<double>(const VecT<double>&) const;
template long double FoliationModel::t_of<long double>(const VecT<long double>&) const;

double FoliationModel::eval_poly(const Eigen::VectorXd& u) const {
  check_dim(u.size());
  if (std::abs(u.norm() - 1.0) > 1e-10) throw std::invalid_argument("eval_poly: input is not a unit vector");
  return poly<double>(u);
}

TCoord FoliationModel::t_coord(const Eigen::VectorXd& x) const {
  check_dim(x.size());
  const double r = x.norm();
  if (r == 0.0) throw std::invalid_argument("t_coord: x = 0");
  return {r, std::clamp(t_of<double>(x), 0.0, half_period())};
}

NormalPlane FoliationModel::normal_plane_basis(const Eigen::VectorXd& x, double delta) const {
  const TCoord tc = t_coord(x);
  if (tc.t < delta || tc.t > half_period() - delta)
    throw FocalProximityError("normal_plane_basis: t = " + std::to_string(tc.t) + " is within " +
                              std::to_string(delta) + " of a focal set");
  const Eigen::VectorXd u = x / tc.r;
  const double p = poly<double>(u);
  const Eigen::VectorXd tang = poly_gradient<double>(u) - d_ * p * u;
  NormalPlane np;
  np.r = tc.r;
  np.t = tc.t;
  // t = arccos(p) / d grows where p falls
  np.w = -tang / tang.norm();
  np.v1 = std::cos(tc.t) * u - std::sin(tc.t) * np.w;
  np.v2 = std::sin(tc.t) * u + std::cos(tc.t) * np.w;
  return np;
}

std::vector<int> FoliationModel::multiplicities() const {
  if (d_ == 1) return {n_ - 2};
  if (d_ == 2) return {n_ - k_ - 1, k_ - 1};
  return {1, 1, 1};
}

std::pair<int, int> FoliationModel::focal_dimensions() const {
  if (d_ == 1) return {0, 0};
  if (d_ == 2) return {k_ - 1, n_ - k_ - 1};
  return {2, 2};
}

std::vector<SpectrumEntry> FoliationModel::exact_spectrum(double t) const {
  std::vector<SpectrumEntry> out;
  const auto m = multiplicities();
  for (int k = 0; k < d_; ++k) {
    if (m[static_cast<std::size_t>(k)] == 0) continue;
    SpectrumEntry e;
    e.k = k;
    e.kappa_exact = 1.0 / std::tan(t + k * kPi / d_);
    e.kappa = e.kappa_exact;
    e.multiplicity = m[static_cast<std::size_t>(k)];
    out.push_back(e);
  }
  return out;
}

std::vector<SpectrumEntry> FoliationModel::shape_spectrum(const Eigen::VectorXd& x, double delta) const {
  const NormalPlane np = normal_plane_basis(x, delta);
  const Eigen::VectorXd u = x / np.r;

  // Hessian of the 0-homogeneous t at u equals the spherical Hessian on T_u S
  using LVec = VecT<long double>;
  const LVec ul = u.cast<long double>();
  const long double h = kHessStep;
  auto tv = [&](const LVec& y) { return t_of<long double>(y); };
  Eigen::MatrixXd H(n_, n_);
  const long double t0 = tv(ul);
  for (int i = 0; i < n_; ++i) {
    LVec e = LVec::Zero(n_);
    e(i) = h;
    H(i, i) = static_cast<double>((tv(ul + e) - 2.0L * t0 + tv(ul - e)) / (h * h));
    for (int j = i + 1; j < n_; ++j) {
      LVec f = LVec::Zero(n_);
      f(j) = h;
      const long double v = (tv(ul + e + f) - tv(ul + e - f) - tv(ul - e + f) + tv(ul - e - f)) / (4.0L * h * h);
      H(i, j) = H(j, i) = static_cast<double>(v);
    }
  }

  Eigen::MatrixXd uw(n_, 2);
  uw.col(0) = u;
  uw.col(1) = np.w;
  const Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(uw).householderQ();
  const Eigen::MatrixXd P = Q.rightCols(n_ - 2);
  const Eigen::MatrixXd S = P.transpose() * H * P;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (S + S.transpose()));
  const Eigen::VectorXd lam = es.eigenvalues();
  const Eigen::MatrixXd vec = P * es.eigenvectors();

  // group sorted eigenvalues into clusters
  std::vector<std::vector<int>> clusters;
  for (int i = 0; i < lam.size(); ++i) {
    if (!clusters.empty()) {
      const double prev = lam(clusters.back().back());
      if (std::abs(lam(i) - prev) <= 1e-3 * std::max(1.0, std::abs(prev))) {
        clusters.back().push_back(i);
        continue;
      }
    }
    clusters.push_back({i});
  }

  const auto expected = exact_spectrum(np.t);
  if (clusters.size() != expected.size())
    throw SpectrumError("shape_spectrum: found " + std::to_string(clusters.size()) +
                        " eigenvalue clusters, expected " + std::to_string(expected.size()));
  std::vector<SpectrumEntry> out;
  std::vector<bool> used(expected.size(), false);
  for (const auto& cl : clusters) {
    double mean = 0.0;
    for (int i : cl) mean += lam(i);
    mean /= static_cast<double>(cl.size());
    std::size_t best = 0;
    double bestd = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < expected.size(); ++j) {
      const double dd = std::abs(expected[j].kappa_exact - mean);
      if (dd < bestd) { bestd = dd; best = j; }
    }
    if (used[best] || static_cast<int>(cl.size()) != expected[best].multiplicity)
      throw SpectrumError("shape_spectrum: eigenvalue clusters do not match cot(t + k pi/d)");
    used[best] = true;
    SpectrumEntry e = expected[best];
    e.kappa = mean;
    e.basis.resize(n_, static_cast<Eigen::Index>(cl.size()));
    for (std::size_t c = 0; c < cl.size(); ++c) e.basis.col(static_cast<Eigen::Index>(c)) = vec.col(cl[c]);
    out.push_back(std::move(e));
  }
  std::sort(out.begin(), out.end(), [](const SpectrumEntry& a, const SpectrumEntry& b) { return a.k < b.k; });
  return out;
}

Eigen::VectorXd FoliationModel::leaf_point(double t, std::mt19937_64& rng) const {
  std::normal_distribution<double> nd(0.0, 1.0);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Eigen::VectorXd u(n_);
    for (int i = 0; i < n_; ++i) u(i) = nd(rng);
    u.normalize();
    const double t0 = t_coord(u).t;
    if (t0 < 2.0 * kFocalGuard || t0 > half_period() - 2.0 * kFocalGuard) continue;
    const NormalPlane np = normal_plane_basis(u);
    Eigen::VectorXd out = std::cos(t) * np.v1 + std::sin(t) * np.v2;
    return out.normalized();
  }
  throw std::runtime_error("leaf_point: could not draw an interior direction");
}

double fold_angle(double s, int d) {
  const double P = 2.0 * kPi / d;
  const double u = s - P * std::round(s / P);
  return std::abs(u);
}

}  // namespace isonorm
