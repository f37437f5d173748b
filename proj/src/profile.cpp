#include "isonorm/profile.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace isonorm {

const char* to_string(Validity v) {
  switch (v) {
    case Validity::Valid: return "valid";
    case Validity::Marginal: return "marginal";
    case Validity::Invalid: return "invalid";
  }
  return "invalid";
}

bool is_valid_d(int d) { return d == 1 || d == 2 || d == 3 || d == 4 || d == 6; }

Profile Profile::cosine(int d, std::vector<double> coeffs) {
  if (!is_valid_d(d)) throw std::invalid_argument("profile: d must be one of 1,2,3,4,6");
  if (coeffs.empty()) throw std::invalid_argument("profile: empty cosine coefficient list");
  for (double c : coeffs)
    if (!std::isfinite(c)) throw std::invalid_argument("profile: non-finite coefficient");
  Profile p;
  p.d_ = d;
  p.kind_ = ProfileKind::CosineSeries;
  p.coeffs_ = std::move(coeffs);
  return p;
}

Profile Profile::sampled(int d, std::vector<double> grid, std::vector<double> values, int max_terms) {
  if (!is_valid_d(d)) throw std::invalid_argument("profile: d must be one of 1,2,3,4,6");
  if (grid.size() != values.size()) throw std::invalid_argument("profile: grid/values size mismatch");
  if (grid.size() < 2) throw std::invalid_argument("profile: need at least two samples");
  if (max_terms < 1 || max_terms > kMaxFitTerms)
    throw std::invalid_argument("profile: fit term count out of range");
  const double hp = kPi / d;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i]) || !std::isfinite(values[i]))
      throw std::invalid_argument("profile: non-finite sample");
    if (grid[i] < -1e-12 || grid[i] > hp + 1e-12)
      throw std::invalid_argument("profile: sample outside [0, pi/d]");
    if (i > 0 && !(grid[i] > grid[i - 1]))
      throw std::invalid_argument("profile: sample grid not strictly increasing");
  }
  const int m = std::min<int>(max_terms, static_cast<int>(grid.size()));
  const Eigen::Index rows = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXd A(rows, m);
  Eigen::VectorXd y(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (int j = 0; j < m; ++j) A(i, j) = std::cos(j * d * grid[static_cast<std::size_t>(i)]);
    y(i) = values[static_cast<std::size_t>(i)];
  }
  Eigen::VectorXd c = A.colPivHouseholderQr().solve(y);

  Profile p;
  p.d_ = d;
  p.kind_ = ProfileKind::Sampled;
  p.coeffs_.assign(c.data(), c.data() + c.size());
  p.grid_ = std::move(grid);
  p.values_ = std::move(values);
  double res = 0.0;
  for (std::size_t i = 0; i < p.grid_.size(); ++i)
    res = std::max(res, std::abs(p.eval(p.grid_[i]) - p.values_[i]));
  p.fit_residual_ = res;
  return p;
}

template <class T>
T Profile::eval_impl(T t, int order) const {
  if (order < 0 || order > 3) throw std::invalid_argument("profile: derivative order must be 0..3");
  if (!std::isfinite(static_cast<double>(t))) throw std::invalid_argument("profile: non-finite angle");
  const T P = T(2) * std::numbers::pi_v<T> / T(d_);
  t -= P * std::round(t / P);
  T acc = order == 0 ? T(coeffs_[0]) : T(0);
  for (std::size_t j = 1; j < coeffs_.size(); ++j) {
    const T w = T(j) * T(d_);
    const T s = w * t;
    T term;
    switch (order) {
      case 0: term = std::cos(s); break;
      case 1: term = -w * std::sin(s); break;
      case 2: term = -w * w * std::cos(s); break;
      default: term = w * w * w * std::sin(s); break;
    }
    acc += T(coeffs_[j]) * term;
  }
  return acc;
}

double Profile::eval(double t, int order) const { return eval_impl<double>(t, order); }
long double Profile::eval_ld(long double t, int order) const { return eval_impl<long double>(t, order); }

Profile Profile::scaled(double s) const {
  if (!(s > 0.0) || !std::isfinite(s)) throw std::invalid_argument("profile: scale must be positive");
  Profile p = *this;
  for (double& c : p.coeffs_) c *= s;
  for (double& v : p.values_) v *= s;
  p.fit_residual_ *= s;
  return p;
}

double convexity_gap(const Profile& p, double t) {
  const double f = p.eval(t, 0), f1 = p.eval(t, 1), f2 = p.eval(t, 2);
  return 2.0 * f * f2 - f1 * f1 + 4.0 * f * f;
}

namespace {

// one golden-section pass on [a, b]
template <class Fn>
std::pair<double, double> golden_min(Fn&& fn, double a, double b) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = fn(c), fd = fn(d);
  for (int it = 0; it < 80 && (b - a) > 1e-14; ++it) {
    if (fc < fd) {
      b = d; d = c; fd = fc;
      c = b - g * (b - a); fc = fn(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + g * (b - a); fd = fn(d);
    }
  }
  return fc < fd ? std::pair{c, fc} : std::pair{d, fd};
}

}  // namespace

MinkowskiCheck is_minkowski(const Profile& p, int grid_size, Exec exec) {
  if (grid_size < 64) throw std::invalid_argument("is_minkowski: grid_size must be >= 64");
  const auto grid = linspace(0.0, p.half_period(), static_cast<std::size_t>(grid_size));
  const auto gaps = sweep_map<double>(grid.size(), [&](std::size_t i) { return convexity_gap(p, grid[i]); }, exec);
  const auto fs = sweep_map<double>(grid.size(), [&](std::size_t i) { return p.eval(grid[i]); }, exec);

  auto refine = [&](const std::vector<double>& vals, auto&& fn) {
    const Extreme e = arg_min(vals);
    const std::size_t lo = e.index == 0 ? 0 : e.index - 1;
    const std::size_t hi = std::min(e.index + 1, grid.size() - 1);
    auto [tm, vm] = golden_min(fn, grid[lo], grid[hi]);
    if (vm < e.value) return std::pair{tm, vm};
    return std::pair{grid[e.index], e.value};
  };
  const auto [tg, mg] = refine(gaps, [&](double t) { return convexity_gap(p, t); });
  const auto [tf, mf] = refine(fs, [&](double t) { return p.eval(t); });
  (void)tf;

  MinkowskiCheck r;
  r.min_gap = mg;
  r.min_f = mf;
  r.argmin = tg;
  if (mg > kValidityTol && mf > kValidityTol) r.status = Validity::Valid;
  else if (mg >= -kValidityTol && mf >= -kValidityTol) r.status = Validity::Marginal;
  else r.status = Validity::Invalid;
  r.valid = r.status == Validity::Valid;
  return r;
}

Profile from_phi(const std::function<double(double)>& phi, double b, PhiMode mode, int samples,
                 bool allow_nonpositive) {
  if (samples < 64) throw std::invalid_argument("from_phi: need at least 64 samples");
  if (mode == PhiMode::AlphaBeta && !(b > 0.0)) throw std::invalid_argument("from_phi: b must be positive");
  const int d = mode == PhiMode::AlphaBeta ? 1 : 2;
  const auto grid = linspace(0.0, kPi / d, static_cast<std::size_t>(samples));
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double s = mode == PhiMode::AlphaBeta ? b * std::cos(grid[i]) : std::cos(grid[i]);
    const double v = phi(s);
    if (!std::isfinite(v)) throw std::invalid_argument("from_phi: phi is not finite on the grid");
    if (v <= 0.0 && !allow_nonpositive)
      throw std::domain_error("from_phi: phi <= 0 at s = " + std::to_string(s));
    values[i] = 0.5 * v * v;
  }
  return Profile::sampled(d, grid, std::move(values));
}

}  // namespace isonorm
