#include "isonorm/isometry.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace isonorm {

// ---------------------------------------------------------------- theta maps

MonotoneCubic::MonotoneCubic(int d, std::vector<double> grid, std::vector<double> values)
    : d_(d), x_(std::move(grid)), y_(std::move(values)) {
  init(nullptr);
}

MonotoneCubic::MonotoneCubic(int d, std::vector<double> grid, std::vector<double> values, std::vector<double> slopes)
    : d_(d), given_slopes_(true), x_(std::move(grid)), y_(std::move(values)) {
  if (slopes.size() != x_.size()) throw std::invalid_argument("monotone cubic: slopes/grid size mismatch");
  init(&slopes);
}

void MonotoneCubic::init(std::vector<double>* slopes) {
  if (!is_valid_d(d_)) throw std::invalid_argument("monotone cubic: bad d");
  const double hp = kPi / d_;
  if (x_.size() != y_.size() || x_.size() < 3) throw std::invalid_argument("monotone cubic: need >= 3 nodes");
  if (std::abs(x_.front()) > 1e-9 || std::abs(x_.back() - hp) > 1e-9)
    throw std::invalid_argument("monotone cubic: grid must span [0, pi/d]");
  if (std::abs(y_.front()) > 1e-6 || std::abs(y_.back() - hp) > 1e-6)
    throw std::invalid_argument("monotone cubic: theta must fix 0 and pi/d");
  x_.front() = 0.0;
  x_.back() = hp;
  y_.front() = 0.0;
  y_.back() = hp;
  const std::size_t n = x_.size();
  std::vector<double> h(n - 1), delta(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x_[i + 1] - x_[i];
    if (!(h[i] > 0.0)) throw std::invalid_argument("monotone cubic: grid not strictly increasing");
    delta[i] = (y_[i + 1] - y_[i]) / h[i];
    if (!(delta[i] > 0.0)) throw std::invalid_argument("monotone cubic: theta not strictly increasing");
  }
  m_.resize(n);
  for (std::size_t i = 1; i + 1 < n; ++i)
    m_[i] = (h[i] * delta[i - 1] + h[i - 1] * delta[i]) / (h[i - 1] + h[i]);
  // one-sided estimates at the fixed points, against which the symmetric ones are compared
  const double one0 = ((2.0 * h[0] + h[1]) * delta[0] - h[0] * delta[1]) / (h[0] + h[1]);
  const double one1 = ((2.0 * h[n - 2] + h[n - 3]) * delta[n - 2] - h[n - 2] * delta[n - 3]) / (h[n - 2] + h[n - 3]);
  if (slopes) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite((*slopes)[i]) || (*slopes)[i] < 0.0) throw std::invalid_argument("monotone cubic: bad slope");
      m_[i] = (*slopes)[i];
    }
  } else {
    // theta is odd about both fixed points, so the reflected chord is the symmetric slope
    m_[0] = delta[0];
    m_[n - 1] = delta[n - 2];
  }
  endpoint_mismatch_ = std::max(std::abs(one0 - m_[0]), std::abs(one1 - m_[n - 1]));
  // Fritsch-Carlson limiter
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double a = m_[i] / delta[i], b = m_[i + 1] / delta[i];
    if (a < 0.0) m_[i] = 0.0;
    if (b < 0.0) m_[i + 1] = 0.0;
    const double s = a * a + b * b;
    if (s > 9.0) {
      const double tau = 3.0 / std::sqrt(s);
      m_[i] = tau * a * delta[i];
      m_[i + 1] = tau * b * delta[i];
    }
  }
}

double MonotoneCubic::eval_base(double u, bool deriv) const {
  const std::size_t n = x_.size();
  std::size_t i = static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), u) - x_.begin());
  i = std::clamp<std::size_t>(i, 1, n - 1) - 1;
  const double h = x_[i + 1] - x_[i];
  const double s = (u - x_[i]) / h;
  const double y0 = y_[i], y1 = y_[i + 1], m0 = m_[i] * h, m1 = m_[i + 1] * h;
  if (!deriv) {
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * m0 + (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * m1;
  }
  const double s2 = s * s;
  return ((6 * s2 - 6 * s) * y0 + (3 * s2 - 4 * s + 1) * m0 + (-6 * s2 + 6 * s) * y1 + (3 * s2 - 2 * s) * m1) / h;
}

double MonotoneCubic::value(double t) const {
  const double P = 2.0 * kPi / d_;
  const double k = std::round(t / P);
  const double u = t - k * P;
  return u >= 0.0 ? k * P + eval_base(u, false) : k * P - eval_base(-u, false);
}

double MonotoneCubic::derivative(double t) const {
  const double P = 2.0 * kPi / d_;
  const double u = t - std::round(t / P) * P;
  return eval_base(std::abs(u), true);
}

const char* to_string(ThetaKind k) {
  switch (k) {
    case ThetaKind::Identity: return "Identity";
    case ThetaKind::LinearMap: return "LinearMap";
    case ThetaKind::LegendreClosedForm: return "LegendreClosedForm";
    case ThetaKind::ScaledLegendre: return "ScaledLegendre";
    case ThetaKind::SampledMonotone: return "SampledMonotone";
  }
  return "Identity";
}

ThetaMap ThetaMap::identity() { return ThetaMap(); }

ThetaMap ThetaMap::linear(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("LinearMap: a and b must be positive");
  ThetaMap m;
  m.kind_ = ThetaKind::LinearMap;
  m.a_ = a;
  m.b_ = b;
  return m;
}

ThetaMap ThetaMap::legendre() {
  ThetaMap m;
  m.kind_ = ThetaKind::LegendreClosedForm;
  return m;
}

ThetaMap ThetaMap::scaled(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("ScaledLegendre: a and b must be positive");
  ThetaMap m;
  m.kind_ = ThetaKind::ScaledLegendre;
  m.a_ = a;
  m.b_ = b;
  return m;
}

ThetaMap ThetaMap::sampled(MonotoneCubic curve) {
  ThetaMap m;
  m.kind_ = ThetaKind::SampledMonotone;
  m.curve_ = std::move(curve);
  return m;
}

double ThetaMap::value(const Profile& f, double t) const {
  switch (kind_) {
    case ThetaKind::Identity: return t;
    case ThetaKind::LinearMap: {
      const double c = std::cos(t), s = std::sin(t);
      return t + std::atan2((b_ - a_) * s * c, a_ * c * c + b_ * s * s);
    }
    case ThetaKind::LegendreClosedForm: return theta_legendre(f, t);
    case ThetaKind::ScaledLegendre: return theta_scaled(f, t, a_, b_);
    case ThetaKind::SampledMonotone: return curve_.value(t);
  }
  return t;
}

double ThetaMap::derivative(const Profile& f, double t) const {
  switch (kind_) {
    case ThetaKind::Identity: return 1.0;
    case ThetaKind::LinearMap: {
      const double c = std::cos(t), s = std::sin(t);
      return a_ * b_ / (a_ * a_ * c * c + b_ * b_ * s * s);
    }
    case ThetaKind::LegendreClosedForm: return theta_legendre_derivative(f, t);
    case ThetaKind::ScaledLegendre: return theta_scaled_derivative(f, t, a_, b_);
    case ThetaKind::SampledMonotone: return curve_.derivative(t);
  }
  return 1.0;
}

// ---------------------------------------------------------------- ODE system

std::vector<double> ode_residuals(const IsometryTriple& tr, double t) {
  const int d = tr.f.d();
  if (tr.h.d() != d) throw std::invalid_argument("ode_residuals: f and h have different d");
  const double f0 = tr.f.eval(t, 0), f1 = tr.f.eval(t, 1), f2 = tr.f.eval(t, 2);
  const double th = tr.theta_at(t), dth = tr.theta_prime(t);
  const double h0 = tr.h.eval(th, 0), h1 = tr.h.eval(th, 1), h2 = tr.h.eval(th, 2);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(d) + 1);
  const double lhs = f2 / (2 * f0) - f1 * f1 / (4 * f0 * f0) + 1.0;
  const double rhs = h2 / (2 * h0) - h1 * h1 / (4 * h0 * h0) + 1.0;
  out.push_back(lhs - dth * dth * rhs);
  for (int k = 0; k < d; ++k) {
    const double s = t + k * kPi / d, sg = th + k * kPi / d;
    const double a = std::sin(s) * std::sin(s) + std::cos(s) * std::sin(s) * f1 / (2 * f0);
    const double b = std::sin(sg) * std::sin(sg) + std::cos(sg) * std::sin(sg) * h1 / (2 * h0);
    out.push_back(a - b);
  }
  return out;
}

double max_ode_residual(const IsometryTriple& tr, int grid, Exec exec) {
  const auto ts = interior_grid(0.0, tr.f.half_period(), static_cast<std::size_t>(grid));
  const auto vals = sweep_map<double>(ts.size(), [&](std::size_t i) {
    double m = 0.0;
    for (double r : ode_residuals(tr, ts[i])) m = std::max(m, std::isnan(r) ? INFINITY : std::abs(r));
    return m;
  }, exec);
  return max_abs(vals);
}

QuadraticRoots quadratic_and_roots(const Profile& f, double t, double theta) {
  const double f0 = f.eval(t, 0), f1 = f.eval(t, 1), f2 = f.eval(t, 2);
  const double c = std::cos(t), s = std::sin(t), C = std::cos(theta), S = std::sin(theta);
  QuadraticRoots q;
  q.A = c * s * (c * f1 + 2 * s * f0) * (s * f1 - 2 * c * f0) / (2 * f0 * f0 * C * C * S * S);
  q.B = (c * s * f2 / f0 - c * s * f1 * f1 / (f0 * f0) + (c * c - s * s) * f1 / f0 + 4 * c * s) / (C * S);
  q.C = -f2 / f0 + f1 * f1 / (2 * f0 * f0) - 2.0;
  if (!(std::abs(q.A) >= 1e-12)) throw std::domain_error("quadratic_and_roots: |A| < 1e-12");
  q.roots[0] = C * S / (c * s);
  q.roots[1] = (-2 * f0 * f2 + f1 * f1 - 4 * f0 * f0) * C * S / ((c * f1 + 2 * s * f0) * (s * f1 - 2 * c * f0));
  q.discriminant = q.B * q.B - 4 * q.A * q.C;
  const double w = (c * s * f2 + (s * s - c * c) * f1) / (f0 * C * S);
  q.discriminant_closed = w * w;
  q.outside_d_gt_2 = f.d() <= 2;
  return q;
}

namespace {

double branch_rhs(const Profile& f, Branch b, double t, double th) {
  const double C = std::cos(th), S = std::sin(th), c = std::cos(t), s = std::sin(t);
  if (b == Branch::One) return C * S / (c * s);
  const double f0 = f.eval(t, 0), f1 = f.eval(t, 1), f2 = f.eval(t, 2);
  return (-2 * f0 * f2 + f1 * f1 - 4 * f0 * f0) * C * S / ((c * f1 + 2 * s * f0) * (s * f1 - 2 * c * f0));
}

void check_branch_interval(const Profile& f, double t0, double theta0, double t1) {
  const double hp = f.half_period();
  auto inside = [&](double v) { return v > 0.0 && v < hp; };
  if (!inside(t0) || !inside(t1)) throw std::invalid_argument("integrate_branch: [t0, t1] must lie in (0, pi/d)");
  if (!inside(theta0)) throw std::invalid_argument("integrate_branch: theta0 must lie in (0, pi/d)");
}

}  // namespace

BranchSolution integrate_branch(const Profile& f, Branch branch, double t0, double theta0, double t1, int steps) {
  check_branch_interval(f, t0, theta0, t1);
  if (steps < 1) throw std::invalid_argument("integrate_branch: steps must be positive");
  const double hp = f.half_period();
  const double h = (t1 - t0) / steps;
  BranchSolution sol;
  sol.t.reserve(static_cast<std::size_t>(steps) + 1);
  sol.theta.reserve(static_cast<std::size_t>(steps) + 1);
  double t = t0, y = theta0;
  sol.t.push_back(t);
  sol.theta.push_back(y);
  for (int i = 0; i < steps; ++i) {
    const double k1 = branch_rhs(f, branch, t, y);
    const double k2 = branch_rhs(f, branch, t + h / 2, y + h / 2 * k1);
    const double k3 = branch_rhs(f, branch, t + h / 2, y + h / 2 * k2);
    const double k4 = branch_rhs(f, branch, t + h, y + h * k3);
    y += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    t = t0 + (i + 1) * h;
    if (!std::isfinite(y) || y <= 0.0 || y >= hp)
      throw std::domain_error("integrate_branch: theta left (0, pi/d) at t = " + std::to_string(t));
    sol.t.push_back(t);
    sol.theta.push_back(y);
  }
  return sol;
}

double branch_ratio(const Profile& f, Branch branch, double t0, double theta0) {
  check_branch_interval(f, t0, theta0, t0);
  double ratio;
  if (branch == Branch::One) {
    ratio = std::tan(theta0) / std::tan(t0);
  } else {
    const double f0 = f.eval(t0, 0), f1 = f.eval(t0, 1);
    const double X = 2 * f0 * std::cos(t0) - f1 * std::sin(t0);
    const double Y = 2 * f0 * std::sin(t0) + f1 * std::cos(t0);
    ratio = std::tan(theta0) * X / Y;
  }
  if (!(ratio > 0.0) || !std::isfinite(ratio)) throw std::domain_error("branch: initial data give b/a <= 0");
  return ratio;
}

ThetaMap branch_theta(const Profile& f, Branch branch, double t0, double theta0) {
  const double c = branch_ratio(f, branch, t0, theta0);
  return branch == Branch::One ? ThetaMap::linear(1.0, c) : ThetaMap::scaled(1.0, c);
}

double branch_closed_form(const Profile& f, Branch branch, double t0, double theta0, double t) {
  return branch_theta(f, branch, t0, theta0).value(f, t);
}

Profile build_h_from_theta(const Profile& f, const ThetaMap& theta, double t0, double h0, int intervals,
                           int fit_terms) {
  const double hp = f.half_period();
  if (!(t0 > 0.0 && t0 < hp)) throw std::invalid_argument("build_h_from_theta: t0 must lie in (0, pi/d)");
  if (!(h0 > 0.0)) throw std::invalid_argument("build_h_from_theta: h0 must be positive");
  if (intervals < 16) throw std::invalid_argument("build_h_from_theta: too few intervals");

  // d log h(theta(s)) / ds from the k = 0 first-order equation solved for h'/h
  auto integrand = [&](double s) {
    const double th = theta.value(f, s);
    const double L = std::sin(s) * std::sin(s) + std::cos(s) * std::sin(s) * f.eval(s, 1) / (2 * f.eval(s, 0));
    const double S = std::sin(th), C = std::cos(th);
    return 2.0 * (L - S * S) / (S * C) * theta.derivative(f, s);
  };
  // 4-point Gauss-Legendre on [a, b]
  static const double gx[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563, 0.8611363115940526};
  static const double gw[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461, 0.3478548451374538};
  auto gauss = [&](double a, double b) {
    const double m = 0.5 * (a + b), r = 0.5 * (b - a);
    double acc = 0.0;
    for (int i = 0; i < 4; ++i) acc += gw[i] * integrand(m + r * gx[i]);
    return r * acc;
  };

  const auto ts = linspace(0.0, hp, static_cast<std::size_t>(intervals) + 1);
  std::vector<double> logh(ts.size(), 0.0);
  for (std::size_t i = 1; i < ts.size(); ++i) logh[i] = logh[i - 1] + gauss(ts[i - 1], ts[i]);
  const std::size_t j = std::min(static_cast<std::size_t>(t0 / hp * intervals), ts.size() - 2);
  const double at_t0 = logh[j] + gauss(ts[j], t0);
  const double shift = std::log(h0) - at_t0;

  std::vector<double> th(ts.size()), hv(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    th[i] = theta.value(f, ts[i]);
    hv[i] = std::exp(logh[i] + shift);
    if (!std::isfinite(hv[i]) || !std::isfinite(th[i]))
      throw std::domain_error("build_h_from_theta: log-derivative blew up near t = " + std::to_string(ts[i]));
  }
  if (std::abs(th.front()) > 1e-9 || std::abs(th.back() - hp) > 1e-9)
    throw std::domain_error("build_h_from_theta: theta does not fix the focal parameters 0 and pi/d");
  th.front() = 0.0;
  th.back() = hp;
  for (std::size_t i = 1; i < th.size(); ++i)
    if (!(th[i] > th[i - 1])) throw std::domain_error("build_h_from_theta: theta is not increasing");
  return Profile::sampled(f.d(), std::move(th), std::move(hv), fit_terms);
}

// ---------------------------------------------------------------- metric checks

MetricFn metric_of(const PlanarNorm& nm) {
  return [nm](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
    return nm.fundamental_tensor(Eigen::Vector2d(x(0), x(1)));
  };
}

MetricFn metric_of(const InducedNorm& nm) {
  return [nm](const Eigen::VectorXd& x) -> Eigen::MatrixXd { return fd_tensor(nm, x); };
}

std::vector<Eigen::VectorXd> indicatrix_samples(const PlanarNorm& nm, int count) {
  std::vector<Eigen::VectorXd> pts;
  for (int i = 0; i < count; ++i) {
    const double t = 2.0 * kPi * (i + 0.5) / count;
    const Eigen::Vector2d p = nm.indicatrix_point(t);
    pts.emplace_back(Eigen::VectorXd(p));
  }
  return pts;
}

std::vector<Eigen::VectorXd> indicatrix_samples(const InducedNorm& nm, int count, std::uint64_t seed, double margin) {
  std::mt19937_64 rng(seed);
  const double hp = nm.model().half_period();
  if (!(2.0 * margin < hp)) throw std::invalid_argument("indicatrix_samples: margin too wide");
  std::uniform_real_distribution<double> ut(margin, hp - margin);
  std::vector<Eigen::VectorXd> pts;
  for (int i = 0; i < count; ++i) pts.push_back(nm.indicatrix_point(nm.model().leaf_point(ut(rng), rng)));
  return pts;
}

Eigen::MatrixXd fd_jacobian(const PointMap& phi, const Eigen::VectorXd& x) {
  const Eigen::Index n = x.size();
  const double h = 1e-5 * x.norm();
  Eigen::MatrixXd J(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e(i) = h;
    J.col(i) = (phi(x + e) - phi(x - e)) / (2.0 * h);
  }
  return J;
}

double max_metric_residual(const MetricFn& g1, const MetricFn& g2, const PointMap& phi,
                           const std::vector<Eigen::VectorXd>& points, Exec exec) {
  const auto vals = sweep_map<double>(points.size(), [&](std::size_t i) {
    const Eigen::VectorXd& x = points[i];
    const Eigen::MatrixXd J = fd_jacobian(phi, x);
    const Eigen::MatrixXd diff = g1(x) - J.transpose() * g2(phi(x)) * J;
    return diff.cwiseAbs().maxCoeff();
  }, exec);
  return max_abs(vals);
}

double check_hessian_isometry(const PlanarNorm& F1, const PlanarNorm& F2, const PointMap& phi, int samples) {
  return max_metric_residual(metric_of(F1), metric_of(F2), phi, indicatrix_samples(F1, samples));
}

double check_hessian_isometry(const InducedNorm& F1, const InducedNorm& F2, const PointMap& phi, int samples,
                              std::uint64_t seed) {
  return max_metric_residual(metric_of(F1), metric_of(F2), phi, indicatrix_samples(F1, samples, seed));
}

Decomposition Decomposition::planar(double c) {
  Decomposition d;
  d.prime = Eigen::MatrixXd(2, 1);
  d.prime << std::cos(c), std::sin(c);
  d.dprime = Eigen::MatrixXd(2, 1);
  d.dprime << -std::sin(c), std::cos(c);
  return d;
}

Decomposition Decomposition::from_basis(const Eigen::MatrixXd& q, int k) {
  if (q.rows() != q.cols() || k < 0 || k > q.cols())
    throw std::invalid_argument("decomposition: need a square basis and 0 <= k <= n");
  if (!(q.transpose() * q).isIdentity(1e-10)) throw std::invalid_argument("decomposition: basis is not orthonormal");
  Decomposition d;
  d.prime = q.leftCols(k);
  d.dprime = q.rightCols(q.cols() - k);
  return d;
}

double d_property_residual(const MetricFn& g1, const MetricFn& g2, const PointMap& phi,
                           const Decomposition& dec, const Eigen::VectorXd& x) {
  const Eigen::VectorXd xs = dec.dprime * (dec.dprime.transpose() * x);
  const Eigen::VectorXd y = phi(x);
  const Eigen::VectorXd ys = dec.dprime * (dec.dprime.transpose() * y);
  return xs.dot(g1(x) * x) - ys.dot(g2(y) * y);
}

double check_d_property(const PlanarNorm& F1, const PlanarNorm& F2, const PointMap& phi,
                        const Decomposition& dec, int samples) {
  const auto pts = indicatrix_samples(F1, samples);
  const auto g1 = metric_of(F1), g2 = metric_of(F2);
  double m = 0.0;
  for (const auto& x : pts) m = std::max(m, std::abs(d_property_residual(g1, g2, phi, dec, x)));
  return m;
}

double check_d_property(const InducedNorm& F1, const InducedNorm& F2, const PointMap& phi,
                        const Decomposition& dec, int samples, std::uint64_t seed) {
  const auto pts = indicatrix_samples(F1, samples, seed);
  const auto g1 = metric_of(F1), g2 = metric_of(F2);
  const auto vals = sweep_map<double>(pts.size(), [&](std::size_t i) {
    return d_property_residual(g1, g2, phi, dec, pts[i]);
  });
  return max_abs(vals);
}

// ---------------------------------------------------------------- gluing

namespace {

double smooth_step(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / s), b = std::exp(-1.0 / (1.0 - s));
  return a / (a + b);
}

double smooth_step_derivative(double s) {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  const double a = std::exp(-1.0 / s), b = std::exp(-1.0 / (1.0 - s));
  return a * b * (1.0 / (s * s) + 1.0 / ((1.0 - s) * (1.0 - s))) / ((a + b) * (a + b));
}

struct Blend {
  std::size_t lo = 0;
  double beta = 0.0, dbeta = 0.0;
};

}  // namespace

GlueResult glue_construct(const Profile& f, const std::vector<Sector>& sectors, double w, int grid, int fit_terms) {
  const double hp = f.half_period();
  const int d = f.d();
  if (sectors.empty()) throw std::invalid_argument("glue: no sectors");
  if (!(w > 0.0)) throw std::invalid_argument("glue: blend width must be positive");
  if (grid < 64) throw std::invalid_argument("glue: grid too small");
  if (std::abs(sectors.front().t0) > 1e-9 || std::abs(sectors.back().t1 - hp) > 1e-9)
    throw std::invalid_argument("glue: sectors must cover [0, pi/d], the fundamental domain of D_2d");
  for (std::size_t i = 0; i < sectors.size(); ++i) {
    if (!(sectors[i].lambda > 0.0)) throw std::invalid_argument("glue: scales must be positive");
    if (!(sectors[i].t1 - sectors[i].t0 > w)) throw std::invalid_argument("glue: sector shorter than the blend band");
    if (i > 0 && std::abs(sectors[i].t0 - sectors[i - 1].t1) > 1e-9)
      throw std::invalid_argument("glue: sectors must be contiguous");
  }
  for (std::size_t i = 1; i < sectors.size(); ++i) {
    const double b = sectors[i].t0;
    if (b - w / 2 <= 0.0 || b + w / 2 >= hp) throw std::invalid_argument("glue: band reaches a focal parameter");
    if (i + 1 < sectors.size() && sectors[i + 1].t0 - b <= w) throw std::invalid_argument("glue: bands overlap");
  }
  const PlanarNorm base(f);
  const bool need_dual = std::any_of(sectors.begin(), sectors.end(),
                                     [](const Sector& s) { return s.mode == SectorMode::LegendreScale; });
  const Profile dual = need_dual ? dual_profile(base, 1024, fit_terms) : f;

  GlueResult out{IsometryTriple{f, f, ThetaMap::identity()}, {}, 0.0, 0.0, 0.0, 0.0};
  if (sectors.size() == 1) {
    const double lam2 = sectors[0].lambda * sectors[0].lambda;
    out.effective_scales = {sectors[0].lambda};
    if (sectors[0].mode == SectorMode::Scale)
      out.triple = IsometryTriple{f, f.scaled(1.0 / lam2), ThetaMap::identity()};
    else
      out.triple = IsometryTriple{f, dual.scaled(1.0 / lam2), ThetaMap::legendre()};
    out.fit_residual = out.triple.h.fit_residual();
    out.interior_residual = max_ode_residual(out.triple, 1024);
    return out;
  }

  auto theta_of = [&](std::size_t i, double t) {
    return sectors[i].mode == SectorMode::Scale ? t : theta_legendre(f, t);
  };
  auto dtheta_of = [&](std::size_t i, double t) {
    return sectors[i].mode == SectorMode::Scale ? 1.0 : theta_legendre_derivative(f, t);
  };
  auto hbase_of = [&](std::size_t i, double th) {
    return sectors[i].mode == SectorMode::Scale ? f.eval(th) : dual.eval(th);
  };
  // rescale later sectors so h is continuous across each band
  std::vector<double> lam(sectors.size());
  lam[0] = sectors[0].lambda;
  for (std::size_t i = 1; i < sectors.size(); ++i) {
    const double b = sectors[i].t0;
    const double prev = hbase_of(i - 1, theta_of(i - 1, b)) / (lam[i - 1] * lam[i - 1]);
    lam[i] = std::sqrt(hbase_of(i, theta_of(i, b)) / prev);
  }
  out.effective_scales = lam;

  // sector index and blend weight toward the next sector
  auto locate = [&](double t) {
    std::size_t s = 0;
    while (s + 1 < sectors.size() && t > sectors[s].t1) ++s;
    Blend b{s, 0.0, 0.0};
    double start = 0.0;
    if (s + 1 < sectors.size() && t > sectors[s].t1 - w / 2) {
      start = sectors[s].t1 - w / 2;
    } else if (s > 0 && t < sectors[s].t0 + w / 2) {
      b.lo = s - 1;
      start = sectors[s].t0 - w / 2;
    } else {
      return b;
    }
    b.beta = smooth_step((t - start) / w);
    b.dbeta = smooth_step_derivative((t - start) / w) / w;
    return b;
  };

  const auto ts = linspace(0.0, hp, static_cast<std::size_t>(grid));
  std::vector<double> th(ts.size()), dth(ts.size()), hv(ts.size());
  for (std::size_t j = 0; j < ts.size(); ++j) {
    const Blend bl = locate(ts[j]);
    const std::size_t lo = bl.lo, hi = std::min(lo + 1, sectors.size() - 1);
    const double beta = bl.beta;
    const double a0 = theta_of(lo, ts[j]), a1 = theta_of(hi, ts[j]);
    th[j] = (1 - beta) * a0 + beta * a1;
    dth[j] = (1 - beta) * dtheta_of(lo, ts[j]) + beta * dtheta_of(hi, ts[j]) + bl.dbeta * (a1 - a0);
    hv[j] = (1 - beta) * hbase_of(lo, th[j]) / (lam[lo] * lam[lo]) + beta * hbase_of(hi, th[j]) / (lam[hi] * lam[hi]);
  }
  th.front() = 0.0;
  th.back() = hp;
  for (std::size_t j = 1; j < th.size(); ++j)
    if (!(th[j] > th[j - 1])) throw std::domain_error("glue: assembled theta is not monotone");

  MonotoneCubic curve(d, ts, th, dth);
  Profile h = Profile::sampled(d, th, hv, fit_terms);
  out.fit_residual = h.fit_residual();
  out.triple = IsometryTriple{f, std::move(h), ThetaMap::sampled(std::move(curve))};

  auto in_band = [&](double t) {
    for (std::size_t i = 1; i < sectors.size(); ++i)
      if (std::abs(t - sectors[i].t0) <= w / 2) return true;
    return false;
  };
  const auto probe = interior_grid(0.0, hp, 1024);
  for (double t : probe) {
    double m = 0.0;
    for (double r : ode_residuals(out.triple, t)) m = std::max(m, std::abs(r));
    if (in_band(t)) {
      out.band_residual = std::max(out.band_residual, m);
      out.band_roundness = std::max(out.band_roundness, std::abs(f.eval(t, 1)) / f.eval(t));
    } else {
      out.interior_residual = std::max(out.interior_residual, m);
    }
  }
  return out;
}

const char* to_string(SectorLabel l) {
  switch (l) {
    case SectorLabel::IdentityType: return "IdentityType";
    case SectorLabel::LegendreType: return "LegendreType";
    case SectorLabel::Transition: return "Transition";
  }
  return "Transition";
}

std::vector<SectorInterval> classify_sectors(const IsometryTriple& tr, int grid, double tol) {
  const double hp = tr.f.half_period();
  const auto ts = interior_grid(0.0, hp, static_cast<std::size_t>(grid));
  // 0 identity only, 1 Legendre only, 2 both, 3 neither
  std::vector<int> code(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double th = tr.theta_at(ts[i]);
    const bool id = std::abs(th - ts[i]) <= tol;
    const bool lg = std::abs(th - theta_legendre(tr.f, ts[i])) <= tol;
    code[i] = id && lg ? 2 : id ? 0 : lg ? 1 : 3;
  }
  // points matching both forms take the label of the nearest point that decides
  std::vector<int> label(code);
  bool any = false;
  for (int c : code) any = any || c != 2;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (code[i] != 2) continue;
    if (!any) { label[i] = 0; continue; }
    for (std::size_t k = 1;; ++k) {
      if (i >= k && code[i - k] != 2) { label[i] = code[i - k]; break; }
      if (i + k < ts.size() && code[i + k] != 2) { label[i] = code[i + k]; break; }
    }
  }
  std::vector<SectorInterval> out;
  std::size_t start = 0;
  for (std::size_t i = 1; i <= ts.size(); ++i) {
    if (i < ts.size() && label[i] == label[start]) continue;
    SectorInterval s;
    s.t0 = start == 0 ? 0.0 : 0.5 * (ts[start - 1] + ts[start]);
    s.t1 = i == ts.size() ? hp : 0.5 * (ts[i - 1] + ts[i]);
    s.label = label[start] == 0 ? SectorLabel::IdentityType
              : label[start] == 1 ? SectorLabel::LegendreType : SectorLabel::Transition;
    out.push_back(s);
    start = i;
  }
  return out;
}

// ---------------------------------------------------------------- lifts

PointMap planar_lift(const IsometryTriple& tr) {
  return [tr](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    const double r = x.norm();
    if (r == 0.0) return Eigen::VectorXd::Zero(2);
    const double t = std::atan2(x(1), x(0));
    const double th = tr.theta_at(t);
    const double s = r * std::sqrt(tr.f.eval(t) / tr.h.eval(th));
    Eigen::VectorXd y(2);
    y << s * std::cos(th), s * std::sin(th);
    return y;
  };
}

PointMap lift_to_nd(const IsometryTriple& tr, const FoliationModel& m, double delta) {
  if (tr.f.d() != m.d()) throw std::invalid_argument("lift_to_nd: profile d does not match the foliation");
  return [tr, m, delta](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    const NormalPlane np = m.normal_plane_basis(x, delta);
    const double th = tr.theta_at(np.t);
    const double s = np.r * std::sqrt(tr.f.eval(np.t) / tr.h.eval(th));
    return s * (std::cos(th) * np.v1 + std::sin(th) * np.v2);
  };
}

}  // namespace isonorm
