#include "isonorm/hessian_nd.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace isonorm {

namespace {

using LVec = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

constexpr long double kTensorStep = 1e-4L;

// central second differences of a scalar function in long double
template <class Fn>
Eigen::MatrixXd fd_hessian(Fn&& fn, const LVec& x, long double h) {
  const Eigen::Index n = x.size();
  Eigen::MatrixXd H(n, n);
  const long double f0 = fn(x);
  for (Eigen::Index i = 0; i < n; ++i) {
    LVec e = LVec::Zero(n);
    e(i) = h;
    H(i, i) = static_cast<double>((fn(x + e) - 2.0L * f0 + fn(x - e)) / (h * h));
    for (Eigen::Index j = i + 1; j < n; ++j) {
      LVec f = LVec::Zero(n);
      f(j) = h;
      const long double v = (fn(x + e + f) - fn(x + e - f) - fn(x - e + f) + fn(x - e - f)) / (4.0L * h * h);
      H(i, j) = H(j, i) = static_cast<double>(v);
    }
  }
  return H;
}

template <class Fn>
Eigen::VectorXd fd_grad(Fn&& fn, const LVec& x, long double h) {
  const Eigen::Index n = x.size();
  Eigen::VectorXd g(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    LVec e = LVec::Zero(n);
    e(i) = h;
    g(i) = static_cast<double>((fn(x + e) - fn(x - e)) / (2.0L * h));
  }
  return g;
}

}  // namespace

InducedNorm::InducedNorm(FoliationModel model, Profile profile, MinkowskiCheck check)
    : model_(std::move(model)), profile_(std::move(profile)), check_(check) {}

InducedNorm::InducedNorm(FoliationModel model, Profile profile)
    : model_(std::move(model)), profile_(std::move(profile)) {
  if (profile_.d() != model_.d())
    throw std::invalid_argument("induced norm: profile d does not match the foliation");
  check_ = is_minkowski(profile_);
  if (!check_.valid)
    throw std::invalid_argument(std::string("induced norm: profile is ") + to_string(check_.status));
}

InducedNorm InducedNorm::unchecked(FoliationModel model, Profile profile) {
  if (profile.d() != model.d())
    throw std::invalid_argument("induced norm: profile d does not match the foliation");
  MinkowskiCheck c = is_minkowski(profile);
  return InducedNorm(std::move(model), std::move(profile), c);
}

double InducedNorm::value(const Eigen::VectorXd& x) const {
  const double r = x.norm();
  if (r == 0.0) return 0.0;
  return r * std::sqrt(2.0 * profile_.eval(model_.t_coord(x).t));
}

double InducedNorm::energy(const Eigen::VectorXd& x) const {
  const double r2 = x.squaredNorm();
  if (r2 == 0.0) return 0.0;
  return r2 * profile_.eval(model_.t_coord(x).t);
}

long double InducedNorm::energy_ld(const LVec& x) const {
  const long double r2 = x.squaredNorm();
  if (r2 == 0.0L) return 0.0L;
  return r2 * profile_.eval_ld(model_.t_of<long double>(x));
}

Eigen::VectorXd InducedNorm::indicatrix_point(const Eigen::VectorXd& u) const {
  const Eigen::VectorXd v = u.normalized();
  return v / std::sqrt(2.0 * profile_.eval(model_.t_coord(v).t));
}

Eigen::MatrixXd fd_tensor(const InducedNorm& nm, const Eigen::VectorXd& x) {
  if (x.size() != nm.dim()) throw std::invalid_argument("fd_tensor: wrong dimension");
  const double r = x.norm();
  if (r == 0.0) throw std::invalid_argument("fd_tensor: x = 0");
  auto E = [&](const LVec& y) { return nm.energy_ld(y); };
  return fd_hessian(E, x.cast<long double>(), kTensorStep * r);
}

TensorReport fd_fundamental_tensor(const InducedNorm& nm, const Eigen::VectorXd& x) {
  TensorReport rep;
  rep.g = fd_tensor(nm, x);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rep.g, Eigen::EigenvaluesOnly);
  rep.eigenvalues = es.eigenvalues();
  rep.positive_definite = rep.eigenvalues.minCoeff() > 0.0;
  return rep;
}

Eigen::VectorXd fd_energy_gradient(const InducedNorm& nm, const Eigen::VectorXd& x) {
  auto E = [&](const LVec& y) { return nm.energy_ld(y); };
  return fd_grad(E, x.cast<long double>(), 1e-6L * x.norm());
}

FrameComponents frame_components(const InducedNorm& nm, const Eigen::VectorXd& x,
                                 const std::vector<SpectrumEntry>& spectrum) {
  const TCoord tc = nm.model().t_coord(x);
  const Profile& p = nm.profile();
  const double f = p.eval(tc.t, 0), f1 = p.eval(tc.t, 1), f2 = p.eval(tc.t, 2);
  FrameComponents c;
  c.g_rr = 2.0 * f;
  c.g_rt = tc.r * f1;
  c.g_tt = tc.r * tc.r * (f2 + 2.0 * f);
  for (const auto& e : spectrum) c.tangential.push_back(2.0 * f + e.kappa_exact * f1);
  return c;
}

FrameProjection project_tensor(const InducedNorm& nm, const Eigen::VectorXd& x, const Eigen::MatrixXd& g,
                               const std::vector<SpectrumEntry>& spectrum) {
  const NormalPlane np = nm.model().normal_plane_basis(x);
  const Eigen::VectorXd u = x / np.r;
  const double f = nm.profile().eval(np.t, 0), f1 = nm.profile().eval(np.t, 1);
  FrameProjection out;
  out.components.g_rr = u.dot(g * u);
  out.components.g_rt = np.r * u.dot(g * np.w);
  out.components.g_tt = np.r * np.r * np.w.dot(g * np.w);

  std::vector<Eigen::VectorXd> basis{u, np.r * np.w - np.r * f1 / (2.0 * f) * u};
  for (const auto& e : spectrum) {
    double acc = 0.0;
    for (Eigen::Index c = 0; c < e.basis.cols(); ++c) {
      const Eigen::VectorXd v = e.basis.col(c);
      acc += v.dot(g * v);
      basis.push_back(v);
    }
    out.components.tangential.push_back(acc / static_cast<double>(std::max<Eigen::Index>(1, e.basis.cols())));
  }
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = i + 1; j < basis.size(); ++j)
      out.max_offdiag = std::max(out.max_offdiag, std::abs(basis[i].dot(g * basis[j])));
  return out;
}

std::vector<Eigen::MatrixXd> fd_christoffel(const InducedNorm& nm, const Eigen::VectorXd& x, double step) {
  const Eigen::Index n = x.size();
  const double h = step * x.norm();
  std::vector<Eigen::MatrixXd> dg(static_cast<std::size_t>(n));  // dg[l] = d_l g
  for (Eigen::Index l = 0; l < n; ++l) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e(l) = h;
    dg[static_cast<std::size_t>(l)] = (fd_tensor(nm, x + e) - fd_tensor(nm, x - e)) / (2.0 * h);
  }
  const Eigen::MatrixXd ginv = fd_tensor(nm, x).inverse();
  std::vector<Eigen::MatrixXd> gam(static_cast<std::size_t>(n), Eigen::MatrixXd::Zero(n, n));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      Eigen::VectorXd low(n);  // Gamma_{ij,l}
      for (Eigen::Index l = 0; l < n; ++l)
        low(l) = 0.5 * (dg[static_cast<std::size_t>(i)](j, l) + dg[static_cast<std::size_t>(j)](i, l) -
                        dg[static_cast<std::size_t>(l)](i, j));
      const Eigen::VectorXd up = ginv * low;
      for (Eigen::Index k = 0; k < n; ++k) gam[static_cast<std::size_t>(k)](i, j) = up(k);
    }
  return gam;
}

double riemann_max_component(const InducedNorm& nm, const Eigen::VectorXd& xin) {
  const Eigen::VectorXd x = xin.normalized();
  const Eigen::Index n = x.size();
  const double h = 1e-3;
  const auto gam = fd_christoffel(nm, x);
  std::vector<std::vector<Eigen::MatrixXd>> dgam(static_cast<std::size_t>(n));  // dgam[j][l] = d_j Gamma^l
  for (Eigen::Index j = 0; j < n; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e(j) = h;
    const auto gp = fd_christoffel(nm, x + e);
    const auto gm = fd_christoffel(nm, x - e);
    auto& slot = dgam[static_cast<std::size_t>(j)];
    for (Eigen::Index l = 0; l < n; ++l)
      slot.push_back((gp[static_cast<std::size_t>(l)] - gm[static_cast<std::size_t>(l)]) / (2.0 * h));
  }
  const Eigen::MatrixXd g = fd_tensor(nm, x);
  auto G = [&](Eigen::Index l, Eigen::Index i, Eigen::Index j) { return gam[static_cast<std::size_t>(l)](i, j); };
  auto dG = [&](Eigen::Index j, Eigen::Index l, Eigen::Index i, Eigen::Index k) {
    return dgam[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)](i, k);
  };
  double mx = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index k = j + 1; k < n; ++k) {
        // R^l_{ijk} = d_j G^l_ik - d_k G^l_ij + G^l_jm G^m_ik - G^l_km G^m_ij
        Eigen::VectorXd up(n);
        for (Eigen::Index l = 0; l < n; ++l) {
          double v = dG(j, l, i, k) - dG(k, l, i, j);
          for (Eigen::Index m = 0; m < n; ++m) v += G(l, j, m) * G(m, i, k) - G(l, k, m) * G(m, i, j);
          up(l) = v;
        }
        mx = std::max(mx, (g * up).cwiseAbs().maxCoeff());
      }
  return mx;
}

CurvatureReport riemann_fd(const InducedNorm& nm, const Eigen::VectorXd& x) {
  CurvatureReport rep;
  rep.max_abs_component = riemann_max_component(nm, x);
  const InducedNorm round(nm.model(), Profile::constant(nm.model().d(), 0.5));
  rep.noise_floor = riemann_max_component(round, x);
  rep.flat = rep.max_abs_component < kFlatThreshold;
  return rep;
}

double indicatrix_grad_t_norm(const InducedNorm& nm, double t) {
  const Profile& p = nm.profile();
  const double f = p.eval(t, 0);
  return 4.0 * f * f / convexity_gap(p, t);
}

double indicatrix_laplacian_t(const InducedNorm& nm, double t, const std::vector<SpectrumEntry>& spectrum) {
  const Profile& p = nm.profile();
  const int d = nm.model().d();
  const double f = p.eval(t, 0), f1 = p.eval(t, 1), f2 = p.eval(t, 2), f3 = p.eval(t, 3);
  const double gap = convexity_gap(p, t);
  const double r2 = 1.0 / (2.0 * f);

  // the d_r d_r term vanishes; T carries the d_t coefficient of nabla_T T
  const double g_TT = r2 * gap / (2.0 * f);
  const double cT = (f1 * f1 * f1 - 2.0 * f * f1 * f2 + f * f * f3) / (4.0 * f * f * f - f * f1 * f1 + 2.0 * f * f * f2);
  double lap = -cT / g_TT;

  // frame fields X_i with f_i = a_i sin^2(t + k pi / d); a_i cancels, so take a_i = 1
  for (const auto& e : spectrum) {
    const double s = t + e.k * kPi / d;
    const double fi = std::sin(s) * std::sin(s), fi1 = std::sin(2.0 * s), fi2 = 2.0 * std::cos(2.0 * s);
    const double cX = (fi1 * f1 * f1 - 4.0 * f * f * fi1 - f * fi1 * f2 - f * f1 * fi2) /
                      (8.0 * f * f - 2.0 * f1 * f1 + 4.0 * f * f2);
    const double g_ii = r2 * (2.0 * fi * f + 0.5 * fi1 * f1);
    lap -= e.multiplicity * cX / g_ii;
  }
  return lap;
}

double fd_grad_t_norm(const InducedNorm& nm, const Eigen::VectorXd& x) {
  auto tf = [&](const LVec& y) { return nm.model().t_of<long double>(y); };
  const Eigen::VectorXd dt = fd_grad(tf, x.cast<long double>(), 1e-5L * x.norm());
  const Eigen::MatrixXd g = fd_tensor(nm, x);
  return dt.dot(g.ldlt().solve(dt));
}

double fd_laplacian_t(const InducedNorm& nm, const Eigen::VectorXd& x) {
  auto tf = [&](const LVec& y) { return nm.model().t_of<long double>(y); };
  const LVec xl = x.cast<long double>();
  const Eigen::VectorXd dt = fd_grad(tf, xl, 1e-5L * x.norm());
  const Eigen::MatrixXd ddt = fd_hessian(tf, xl, 1e-4L * x.norm());
  const Eigen::MatrixXd ginv = fd_tensor(nm, x).inverse();
  const auto gam = fd_christoffel(nm, x);
  const Eigen::Index n = x.size();
  double lap = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      double v = ddt(i, j);
      for (Eigen::Index k = 0; k < n; ++k) v -= gam[static_cast<std::size_t>(k)](i, j) * dt(k);
      lap += ginv(i, j) * v;
    }
  return lap;
}

namespace {

struct CosFit {
  double c1, c2, residual;
};

// least squares fit of c1 + c2 cos 2t to samples of fn on [0, b]
template <class Fn>
CosFit fit_euclidean_form(Fn&& fn, double b) {
  const auto ts = linspace(0.0, b, 721);
  Eigen::MatrixXd A(static_cast<Eigen::Index>(ts.size()), 2);
  Eigen::VectorXd y(A.rows());
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    const double t = ts[static_cast<std::size_t>(i)];
    A(i, 0) = 1.0;
    A(i, 1) = std::cos(2.0 * t);
    y(i) = fn(t);
  }
  const Eigen::Vector2d c = A.colPivHouseholderQr().solve(y);
  return {c(0), c(1), (A * c - y).cwiseAbs().maxCoeff()};
}

}  // namespace

FlatCandidate flat_candidate(const InducedNorm& nm) {
  constexpr double tol = 1e-9;
  const Profile& p = nm.profile();
  FlatCandidate out;
  const int d = nm.model().d();
  CosFit fit;
  if (d == 3) {
    // on (a, b, 0, 0, z) the Cartan polynomial is 4a^3 - 3a = cos 3t1, so the slice carries
    // the d = 1 profile f(fold(t1)) in its own polar angle t1 in [0, pi]
    fit = fit_euclidean_form([&](double t1) { return p.eval(fold_angle(t1, 3)); }, kPi);
  } else {
    fit = fit_euclidean_form([&](double t) { return p.eval(t); }, kPi / d);
  }
  out.c1 = fit.c1;
  out.c2 = fit.c2;
  out.fit_residual = fit.residual;
  if (d == 3) {
    // the slice profile is symmetric about pi/3, so a Euclidean slice needs zero slope there
    out.slope_at_pi_3 = -2.0 * fit.c2 * std::sin(2.0 * kPi / 3.0);
    if (std::abs(out.slope_at_pi_3) > tol) {
      out.reason = "slice fit has f'(pi/3) != 0, which would force c2 = 0";
      return out;
    }
  }
  if (fit.residual > tol) {
    out.reason = "profile is not of the form c1 + c2 cos 2t on the slice";
    return out;
  }
  if (!(fit.c1 > std::abs(fit.c2))) {
    out.reason = "Euclidean form with c1 <= |c2| is not a norm";
    return out;
  }
  out.candidate = true;
  out.reason = d == 3 ? "round profile" : "quadratic energy";
  return out;
}

}  // namespace isonorm
