#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "isonorm/foliation.hpp"
#include "isonorm/hessian_nd.hpp"
#include "isonorm/planar.hpp"
#include "isonorm/profile.hpp"

namespace isonorm {

// Monotone cubic Hermite interpolant of theta on [0, pi/d], extended to R by
// theta(-t) = -theta(t) and theta(t + 2 pi / d) = theta(t) + 2 pi / d.
class MonotoneCubic {
 public:
  MonotoneCubic() = default;
  // values must increase strictly; the endpoint values are pinned to 0 and pi/d
  MonotoneCubic(int d, std::vector<double> grid, std::vector<double> values);
  // Hermite data with known slopes; the limiter still applies
  MonotoneCubic(int d, std::vector<double> grid, std::vector<double> values, std::vector<double> slopes);

  int d() const { return d_; }
  const std::vector<double>& grid() const { return x_; }
  const std::vector<double>& values() const { return y_; }
  const std::vector<double>& slopes() const { return m_; }
  bool given_slopes() const { return given_slopes_; }
  double value(double t) const;
  double derivative(double t) const;
  // gap between one-sided and symmetric slope estimates at the two focal parameters
  double endpoint_derivative_mismatch() const { return endpoint_mismatch_; }

 private:
  void init(std::vector<double>* slopes);
  double eval_base(double u, bool deriv) const;
  int d_ = 1;
  bool given_slopes_ = false;
  std::vector<double> x_, y_, m_;
  double endpoint_mismatch_ = 0.0;
};

enum class ThetaKind { Identity, LinearMap, LegendreClosedForm, ScaledLegendre, SampledMonotone };

const char* to_string(ThetaKind k);

class ThetaMap {
 public:
  static ThetaMap identity();
  static ThetaMap linear(double a, double b);
  static ThetaMap legendre();
  static ThetaMap scaled(double a, double b);
  static ThetaMap sampled(MonotoneCubic curve);

  ThetaKind kind() const { return kind_; }
  double a() const { return a_; }
  double b() const { return b_; }
  const MonotoneCubic& curve() const { return curve_; }

  // closed forms that depend on the source profile take it as an argument
  double value(const Profile& f, double t) const;
  double derivative(const Profile& f, double t) const;

 private:
  ThetaKind kind_ = ThetaKind::Identity;
  double a_ = 1.0, b_ = 1.0;
  MonotoneCubic curve_;
};

struct IsometryTriple {
  Profile f;
  Profile h;
  ThetaMap theta;

  double theta_at(double t) const { return theta.value(f, t); }
  double theta_prime(double t) const { return theta.derivative(f, t); }
};

// [second-order equation, then the first-order equation for k = 0..d-1]
std::vector<double> ode_residuals(const IsometryTriple& tr, double t);

// max |residual| over an interior grid of [0, pi/d]
double max_ode_residual(const IsometryTriple& tr, int grid = 512, Exec exec = Exec::Parallel);

struct QuadraticRoots {
  double A = 0.0, B = 0.0, C = 0.0;
  double discriminant = 0.0;         // B^2 - 4AC
  double discriminant_closed = 0.0;  // squared closed form
  std::array<double, 2> roots{};
  bool outside_d_gt_2 = false;       // d <= 2: A > 0 is not guaranteed there
};

QuadraticRoots quadratic_and_roots(const Profile& f, double t, double theta);

enum class Branch { One, Two };

struct BranchSolution {
  std::vector<double> t;
  std::vector<double> theta;
};

BranchSolution integrate_branch(const Profile& f, Branch branch, double t0, double theta0, double t1,
                                int steps = 4096);
// b / a of the closed-form member through (t0, theta0): LinearMap(1, c) for One, ScaledLegendre(1, c) for Two
double branch_ratio(const Profile& f, Branch branch, double t0, double theta0);
ThetaMap branch_theta(const Profile& f, Branch branch, double t0, double theta0);
// closed-form solution of the same initial value problem
double branch_closed_form(const Profile& f, Branch branch, double t0, double theta0, double t);

Profile build_h_from_theta(const Profile& f, const ThetaMap& theta, double t0, double h0, int intervals = 512,
                           int fit_terms = Profile::kDefaultFitTerms);

using PointMap = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using MetricFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

// the returned functions hold their own copy of the norm
MetricFn metric_of(const PlanarNorm& nm);
MetricFn metric_of(const InducedNorm& nm);

// planar: uniform grid in the polar angle; n-dim: seeded leaf points with t at least
// `margin` away from the focal parameters
std::vector<Eigen::VectorXd> indicatrix_samples(const PlanarNorm& nm, int count);
std::vector<Eigen::VectorXd> indicatrix_samples(const InducedNorm& nm, int count, std::uint64_t seed,
                                                double margin = 2.0 * kFocalGuard);

Eigen::MatrixXd fd_jacobian(const PointMap& phi, const Eigen::VectorXd& x);

double max_metric_residual(const MetricFn& g1, const MetricFn& g2, const PointMap& phi,
                           const std::vector<Eigen::VectorXd>& points, Exec exec = Exec::Parallel);

double check_hessian_isometry(const PlanarNorm& F1, const PlanarNorm& F2, const PointMap& phi, int samples);
double check_hessian_isometry(const InducedNorm& F1, const InducedNorm& F2, const PointMap& phi, int samples,
                              std::uint64_t seed = 1);

struct Decomposition {
  Eigen::MatrixXd prime;   // orthonormal columns spanning V'
  Eigen::MatrixXd dprime;  // orthonormal columns spanning V''
  // V' = span(cos c, sin c), V'' its orthogonal complement
  static Decomposition planar(double c);
  // first k columns of an orthogonal matrix span V'
  static Decomposition from_basis(const Eigen::MatrixXd& q, int k);
};

// g1_x(x'', x) - g2_{phi x}(phi(x)'', phi(x))
double d_property_residual(const MetricFn& g1, const MetricFn& g2, const PointMap& phi,
                           const Decomposition& dec, const Eigen::VectorXd& x);
double check_d_property(const PlanarNorm& F1, const PlanarNorm& F2, const PointMap& phi,
                        const Decomposition& dec, int samples);
double check_d_property(const InducedNorm& F1, const InducedNorm& F2, const PointMap& phi,
                        const Decomposition& dec, int samples, std::uint64_t seed = 1);

enum class SectorMode { Scale, LegendreScale };

struct Sector {
  double t0 = 0.0, t1 = 0.0;
  SectorMode mode = SectorMode::Scale;
  double lambda = 1.0;
};

struct GlueResult {
  IsometryTriple triple;
  std::vector<double> effective_scales;  // the lambda actually used per sector
  double interior_residual = 0.0;        // max ode residual away from the bands
  double band_residual = 0.0;            // max ode residual inside the bands
  double band_roundness = 0.0;           // max |f'| / f over the bands
  double fit_residual = 0.0;             // of the assembled h
};

inline constexpr double kDefaultBlend = 0.02;
inline constexpr int kGlueFitTerms = 128;

GlueResult glue_construct(const Profile& f_base, const std::vector<Sector>& sectors,
                          double blend_width = kDefaultBlend, int grid = 2049, int fit_terms = kGlueFitTerms);

enum class SectorLabel { IdentityType, LegendreType, Transition };

const char* to_string(SectorLabel l);

struct SectorInterval {
  double t0 = 0.0, t1 = 0.0;
  SectorLabel label = SectorLabel::Transition;
};

std::vector<SectorInterval> classify_sectors(const IsometryTriple& tr, int grid = 1024, double tol = 1e-6);

// (r, t) -> (r sqrt(f(t) / h(theta)), theta(t)) in the plane, and along normal planes in R^n
PointMap planar_lift(const IsometryTriple& tr);
PointMap lift_to_nd(const IsometryTriple& tr, const FoliationModel& m, double delta = kFocalGuard);

}  // namespace isonorm
