#pragma once

#include <functional>
#include <numbers>
#include <vector>

#include "isonorm/sweep.hpp"

namespace isonorm {

inline constexpr double kPi = std::numbers::pi;

enum class ProfileKind { CosineSeries, Sampled };

enum class Validity { Valid, Marginal, Invalid };

const char* to_string(Validity v);

struct MinkowskiCheck {
  bool valid = false;
  Validity status = Validity::Invalid;
  double min_gap = 0.0;
  double min_f = 0.0;
  double argmin = 0.0;  // where min_gap is attained, in [0, pi/d]
};

// f(t) = c0 + sum_j c_j cos(j d t). Sampled profiles keep their samples but
// evaluate through a least-squares cosine fit.
class Profile {
 public:
  // default fit size; callers resolving sharper features may ask for more terms
  static constexpr int kDefaultFitTerms = 32;
  static constexpr int kMaxFitTerms = 256;
  static constexpr double kFitFlag = 1e-8;

  static Profile cosine(int d, std::vector<double> coeffs);
  static Profile constant(int d, double c) { return cosine(d, {c}); }
  // grid must be strictly increasing inside [0, pi/d]
  static Profile sampled(int d, std::vector<double> grid, std::vector<double> values,
                         int max_terms = kDefaultFitTerms);

  int d() const { return d_; }
  ProfileKind kind() const { return kind_; }
  const std::vector<double>& cos_coeffs() const { return coeffs_; }
  const std::vector<double>& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  double fit_residual() const { return fit_residual_; }
  bool fit_flagged() const { return fit_residual_ > kFitFlag; }
  double half_period() const { return kPi / d_; }
  double period() const { return 2.0 * kPi / d_; }

  double eval(double t, int order = 0) const;
  long double eval_ld(long double t, int order = 0) const;
  double operator()(double t) const { return eval(t, 0); }

  // multiply f by s > 0
  Profile scaled(double s) const;

 private:
  Profile() = default;
  template <class T>
  T eval_impl(T t, int order) const;

  int d_ = 1;
  ProfileKind kind_ = ProfileKind::CosineSeries;
  std::vector<double> coeffs_;
  std::vector<double> grid_;
  std::vector<double> values_;
  double fit_residual_ = 0.0;
};

bool is_valid_d(int d);

// 2 f f'' - f'^2 + 4 f^2
double convexity_gap(const Profile& p, double t);

inline constexpr double kValidityTol = 1e-9;

MinkowskiCheck is_minkowski(const Profile& p, int grid_size = 1024, Exec exec = Exec::Parallel);

enum class PhiMode { AlphaBeta, Alpha1Alpha2 };

// AlphaBeta: f = phi(b cos t)^2 / 2 with d = 1. Alpha1Alpha2: f = phi(cos t)^2 / 2 with d = 2.
// Throws when phi <= 0 on the sampling grid unless allow_nonpositive is set.
Profile from_phi(const std::function<double(double)>& phi, double b, PhiMode mode,
                 int samples = 513, bool allow_nonpositive = false);

}  // namespace isonorm
