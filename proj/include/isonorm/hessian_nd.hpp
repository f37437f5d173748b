#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "isonorm/foliation.hpp"
#include "isonorm/profile.hpp"

namespace isonorm {

// F = r sqrt(2 f(t(x))) on R^n for an isoparametric foliation
class InducedNorm {
 public:
  InducedNorm(FoliationModel model, Profile profile);
  static InducedNorm unchecked(FoliationModel model, Profile profile);

  const FoliationModel& model() const { return model_; }
  const Profile& profile() const { return profile_; }
  const MinkowskiCheck& check() const { return check_; }
  int dim() const { return model_.n(); }

  double value(const Eigen::VectorXd& x) const;
  double energy(const Eigen::VectorXd& x) const;
  long double energy_ld(const Eigen::Matrix<long double, Eigen::Dynamic, 1>& x) const;
  // the point of S_F on the ray through u
  Eigen::VectorXd indicatrix_point(const Eigen::VectorXd& u) const;

 private:
  InducedNorm(FoliationModel model, Profile profile, MinkowskiCheck check);
  FoliationModel model_;
  Profile profile_;
  MinkowskiCheck check_;
};

struct TensorReport {
  Eigen::MatrixXd g;
  Eigen::VectorXd eigenvalues;
  bool positive_definite = false;
};

// central second differences of E with step 1e-4 |x|, evaluated in long double
TensorReport fd_fundamental_tensor(const InducedNorm& nm, const Eigen::VectorXd& x);
Eigen::MatrixXd fd_tensor(const InducedNorm& nm, const Eigen::VectorXd& x);
Eigen::VectorXd fd_energy_gradient(const InducedNorm& nm, const Eigen::VectorXd& x);

struct FrameComponents {
  double g_rr = 0.0, g_rt = 0.0, g_tt = 0.0;
  std::vector<double> tangential;  // g(v,v) / g_st(v,v), aligned with the spectrum
};

FrameComponents frame_components(const InducedNorm& nm, const Eigen::VectorXd& x,
                                 const std::vector<SpectrumEntry>& spectrum);

struct FrameProjection {
  FrameComponents components;
  double max_offdiag = 0.0;  // in the basis (d_r, T, eigenvectors)
};

// reads the frame components off an ambient tensor g at x
FrameProjection project_tensor(const InducedNorm& nm, const Eigen::VectorXd& x, const Eigen::MatrixXd& g,
                               const std::vector<SpectrumEntry>& spectrum);

struct CurvatureReport {
  double max_abs_component = 0.0;
  double noise_floor = 0.0;  // same estimate for the round norm at the same point
  bool flat = false;
};

inline constexpr double kFlatThreshold = 1e-3;

// Christoffel symbols Gamma[k](i, j) from FD derivatives of fd_tensor
std::vector<Eigen::MatrixXd> fd_christoffel(const InducedNorm& nm, const Eigen::VectorXd& x, double step = 1e-3);
double riemann_max_component(const InducedNorm& nm, const Eigen::VectorXd& x);
CurvatureReport riemann_fd(const InducedNorm& nm, const Eigen::VectorXd& x);

// closed forms on S_F
double indicatrix_grad_t_norm(const InducedNorm& nm, double t);
double indicatrix_laplacian_t(const InducedNorm& nm, double t, const std::vector<SpectrumEntry>& spectrum);

// ambient FD versions at a point x (on S_F for comparison with the closed forms)
double fd_grad_t_norm(const InducedNorm& nm, const Eigen::VectorXd& x);
double fd_laplacian_t(const InducedNorm& nm, const Eigen::VectorXd& x);

struct FlatCandidate {
  bool candidate = false;
  std::string reason;
  double c1 = 0.0, c2 = 0.0;     // best fit c1 + c2 cos 2t on the relevant slice
  double fit_residual = 0.0;
  double slope_at_pi_3 = 0.0;    // derivative of that fit at pi/3 (Cartan slice only)
};

// Euclidean-form test used before any curvature numerics. For the Cartan model the
// profile is read on the slice (a, b, 0, 0, z), where the foliation restricts to d = 1.
FlatCandidate flat_candidate(const InducedNorm& nm);

}  // namespace isonorm
