#include "isonorm/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <random>
#include <sstream>

#include "isonorm/foliation.hpp"
#include "isonorm/hessian_nd.hpp"
#include "isonorm/isometry.hpp"
#include "isonorm/json_io.hpp"
#include "isonorm/planar.hpp"
#include "isonorm/profile.hpp"

namespace isonorm::cli {

namespace {

enum class Status { Ok, Marginal, Failed };

const char* status_name(Status s) {
  switch (s) {
    case Status::Ok: return "ok";
    case Status::Marginal: return "marginal";
    case Status::Failed: return "failed";
  }
  return "failed";
}

// input problems that are not usage errors: unreadable or invalid files
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class Report {
 public:
  explicit Report(std::string command) : command_(std::move(command)) {}

  Json inputs = Json::object();
  Json results = Json::object();

  // every residual goes through here so the status always reflects it
  void residual(const std::string& name, double value, double tol, Status on_exceed = Status::Failed) {
    residuals_[name] = std::isfinite(value) ? Json(value) : Json(nullptr);
    tolerances_[name] = tol;
    if (!(std::abs(value) <= tol)) worsen(on_exceed);
  }
  void worsen(Status s) {
    if (static_cast<int>(s) > static_cast<int>(status_)) status_ = s;
  }
  Status status() const { return status_; }

  Json to_json() const {
    Json j;
    j["command"] = command_;
    j["inputs"] = inputs;
    j["results"] = results;
    j["residuals"] = residuals_;
    j["tolerances"] = tolerances_;
    j["status"] = status_name(status_);
    return j;
  }

  int exit_code() const {
    switch (status_) {
      case Status::Ok: return kExitOk;
      case Status::Marginal: return kExitMarginal;
      case Status::Failed: return kExitFailed;
    }
    return kExitFailed;
  }

 private:
  std::string command_;
  Json residuals_ = Json::object();
  Json tolerances_ = Json::object();
  Status status_ = Status::Ok;
};

Json vec_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Json mat_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(vec_json(m.row(i).transpose()));
  return rows;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    std::size_t pos = 0;
    const double v = std::stod(item, &pos);
    if (pos != item.size()) throw CLI::ValidationError("--point", "bad number '" + item + "'");
    out.push_back(v);
  }
  return out;
}

std::vector<Sector> parse_sectors(const std::string& s) {
  std::vector<Sector> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    std::vector<std::string> parts;
    std::stringstream is(item);
    for (std::string p; std::getline(is, p, ':');) parts.push_back(p);
    if (parts.size() != 4) throw CLI::ValidationError("--sectors", "expected t0:t1:mode:lambda, got '" + item + "'");
    Sector sec;
    try {
      sec.t0 = std::stod(parts[0]);
      sec.t1 = std::stod(parts[1]);
      sec.lambda = std::stod(parts[3]);
    } catch (const std::logic_error&) {
      throw CLI::ValidationError("--sectors", "bad number in '" + item + "'");
    }
    if (parts[2] == "scale") sec.mode = SectorMode::Scale;
    else if (parts[2] == "legendre") sec.mode = SectorMode::LegendreScale;
    else throw CLI::ValidationError("--sectors", "mode must be 'scale' or 'legendre'");
    out.push_back(sec);
  }
  return out;
}

Profile load_profile(const std::string& path) {
  try {
    return profile_from_json(read_json_file(path));
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
}

IsometryTriple load_triple(const std::string& path) {
  try {
    return triple_from_json(read_json_file(path));
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
}

FoliationModel load_model(const std::string& spec) {
  try {
    return FoliationModel::parse(spec);
  } catch (const std::invalid_argument& e) {
    throw CLI::ValidationError("--model", e.what());
  }
}

Json check_json(const MinkowskiCheck& c) {
  Json j;
  j["valid"] = c.valid;
  j["validity"] = to_string(c.status);
  j["min_gap"] = c.min_gap;
  j["min_f"] = c.min_f;
  j["argmin"] = c.argmin;
  return j;
}

// validity gate shared by the commands that need a norm
bool gate(Report& rep, const MinkowskiCheck& c) {
  rep.results["validity"] = check_json(c);
  if (c.status == Validity::Invalid) {
    rep.worsen(Status::Failed);
    rep.results["error"] = "profile does not define a Minkowski norm";
    return false;
  }
  if (c.status == Validity::Marginal) rep.worsen(Status::Marginal);
  return true;
}

void fit_residual(Report& rep, const std::string& name, const Profile& p) {
  if (p.kind() == ProfileKind::Sampled) rep.residual(name, p.fit_residual(), Profile::kFitFlag, Status::Marginal);
}

struct Options {
  std::string profile, triple, model, format = "json", sectors, branch = "two", point, out_file;
  int grid = 0, samples = 0, count = 64, steps = 4096;
  double delta = kFocalGuard, t = NAN, t0 = NAN, theta0 = NAN, t1 = NAN, h0 = NAN, blend = kDefaultBlend;
  double tol = 1e-6;
  std::uint64_t seed = 1;
  bool degrees = false;
};

double display_angle(const Options& o, double a) { return o.degrees ? a * 180.0 / kPi : a; }

// ---------------------------------------------------------------- commands

void cmd_validate(const Options& o, Report& rep) {
  const int grid = o.grid > 0 ? o.grid : 1024;
  rep.inputs = {{"profile", o.profile}, {"grid", grid}};
  const Profile p = load_profile(o.profile);
  const MinkowskiCheck c = is_minkowski(p, grid);
  rep.results = check_json(c);
  rep.results["d"] = p.d();
  rep.results["kind"] = p.kind() == ProfileKind::CosineSeries ? "cosine" : "sampled";
  if (c.status == Validity::Invalid) rep.worsen(Status::Failed);
  if (c.status == Validity::Marginal) rep.worsen(Status::Marginal);
  fit_residual(rep, "fit_residual", p);
}

void cmd_dual(const Options& o, Report& rep) {
  const int grid = o.grid > 0 ? o.grid : 512;
  rep.inputs = {{"profile", o.profile}, {"grid", grid}};
  const Profile p = load_profile(o.profile);
  if (!gate(rep, is_minkowski(p))) return;
  const PlanarNorm nm(p);
  const Profile h = dual_profile(nm, grid);
  rep.results["dual"] = profile_to_json(h);
  std::vector<double> head(h.cos_coeffs().begin(), h.cos_coeffs().begin() + std::min<std::size_t>(4, h.cos_coeffs().size()));
  rep.results["dual_cos_coeffs"] = head;
  fit_residual(rep, "dual_fit_residual", h);

  const PlanarNorm dn = PlanarNorm::unchecked(h);
  double inv = 0.0, norm_pres = 0.0;
  for (const auto& x : indicatrix_samples(nm, 100)) {
    const Eigen::Vector2d xv(x(0), x(1));
    const Eigen::Vector2d y = nm.legendre_map(xv);
    inv = std::max(inv, (dn.legendre_map(y) - xv).norm() / xv.norm());
    norm_pres = std::max(norm_pres, std::abs(dn.value(y) - nm.value(xv)));
  }
  rep.residual("involution", inv, 1e-8);
  rep.residual("dual_norm_preservation", norm_pres, 1e-8);
}

Eigen::VectorXd pick_point(const Options& o, const FoliationModel& m, Json& inputs) {
  if (!o.point.empty()) {
    const auto v = parse_list(o.point);
    if (static_cast<int>(v.size()) != m.n())
      throw CLI::ValidationError("--point", "needs " + std::to_string(m.n()) + " coordinates");
    inputs["point"] = v;
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  }
  const double t = std::isnan(o.t) ? 0.5 * m.half_period() : o.t;
  if (t <= 2 * o.delta || t >= m.half_period() - 2 * o.delta)
    throw CLI::ValidationError("--t", "t must stay 2*delta away from 0 and pi/d");
  inputs["t"] = t;
  inputs["seed"] = o.seed;
  std::mt19937_64 rng(o.seed);
  return m.leaf_point(t, rng);
}

void cmd_tensor(const Options& o, Report& rep) {
  const FoliationModel m = load_model(o.model);
  rep.inputs = {{"model", m.name()}, {"profile", o.profile}, {"delta", o.delta}};
  const Profile p = load_profile(o.profile);
  if (p.d() != m.d()) throw InputError("profile d does not match the foliation");
  const Eigen::VectorXd x = pick_point(o, m, rep.inputs);
  const InducedNorm nm = InducedNorm::unchecked(m, p);
  const bool ok = gate(rep, nm.check());
  const TensorReport tr = fd_fundamental_tensor(nm, x);
  const TCoord tc = m.t_coord(x);
  rep.results["point"] = vec_json(x);
  rep.results["r"] = tc.r;
  rep.results["t"] = display_angle(o, tc.t);
  rep.results["g"] = mat_json(tr.g);
  rep.results["eigenvalues"] = vec_json(tr.eigenvalues);
  rep.results["positive_definite"] = tr.positive_definite;
  if (!ok) return;
  const auto spec = m.shape_spectrum(x, o.delta);
  const FrameComponents fc = frame_components(nm, x, spec);
  const FrameProjection pr = project_tensor(nm, x, tr.g, spec);
  auto comp = [&](const FrameComponents& c) {
    Json j;
    j["g_rr"] = c.g_rr;
    j["g_rt"] = c.g_rt;
    j["g_tt"] = c.g_tt;
    Json tang = Json::array();
    for (std::size_t i = 0; i < spec.size(); ++i)
      tang.push_back({{"k", spec[i].k}, {"kappa", spec[i].kappa}, {"multiplicity", spec[i].multiplicity},
                      {"factor", c.tangential[i]}});
    j["tangential"] = tang;
    return j;
  };
  rep.results["frame_closed_form"] = comp(fc);
  rep.results["frame_projected"] = comp(pr.components);
  double mis = std::max({std::abs(fc.g_rr - pr.components.g_rr), std::abs(fc.g_rt - pr.components.g_rt),
                         std::abs(fc.g_tt - pr.components.g_tt)});
  for (std::size_t i = 0; i < spec.size(); ++i) mis = std::max(mis, std::abs(fc.tangential[i] - pr.components.tangential[i]));
  rep.residual("frame_mismatch", mis, 1e-5);
  rep.residual("frame_offdiag", pr.max_offdiag, 1e-5);
  if (!tr.positive_definite) rep.worsen(Status::Failed);
}

std::vector<Eigen::VectorXd> sample_points(const Options& o, const FoliationModel& m, int count, Json& inputs) {
  std::vector<Eigen::VectorXd> pts;
  if (!o.point.empty()) {
    pts.push_back(pick_point(o, m, inputs));
    return pts;
  }
  inputs["seed"] = o.seed;
  inputs["samples"] = count;
  std::mt19937_64 rng(o.seed);
  const double hp = m.half_period();
  std::uniform_real_distribution<double> ut(2.5 * o.delta, hp - 2.5 * o.delta);
  for (int i = 0; i < count; ++i) pts.push_back(m.leaf_point(ut(rng), rng));
  return pts;
}

void cmd_curvature(const Options& o, Report& rep) {
  const FoliationModel m = load_model(o.model);
  rep.inputs = {{"model", m.name()}, {"profile", o.profile}, {"delta", o.delta}};
  const Profile p = load_profile(o.profile);
  if (p.d() != m.d()) throw InputError("profile d does not match the foliation");
  if (!gate(rep, is_minkowski(p))) return;
  const InducedNorm nm(m, p);
  const auto pts = sample_points(o, m, o.samples > 0 ? o.samples : 4, rep.inputs);
  Json points = Json::array();
  double mx = 0.0, floor = 0.0;
  for (const auto& x : pts) {
    const Eigen::VectorXd y = nm.indicatrix_point(x);
    const CurvatureReport c = riemann_fd(nm, y);
    mx = std::max(mx, c.max_abs_component);
    floor = std::max(floor, c.noise_floor);
    points.push_back({{"point", vec_json(y)}, {"t", display_angle(o, m.t_coord(y).t)},
                      {"max_abs_component", c.max_abs_component}, {"noise_floor", c.noise_floor}});
  }
  rep.results["points"] = points;
  rep.results["max_abs_component"] = mx;
  rep.results["threshold"] = kFlatThreshold;
  rep.results["flat"] = mx < kFlatThreshold;
  const FlatCandidate fc = flat_candidate(nm);
  rep.results["flat_candidate"] = {{"candidate", fc.candidate}, {"reason", fc.reason}, {"c1", fc.c1},
                                   {"c2", fc.c2}, {"fit_residual", fc.fit_residual},
                                   {"slope_at_pi_3", fc.slope_at_pi_3}};
  // the measurement is only meaningful when the round baseline sits under the threshold
  rep.residual("noise_floor", floor, kFlatThreshold, Status::Marginal);
}

void cmd_isoparametric(const Options& o, Report& rep) {
  const FoliationModel m = load_model(o.model);
  const int nt = o.grid > 0 ? o.grid : 10;
  const int nxi = o.samples > 0 ? o.samples : 8;
  rep.inputs = {{"model", m.name()}, {"profile", o.profile}, {"t_values", nt}, {"xi_per_t", nxi},
                {"seed", o.seed}, {"delta", o.delta}};
  const Profile p = load_profile(o.profile);
  if (p.d() != m.d()) throw InputError("profile d does not match the foliation");
  if (!gate(rep, is_minkowski(p))) return;
  const InducedNorm nm(m, p);
  const double hp = m.half_period();
  const auto ts = linspace(2.5 * o.delta, hp - 2.5 * o.delta, static_cast<std::size_t>(nt));
  std::mt19937_64 rng(o.seed);
  std::vector<Eigen::VectorXd> pts;
  for (double t : ts)
    for (int j = 0; j < nxi; ++j) pts.push_back(nm.indicatrix_point(m.leaf_point(t, rng)));
  struct Val {
    double grad, lap;
  };
  const auto vals = sweep_map<Val>(pts.size(), [&](std::size_t i) {
    return Val{fd_grad_t_norm(nm, pts[i]), fd_laplacian_t(nm, pts[i])};
  });
  Json rows = Json::array();
  double eg = 0.0, el = 0.0, sg = 0.0, sl = 0.0;
  for (std::size_t a = 0; a < ts.size(); ++a) {
    const double cg = indicatrix_grad_t_norm(nm, ts[a]);
    const double cl = indicatrix_laplacian_t(nm, ts[a], m.exact_spectrum(ts[a]));
    double gmin = INFINITY, gmax = -INFINITY, lmin = INFINITY, lmax = -INFINITY;
    for (int j = 0; j < nxi; ++j) {
      const Val& v = vals[a * static_cast<std::size_t>(nxi) + static_cast<std::size_t>(j)];
      gmin = std::min(gmin, v.grad);
      gmax = std::max(gmax, v.grad);
      lmin = std::min(lmin, v.lap);
      lmax = std::max(lmax, v.lap);
      eg = std::max(eg, std::abs(v.grad - cg));
      el = std::max(el, std::abs(v.lap - cl));
    }
    sg = std::max(sg, gmax - gmin);
    sl = std::max(sl, lmax - lmin);
    rows.push_back({{"t", display_angle(o, ts[a])}, {"grad_norm_closed", cg}, {"laplacian_closed", cl},
                    {"grad_norm_spread", gmax - gmin}, {"laplacian_spread", lmax - lmin}});
  }
  rep.results["rows"] = rows;
  rep.residual("grad_norm_error", eg, 1e-4);
  rep.residual("laplacian_error", el, 1e-4);
  rep.residual("grad_norm_spread", sg, 1e-5);
  rep.residual("laplacian_spread", sl, 1e-5);
}

Json ode_json(const IsometryTriple& tr, int grid) {
  const auto ts = interior_grid(0.0, tr.f.half_period(), static_cast<std::size_t>(grid));
  const auto rows = sweep_map<std::vector<double>>(ts.size(), [&](std::size_t i) { return ode_residuals(tr, ts[i]); });
  std::vector<double> per(rows.front().size(), 0.0);
  for (const auto& r : rows)
    for (std::size_t k = 0; k < r.size(); ++k) per[k] = std::max(per[k], std::isnan(r[k]) ? INFINITY : std::abs(r[k]));
  return per;
}

void write_out(const Options& o, const Json& j) {
  if (o.out_file.empty()) return;
  std::ofstream f(o.out_file);
  if (!f) throw InputError("cannot write '" + o.out_file + "'");
  f << j.dump(2) << "\n";
}

void cmd_solve(const Options& o, Report& rep) {
  const Profile f = load_profile(o.profile);
  const Branch br = o.branch == "one" ? Branch::One : Branch::Two;
  const double hp = f.half_period();
  // hp / 3 keeps the default start off t = pi/2, where every LinearMap meets when d = 1
  const double t0 = std::isnan(o.t0) ? hp / 3.0 : o.t0;
  const double th0 = !std::isnan(o.theta0) ? o.theta0 : br == Branch::One ? t0 : theta_legendre(f, t0);
  // the branch ODEs are singular where theta crosses pi/2, so the default run stops short of it
  const double t1 = std::isnan(o.t1) ? std::min(hp, 0.5 * kPi) - o.delta : o.t1;
  const int grid = o.grid > 0 ? o.grid : 512;
  rep.inputs = {{"profile", o.profile}, {"branch", o.branch}, {"t0", t0}, {"theta0", th0}, {"t1", t1},
                {"steps", o.steps}, {"grid", grid}};
  if (!gate(rep, is_minkowski(f))) return;
  BranchSolution sol;
  ThetaMap theta;
  try {
    sol = integrate_branch(f, br, t0, th0, t1, o.steps);
    theta = branch_theta(f, br, t0, th0);
  } catch (const std::invalid_argument& e) {
    throw CLI::ValidationError("isometry solve", e.what());
  } catch (const std::domain_error& e) {
    rep.results["error"] = e.what();
    rep.worsen(Status::Failed);
    return;
  }
  double err = 0.0;
  for (std::size_t i = 0; i < sol.t.size(); ++i) err = std::max(err, std::abs(sol.theta[i] - theta.value(f, sol.t[i])));
  rep.results["theta"] = theta_to_json(theta);
  rep.results["theta_at_t1"] = display_angle(o, sol.theta.back());
  rep.residual("branch_closed_form_error", err, 1e-6);
  const double defect = std::abs(theta.value(f, hp) - hp);
  rep.residual("equivariance_defect", defect, 1e-9);
  if (!(defect <= 1e-9)) {
    rep.results["note"] = "closed form does not fix pi/d, so no D_2d-invariant h exists";
    return;
  }
  const double h0 = std::isnan(o.h0) ? f.eval(th0) : o.h0;
  rep.inputs["h0"] = h0;
  const Profile h = build_h_from_theta(f, theta, t0, h0, 512, kGlueFitTerms);
  const IsometryTriple tr{f, h, theta};
  rep.results["triple"] = triple_to_json(tr);
  const Json per = ode_json(tr, grid);
  rep.results["ode_residual_by_equation"] = per;
  // the branch equations are the second-order and k = 0 equations with h eliminated;
  // the remaining k only hold for identity/Legendre type when d > 2
  rep.residual("reduced_ode_residual", std::max(per[0].get<double>(), per[1].get<double>()), 1e-6);
  double rest = 0.0;
  for (std::size_t k = 2; k < per.size(); ++k) rest = std::max(rest, per[k].get<double>());
  rep.results["other_k_residual"] = rest;
  rep.results["all_equations_hold"] = rest < 1e-6;
  fit_residual(rep, "h_fit_residual", h);
  write_out(o, triple_to_json(tr));
}

void cmd_check(const Options& o, Report& rep) {
  const IsometryTriple tr = load_triple(o.triple);
  const int grid = o.grid > 0 ? o.grid : 512;
  const int samples = o.samples > 0 ? o.samples : 16;
  rep.inputs = {{"triple", o.triple}, {"grid", grid}, {"samples", samples}, {"seed", o.seed}};
  rep.results["theta_kind"] = to_string(tr.theta.kind());
  const Json per = ode_json(tr, grid);
  rep.results["ode_residual_by_equation"] = per;
  double mx = 0.0;
  for (const auto& v : per) mx = std::max(mx, v.get<double>());
  rep.residual("max_ode_residual", mx, 1e-6);
  if (tr.theta.kind() == ThetaKind::SampledMonotone)
    rep.results["endpoint_derivative_mismatch"] = tr.theta.curve().endpoint_derivative_mismatch();
  const bool vf = gate(rep, is_minkowski(tr.f));
  const MinkowskiCheck ch = is_minkowski(tr.h);
  rep.results["h_validity"] = check_json(ch);
  if (!vf || ch.status == Validity::Invalid) {
    rep.worsen(Status::Failed);
    return;
  }
  double metric;
  if (o.model.empty()) {
    rep.inputs["lift"] = "planar";
    const PlanarNorm F1(tr.f), F2(tr.h);
    metric = check_hessian_isometry(F1, F2, planar_lift(tr), samples);
  } else {
    const FoliationModel m = load_model(o.model);
    if (m.d() != tr.f.d()) throw InputError("triple d does not match the foliation");
    rep.inputs["lift"] = m.name();
    const InducedNorm F1(m, tr.f), F2(m, tr.h);
    metric = check_hessian_isometry(F1, F2, lift_to_nd(tr, m, o.delta), samples, o.seed);
  }
  rep.residual("lift_metric_residual", metric, 1e-4);
}

Json intervals_json(const Options& o, const std::vector<SectorInterval>& iv) {
  Json arr = Json::array();
  for (const auto& s : iv)
    arr.push_back({{"t0", display_angle(o, s.t0)}, {"t1", display_angle(o, s.t1)}, {"label", to_string(s.label)}});
  return arr;
}

double transition_max(const std::vector<SectorInterval>& iv) {
  double m = 0.0;
  for (const auto& s : iv)
    if (s.label == SectorLabel::Transition) m = std::max(m, s.t1 - s.t0);
  return m;
}

void cmd_classify(const Options& o, Report& rep) {
  const IsometryTriple tr = load_triple(o.triple);
  const int grid = o.grid > 0 ? o.grid : 1024;
  rep.inputs = {{"triple", o.triple}, {"grid", grid}, {"tol", o.tol}};
  const auto iv = classify_sectors(tr, grid, o.tol);
  rep.results["intervals"] = intervals_json(o, iv);
  rep.results["longest_transition"] = transition_max(iv);
  // labels only mean something for an actual isometry
  rep.residual("max_ode_residual", max_ode_residual(tr, 512), 1e-6, Status::Marginal);
}

void cmd_glue(const Options& o, Report& rep) {
  const Profile f = load_profile(o.profile);
  const auto sectors = parse_sectors(o.sectors);
  const int grid = o.grid > 0 ? o.grid : 2049;
  rep.inputs = {{"profile", o.profile}, {"sectors", o.sectors}, {"blend", o.blend}, {"grid", grid}};
  if (!gate(rep, is_minkowski(f))) return;
  GlueResult g{IsometryTriple{f, f, ThetaMap::identity()}, {}, 0.0, 0.0, 0.0, 0.0};
  try {
    g = glue_construct(f, sectors, o.blend, grid);
  } catch (const std::invalid_argument& e) {
    throw CLI::ValidationError("--sectors", e.what());
  } catch (const std::exception& e) {
    rep.results["error"] = e.what();
    rep.worsen(Status::Failed);
    return;
  }
  rep.results["triple"] = triple_to_json(g.triple);
  rep.results["effective_scales"] = g.effective_scales;
  rep.results["band_roundness"] = g.band_roundness;
  const auto iv = classify_sectors(g.triple);
  rep.results["intervals"] = intervals_json(o, iv);
  rep.results["longest_transition"] = transition_max(iv);
  rep.residual("interior_ode_residual", g.interior_residual, 1e-6);
  rep.residual("band_ode_residual", g.band_residual, 1e-6, Status::Marginal);
  if (g.triple.h.kind() == ProfileKind::Sampled) rep.residual("h_fit_residual", g.fit_residual, Profile::kFitFlag, Status::Marginal);
  write_out(o, triple_to_json(g.triple));
}

void cmd_foliation_info(const Options& o, Report& rep) {
  const FoliationModel m = load_model(o.model);
  rep.inputs = {{"model", o.model}};
  rep.results["name"] = m.name();
  rep.results["d"] = m.d();
  rep.results["n"] = m.n();
  rep.results["half_period"] = display_angle(o, m.half_period());
  const auto fd = m.focal_dimensions();
  rep.results["focal_dimensions"] = {fd.first, fd.second};
  Json tab = Json::array();
  const auto mult = m.multiplicities();
  for (std::size_t k = 0; k < mult.size(); ++k)
    tab.push_back({{"k", k}, {"curvature", "cot(t + " + std::to_string(k) + " pi/" + std::to_string(m.d()) + ")"},
                   {"multiplicity", mult[k]}});
  rep.results["multiplicities"] = tab;
}

// returns the exit code; writes CSV itself
int cmd_sample(const Options& o, Report& rep, std::ostream& out) {
  const Profile p = load_profile(o.profile);
  rep.inputs = {{"profile", o.profile}, {"count", o.count}, {"format", o.format}, {"degrees", o.degrees}};
  if (!gate(rep, is_minkowski(p))) return -1;
  const PlanarNorm nm(p);
  const auto ts = linspace(0.0, 2.0 * kPi, static_cast<std::size_t>(o.count) + 1);
  Json rows = Json::array();
  double err = 0.0;
  for (int i = 0; i < o.count; ++i) {
    const double t = ts[static_cast<std::size_t>(i)];
    const Eigen::Vector2d x = nm.indicatrix_point(t);
    const double F = nm.value(x);
    err = std::max(err, std::abs(F - 1.0));
    rows.push_back({display_angle(o, t), x(0), x(1), F, display_angle(o, theta_legendre(p, t))});
  }
  rep.residual("indicatrix_error", err, 1e-12);
  if (o.format == "csv") {
    out << "t,x1,x2,F,theta_legendre\n" << std::setprecision(17);
    for (const auto& r : rows)
      out << r[0].get<double>() << "," << r[1].get<double>() << "," << r[2].get<double>() << ","
          << r[3].get<double>() << "," << r[4].get<double>() << "\n";
    return rep.exit_code();
  }
  rep.results["columns"] = {"t", "x1", "x2", "F", "theta_legendre"};
  rep.results["rows"] = rows;
  return -1;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"isonorm: Minkowski norms induced by isoparametric foliations"};
  app.require_subcommand(1);
  app.add_option("--format", o.format, "output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_flag("--degrees", o.degrees, "show angles in degrees (display only)");
  app.add_option("--seed", o.seed, "seed for randomized sampling");
  app.add_option("--delta", o.delta, "focal guard")->check(CLI::PositiveNumber);

  auto profile_opt = [&](CLI::App* c) { c->add_option("--profile", o.profile, "profile JSON file")->required(); };
  auto model_opt = [&](CLI::App* c, bool req) {
    auto* opt = c->add_option("--model", o.model, "d1:n | d2:n:k | cartan3");
    if (req) opt->required();
  };
  auto grid_opt = [&](CLI::App* c) { c->add_option("--grid", o.grid, "grid size")->check(CLI::PositiveNumber); };
  auto common = [&](CLI::App* c) {
    c->add_option("--format", o.format)->check(CLI::IsMember({"json", "csv"}));
    c->add_flag("--degrees", o.degrees);
    c->add_option("--seed", o.seed);
    c->add_option("--delta", o.delta)->check(CLI::PositiveNumber);
  };

  auto* validate = app.add_subcommand("validate", "check the Minkowski criterion");
  profile_opt(validate);
  grid_opt(validate);
  common(validate);

  auto* dual = app.add_subcommand("dual", "dual profile via the Legendre map");
  profile_opt(dual);
  grid_opt(dual);
  common(dual);

  auto* tensor = app.add_subcommand("tensor", "FD fundamental tensor against the frame formulas");
  profile_opt(tensor);
  model_opt(tensor, true);
  tensor->add_option("--point", o.point, "comma separated point");
  tensor->add_option("--t", o.t, "t of a seeded leaf point");
  common(tensor);

  auto* curvature = app.add_subcommand("curvature", "FD Riemann tensor of the Hessian metric");
  profile_opt(curvature);
  model_opt(curvature, true);
  curvature->add_option("--point", o.point);
  curvature->add_option("--t", o.t);
  curvature->add_option("--samples", o.samples)->check(CLI::PositiveNumber);
  common(curvature);

  auto* iso = app.add_subcommand("isoparametric-check", "grad and Laplacian of t on the indicatrix");
  profile_opt(iso);
  model_opt(iso, true);
  grid_opt(iso);
  iso->add_option("--samples", o.samples, "xi samples per t")->check(CLI::PositiveNumber);
  common(iso);

  auto* isometry = app.add_subcommand("isometry", "Hessian isometries fixing the t-coordinate");
  isometry->require_subcommand(1);
  common(isometry);
  auto* solve = isometry->add_subcommand("solve", "integrate a branch of the reduced ODE");
  profile_opt(solve);
  solve->add_option("--branch", o.branch)->check(CLI::IsMember({"one", "two"}));
  solve->add_option("--t0", o.t0);
  solve->add_option("--theta0", o.theta0);
  solve->add_option("--t1", o.t1);
  solve->add_option("--h0", o.h0)->check(CLI::PositiveNumber);
  solve->add_option("--steps", o.steps)->check(CLI::PositiveNumber);
  solve->add_option("--out", o.out_file, "also write the triple here");
  grid_opt(solve);
  common(solve);
  auto* check = isometry->add_subcommand("check", "ODE residuals and lifted metric check");
  check->add_option("--triple", o.triple)->required();
  model_opt(check, false);
  grid_opt(check);
  check->add_option("--samples", o.samples)->check(CLI::PositiveNumber);
  common(check);
  auto* classify = isometry->add_subcommand("classify", "label identity and Legendre sectors");
  classify->add_option("--triple", o.triple)->required();
  classify->add_option("--tol", o.tol)->check(CLI::PositiveNumber);
  grid_opt(classify);
  common(classify);
  auto* glue = isometry->add_subcommand("glue", "glue scale and Legendre sectors");
  profile_opt(glue);
  glue->add_option("--sectors", o.sectors, "t0:t1:scale|legendre:lambda,...")->required();
  glue->add_option("--blend", o.blend)->check(CLI::PositiveNumber);
  glue->add_option("--out", o.out_file);
  grid_opt(glue);
  common(glue);

  auto* sample = app.add_subcommand("sample", "indicatrix samples");
  profile_opt(sample);
  sample->add_option("--count", o.count)->check(CLI::PositiveNumber);
  common(sample);

  auto* foliation = app.add_subcommand("foliation", "foliation models");
  foliation->require_subcommand(1);
  auto* info = foliation->add_subcommand("info", "degree, focal dimensions and multiplicities");
  model_opt(info, true);
  common(info);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  std::string name;
  for (auto* c : app.get_subcommands()) {
    name = c->get_name();
    for (auto* s : c->get_subcommands()) name += " " + s->get_name();
  }
  if (o.format == "csv" && name != "sample") {
    err << "usage error: --format csv is only available for 'sample'\n";
    return kExitUsage;
  }

  Report rep(name);
  try {
    int code = -1;
    if (name == "validate") cmd_validate(o, rep);
    else if (name == "dual") cmd_dual(o, rep);
    else if (name == "tensor") cmd_tensor(o, rep);
    else if (name == "curvature") cmd_curvature(o, rep);
    else if (name == "isoparametric-check") cmd_isoparametric(o, rep);
    else if (name == "isometry solve") cmd_solve(o, rep);
    else if (name == "isometry check") cmd_check(o, rep);
    else if (name == "isometry classify") cmd_classify(o, rep);
    else if (name == "isometry glue") cmd_glue(o, rep);
    else if (name == "sample") code = cmd_sample(o, rep, out);
    else if (name == "foliation info") cmd_foliation_info(o, rep);
    if (code >= 0) return code;
  } catch (const CLI::ValidationError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    rep.results["error"] = e.what();
    rep.worsen(Status::Failed);
  }
  out << rep.to_json().dump(2) << "\n";
  return rep.exit_code();
}

}  // namespace isonorm::cli
