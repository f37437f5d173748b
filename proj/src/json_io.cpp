#include "isonorm/json_io.hpp"

#include <fstream>
#include <stdexcept>

namespace isonorm {

namespace {

std::vector<double> num_array(const Json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array()) throw std::invalid_argument(std::string("missing array '") + key + "'");
  std::vector<double> out;
  for (const auto& v : j[key]) {
    if (!v.is_number()) throw std::invalid_argument(std::string("non-numeric entry in '") + key + "'");
    out.push_back(v.get<double>());
  }
  return out;
}

double num(const Json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number()) throw std::invalid_argument(std::string("missing number '") + key + "'");
  return j[key].get<double>();
}

}  // namespace

Json profile_to_json(const Profile& p) {
  Json j;
  j["d"] = p.d();
  if (p.kind() == ProfileKind::CosineSeries) {
    j["kind"] = "cosine";
    j["cos_coeffs"] = p.cos_coeffs();
  } else {
    j["kind"] = "sampled";
    j["grid"] = p.grid();
    j["values"] = p.values();
    j["fit_terms"] = p.cos_coeffs().size();
    j["fit_residual"] = p.fit_residual();
  }
  return j;
}

Profile profile_from_json(const Json& j) {
  if (!j.is_object()) throw std::invalid_argument("profile must be a JSON object");
  if (!j.contains("d") || !j["d"].is_number_integer()) throw std::invalid_argument("profile needs integer 'd'");
  const int d = j["d"].get<int>();
  const std::string kind = j.value("kind", std::string("cosine"));
  if (kind == "cosine") return Profile::cosine(d, num_array(j, "cos_coeffs"));
  if (kind == "sampled") {
    const int terms = j.value("fit_terms", Profile::kDefaultFitTerms);
    if (terms < 1 || terms > Profile::kMaxFitTerms) throw std::invalid_argument("profile fit_terms out of range");
    return Profile::sampled(d, num_array(j, "grid"), num_array(j, "values"), terms);
  }
  throw std::invalid_argument("profile kind must be 'cosine' or 'sampled'");
}

Json theta_to_json(const ThetaMap& m) {
  Json j;
  j["kind"] = to_string(m.kind());
  switch (m.kind()) {
    case ThetaKind::LinearMap:
    case ThetaKind::ScaledLegendre:
      j["a"] = m.a();
      j["b"] = m.b();
      break;
    case ThetaKind::SampledMonotone:
      j["grid"] = m.curve().grid();
      j["values"] = m.curve().values();
      if (m.curve().given_slopes()) j["slopes"] = m.curve().slopes();
      j["endpoint_derivative_mismatch"] = m.curve().endpoint_derivative_mismatch();
      break;
    default:
      break;
  }
  return j;
}

ThetaMap theta_from_json(const Json& j, int d) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw std::invalid_argument("theta needs a string 'kind'");
  const std::string k = j["kind"].get<std::string>();
  if (k == "Identity") return ThetaMap::identity();
  if (k == "LinearMap") return ThetaMap::linear(num(j, "a"), num(j, "b"));
  if (k == "LegendreClosedForm") return ThetaMap::legendre();
  if (k == "ScaledLegendre") return ThetaMap::scaled(num(j, "a"), num(j, "b"));
  if (k == "SampledMonotone") {
    if (j.contains("slopes"))
      return ThetaMap::sampled(MonotoneCubic(d, num_array(j, "grid"), num_array(j, "values"), num_array(j, "slopes")));
    return ThetaMap::sampled(MonotoneCubic(d, num_array(j, "grid"), num_array(j, "values")));
  }
  throw std::invalid_argument("unknown theta kind '" + k + "'");
}

Json triple_to_json(const IsometryTriple& tr) {
  Json j;
  j["f"] = profile_to_json(tr.f);
  j["h"] = profile_to_json(tr.h);
  j["theta"] = theta_to_json(tr.theta);
  return j;
}

IsometryTriple triple_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("f") || !j.contains("h") || !j.contains("theta"))
    throw std::invalid_argument("triple needs 'f', 'h' and 'theta'");
  Profile f = profile_from_json(j["f"]);
  Profile h = profile_from_json(j["h"]);
  if (f.d() != h.d()) throw std::invalid_argument("triple: f and h have different d");
  ThetaMap th = theta_from_json(j["theta"], f.d());
  return IsometryTriple{std::move(f), std::move(h), std::move(th)};
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw std::invalid_argument("'" + path + "' is not valid JSON: " + e.what());
  }
}

}  // namespace isonorm
