#pragma once

#include "json.hpp"
#include <string>

#include "isonorm/isometry.hpp"
#include "isonorm/profile.hpp"

namespace isonorm {

using Json = nlohmann::ordered_json;

// {"d", "kind": "cosine", "cos_coeffs"} or {"d", "kind": "sampled", "grid", "values"}
Json profile_to_json(const Profile& p);
Profile profile_from_json(const Json& j);

// {"kind": <ThetaKind name>, ...params}; SampledMonotone carries "grid" and "values"
Json theta_to_json(const ThetaMap& m);
ThetaMap theta_from_json(const Json& j, int d);

Json triple_to_json(const IsometryTriple& tr);
IsometryTriple triple_from_json(const Json& j);

Json read_json_file(const std::string& path);

}  // namespace isonorm
