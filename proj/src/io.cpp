#include "sixr/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

namespace sixr {

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // e.what() carries the byte offset and line/column of the failure.
    throw ParseError(std::string("invalid JSON in ") + what +
                     " input: " + e.what());
  }
}

double require_finite_number(const json& j, const std::string& field) {
  if (!j.is_number())
    throw ValidationError("field '" + field + "' must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v))
    throw ValidationError("field '" + field + "' must be finite");
  return v;
}

Vec3d require_vec3(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 3)
    throw ValidationError("field '" + field + "' must be an array of 3 numbers");
  Vec3d v;
  for (int i = 0; i < 3; ++i) v[i] = require_finite_number(j[i], field);
  return v;
}

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Posed pose_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("pose must be a JSON object");
  if (!j.contains("p")) throw ValidationError("pose is missing field 'p'");
  const Vec3d p = require_vec3(j.at("p"), "p");

  Vec3d x_axis, z_axis;
  if (j.contains("rotation")) {
    const json& r = j.at("rotation");
    if (!r.is_array() || r.size() != 9)
      throw ValidationError("field 'rotation' must be an array of 9 numbers (row-major)");
    double m[9];
    for (int i = 0; i < 9; ++i) m[i] = require_finite_number(r[i], "rotation");
    x_axis = Vec3d(m[0], m[3], m[6]);  // first column
    z_axis = Vec3d(m[2], m[5], m[8]);  // third column
  } else if (j.contains("x_axis") && j.contains("z_axis")) {
    x_axis = require_vec3(j.at("x_axis"), "x_axis");
    z_axis = require_vec3(j.at("z_axis"), "z_axis");
  } else {
    throw ValidationError("pose needs either 'rotation' or 'x_axis'+'z_axis'");
  }

  try {
    return pose_from_axes(p, x_axis, z_axis);
  } catch (const DegenerateAxes& e) {
    throw ValidationError(std::string("pose axes invalid: ") + e.what());
  }
}

}  // namespace

ArmParamsd parse_params(const std::string& json_text) {
  const json j = parse_json(json_text, "parameter");
  if (!j.is_object()) throw ValidationError("parameter file must be a JSON object");

  ArmParamsd params;
  const struct {
    const char* name;
    double* dst;
  } fields[] = {{"a2", &params.a2},
                {"a3", &params.a3},
                {"d4", &params.d4},
                {"d5", &params.d5},
                {"d6", &params.d6}};
  for (const auto& f : fields) {
    if (!j.contains(f.name))
      throw ValidationError(std::string("missing field '") + f.name + "'");
    *f.dst = require_finite_number(j.at(f.name), f.name);
  }
  if (params.a2 <= 0) throw ValidationError("field 'a2' must be positive");
  if (params.a3 <= 0) throw ValidationError("field 'a3' must be positive");
  if (params.d5 < 0) throw ValidationError("field 'd5' must be non-negative");
  if (params.d6 < 0) throw ValidationError("field 'd6' must be non-negative");
  // d4 may take either sign: it is a lateral offset, not a length.

  if (j.contains("joint_limits")) {
    const json& lims = j.at("joint_limits");
    if (!lims.is_array() || lims.size() != 6)
      throw ValidationError("field 'joint_limits' must be an array of 6 [lo, hi] pairs");
    constexpr double two_pi = 2 * std::numbers::pi;
    for (int i = 0; i < 6; ++i) {
      const json& pair = lims[i];
      if (!pair.is_array() || pair.size() != 2)
        throw ValidationError("field 'joint_limits' must be an array of 6 [lo, hi] pairs");
      const double lo = require_finite_number(pair[0], "joint_limits");
      const double hi = require_finite_number(pair[1], "joint_limits");
      if (lo >= hi)
        throw ValidationError("field 'joint_limits': lo must be below hi");
      if (lo < -two_pi || hi > two_pi)
        throw ValidationError("field 'joint_limits': bounds must lie in [-2pi, 2pi]");
      params.joint_limits(i, 0) = lo;
      params.joint_limits(i, 1) = hi;
    }
  }

  static const char* known[] = {"a2", "a3", "d4", "d5", "d6", "joint_limits"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known) ok = ok || it.key() == k;
    if (!ok)
      std::cerr << "warning: ignoring unknown parameter field '" << it.key()
                << "'\n";
  }
  return params;
}

ArmParamsd load_params(const std::string& path) {
  return parse_params(read_file(path));
}

Posed parse_pose(const std::string& json_text) {
  return pose_from_json(parse_json(json_text, "pose"));
}

Posed load_pose(const std::string& path) { return parse_pose(read_file(path)); }

std::vector<Posed> parse_waypoints(const std::string& json_text) {
  const json j = parse_json(json_text, "waypoint");
  if (!j.is_array()) throw ValidationError("waypoint file must be a JSON array of poses");
  std::vector<Posed> out;
  out.reserve(j.size());
  for (const json& jp : j) out.push_back(pose_from_json(jp));
  return out;
}

std::vector<Posed> load_waypoints(const std::string& path) {
  return parse_waypoints(read_file(path));
}

std::string pose_to_json(const Posed& pose) {
  auto vec = [](const Vec3d& v) {
    return "[" + fmt17(v.x()) + ", " + fmt17(v.y()) + ", " + fmt17(v.z()) + "]";
  };
  return "{\"p\": " + vec(pose.p) + ", \"x_axis\": " + vec(pose.x_axis) +
         ", \"z_axis\": " + vec(pose.z_axis) + "}";
}

std::string solutions_to_json(const std::vector<IkSolutiond>& sols) {
  std::string out = "[";
  for (size_t i = 0; i < sols.size(); ++i) {
    const IkSolutiond& s = sols[i];
    if (i) out += ",";
    out += "\n  {\"theta\": [";
    for (int k = 0; k < 6; ++k) {
      if (k) out += ", ";
      out += fmt17(s.angles[k]);
    }
    out += "], \"branch\": \"" + to_string(s.branch) + "\"";
    out += ", \"pos_residual\": " + fmt17(s.pos_residual);
    out += ", \"ori_residual\": " + fmt17(s.ori_residual) + "}";
  }
  out += "\n]";
  return out;
}

}  // namespace sixr
