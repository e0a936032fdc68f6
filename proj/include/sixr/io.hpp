#pragma once

// JSON input surface shared by the CLI and the test harness.
//
// Parameter files:
//   {"a2": 0.30, "a3": 0.25, "d4": 0.06, "d5": 0.08, "d6": 0.10,
//    "joint_limits": [[lo, hi] x 6]}        (joint_limits optional)
// Pose files, axes form or row-major rotation form:
//   {"p": [x, y, z], "x_axis": [..], "z_axis": [..]}
//   {"p": [x, y, z], "rotation": [r00, r01, ..., r22]}
// Waypoint files: a JSON array of pose objects.

#include <stdexcept>
#include <string>
#include <vector>

#include "sixr/types.hpp"

namespace sixr {

// Malformed JSON or a structurally wrong document.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Well-formed input whose values violate a model invariant; the message
// names the offending field.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

ArmParamsd parse_params(const std::string& json_text);
ArmParamsd load_params(const std::string& path);

Posed parse_pose(const std::string& json_text);
Posed load_pose(const std::string& path);

std::vector<Posed> parse_waypoints(const std::string& json_text);
std::vector<Posed> load_waypoints(const std::string& path);

// Serializers used by the CLI; doubles are printed with 17 significant
// digits so output files round-trip exactly.
std::string pose_to_json(const Posed& pose);
std::string solutions_to_json(const std::vector<IkSolutiond>& sols);

}  // namespace sixr
