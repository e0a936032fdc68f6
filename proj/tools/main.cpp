// Command-line front end for the 6R kinematics library.
//
// Subcommands:
//   solve     closed-form IK for one pose
//   fk        forward kinematics for one joint vector
//   validate  seeded joint-space round-trip experiment, CSV/SVG scatter
//   bench     analytic solver vs damped-least-squares baseline
//   traj      branch-continuous IK along a waypoint list
//
// Exit codes: 0 success, 1 usage error, 2 invalid input, 3 solver failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sixr/fk.hpp"
#include "sixr/harness.hpp"
#include "sixr/ik.hpp"
#include "sixr/io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitBadInput = 2;
constexpr int kExitSolverFailure = 3;

sixr::Posed read_pose_arg(const std::string& arg) {
  // Inline JSON object or a path to a pose file.
  const size_t first = arg.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && arg[first] == '{')
    return sixr::parse_pose(arg);
  return sixr::load_pose(arg);
}

void print_solution_text(const sixr::IkSolutiond& s) {
  std::printf("branch %s  theta = [", sixr::to_string(s.branch).c_str());
  for (int i = 0; i < 6; ++i)
    std::printf("%s%.12g", i ? ", " : "", s.angles[i]);
  std::printf("] rad  pos_residual %.3g m  ori_residual %.3g rad\n",
              s.pos_residual, s.ori_residual);
}

int run_solve(const std::string& params_path, const std::string& pose_arg,
              bool all_branches, bool as_json) {
  const sixr::ArmParamsd params = sixr::load_params(params_path);
  const sixr::Posed pose = read_pose_arg(pose_arg);

  const sixr::IkOutcome<double> outcome = sixr::ik_solve(pose, params);
  if (!outcome.ok()) {
    const sixr::IkFailure& f =
        outcome.failure.value_or(sixr::IkFailure{});
    std::cerr << "no solution: " << sixr::to_string(f.kind) << ": " << f.detail
              << "\n";
    return kExitSolverFailure;
  }

  std::vector<sixr::IkSolutiond> chosen;
  if (all_branches) {
    chosen = outcome.solutions;
  } else {
    const sixr::IkSolutiond* best = &outcome.solutions.front();
    for (const sixr::IkSolutiond& s : outcome.solutions)
      if (s.pos_residual < best->pos_residual) best = &s;
    chosen.push_back(*best);
  }

  if (as_json) {
    std::cout << sixr::solutions_to_json(chosen) << "\n";
  } else {
    for (const sixr::IkSolutiond& s : chosen) print_solution_text(s);
  }
  return kExitOk;
}

int run_fk(const std::string& params_path, const std::vector<double>& angles) {
  const sixr::ArmParamsd params = sixr::load_params(params_path);
  sixr::Jointsd q;
  for (int i = 0; i < 6; ++i) q[i] = angles[size_t(i)];
  std::cout << sixr::pose_to_json(sixr::fk(q, params)) << "\n";
  return kExitOk;
}

int run_validate(const std::string& params_path, int n, std::uint64_t seed,
                 double exclusion, const std::string& out_csv,
                 const std::optional<std::string>& out_svg) {
  const sixr::ArmParamsd params = sixr::load_params(params_path);
  const sixr::ValidationReport report =
      sixr::run_roundtrip(n, seed, params, exclusion);
  sixr::emit_scatter(report, out_csv, out_svg);

  std::printf("samples            %d\n", report.n_samples);
  std::printf("solved             %d\n", report.n_solved);
  std::printf("singular skipped   %d\n", report.n_singular_skipped);
  std::printf("unsolved           %d\n", report.n_unsolved);
  std::printf("max pos err        %.17g m\n", report.max_pos_err);
  std::printf("mean pos err       %.17g m\n", report.mean_pos_err);
  std::printf("max ori err        %.17g rad\n", report.max_ori_err);
  std::printf("elapsed            %.3f s\n", report.elapsed_seconds);
  std::printf("wrote %s\n", out_csv.c_str());
  if (out_svg) std::printf("wrote %s\n", out_svg->c_str());
  return report.n_unsolved == 0 ? kExitOk : kExitSolverFailure;
}

int run_bench(const std::string& params_path, int n, std::uint64_t seed,
              double damping, int max_iters) {
  const sixr::ArmParamsd params = sixr::load_params(params_path);
  sixr::DlsConfig<double> cfg;
  cfg.damping = damping;
  cfg.max_iters = max_iters;
  const sixr::BenchReport report = sixr::run_bench(n, seed, params, cfg);

  std::printf("targets            %d\n", report.n_targets);
  std::printf("analytic median    %.3g s\n", report.analytic.median_seconds);
  std::printf("analytic p95       %.3g s\n", report.analytic.p95_seconds);
  std::printf("dls median         %.3g s\n", report.dls.median_seconds);
  std::printf("dls p95            %.3g s\n", report.dls.p95_seconds);
  std::printf("dls mean iters     %.2f\n", report.dls_mean_iterations);
  std::printf("dls converged      %d / %d\n", report.dls_converged,
              report.n_targets);
  std::printf("speed ratio        %.2f\n", report.speed_ratio);
  return kExitOk;
}

int run_traj(const std::string& params_path, const std::string& waypoints_path,
             const std::string& out_csv) {
  const sixr::ArmParamsd params = sixr::load_params(params_path);
  const std::vector<sixr::Posed> waypoints = sixr::load_waypoints(waypoints_path);
  if (waypoints.empty())
    throw sixr::ValidationError("waypoint file contains no poses");

  const sixr::TrajectoryResult result = sixr::run_trajectory(waypoints, params);

  std::ofstream csv(out_csv, std::ios::binary);
  if (!csv) throw std::runtime_error("cannot write " + out_csv);
  csv << "idx,theta1,theta2,theta3,theta4,theta5,theta6,"
         "shoulder,elbow,wrist,jump_from_prev\n";
  char buf[64];
  for (size_t k = 0; k < result.points.size(); ++k) {
    const sixr::TrajectoryPoint& pt = result.points[k];
    csv << k;
    for (int i = 0; i < 6; ++i) {
      std::snprintf(buf, sizeof buf, ",%.17g", pt.angles[i]);
      csv << buf;
    }
    csv << ',' << sixr::to_char(pt.branch.shoulder) << ','
        << sixr::to_char(pt.branch.elbow) << ','
        << sixr::to_char(pt.branch.wrist);
    std::snprintf(buf, sizeof buf, ",%.17g\n", pt.jump_from_prev);
    csv << buf;
  }
  std::printf("waypoints          %zu\n", result.points.size());
  std::printf("max joint jump     %.17g rad\n", result.max_jump);
  std::printf("wrote %s\n", out_csv.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"closed-form 6R inverse kinematics"};
  app.require_subcommand(1);

  std::string params_path, pose_arg, waypoints_path, out_csv;
  std::string out_svg;
  std::vector<double> angles;
  int n = 1000, max_iters = 200;
  std::uint64_t seed = 0;
  double exclusion = 0.05, damping = 0.01;
  bool all_branches = false, as_json = false;

  CLI::App* solve = app.add_subcommand("solve", "closed-form IK for one pose");
  solve->add_option("--params", params_path, "parameter JSON file")->required();
  solve->add_option("--pose", pose_arg, "pose JSON file or inline JSON")->required();
  solve->add_flag("--all-branches", all_branches, "print every solution branch");
  solve->add_flag("--json", as_json, "emit solutions as JSON");

  CLI::App* fk_cmd = app.add_subcommand("fk", "forward kinematics");
  fk_cmd->add_option("--params", params_path, "parameter JSON file")->required();
  fk_cmd->add_option("--angles", angles, "six joint angles in radians")
      ->expected(6)
      ->required();

  CLI::App* validate =
      app.add_subcommand("validate", "seeded round-trip experiment");
  validate->add_option("--params", params_path, "parameter JSON file")->required();
  validate->add_option("--n", n, "number of samples")
      ->check(CLI::Range(1, 100000000))
      ->required();
  validate->add_option("--seed", seed, "RNG seed")->required();
  validate->add_option("--exclusion", exclusion,
                       "|sin(theta5)| singularity exclusion band");
  validate->add_option("--out", out_csv, "output CSV path")->required();
  CLI::Option* svg_opt =
      validate->add_option("--svg", out_svg, "optional scatter SVG path");

  CLI::App* bench =
      app.add_subcommand("bench", "analytic vs damped-least-squares benchmark");
  bench->add_option("--params", params_path, "parameter JSON file")->required();
  bench->add_option("--n", n, "number of targets")
      ->check(CLI::Range(1, 100000000))
      ->required();
  bench->add_option("--seed", seed, "RNG seed")->required();
  bench->add_option("--damping", damping, "DLS damping factor");
  bench->add_option("--max-iters", max_iters, "DLS iteration cap")
      ->check(CLI::Range(1, 1000000));

  CLI::App* traj = app.add_subcommand("traj", "IK along a waypoint list");
  traj->add_option("--params", params_path, "parameter JSON file")->required();
  traj->add_option("--waypoints", waypoints_path, "waypoint JSON file")->required();
  traj->add_option("--out", out_csv, "output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (app.got_subcommand(solve))
      return run_solve(params_path, pose_arg, all_branches, as_json);
    if (app.got_subcommand(fk_cmd)) return run_fk(params_path, angles);
    if (app.got_subcommand(validate))
      return run_validate(params_path, n, seed, exclusion, out_csv,
                          svg_opt->count() ? std::optional<std::string>(out_svg)
                                           : std::nullopt);
    if (app.got_subcommand(bench))
      return run_bench(params_path, n, seed, damping, max_iters);
    if (app.got_subcommand(traj))
      return run_traj(params_path, waypoints_path, out_csv);
  } catch (const sixr::ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const sixr::ValidationError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const sixr::UnreachableWaypoint& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kExitSolverFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  }
  return kExitUsage;
}
