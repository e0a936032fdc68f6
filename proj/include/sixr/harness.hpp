#pragma once

// Reproducible experiment harness around the two solvers: seeded joint-space
// round-trip validation, branch-continuous trajectory solving, and an
// analytic-vs-iterative benchmark. All randomness flows through SampleRng so
// identical seeds give identical runs on any platform.

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "sixr/dls.hpp"
#include "sixr/ik.hpp"
#include "sixr/types.hpp"

namespace sixr {

// Deterministic uniform sampler. The raw 64-bit engine output is mapped to
// doubles explicitly because std::uniform_real_distribution is free to vary
// between standard libraries.
class SampleRng {
 public:
  explicit SampleRng(std::uint64_t seed) : gen_(seed) {}

  // In [0, 1), with 53 random bits.
  double uniform01() { return double(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + uniform01() * (hi - lo); }

  Jointsd sample_joints(const ArmParamsd& params) {
    Jointsd q;
    for (int i = 0; i < 6; ++i)
      q[i] = uniform(params.joint_limits(i, 0), params.joint_limits(i, 1));
    return q;
  }

 private:
  std::mt19937_64 gen_;
};

struct SampleRecord {
  int idx = 0;
  Vec3d target_p = Vec3d::Zero();
  Vec3d achieved_p = Vec3d::Zero();
  double pos_err = 0;
  double ori_err = 0;
  BranchLabel branch;
};

struct ValidationReport {
  int n_samples = 0;
  int n_solved = 0;
  int n_singular_skipped = 0;
  int n_unsolved = 0;  // non-excluded samples the solver failed on
  double max_pos_err = 0;
  double mean_pos_err = 0;
  double max_ori_err = 0;
  double elapsed_seconds = 0;  // timing only, excluded from determinism checks
  std::vector<SampleRecord> samples;
};

// Samples n joint vectors uniformly inside the limits, skips those within
// the wrist-singularity exclusion band |sin(theta5)| < exclusion, and
// round-trips the rest through fk + ik_solve, recording the best-solution
// errors per sample.
ValidationReport run_roundtrip(int n, std::uint64_t seed, const ArmParamsd& params,
                               double exclusion = 0.05);

struct UnreachableWaypoint : std::runtime_error {
  UnreachableWaypoint(int index_, IkFailure failure_);
  int index;
  IkFailure failure;
};

struct TrajectoryPoint {
  Jointsd angles = Jointsd::Zero();
  BranchLabel branch;
  double jump_from_prev = 0;  // max per-joint distance; 0 for the first point
};

struct TrajectoryResult {
  std::vector<Posed> waypoints;  // the input poses, echoed for reporting
  std::vector<TrajectoryPoint> points;
  double max_jump = 0;  // over consecutive waypoint pairs
};

// Solves each waypoint and picks, per waypoint, the solution closest (max
// per-joint circular distance) to the previous choice; the first waypoint is
// measured against the reference posture. Distance ties keep the lowest
// branch label. Throws UnreachableWaypoint if any waypoint has no solution.
TrajectoryResult run_trajectory(const std::vector<Posed>& waypoints,
                                const ArmParamsd& params,
                                const Jointsd& reference = Jointsd::Zero());

struct TimingStats {
  double median_seconds = 0;
  double p95_seconds = 0;
};

struct BenchReport {
  int n_targets = 0;
  TimingStats analytic;
  TimingStats dls;
  double dls_mean_iterations = 0;
  int dls_converged = 0;
  double speed_ratio = 0;  // dls median / analytic median
};

// Feeds the same FK-generated target set to both solvers. The DLS run is
// seeded at the generating joints plus a uniform perturbation in
// [-0.1, 0.1] rad per joint.
BenchReport run_bench(int n, std::uint64_t seed, const ArmParamsd& params,
                      const DlsConfig<double>& cfg = {});

// Writes the round-trip scatter as CSV (17 significant digits, so values
// survive a parse round-trip bit-exactly) and optionally as a standalone
// SVG with one panel per axis pair: circles mark targets, crosses the
// achieved positions.
void emit_scatter(const ValidationReport& report, const std::string& csv_path,
                  const std::optional<std::string>& svg_path = std::nullopt);

// CSV body as a string; emit_scatter writes exactly this to disk.
std::string scatter_csv(const ValidationReport& report);

}  // namespace sixr
