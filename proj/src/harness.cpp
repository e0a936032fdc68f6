#include "sixr/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "sixr/fk.hpp"

namespace sixr {

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double max_joint_distance(const Jointsd& a, const Jointsd& b) {
  double d = 0;
  for (int i = 0; i < 6; ++i)
    d = std::max(d, circular_distance(a[i], b[i]));
  return d;
}

TimingStats stats_of(std::vector<double> samples) {
  TimingStats s;
  if (samples.empty()) return s;
  std::sort(samples.begin(), samples.end());
  const size_t n = samples.size();
  s.median_seconds = n % 2 ? samples[n / 2]
                           : 0.5 * (samples[n / 2 - 1] + samples[n / 2]);
  const size_t p95 = size_t(std::ceil(0.95 * double(n))) - 1;
  s.p95_seconds = samples[std::min(p95, n - 1)];
  return s;
}

}  // namespace

ValidationReport run_roundtrip(int n, std::uint64_t seed, const ArmParamsd& params,
                               double exclusion) {
  if (n < 1) throw std::invalid_argument("run_roundtrip: n must be at least 1");
  const auto t0 = clock_type::now();
  SampleRng rng(seed);
  ValidationReport report;
  report.n_samples = n;
  report.samples.reserve(size_t(n));
  double pos_sum = 0;

  for (int idx = 0; idx < n; ++idx) {
    const Jointsd q = rng.sample_joints(params);
    if (std::abs(std::sin(q[4])) < exclusion) {
      ++report.n_singular_skipped;
      continue;
    }
    const Posed target = fk(q, params);
    const IkOutcome<double> outcome = ik_solve(target, params);
    if (!outcome.ok()) {
      ++report.n_unsolved;
      continue;
    }
    const IkSolutiond* best = &outcome.solutions.front();
    for (const IkSolutiond& s : outcome.solutions)
      if (s.pos_residual < best->pos_residual) best = &s;

    SampleRecord rec;
    rec.idx = idx;
    rec.target_p = target.p;
    rec.achieved_p = fk(best->angles, params).p;
    rec.pos_err = best->pos_residual;
    rec.ori_err = best->ori_residual;
    rec.branch = best->branch;
    report.samples.push_back(rec);

    ++report.n_solved;
    pos_sum += rec.pos_err;
    report.max_pos_err = std::max(report.max_pos_err, rec.pos_err);
    report.max_ori_err = std::max(report.max_ori_err, rec.ori_err);
  }
  if (report.n_solved > 0) report.mean_pos_err = pos_sum / report.n_solved;
  report.elapsed_seconds = seconds_since(t0);
  return report;
}

UnreachableWaypoint::UnreachableWaypoint(int index_, IkFailure failure_)
    : std::runtime_error("waypoint " + std::to_string(index_) + ": " +
                         to_string(failure_.kind) + ": " + failure_.detail),
      index(index_),
      failure(std::move(failure_)) {}

TrajectoryResult run_trajectory(const std::vector<Posed>& waypoints,
                                const ArmParamsd& params,
                                const Jointsd& reference) {
  TrajectoryResult result;
  result.waypoints = waypoints;
  result.points.reserve(waypoints.size());
  Jointsd prev = normalize_angles(reference);

  for (size_t k = 0; k < waypoints.size(); ++k) {
    IkOutcome<double> outcome = ik_solve(waypoints[k], params);
    if (!outcome.ok())
      throw UnreachableWaypoint(
          int(k), outcome.failure.value_or(
                      IkFailure{IkErrorKind::NoConsistentBranch, ""}));

    // Solutions arrive sorted by branch label; strict improvement keeps the
    // lowest label on distance ties.
    const IkSolutiond* chosen = nullptr;
    double best_d = 0;
    for (const IkSolutiond& s : outcome.solutions) {
      const double d = max_joint_distance(s.angles, prev);
      if (!chosen || d < best_d) {
        chosen = &s;
        best_d = d;
      }
    }

    TrajectoryPoint pt;
    pt.angles = chosen->angles;
    pt.branch = chosen->branch;
    pt.jump_from_prev = k == 0 ? 0.0 : best_d;
    if (k > 0) result.max_jump = std::max(result.max_jump, best_d);
    result.points.push_back(pt);
    prev = chosen->angles;
  }
  return result;
}

BenchReport run_bench(int n, std::uint64_t seed, const ArmParamsd& params,
                      const DlsConfig<double>& cfg) {
  if (n < 1) throw std::invalid_argument("run_bench: n must be at least 1");
  SampleRng rng(seed);
  BenchReport report;
  report.n_targets = n;

  // Target set: uniform joint samples outside the wrist exclusion band, so
  // both solvers face the same reachable, non-singular poses.
  std::vector<Jointsd> generators;
  std::vector<Posed> targets;
  generators.reserve(size_t(n));
  targets.reserve(size_t(n));
  while (int(targets.size()) < n) {
    const Jointsd q = rng.sample_joints(params);
    if (std::abs(std::sin(q[4])) < 0.05) continue;
    generators.push_back(q);
    targets.push_back(fk(q, params));
  }

  std::vector<double> analytic_times, dls_times;
  analytic_times.reserve(size_t(n));
  dls_times.reserve(size_t(n));
  double iter_sum = 0;

  for (int i = 0; i < n; ++i) {
    const auto ta = clock_type::now();
    const IkOutcome<double> outcome = ik_solve(targets[size_t(i)], params);
    analytic_times.push_back(seconds_since(ta));
    (void)outcome;

    Jointsd dls_seed = generators[size_t(i)];
    for (int k = 0; k < 6; ++k) dls_seed[k] += rng.uniform(-0.1, 0.1);

    const auto td = clock_type::now();
    const DlsResult<double> dls = ik_dls(targets[size_t(i)], dls_seed, params, cfg);
    dls_times.push_back(seconds_since(td));
    iter_sum += dls.iterations;
    report.dls_converged += dls.converged ? 1 : 0;
  }

  report.analytic = stats_of(std::move(analytic_times));
  report.dls = stats_of(std::move(dls_times));
  report.dls_mean_iterations = iter_sum / n;
  report.speed_ratio = report.analytic.median_seconds > 0
                           ? report.dls.median_seconds / report.analytic.median_seconds
                           : 0;
  return report;
}

std::string scatter_csv(const ValidationReport& report) {
  std::string out =
      "idx,target_x,target_y,target_z,achieved_x,achieved_y,achieved_z,"
      "pos_err,ori_err,shoulder,elbow,wrist\n";
  for (const SampleRecord& r : report.samples) {
    out += std::to_string(r.idx);
    for (int i = 0; i < 3; ++i) out += "," + fmt17(r.target_p[i]);
    for (int i = 0; i < 3; ++i) out += "," + fmt17(r.achieved_p[i]);
    out += "," + fmt17(r.pos_err) + "," + fmt17(r.ori_err);
    out += std::string(",") + to_char(r.branch.shoulder) + "," +
           to_char(r.branch.elbow) + "," + to_char(r.branch.wrist);
    out += "\n";
  }
  return out;
}

namespace {

// One scatter panel: targets as circles, achieved positions as crosses,
// both projected onto the given axis pair.
void svg_panel(std::string& out, const ValidationReport& report, int ax, int ay,
               const char* title, double x0, double y0, double side) {
  double lo[2] = {0, 0}, hi[2] = {0, 0};
  bool first = true;
  for (const SampleRecord& r : report.samples) {
    const double v[2] = {r.target_p[ax], r.target_p[ay]};
    for (int i = 0; i < 2; ++i) {
      lo[i] = first ? v[i] : std::min(lo[i], v[i]);
      hi[i] = first ? v[i] : std::max(hi[i], v[i]);
    }
    first = false;
  }
  if (first) {
    lo[0] = lo[1] = -1;
    hi[0] = hi[1] = 1;
  }
  for (int i = 0; i < 2; ++i) {
    const double pad = std::max(1e-6, (hi[i] - lo[i]) * 0.05);
    lo[i] -= pad;
    hi[i] += pad;
  }
  const auto sx = [&](double v) {
    return x0 + (v - lo[0]) / (hi[0] - lo[0]) * side;
  };
  const auto sy = [&](double v) {
    return y0 + side - (v - lo[1]) / (hi[1] - lo[1]) * side;
  };

  char buf[256];
  std::snprintf(buf, sizeof buf,
                "<rect x='%.1f' y='%.1f' width='%.1f' height='%.1f' "
                "fill='none' stroke='#888'/>\n",
                x0, y0, side, side);
  out += buf;
  std::snprintf(buf, sizeof buf,
                "<text x='%.1f' y='%.1f' font-size='14' fill='#333'>%s</text>\n",
                x0 + 4, y0 + 16, title);
  out += buf;
  for (const SampleRecord& r : report.samples) {
    std::snprintf(buf, sizeof buf,
                  "<circle cx='%.2f' cy='%.2f' r='2.5' fill='none' "
                  "stroke='#1f77b4' stroke-width='0.8'/>\n",
                  sx(r.target_p[ax]), sy(r.target_p[ay]));
    out += buf;
    const double cx = sx(r.achieved_p[ax]);
    const double cy = sy(r.achieved_p[ay]);
    std::snprintf(buf, sizeof buf,
                  "<path d='M %.2f %.2f L %.2f %.2f M %.2f %.2f L %.2f %.2f' "
                  "stroke='#d62728' stroke-width='0.8'/>\n",
                  cx - 2, cy - 2, cx + 2, cy + 2, cx - 2, cy + 2, cx + 2,
                  cy - 2);
    out += buf;
  }
}

}  // namespace

void emit_scatter(const ValidationReport& report, const std::string& csv_path,
                  const std::optional<std::string>& svg_path) {
  {
    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv) throw std::runtime_error("cannot write " + csv_path);
    csv << scatter_csv(report);
  }
  if (!svg_path) return;

  const double side = 360, gap = 30, margin = 20;
  const double width = margin * 2 + side * 3 + gap * 2;
  const double height = margin * 2 + side + 20;
  std::string svg;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "<svg xmlns='http://www.w3.org/2000/svg' width='%.0f' "
                "height='%.0f' viewBox='0 0 %.0f %.0f'>\n"
                "<rect width='100%%' height='100%%' fill='white'/>\n",
                width, height, width, height);
  svg += buf;
  svg_panel(svg, report, 0, 1, "x - y", margin, margin, side);
  svg_panel(svg, report, 0, 2, "x - z", margin + side + gap, margin, side);
  svg_panel(svg, report, 1, 2, "y - z", margin + 2 * (side + gap), margin, side);
  svg +=
      "<text x='20' y='" + std::to_string(int(height) - 8) +
      "' font-size='12' fill='#333'>circles: targets, crosses: achieved</text>\n";
  svg += "</svg>\n";

  std::ofstream out(*svg_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + *svg_path);
  out << svg;
}

}  // namespace sixr
