#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sixr/fk.hpp>
#include <sixr/ik.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "fixture.hpp"

using namespace sixr;
using sixr::test::angle_close;
using sixr::test::test_params;

namespace {

constexpr double pi = std::numbers::pi;

struct JointSampler {
  std::mt19937_64 gen{777};
  double uniform(double lo, double hi) {
    return lo + double(gen() >> 11) * 0x1.0p-53 * (hi - lo);
  }
  Jointsd next() {
    Jointsd q;
    for (int i = 0; i < 6; ++i) q[i] = uniform(-pi, pi);
    return q;
  }
};

double line_residual(const TrigLineEq<double>& eq, double theta) {
  return std::abs(eq.a * std::cos(theta) + eq.b * std::sin(theta) - eq.c);
}

}  // namespace

TEST_CASE("trig line: frozen root sets") {
  // Tangent case collapses to a single root.
  TrigRoots<double> r = solve_trig_line<double>({1, 0, 1});
  CHECK(r.count == 1);
  CHECK(!r.out_of_reach);
  CHECK(angle_close(r.theta[0], 0.0, 1e-15));

  r = solve_trig_line<double>({1, 1, 1});
  REQUIRE(r.count == 2);
  CHECK(angle_close(r.theta[0], pi / 2, 1e-15));
  CHECK(angle_close(r.theta[1], 0.0, 1e-15));

  r = solve_trig_line<double>({1, 0, 2});
  CHECK(r.count == 0);
  CHECK(r.out_of_reach);

  // c + a = 0 collapses the quadratic; pi is always a root there.
  r = solve_trig_line<double>({-1, 1, 1});
  REQUIRE(r.count == 2);
  CHECK(angle_close(r.theta[0], pi, 1e-15));
  CHECK(angle_close(r.theta[1], pi / 2, 1e-15));

  r = solve_trig_line<double>({-1, -1, 1});
  REQUIRE(r.count == 2);
  CHECK(angle_close(r.theta[0], -pi / 2, 1e-15));
  CHECK(angle_close(r.theta[1], pi, 1e-15));

  // Degenerate with no linear term: only the half turn is left.
  r = solve_trig_line<double>({1, 0, -1});
  REQUIRE(r.count == 1);
  CHECK(angle_close(r.theta[0], pi, 1e-15));

  // Tangency away from the axes.
  r = solve_trig_line<double>({3, 4, 5});
  REQUIRE(r.count == 1);
  CHECK(angle_close(r.theta[0], std::atan2(4.0, 3.0), 1e-12));
}

TEST_CASE("trig line: roots satisfy the equation they came from") {
  JointSampler rng;
  int solved = 0;
  for (int trial = 0; trial < 500; ++trial) {
    TrigLineEq<double> eq;
    eq.a = rng.uniform(-2, 2);
    eq.b = rng.uniform(-2, 2);
    // Construct c from a known angle so the instance is always solvable.
    const double theta_star = rng.uniform(-pi, pi);
    eq.c = eq.a * std::cos(theta_star) + eq.b * std::sin(theta_star);

    const TrigRoots<double> r = solve_trig_line(eq);
    REQUIRE(!r.out_of_reach);
    REQUIRE(r.count >= 1);
    const double scale =
        std::max(1.0, std::abs(eq.a) + std::abs(eq.b) + std::abs(eq.c));
    bool recovered = false;
    for (int i = 0; i < r.count; ++i) {
      CHECK(line_residual(eq, r.theta[i]) <= 1e-10 * scale);
      CHECK(r.theta[i] > -pi);
      CHECK(r.theta[i] <= pi);
      recovered = recovered || angle_close(r.theta[i], theta_star, 1e-7);
    }
    CHECK(recovered);
    solved += r.count;
  }
  CHECK(solved > 900);  // two roots is the generic case
}

TEST_CASE("trig line: unsolvable instances say out_of_reach") {
  JointSampler rng;
  for (int trial = 0; trial < 100; ++trial) {
    TrigLineEq<double> eq;
    eq.a = rng.uniform(-2, 2);
    eq.b = rng.uniform(-2, 2);
    const double amp = std::hypot(eq.a, eq.b);
    eq.c = (amp + rng.uniform(0.01, 1.0)) * (rng.uniform(0, 1) < 0.5 ? -1 : 1);
    const TrigRoots<double> r = solve_trig_line(eq);
    CHECK(r.count == 0);
    CHECK(r.out_of_reach);
  }
}

TEST_CASE("shoulder roots: frozen values") {
  ShoulderRoots<double> s = solve_theta1(Vec3d(1, 1, 0.5), 0.0);
  REQUIRE(s.count == 2);
  CHECK(angle_close(s.theta1[0], 0.7853981633974483, 1e-15));
  CHECK(angle_close(s.theta1[1], -2.356194490192345, 1e-15));

  // Wrist center on the offset circle: both branches coincide.
  s = solve_theta1(Vec3d(1, 0, -0.2), 1.0);
  REQUIRE(s.count == 1);
  CHECK(angle_close(s.theta1[0], pi / 2, 1e-12));

  s = solve_theta1(Vec3d(0.3, 0.2, 0.1), 0.06);
  REQUIRE(s.count == 2);
  CHECK(angle_close(s.theta1[0], 0.7551904406803613, 1e-14));
  CHECK(angle_close(s.theta1[1], -2.720777887175019, 1e-14));

  // Inside the offset circle there is no arm plane at lateral distance d4.
  s = solve_theta1(Vec3d(0.01, 0, 0.4), 0.06);
  CHECK(s.count == 0);
  s = solve_theta1(Vec3d(0, 0, 0.4), 0.06);
  CHECK(s.count == 0);
}

TEST_CASE("shoulder roots: lateral-offset equation holds on every root") {
  JointSampler rng;
  for (int trial = 0; trial < 500; ++trial) {
    Vec3d p5(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    const double rho = std::hypot(p5.x(), p5.y());
    if (rho < 1e-3) continue;
    const double d4 = rng.uniform(-rho, rho);
    const ShoulderRoots<double> s = solve_theta1(p5, d4);
    REQUIRE(s.count >= 1);
    for (int i = 0; i < s.count; ++i) {
      const double res = p5.x() * std::sin(s.theta1[i]) -
                         p5.y() * std::cos(s.theta1[i]) - d4;
      CHECK(std::abs(res) <= 1e-10 * std::max(1.0, rho));
    }
  }
}

TEST_CASE("shoulder roots agree with the half-angle route") {
  // The arcsine form and the quadratic on a' = -y5, b' = x5, c' = d4 solve
  // the same equation through different arithmetic; the root sets must match.
  JointSampler rng;
  int compared = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    Vec3d p5(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    const double rho = std::hypot(p5.x(), p5.y());
    if (rho < 1e-3) continue;
    const double d4 = rng.uniform(-0.95 * rho, 0.95 * rho);

    const ShoulderRoots<double> direct = solve_theta1(p5, d4);
    const TrigRoots<double> quad =
        solve_trig_line<double>({-p5.y(), p5.x(), d4});
    REQUIRE(direct.count == quad.count);
    for (int i = 0; i < direct.count; ++i) {
      double best = pi;
      for (int j = 0; j < quad.count; ++j)
        best = std::min(best, circular_distance(direct.theta1[i], quad.theta[j]));
      CHECK(best <= 1e-10);
    }
    ++compared;
  }
  CHECK(compared > 900);
}

TEST_CASE("wrist frame: frozen example and the flip pair") {
  const WristFrames<double> wf = wrist_frame(0.0, Vec3d(1, 0, 0));
  REQUIRE(!wf.singular);
  CHECK((wf.r0 - Vec3d(0, -1, 0)).norm() == 0.0);
  CHECK((wf.r1 - Vec3d(1, 0, 0)).norm() == 0.0);
  CHECK(wf.branch[0].theta5 == doctest::Approx(pi / 2).epsilon(1e-15));
  CHECK((wf.branch[0].k5 - Vec3d(0, 0, 1)).norm() < 1e-15);
  CHECK(wf.branch[1].theta5 == doctest::Approx(-pi / 2).epsilon(1e-15));
  CHECK((wf.branch[1].k5 + Vec3d(0, 0, 1)).norm() < 1e-15);
}

TEST_CASE("wrist frame: tool axis along the plane normal is singular") {
  CHECK(wrist_frame(0.0, Vec3d(0, -1, 0)).singular);
  CHECK(wrist_frame(0.0, Vec3d(0, 1, 0)).singular);
  const Vec3d near_normal = Vec3d(1e-9, -1, 0).normalized();
  CHECK(wrist_frame(0.0, near_normal).singular);
  // Just outside the guard band it resolves again.
  const Vec3d outside = Vec3d(1e-7, -1, 0).normalized();
  CHECK(!wrist_frame(0.0, outside).singular);
}

TEST_CASE("wrist frame: branches reconstruct the tool axis") {
  JointSampler rng;
  for (int trial = 0; trial < 300; ++trial) {
    const double t1 = rng.uniform(-pi, pi);
    const double phi = rng.uniform(-pi, pi);
    double t5 = rng.uniform(-pi, pi);
    if (std::abs(std::sin(t5)) < 0.05) continue;

    const Vec3d r0(std::sin(t1), -std::cos(t1), 0);
    const Vec3d r1(std::cos(t1), std::sin(t1), 0);
    const Vec3d k5 = std::cos(phi) * r1 + std::sin(phi) * Vec3d::UnitZ();
    const Vec3d k6 = std::cos(t5) * r0 + std::sin(t5) * k5.cross(r0);

    const WristFrames<double> wf = wrist_frame(t1, k6);
    REQUIRE(!wf.singular);
    bool matched = false;
    for (const WristBranch<double>& b : wf.branch) {
      CHECK((std::cos(b.theta5) * r0 + std::sin(b.theta5) * b.k5.cross(r0) - k6)
                .norm() < 1e-13);
      CHECK(std::abs(b.k5.dot(r0)) < 1e-14);
      matched = matched || ((b.k5 - k5).norm() < 1e-12 &&
                            angle_close(b.theta5, t5, 1e-12));
    }
    CHECK(matched);
    // The two flips are exact mirrors of each other.
    CHECK((wf.branch[0].k5 + wf.branch[1].k5).norm() < 1e-15);
    CHECK(wf.branch[0].theta5 == -wf.branch[1].theta5);
    CHECK(wf.branch[0].theta5 > 0);
    CHECK(wf.branch[0].theta5 < pi);
  }
}

TEST_CASE("signed elevation inverts the joint-5 axis construction") {
  // At theta1 = 0 the plane axes are r0=(0,-1,0), r1=(1,0,0).
  const Vec3d r0(0, -1, 0), r1(1, 0, 0);
  CHECK(angle_close(signed_phi(r1, Vec3d(0, 0, 1), r0), pi / 2, 1e-15));
  CHECK(angle_close(signed_phi(r1, Vec3d(0, 0, -1), r0), -pi / 2, 1e-15));
  CHECK(angle_close(signed_phi(r1, r1, r0), 0.0, 1e-15));

  JointSampler rng;
  for (int trial = 0; trial < 300; ++trial) {
    const double t1 = rng.uniform(-pi, pi);
    const double phi = rng.uniform(-pi, pi);
    const Vec3d r0(std::sin(t1), -std::cos(t1), 0);
    const Vec3d r1(std::cos(t1), std::sin(t1), 0);
    const Vec3d k5 = std::cos(phi) * r1 + std::sin(phi) * Vec3d::UnitZ();
    CHECK(angle_close(signed_phi(r1, k5, r0), phi, 1e-13));
  }
}

TEST_CASE("planar projection recovers signed in-plane coordinates") {
  JointSampler rng;
  for (int trial = 0; trial < 200; ++trial) {
    const double t1 = rng.uniform(-pi, pi);
    const double x = rng.uniform(-0.8, 0.8);  // negative X is reach-behind
    const double z = rng.uniform(-0.8, 0.8);
    const double d4 = rng.uniform(-0.2, 0.2);
    const Vec3d r0(std::sin(t1), -std::cos(t1), 0);
    const Vec3d r1(std::cos(t1), std::sin(t1), 0);
    const Vec3d p5 = x * r1 + z * Vec3d::UnitZ() + d4 * r0;
    const PlanarTarget<double> t = project_p5(p5, t1, d4);
    CHECK(std::abs(t.x - x) < 1e-15);
    CHECK(std::abs(t.z - z) < 1e-15);
  }
}

TEST_CASE("theta2 roots reach the planar target") {
  const ArmParamsd params = test_params();
  JointSampler rng;
  for (int trial = 0; trial < 400; ++trial) {
    const double t2 = rng.uniform(-pi, pi);
    const double t3 = rng.uniform(-pi, pi);
    const double phi = rng.uniform(-pi, pi);
    const Vec2<double> xz = fk_planar(t2, t3, phi, params);
    const PlanarTarget<double> target{xz[0], xz[1], phi};

    const TrigRoots<double> roots = solve_theta2(target, params);
    REQUIRE(!roots.out_of_reach);
    REQUIRE(roots.count >= 1);
    bool recovered = false;
    for (int i = 0; i < roots.count; ++i)
      recovered = recovered || angle_close(roots.theta[i], t2, 1e-7);
    CHECK(recovered);
  }

  // Straight elbow: the two roots coincide at the annulus rim.
  const Vec2<double> rim = fk_planar(0.3, 0.0, -0.7, params);
  const TrigRoots<double> r =
      solve_theta2<double>({rim[0], rim[1], -0.7}, params);
  REQUIRE(r.count >= 1);
  CHECK(angle_close(r.theta[0], 0.3, 1e-6));

  // Far outside the annulus nothing solves.
  const TrigRoots<double> miss = solve_theta2<double>({10, 0, 0}, params);
  CHECK(miss.count == 0);
  CHECK(miss.out_of_reach);
}

TEST_CASE("theta3 height filter keeps only Z-consistent roots") {
  const ArmParamsd params = test_params();
  JointSampler rng;
  int generic_single = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const double t2 = rng.uniform(-pi, pi);
    const double t3 = rng.uniform(-pi, pi);
    const double phi = rng.uniform(-pi, pi);
    const Vec2<double> xz = fk_planar(t2, t3, phi, params);
    const PlanarTarget<double> target{xz[0], xz[1], phi};

    const ElbowRoots<double> roots = solve_theta3(t2, target, params);
    REQUIRE(roots.count >= 1);
    bool recovered = false;
    for (int i = 0; i < roots.count; ++i) {
      const Vec2<double> re = fk_planar(t2, roots.theta3[i], phi, params);
      CHECK(std::abs(re[0] - target.x) < 1e-8);
      CHECK(std::abs(re[1] - target.z) < 1e-8);
      recovered = recovered || angle_close(roots.theta3[i], t3, 1e-7);
    }
    CHECK(recovered);
    if (roots.count == 1 && std::abs(std::sin(t3)) > 1e-3) ++generic_single;
  }
  // Away from the straight-elbow line the filter leaves exactly one root.
  CHECK(generic_single > 350);
}

TEST_CASE("theta4 closes the elevation sum") {
  CHECK(solve_theta4(-pi / 2, 0.0, 0.0) == 0.0);
  CHECK(solve_theta4(pi / 2, pi / 2, 0.0) == pi / 2);

  JointSampler rng;
  for (int trial = 0; trial < 200; ++trial) {
    const double t2 = rng.uniform(-pi, pi);
    const double t3 = rng.uniform(-pi, pi);
    const double phi = rng.uniform(-pi, pi);
    const double t4 = solve_theta4(phi, t2, t3);
    CHECK(t4 > -pi);
    CHECK(t4 <= pi);
    CHECK(angle_close(t2 + t3 + t4 - pi / 2, phi, 1e-13));
  }
}

TEST_CASE("theta6 recovers the tool roll from the frames") {
  {
    // Orthogonal axis pair; m5 = k6 x k5 = (0,-1,0).
    const Vec3d k5(0, 0, 1), k6(1, 0, 0);
    const Vec3d m5 = k6.cross(k5);
    CHECK(solve_theta6<double>(k5, k6, m5) == 0.0);
    CHECK(angle_close(solve_theta6<double>(k5, k6, k6.cross(m5)), pi / 2, 1e-15));
    CHECK(angle_close(solve_theta6<double>(k5, k6, -m5), pi, 1e-15));
  }

  JointSampler rng;
  for (int trial = 0; trial < 200; ++trial) {
    Jointsd q = rng.next();
    if (std::abs(std::sin(q[4])) < 0.05) continue;
    const FrameSet<double> f = build_frames(q);
    // k5 as the solver would see it: normal to r0 and k6, same hemisphere.
    CHECK(angle_close(solve_theta6(f.k5, f.k6, f.m6), q[5], 1e-12));
  }
}

TEST_CASE("ik_solve round-trips random postures") {
  const ArmParamsd params = test_params();
  JointSampler rng;
  int tested = 0;
  bool saw_eight = false;
  while (tested < 300) {
    const Jointsd q = rng.next();
    if (std::abs(std::sin(q[4])) < 0.05) continue;
    ++tested;

    const Posed pose = fk(q, params);
    const IkOutcome<double> out = ik_solve(pose, params);
    REQUIRE(out.ok());
    REQUIRE(out.solutions.size() >= 1);
    REQUIRE(out.solutions.size() <= 8);
    saw_eight = saw_eight || out.solutions.size() == 8;

    // The generator must be among the returned branches.
    bool recovered = false;
    for (const IkSolutiond& s : out.solutions)
      recovered =
          recovered || sixr::test::joints_close(s.angles, normalize_angles(q), 1e-8);
    CHECK(recovered);

    // Every branch must reproduce the pose through the forward model.
    const double pos_tol = 1e-8 * std::max(1.0, pose.p.norm());
    std::set<std::string> labels;
    for (const IkSolutiond& s : out.solutions) {
      const Posed re = fk(s.angles, params);
      CHECK((re.p - pose.p).norm() <= pos_tol);
      CHECK(angle_between_axes(re.x_axis, pose.x_axis) <= 1e-8);
      CHECK(angle_between_axes(re.z_axis, pose.z_axis) <= 1e-8);
      CHECK(s.pos_residual <= pos_tol);
      CHECK(s.ori_residual <= 1e-8);
      labels.insert(to_string(s.branch));
      for (int i = 0; i < 6; ++i) {
        CHECK(s.angles[i] > -pi);
        CHECK(s.angles[i] <= pi);
      }
    }
    CHECK(labels.size() == out.solutions.size());  // no duplicate labels
    CHECK(std::is_sorted(out.solutions.begin(), out.solutions.end(),
                         [](const IkSolutiond& a, const IkSolutiond& b) {
                           return a.branch < b.branch;
                         }));
  }
  CHECK(saw_eight);
}

TEST_CASE("ik_solve is deterministic") {
  const ArmParamsd params = test_params();
  Jointsd q;
  q << 0.3, 0.7, -1.2, 0.4, 1.1, -0.5;
  const Posed pose = fk(q, params);
  const IkOutcome<double> a = ik_solve(pose, params);
  const IkOutcome<double> b = ik_solve(pose, params);
  REQUIRE(a.solutions.size() == b.solutions.size());
  for (size_t i = 0; i < a.solutions.size(); ++i) {
    CHECK(a.solutions[i].angles == b.solutions[i].angles);
    CHECK(a.solutions[i].branch == b.solutions[i].branch);
    CHECK(a.solutions[i].pos_residual == b.solutions[i].pos_residual);
  }
}

TEST_CASE("ik_solve: wrist center near the base axis is a shoulder singularity") {
  const ArmParamsd params = test_params();
  // p5 = p - d6 z ends up at lateral distance 0.01 < d4 = 0.06.
  const Posed pose =
      pose_from_axes<double>(Vec3d(0.01, 0, 0.3), Vec3d::UnitX(), Vec3d::UnitZ());
  const IkOutcome<double> out = ik_solve(pose, params);
  CHECK(!out.ok());
  REQUIRE(out.failure.has_value());
  CHECK(out.failure->kind == IkErrorKind::ShoulderSingularity);
  CHECK(!out.failure->detail.empty());
}

TEST_CASE("ik_solve: tool axis along the plane normal is a wrist singularity") {
  // With d4 = 0 the two shoulder branches are mirror planes, so a tool axis
  // normal to one is normal to both and no branch escapes the lock.
  ArmParamsd params = test_params();
  params.d4 = 0.0;
  const Posed pose = fk(Jointsd(Jointsd::Zero()), params);
  const IkOutcome<double> out = ik_solve(pose, params);
  CHECK(!out.ok());
  REQUIRE(out.failure.has_value());
  CHECK(out.failure->kind == IkErrorKind::WristSingularity);
  CHECK(out.failure->detail.find("joints 4 and 6") != std::string::npos);
}

TEST_CASE("ik_solve: far targets are out of reach") {
  const ArmParamsd params = test_params();
  const Posed pose =
      pose_from_axes<double>(Vec3d(10, 0, 0), Vec3d::UnitX(), Vec3d::UnitZ());
  const IkOutcome<double> out = ik_solve(pose, params);
  CHECK(!out.ok());
  REQUIRE(out.failure.has_value());
  CHECK(out.failure->kind == IkErrorKind::OutOfReach);
}

TEST_CASE("ik_solve: the zero posture sits on a knife edge") {
  // fk(0) is wrist-singular on its own shoulder branch, and the mirror
  // branch meets the pose exactly at full elbow extension. Depending on
  // rounding the solver either verifies that boundary branch or reports the
  // singularity; both are faithful answers and anything else is a bug.
  const ArmParamsd params = test_params();
  const Posed pose = fk(Jointsd(Jointsd::Zero()), params);
  const IkOutcome<double> out = ik_solve(pose, params);
  if (out.ok()) {
    REQUIRE(out.solutions.size() == 1);
    const IkSolutiond& s = out.solutions[0];
    CHECK(s.branch.shoulder == Branch::B);
    CHECK(angle_close(s.angles[0], 2.9242702219086176, 1e-9));
    CHECK(angle_close(s.angles[1], pi, 1e-6));
    CHECK(std::abs(s.angles[2]) < 1e-6);
    const Posed re = fk(s.angles, params);
    CHECK((re.p - pose.p).norm() <= 1e-8);
  } else {
    REQUIRE(out.failure.has_value());
    CHECK(out.failure->kind == IkErrorKind::WristSingularity);
  }
}

TEST_CASE("ik_solve honors joint limits") {
  ArmParamsd params = test_params();
  Jointsd q;
  q << 0.3, 0.7, -1.2, 0.4, 1.1, -0.5;
  const Posed pose = fk(q, params);

  // Unrestricted, this pose has several branches.
  const size_t full_count = ik_solve(pose, params).solutions.size();
  CHECK(full_count >= 2);

  // Box the joints tightly around the generator: only it survives.
  for (int i = 0; i < 6; ++i) {
    params.joint_limits(i, 0) = q[i] - 0.05;
    params.joint_limits(i, 1) = q[i] + 0.05;
  }
  const IkOutcome<double> boxed = ik_solve(pose, params);
  REQUIRE(boxed.ok());
  CHECK(boxed.solutions.size() == 1);
  CHECK(sixr::test::joints_close(boxed.solutions[0].angles, q, 1e-8));

  // Exclude the generator too: verified branches exist but none is legal.
  for (int i = 0; i < 6; ++i) {
    params.joint_limits(i, 0) = 2.9;
    params.joint_limits(i, 1) = 3.0;
  }
  const IkOutcome<double> none = ik_solve(pose, params);
  CHECK(!none.ok());
  REQUIRE(none.failure.has_value());
  CHECK(none.failure->kind == IkErrorKind::NoConsistentBranch);
  CHECK(none.failure->detail.find("joint limits") != std::string::npos);
}
