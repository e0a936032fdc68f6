#pragma once

// Closed-form inverse kinematics for the 6R geometry in fk.hpp.
//
// The pipeline peels the pose apart in the order the geometry allows:
//   1. subtract the tool offset to get the wrist center p5,
//   2. theta1 from the lateral-offset equation (two shoulder roots),
//   3. theta5 and the joint-5 axis from the tool axis (two wrist flips),
//   4. the in-plane elevation phi, then theta2 from a half-angle quadratic
//      (two elbow roots), theta3 from the real-part equation filtered by the
//      height equation, theta4 from the elevation sum, theta6 from the tool
//      x axis.
// Up to 2 x 2 x 2 branches survive; every candidate is verified against the
// forward model before it is emitted. Failures are typed, never silent.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "sixr/fk.hpp"
#include "sixr/types.hpp"

namespace sixr {

// Singularity / reachability margins. Residual-style tolerances scale with
// the magnitude of the quantities they guard; angular ones are absolute.
inline constexpr double k_wrist_eps = 1e-8;   // |r0 x k6| below this is gimbal lock
inline constexpr double k_disc_eps = 1e-9;    // discriminant clamp, scaled
inline constexpr double k_fk_verify_tol = 1e-8;   // candidate-vs-pose, scaled
inline constexpr double k_dedup_tol = 1e-9;   // per-joint solution dedup
inline constexpr double k_pos_eps = 1e-12;    // wrist center on the base axis
inline constexpr double k_degenerate_eps = 1e-14;  // quadratic -> linear collapse
inline constexpr double k_height_tol = 1e-8;  // theta3 height-equation filter

enum class IkErrorKind {
  ShoulderSingularity,  // wrist center too close to the base axis for d4
  WristSingularity,     // tool axis parallel to the arm-plane normal
  OutOfReach,           // a half-angle discriminant went negative
  NoConsistentBranch,   // candidates existed but none verified
};

inline const char* to_string(IkErrorKind k) {
  switch (k) {
    case IkErrorKind::ShoulderSingularity: return "ShoulderSingularity";
    case IkErrorKind::WristSingularity: return "WristSingularity";
    case IkErrorKind::OutOfReach: return "OutOfReach";
    case IkErrorKind::NoConsistentBranch: return "NoConsistentBranch";
  }
  return "?";
}

struct IkFailure {
  IkErrorKind kind = IkErrorKind::NoConsistentBranch;
  std::string detail;
};

// Roots of a TrigLineEq. Slot 0 holds the '+' root of the half-angle
// quadratic, slot 1 the '-' root; coincident roots are reported once.
// count == 0 with out_of_reach means the right-hand side exceeds the
// equation's amplitude.
template <class Scalar = double>
struct TrigRoots {
  std::array<Scalar, 2> theta{};
  int count = 0;
  bool out_of_reach = false;
};

// Solves a cos(theta) + b sin(theta) = c with the half-angle substitution
// t = tan(theta/2), which turns the line into
//   (c + a) t^2 - 2 b t + (c - a) = 0.
// When c + a vanishes the quadratic collapses: theta = pi is a root and the
// linear term supplies the other. Roots come back normalized to (-pi, pi].
template <class Scalar>
TrigRoots<Scalar> solve_trig_line(const TrigLineEq<Scalar>& eq) {
  using std::abs;
  using std::atan;
  using std::sqrt;
  const Scalar pi = std::numbers::pi_v<Scalar>;
  TrigRoots<Scalar> out;

  const Scalar a = eq.a, b = eq.b, c = eq.c;
  Scalar disc = b * b - (c * c - a * a);
  const Scalar disc_scale = std::max(Scalar(1), a * a + b * b);
  if (disc < -Scalar(k_disc_eps) * disc_scale) {
    out.out_of_reach = true;
    return out;
  }
  if (disc < Scalar(0)) disc = Scalar(0);  // boundary case rescued by the clamp
  const Scalar sq = sqrt(disc);
  const Scalar mag = std::max({abs(a), abs(b), abs(c)});

  if (abs(c + a) <= Scalar(k_degenerate_eps) * mag) {
    if (abs(b) <= Scalar(k_degenerate_eps) * mag) {
      // a cos(theta) = c with c = -a: only the half-turn solves it.
      out.theta[0] = pi;
      out.count = 1;
      return out;
    }
    const Scalar lin = normalize_angle(Scalar(2) * atan((c - a) / (Scalar(2) * b)));
    // Keep slot order consistent with the limit of the regular branch: the
    // '+' root is the one that runs off to pi when b > 0.
    if (b >= Scalar(0)) {
      out.theta[0] = pi;
      out.theta[1] = lin;
    } else {
      out.theta[0] = lin;
      out.theta[1] = pi;
    }
    out.count = 2;
  } else {
    // Evaluate each root through the numerically benign expression: sum the
    // like-signed pair directly, recover the other from the root product
    // (c - a) / (c + a).
    Scalar tp, tm;
    if (b >= Scalar(0)) {
      tp = (b + sq) / (c + a);
      tm = (b + sq) == Scalar(0) ? tp : (c - a) / (b + sq);
    } else {
      tm = (b - sq) / (c + a);
      tp = (c - a) / (b - sq);
    }
    out.theta[0] = normalize_angle(Scalar(2) * atan(tp));
    out.theta[1] = normalize_angle(Scalar(2) * atan(tm));
    out.count = 2;
  }
  if (out.count == 2 &&
      circular_distance(out.theta[0], out.theta[1]) < Scalar(1e-12)) {
    out.count = 1;
  }
  return out;
}

// Shoulder roots. count == 0 means the wrist center is within the lateral
// offset circle (or on the base axis) and theta1 does not exist.
template <class Scalar = double>
struct ShoulderRoots {
  std::array<Scalar, 2> theta1{};
  int count = 0;
};

// theta1 from x5 sin(theta1) - y5 cos(theta1) = d4, in arcsine form:
//   theta1 = asin(d4 / rho) + atan2(y5, x5)        (branch A)
//   theta1 = pi - asin(d4 / rho) + atan2(y5, x5)   (branch B)
// with rho = sqrt(x5^2 + y5^2). The equivalent half-angle quadratic route is
// TrigLineEq{-y5, x5, d4}; the two root sets agree and tests hold both forms
// against each other.
template <class Scalar>
ShoulderRoots<Scalar> solve_theta1(const Vec3<Scalar>& p5, Scalar d4) {
  using std::asin;
  using std::atan2;
  using std::copysign;
  using std::sqrt;
  ShoulderRoots<Scalar> out;
  const Scalar rho2 = p5.x() * p5.x() + p5.y() * p5.y();
  if (rho2 < Scalar(k_pos_eps) * Scalar(k_pos_eps)) return out;
  Scalar s = d4 / sqrt(rho2);
  if (s * s > Scalar(1)) {
    // Accept the same sliver past the boundary the discriminant clamp does.
    if (s * s - Scalar(1) > Scalar(k_disc_eps) * std::max(Scalar(1), rho2) / rho2)
      return out;
    s = copysign(Scalar(1), s);
  }
  const Scalar base = atan2(p5.y(), p5.x());
  const Scalar alpha = asin(s);
  const Scalar pi = std::numbers::pi_v<Scalar>;
  out.theta1[0] = normalize_angle(alpha + base);
  out.theta1[1] = normalize_angle(pi - alpha + base);
  out.count =
      circular_distance(out.theta1[0], out.theta1[1]) < Scalar(1e-12) ? 1 : 2;
  return out;
}

// One wrist flip: the joint-5 axis and the out-of-plane angle that realize
// the requested tool axis.
template <class Scalar = double>
struct WristBranch {
  Vec3<Scalar> k5;
  Scalar theta5{0};
};

template <class Scalar = double>
struct WristFrames {
  Vec3<Scalar> r0;
  Vec3<Scalar> r1;
  std::array<WristBranch<Scalar>, 2> branch{};
  bool singular = true;
};

// Recovers (k5, theta5) from theta1 and the tool axis. k5 must be normal to
// both r0 and k6, so k5 = r0 x k6 up to sign; each sign is one wrist flip:
// (k5, theta5) and (-k5, -theta5) reach the same tool axis. Near-parallel
// r0 and k6 leave k5 undefined (gimbal lock) and the frame is flagged
// singular.
template <class Scalar>
WristFrames<Scalar> wrist_frame(Scalar theta1, const Vec3<Scalar>& k6) {
  using std::atan2;
  using std::cos;
  using std::sin;
  WristFrames<Scalar> out;
  out.r0 = Vec3<Scalar>(sin(theta1), -cos(theta1), Scalar(0));
  out.r1 = Vec3<Scalar>(cos(theta1), sin(theta1), Scalar(0));
  const Vec3<Scalar> cr = out.r0.cross(k6);
  const Scalar n = cr.norm();
  if (n < Scalar(k_wrist_eps)) return out;  // singular stays set
  const Scalar t5 = atan2(n, out.r0.dot(k6));  // in (0, pi) away from the lock
  const Vec3<Scalar> k5 = cr / n;
  out.branch[0] = {k5, t5};
  out.branch[1] = {-k5, -t5};
  out.singular = false;
  return out;
}

// Signed elevation of k5 inside the arm plane, measured from r1 about r0.
// Inverse of k5 = cos(phi) r1 + sin(phi) zhat.
template <class DerivedA, class DerivedB, class DerivedC>
typename DerivedA::Scalar signed_phi(const Eigen::MatrixBase<DerivedA>& r1,
                                     const Eigen::MatrixBase<DerivedB>& k5,
                                     const Eigen::MatrixBase<DerivedC>& r0) {
  using S = typename DerivedA::Scalar;
  const Vec3<S> a = r1.eval();
  const Vec3<S> b = k5.eval();
  const Vec3<S> n = r0.eval();
  return std::atan2(a.cross(b).dot(n), a.dot(b));
}

// Planar reduction of the wrist center: X along r1 (signed, so the reach-
// behind shoulder branch keeps working), Z along world z, plus the wrist
// elevation phi the planar chain must meet.
template <class Scalar = double>
struct PlanarTarget {
  Scalar x{0};
  Scalar z{0};
  Scalar phi{0};
};

// Projects p5 into the arm plane of theta1. Precondition: theta1 solves the
// lateral-offset equation for p5, so p5 - d4 r0 has no r0 component left.
template <class Scalar>
PlanarTarget<Scalar> project_p5(const Vec3<Scalar>& p5, Scalar theta1, Scalar d4) {
  using std::cos;
  using std::sin;
  const Vec3<Scalar> r0(sin(theta1), -cos(theta1), Scalar(0));
  const Vec3<Scalar> r1(cos(theta1), sin(theta1), Scalar(0));
  const Vec3<Scalar> p5p = p5 - d4 * r0;
  return {r1.dot(p5p), p5p.z(), Scalar(0)};
}

// theta2 from the squared-modulus equation of the planar chain
//   L1 cos(theta2) + L2 sin(theta2) = L3,
//   L1 = 2 a2 (X - d5 cos phi)
//   L2 = 2 a2 (Z - d5 sin phi)
//   L3 = X^2 + Z^2 + a2^2 + d5^2 - a3^2 - 2 d5 Z sin phi - 2 d5 X cos phi.
// Slot 0 / slot 1 of the result are the elbow A / B branches.
template <class Scalar>
TrigRoots<Scalar> solve_theta2(const PlanarTarget<Scalar>& t,
                               const ArmParams<Scalar>& params) {
  using std::cos;
  using std::sin;
  const Scalar a2 = params.a2, a3 = params.a3, d5 = params.d5;
  const Scalar cphi = cos(t.phi), sphi = sin(t.phi);
  TrigLineEq<Scalar> line;
  line.a = Scalar(2) * a2 * (t.x - d5 * cphi);
  line.b = Scalar(2) * a2 * (t.z - d5 * sphi);
  line.c = t.x * t.x + t.z * t.z + a2 * a2 + d5 * d5 - a3 * a3 -
           Scalar(2) * d5 * t.z * sphi - Scalar(2) * d5 * t.x * cphi;
  return solve_trig_line(line);
}

// theta3 candidates surviving the height filter. count == 0 with
// out_of_reach distinguishes a negative discriminant from both roots
// violating the height equation.
template <class Scalar = double>
struct ElbowRoots {
  std::array<Scalar, 2> theta3{};
  int count = 0;
  bool out_of_reach = false;
};

// theta3 from the real-part equation of the planar chain. The half-angle
// quadratic only encodes the X equation, so each root is checked against the
// height (Z) equation; generically exactly one root survives.
template <class Scalar>
ElbowRoots<Scalar> solve_theta3(Scalar theta2, const PlanarTarget<Scalar>& t,
                                const ArmParams<Scalar>& params) {
  using std::abs;
  using std::cos;
  using std::sin;
  const Scalar a2 = params.a2, a3 = params.a3, d5 = params.d5;
  ElbowRoots<Scalar> out;
  ElbowRealEq<Scalar> eq;
  eq.l4 = t.x - a2 * cos(theta2) - d5 * cos(t.phi);
  eq.l5 = a3 * cos(theta2);
  eq.l6 = a3 * sin(theta2);
  const TrigRoots<Scalar> roots = solve_trig_line(eq.as_line());
  if (roots.out_of_reach) {
    out.out_of_reach = true;
    return out;
  }
  const Scalar ztol = Scalar(k_height_tol) * std::max(Scalar(1), abs(t.z));
  for (int i = 0; i < roots.count; ++i) {
    const Scalar th3 = roots.theta[i];
    const Scalar zres =
        abs(a2 * sin(theta2) + a3 * sin(theta2 + th3) + d5 * sin(t.phi) - t.z);
    if (zres <= ztol) out.theta3[out.count++] = th3;
  }
  return out;
}

// theta4 closes the elevation sum phi = theta2 + theta3 + theta4 - pi/2.
template <class Scalar>
Scalar solve_theta4(Scalar phi, Scalar theta2, Scalar theta3) {
  return normalize_angle(phi - (theta2 + theta3) +
                         std::numbers::pi_v<Scalar> / Scalar(2));
}

// theta6 rotates the reference tool x direction m5 = k6 x k5 onto the
// requested one about k6, signed.
template <class Scalar>
Scalar solve_theta6(const Vec3<Scalar>& k5, const Vec3<Scalar>& k6,
                    const Vec3<Scalar>& m6_target) {
  const Vec3<Scalar> m5 = k6.cross(k5);
  return std::atan2(m5.cross(m6_target).dot(k6), m5.dot(m6_target));
}

// Result of a full solve: all verified branches sorted by label, or a typed
// failure explaining why none exist.
template <class Scalar = double>
struct IkOutcome {
  std::vector<IkSolution<Scalar>> solutions;
  std::optional<IkFailure> failure;

  bool ok() const { return !solutions.empty(); }
};

namespace detail {

inline std::string format_failure(const char* fmt, double v1) {
  char buf[160];
  std::snprintf(buf, sizeof buf, fmt, v1);
  return buf;
}

inline std::string format_failure(const char* fmt, double v1, double v2) {
  char buf[160];
  std::snprintf(buf, sizeof buf, fmt, v1, v2);
  return buf;
}

template <class Scalar>
bool within_limits(const Joints<Scalar>& q,
                   const Eigen::Matrix<Scalar, 6, 2>& lim) {
  for (int i = 0; i < 6; ++i)
    if (q[i] < lim(i, 0) || q[i] > lim(i, 1)) return false;
  return true;
}

}  // namespace detail

// Full branch enumeration. Every shoulder root is combined with every wrist
// flip and every elbow root; each assembled candidate is pushed through the
// forward model and kept only if it reproduces the pose. The first typed
// failure met in enumeration order is reported when nothing survives, so a
// pose that is singular on one branch and out of reach on the others names
// the singularity rather than a generic miss.
template <class Scalar>
IkOutcome<Scalar> ik_solve(const Pose<Scalar>& pose, const ArmParams<Scalar>& params) {
  using std::abs;
  IkOutcome<Scalar> out;
  std::optional<IkFailure> first_failure;
  int n_candidates = 0;
  int n_limit_rejected = 0;

  const auto record = [&](IkErrorKind kind, std::string detail) {
    if (!first_failure) first_failure = IkFailure{kind, std::move(detail)};
  };

  const Vec3<Scalar>& k6 = pose.z_axis;
  const Vec3<Scalar> p5 = pose.p - params.d6 * k6;

  const ShoulderRoots<Scalar> shoulder = solve_theta1(p5, params.d4);
  if (shoulder.count == 0) {
    const double rho = std::hypot(double(p5.x()), double(p5.y()));
    out.failure = IkFailure{
        IkErrorKind::ShoulderSingularity,
        detail::format_failure(
            "wrist center %.6g m from the base axis, lateral offset %.6g m",
            rho, double(params.d4))};
    return out;
  }

  const Scalar pos_tol =
      Scalar(k_fk_verify_tol) * std::max(Scalar(1), pose.p.norm());

  for (int si = 0; si < shoulder.count; ++si) {
    const Scalar th1 = shoulder.theta1[si];
    const char* side = si == 0 ? "shoulder A" : "shoulder B";

    const WristFrames<Scalar> wf = wrist_frame(th1, k6);
    if (wf.singular) {
      record(IkErrorKind::WristSingularity,
             std::string(side) +
                 detail::format_failure(
                     ": |r0 x k6| = %.6g below %.6g, joints 4 and 6 align",
                     double(wf.r0.cross(k6).norm()), k_wrist_eps));
      continue;
    }

    PlanarTarget<Scalar> target = project_p5(p5, th1, params.d4);

    for (int wi = 0; wi < 2; ++wi) {
      const WristBranch<Scalar>& wb = wf.branch[wi];
      target.phi = signed_phi(wf.r1, wb.k5, wf.r0);

      const TrigRoots<Scalar> th2 = solve_theta2(target, params);
      if (th2.count == 0) {
        record(IkErrorKind::OutOfReach,
               std::string(side) +
                   detail::format_failure(
                       ": planar target (%.6g, %.6g) m outside the elbow annulus",
                       double(target.x), double(target.z)));
        continue;
      }

      for (int ei = 0; ei < th2.count; ++ei) {
        const ElbowRoots<Scalar> th3 = solve_theta3(th2.theta[ei], target, params);
        if (th3.count == 0) {
          if (th3.out_of_reach)
            record(IkErrorKind::OutOfReach,
                   std::string(side) +
                       detail::format_failure(
                           ": forearm equation unsolvable at theta2 = %.6g rad",
                           double(th2.theta[ei])));
          continue;
        }

        // Both theta3 roots can pass the height filter only when they are
        // nearly coincident (straight-elbow boundary); keep the candidate
        // that reproduces the pose best so each label stays unique.
        std::optional<IkSolution<Scalar>> best;
        for (int ri = 0; ri < th3.count; ++ri) {
          Joints<Scalar> q;
          q[0] = th1;
          q[1] = th2.theta[ei];
          q[2] = th3.theta3[ri];
          q[3] = solve_theta4(target.phi, q[1], q[2]);
          q[4] = wb.theta5;
          q[5] = solve_theta6(wb.k5, k6, pose.x_axis);
          q = normalize_angles(q);
          ++n_candidates;

          const Pose<Scalar> achieved = fk(q, params);
          const Scalar pres = (achieved.p - pose.p).norm();
          const Scalar ores =
              std::max(angle_between_axes(achieved.x_axis, pose.x_axis),
                       angle_between_axes(achieved.z_axis, pose.z_axis));
          if (pres > pos_tol || ores > Scalar(k_fk_verify_tol)) continue;
          if (!best || pres < best->pos_residual) {
            IkSolution<Scalar> sol;
            sol.angles = q;
            sol.branch = BranchLabel{Branch(si), Branch(ei), Branch(wi)};
            sol.pos_residual = pres;
            sol.ori_residual = ores;
            best = sol;
          }
        }
        if (best) {
          if (detail::within_limits(best->angles, params.joint_limits))
            out.solutions.push_back(*best);
          else
            ++n_limit_rejected;
        }
      }
    }
  }

  std::sort(out.solutions.begin(), out.solutions.end(),
            [](const IkSolution<Scalar>& a, const IkSolution<Scalar>& b) {
              return a.branch < b.branch;
            });

  // Coincident-root branches collapse to the same joint vector; keep the
  // first label only.
  std::vector<IkSolution<Scalar>> unique;
  for (const IkSolution<Scalar>& s : out.solutions) {
    const bool dup = std::any_of(
        unique.begin(), unique.end(), [&](const IkSolution<Scalar>& u) {
          for (int i = 0; i < 6; ++i)
            if (circular_distance(s.angles[i], u.angles[i]) >= Scalar(k_dedup_tol))
              return false;
          return true;
        });
    if (!dup) unique.push_back(s);
  }
  out.solutions = std::move(unique);

  if (out.solutions.empty()) {
    if (first_failure) {
      out.failure = std::move(first_failure);
    } else if (n_limit_rejected > 0) {
      out.failure = IkFailure{
          IkErrorKind::NoConsistentBranch,
          detail::format_failure("%.0f verified candidates rejected by joint limits",
                                 double(n_limit_rejected))};
    } else {
      out.failure = IkFailure{
          IkErrorKind::NoConsistentBranch,
          detail::format_failure("%.0f candidate joint vectors assembled, none verified",
                                 double(n_candidates))};
    }
  }
  return out;
}

}  // namespace sixr
