#pragma once

// Core value types for a 6R arm whose last three joint axes intersect the
// arm plane: link parameters, joint vectors, end-effector poses, branch
// labels, and the coefficient bundles used by the half-angle solvers.
// Everything is templated on the scalar so the solvers run in float, double,
// or long double; all angles are radians, all lengths metres.

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sixr {

template <class Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;

template <class Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;

// One entry per joint, theta1..theta6.
template <class Scalar>
using Joints = Eigen::Matrix<Scalar, 6, 1>;

using Vec3d = Vec3<double>;
using Jointsd = Joints<double>;

// Geometry of the arm: two in-plane links (a2, a3), the lateral shoulder
// offset d4, the in-plane wrist offset d5, and the tool offset d6 along the
// last joint axis. Joint limits are rows of (lo, hi), applied to normalized
// angles.
template <class Scalar = double>
struct ArmParams {
  Scalar a2{0};
  Scalar a3{0};
  Scalar d4{0};
  Scalar d5{0};
  Scalar d6{0};
  Eigen::Matrix<Scalar, 6, 2> joint_limits = default_joint_limits();

  static Eigen::Matrix<Scalar, 6, 2> default_joint_limits() {
    Eigen::Matrix<Scalar, 6, 2> lim;
    lim.col(0).setConstant(-std::numbers::pi_v<Scalar>);
    lim.col(1).setConstant(std::numbers::pi_v<Scalar>);
    return lim;
  }

  // Generous outer bound on reachable distance from the shoulder.
  Scalar max_reach() const { return a2 + a3 + d5 + d6; }
};

using ArmParamsd = ArmParams<double>;

// End-effector frame: position plus the x and z axes of the tool triad.
// The y axis is implied right-handed. Axes are expected unit length and
// mutually orthogonal within k_axis_tol.
template <class Scalar = double>
struct Pose {
  Vec3<Scalar> p = Vec3<Scalar>::Zero();
  Vec3<Scalar> x_axis = Vec3<Scalar>::UnitX();
  Vec3<Scalar> z_axis = Vec3<Scalar>::UnitZ();

  Vec3<Scalar> y_axis() const { return z_axis.cross(x_axis); }

  // Columns x, y, z; orthonormal when the pose invariant holds.
  Eigen::Matrix<Scalar, 3, 3> rotation() const {
    Eigen::Matrix<Scalar, 3, 3> r;
    r.col(0) = x_axis;
    r.col(1) = y_axis();
    r.col(2) = z_axis;
    return r;
  }
};

using Posed = Pose<double>;

inline constexpr double k_axis_tol = 1e-9;

// Identifies one closed-form solution branch per binary choice in the
// pipeline: shoulder root, elbow root, wrist flip. Letters are positional
// (A = first root of the respective quadratic), not anatomical.
enum class Branch : std::uint8_t { A = 0, B = 1 };

struct BranchLabel {
  Branch shoulder = Branch::A;
  Branch elbow = Branch::A;
  Branch wrist = Branch::A;

  friend auto operator<=>(const BranchLabel&, const BranchLabel&) = default;
};

inline char to_char(Branch b) { return b == Branch::A ? 'A' : 'B'; }

inline std::string to_string(const BranchLabel& l) {
  return {to_char(l.shoulder), to_char(l.elbow), to_char(l.wrist)};
}

// Coefficients of a cos(theta) + b sin(theta) = c. Solvable over the reals
// iff c^2 <= a^2 + b^2.
template <class Scalar = double>
struct TrigLineEq {
  Scalar a{0};
  Scalar b{0};
  Scalar c{0};
};

// Real-part equation of the planar elbow: l5 cos(theta3) - l6 sin(theta3) = l4.
template <class Scalar = double>
struct ElbowRealEq {
  Scalar l4{0};
  Scalar l5{0};
  Scalar l6{0};

  TrigLineEq<Scalar> as_line() const { return {l5, -l6, l4}; }
};

// One full joint solution with its branch identity and the forward-model
// verification residuals it passed.
template <class Scalar = double>
struct IkSolution {
  Joints<Scalar> angles = Joints<Scalar>::Zero();
  BranchLabel branch;
  Scalar pos_residual{0};
  Scalar ori_residual{0};
};

using IkSolutiond = IkSolution<double>;

// Wraps into (-pi, pi]. std::remainder returns the exact value in
// [-pi, pi]; only the open endpoint needs fixing.
template <class Scalar>
Scalar normalize_angle(Scalar theta) {
  const Scalar pi = std::numbers::pi_v<Scalar>;
  Scalar r = std::remainder(theta, Scalar(2) * pi);
  if (r <= -pi) r += Scalar(2) * pi;
  return r;
}

template <class Scalar>
Joints<Scalar> normalize_angles(const Joints<Scalar>& q) {
  Joints<Scalar> out;
  for (int i = 0; i < 6; ++i) out[i] = normalize_angle(q[i]);
  return out;
}

// Shortest angular distance between two angles, in [0, pi].
template <class Scalar>
Scalar circular_distance(Scalar a, Scalar b) {
  return std::abs(normalize_angle(a - b));
}

// Angle between two unit axes in [0, pi]. The atan2 form stays accurate for
// nearly parallel and nearly opposite inputs where acos loses digits.
template <class DerivedU, class DerivedV>
typename DerivedU::Scalar angle_between_axes(const Eigen::MatrixBase<DerivedU>& u,
                                             const Eigen::MatrixBase<DerivedV>& v) {
  using S = typename DerivedU::Scalar;
  const Vec3<S> uu = u.eval();
  const Vec3<S> vv = v.eval();
  return std::atan2(uu.cross(vv).norm(), uu.dot(vv));
}

// Raised when pose axes cannot form a frame (near-zero or parallel input).
struct DegenerateAxes : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Builds a valid pose from possibly non-unit, possibly slightly skew axes:
// z is normalized, x is orthogonalized against z and re-normalized.
template <class Scalar>
Pose<Scalar> pose_from_axes(const Vec3<Scalar>& p, const Vec3<Scalar>& x_axis,
                            const Vec3<Scalar>& z_axis) {
  const Scalar nx = x_axis.norm();
  const Scalar nz = z_axis.norm();
  if (nx < Scalar(k_axis_tol) || nz < Scalar(k_axis_tol))
    throw DegenerateAxes("pose axes: near-zero length input");
  const Vec3<Scalar> zu = z_axis / nz;
  const Vec3<Scalar> xu = x_axis / nx;
  if (xu.cross(zu).norm() < Scalar(k_axis_tol))
    throw DegenerateAxes("pose axes: x and z are parallel");
  Vec3<Scalar> xo = xu - xu.dot(zu) * zu;
  xo.normalize();
  return Pose<Scalar>{p, xo, zu};
}

}  // namespace sixr
