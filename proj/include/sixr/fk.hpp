#pragma once

// Forward kinematics for the 6R geometry, written as the frame construction
// the inverse solver inverts step by step. The arm plane contains the base
// z axis and is selected by theta1; joints 2..4 move in that plane, the
// wrist pair (5, 6) tilts the tool axis out of it.

#include <cmath>
#include <numbers>

#include "sixr/types.hpp"

namespace sixr {

// Unit directions attached to the arm for a given joint vector:
//   r0  normal of the arm plane (horizontal),
//   r1  in-plane horizontal axis,
//   k5  joint-5 axis, in-plane at elevation phi,
//   k6  joint-6 / tool axis, rotated off r0 by theta5 about k5,
//   m5  reference tool x direction at theta6 = 0,
//   m6  tool x axis.
// phi = theta2 + theta3 + theta4 - pi/2 is kept unwrapped.
template <class Scalar = double>
struct FrameSet {
  Vec3<Scalar> r0;
  Vec3<Scalar> r1;
  Vec3<Scalar> k5;
  Vec3<Scalar> k6;
  Vec3<Scalar> m5;
  Vec3<Scalar> m6;
  Scalar phi{0};
};

template <class Scalar>
FrameSet<Scalar> build_frames(const Joints<Scalar>& q) {
  using std::cos;
  using std::sin;
  const Scalar t1 = q[0], t5 = q[4], t6 = q[5];
  FrameSet<Scalar> f;
  f.r0 = Vec3<Scalar>(sin(t1), -cos(t1), Scalar(0));
  f.r1 = Vec3<Scalar>(cos(t1), sin(t1), Scalar(0));
  f.phi = q[1] + q[2] + q[3] - std::numbers::pi_v<Scalar> / Scalar(2);
  const Vec3<Scalar> zhat = Vec3<Scalar>::UnitZ();
  f.k5 = cos(f.phi) * f.r1 + sin(f.phi) * zhat;
  f.k6 = cos(t5) * f.r0 + sin(t5) * f.k5.cross(f.r0);
  f.m5 = f.k6.cross(f.k5);
  f.m6 = cos(t6) * f.m5 + sin(t6) * f.k6.cross(f.m5);
  return f;
}

// In-plane wrist-center coordinates (X along r1, Z along world z) of the
// two-link chain plus the wrist offset d5 at elevation phi.
template <class Scalar>
Vec2<Scalar> fk_planar(Scalar theta2, Scalar theta3, Scalar phi,
                       const ArmParams<Scalar>& params) {
  using std::cos;
  using std::sin;
  return Vec2<Scalar>(
      params.a2 * cos(theta2) + params.a3 * cos(theta2 + theta3) + params.d5 * cos(phi),
      params.a2 * sin(theta2) + params.a3 * sin(theta2 + theta3) + params.d5 * sin(phi));
}

// Position of joint-5's center before the tool offset is applied.
template <class Scalar>
Vec3<Scalar> fk_wrist_center(const Joints<Scalar>& q, const ArmParams<Scalar>& params) {
  const FrameSet<Scalar> f = build_frames(q);
  const Vec2<Scalar> xz = fk_planar(q[1], q[2], f.phi, params);
  return xz[0] * f.r1 + xz[1] * Vec3<Scalar>::UnitZ() + params.d4 * f.r0;
}

template <class Scalar>
Pose<Scalar> fk(const Joints<Scalar>& q, const ArmParams<Scalar>& params) {
  const FrameSet<Scalar> f = build_frames(q);
  const Vec2<Scalar> xz = fk_planar(q[1], q[2], f.phi, params);
  const Vec3<Scalar> p5 =
      xz[0] * f.r1 + xz[1] * Vec3<Scalar>::UnitZ() + params.d4 * f.r0;
  Pose<Scalar> pose;
  pose.p = p5 + params.d6 * f.k6;
  pose.x_axis = f.m6;
  pose.z_axis = f.k6;
  return pose;
}

}  // namespace sixr
