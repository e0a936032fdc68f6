#pragma once

// Damped-least-squares iterative IK, used as the comparison baseline for the
// closed-form solver. Descends a 6D task error (position + axis-angle
// orientation) through a centrally-differenced Jacobian.

#include <Eigen/Cholesky>
#include <Eigen/Geometry>

#include <cmath>

#include "sixr/fk.hpp"
#include "sixr/types.hpp"

namespace sixr {

template <class Scalar = double>
struct DlsConfig {
  Scalar damping{Scalar(0.01)};   // lambda in (J J^T + lambda^2 I)
  int max_iters{200};
  Scalar pos_tol{Scalar(1e-6)};   // metres
  Scalar ori_tol{Scalar(1e-6)};   // radians
  Scalar step_scale{Scalar(1)};
};

template <class Scalar = double>
struct DlsResult {
  Joints<Scalar> angles = Joints<Scalar>::Zero();
  int iterations = 0;
  bool converged = false;
  Scalar pos_residual{0};
  Scalar ori_residual{0};
};

namespace detail {

// Rotation vector (angle * axis) of the relative rotation taking frame b to
// frame a.
template <class Scalar>
Vec3<Scalar> rotation_between(const Eigen::Matrix<Scalar, 3, 3>& a,
                              const Eigen::Matrix<Scalar, 3, 3>& b) {
  const Eigen::AngleAxis<Scalar> aa(Eigen::Matrix<Scalar, 3, 3>(a * b.transpose()));
  return aa.angle() * aa.axis();
}

}  // namespace detail

// 6x6 task Jacobian by central differences: rows 0..2 are d(position)/dq,
// rows 3..5 the angular velocity directions recovered from the relative
// rotation of the perturbed tool frames. Entries converge at O(h^2).
template <class Scalar>
Eigen::Matrix<Scalar, 6, 6> numeric_jacobian(const Joints<Scalar>& q,
                                             const ArmParams<Scalar>& params,
                                             Scalar h = Scalar(1e-7)) {
  Eigen::Matrix<Scalar, 6, 6> jac;
  for (int i = 0; i < 6; ++i) {
    Joints<Scalar> qp = q, qm = q;
    qp[i] += h;
    qm[i] -= h;
    const Pose<Scalar> pp = fk(qp, params);
    const Pose<Scalar> pm = fk(qm, params);
    jac.template block<3, 1>(0, i) = (pp.p - pm.p) / (Scalar(2) * h);
    jac.template block<3, 1>(3, i) =
        detail::rotation_between(pp.rotation(), pm.rotation()) / (Scalar(2) * h);
  }
  return jac;
}

// One damped Gauss-Newton descent from the given seed. Residuals follow the
// same definitions the analytic solver reports (Euclidean position error,
// worst axis misalignment), so results are directly comparable. The error
// norm is not guaranteed to decrease monotonically; only the final state is
// meaningful.
template <class Scalar>
DlsResult<Scalar> ik_dls(const Pose<Scalar>& pose, const Joints<Scalar>& seed,
                         const ArmParams<Scalar>& params,
                         const DlsConfig<Scalar>& cfg = {}) {
  DlsResult<Scalar> out;
  Joints<Scalar> q = normalize_angles(seed);
  const Eigen::Matrix<Scalar, 3, 3> r_target = pose.rotation();

  for (int iter = 0; iter <= cfg.max_iters; ++iter) {
    const Pose<Scalar> cur = fk(q, params);
    out.pos_residual = (pose.p - cur.p).norm();
    out.ori_residual = std::max(angle_between_axes(cur.x_axis, pose.x_axis),
                                angle_between_axes(cur.z_axis, pose.z_axis));
    out.iterations = iter;
    if (out.pos_residual < cfg.pos_tol && out.ori_residual < cfg.ori_tol) {
      out.converged = true;
      break;
    }
    if (iter == cfg.max_iters) break;

    Eigen::Matrix<Scalar, 6, 1> err;
    err.template head<3>() = pose.p - cur.p;
    err.template tail<3>() =
        detail::rotation_between(r_target, cur.rotation());

    const Eigen::Matrix<Scalar, 6, 6> jac = numeric_jacobian(q, params);
    Eigen::Matrix<Scalar, 6, 6> jjt;
    jjt.noalias() = jac * jac.transpose();
    jjt.diagonal().array() += cfg.damping * cfg.damping;
    const Eigen::Matrix<Scalar, 6, 1> dq =
        jac.transpose() * jjt.ldlt().solve(err);
    q = normalize_angles<Scalar>(q + cfg.step_scale * dq);
  }
  out.angles = q;
  return out;
}

}  // namespace sixr
