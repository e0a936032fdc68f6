#pragma once

#include <sixr/fk.hpp>
#include <sixr/types.hpp>

#include <cmath>

namespace sixr::test {

// Bench arm used throughout the tests.  Dimensions in metres.
inline ArmParams<double> test_params() {
  ArmParams<double> params;
  params.a2 = 0.30;
  params.a3 = 0.25;
  params.d4 = 0.06;
  params.d5 = 0.08;
  params.d6 = 0.10;
  return params;
}

inline bool angle_close(double a, double b, double tol) {
  return circular_distance(a, b) <= tol;
}

inline double max_joint_distance(const Jointsd& a, const Jointsd& b) {
  double worst = 0.0;
  for (int i = 0; i < 6; ++i) {
    worst = std::max(worst, circular_distance(a[i], b[i]));
  }
  return worst;
}

inline bool joints_close(const Jointsd& a, const Jointsd& b, double tol) {
  return max_joint_distance(a, b) <= tol;
}

}  // namespace sixr::test
