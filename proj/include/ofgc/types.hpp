#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>

namespace ofgc {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

using Rng = std::mt19937_64;

inline constexpr double kDefaultSeed = 42;

// Uniform point on the unit sphere in dimension n.
inline Vec random_unit_vector(int n, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec v(n);
  do {
    for (int i = 0; i < n; ++i) v[i] = gauss(rng);
  } while (v.norm() < 1e-12);
  return v / v.norm();
}

}  // namespace ofgc
