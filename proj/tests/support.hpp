#pragma once

#include <complex>
#include <random>

#include <Eigen/Dense>

#include "mqscale/mqscale.hpp"

namespace testing_support {

using mqscale::cplx;
using mqscale::Matrix4;

inline Matrix4 random_hermitian(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix4 w;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) w(i, j) = cplx(g(rng), g(rng));
  return 0.5 * (w + w.adjoint());
}

/// W W^dagger / tr: full-rank physical state.
inline Matrix4 random_density(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix4 w;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) w(i, j) = cplx(g(rng), g(rng));
  Matrix4 r = w * w.adjoint();
  return r / r.trace().real();
}

inline Eigen::Vector4cd random_unit4(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::Vector4cd v;
  for (int i = 0; i < 4; ++i) v(i) = cplx(g(rng), g(rng));
  return v.normalized();
}

// Spin-1/2 operators with |0> = I_z eigenvalue +1/2.
inline Eigen::Matrix2cd iz() { return (Eigen::Matrix2cd() << 0.5, 0, 0, -0.5).finished(); }
inline Eigen::Matrix2cd iminus() { return (Eigen::Matrix2cd() << 0, 0, 1, 0).finished(); }
inline Eigen::Matrix2cd iplus() { return iminus().adjoint(); }
inline Eigen::Matrix2cd e2() { return Eigen::Matrix2cd::Identity(); }

inline Matrix4 kron(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
  Matrix4 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return r;
}

}  // namespace testing_support
