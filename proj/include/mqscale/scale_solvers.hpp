#pragma once

// Scale factors of the block-scaled transfer at fixed (t, b):
//   lambda^(2)  the single coefficient alpha_{14,14};
//   lambda^(1)  an eigenvalue of the 4x4 first-order map T^(1);
//   X^(0)       solution of T^(0) X + B = lambda^(0) X for a chosen real lambda^(0).

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <utility>

#include <Eigen/Dense>

#include "mqscale/errors.hpp"
#include "mqscale/two_qubit_map.hpp"

namespace mqscale {

using Vector4 = Eigen::Vector4cd;
using Vector5 = Eigen::Matrix<cplx, 5, 1>;
using Matrix5 = Eigen::Matrix<cplx, 5, 5>;

inline constexpr double kRealnessTol = 1e-8;
inline constexpr double kSpectrumGap = 1e-8;
inline constexpr double kMaxCondition = 1e10;

inline cplx lambda2(const AlphaTable& table) { return table.second; }

inline Matrix4 first_order_matrix(const AlphaTable& table) { return table.first; }

struct FirstOrderSolution {
  std::array<cplx, 4> eigenvalues;  // |.| descending
  int selected = 0;
  Vector4 x1;  // unit norm, largest-modulus component real positive

  double lambda1() const { return eigenvalues[selected].real(); }
};

/// Rotate v so that its largest-modulus component is real positive, then normalize.
inline Vector4 gauge_fix(Vector4 v) {
  Eigen::Index k = 0;
  v.cwiseAbs().maxCoeff(&k);
  if (std::abs(v(k)) > 0.0) v *= std::abs(v(k)) / v(k);
  v.normalize();
  v(k) = v(k).real();
  return v;
}

/// Eigen-decomposition of T^(1); retains the largest-modulus eigenvalue whose
/// imaginary part is below `realness_tol` relative to its modulus.  Empty if
/// the whole spectrum is complex.
inline std::optional<FirstOrderSolution> solve_first_order(const Matrix4& m,
                                                           double realness_tol = kRealnessTol) {
  // Near b = 0 the entries carry tanh^(N-3)(b/2) and can be subnormal, which
  // stalls the Schur iteration; solve the rescaled matrix instead.
  const double scale = m.cwiseAbs().maxCoeff();
  if (!std::isfinite(scale)) throw NumericError("first-order matrix is not finite");
  if (scale == 0.0 || scale < 1e-280) {
    FirstOrderSolution sol;
    sol.eigenvalues.fill(cplx(0.0));
    sol.x1 = Vector4::UnitX();
    return sol;
  }
  Eigen::ComplexEigenSolver<Matrix4> es(Matrix4(m / scale), true);
  if (es.info() != Eigen::Success) throw NumericError("first-order eigen-solver did not converge");

  std::array<int, 4> order = {0, 1, 2, 3};
  const Eigen::Vector4cd vals = es.eigenvalues() * scale;
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return std::abs(vals(i)) > std::abs(vals(j)); });

  FirstOrderSolution sol;
  for (int i = 0; i < 4; ++i) sol.eigenvalues[i] = vals(order[i]);
  for (int i = 0; i < 4; ++i) {
    const cplx lam = sol.eigenvalues[i];
    if (std::abs(lam.imag()) <= realness_tol * std::abs(lam)) {
      sol.selected = i;
      sol.x1 = gauge_fix(es.eigenvectors().col(order[i]));
      return sol;
    }
  }
  return std::nullopt;
}

/// T^(0) and B in the element order (11, 22, 33, 23, 32).
inline std::pair<Matrix5, Vector5> zero_order_system(const AlphaTable& table) {
  Matrix5 t;
  Vector5 b;
  for (int r = 0; r < 5; ++r) {
    const cplx col44 = table.zero(r, 3);
    for (int c = 0; c < 3; ++c) t(r, c) = table.zero(r, c) - col44;
    t(r, 3) = table.zero(r, 4);
    t(r, 4) = table.zero(r, 5);
    b(r) = col44;
  }
  return {t, b};
}

struct ZeroOrderSolution {
  double lambda0 = 0.0;
  Vector5 x0;  // (rho11, rho22, rho33, rho23, rho32)
  Vector5 b_vec;
};

/// Factored zero-order system; reuse across many lambda^(0) at fixed (t, b).
class ZeroOrderSystem {
public:
  explicit ZeroOrderSystem(const AlphaTable& table) {
    std::tie(t0_, b_) = zero_order_system(table);
    Eigen::ComplexEigenSolver<Matrix5> es(t0_, false);
    if (es.info() != Eigen::Success) throw NumericError("zero-order eigen-solver did not converge");
    spectrum_ = es.eigenvalues();
  }

  const Matrix5& matrix() const { return t0_; }
  const Vector5& inhomogeneity() const { return b_; }
  const Vector5& spectrum() const { return spectrum_; }

  /// Empty when lambda0 sits within kSpectrumGap of the spectrum of T^(0) or
  /// the shifted system is worse conditioned than kMaxCondition.
  std::optional<ZeroOrderSolution> try_solve(double lambda0) const {
    for (int i = 0; i < 5; ++i) {
      if (std::abs(spectrum_(i) - lambda0) < kSpectrumGap) return std::nullopt;
    }
    const Matrix5 shifted = lambda0 * Matrix5::Identity() - t0_;
    Eigen::PartialPivLU<Matrix5> lu(shifted);
    if (lu.rcond() < 1.0 / kMaxCondition) return std::nullopt;
    return ZeroOrderSolution{lambda0, lu.solve(b_), b_};
  }

  ZeroOrderSolution solve(double lambda0) const {
    if (auto s = try_solve(lambda0)) return *s;
    throw NumericError("lambda0 is (numerically) an eigenvalue of T^(0)");
  }

private:
  Matrix5 t0_;
  Vector5 b_;
  Vector5 spectrum_;
};

inline ZeroOrderSolution solve_zero_order(const Matrix5& t0, const Vector5& b, double lambda0) {
  Eigen::ComplexEigenSolver<Matrix5> es(t0, false);
  if (es.info() != Eigen::Success) throw NumericError("zero-order eigen-solver did not converge");
  for (int i = 0; i < 5; ++i) {
    if (std::abs(es.eigenvalues()(i) - lambda0) < kSpectrumGap) {
      throw NumericError("lambda0 is (numerically) an eigenvalue of T^(0)");
    }
  }
  const Matrix5 shifted = lambda0 * Matrix5::Identity() - t0;
  Eigen::PartialPivLU<Matrix5> lu(shifted);
  if (lu.rcond() < 1.0 / kMaxCondition) throw NumericError("zero-order system is ill-conditioned");
  return {lambda0, lu.solve(b), b};
}

}  // namespace mqscale
