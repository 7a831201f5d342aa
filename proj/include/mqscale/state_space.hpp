#pragma once

// Block-scaled sender states and the size of their creatable region.
//
// A sender  e4 + X0-block + c1 (X1-block + h.c.) + c2 (|00><11| + h.c.)  arrives
// as  e4 + lambda0 X0-block + lambda1 c1 (...) + lambda2 c2 (...).  The admissible
// c1, c2 >= 0 are bounded by positivity of the sender; the region in the
// scaled plane (c1 lambda1, c2 lambda2) is summarized by its two semi-axes
// S1 = c1_max |lambda1| (at c2 = 0), S2 = c2_max |lambda2| (at c1 = 0) and the
// area proxy S12 = S1 S2.

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mqscale/density.hpp"
#include "mqscale/errors.hpp"
#include "mqscale/scale_solvers.hpp"
#include "mqscale/two_qubit_map.hpp"

namespace mqscale {

inline constexpr double kBisectionResolution = 1e-9;

struct SenderTemplate {
  Vector5 x0 = Vector5::Zero();
  std::optional<Vector4> x1;
  double c1 = 0.0;
  double c2 = 0.0;
};

/// Maximally mixed zero-order vector (1/4, 1/4, 1/4, 0, 0).
inline Vector5 maximally_mixed_x0() {
  Vector5 v;
  v << 0.25, 0.25, 0.25, 0.0, 0.0;
  return v;
}

inline Matrix4 zero_order_matrix(const Vector5& x0) {
  Matrix4 r = Matrix4::Zero();
  r(0, 0) = x0(0).real();
  r(1, 1) = x0(1).real();
  r(2, 2) = x0(2).real();
  r(3, 3) = 1.0 - r(0, 0) - r(1, 1) - r(2, 2);
  r(1, 2) = x0(3);
  r(2, 1) = std::conj(x0(3));
  return r;
}

/// Hermitian first-order pattern of a vector over elements (12, 13, 24, 34).
inline Matrix4 first_order_pattern(const Vector4& x1) {
  Matrix4 m = Matrix4::Zero();
  m(0, 1) = x1(0);
  m(0, 2) = x1(1);
  m(1, 3) = x1(2);
  m(2, 3) = x1(3);
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) m(j, i) = std::conj(m(i, j));
  }
  return m;
}

inline Matrix4 second_order_pattern() {
  Matrix4 m = Matrix4::Zero();
  m(0, 3) = 1.0;
  m(3, 0) = 1.0;
  return m;
}

inline Matrix4 assemble_sender(const SenderTemplate& tpl) {
  Matrix4 r = zero_order_matrix(tpl.x0);
  if (tpl.x1) r += tpl.c1 * first_order_pattern(*tpl.x1);
  r += tpl.c2 * second_order_pattern();
  return r;
}

/// Largest c >= 0 with base + c * direction PSD (min eigenvalue >= -tol), by
/// doubling bracket and bisection to kBisectionResolution.  Returns the
/// feasible end of the final bracket.
inline double c_max_bisection(const Matrix4& base, const Matrix4& direction, double tol = kPsdTol) {
  if (min_eigenvalue(base) < -tol) throw ValidationError("base sender state is not physical");
  auto feasible = [&](double c) { return min_eigenvalue(Matrix4(base + c * direction)) >= -tol; };
  double lo = 0.0, hi = 1.0;
  while (feasible(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) return std::numeric_limits<double>::infinity();
  }
  while (hi - lo > kBisectionResolution) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? lo : hi) = mid;
  }
  return lo;
}

/// Same boundary in closed form: with base = L L^dagger positive definite,
/// c_max = -1 / lambda_min(L^-1 direction L^-dagger).  Falls back to bisection
/// when the base is singular.
inline double c_max_exact(const Matrix4& base, const Matrix4& direction, double tol = kPsdTol) {
  Eigen::LLT<Matrix4> llt(base);
  if (llt.info() != Eigen::Success || llt.matrixL().toDenseMatrix().diagonal().cwiseAbs().minCoeff() < 1e-7) {
    return c_max_bisection(base, direction, tol);
  }
  const Matrix4 half = llt.matrixL().solve(direction);
  const Matrix4 k = llt.matrixL().solve(Matrix4(half.adjoint()));
  Eigen::SelfAdjointEigenSolver<Matrix4> es(0.5 * (k + k.adjoint()), Eigen::EigenvaluesOnly);
  const double bottom = es.eigenvalues()(0);
  if (bottom >= 0.0) return std::numeric_limits<double>::infinity();
  return -1.0 / bottom;
}

enum class Ray { first_order, second_order, corner };

struct RayExtent {
  double c1_max = 0.0;  // filled for first_order and corner
  double c2_max = 0.0;  // filled for second_order and corner
};

/// c_max along the c1 axis (c2 = 0), the c2 axis (c1 = 0), or both (corner).
/// Bisection route.  x1 is required for rays that involve c1.
inline RayExtent c_max_ray(const Vector5& x0, const std::optional<Vector4>& x1, Ray which,
                           double tol = kPsdTol) {
  const Matrix4 base = zero_order_matrix(x0);
  if (min_eigenvalue(base) < -tol) throw ValidationError("base sender state is not physical");
  RayExtent out;
  if (which != Ray::second_order) {
    if (!x1) throw ValidationError("first-order ray needs an X1 vector");
    out.c1_max = c_max_bisection(base, first_order_pattern(*x1), tol);
  }
  if (which != Ray::first_order) out.c2_max = c_max_bisection(base, second_order_pattern(), tol);
  return out;
}

/// Which semi-axes enter the objective.
enum class Case {
  second_only = 1,  // c1 = 0, objective S2
  first_only = 2,   // c2 = 0, objective S1
  both = 3,         // objective S12
  uniform = 4,      // both, restricted to lambda1 = lambda2, objective S12
};

inline bool needs_first_order(Case c) { return c != Case::second_only; }
inline bool needs_second_order(Case c) { return c != Case::first_only; }

struct RegionReport {
  bool feasible = false;
  double t = 0.0, b = 0.0, lambda0 = 0.0;
  double lambda1 = 0.0, lambda2 = 0.0;
  double c1_max = 0.0, c2_max = 0.0;
  double s1 = 0.0, s2 = 0.0, s12 = 0.0;
  Vector5 x0 = Vector5::Zero();
  std::optional<Vector4> x1;

  double objective(Case c) const {
    switch (c) {
      case Case::second_only: return s2;
      case Case::first_only: return s1;
      default: return s12;
    }
  }
};

/// Everything at fixed (t, b) that does not depend on lambda0.
class ScalePoint {
public:
  ScalePoint(const ModeBasis& basis, double t, double b)
      : t_(t), b_(b), table_(alpha_table(basis, t, b)), zero_(table_),
        first_(solve_first_order(table_.first)) {}

  double t() const { return t_; }
  double b() const { return b_; }
  const AlphaTable& table() const { return table_; }
  const ZeroOrderSystem& zero_order() const { return zero_; }
  const std::optional<FirstOrderSolution>& first_order() const { return first_; }
  double lambda2() const { return table_.second.real(); }

  RegionReport region(double lambda0, Case c) const {
    RegionReport r;
    r.t = t_;
    r.b = b_;
    r.lambda0 = lambda0;
    r.lambda2 = lambda2();
    if (first_) {
      r.lambda1 = first_->lambda1();
      r.x1 = first_->x1;
    }
    if (needs_first_order(c) && (!first_ || r.lambda1 <= 0.0)) return r;
    if (needs_second_order(c) && r.lambda2 <= 0.0) return r;
    const auto sol = zero_.try_solve(lambda0);
    if (!sol) return r;
    r.x0 = sol->x0;
    const Matrix4 base = zero_order_matrix(r.x0);
    if (min_eigenvalue(base) < -kPsdTol) return r;
    r.feasible = true;
    if (needs_first_order(c)) {
      r.c1_max = c_max_exact(base, first_order_pattern(first_->x1));
      r.s1 = r.c1_max * r.lambda1;
    }
    if (needs_second_order(c)) {
      r.c2_max = c_max_exact(base, second_order_pattern());
      r.s2 = r.c2_max * r.lambda2;
    }
    r.s12 = r.s1 * r.s2;
    return r;
  }

private:
  double t_, b_;
  AlphaTable table_;
  ZeroOrderSystem zero_;
  std::optional<FirstOrderSolution> first_;
};

/// Semi-axes and area proxy at one (t, b, lambda0).  Infeasible points (no real
/// lambda1 when one is needed, a needed scale factor <= 0, singular zero-order
/// system, non-physical base) come back with feasible = false and zero metrics.
inline RegionReport region_metrics(const ModeBasis& basis, double t, double b, double lambda0,
                                   Case c) {
  return ScalePoint(basis, t, b).region(lambda0, c);
}

/// Boundary of the creatable quarter-region in the scaled plane, traced along
/// `rays` directions between the c1 axis and the c2 axis.  Diagnostics only.
inline std::vector<std::pair<double, double>> boundary_scan(const Vector5& x0, const Vector4& x1,
                                                            double lambda1, double lambda2,
                                                            int rays = 64) {
  const Matrix4 base = zero_order_matrix(x0);
  const Matrix4 m1 = first_order_pattern(x1);
  const Matrix4 m2 = second_order_pattern();
  std::vector<std::pair<double, double>> out;
  out.reserve(rays);
  for (int i = 0; i < rays; ++i) {
    const double theta = 0.5 * std::numbers::pi * i / (rays - 1);
    const double r = c_max_exact(base, Matrix4(std::cos(theta) * m1 + std::sin(theta) * m2));
    out.emplace_back(r * std::cos(theta) * std::abs(lambda1), r * std::sin(theta) * std::abs(lambda2));
  }
  return out;
}

}  // namespace mqscale
