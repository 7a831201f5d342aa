#pragma once

// One-qubit sender (site 1) and receiver (site N); every other spin starts in
// the thermal state exp(b I_z) / (2 cosh(b/2))^(N-1).
//
// Receiver populations.  Free-fermion evolution gives the exact excited
// population  rho22 = p + (|a1|^2 - p) |f|^2  with p = 1 / (1 + e^b) the
// thermal excitation probability.  The closed forms usually quoted for this
// line carry the thermal term at half weight, rho22 = p - (p/2 - |a1|^2) |f|^2,
// and every lambda^(0) expression derived from them inherits that factor.
// Both are available: DiagonalModel::exact is verified against the dense
// simulator, DiagonalModel::published reproduces the quoted closed forms
// (state-independent condition |f|^2 = 2e^b/(1+2e^b), zero-order perfect
// transfer |a1|^2 = (2-|f|^2)/(2(1-|f|^2)(1+e^b)), ...).
//
// Writing  rho22 = p - (kappa p - |a1|^2) |f|^2  with kappa = 1 (exact) or
// 1/2 (published), all scale-factor formulas below are the same algebra with a
// different kappa.

#include <cmath>
#include <optional>

#include <Eigen/Dense>

#include "mqscale/errors.hpp"
#include "mqscale/spectral.hpp"

namespace mqscale::one_qubit {

enum class DiagonalModel { exact, published };

inline double thermal_weight(DiagonalModel model) {
  return model == DiagonalModel::exact ? 1.0 : 0.5;
}

/// Sender qubit: excited population |a1|^2 and the coherence a0 a1^*.
struct Qubit1State {
  double a1_sq = 0.0;
  cplx phase_prod{};

  static Qubit1State pure(cplx a0, cplx a1) {
    const double norm = std::norm(a0) + std::norm(a1);
    return {std::norm(a1) / norm, a0 * std::conj(a1) / norm};
  }

  bool valid(double tol = 1e-12) const {
    return a1_sq >= -tol && a1_sq <= 1.0 + tol &&
           std::norm(phase_prod) <= a1_sq * (1.0 - a1_sq) + tol;
  }

  /// Basis order (|0>, |1>); |0> is the ground state.
  Eigen::Matrix2cd matrix() const {
    Eigen::Matrix2cd m;
    m << 1.0 - a1_sq, phase_prod, std::conj(phase_prod), a1_sq;
    return m;
  }
};

struct Restore1Result {
  cplx lambda1;
  double lambda0 = 0.0;
  Eigen::Matrix2cd rho_receiver;
};

namespace detail {

inline double excitation_probability(double b) { return 1.0 / (1.0 + std::exp(b)); }

inline void check_b(double b) {
  if (!(b >= 0.0)) throw ConfigError("inverse temperature must be >= 0");
}

}  // namespace detail

/// lambda^(1) = f^* (-tanh(b/2))^(N-1); the (1,2) element scale, independent of the sender.
inline cplx lambda1_1q(const ModeBasis& basis, double t, double b) {
  detail::check_b(b);
  const double pref = std::pow(-std::tanh(0.5 * b), basis.size() - 1);
  return pref * std::conj(endpoint_amplitude(basis, t));
}

/// Receiver density matrix, basis (|0>, |1>).
inline Eigen::Matrix2cd receiver_state_1q(const Qubit1State& state, double t, double b,
                                          const ModeBasis& basis,
                                          DiagonalModel model = DiagonalModel::exact) {
  detail::check_b(b);
  const double p = detail::excitation_probability(b);
  const double f2 = std::norm(endpoint_amplitude(basis, t));
  const double rho22 = p - (thermal_weight(model) * p - state.a1_sq) * f2;
  const cplx rho12 = lambda1_1q(basis, t, b) * state.phase_prod;
  Eigen::Matrix2cd r;
  r << 1.0 - rho22, rho12, std::conj(rho12), rho22;
  return r;
}

/// Variant A: rho^(R)_11 = lambda^(0) rho^(S)_11, rho^(R)_22 fixes the trace.
inline double lambda0_variant_a(const Qubit1State& state, double t, double b,
                                const ModeBasis& basis,
                                DiagonalModel model = DiagonalModel::exact) {
  detail::check_b(b);
  if (std::abs(1.0 - state.a1_sq) < 1e-15) {
    throw SingularInputError("variant A needs |a1|^2 != 1");
  }
  const double p = detail::excitation_probability(b);
  const double f2 = std::norm(endpoint_amplitude(basis, t));
  const double rho11 = 1.0 - p + (thermal_weight(model) * p - state.a1_sq) * f2;
  return rho11 / (1.0 - state.a1_sq);
}

/// Variant B: rho^(R)_22 = lambda^(0) rho^(S)_22, rho^(R)_11 fixes the trace.
/// Tends to |f|^2 as b grows.
inline double lambda0_variant_b(const Qubit1State& state, double t, double b,
                                const ModeBasis& basis,
                                DiagonalModel model = DiagonalModel::exact) {
  detail::check_b(b);
  if (state.a1_sq <= 0.0) throw SingularInputError("variant B needs |a1|^2 > 0");
  const double p = detail::excitation_probability(b);
  const double f2 = std::norm(endpoint_amplitude(basis, t));
  return f2 + p * (1.0 - thermal_weight(model) * f2) / state.a1_sq;
}

inline Restore1Result restore_variant_a(const Qubit1State& state, double t, double b,
                                        const ModeBasis& basis,
                                        DiagonalModel model = DiagonalModel::exact) {
  return {lambda1_1q(basis, t, b), lambda0_variant_a(state, t, b, basis, model),
          receiver_state_1q(state, t, b, basis, model)};
}

inline Restore1Result restore_variant_b(const Qubit1State& state, double t, double b,
                                        const ModeBasis& basis,
                                        DiagonalModel model = DiagonalModel::exact) {
  return {lambda1_1q(basis, t, b), lambda0_variant_b(state, t, b, basis, model),
          receiver_state_1q(state, t, b, basis, model)};
}

/// |f|^2 at which variant A's lambda^(0) stops depending on the sender; at that
/// point lambda^(0) equals the same value.  Published model: 2e^b / (1 + 2e^b);
/// exact model: 1 (only perfect transfer decouples the sender).
inline double state_independent_target(double b, DiagonalModel model) {
  const double p = detail::excitation_probability(b);
  return (1.0 - p) / (1.0 - thermal_weight(model) * p);
}

/// Smallest t in (0, t_max] with |f(t)|^2 equal to the state-independent target,
/// located by a 0.01 scan followed by bisection to 1e-9.  A grazing touch of the
/// target (a maximum within 1e-9 of it) also counts.
inline std::optional<double> state_independent_time(double b, const ModeBasis& basis,
                                                    double t_max,
                                                    DiagonalModel model = DiagonalModel::published) {
  detail::check_b(b);
  const double target = state_independent_target(b, model);
  auto gap = [&](double t) { return std::norm(endpoint_amplitude(basis, t)) - target; };
  auto bisect = [&](double lo, double hi) {
    while (hi - lo > 1e-9) {
      const double mid = 0.5 * (lo + hi);
      (gap(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  // A maximum that only touches the target falls between scan points; polish
  // every discrete local maximum of the gap.
  auto peak_in = [&](double a, double b) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
    double gc = gap(c), gd = gap(d);
    while (b - a > 1e-10) {
      if (gc > gd) {
        b = d; d = c; gd = gc;
        c = b - inv_phi * (b - a); gc = gap(c);
      } else {
        a = c; c = d; gc = gd;
        d = a + inv_phi * (b - a); gd = gap(d);
      }
    }
    return 0.5 * (a + b);
  };
  constexpr double step = 0.01;
  double tm = 0.0, gm = gap(tm);  // previous-but-one sample
  double t0 = 0.0, g0 = gm;
  const auto count = static_cast<long>(std::ceil(t_max / step));
  for (long i = 1; i <= count; ++i) {
    const double t1 = std::min(i * step, t_max);
    const double g1 = gap(t1);
    if (std::abs(g1) <= 1e-9) return t1;
    if (g0 < 0.0 && g1 > 0.0) return bisect(t0, t1);
    if (i >= 2 && g0 < 0.0 && g1 < 0.0 && g0 >= gm && g0 >= g1) {
      const double tp = peak_in(tm, t1);
      const double gp = gap(tp);
      if (gp > 0.0) return bisect(tm, tp);
      if (gp >= -1e-9) return tp;
    }
    tm = t0;
    gm = g0;
    t0 = t1;
    g0 = g1;
  }
  return std::nullopt;
}

/// Outcome of solving lambda^(0) = 1 for the sender population.
struct PerfectZero {
  enum class Kind { value, unphysical, perfect_transfer };
  Kind kind = Kind::value;
  double a1_sq = 0.0;  // meaningful for Kind::value
};

/// |a1|^2 that makes lambda^(0) = 1 (both variants give the same condition).
/// published: (2 - |f|^2) / (2 (1 - |f|^2)(1 + e^b)); exact: 1 / (1 + e^b),
/// i.e. the sender populations equal the thermal background.
inline PerfectZero perfect_zero_a1(double t, double b, const ModeBasis& basis,
                                   DiagonalModel model = DiagonalModel::exact) {
  detail::check_b(b);
  const double f2 = std::norm(endpoint_amplitude(basis, t));
  if (std::abs(1.0 - f2) < 1e-12) return {PerfectZero::Kind::perfect_transfer, 0.0};
  const double p = detail::excitation_probability(b);
  const double a1 = p * (1.0 - thermal_weight(model) * f2) / (1.0 - f2);
  if (a1 > 1.0 || a1 < 0.0) return {PerfectZero::Kind::unphysical, a1};
  return {PerfectZero::Kind::value, a1};
}

}  // namespace mqscale::one_qubit
