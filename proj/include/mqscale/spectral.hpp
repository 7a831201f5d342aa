#pragma once

// Single-particle spectral data of the open, homogeneous XX chain.
//
// The Jordan-Wigner transformation maps the chain onto free fermions with
// sine modes g_{jk} and energies eps_k = cos(pi k / (N+1)).  Everything the
// analytic receiver maps need is a handful of matrix elements of the
// single-excitation propagator between the sender sites (1, 2) and the
// receiver sites (N-1, N).  The coupling constant is fixed to 1, so time is
// dimensionless.

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mqscale/errors.hpp"

namespace mqscale {

using cplx = std::complex<double>;

struct ChainSpec {
  int n_sites = 0;

  /// One-qubit line needs a sender and a receiver.
  void validate() const {
    if (n_sites < 2) {
      throw ConfigError("chain needs at least 2 sites, got " + std::to_string(n_sites));
    }
  }

  /// Two-qubit sender and receiver must not overlap.
  void validate_two_qubit() const {
    if (n_sites < 4) {
      throw ConfigError("two-qubit line needs at least 4 sites, got " +
                        std::to_string(n_sites));
    }
  }
};

namespace detail {

/// Pairwise (cascade) summation; keeps the rounding error O(log n) for the
/// mode sums below.
template <typename T>
T pairwise_sum(std::span<const T> v) {
  if (v.size() <= 8) {
    T s{};
    for (const auto& x : v) s += x;
    return s;
  }
  const auto half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

}  // namespace detail

/// Mode amplitudes and energies of the N-site chain.  Immutable once built.
class ModeBasis {
public:
  explicit ModeBasis(ChainSpec spec) : spec_(spec) {
    spec.validate();
    const int n = spec.n_sites;
    const double scale = std::sqrt(2.0 / (n + 1));
    const double step = std::numbers::pi / (n + 1);
    g_.resize(n, n);
    energies_.resize(n);
    for (int k = 1; k <= n; ++k) {
      energies_(k - 1) = std::cos(step * k);
      for (int j = 1; j <= n; ++j) {
        g_(j - 1, k - 1) = scale * std::sin(step * j * k);
      }
    }
  }

  const ChainSpec& spec() const { return spec_; }
  int size() const { return spec_.n_sites; }

  /// g_{jk}, both indices 1-based.
  double g(int site, int mode) const { return g_(site - 1, mode - 1); }
  /// eps_k, 1-based.
  double energy(int mode) const { return energies_(mode - 1); }

  const Eigen::MatrixXd& mode_matrix() const { return g_; }
  const Eigen::VectorXd& energies() const { return energies_; }

private:
  ChainSpec spec_;
  Eigen::MatrixXd g_;
  Eigen::VectorXd energies_;
};

inline ModeBasis build_modes(ChainSpec spec) { return ModeBasis(spec); }

namespace detail {

inline cplx mode_sum(const ModeBasis& basis, int i, int j, double t, double sign) {
  const int n = basis.size();
  std::vector<cplx> terms(n);
  for (int k = 1; k <= n; ++k) {
    const double w = basis.g(i, k) * basis.g(j, k);
    const double phase = sign * t * basis.energy(k);
    terms[k - 1] = cplx(w * std::cos(phase), w * std::sin(phase));
  }
  return pairwise_sum<cplx>(terms);
}

inline void check_site(const ModeBasis& basis, int i) {
  if (i < 1 || i > basis.size()) {
    throw ConfigError("site index " + std::to_string(i) + " outside 1.." +
                      std::to_string(basis.size()));
  }
}

}  // namespace detail

/// f_{ij}(t) = sum_k g_{ik} g_{jk} exp(-i t eps_k): amplitude for an excitation
/// at site j to be found at site i (equivalently i -> j; g is symmetric).
inline cplx transition_amplitude(const ModeBasis& basis, int i, int j, double t) {
  detail::check_site(basis, i);
  detail::check_site(basis, j);
  return detail::mode_sum(basis, i, j, t, -1.0);
}

/// End-to-end amplitude of the one-qubit line, f(t) = sum_k exp(+i eps_k t) g_{1k} g_{Nk}.
/// Note the opposite phase convention to transition_amplitude: f(t) = conj(f_{1N}(t)).
/// Purely real for odd N and purely imaginary for even N.
inline cplx endpoint_amplitude(const ModeBasis& basis, double t) {
  return detail::mode_sum(basis, 1, basis.size(), t, +1.0);
}

/// Sender-to-receiver amplitudes of the two-qubit line at one instant.
struct AmplitudeSet {
  double t = 0.0;
  cplx f1_nm1;  // f_{1,N-1}
  cplx f1_n;    // f_{1,N}
  cplx f2_nm1;  // f_{2,N-1}
  cplx f2_n;    // f_{2,N}
  cplx f_end;   // endpoint_amplitude (one-qubit line)
};

inline AmplitudeSet amplitudes_at(const ModeBasis& basis, double t) {
  const int n = basis.size();
  AmplitudeSet a;
  a.t = t;
  a.f_end = endpoint_amplitude(basis, t);
  if (n >= 2) {
    a.f1_nm1 = transition_amplitude(basis, 1, n - 1, t);
    a.f1_n = transition_amplitude(basis, 1, n, t);
    a.f2_nm1 = transition_amplitude(basis, 2, n - 1, t);
    a.f2_n = transition_amplitude(basis, 2, n, t);
  }
  return a;
}

/// Location and value of the largest |f(t)|^2 over [t_lo, t_hi]: uniform scan
/// with spacing `step`, then golden-section polish inside the winning cell.
struct EndpointPeak {
  double t = 0.0;
  double probability = 0.0;
};

inline EndpointPeak max_endpoint_probability(const ModeBasis& basis, double t_lo, double t_hi,
                                             double step = 1e-3) {
  if (!(t_hi > t_lo) || !(step > 0)) throw ConfigError("empty time window");
  auto prob = [&](double t) { return std::norm(endpoint_amplitude(basis, t)); };
  EndpointPeak best{t_lo, prob(t_lo)};
  const auto count = static_cast<long>(std::ceil((t_hi - t_lo) / step));
  for (long i = 1; i <= count; ++i) {
    const double t = std::min(t_lo + i * step, t_hi);
    const double p = prob(t);
    if (p > best.probability) best = {t, p};
  }
  double a = std::max(t_lo, best.t - step);
  double b = std::min(t_hi, best.t + step);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double pc = prob(c), pd = prob(d);
  while (b - a > 1e-10) {
    if (pc > pd) {
      b = d; d = c; pd = pc;
      c = b - inv_phi * (b - a); pc = prob(c);
    } else {
      a = c; c = d; pc = pd;
      d = a + inv_phi * (b - a); pd = prob(d);
    }
  }
  const double tm = 0.5 * (a + b);
  const double pm = prob(tm);
  if (pm > best.probability) best = {tm, pm};
  return best;
}

}  // namespace mqscale
