#pragma once

// Brute-force reference: the full 2^N density matrix evolved under the dense
// XX Hamiltonian, then traced down to the receiver.  Used to certify the
// analytic maps at small N.
//
// Site s (1-based) is bit (N - s) of the basis index, i.e. Kronecker order
// site 1 (x) site 2 (x) ... (x) site N.  Local |0> is the ground state with
// I_z = +1/2, so the background exp(b I_z) favours |0>.  Sender sites are the
// leading (most significant) bits, receiver sites the trailing ones; this
// matches the |q_first q_second> ordering used by the analytic maps.

#include <bit>
#include <cmath>
#include <complex>
#include <string>

#include <Eigen/Dense>

#include "mqscale/errors.hpp"
#include "mqscale/spectral.hpp"

namespace mqscale::oracle {

inline constexpr int kMaxSites = 12;

inline int bit_of_site(int site, int n_sites) { return n_sites - site; }

inline Eigen::MatrixXd build_hamiltonian(const ChainSpec& spec) {
  spec.validate();
  const int n = spec.n_sites;
  if (n > kMaxSites) {
    throw ResourceError("dense simulation limited to " + std::to_string(kMaxSites) + " sites");
  }
  const Eigen::Index dim = Eigen::Index{1} << n;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  // I_x I_x + I_y I_y = (I+ I- + I- I+) / 2 swaps |01> <-> |10> on a bond.
  for (int s = 1; s < n; ++s) {
    const Eigen::Index lo = Eigen::Index{1} << bit_of_site(s, n);
    const Eigen::Index hi = Eigen::Index{1} << bit_of_site(s + 1, n);
    for (Eigen::Index k = 0; k < dim; ++k) {
      const bool a = (k & lo) != 0, b = (k & hi) != 0;
      if (a != b) h(k ^ lo ^ hi, k) += 0.5;
    }
  }
  return h;
}

/// Total I_z on the diagonal.
inline Eigen::VectorXd total_iz(int n_sites) {
  const Eigen::Index dim = Eigen::Index{1} << n_sites;
  Eigen::VectorXd d(dim);
  for (Eigen::Index k = 0; k < dim; ++k) {
    d(k) = 0.5 * n_sites - static_cast<double>(std::popcount(static_cast<unsigned long long>(k)));
  }
  return d;
}

/// exp(b I_z) / (2 cosh(b/2))^count on `count` spins, as a diagonal.
inline Eigen::VectorXd thermal_background(double b, int count) {
  if (!(b >= 0.0)) throw ConfigError("inverse temperature must be >= 0");
  const double up = 1.0 / (1.0 + std::exp(-b));    // |0>
  const double down = 1.0 / (1.0 + std::exp(b));   // |1>
  const Eigen::Index dim = Eigen::Index{1} << count;
  Eigen::VectorXd d(dim);
  for (Eigen::Index k = 0; k < dim; ++k) {
    const int ones = std::popcount(static_cast<unsigned long long>(k));
    d(k) = std::pow(up, count - ones) * std::pow(down, ones);
  }
  return d;
}

/// Dense chain with a cached eigendecomposition.  Const member functions are
/// safe to call concurrently.
class DenseChain {
public:
  explicit DenseChain(ChainSpec spec) : spec_(spec), hamiltonian_(build_hamiltonian(spec)) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hamiltonian_);
    if (es.info() != Eigen::Success) throw NumericError("dense diagonalization failed");
    energies_ = es.eigenvalues();
    vectors_ = es.eigenvectors();
  }

  const ChainSpec& spec() const { return spec_; }
  const Eigen::MatrixXd& hamiltonian() const { return hamiltonian_; }
  const Eigen::VectorXd& energies() const { return energies_; }

  Eigen::MatrixXcd propagator(double t) const {
    const Eigen::VectorXcd phases =
        (energies_.cast<cplx>() * cplx(0.0, -t)).array().exp().matrix();
    return vectors_.cast<cplx>() * phases.asDiagonal() * vectors_.transpose().cast<cplx>();
  }

  /// sender (x) thermal background on the remaining N - m spins.
  Eigen::MatrixXcd initial_state(const Eigen::MatrixXcd& sender, double b) const {
    const int m = sender_sites(sender);
    const Eigen::VectorXd bath = thermal_background(b, spec_.n_sites - m);
    const Eigen::Index bd = bath.size(), sd = sender.rows();
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(sd * bd, sd * bd);
    for (Eigen::Index i = 0; i < sd; ++i) {
      for (Eigen::Index j = 0; j < sd; ++j) {
        if (sender(i, j) == cplx(0.0)) continue;
        for (Eigen::Index k = 0; k < bd; ++k) rho(i * bd + k, j * bd + k) = sender(i, j) * bath(k);
      }
    }
    return rho;
  }

  Eigen::MatrixXcd evolve(const Eigen::MatrixXcd& rho0, double t) const {
    const Eigen::MatrixXcd u = propagator(t);
    return u * rho0 * u.adjoint();
  }

  /// Reduced state of the last `m` sites.
  static Eigen::MatrixXcd trace_to_tail(const Eigen::MatrixXcd& rho, int m) {
    const Eigen::Index keep = Eigen::Index{1} << m;
    const Eigen::Index rest = rho.rows() / keep;
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(keep, keep);
    for (Eigen::Index k = 0; k < rest; ++k) out += rho.block(k * keep, k * keep, keep, keep);
    return out;
  }

  /// Receiver state at time t for a 2x2 (one-qubit) or 4x4 (two-qubit) sender.
  Eigen::MatrixXcd evolve_and_trace(const Eigen::MatrixXcd& sender, double t, double b) const {
    const int m = sender_sites(sender);
    return trace_to_tail(evolve(initial_state(sender, b), t), m);
  }

private:
  int sender_sites(const Eigen::MatrixXcd& sender) const {
    int m = 0;
    if (sender.rows() == 2 && sender.cols() == 2) m = 1;
    if (sender.rows() == 4 && sender.cols() == 4) m = 2;
    if (m == 0) throw ValidationError("sender must be 2x2 or 4x4");
    if (spec_.n_sites < 2 * m) throw ConfigError("chain too short for sender and receiver");
    return m;
  }

  ChainSpec spec_;
  Eigen::MatrixXd hamiltonian_;
  Eigen::VectorXd energies_;
  Eigen::MatrixXd vectors_;
};

}  // namespace mqscale::oracle
