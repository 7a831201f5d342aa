#pragma once

// Analytic receiver map of the two-qubit line.
//
// Sender on sites (1,2) in an arbitrary state, every other spin thermal,
// receiver on sites (N-1,N).  Each receiver element is a linear combination of
// sender elements of the same coherence order only:
//
//   order 0: rho^R_ij = sum_k alpha_{ij,kk} rho^S_kk + alpha_{ij,23} rho^S_23 + alpha_{ij,32} rho^S_32
//            for ij in {11, 22, 33, 23, 32};  rho^R_44 closes the trace
//   order 1: rho^R_ij = sum alpha_{ij,nm} rho^S_nm  over ij, nm in {12, 13, 24, 34}
//   order 2: rho^R_14 = alpha_{14,14} rho^S_14
//
// The coefficients are explicit polynomials in the four amplitudes
// f_{1,N-1}, f_{1,N}, f_{2,N-1}, f_{2,N}, with the temperature entering through
// e^b and the constants K1..K4.

#include <array>
#include <cmath>
#include <optional>

#include <Eigen/Dense>

#include "mqscale/density.hpp"
#include "mqscale/errors.hpp"
#include "mqscale/spectral.hpp"

namespace mqscale {

/// Zero-order receiver rows and sender columns, as two-digit element codes.
inline constexpr std::array<int, 5> kZeroRows = {11, 22, 33, 23, 32};
inline constexpr std::array<int, 6> kZeroCols = {11, 22, 33, 44, 23, 32};
/// First-order elements in the row/column order of T^(1).
inline constexpr std::array<int, 4> kFirstOrder = {12, 13, 24, 34};

using ZeroOrderCoefficients = Eigen::Matrix<cplx, 5, 6>;

struct AlphaTable {
  double k1 = 0, k2 = 0, k3 = 0, k4 = 0;
  ZeroOrderCoefficients zero;  // rows kZeroRows, cols kZeroCols
  Matrix4 first;               // rows/cols kFirstOrder
  cplx second;                 // alpha_{14,14}

  /// alpha_{receiver, sender} by element codes, e.g. at(11, 23).  Empty for
  /// pairs that do not couple.
  std::optional<cplx> at(int receiver, int sender) const {
    auto find = [](auto const& codes, int code) -> int {
      for (std::size_t i = 0; i < codes.size(); ++i) {
        if (codes[i] == code) return static_cast<int>(i);
      }
      return -1;
    };
    if (receiver == 14 && sender == 14) return second;
    if (int r = find(kFirstOrder, receiver), c = find(kFirstOrder, sender); r >= 0 && c >= 0) {
      return first(r, c);
    }
    if (int r = find(kZeroRows, receiver), c = find(kZeroCols, sender); r >= 0 && c >= 0) {
      return zero(r, c);
    }
    return std::nullopt;
  }
};

inline AlphaTable alpha_table(const AmplitudeSet& amps, double b, const ChainSpec& spec) {
  spec.validate_two_qubit();
  if (!(b >= 0.0)) throw ConfigError("inverse temperature must be >= 0");
  const int n = spec.n_sites;

  const cplx f1m = amps.f1_nm1, f1n = amps.f1_n, f2m = amps.f2_nm1, f2n = amps.f2_n;
  const cplx c1m = std::conj(f1m), c1n = std::conj(f1n), c2m = std::conj(f2m), c2n = std::conj(f2n);
  const double n1m = std::norm(f1m), n1n = std::norm(f1n), n2m = std::norm(f2m), n2n = std::norm(f2n);
  const double e = std::exp(b);
  // Wronskian-like combination shared by most coefficients.
  const cplx w = f1n * f2m - f1m * f2n;

  AlphaTable a;
  a.k1 = 1.0 / (1.0 + e);
  a.k2 = 1.0 / (2.0 * (1.0 + std::cosh(b)));
  const double sign = (n % 2 == 0) ? 1.0 : -1.0;
  const double th = std::pow(std::tanh(0.5 * b), n - 3);
  const double ch = 2.0 * std::cosh(0.5 * b);
  a.k3 = sign * std::exp(-0.5 * b) * th / ch;
  a.k4 = sign * std::exp(0.5 * b) * th / ch;
  const double k1 = a.k1, k2 = a.k2, k3 = a.k3, k4 = a.k4;
  const double k1sq = k1 * k1;

  auto& z = a.zero;
  // row 11
  z(0, 0) = k1sq * (e * e + e * (n1m + n1n + n2m + n2n) + w * std::conj(w));
  z(0, 1) = k2 * (-(e + n1n) * (n2m - 1.0) + (-e * f2n + f1n * f2m * c1m) * c2n +
                  f1m * (f2n * c1n * c2m + c1m * (1.0 - n2n)));
  z(0, 2) = k2 * (e + n2m + n2n - f1m * (c1m * (e + n2n) - f2n * c1n * c2m) -
                  f1n * (e * c1n + f2m * (c1n * c2m - c1m * c2n)));
  z(0, 3) = k2 * e *
            ((n1n - 1.0) * (n2m - 1.0) - (f2n + f1n * f2m * c1m) * c2n +
             f1m * (c1m * (n2n - 1.0) - f2n * c1n * c2m));
  z(0, 4) = k1 * e * (f1m * c2m + f1n * c2n);
  z(0, 5) = std::conj(z(0, 4));
  // row 22
  z(1, 0) = k1sq * (-(n1n - 1.0) * (e + n2m) + (f1n * f2m * c1m - e * f2n) * c2n +
                    f1m * (f2n * c1n * c2m + c1m * (1.0 - n2n)));
  z(1, 1) = k1sq * (e * (n1n - 1.0) * (n2m - 1.0) + e * (e * f2n - f1n * f2m * c1m) * c2n +
                    f1m * (c1m * (1.0 + e * n2n) - e * f2n * c1n * c2m));
  z(1, 2) = k1sq * (e + n2m +
                    e * (n1n * (e + n2m) - (f2n + f1n * f2m * c1m) * c2n +
                         f1m * (c1m * (n2n - 1.0) - f2n * c1n * c2m)));
  z(1, 3) = k1sq * e *
            (-(1.0 + e * n1n) * (n2m - 1.0) + e * (f2n + f1n * f2m * c1m) * c2n -
             f1m * (c1m * (1.0 + e * n2n) - e * f2n * c1n * c2m));
  z(1, 4) = k1 * (f1m * c2m - e * f1n * c2n);
  z(1, 5) = std::conj(z(1, 4));
  // row 33
  z(2, 0) = k1sq * (e + n1n + n2n - f2m * ((e + n1n) * c2m - f1n * c1m * c2n) -
                    f1m * (c1m * (e + n2n) - f2n * c1n * c2m));
  z(2, 1) = k1sq * (e + n1n +
                    e * (-n2n + f2m * ((e + n1n) * c2m - f1n * c1m * c2n) +
                         f1m * (c1m * (n2n - 1.0) - f2n * c1n * c2m)));
  z(2, 2) = k1sq * (n2n + e * ((n1n - 1.0) * (n2m - 1.0) - f1n * f2m * c1m * c2n) +
                    e * f1m * (c1m * (e + n2n) - f2n * c1n * c2m));
  z(2, 3) = -k2 * (n1n + n2n - 1.0 +
                   e * (f2m * ((n1n - 1.0) * c2m - f1n * c1m * c2n) +
                        f1m * (c1m * (n2n - 1.0) - f2n * c1n * c2m)));
  z(2, 4) = k1 * (f1n * c2n - e * f1m * c2m);
  z(2, 5) = std::conj(z(2, 4));
  // row 23; the 22 and 33 entries carry the K1 prefactor of their neighbours.
  z(3, 0) = k1 * (f1m * c1n + f2m * c2n);
  z(3, 1) = k1 * (f1m * c1n - e * f2m * c2n);
  z(3, 2) = k1 * (f2m * c2n - e * f1m * c1n);
  z(3, 3) = -k1 * e * (f1m * c1n + f2m * c2n);
  z(3, 4) = f1m * c2n;
  z(3, 5) = f2m * c1n;
  // row 32 is the Hermitian partner of row 23: conj, with the 23/32 columns swapped.
  for (int c = 0; c < 4; ++c) z(4, c) = std::conj(z(3, c));
  z(4, 4) = std::conj(z(3, 5));
  z(4, 5) = std::conj(z(3, 4));

  auto& t = a.first;
  t(0, 0) = k3 * (e * f2n + w * c1m);
  t(0, 1) = -k3 * (e * f1n - w * c2m);
  t(0, 2) = k4 * (f1n - w * c2m);
  t(0, 3) = k4 * (f2n + w * c1m);

  t(1, 0) = -k3 * (f1m * f2n * c1n + f2m * (e - n1n));
  t(1, 1) = k3 * (f1n * f2m * c2n + f1m * (e - n2n));
  t(1, 2) = k4 * (f1m * (n2n - 1.0) - f1n * f2m * c2n);
  t(1, 3) = k4 * (f2m * (n1n - 1.0) - f1m * f2n * c1n);

  t(2, 0) = k3 * (f2m * (n1n - 1.0) - f1m * f2n * c1n);
  t(2, 1) = k3 * (f1n * f2m * c2n + f1m * (1.0 - n2n));
  t(2, 2) = -k3 * (f1m + e * w * c2n);
  t(2, 3) = -k3 * (f2m - e * w * c1n);

  t(3, 0) = -k3 * (f2n + w * c1m);
  t(3, 1) = k3 * (f1n - w * c2m);
  t(3, 2) = k3 * (e * w * c2m - f1n);
  t(3, 3) = -k3 * (e * w * c1m + f2n);

  a.second = f1m * f2n - f1n * f2m;
  return a;
}

inline AlphaTable alpha_table(const ModeBasis& basis, double t, double b) {
  return alpha_table(amplitudes_at(basis, t), b, basis.spec());
}

/// Raw linear map; accepts any Hermitian 4x4 (trace need not be 1).  Element
/// (4,4) is set to 1 - rho11 - rho22 - rho33, so the result has unit trace.
inline Matrix4 apply_map(const AlphaTable& a, const Matrix4& s) {
  const std::array<cplx, 6> zero_in = {s(0, 0), s(1, 1), s(2, 2), s(3, 3), s(1, 2), s(2, 1)};
  const Eigen::Vector4cd first_in(s(0, 1), s(0, 2), s(1, 3), s(2, 3));

  Matrix4 r = Matrix4::Zero();
  std::array<cplx, 5> zero_out{};
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 6; ++j) zero_out[i] += a.zero(i, j) * zero_in[j];
  }
  r(0, 0) = zero_out[0].real();
  r(1, 1) = zero_out[1].real();
  r(2, 2) = zero_out[2].real();
  r(1, 2) = zero_out[3];
  r(2, 1) = std::conj(zero_out[3]);
  r(3, 3) = 1.0 - r(0, 0) - r(1, 1) - r(2, 2);

  const Eigen::Vector4cd first_out = a.first * first_in;
  r(0, 1) = first_out(0);
  r(0, 2) = first_out(1);
  r(1, 3) = first_out(2);
  r(2, 3) = first_out(3);
  r(0, 3) = a.second * s(0, 3);
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) r(j, i) = std::conj(r(i, j));
  }
  return r;
}

/// Receiver state of a physical sender.  Throws NumericError if the output
/// breaks positivity beyond 1e-8 (the physical map cannot do that).
inline Matrix4 receiver_from_sender(const AlphaTable& a, const Matrix4& rho_s) {
  if (hermiticity_defect(rho_s) > kHermitianTol) {
    throw ValidationError("sender matrix is not Hermitian");
  }
  Matrix4 r = apply_map(a, rho_s);
  if (min_eigenvalue(rho_s) >= -kPsdTol && min_eigenvalue(r) < -1e-8) {
    throw NumericError("receiver map produced a non-positive matrix from a physical sender");
  }
  return r;
}

/// Coefficients of the operator expansion
///   rho = E/4 + a01 Iz1 + a02 Iz2 + a03 Iz1 Iz2 + a11 I2- + a12 Iz1 I2- + a13 I1- I2+
///         + a21 I1- + a22 I1- Iz2 + a31 I1- I2- + h.c.
struct OperatorCoefficients {
  double a01 = 0, a02 = 0, a03 = 0;
  cplx a11, a12, a13, a21, a22, a31;
};

inline Matrix4 sender_from_coefficients(const OperatorCoefficients& c) {
  Matrix4 r = Matrix4::Zero();
  r(0, 0) = 0.25 * (1 + 2 * c.a01 + 2 * c.a02 + c.a03);
  r(1, 1) = 0.25 * (1 + 2 * c.a01 - 2 * c.a02 - c.a03);
  r(2, 2) = 0.25 * (1 - 2 * c.a01 + 2 * c.a02 - c.a03);
  r(3, 3) = 1.0 - r(0, 0) - r(1, 1) - r(2, 2);
  r(0, 1) = 0.5 * (2.0 * std::conj(c.a11) + std::conj(c.a12));
  r(0, 2) = 0.5 * (2.0 * std::conj(c.a21) + std::conj(c.a22));
  r(0, 3) = std::conj(c.a31);
  r(1, 2) = std::conj(c.a13);
  r(1, 3) = 0.5 * (2.0 * std::conj(c.a21) - std::conj(c.a22));
  r(2, 3) = 0.5 * (2.0 * std::conj(c.a11) - std::conj(c.a12));
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) r(j, i) = std::conj(r(i, j));
  }
  return r;
}

/// Inverse of sender_from_coefficients on unit-trace Hermitian matrices.
inline OperatorCoefficients coefficients_from_sender(const Matrix4& r) {
  const double d1 = r(0, 0).real(), d2 = r(1, 1).real(), d3 = r(2, 2).real(), d4 = r(3, 3).real();
  OperatorCoefficients c;
  c.a01 = 0.5 * (d1 + d2 - d3 - d4);
  c.a02 = 0.5 * (d1 - d2 + d3 - d4);
  c.a03 = d1 - d2 - d3 + d4;
  c.a11 = std::conj(0.5 * (r(0, 1) + r(2, 3)));
  c.a12 = std::conj(r(0, 1) - r(2, 3));
  c.a21 = std::conj(0.5 * (r(0, 2) + r(1, 3)));
  c.a22 = std::conj(r(0, 2) - r(1, 3));
  c.a13 = std::conj(r(1, 2));
  c.a31 = std::conj(r(0, 3));
  return c;
}

}  // namespace mqscale
