#include <random>

#include <gtest/gtest.h>

#include "mqscale/oracle.hpp"
#include "mqscale/two_qubit_map.hpp"
#include "support.hpp"

using namespace mqscale;
using namespace testing_support;

TEST(AlphaTable, SecondOrderCoefficient) {
  const ModeBasis basis(ChainSpec{6});
  for (double t : {1.0, 4.2, 8.5153}) {
    const AmplitudeSet a = amplitudes_at(basis, t);
    const AlphaTable table = alpha_table(a, 3.0, basis.spec());
    EXPECT_LT(std::abs(table.second - (a.f1_nm1 * a.f2_n - a.f1_n * a.f2_nm1)), 1e-15);
  }
  for (int n = 4; n <= 8; ++n) {
    EXPECT_LT(std::abs(alpha_table(ModeBasis(ChainSpec{n}), 0.0, 1.0).second), 1e-15);
  }
  EXPECT_NEAR(std::abs(alpha_table(basis, 8.5153, 10.0).second), 0.8960, 1e-3);
}

TEST(AlphaTable, Constants) {
  const ModeBasis basis(ChainSpec{7});
  const double b = 1.3;
  const AlphaTable table = alpha_table(basis, 2.0, b);
  EXPECT_NEAR(table.k1, 1.0 / (1.0 + std::exp(b)), 1e-15);
  EXPECT_NEAR(table.k3, -std::exp(-b / 2) * std::pow(std::tanh(b / 2), 4) / (2 * std::cosh(b / 2)), 1e-15);
}

TEST(AlphaTable, ConjugatePairs) {
  const ModeBasis basis(ChainSpec{6});
  const AlphaTable t = alpha_table(basis, 5.3, 2.2);
  for (int r : {11, 22, 33}) {
    EXPECT_LT(std::abs(*t.at(r, 23) - std::conj(*t.at(r, 32))), 1e-15);
    for (int c : {11, 22, 33, 44}) EXPECT_NEAR(t.at(r, c)->imag(), 0.0, 1e-15);
  }
  // Row 32 is row 23 conjugated with the 23/32 columns exchanged.
  for (int c : {11, 22, 33, 44}) EXPECT_LT(std::abs(*t.at(32, c) - std::conj(*t.at(23, c))), 1e-15);
  EXPECT_LT(std::abs(*t.at(32, 23) - std::conj(*t.at(23, 32))), 1e-15);
  EXPECT_LT(std::abs(*t.at(32, 32) - std::conj(*t.at(23, 23))), 1e-15);
  EXPECT_FALSE(t.at(12, 11).has_value());
  EXPECT_FALSE(t.at(14, 12).has_value());
}

TEST(AlphaTable, InfiniteTemperatureKillsFirstOrder) {
  for (int n = 4; n <= 9; ++n) {
    EXPECT_EQ(alpha_table(ModeBasis(ChainSpec{n}), 3.7, 0.0).first.cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(ReceiverMap, MatchesOracle) {
  std::mt19937_64 rng(101);
  for (int n = 4; n <= 6; ++n) {
    const ModeBasis basis(ChainSpec{n});
    const oracle::DenseChain chain(ChainSpec{n});
    std::uniform_real_distribution<double> ut(0.0, 2.0 * n), ub(0.0, 6.0);
    for (int k = 0; k < 20; ++k) {
      const Matrix4 s = random_density(rng);
      const double t = ut(rng), b = ub(rng);
      const Matrix4 analytic = receiver_from_sender(alpha_table(basis, t, b), s);
      EXPECT_LT((analytic - chain.evolve_and_trace(s, t, b)).norm(), 1e-9) << n;
    }
  }
}

TEST(ReceiverMap, MaximallyMixedSender) {
  const ModeBasis basis(ChainSpec{6});
  const oracle::DenseChain chain(ChainSpec{6});
  const Matrix4 s = Matrix4::Identity() / 4.0;
  const Matrix4 r = receiver_from_sender(alpha_table(basis, 4.4, 1.7), s);
  EXPECT_LT((r - chain.evolve_and_trace(s, 4.4, 1.7)).norm(), 1e-10);
  const auto blocks = decompose_blocks(r);
  for (int n : {1, 2}) EXPECT_LT(blocks.block(n).norm(), 1e-14);
}

TEST(ReceiverMap, BlockIndependence) {
  std::mt19937_64 rng(103);
  const ModeBasis basis(ChainSpec{6});
  const AlphaTable table = alpha_table(basis, 5.0, 2.5);
  for (int k = 0; k < 10; ++k) {
    const Matrix4 s = random_density(rng);
    const auto base = decompose_blocks(apply_map(table, s));
    for (int order = 1; order <= 2; ++order) {
      // Perturb sender block +-order only (keeps Hermiticity).
      const auto sb = decompose_blocks(random_hermitian(rng));
      const Matrix4 pert = s + 0.05 * (sb.block(order) + sb.block(-order));
      const auto moved = decompose_blocks(apply_map(table, pert));
      for (int m = -2; m <= 2; ++m) {
        if (std::abs(m) == order) continue;
        EXPECT_LT((moved.block(m) - base.block(m)).cwiseAbs().maxCoeff(), 1e-12);
      }
    }
    // Zeroing the first-order sender block zeroes the receiver's.
    Matrix4 no_first = s;
    const auto sb = decompose_blocks(s);
    no_first -= sb.block(1) + sb.block(-1);
    EXPECT_EQ(decompose_blocks(apply_map(table, no_first)).block(1).cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(ReceiverMap, TraceHermiticityPositivity) {
  std::mt19937_64 rng(107);
  std::uniform_real_distribution<double> ut(0.0, 30.0), ub(0.0, 10.0);
  for (int n : {4, 5, 6, 9, 20, 42}) {
    const ModeBasis basis(ChainSpec{n});
    for (int k = 0; k < 20; ++k) {
      const Matrix4 r = receiver_from_sender(alpha_table(basis, ut(rng), ub(rng)), random_density(rng));
      EXPECT_NEAR(std::abs(r.trace() - cplx(1.0)), 0.0, 1e-14);
      EXPECT_LE(hermiticity_defect(r), 1e-14);
      EXPECT_GE(min_eigenvalue(r), -1e-8);
    }
  }
}

TEST(ReceiverMap, RejectsNonHermitianSender) {
  const ModeBasis basis(ChainSpec{5});
  Matrix4 s = Matrix4::Identity() / 4.0;
  s(0, 2) = 0.1;
  EXPECT_THROW(receiver_from_sender(alpha_table(basis, 1.0, 1.0), s), ValidationError);
}

namespace {

// Operator expansion built directly from Kronecker products.
Matrix4 expansion(const OperatorCoefficients& c) {
  const auto E = e2(), Z = iz(), M = iminus(), P = iplus();
  auto pair = [](cplx a, const Matrix4& op) { return Matrix4(a * op + std::conj(a) * op.adjoint()); };
  Matrix4 r = Matrix4::Identity() / 4.0;
  r += c.a01 * kron(Z, E) + c.a02 * kron(E, Z) + c.a03 * kron(Z, Z);
  r += pair(c.a11, kron(E, M)) + pair(c.a12, kron(Z, M)) + pair(c.a13, kron(M, P));
  r += pair(c.a21, kron(M, E)) + pair(c.a22, kron(M, Z)) + pair(c.a31, kron(M, M));
  return r;
}

OperatorCoefficients random_coefficients(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 0.3);
  auto z = [&] { return cplx(g(rng), g(rng)); };
  return {g(rng), g(rng), g(rng), z(), z(), z(), z(), z(), z()};
}

}  // namespace

TEST(SenderDictionary, ZeroCoefficientsAreMaximallyMixed) {
  EXPECT_LT((sender_from_coefficients({}) - Matrix4::Identity() / 4.0).norm(), 1e-16);
}

TEST(SenderDictionary, CornerElement) {
  OperatorCoefficients c;
  c.a31 = cplx(0.1, 0.2);
  EXPECT_EQ(sender_from_coefficients(c)(0, 3), std::conj(c.a31));
}

TEST(SenderDictionary, MatchesKroneckerExpansion) {
  std::mt19937_64 rng(109);
  for (int k = 0; k < 50; ++k) {
    const auto c = random_coefficients(rng);
    EXPECT_LT((sender_from_coefficients(c) - expansion(c)).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(SenderDictionary, RoundTrip) {
  std::mt19937_64 rng(113);
  for (int k = 0; k < 50; ++k) {
    const auto c = random_coefficients(rng);
    const auto back = coefficients_from_sender(sender_from_coefficients(c));
    EXPECT_NEAR(back.a01, c.a01, 1e-15);
    EXPECT_NEAR(back.a02, c.a02, 1e-15);
    EXPECT_NEAR(back.a03, c.a03, 1e-15);
    for (auto [x, y] : {std::pair{back.a11, c.a11}, {back.a12, c.a12}, {back.a13, c.a13},
                        {back.a21, c.a21}, {back.a22, c.a22}, {back.a31, c.a31}}) {
      EXPECT_LE(std::abs(x - y), 1e-15);
    }
    const Matrix4 rho = random_density(rng);
    EXPECT_LE((sender_from_coefficients(coefficients_from_sender(rho)) - rho).cwiseAbs().maxCoeff(), 1e-15);
  }
}
