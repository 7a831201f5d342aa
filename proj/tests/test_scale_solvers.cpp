#include <random>

#include <gtest/gtest.h>

#include "mqscale/optimizer.hpp"
#include "mqscale/oracle.hpp"
#include "mqscale/scale_solvers.hpp"
#include "mqscale/state_space.hpp"
#include "support.hpp"

using namespace mqscale;

namespace {

Vector4 first_vector(const Matrix4& s) { return Vector4(s(0, 1), s(0, 2), s(1, 3), s(2, 3)); }

Vector5 zero_vector(const Matrix4& s) {
  Vector5 v;
  v << s(0, 0), s(1, 1), s(2, 2), s(1, 2), s(2, 1);
  return v;
}

template <typename A, typename B>
double max_diff(const A& a, const B& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST(Lambda2, VanishesAtTimeZero) {
  for (int n = 4; n <= 9; ++n) EXPECT_LT(std::abs(lambda2(alpha_table(ModeBasis(ChainSpec{n}), 0.0, 2.0))), 1e-15);
}

TEST(Lambda2, FirstMaximumSixSites) {
  const auto peak = first_lambda2_peak(ModeBasis(ChainSpec{6}), 9.0);
  EXPECT_NEAR(peak.value, 0.8960, 1e-3);
  EXPECT_NEAR(peak.t, 8.5153, 1e-3);
}

TEST(Lambda2, FirstMaximumFortyTwoSites) {
  const auto peak = first_lambda2_peak(ModeBasis(ChainSpec{42}), 63.0);
  EXPECT_NEAR(peak.value, 0.2621, 1e-3);
  EXPECT_NEAR(peak.t, 47.8855, 1e-2);
}

TEST(Lambda2, IndependentOfTemperature) {
  const ModeBasis basis(ChainSpec{6});
  EXPECT_EQ(lambda2(alpha_table(basis, 5.0, 0.0)), lambda2(alpha_table(basis, 5.0, 7.0)));
}

TEST(FirstOrder, ZeroAtInfiniteTemperature) {
  EXPECT_EQ(first_order_matrix(alpha_table(ModeBasis(ChainSpec{6}), 5.0, 0.0)).cwiseAbs().maxCoeff(), 0.0);
}

TEST(FirstOrder, AgreesWithReceiverMap) {
  std::mt19937_64 rng(201);
  std::uniform_real_distribution<double> ut(0.0, 20.0), ub(0.0, 8.0);
  for (int n : {4, 6, 11}) {
    const ModeBasis basis(ChainSpec{n});
    for (int k = 0; k < 10; ++k) {
      const AlphaTable table = alpha_table(basis, ut(rng), ub(rng));
      const Matrix4 s = testing_support::random_density(rng);
      const Vector4 out = first_order_matrix(table) * first_vector(s);
      EXPECT_LT(max_diff(out, first_vector(apply_map(table, s))), 1e-12);
    }
  }
}

TEST(FirstOrder, DiagonalMatrix) {
  Matrix4 m = Matrix4::Zero();
  m.diagonal() << 0.3, 0.5, -0.2, 0.1;
  const auto sol = solve_first_order(m);
  ASSERT_TRUE(sol.has_value());
  EXPECT_EQ(sol->lambda1(), 0.5);
  EXPECT_LT(max_diff(sol->x1, Vector4(0, 1, 0, 0)), 1e-15);
  EXPECT_EQ(sol->eigenvalues[3], cplx(0.1));
}

TEST(FirstOrder, FallsBackToLargestRealEigenvalue) {
  Matrix4 m = Matrix4::Zero();
  m(0, 1) = -0.9;
  m(1, 0) = 0.9;  // +-0.9i
  m(2, 2) = 0.3;
  m(3, 3) = -0.1;
  const auto sol = solve_first_order(m);
  ASSERT_TRUE(sol.has_value());
  EXPECT_EQ(sol->selected, 2);
  EXPECT_NEAR(sol->lambda1(), 0.3, 1e-15);
}

TEST(FirstOrder, AbsentForFullyComplexSpectrum) {
  Matrix4 m = Matrix4::Zero();
  m(0, 1) = -0.9;
  m(1, 0) = 0.9;
  m(2, 3) = -0.2;
  m(3, 2) = 0.2;
  EXPECT_FALSE(solve_first_order(m).has_value());
  // Chain points above the real/complex boundary exist as well.
  const ModeBasis basis(ChainSpec{6});
  int absent = 0;
  for (double t = 3.0; t <= 9.0; t += 0.25)
    for (double b = 0.25; b <= 10.0; b += 0.75) absent += !solve_first_order(alpha_table(basis, t, b).first);
  EXPECT_GT(absent, 0);
  EXPECT_FALSE(solve_first_order(alpha_table(basis, 5.7, 0.25).first).has_value());
}

TEST(FirstOrder, SubnormalEntries) {
  // Entries ~ tanh^39(b/2) near b = 0 for long chains.
  const ModeBasis basis(ChainSpec{42});
  EXPECT_NO_THROW(solve_first_order(alpha_table(basis, 47.0, 1e-9).first));
  EXPECT_NO_THROW(solve_first_order(Matrix4(Matrix4::Identity() * 1e-310)));
}

TEST(FirstOrder, GaugeAndNormalization) {
  std::mt19937_64 rng(203);
  const ModeBasis basis(ChainSpec{6});
  for (int k = 0; k < 20; ++k) {
    const auto sol = solve_first_order(alpha_table(basis, 4.0 + 0.2 * k, 6.0).first);
    if (!sol) continue;
    EXPECT_NEAR(sol->x1.norm(), 1.0, 1e-12);
    Eigen::Index i = 0;
    sol->x1.cwiseAbs().maxCoeff(&i);
    EXPECT_EQ(sol->x1(i).imag(), 0.0);
    EXPECT_GT(sol->x1(i).real(), 0.0);
    for (int j = 1; j < 4; ++j) EXPECT_GE(std::abs(sol->eigenvalues[j - 1]), std::abs(sol->eigenvalues[j]));
  }
}

TEST(FirstOrder, PublishedSelections) {
  const ModeBasis basis(ChainSpec{6});
  const auto two = solve_first_order(alpha_table(basis, 5.0326, 10.0).first);
  ASSERT_TRUE(two.has_value());
  EXPECT_NEAR(two->lambda1(), 0.8145, 1e-3);

  const auto three = solve_first_order(alpha_table(basis, 5.3768, 5.3790).first);
  ASSERT_TRUE(three.has_value());
  EXPECT_NEAR(three->lambda1(), 0.7613, 1e-3);
  const Vector4 published(0.88361, cplx(0, -0.46820), cplx(0, -0.00216), -0.00408);
  EXPECT_LT(max_diff(three->x1, published), 2e-3);
}

TEST(ZeroOrder, RowSumsReproduceMixedSender) {
  const ModeBasis basis(ChainSpec{6});
  const AlphaTable table = alpha_table(basis, 6.1, 3.3);
  const auto [t0, b] = zero_order_system(table);
  const Vector5 mixed = maximally_mixed_x0();
  const Vector5 out = t0 * mixed + b;
  EXPECT_LT(max_diff(out, zero_vector(apply_map(table, Matrix4(Matrix4::Identity() / 4.0)))), 1e-14);
}

TEST(ZeroOrder, SourceIsResponseToDoublyExcitedSender) {
  // B is the zero-order receiver block for the sender |11><11|.
  const oracle::DenseChain chain(ChainSpec{6});
  const ModeBasis basis(ChainSpec{6});
  Matrix4 e4 = Matrix4::Zero();
  e4(3, 3) = 1.0;
  for (double t : {2.0, 5.0, 8.0})
    for (double b : {0.0, 2.5}) {
      const auto [t0, src] = zero_order_system(alpha_table(basis, t, b));
      EXPECT_LT(max_diff(src, zero_vector(Matrix4(chain.evolve_and_trace(e4, t, b)))), 1e-10);
    }
}

TEST(ZeroOrder, HermiticityPairing) {
  const auto [t0, b] = zero_order_system(alpha_table(ModeBasis(ChainSpec{7}), 4.4, 1.9));
  for (int c = 0; c < 3; ++c) EXPECT_LT(std::abs(t0(4, c) - std::conj(t0(3, c))), 1e-15);
  EXPECT_LT(std::abs(t0(4, 3) - std::conj(t0(3, 4))), 1e-15);
  EXPECT_LT(std::abs(t0(4, 4) - std::conj(t0(3, 3))), 1e-15);
  EXPECT_LT(std::abs(b(4) - std::conj(b(3))), 1e-15);
}

TEST(ZeroOrder, PublishedCaseOneVector) {
  const ModeBasis basis(ChainSpec{6});
  const auto sol = ZeroOrderSystem(alpha_table(basis, 8.5153, 10.0)).solve(1.0837);
  Vector5 published;
  published << 0.40596, 0.15131, 0.14467, cplx(0, 0.00010), cplx(0, -0.00010);
  EXPECT_LT(max_diff(sol.x0, published), 1e-4);
}

TEST(ZeroOrder, PerfectTransferAtInfiniteTemperature) {
  const ModeBasis basis(ChainSpec{6});
  const auto sol = ZeroOrderSystem(alpha_table(basis, 8.5153, 0.0)).solve(1.0);
  EXPECT_LT(max_diff(sol.x0, maximally_mixed_x0()), 1e-6);
}

TEST(ZeroOrder, ResidualAndStructure) {
  std::mt19937_64 rng(207);
  std::uniform_real_distribution<double> ut(1.0, 12.0), ub(0.0, 10.0), ul(0.5, 2.0);
  for (int n : {4, 6, 9}) {
    const ModeBasis basis(ChainSpec{n});
    for (int k = 0; k < 20; ++k) {
      const AlphaTable table = alpha_table(basis, ut(rng), ub(rng));
      const auto [t0, b] = zero_order_system(table);
      const double l0 = ul(rng);
      const auto sol = solve_zero_order(t0, b, l0);
      EXPECT_LT((t0 * sol.x0 + b - l0 * sol.x0).norm(), 1e-10);
      for (int i = 0; i < 3; ++i) EXPECT_LT(std::abs(sol.x0(i).imag()), 1e-10);
      EXPECT_LT(std::abs(sol.x0(4) - std::conj(sol.x0(3))), 1e-10);
    }
  }
}

TEST(ZeroOrder, SingularAtSpectrum) {
  const auto [t0, b] = zero_order_system(alpha_table(ModeBasis(ChainSpec{6}), 5.0, 3.0));
  Eigen::ComplexEigenSolver<Matrix5> es(t0, false);
  for (int i = 0; i < 5; ++i) {
    if (std::abs(es.eigenvalues()(i).imag()) > 1e-12) continue;
    const double ev = es.eigenvalues()(i).real();
    EXPECT_THROW(solve_zero_order(t0, b, ev), NumericError);
    EXPECT_FALSE(ZeroOrderSystem(alpha_table(ModeBasis(ChainSpec{6}), 5.0, 3.0)).try_solve(ev).has_value());
  }
}

TEST(ScaledTransfer, BlocksScaleBySingleFactors) {
  std::mt19937_64 rng(211);
  std::uniform_real_distribution<double> ut(3.0, 9.0), ub(1.0, 10.0), uc(0.0, 0.05);
  const ModeBasis basis(ChainSpec{6});
  int checked = 0;
  for (int k = 0; k < 40; ++k) {
    const double t = ut(rng), b = ub(rng);
    const ScalePoint sp(basis, t, b);
    if (!sp.first_order()) continue;
    const auto zero = sp.zero_order().try_solve(1.1);
    if (!zero) continue;
    SenderTemplate tpl{zero->x0, sp.first_order()->x1, uc(rng), uc(rng)};
    const Matrix4 s = assemble_sender(tpl);
    const Matrix4 r = apply_map(sp.table(), s);
    const double l1 = sp.first_order()->lambda1();
    EXPECT_LT(max_diff(first_vector(r), Vector4(l1 * tpl.c1 * *tpl.x1)), 1e-10);
    EXPECT_LT(std::abs(r(0, 3) - sp.table().second * tpl.c2), 1e-15);
    // e4 + X0 -> e4 + lambda0 X0, with e4 = |11><11|.
    Vector5 expect = 1.1 * zero->x0;
    EXPECT_LT(max_diff(zero_vector(r), expect), 1e-10);
    ++checked;
  }
  EXPECT_GT(checked, 5);
}
