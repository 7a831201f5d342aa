#pragma once

// Two-qubit density matrices and their multiple-quantum coherence blocks.
//
// Basis order is |00>, |01>, |10>, |11> with the first label on the lower
// site index (sender: sites 1,2; receiver: sites N-1,N) and 1 = excited.
// Index i in 0..3 therefore has excitation number popcount(i).

#include <array>
#include <bit>
#include <cmath>

#include <Eigen/Dense>

#include "mqscale/errors.hpp"
#include "mqscale/spectral.hpp"

namespace mqscale {

using Matrix4 = Eigen::Matrix4cd;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kPsdTol = 1e-10;

inline int excitation_number(int basis_index) { return std::popcount(static_cast<unsigned>(basis_index)); }

inline double hermiticity_defect(const Eigen::MatrixXcd& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

/// Smallest eigenvalue of the Hermitian part.
template <typename Derived>
double min_eigenvalue(const Eigen::MatrixBase<Derived>& m) {
  using Mat = Eigen::Matrix<cplx, Derived::RowsAtCompileTime, Derived::ColsAtCompileTime>;
  const Mat h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

/// Hermitian, unit trace and PSD up to `tol` on the smallest eigenvalue.
template <typename Derived>
bool is_physical(const Eigen::MatrixBase<Derived>& rho, double tol = kPsdTol) {
  if (hermiticity_defect(rho) > kHermitianTol) return false;
  if (std::abs(rho.trace() - cplx(1.0)) > kTraceTol) return false;
  return min_eigenvalue(rho) >= -tol;
}

/// Blocks of orders -2..2; block(n) holds the elements whose column state has
/// n more excitations than the row state, so block(-n) = block(n)^dagger.
class CoherenceBlocks {
public:
  const Matrix4& block(int order) const { return blocks_.at(order + 2); }
  Matrix4& block(int order) { return blocks_.at(order + 2); }

  Matrix4 sum() const {
    Matrix4 s = Matrix4::Zero();
    for (const auto& b : blocks_) s += b;
    return s;
  }

private:
  std::array<Matrix4, 5> blocks_{};
};

/// Order of element (row, col), 0-based: popcount(col) - popcount(row).
/// Under this convention rho_14 (|00><11|) sits in block +2.
inline int coherence_order(int row, int col) {
  return excitation_number(col) - excitation_number(row);
}

inline CoherenceBlocks decompose_blocks(const Matrix4& rho) {
  if (hermiticity_defect(rho) > kHermitianTol) {
    throw ValidationError("coherence decomposition needs a Hermitian matrix");
  }
  CoherenceBlocks out;
  for (int n = -2; n <= 2; ++n) out.block(n).setZero();
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      out.block(coherence_order(i, j))(i, j) = rho(i, j);
    }
  }
  return out;
}

}  // namespace mqscale
