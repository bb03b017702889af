#pragma once

// Covariance of a unit-amplitude tone whose frequency is uniform over a band,
// and its Hermitian eigen-structure (a similarity transform of the DPSS kernel,
// so the spectrum splits sharply into eigenvalues near 1 and near 0).

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "winsel/band.hpp"
#include "winsel/error.hpp"

namespace winsel {

template <typename Scalar>
using ComplexVector = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;
template <typename Scalar>
using ComplexMatrix =
    Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using RealVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

inline constexpr double kDefaultRankThreshold = 0.5;

template <typename Scalar>
struct HermitianEigen {
  RealVector<Scalar> values;      // descending
  ComplexMatrix<Scalar> vectors;  // column i pairs with values[i]
};

template <typename Scalar>
struct BandCovariance {
  int n = 0;
  Band<Scalar> band_bins;
  Band<Scalar> band_radians;
  ComplexMatrix<Scalar> matrix;
  RealVector<Scalar> eig_values;
  ComplexMatrix<Scalar> eig_vectors;
  int effective_rank = 0;

  /// Columns spanning the jammer space (top `effective_rank` eigenvectors).
  auto jammer_space() const { return eig_vectors.leftCols(effective_rank); }
  auto noise_space() const { return eig_vectors.rightCols(n - effective_rank); }
};

/// Eigen-decomposition of a Hermitian matrix with eigenvalues sorted descending.
/// Throws on non-Hermitian input (beyond 1e-10) or solver failure.
template <typename Derived>
HermitianEigen<typename Derived::RealScalar> hermitian_eigendecomposition(
    const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::RealScalar;
  detail::require(m.rows() == m.cols(), ErrorCode::dimension_mismatch,
                  "hermitian_eigendecomposition: matrix is not square");
  const Scalar asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
  detail::require(asym <= Scalar(1e-10), ErrorCode::invalid_argument,
                  "hermitian_eigendecomposition: matrix is not Hermitian");

  Eigen::SelfAdjointEigenSolver<ComplexMatrix<Scalar>> solver(m);
  detail::require(solver.info() == Eigen::Success, ErrorCode::numerical_failure,
                  "hermitian_eigendecomposition: solver did not converge");
  // Eigen returns ascending order.
  return {solver.eigenvalues().reverse(), solver.eigenvectors().rowwise().reverse()};
}

/// Number of eigenvalues strictly above threshold * max(eigenvalues).
template <typename Derived>
int effective_rank(const Eigen::MatrixBase<Derived>& eigenvalues,
                   typename Derived::Scalar threshold = kDefaultRankThreshold) {
  using Scalar = typename Derived::Scalar;
  detail::require(eigenvalues.size() > 0, ErrorCode::invalid_argument,
                  "effective_rank: empty spectrum");
  const Scalar top = eigenvalues.maxCoeff();
  detail::require(top > Scalar(0), ErrorCode::invalid_argument,
                  "effective_rank: all-zero spectrum");
  return static_cast<int>((eigenvalues.array() > threshold * top).count());
}

/// Normalized band covariance, entry (m, n) = (1/2pi) * int_{T1}^{T2} e^{j(m-n)t} dt.
template <typename Scalar = double>
BandCovariance<Scalar> band_covariance(int n, Band<Scalar> band_bins,
                                       Scalar rank_threshold = Scalar(kDefaultRankThreshold)) {
  detail::require(n >= 1, ErrorCode::invalid_argument, "band_covariance: N must be positive");
  detail::require(band_bins.lo > Scalar(0) && band_bins.hi < Scalar(n),
                  ErrorCode::invalid_argument,
                  "band_covariance: band edges must lie in (0, N)");
  detail::require(band_bins.lo < band_bins.hi, ErrorCode::invalid_argument,
                  "band_covariance: band edges out of order");

  const Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
  BandCovariance<Scalar> b;
  b.n = n;
  b.band_bins = band_bins;
  b.band_radians = {bins_to_radians(band_bins.lo, n), bins_to_radians(band_bins.hi, n)};
  const Scalar t1 = b.band_radians.lo;
  const Scalar t2 = b.band_radians.hi;

  b.matrix.resize(n, n);
  const Scalar diag = (t2 - t1) / two_pi;
  for (int row = 0; row < n; ++row) {
    b.matrix(row, row) = diag;
    for (int col = 0; col < row; ++col) {
      const Scalar d = Scalar(row - col);
      const std::complex<Scalar> num = std::polar(Scalar(1), d * t2) - std::polar(Scalar(1), d * t1);
      const std::complex<Scalar> v = num / std::complex<Scalar>(Scalar(0), two_pi * d);
      b.matrix(row, col) = v;
      b.matrix(col, row) = std::conj(v);
    }
  }

  auto eig = hermitian_eigendecomposition(b.matrix);
  // PSD up to round-off.
  for (auto& v : eig.values) {
    if (v < Scalar(0) && v >= Scalar(-1e-10)) v = Scalar(0);
  }
  b.eig_values = std::move(eig.values);
  b.eig_vectors = std::move(eig.vectors);
  b.effective_rank = effective_rank(b.eig_values, rank_threshold);
  return b;
}

/// Quadratic band-power estimate r^H R r / N, clamped at zero.
template <typename Scalar, typename Derived>
Scalar band_power(const Eigen::MatrixBase<Derived>& r, const BandCovariance<Scalar>& b) {
  detail::require(r.size() == b.n, ErrorCode::dimension_mismatch,
                  "band_power: vector length " + std::to_string(r.size()) +
                      " does not match covariance dimension " + std::to_string(b.n));
  const Scalar q = (r.adjoint() * b.matrix * r).value().real() / Scalar(b.n);
  return std::max(q, Scalar(0));
}

/// Energy of r in the jammer space: sum over the top N_j eigenvectors of |e_i^H r|^2.
template <typename Scalar, typename Derived>
Scalar jammer_space_energy(const Eigen::MatrixBase<Derived>& r,
                           const BandCovariance<Scalar>& b) {
  detail::require(r.size() == b.n, ErrorCode::dimension_mismatch,
                  "jammer_space_energy: dimension mismatch");
  return (b.jammer_space().adjoint() * r).squaredNorm();
}

}  // namespace winsel
