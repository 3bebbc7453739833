#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "htgd/structured_ops.hpp"

namespace htgd {

/// Rank-K slice of an SVD, singular values non-increasing.
struct TruncatedSvd {
  Eigen::MatrixXcd U;     ///< n x K left singular vectors
  Eigen::VectorXd sigma;  ///< K singular values
  Eigen::MatrixXcd V;     ///< n x K right singular vectors
};

/// Thin SVD (U, sigma, V all kept). Divide-and-conquer first; if that fails or
/// yields non-finite vectors, which Eigen's BDCSVD occasionally does for
/// complex input, it is recomputed with one-sided Jacobi.
TruncatedSvd thin_svd(const Eigen::MatrixXcd& a);

/// Dense SVD of `a`, truncated to K. Throws NumericalFailure on non-finite input.
TruncatedSvd truncated_svd(const Eigen::MatrixXcd& a, Index K);

/// Rank-K SVD of the (complex symmetric) matrix G v without forming it, by
/// randomized subspace iteration on top of the FFT products. Deterministic
/// for a given seed.
TruncatedSvd hankel_truncated_svd(const StructuredOps& ops, const Eigen::VectorXcd& v, Index K,
                                  std::uint64_t seed, int power_iterations = 6);

/// Above this n the solvers initialize through hankel_truncated_svd.
inline constexpr Index kDenseInitMaxN = 512;

/// A ~= U diag(sigma) U^T with U^H U = I.
struct TakagiResult {
  Eigen::MatrixXcd U;
  Eigen::VectorXd sigma;
  bool clustered = false;  ///< a near-degenerate block needed the block phase fix
};

/// K-truncated Takagi factorization of a complex symmetric matrix, via SVD
/// followed by phase correction of the left singular vectors.
TakagiResult takagi_truncated(const Eigen::MatrixXcd& a, Index K);

/// Phase-corrects an SVD A = Us S V^H of a symmetric A into Takagi form.
TakagiResult takagi_from_svd(const TruncatedSvd& svd);

}  // namespace htgd
