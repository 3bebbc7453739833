#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace htgd {

using Index = Eigen::Index;
using Complex = std::complex<double>;

/// Problem sizes. `N` is the user-facing sample count per channel; the solvers
/// work on an odd internal length 2n-1. An even N is embedded into N+1 samples
/// whose final sample is never observed.
struct ProblemDims {
  Index N = 0;  ///< samples per channel as requested
  Index L = 0;  ///< channels
  Index K = 0;  ///< sinusoids
  Index M = 0;  ///< observed samples per channel

  /// Validates N >= 1, L >= 1, K >= 1, 1 <= M <= N and K < n.
  static ProblemDims make(Index N, Index L, Index K, Index M);

  Index length() const { return (N % 2 == 1) ? N : N + 1; }
  Index n() const { return (length() + 1) / 2; }
  bool embedded() const { return length() != N; }
  /// Sampling ratio M / (internal length).
  double p() const { return static_cast<double>(M) / static_cast<double>(length()); }
};

/// Ground-truth line-spectral parameters.
struct SpectralModel {
  Eigen::VectorXd freqs;   ///< K frequencies in [0, 1), cycles/sample
  Eigen::MatrixXd amps;    ///< K x L, positive
  Eigen::MatrixXd phases;  ///< K x L, radians
  bool is_ca = false;      ///< amplitudes constant along each row

  Index K() const { return freqs.size(); }
  Index L() const { return amps.cols(); }

  /// s_kl = b_kl exp(i phi_kl).
  Eigen::MatrixXcd coefficients() const;
  /// Throws InvalidArgument when shapes or invariants are broken.
  void validate() const;
};

/// Observed row subset, stored 0-based and strictly increasing.
struct SamplingMask {
  std::vector<Index> indices;

  Index size() const { return static_cast<Index>(indices.size()); }
  /// Indicator vector of the given length.
  Eigen::VectorXd indicator(Index length) const;
};

/// Vandermonde matrix with [a(f)]_j = exp(-i 2 pi f j), j = 0..rows-1.
Eigen::MatrixXcd steering_matrix(const Eigen::VectorXd& freqs, Index rows);

/// X = A(f) S over dims.length() rows.
Eigen::MatrixXcd synthesize(const SpectralModel& model, const ProblemDims& dims);

/// Circular distance min(|a-b|, 1-|a-b|) on [0, 1).
double wrap_distance(double a, double b);

/// Draws frequencies with pairwise wrap distance >= min_sep by rejection,
/// amplitudes U[0.5, 1.5] (one per row when is_ca) and phases U[0, 2 pi).
SpectralModel random_model(const ProblemDims& dims, double min_sep, bool is_ca, std::uint64_t seed);

/// M indices drawn uniformly without replacement from the user's N samples.
SamplingMask sample_mask(const ProblemDims& dims, std::uint64_t seed);

/// Builds a mask from 0-based indices; sorts and rejects duplicates or out of range.
SamplingMask make_mask(std::vector<Index> indices, Index N);

/// P_Omega: zero every row outside the mask.
Eigen::VectorXcd apply_mask(const Eigen::VectorXcd& x, const SamplingMask& mask);
Eigen::MatrixXcd apply_mask(const Eigen::MatrixXcd& x, const SamplingMask& mask);

}  // namespace htgd
