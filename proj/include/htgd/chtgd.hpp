#pragma once

// Constant-amplitude variant. One factor Z^l (n x K) per channel with
// H X_l ~ Z^l Z^l^T and a Toeplitz part Z^l Z^l^H shared across channels,
// anchored at channel 1:
//
//   g = sum_l [ 1/(4p) ||P G*(Z Z^T - G Y_l)||^2 + 1/4 ||(I - G G*)(Z Z^T)||_F^2 ]
//     + 1/4 ||(I - W W*)(Z^1 Z^1^H)||_F^2
//     + 1/4 sum_{l>=2} ||Z^1 Z^1^H - Z^l Z^l^H||_F^2
//
// Note the plain transpose in the Hankel term.

#include <optional>

#include <Eigen/Dense>

#include "htgd/descent.hpp"
#include "htgd/signal_model.hpp"
#include "htgd/structured_ops.hpp"

namespace htgd {

struct FactorSetC {
  FactorSet set;

  static FactorSetC zeros(Index L, Index n, Index K);
  Index channels() const { return static_cast<Index>(set.blocks.size()); }
  Eigen::MatrixXcd& z(Index l) { return set.blocks[static_cast<std::size_t>(l)]; }
  const Eigen::MatrixXcd& z(Index l) const { return set.blocks[static_cast<std::size_t>(l)]; }
};

class ChtgdProblem {
 public:
  ChtgdProblem(const ProblemDims& dims, const SamplingMask& mask, const Eigen::MatrixXcd& weighted_obs);

  const ProblemDims& dims() const { return dims_; }
  const StructuredOps& ops() const { return ops_; }

  double objective(const FactorSet& z) const;
  FactorSet gradient(const FactorSet& z) const;
  /// X_l = D^-1 G*(Z^l Z^l^T).
  Eigen::MatrixXcd reconstruct(const FactorSet& z) const;
  /// Set when the last initialize() hit a clustered singular block.
  FactorSet initialize(std::uint64_t seed = 0, bool* clustered = nullptr) const;

 private:
  void check_shape(const FactorSet& z) const;

  ProblemDims dims_;
  StructuredOps ops_;
  Eigen::VectorXd mask_;
  Eigen::MatrixXcd y_;
};

/// Z^l = U S^1/2 from the K-truncated Takagi factorization of p^-1 G P(Y_l).
FactorSetC spectral_init_ca(const Eigen::MatrixXcd& weighted_obs, const SamplingMask& mask, const ProblemDims& dims);
double objective_g(const FactorSetC& z, const Eigen::MatrixXcd& weighted_obs, const SamplingMask& mask, const ProblemDims& dims);
FactorSetC grad_g(const FactorSetC& z, const Eigen::MatrixXcd& weighted_obs, const SamplingMask& mask, const ProblemDims& dims);

SolverReport solve_chtgd(const Eigen::MatrixXcd& observed, const SamplingMask& mask, const ProblemDims& dims,
                         const SolverConfig& cfg, const std::optional<Eigen::MatrixXcd>& truth = std::nullopt);

}  // namespace htgd
