#pragma once

// Multichannel Hankel-Toeplitz factorization gradient descent for general
// (non constant-amplitude) signals. Channel l carries factors Z1^l, Z2^l
// (n x K) with H X_l ~ Z2^l Z1^l^H, and the objective
//
//   f = sum_l  1/(2p) ||P G*(Z2 Z1^H - G Y_l)||^2
//            + 1/2    ||(I - G G*)(Z2 Z1^H)||_F^2
//            + 1/4    ||(I - W W*)(Z1 Z1^H)||_F^2
//            + 1/4    ||sum_q conj(Z1^q) Z1^q^T - L Z2 Z2^H||_F^2
//
// is evaluated in factored form only. Gradients follow the convention
// df = Re<grad, dZ>, i.e. twice the Wirtinger derivative w.r.t. conj(Z).

#include <optional>

#include <Eigen/Dense>

#include "htgd/descent.hpp"
#include "htgd/signal_model.hpp"
#include "htgd/structured_ops.hpp"

namespace htgd {

/// Stacked per-channel factors; blocks are [Z1^1, Z2^1, Z1^2, Z2^2, ...].
struct FactorSetM {
  FactorSet set;

  static FactorSetM zeros(Index L, Index n, Index K);
  Index channels() const { return static_cast<Index>(set.blocks.size() / 2); }
  Eigen::MatrixXcd& z1(Index l) { return set.blocks[static_cast<std::size_t>(2 * l)]; }
  Eigen::MatrixXcd& z2(Index l) { return set.blocks[static_cast<std::size_t>(2 * l + 1)]; }
  const Eigen::MatrixXcd& z1(Index l) const { return set.blocks[static_cast<std::size_t>(2 * l)]; }
  const Eigen::MatrixXcd& z2(Index l) const { return set.blocks[static_cast<std::size_t>(2 * l + 1)]; }
};

class MhtgdProblem {
 public:
  /// `weighted_obs` is Y = D X on the mask (internal length x L); rows off the
  /// mask are ignored.
  MhtgdProblem(const ProblemDims& dims, const SamplingMask& mask, const Eigen::MatrixXcd& weighted_obs);

  const ProblemDims& dims() const { return dims_; }
  const StructuredOps& ops() const { return ops_; }
  const Eigen::MatrixXcd& y() const { return y_; }

  double objective(const FactorSet& z) const;
  FactorSet gradient(const FactorSet& z) const;
  /// X_l = D^-1 G*(Z2 Z1^H), internal length x L.
  Eigen::MatrixXcd reconstruct(const FactorSet& z) const;
  FactorSet initialize(std::uint64_t seed = 0) const;

 private:
  void check_shape(const FactorSet& z) const;

  ProblemDims dims_;
  StructuredOps ops_;
  Eigen::VectorXd mask_;  ///< indicator over the internal length
  Eigen::MatrixXcd y_;    ///< P_Omega Y
};

/// Truncated-SVD start: Z1 = V S^1/2, Z2 = U S^1/2 of p^-1 G P(Y_l).
FactorSetM spectral_init(const Eigen::MatrixXcd& weighted_obs, const SamplingMask& mask, const ProblemDims& dims);
double objective_f(const FactorSetM& z, const Eigen::MatrixXcd& weighted_obs, const SamplingMask& mask, const ProblemDims& dims);
FactorSetM grad_f(const FactorSetM& z, const Eigen::MatrixXcd& weighted_obs, const SamplingMask& mask, const ProblemDims& dims);

/// Full solve from raw samples on the mask (rows = dims.length() or dims.N).
/// When `truth` is given the report carries the NMSE over the user's N rows.
SolverReport solve_mhtgd(const Eigen::MatrixXcd& observed, const SamplingMask& mask, const ProblemDims& dims,
                         const SolverConfig& cfg, const std::optional<Eigen::MatrixXcd>& truth = std::nullopt);

namespace detail {
/// Pads (N rows) or keeps (internal rows) an observation matrix, masks it, applies D.
Eigen::MatrixXcd weighted_observations(const Eigen::MatrixXcd& observed, const SamplingMask& mask,
                                       const ProblemDims& dims, const StructuredOps& ops);
void finish_report(SolverReport& rep, const ProblemDims& dims, const std::optional<Eigen::MatrixXcd>& truth);
}  // namespace detail

}  // namespace htgd
