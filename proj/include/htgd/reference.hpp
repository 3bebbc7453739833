#pragma once

// Dense, slow counterparts of the factored solver quantities plus exact
// factorizations of noiseless signals. Used by the test suites and selftest.

#include <Eigen/Dense>

#include "htgd/chtgd.hpp"
#include "htgd/mhtgd.hpp"
#include "htgd/signal_model.hpp"

namespace htgd::reference {

/// Objective f with every n x n matrix formed explicitly.
double objective_f_dense(const FactorSetM& z, const Eigen::MatrixXcd& weighted_obs, const SamplingMask& mask,
                         const ProblemDims& dims);
/// Objective g with every n x n matrix formed explicitly.
double objective_g_dense(const FactorSetC& z, const Eigen::MatrixXcd& weighted_obs, const SamplingMask& mask,
                         const ProblemDims& dims);

/// Factors of a general multichannel signal A(f) S with
///   Z1^l = conj(A) diag(p)^-1/2 diag(conj S_l) diag(phase S_l),
///   Z2^l = A diag(p)^1/2 diag(phase S_l),   p_k = ||S_k,:|| / sqrt(L).
FactorSetM exact_factors(const SpectralModel& model, const ProblemDims& dims);

/// Factors of a constant-amplitude signal: Z^l = A diag(b)^1/2 diag(exp(i phi_l / 2)).
FactorSetC exact_factors_ca(const SpectralModel& model, const ProblemDims& dims);

/// Relative residuals of the three constraint groups, maximized over channels:
///   ||(I-GG*)(Z2 Z1^H)|| / ||Z2 Z1^H||, ||(I-WW*)(Z1 Z1^H)|| / ||Z1 Z1^H||,
///   ||sum_q conj(Z1^q) Z1^q^T - L Z2 Z2^H|| / ||sum_q conj(Z1^q) Z1^q^T||.
struct ConstraintResiduals {
  double hankel = 0;
  double toeplitz = 0;
  double coupling = 0;
  double max() const { return std::max({hankel, toeplitz, coupling}); }
};
ConstraintResiduals constraint_residuals(const FactorSetM& z, const ProblemDims& dims);
/// Same groups for the CA factorization (Z Z^T Hankel, Z^1 Z^1^H Toeplitz,
/// Z^l Z^l^H equal to Z^1 Z^1^H).
ConstraintResiduals constraint_residuals_ca(const FactorSetC& z, const ProblemDims& dims);

}  // namespace htgd::reference
