#pragma once

// Gradient descent with Armijo backtracking, shared by both solvers.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "htgd/errors.hpp"

namespace htgd {

struct ArmijoParams {
  double shrink = 0.5;         ///< beta
  double sufficient = 1e-4;    ///< c
  double growth = 2.0;         ///< gamma, warm-start factor
  int max_backtracks = 50;
  double initial_step = 1.0;   ///< eta_0
};

struct SolverConfig {
  double tol = 1e-6;       ///< relative change ||X^{t+1}-X^t||_F / ||X^t||_F
  int max_iter = 10000;
  ArmijoParams armijo;
  std::uint64_t seed = 0;  ///< used by the randomized initializer at large n
  double time_limit_s = 0; ///< wall-clock cap; 0 disables

  /// Throws InvalidArgument unless tol > 0, max_iter >= 0, 0 < shrink < 1,
  /// 0 < sufficient < 1, growth >= 1, max_backtracks >= 1, initial_step > 0.
  void validate() const;
};

enum class StopReason { converged, max_iter, line_search_failure, numerical_failure, time_limit };

std::string_view to_string(StopReason r);

struct SolverReport {
  int iterations = 0;
  std::vector<double> objective;          ///< value at init, then after each accepted step
  std::vector<double> step_sizes;
  std::vector<double> iteration_seconds;
  double init_seconds = 0;
  double total_seconds = 0;
  StopReason stop = StopReason::max_iter;
  std::string message;
  Eigen::MatrixXcd recovered;             ///< X-hat, rows = user N
  std::optional<double> nmse;

  bool success(double threshold = 1e-6) const { return nmse && *nmse <= threshold; }
};

/// Per-channel factor matrices laid out as one list of blocks.
struct FactorSet {
  std::vector<Eigen::MatrixXcd> blocks;

  double squared_norm() const;
  bool all_finite() const;
  /// this - eta * g
  FactorSet stepped(double eta, const FactorSet& g) const;
};

/// Re <a, b> summed over blocks.
double inner_real(const FactorSet& a, const FactorSet& b);

struct StepResult {
  double eta = 0;
  FactorSet next;
  double f_next = 0;
  int backtracks = 0;
  bool accepted = false;
};

/// Backtracks from eta_start by `shrink` until
///   f(z - eta g) <= f_curr - c * eta * ||g||^2.
/// A zero gradient is accepted immediately with z unchanged. Non-finite
/// trial values count as failures of the condition.
template <class Objective>
StepResult armijo_step(const FactorSet& z, const FactorSet& g, double f_curr, double eta_start,
                       const ArmijoParams& p, Objective&& objective) {
  const double gg = g.squared_norm();
  if (gg == 0.0) return {eta_start, z, f_curr, 0, true};
  double eta = eta_start;
  for (int b = 0; b <= p.max_backtracks; ++b) {
    FactorSet trial = z.stepped(eta, g);
    const double ft = objective(trial);
    if (std::isfinite(ft) && ft <= f_curr - p.sufficient * eta * gg) return {eta, std::move(trial), ft, b, true};
    eta *= p.shrink;
  }
  return {eta, z, f_curr, p.max_backtracks, false};
}

/// Runs init-free descent on `problem`, which must provide
///   double objective(const FactorSet&) const;
///   FactorSet gradient(const FactorSet&) const;
///   Eigen::MatrixXcd reconstruct(const FactorSet&) const;
/// The returned report's `recovered` holds the reconstruction at full
/// internal length; callers trim it.
template <class Problem>
SolverReport run_descent(const Problem& problem, FactorSet z, const SolverConfig& cfg) {
  using clock = std::chrono::steady_clock;
  const auto t_start = clock::now();
  SolverReport rep;
  const ArmijoParams& ap = cfg.armijo;

  Eigen::MatrixXcd x_prev = problem.reconstruct(z);
  double f = problem.objective(z);
  rep.objective.push_back(f);
  if (!std::isfinite(f)) {
    rep.stop = StopReason::numerical_failure;
    rep.message = "non-finite objective at initialization";
    rep.recovered = std::move(x_prev);
    return rep;
  }

  const double eta_cap = ap.initial_step * std::pow(ap.growth, 8);
  double eta_prev = ap.initial_step / ap.growth;
  rep.stop = StopReason::max_iter;
  for (int t = 0; t < cfg.max_iter; ++t) {
    const auto t_iter = clock::now();
    FactorSet g = problem.gradient(z);
    if (!g.all_finite()) {
      rep.stop = StopReason::numerical_failure;
      rep.message = "non-finite gradient at iteration " + std::to_string(t);
      break;
    }
    const double eta_start = std::min(ap.growth * eta_prev, eta_cap);
    StepResult step = armijo_step(z, g, f, eta_start, ap, [&](const FactorSet& c) { return problem.objective(c); });
    if (!step.accepted) {
      rep.stop = StopReason::line_search_failure;
      rep.message = "no sufficient decrease after " + std::to_string(ap.max_backtracks) + " backtracks";
      break;
    }
    z = std::move(step.next);
    f = step.f_next;
    eta_prev = step.eta;
    Eigen::MatrixXcd x = problem.reconstruct(z);

    ++rep.iterations;
    rep.objective.push_back(f);
    rep.step_sizes.push_back(step.eta);
    rep.iteration_seconds.push_back(std::chrono::duration<double>(clock::now() - t_iter).count());

    const double prev_norm = x_prev.norm();
    const double change = (x - x_prev).norm();
    const double rel = prev_norm > 0.0 ? change / prev_norm : (change == 0.0 ? 0.0 : INFINITY);
    x_prev = std::move(x);
    if (rel <= cfg.tol) {
      rep.stop = StopReason::converged;
      break;
    }
    if (cfg.time_limit_s > 0 && std::chrono::duration<double>(clock::now() - t_start).count() > cfg.time_limit_s) {
      rep.stop = StopReason::time_limit;
      break;
    }
  }
  rep.recovered = std::move(x_prev);
  rep.total_seconds = std::chrono::duration<double>(clock::now() - t_start).count();
  return rep;
}

}  // namespace htgd
