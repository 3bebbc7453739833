#pragma once

// Seeded Monte Carlo harness: phase-transition grids over (M, K) and
// per-iteration timing scans over N. Outputs are CSV text plus a small
// gnuplot script that renders it.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "htgd/descent.hpp"
#include "htgd/signal_model.hpp"

namespace htgd {

enum class Method { mhtgd, chtgd };
std::string_view to_string(Method m);
/// Throws InvalidArgument for anything other than "mhtgd" / "chtgd".
Method parse_method(std::string_view s);

/// Dispatches to solve_mhtgd or solve_chtgd.
SolverReport solve(Method method, const Eigen::MatrixXcd& observed, const SamplingMask& mask, const ProblemDims& dims,
                   const SolverConfig& cfg, const std::optional<Eigen::MatrixXcd>& truth = std::nullopt);

struct TrialOutcome {
  std::uint64_t seed = 0;
  bool success = false;
  std::optional<double> nmse;
  std::string stop;    ///< solver stop reason, or "generation_failure" / "error"
  std::string reason;  ///< free-form detail, empty on success
  int iterations = 0;
  double seconds = 0;
  double mean_iteration_seconds = 0;
};

/// One seeded draw: model (min_sep in cycles), uniform mask, solve, score.
/// Never throws for solver or generation problems; they come back as
/// non-success with a reason.
TrialOutcome run_trial(const ProblemDims& dims, double min_sep, Method method, bool is_ca, std::uint64_t seed,
                       const SolverConfig& cfg);

struct PhaseGridSpec {
  Index N = 65;
  Index L = 5;
  double min_sep_multiplier = 1.5;  ///< separation = multiplier / N
  std::vector<Index> M_values;
  std::vector<Index> K_values;
  int trials = 20;
  Method method = Method::mhtgd;
  bool is_ca = false;
  std::uint64_t seed = 0;
  SolverConfig solver;
  int threads = 1;

  /// M in {5, 10, ..., 65} and K in {1, ..., 16}, N = 65, L = 5.
  static PhaseGridSpec default_grid();
  void validate() const;
};

struct CellResult {
  Index M = 0;
  Index K = 0;
  std::vector<TrialOutcome> trials;
  int successes() const;
  double rate() const;
};

struct PhaseGridResult {
  PhaseGridSpec spec;
  std::vector<CellResult> cells;  ///< M-major in spec order
};

/// Trial t of cell (M, K) uses derive_seed(seed, {M, K, t}).
PhaseGridResult run_phase_grid(const PhaseGridSpec& spec);

/// `M,K,trials,successes,rate` rows after a `# generated <timestamp>` line.
std::string phase_grid_csv(const PhaseGridResult& r, std::string_view timestamp);
/// Per-trial detail: M,K,trial,seed,success,nmse,stop,iterations,reason.
std::string phase_trials_csv(const PhaseGridResult& r);
std::string phase_plot_script(std::string_view csv_file);

struct TimingSpec {
  std::vector<Index> N_values;
  Index L = 3;
  Index K = 3;
  int trials = 5;
  double cap_seconds = 100.0;
  double min_sep_multiplier = 1.5;
  Method method = Method::mhtgd;
  bool is_ca = false;
  std::uint64_t seed = 0;
  SolverConfig solver;

  void validate() const;
};

struct TimingRow {
  Index N = 0;
  Index M = 0;
  int trials = 0;
  int successes = 0;
  int excluded = 0;  ///< runs that hit the time cap
  std::optional<double> median_wall_seconds;
  std::optional<double> median_iteration_seconds;
  std::vector<TrialOutcome> outcomes;
};

struct TimingResult {
  std::vector<TimingRow> rows;
  std::optional<double> loglog_slope;  ///< needs medians at two or more N
};

/// M = floor(0.8 N); trial t at size N uses derive_seed(seed, {N, t}).
TimingResult run_timing(const TimingSpec& spec);
std::string timing_csv(const TimingResult& r, std::string_view timestamp);
std::string timing_plot_script(std::string_view csv_file);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Current UTC time as ISO 8601.
std::string utc_timestamp();

}  // namespace htgd
