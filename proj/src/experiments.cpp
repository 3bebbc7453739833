#include "htgd/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <thread>

#include "htgd/chtgd.hpp"
#include "htgd/errors.hpp"
#include "htgd/mhtgd.hpp"
#include "htgd/retrieval.hpp"
#include "htgd/rng.hpp"

namespace htgd {
namespace {

std::uint64_t u64(Index v) { return static_cast<std::uint64_t>(v); }

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

// Runs body(i) for i in [0, count) on `threads` workers. Results are written
// by index, so the schedule cannot affect output.
template <class Body>
void parallel_for(std::size_t count, int threads, Body&& body) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) body(i);
    });
  for (auto& t : pool) t.join();
}

}  // namespace

std::string_view to_string(Method m) { return m == Method::mhtgd ? "mhtgd" : "chtgd"; }

Method parse_method(std::string_view s) {
  if (s == "mhtgd") return Method::mhtgd;
  if (s == "chtgd") return Method::chtgd;
  throw_invalid("unknown method '" + std::string(s) + "' (expected mhtgd or chtgd)");
}

SolverReport solve(Method method, const Eigen::MatrixXcd& observed, const SamplingMask& mask, const ProblemDims& dims,
                   const SolverConfig& cfg, const std::optional<Eigen::MatrixXcd>& truth) {
  return method == Method::mhtgd ? solve_mhtgd(observed, mask, dims, cfg, truth)
                                 : solve_chtgd(observed, mask, dims, cfg, truth);
}

TrialOutcome run_trial(const ProblemDims& dims, double min_sep, Method method, bool is_ca, std::uint64_t seed,
                       const SolverConfig& cfg) {
  TrialOutcome out;
  out.seed = seed;
  SpectralModel model;
  try {
    model = random_model(dims, min_sep, is_ca, derive_seed(seed, {0}));
  } catch (const GenerationFailure& e) {
    out.stop = "generation_failure";
    out.reason = e.what();
    return out;
  }
  try {
    const SamplingMask mask = sample_mask(dims, derive_seed(seed, {1}));
    const Eigen::MatrixXcd x = synthesize(model, dims);
    SolverConfig c = cfg;
    c.seed = derive_seed(seed, {2});
    const SolverReport rep = solve(method, apply_mask(x, mask), mask, dims, c, Eigen::MatrixXcd(x.topRows(dims.N)));
    out.nmse = rep.nmse;
    out.success = rep.success(kSuccessNmse);
    out.stop = std::string(to_string(rep.stop));
    out.iterations = rep.iterations;
    out.seconds = rep.total_seconds;
    if (!rep.iteration_seconds.empty())
      out.mean_iteration_seconds =
          std::accumulate(rep.iteration_seconds.begin(), rep.iteration_seconds.end(), 0.0) / rep.iteration_seconds.size();
    if (!out.success) out.reason = rep.message.empty() ? "nmse above threshold" : rep.message;
  } catch (const std::exception& e) {
    out.success = false;
    out.stop = "error";
    out.reason = e.what();
  }
  return out;
}

PhaseGridSpec PhaseGridSpec::default_grid() {
  PhaseGridSpec s;
  for (Index m = 5; m <= 65; m += 5) s.M_values.push_back(m);
  for (Index k = 1; k <= 16; ++k) s.K_values.push_back(k);
  return s;
}

void PhaseGridSpec::validate() const {
  if (N < 1 || L < 1) throw_invalid("phase grid: N and L must be positive");
  if (M_values.empty() || K_values.empty()) throw_invalid("phase grid: M and K lists must be non-empty");
  if (trials < 1) throw_invalid("phase grid: trials must be >= 1");
  if (!(min_sep_multiplier >= 0.0)) throw_invalid("phase grid: min_sep multiplier must be >= 0");
  if (method == Method::chtgd && !is_ca)
    throw_invalid("phase grid: chtgd requires constant-amplitude instances");
  for (Index m : M_values)
    if (m < 1 || m > N) throw_invalid("phase grid: every M must lie in [1, N]");
  for (Index k : K_values) ProblemDims::make(N, L, k, N);
  solver.validate();
}

int CellResult::successes() const {
  return static_cast<int>(std::count_if(trials.begin(), trials.end(), [](const TrialOutcome& t) { return t.success; }));
}

double CellResult::rate() const { return trials.empty() ? 0.0 : static_cast<double>(successes()) / trials.size(); }

PhaseGridResult run_phase_grid(const PhaseGridSpec& spec) {
  spec.validate();
  PhaseGridResult res;
  res.spec = spec;
  for (Index m : spec.M_values)
    for (Index k : spec.K_values) {
      CellResult c;
      c.M = m;
      c.K = k;
      c.trials.resize(static_cast<std::size_t>(spec.trials));
      res.cells.push_back(std::move(c));
    }
  const std::size_t per_cell = static_cast<std::size_t>(spec.trials);
  const double sep = spec.min_sep_multiplier / static_cast<double>(spec.N);
  parallel_for(res.cells.size() * per_cell, spec.threads, [&](std::size_t i) {
    CellResult& cell = res.cells[i / per_cell];
    const std::size_t t = i % per_cell;
    const ProblemDims dims = ProblemDims::make(spec.N, spec.L, cell.K, cell.M);
    const std::uint64_t seed = derive_seed(spec.seed, {u64(cell.M), u64(cell.K), t});
    cell.trials[t] = run_trial(dims, sep, spec.method, spec.is_ca, seed, spec.solver);
  });
  return res;
}

std::string phase_grid_csv(const PhaseGridResult& r, std::string_view timestamp) {
  std::ostringstream os;
  os << "# generated " << timestamp << "\n";
  os << "M,K,trials,successes,rate\n";
  for (const auto& c : r.cells)
    os << c.M << ',' << c.K << ',' << c.trials.size() << ',' << c.successes() << ',' << fmt(c.rate()) << '\n';
  return os.str();
}

std::string phase_trials_csv(const PhaseGridResult& r) {
  std::ostringstream os;
  os << "M,K,trial,seed,success,nmse,stop,iterations,reason\n";
  for (const auto& c : r.cells)
    for (std::size_t t = 0; t < c.trials.size(); ++t) {
      const auto& o = c.trials[t];
      std::string reason = o.reason;
      std::replace(reason.begin(), reason.end(), ',', ';');
      std::replace(reason.begin(), reason.end(), '\n', ' ');
      os << c.M << ',' << c.K << ',' << t << ',' << o.seed << ',' << (o.success ? 1 : 0) << ','
         << (o.nmse ? fmt(*o.nmse) : "") << ',' << o.stop << ',' << o.iterations << ',' << reason << '\n';
    }
  return os.str();
}

std::string phase_plot_script(std::string_view csv_file) {
  std::ostringstream os;
  os << "set datafile separator ','\n"
     << "set xlabel 'M'\nset ylabel 'K'\nset cblabel 'success rate'\n"
     << "set cbrange [0:1]\nset palette gray\nunset key\n"
     << "set terminal pngcairo size 640,480\n"
     << "set output '" << csv_file << ".png'\n"
     << "plot '" << csv_file << "' skip 2 using 1:2:5 with image\n";
  return os.str();
}

void TimingSpec::validate() const {
  if (N_values.empty()) throw_invalid("timing: N list must be non-empty");
  if (trials < 1) throw_invalid("timing: trials must be >= 1");
  if (!(cap_seconds > 0.0)) throw_invalid("timing: cap must be > 0");
  if (!(min_sep_multiplier >= 0.0)) throw_invalid("timing: min_sep multiplier must be >= 0");
  if (method == Method::chtgd && !is_ca) throw_invalid("timing: chtgd requires constant-amplitude instances");
  for (Index n : N_values) ProblemDims::make(n, L, K, std::max<Index>(1, n * 4 / 5));
  solver.validate();
}

TimingResult run_timing(const TimingSpec& spec) {
  spec.validate();
  TimingResult res;
  std::vector<double> xs, ys;
  for (Index N : spec.N_values) {
    TimingRow row;
    row.N = N;
    row.M = std::max<Index>(1, N * 4 / 5);
    row.trials = spec.trials;
    const ProblemDims dims = ProblemDims::make(N, spec.L, spec.K, row.M);
    SolverConfig cfg = spec.solver;
    cfg.time_limit_s = spec.cap_seconds;
    std::vector<double> wall, per_iter;
    for (int t = 0; t < spec.trials; ++t) {
      TrialOutcome o = run_trial(dims, spec.min_sep_multiplier / static_cast<double>(N), spec.method, spec.is_ca,
                                 derive_seed(spec.seed, {u64(N), static_cast<std::uint64_t>(t)}), cfg);
      if (o.stop == "time_limit" || o.seconds > spec.cap_seconds) {
        ++row.excluded;
      } else if (o.success) {
        ++row.successes;
        wall.push_back(o.seconds);
        if (o.iterations > 0) per_iter.push_back(o.mean_iteration_seconds);
      }
      row.outcomes.push_back(std::move(o));
    }
    if (!wall.empty()) row.median_wall_seconds = median(wall);
    if (!per_iter.empty()) {
      row.median_iteration_seconds = median(per_iter);
      xs.push_back(static_cast<double>(N));
      ys.push_back(*row.median_iteration_seconds);
    }
    res.rows.push_back(std::move(row));
  }
  if (xs.size() >= 2) res.loglog_slope = loglog_slope(xs, ys);
  return res;
}

std::string timing_csv(const TimingResult& r, std::string_view timestamp) {
  std::ostringstream os;
  os << "# generated " << timestamp << "\n";
  if (r.loglog_slope) os << "# loglog_slope=" << fmt(*r.loglog_slope) << "\n";
  os << "N,M,trials,successes,excluded,median_wall_s,median_iter_s\n";
  for (const auto& row : r.rows)
    os << row.N << ',' << row.M << ',' << row.trials << ',' << row.successes << ',' << row.excluded << ','
       << (row.median_wall_seconds ? fmt(*row.median_wall_seconds) : "") << ','
       << (row.median_iteration_seconds ? fmt(*row.median_iteration_seconds) : "") << '\n';
  return os.str();
}

std::string timing_plot_script(std::string_view csv_file) {
  std::ostringstream os;
  os << "set datafile separator ','\n"
     << "set logscale xy\nset xlabel 'N'\nset ylabel 'seconds per iteration'\nunset key\n"
     << "set terminal pngcairo size 640,480\n"
     << "set output '" << csv_file << ".png'\n"
     << "plot '" << csv_file << "' using 1:7 every ::1 with linespoints\n";
  return os.str();
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw_invalid("loglog_slope: need two or more matching points");
  const std::size_t n = x.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw_invalid("loglog_slope: values must be positive");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw_invalid("loglog_slope: x values are all equal");
  return sxy / sxx;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

}  // namespace htgd
