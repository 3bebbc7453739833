// htgd: synthesize, solve, run experiments, self-test.
//
// Exit codes: 0 ok, 2 usage, 3 numerical failure, 4 I/O.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "htgd/errors.hpp"
#include "htgd/experiments.hpp"
#include "htgd/io.hpp"
#include "htgd/kernels.hpp"
#include "htgd/retrieval.hpp"
#include "htgd/rng.hpp"
#include "htgd/selftest.hpp"
#include "htgd/signal_model.hpp"

namespace fs = std::filesystem;
using namespace htgd;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

struct SynthArgs {
  Index N = 65, L = 5, K = 4, M = 40;
  double min_sep = 1.5;
  bool ca = false;
  std::uint64_t seed = 0;
  fs::path out_dir = ".";
};

struct SolveArgs {
  fs::path observed, mask, ground_truth, model, out_dir = ".";
  Index N = 0, K = 0;
  std::string method = "mhtgd";
  bool freqs = false;
  SolverConfig cfg;
};

struct ExperimentArgs {
  fs::path spec, out;
  int threads = 0;
};

struct SelftestArgs {
  std::uint64_t seed = 1;
  bool corrupt_weights = false;
};

void add_solver_flags(CLI::App* app, SolverConfig& c) {
  app->add_option("--tol", c.tol, "relative-change stopping tolerance")->capture_default_str();
  app->add_option("--max-iter", c.max_iter, "iteration cap")->capture_default_str();
  app->add_option("--armijo-beta", c.armijo.shrink, "backtracking shrink factor")->capture_default_str();
  app->add_option("--armijo-c", c.armijo.sufficient, "sufficient-decrease constant")->capture_default_str();
  app->add_option("--armijo-gamma", c.armijo.growth, "warm-start growth factor")->capture_default_str();
  app->add_option("--armijo-max-backtracks", c.armijo.max_backtracks, "backtracks before giving up")->capture_default_str();
  app->add_option("--armijo-eta0", c.armijo.initial_step, "initial step size")->capture_default_str();
  app->add_option("--seed", c.seed, "seed for the randomized initializer")->capture_default_str();
}

int cmd_synth(const SynthArgs& a) {
  const ProblemDims dims = ProblemDims::make(a.N, a.L, a.K, a.M);
  const SpectralModel model = random_model(dims, a.min_sep / static_cast<double>(a.N), a.ca, derive_seed(a.seed, {0}));
  const SamplingMask mask = sample_mask(dims, derive_seed(a.seed, {1}));
  const Eigen::MatrixXcd x = synthesize(model, dims).topRows(a.N);

  io::write_text(a.out_dir / "model.json", io::model_json(model));
  io::write_text(a.out_dir / "signal.csv", io::signal_csv(x));
  io::write_text(a.out_dir / "mask.json", io::mask_json(mask));
  io::write_text(a.out_dir / "observed.csv", io::signal_csv(x, &mask.indices));

  nlohmann::json meta = {{"N", a.N}, {"L", a.L}, {"K", a.K}, {"M", a.M}, {"seed", a.seed},
                         {"min_sep", a.min_sep}, {"is_ca", a.ca}, {"internal_length", dims.length()}};
  if (dims.embedded())
    meta["note"] = "even N = " + std::to_string(a.N) + " is embedded into " + std::to_string(dims.length()) +
                   " samples; the last sample is never observed";
  io::write_text(a.out_dir / "meta.json", meta.dump(2) + "\n");
  std::cout << "wrote model.json, signal.csv, mask.json, observed.csv, meta.json to " << a.out_dir.string() << "\n";
  return 0;
}

int cmd_solve(const SolveArgs& a) {
  const Method method = parse_method(a.method);
  const Eigen::MatrixXcd observed = io::read_signal_csv(a.observed, a.N);
  const SamplingMask mask = make_mask(io::read_mask_json(a.mask), a.N);
  const ProblemDims dims = ProblemDims::make(a.N, observed.cols(), a.K, mask.size());
  std::optional<Eigen::MatrixXcd> truth;
  if (!a.ground_truth.empty()) {
    truth = io::read_signal_csv(a.ground_truth, a.N);
    if (truth->cols() != dims.L) throw_invalid("ground truth has a different channel count");
  }

  const SolverReport rep = solve(method, observed, mask, dims, a.cfg, truth);
  io::write_text(a.out_dir / "recovered.csv", io::signal_csv(rep.recovered));
  io::write_text(a.out_dir / "report.json", io::report_json(rep, dims, method, a.cfg));
  std::cout << "stop: " << to_string(rep.stop) << " after " << rep.iterations << " iterations ("
            << rep.total_seconds << " s)\n";
  if (!rep.message.empty()) std::cout << "message: " << rep.message << "\n";
  if (rep.nmse) std::cout << "nmse: " << *rep.nmse << (rep.success() ? " (success)" : " (not recovered)") << "\n";

  if (a.freqs && rep.stop != StopReason::numerical_failure) {
    FrequencyEstimate est = esprit(rep.recovered, dims.K);
    if (!a.model.empty()) {
      const SpectralModel model = io::read_model_json(a.model);
      const std::vector<double> ref(model.freqs.data(), model.freqs.data() + model.freqs.size());
      const FrequencyMatch m = match_frequencies(est.freqs, ref);
      est.pairing = m.pairing;
      est.max_wrap_error = m.max_wrap_error;
      std::cout << "max wrap error: " << m.max_wrap_error << "\n";
    }
    io::write_text(a.out_dir / "freqs.json", io::frequencies_json(est));
  }
  return rep.stop == StopReason::numerical_failure ? kExitNumerical : 0;
}

int cmd_phase(const ExperimentArgs& a) {
  PhaseGridSpec spec = io::parse_phase_grid_spec(io::read_text(a.spec), a.spec.string());
  if (a.threads > 0) spec.threads = a.threads;
  const PhaseGridResult r = run_phase_grid(spec);
  const fs::path out = a.out.empty() ? fs::path("phase.csv") : a.out;
  io::write_text(out, phase_grid_csv(r, utc_timestamp()));
  fs::path trials = out;
  trials.replace_extension(".trials.csv");
  io::write_text(trials, phase_trials_csv(r));
  fs::path plot = out;
  plot.replace_extension(".gp");
  io::write_text(plot, phase_plot_script(out.filename().string()));
  std::cout << "wrote " << out.string() << ", " << trials.string() << ", " << plot.string() << "\n";
  return 0;
}

int cmd_timing(const ExperimentArgs& a) {
  const TimingSpec spec = io::parse_timing_spec(io::read_text(a.spec), a.spec.string());
  const TimingResult r = run_timing(spec);
  const fs::path out = a.out.empty() ? fs::path("timing.csv") : a.out;
  io::write_text(out, timing_csv(r, utc_timestamp()));
  fs::path plot = out;
  plot.replace_extension(".gp");
  io::write_text(plot, timing_plot_script(out.filename().string()));
  if (r.loglog_slope) std::cout << "log-log slope: " << *r.loglog_slope << "\n";
  std::cout << "wrote " << out.string() << ", " << plot.string() << "\n";
  return 0;
}

int cmd_selftest(const SelftestArgs& a) {
  const auto cases = run_selftest({a.seed, a.corrupt_weights});
  std::cout << format_selftest(cases);
  for (const auto& c : cases)
    if (!c.passed) return kExitNumerical;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-rank Hankel-Toeplitz gradient descent for multichannel spectral super-resolution"};
  app.require_subcommand(1);
  std::string isa;
  app.add_option("--isa", isa, "force kernel variant (scalar or avx2)");

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "draw a random model, mask and signal");
  s->add_option("--N", synth.N, "samples per channel")->capture_default_str();
  s->add_option("--L", synth.L, "channels")->capture_default_str();
  s->add_option("--K", synth.K, "sinusoids")->capture_default_str();
  s->add_option("--M", synth.M, "observed samples per channel")->capture_default_str();
  s->add_option("--min-sep", synth.min_sep, "minimum separation in units of 1/N")->capture_default_str();
  s->add_flag("--ca", synth.ca, "constant-amplitude coefficients");
  s->add_option("--seed", synth.seed, "master seed")->capture_default_str();
  s->add_option("--out-dir", synth.out_dir, "output directory")->capture_default_str();

  SolveArgs solve_args;
  auto* v = app.add_subcommand("solve", "recover a signal from observed samples");
  v->add_option("--observed", solve_args.observed, "observed samples CSV")->required();
  v->add_option("--mask", solve_args.mask, "mask JSON")->required();
  v->add_option("--N", solve_args.N, "samples per channel")->required();
  v->add_option("--K", solve_args.K, "model order")->required();
  v->add_option("--method", solve_args.method, "mhtgd or chtgd")->capture_default_str();
  v->add_option("--ground-truth", solve_args.ground_truth, "full signal CSV; adds NMSE to the report");
  v->add_option("--model", solve_args.model, "model JSON; with --freqs, reports the max wrap error");
  v->add_flag("--freqs", solve_args.freqs, "estimate frequencies with ESPRIT");
  v->add_option("--out-dir", solve_args.out_dir, "output directory")->capture_default_str();
  add_solver_flags(v, solve_args.cfg);

  ExperimentArgs exp_args;
  auto* e = app.add_subcommand("experiment", "Monte Carlo experiments");
  e->require_subcommand(1);
  auto* ep = e->add_subcommand("phase", "phase-transition grid");
  ep->add_option("--spec", exp_args.spec, "grid spec JSON")->required();
  ep->add_option("--out", exp_args.out, "output CSV");
  ep->add_option("--threads", exp_args.threads, "worker threads (overrides spec)");
  auto* et = e->add_subcommand("timing", "per-iteration timing scan");
  et->add_option("--spec", exp_args.spec, "timing spec JSON")->required();
  et->add_option("--out", exp_args.out, "output CSV");

  SelftestArgs st;
  auto* t = app.add_subcommand("selftest", "operator, gradient and construction checks");
  t->add_option("--seed", st.seed, "seed")->capture_default_str();
  t->add_flag("--corrupt-weights", st.corrupt_weights, "fault injection: perturb the weight vector");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int rc = app.exit(err);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (!isa.empty()) kernels::set_isa(kernels::parse_isa(isa));
    if (s->parsed()) return cmd_synth(synth);
    if (v->parsed()) return cmd_solve(solve_args);
    if (ep->parsed()) return cmd_phase(exp_args);
    if (et->parsed()) return cmd_timing(exp_args);
    if (t->parsed()) return cmd_selftest(st);
  } catch (const InvalidArgument& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitUsage;
  } catch (const NumericalFailure& err) {
    std::cerr << "numerical failure: " << err.what() << "\n";
    return kExitNumerical;
  } catch (const GenerationFailure& err) {
    std::cerr << "numerical failure: " << err.what() << "\n";
    return kExitNumerical;
  } catch (const IoError& err) {
    std::cerr << "I/O error: " << err.what() << "\n";
    return kExitIo;
  }
  return kExitUsage;
}
