#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "htgd/errors.hpp"
#include "htgd/experiments.hpp"
#include "htgd/rng.hpp"

using namespace htgd;

namespace {

PhaseGridSpec small_grid(Method method, bool ca) {
  PhaseGridSpec s;
  s.N = 21;
  s.L = 2;
  s.M_values = {21, 14};
  s.K_values = {1, 2};
  s.trials = 3;
  s.method = method;
  s.is_ca = ca;
  s.seed = 99;
  return s;
}

std::string drop_first_line(const std::string& s) { return s.substr(s.find('\n') + 1); }

}  // namespace

TEST(Method, Names) {
  EXPECT_EQ(parse_method("mhtgd"), Method::mhtgd);
  EXPECT_EQ(parse_method("chtgd"), Method::chtgd);
  EXPECT_EQ(to_string(Method::chtgd), "chtgd");
  EXPECT_THROW(parse_method("anm"), InvalidArgument);
}

TEST(PhaseGrid, SpecValidation) {
  PhaseGridSpec s = small_grid(Method::mhtgd, false);
  EXPECT_NO_THROW(s.validate());
  s.K_values = {11};  // K must be below n = 11
  EXPECT_THROW(s.validate(), InvalidArgument);
  s = small_grid(Method::mhtgd, false);
  s.M_values = {22};
  EXPECT_THROW(s.validate(), InvalidArgument);
  s = small_grid(Method::mhtgd, false);
  s.trials = 0;
  EXPECT_THROW(s.validate(), InvalidArgument);
  s = small_grid(Method::chtgd, false);
  EXPECT_THROW(s.validate(), InvalidArgument);
}

TEST(PhaseGrid, DefaultGridIsTheReconstruction) {
  const PhaseGridSpec s = PhaseGridSpec::default_grid();
  EXPECT_EQ(s.N, 65);
  EXPECT_EQ(s.L, 5);
  EXPECT_EQ(s.trials, 20);
  EXPECT_EQ(s.M_values.front(), 5);
  EXPECT_EQ(s.M_values.back(), 65);
  EXPECT_EQ(s.M_values.size(), 13u);
  EXPECT_EQ(s.K_values.size(), 16u);
  EXPECT_NO_THROW(s.validate());
}

TEST(PhaseGrid, OneCellCompletes) {
  PhaseGridSpec s = small_grid(Method::mhtgd, false);
  s.M_values = {21};
  s.K_values = {1};
  const PhaseGridResult r = run_phase_grid(s);
  ASSERT_EQ(r.cells.size(), 1u);
  EXPECT_EQ(r.cells[0].trials.size(), 3u);
  EXPECT_DOUBLE_EQ(r.cells[0].rate(), 1.0);
  const std::string csv = phase_grid_csv(r, "T");
  EXPECT_EQ(csv, "# generated T\nM,K,trials,successes,rate\n21,1,3,3,1\n");
}

TEST(PhaseGrid, DeterministicAcrossRunsAndThreads) {
  for (Method m : {Method::mhtgd, Method::chtgd}) {
    PhaseGridSpec s = small_grid(m, true);
    const PhaseGridResult a = run_phase_grid(s);
    s.threads = 4;
    const PhaseGridResult b = run_phase_grid(s);
    const std::string ca = phase_grid_csv(a, utc_timestamp());
    const std::string cb = phase_grid_csv(b, "later");
    EXPECT_NE(ca, cb);
    EXPECT_EQ(drop_first_line(ca), drop_first_line(cb));
    EXPECT_EQ(phase_trials_csv(a), phase_trials_csv(b));
    // Cells in spec order, M-major.
    ASSERT_EQ(a.cells.size(), 4u);
    EXPECT_EQ(a.cells[1].M, 21);
    EXPECT_EQ(a.cells[1].K, 2);
    EXPECT_EQ(a.cells[2].M, 14);
  }
}

TEST(PhaseGrid, AddingCellsDoesNotPerturbOthers) {
  PhaseGridSpec one = small_grid(Method::mhtgd, false);
  one.M_values = {14};
  one.K_values = {2};
  const PhaseGridResult a = run_phase_grid(one);
  const PhaseGridResult b = run_phase_grid(small_grid(Method::mhtgd, false));
  const CellResult& cell = b.cells[3];
  ASSERT_EQ(cell.M, 14);
  ASSERT_EQ(cell.K, 2);
  for (std::size_t t = 0; t < 3; ++t) {
    EXPECT_EQ(a.cells[0].trials[t].seed, cell.trials[t].seed);
    EXPECT_EQ(a.cells[0].trials[t].nmse, cell.trials[t].nmse);
  }
}

TEST(PhaseGrid, FailuresAreRecordedNotThrown) {
  // Four frequencies at separation 0.25 fill the circle exactly; rejection sampling gives up.
  const ProblemDims d = ProblemDims::make(21, 2, 4, 21);
  const TrialOutcome o = run_trial(d, 0.25, Method::mhtgd, false, 5, SolverConfig{});
  EXPECT_FALSE(o.success);
  EXPECT_EQ(o.stop, "generation_failure");
  EXPECT_FALSE(o.reason.empty());
}

TEST(PhaseGrid, TrialsCsvAndPlotScript) {
  PhaseGridSpec s = small_grid(Method::mhtgd, false);
  s.M_values = {21};
  s.K_values = {1};
  const PhaseGridResult r = run_phase_grid(s);
  std::istringstream in(phase_trials_csv(r));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "M,K,trial,seed,success,nmse,stop,iterations,reason");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 3);
  EXPECT_NE(phase_plot_script("grid.csv").find("grid.csv"), std::string::npos);
}

TEST(Timing, SingleSizeHasNoSlope) {
  TimingSpec s;
  s.N_values = {65};
  s.trials = 2;
  s.seed = 3;
  const TimingResult r = run_timing(s);
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_EQ(r.rows[0].M, 52);
  EXPECT_FALSE(r.loglog_slope.has_value());
  EXPECT_TRUE(r.rows[0].median_wall_seconds.has_value());
  EXPECT_TRUE(r.rows[0].median_iteration_seconds.has_value());
  const std::string csv = timing_csv(r, "T");
  EXPECT_EQ(csv.find("loglog_slope"), std::string::npos);
  EXPECT_NE(csv.find("N,M,trials,successes,excluded,median_wall_s,median_iter_s\n65,52,2,"), std::string::npos);
}

TEST(Timing, TinyCapExcludesEverything) {
  TimingSpec s;
  s.N_values = {129, 257};
  s.trials = 2;
  s.cap_seconds = 0.001;
  const TimingResult r = run_timing(s);
  for (const TimingRow& row : r.rows) {
    EXPECT_EQ(row.excluded, 2);
    EXPECT_FALSE(row.median_wall_seconds.has_value());
    EXPECT_FALSE(row.median_iteration_seconds.has_value());
  }
  EXPECT_FALSE(r.loglog_slope.has_value());
  EXPECT_NE(timing_csv(r, "T").find("129,103,2,0,2,,\n"), std::string::npos);
}

TEST(Timing, TwoSizesGiveSlope) {
  TimingSpec s;
  s.N_values = {65, 129};
  s.trials = 1;
  const TimingResult r = run_timing(s);
  ASSERT_TRUE(r.loglog_slope.has_value());
  EXPECT_TRUE(std::isfinite(*r.loglog_slope));
  EXPECT_NE(timing_csv(r, "T").find("# loglog_slope="), std::string::npos);
}

TEST(Timing, SpecValidation) {
  TimingSpec s;
  EXPECT_THROW(s.validate(), InvalidArgument);  // no sizes
  s.N_values = {65};
  s.cap_seconds = 0;
  EXPECT_THROW(s.validate(), InvalidArgument);
}

TEST(LogLogSlope, ExactPowerLaws) {
  EXPECT_NEAR(loglog_slope({1, 2, 4, 8}, {3, 6, 12, 24}), 1.0, 1e-12);
  EXPECT_NEAR(loglog_slope({10, 100, 1000}, {1, 100, 10000}), 2.0, 1e-12);
  EXPECT_THROW(loglog_slope({1}, {1}), InvalidArgument);
  EXPECT_THROW(loglog_slope({1, 2}, {0, 1}), InvalidArgument);
  EXPECT_THROW(loglog_slope({2, 2}, {1, 3}), InvalidArgument);
}
