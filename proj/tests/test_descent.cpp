#include <gtest/gtest.h>

#include <random>

#include "htgd/descent.hpp"
#include "htgd/errors.hpp"
#include "oracle.hpp"

using namespace htgd;

namespace {

// f(z) = 1/2 sum_i lambda_i |z_i|^2, gradient lambda .* z under df = Re<grad, dz>.
struct Quadratic {
  Eigen::VectorXd lambda;
  bool flip_gradient = false;

  double objective(const FactorSet& z) const {
    return 0.5 * (lambda.cast<std::complex<double>>().asDiagonal() * z.blocks[0]).cwiseProduct(z.blocks[0].conjugate()).real().sum();
  }
  FactorSet gradient(const FactorSet& z) const {
    FactorSet g{{lambda.cast<std::complex<double>>().asDiagonal() * z.blocks[0]}};
    if (flip_gradient) g.blocks[0] *= -1.0;
    return g;
  }
  Eigen::MatrixXcd reconstruct(const FactorSet& z) const { return z.blocks[0]; }
};

FactorSet random_set(Eigen::Index rows, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return FactorSet{{oracle::randn(rows, 1, rng)}};
}

}  // namespace

TEST(FactorSet, Arithmetic) {
  FactorSet a{{Eigen::MatrixXcd::Ones(2, 2), Eigen::MatrixXcd::Constant(1, 3, {0, 2})}};
  FactorSet b{{Eigen::MatrixXcd::Constant(2, 2, 2.0), Eigen::MatrixXcd::Constant(1, 3, 1.0)}};
  EXPECT_DOUBLE_EQ(a.squared_norm(), 4 + 12);
  EXPECT_DOUBLE_EQ(inner_real(a, b), 8.0);
  FactorSet c = a.stepped(0.5, b);
  EXPECT_EQ(c.blocks[0], Eigen::MatrixXcd::Zero(2, 2));
  EXPECT_TRUE(c.all_finite());
  c.blocks[1](0, 0) = std::numeric_limits<double>::infinity();
  EXPECT_FALSE(c.all_finite());
}

TEST(SolverConfig, Validation) {
  SolverConfig c;
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.tol, 1e-6);
  EXPECT_EQ(c.max_iter, 10000);
  c.tol = 0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = SolverConfig{};
  c.armijo.shrink = 1.0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = SolverConfig{};
  c.armijo.max_backtracks = 0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = SolverConfig{};
  c.armijo.growth = 0.5;
  EXPECT_THROW(c.validate(), InvalidArgument);
}

TEST(Armijo, ZeroGradientAcceptsImmediately) {
  const Quadratic q{Eigen::VectorXd::Ones(3)};
  const FactorSet z = random_set(3, 1);
  const FactorSet g{{Eigen::MatrixXcd::Zero(3, 1)}};
  const StepResult r = armijo_step(z, g, q.objective(z), 1.0, ArmijoParams{}, [&](const FactorSet& c) { return q.objective(c); });
  EXPECT_TRUE(r.accepted);
  EXPECT_EQ(r.backtracks, 0);
  EXPECT_EQ(r.next.blocks[0], z.blocks[0]);
}

TEST(Armijo, QuadraticStepWithinFactorTwoOfExact) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(1.0, 5.0);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd lambda(6);
    for (auto& l : lambda) l = u(rng);
    const Quadratic q{lambda};
    const FactorSet z = random_set(6, 100 + trial);
    const FactorSet g = q.gradient(z);
    const double gg = g.squared_norm();
    const double gag = (lambda.cast<std::complex<double>>().asDiagonal() * g.blocks[0]).cwiseProduct(g.blocks[0].conjugate()).real().sum();
    const double eta_exact = gg / gag;
    const double f0 = q.objective(z);
    const StepResult r = armijo_step(z, g, f0, 1.0, ArmijoParams{}, [&](const FactorSet& c) { return q.objective(c); });
    ASSERT_TRUE(r.accepted);
    EXPECT_GE(r.eta, eta_exact / 2);
    EXPECT_LE(r.eta, eta_exact * 2);
    EXPECT_LE(r.f_next, f0 - 1e-4 * r.eta * gg);
    EXPECT_LE(r.f_next, f0);
  }
}

TEST(Armijo, AscentDirectionFails) {
  Quadratic q{Eigen::VectorXd::Ones(3)};
  q.flip_gradient = true;
  const FactorSet z = random_set(3, 3);
  ArmijoParams p;
  p.max_backtracks = 10;
  const StepResult r = armijo_step(z, q.gradient(z), q.objective(z), 1.0, p, [&](const FactorSet& c) { return q.objective(c); });
  EXPECT_FALSE(r.accepted);
  EXPECT_EQ(r.next.blocks[0], z.blocks[0]);
}

TEST(Armijo, NonFiniteTrialsAreRejected) {
  const FactorSet z = random_set(2, 4);
  const FactorSet g{{Eigen::MatrixXcd::Ones(2, 1)}};
  int calls = 0;
  const StepResult r = armijo_step(z, g, 10.0, 1.0, ArmijoParams{}, [&](const FactorSet&) {
    return ++calls < 3 ? std::numeric_limits<double>::quiet_NaN() : 0.0;
  });
  EXPECT_TRUE(r.accepted);
  EXPECT_EQ(r.backtracks, 2);
  EXPECT_DOUBLE_EQ(r.eta, 0.25);
}

TEST(RunDescent, ConvergesMonotonically) {
  const Quadratic q{(Eigen::VectorXd(4) << 1, 2, 3, 4).finished()};
  SolverConfig cfg;
  cfg.tol = 1e-10;
  const SolverReport rep = run_descent(q, random_set(4, 5), cfg);
  EXPECT_EQ(rep.stop, StopReason::converged);
  ASSERT_EQ(rep.objective.size(), static_cast<std::size_t>(rep.iterations + 1));
  for (std::size_t i = 1; i < rep.objective.size(); ++i) EXPECT_LE(rep.objective[i], rep.objective[i - 1]);
  EXPECT_LE(rep.recovered.norm(), 1e-6);
  EXPECT_EQ(rep.step_sizes.size(), static_cast<std::size_t>(rep.iterations));
  EXPECT_EQ(rep.iteration_seconds.size(), static_cast<std::size_t>(rep.iterations));
}

TEST(RunDescent, StopsAtMaxIter) {
  const Quadratic q{(Eigen::VectorXd(3) << 1, 100, 1000).finished()};
  SolverConfig cfg;
  cfg.max_iter = 3;
  cfg.tol = 1e-300;
  const SolverReport rep = run_descent(q, random_set(3, 6), cfg);
  EXPECT_EQ(rep.stop, StopReason::max_iter);
  EXPECT_EQ(rep.iterations, 3);
}

TEST(RunDescent, ReportsLineSearchFailure) {
  Quadratic q{Eigen::VectorXd::Ones(3)};
  q.flip_gradient = true;
  SolverConfig cfg;
  cfg.armijo.max_backtracks = 5;
  const SolverReport rep = run_descent(q, random_set(3, 7), cfg);
  EXPECT_EQ(rep.stop, StopReason::line_search_failure);
  EXPECT_EQ(rep.iterations, 0);
  EXPECT_FALSE(rep.message.empty());
}

TEST(RunDescent, ZeroStartIsAlreadyStationary) {
  const Quadratic q{Eigen::VectorXd::Ones(3)};
  const SolverReport rep = run_descent(q, FactorSet{{Eigen::MatrixXcd::Zero(3, 1)}}, SolverConfig{});
  EXPECT_EQ(rep.stop, StopReason::converged);
  EXPECT_EQ(rep.iterations, 1);
}

TEST(RunDescent, WarmStartCapsGrowth) {
  const Quadratic q{Eigen::VectorXd::Constant(2, 1e-6)};  // exact step 1e6
  SolverConfig cfg;
  cfg.max_iter = 20;
  cfg.tol = 1e-300;
  const SolverReport rep = run_descent(q, random_set(2, 8), cfg);
  ASSERT_FALSE(rep.step_sizes.empty());
  EXPECT_DOUBLE_EQ(rep.step_sizes.front(), 1.0);
  for (double eta : rep.step_sizes) EXPECT_LE(eta, 256.0);
  EXPECT_DOUBLE_EQ(rep.step_sizes.back(), 256.0);
}

TEST(StopReason, Names) {
  EXPECT_EQ(to_string(StopReason::converged), "converged");
  EXPECT_EQ(to_string(StopReason::line_search_failure), "line_search_failure");
  EXPECT_EQ(to_string(StopReason::max_iter), "max_iter");
}
