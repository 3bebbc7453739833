#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "htgd/errors.hpp"
#include "htgd/linalg.hpp"
#include "htgd/mhtgd.hpp"
#include "htgd/reference.hpp"
#include "htgd/retrieval.hpp"
#include "instances.hpp"

using namespace htgd;
using oracle::Mat;

namespace {

FactorSetM pack(const std::vector<Mat>& z1, const std::vector<Mat>& z2) {
  FactorSetM z = FactorSetM::zeros(static_cast<Index>(z1.size()), z1[0].rows(), z1[0].cols());
  for (std::size_t l = 0; l < z1.size(); ++l) {
    z.z1(static_cast<Index>(l)) = z1[l];
    z.z2(static_cast<Index>(l)) = z2[l];
  }
  return z;
}

FactorSetM random_factors(const ProblemDims& d, std::mt19937_64& rng) {
  FactorSetM z = FactorSetM::zeros(d.L, d.n(), d.K);
  for (auto& b : z.set.blocks) b = oracle::randn(d.n(), d.K, rng);
  return z;
}

double oracle_f(const FactorSetM& z, const inst::Instance& in) {
  std::vector<Mat> z1, z2;
  for (Index l = 0; l < in.dims.L; ++l) {
    z1.push_back(z.z1(l));
    z2.push_back(z.z2(l));
  }
  return oracle::objective_f(z1, z2, in.y, in.ind, in.dims.p());
}

}  // namespace

TEST(MhtgdObjective, ZeroAtZero) {
  const auto in = inst::make(15, 2, 2, 15, false, 1);
  const Mat y0 = Mat::Zero(in.dims.length(), 2);
  const FactorSetM z = FactorSetM::zeros(2, in.dims.n(), 2);
  EXPECT_EQ(objective_f(z, y0, in.mask, in.dims), 0.0);
  EXPECT_EQ(grad_f(z, in.y, in.mask, in.dims).set.squared_norm(), 0.0);
}

TEST(MhtgdObjective, MatchesBruteForce) {
  std::mt19937_64 rng(2);
  for (Index L : {2, 3})
    for (Index M : {6, 15}) {
      const auto in = inst::make(15, L, 2, M, false, 10 + L + M);
      for (int t = 0; t < 5; ++t) {
        const FactorSetM z = random_factors(in.dims, rng);
        const double ref = oracle_f(z, in);
        EXPECT_NEAR(objective_f(z, in.y, in.mask, in.dims), ref, 1e-10 * ref);
        EXPECT_NEAR(reference::objective_f_dense(z, in.y, in.mask, in.dims), ref, 1e-10 * ref);
      }
    }
}

TEST(MhtgdObjective, NonFiniteThrows) {
  const auto in = inst::make(15, 2, 2, 10, false, 3);
  std::mt19937_64 rng(3);
  FactorSetM z = random_factors(in.dims, rng);
  z.z1(1)(0, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(objective_f(z, in.y, in.mask, in.dims), NumericalFailure);
  EXPECT_THROW(grad_f(z, in.y, in.mask, in.dims), NumericalFailure);
}

TEST(MhtgdObjective, ShapeChecks) {
  const auto in = inst::make(15, 2, 2, 10, false, 4);
  EXPECT_THROW(objective_f(FactorSetM::zeros(3, in.dims.n(), 2), in.y, in.mask, in.dims), InvalidArgument);
  EXPECT_THROW(objective_f(FactorSetM::zeros(2, in.dims.n(), 3), in.y, in.mask, in.dims), InvalidArgument);
  EXPECT_THROW(MhtgdProblem(in.dims, in.mask, Mat::Zero(14, 2)), InvalidArgument);
}

TEST(MhtgdGradient, FiniteDifferenceSingleConstant) {
  std::mt19937_64 rng(5);
  std::vector<double> ratios;
  for (int trial = 0; trial < 20; ++trial) {
    const Index L = trial % 2 == 0 ? 2 : 3;
    const auto in = inst::make(15, L, 2, 10, false, 50 + trial);
    const FactorSetM z = random_factors(in.dims, rng);
    const FactorSetM g = grad_f(z, in.y, in.mask, in.dims);
    FactorSet d;
    for (const auto& b : z.set.blocks) d.blocks.push_back(oracle::randn(b.rows(), b.cols(), rng));
    const double h = std::cbrt(std::numeric_limits<double>::epsilon()) * std::sqrt(z.set.squared_norm() / d.squared_norm());
    const double fp = oracle_f(FactorSetM{z.set.stepped(-h, d)}, in);
    const double fm = oracle_f(FactorSetM{z.set.stepped(h, d)}, in);
    ratios.push_back(((fp - fm) / (2 * h)) / inner_real(g.set, d));
  }
  const double kappa = ratios.front();
  for (double r : ratios) EXPECT_NEAR(r / kappa, 1.0, 1e-4);
  // Gradients are returned as 2 df/d conj(Z): df = Re<grad, dZ>.
  EXPECT_NEAR(kappa, 1.0, 1e-4);
}

TEST(MhtgdGradient, ZeroFactorsGiveZeroGradient) {
  const auto in = inst::make(21, 3, 2, 12, false, 6);
  EXPECT_EQ(grad_f(FactorSetM::zeros(3, in.dims.n(), 2), in.y, in.mask, in.dims).set.squared_norm(), 0.0);
}

TEST(MhtgdExactFactors, ConstraintsObjectiveGradient) {
  for (int trial = 0; trial < 20; ++trial) {
    const Index N = trial % 2 == 0 ? 33 : 64;
    const auto in = inst::make(N, 3, 4, N, false, 100 + trial);
    std::vector<Mat> z1, z2;
    inst::exact_general(in, z1, z2);
    const Index L = in.dims.L;
    Mat c = Mat::Zero(in.dims.n(), in.dims.n());
    for (Index q = 0; q < L; ++q) c += z1[q].conjugate() * z1[q].transpose();
    for (Index l = 0; l < L; ++l) {
      const Mat h = z2[l] * z1[l].adjoint();
      const Mat t = z1[l] * z1[l].adjoint();
      EXPECT_LE((h - oracle::hankel_average(h)).norm(), 1e-8 * h.norm());
      EXPECT_LE((t - oracle::toeplitz_average(t)).norm(), 1e-8 * t.norm());
      EXPECT_LE((c - static_cast<double>(L) * z2[l] * z2[l].adjoint()).norm(), 1e-8 * c.norm());
      // H x_l = Z2 Z1^H exactly.
      EXPECT_LE((h - oracle::hankel(in.x.col(l))).norm(), 1e-10 * h.norm());
    }
    const FactorSetM z = pack(z1, z2);
    const double y4 = std::pow(in.y.norm(), 4);
    EXPECT_LE(std::abs(objective_f(z, in.y, in.mask, in.dims)), 1e-10 * (1 + y4));
    EXPECT_LE(std::sqrt(grad_f(z, in.y, in.mask, in.dims).set.squared_norm()), 1e-6 * std::pow(z.set.squared_norm(), 1.5));

    // Library construction agrees with the one assembled here.
    const FactorSetM lib = reference::exact_factors(in.model, in.dims);
    for (Index l = 0; l < L; ++l) {
      EXPECT_LE((lib.z1(l) - z1[l]).norm(), 1e-10 * z1[l].norm());
      EXPECT_LE((lib.z2(l) - z2[l]).norm(), 1e-10 * z2[l].norm());
    }
    EXPECT_LE(reference::constraint_residuals(lib, in.dims).max(), 1e-8);

    // Scaling Y by a and Z by sqrt(a) keeps the zero.
    FactorSetM zs = z;
    for (auto& b : zs.set.blocks) b *= std::sqrt(3.0);
    EXPECT_LE(std::abs(objective_f(zs, Mat(3.0 * in.y), in.mask, in.dims)), 1e-10 * (1 + 81 * y4));
  }
}

TEST(MhtgdInit, FullObservationRankK) {
  const auto in = inst::make(33, 2, 3, 33, false, 7);
  const StructuredOps ops(in.dims.n());
  for (Index l = 0; l < 2; ++l) {
    Eigen::JacobiSVD<Mat> svd(oracle::g_apply(in.y.col(l)));
    const auto s = svd.singularValues();
    EXPECT_LE(s(3) / s(0), 1e-10);
  }
  const FactorSetM z = spectral_init(in.y, in.mask, in.dims);
  for (Index l = 0; l < 2; ++l) {
    const Mat g = oracle::g_apply(in.y.col(l));
    EXPECT_LE((z.z2(l) * z.z1(l).adjoint() - g).norm(), 1e-8 * g.norm());
  }
}

TEST(MhtgdInit, EckartYoungResidual) {
  const auto in = inst::make(25, 2, 2, 14, false, 8);
  const FactorSetM z = spectral_init(in.y, in.mask, in.dims);
  const double p = in.dims.p();
  for (Index l = 0; l < 2; ++l) {
    const Mat target = oracle::g_apply(in.y.col(l)) / p;
    Eigen::JacobiSVD<Mat> svd(target);
    const double tail = std::sqrt(svd.singularValues().tail(target.rows() - 2).squaredNorm());
    EXPECT_NEAR((z.z2(l) * z.z1(l).adjoint() - target).norm(), tail, 1e-9 * target.norm());
  }
}

TEST(MhtgdInit, ZeroObservationsGiveZeroFactors) {
  const auto in = inst::make(15, 2, 2, 8, false, 9);
  const FactorSetM z = spectral_init(Mat::Zero(in.dims.length(), 2), in.mask, in.dims);
  EXPECT_EQ(z.set.squared_norm(), 0.0);
}

TEST(MhtgdInit, RandomizedPathMatchesDenseOnLargeN) {
  const auto in = inst::make(1200, 2, 3, 1000, false, 10);
  ASSERT_GT(in.dims.n(), kDenseInitMaxN);
  const FactorSetM z = spectral_init(in.y, in.mask, in.dims);
  const double p = in.dims.p();
  for (Index l = 0; l < 2; ++l) {
    const Mat target = oracle::g_apply(in.y.col(l)) / p;
    Eigen::BDCSVD<Mat> svd(target, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Mat best = svd.matrixU().leftCols(3) * svd.singularValues().head(3).asDiagonal() * svd.matrixV().leftCols(3).adjoint();
    EXPECT_LE((z.z2(l) * z.z1(l).adjoint() - best).norm(), 1e-6 * best.norm());
  }
}

TEST(MhtgdSolve, FullObservationExactRecovery) {
  const auto in = inst::make(33, 2, 2, 33, false, 11);
  SolverConfig cfg;
  cfg.tol = 1e-12;
  cfg.max_iter = 500;
  const SolverReport rep = solve_mhtgd(in.x, in.mask, in.dims, cfg, in.x);
  ASSERT_TRUE(rep.nmse.has_value());
  EXPECT_LE(*rep.nmse, 1e-10);
  EXPECT_LE(rep.iterations, 500);
  EXPECT_NE(rep.stop, StopReason::numerical_failure);
  for (std::size_t i = 1; i < rep.objective.size(); ++i) EXPECT_LE(rep.objective[i], rep.objective[i - 1]);
}

TEST(MhtgdSolve, PartialObservationRecovers) {
  const auto in = inst::make(65, 5, 4, 40, false, 12);
  const SolverReport rep = solve_mhtgd(apply_mask(in.x, in.mask), in.mask, in.dims, SolverConfig{}, in.x);
  EXPECT_TRUE(rep.success());
  EXPECT_EQ(rep.stop, StopReason::converged);
  EXPECT_EQ(rep.recovered.rows(), 65);
  // Retrieval from the recovered signal.
  const FrequencyEstimate est = esprit(rep.recovered, 4);
  const std::vector<double> truth(in.model.freqs.data(), in.model.freqs.data() + 4);
  EXPECT_LE(match_frequencies(est.freqs, truth).max_wrap_error, 1e-4);
}

TEST(MhtgdSolve, EvenLengthEmbedding) {
  const auto in = inst::make(64, 3, 3, 50, false, 13);
  EXPECT_TRUE(in.dims.embedded());
  // Either N or internal-length rows are accepted as input.
  const SolverReport a = solve_mhtgd(apply_mask(in.x, in.mask), in.mask, in.dims, SolverConfig{}, in.x);
  const SolverReport b = solve_mhtgd(Mat(apply_mask(in.x, in.mask).topRows(64)), in.mask, in.dims, SolverConfig{}, Mat(in.x.topRows(64)));
  EXPECT_EQ(a.recovered.rows(), 64);
  EXPECT_TRUE(a.success());
  EXPECT_EQ(a.recovered, b.recovered);
}

TEST(MhtgdSolve, DegenerateZeroChannel) {
  auto in = inst::make(33, 3, 2, 25, false, 14);
  in.x.col(1).setZero();
  const SolverReport rep = solve_mhtgd(apply_mask(in.x, in.mask), in.mask, in.dims, SolverConfig{}, in.x);
  EXPECT_NE(rep.stop, StopReason::numerical_failure);
  EXPECT_TRUE(rep.recovered.allFinite());
}

TEST(MhtgdSolve, PreconditionsAndLimits) {
  EXPECT_THROW(ProblemDims::make(33, 2, 0, 33), InvalidArgument);
  const auto in = inst::make(33, 2, 2, 20, false, 15);
  SolverConfig bad;
  bad.tol = -1;
  EXPECT_THROW(solve_mhtgd(in.x, in.mask, in.dims, bad), InvalidArgument);
  SolverConfig one;
  one.max_iter = 1;
  const SolverReport r1 = solve_mhtgd(in.x, in.mask, in.dims, one, in.x);
  EXPECT_EQ(r1.iterations, 1);
  EXPECT_EQ(r1.stop, StopReason::max_iter);
  SolverConfig capped;
  capped.time_limit_s = 1e-9;
  capped.tol = 1e-300;
  EXPECT_EQ(solve_mhtgd(in.x, in.mask, in.dims, capped).stop, StopReason::time_limit);
}

TEST(MhtgdSolve, Deterministic) {
  const auto in = inst::make(33, 2, 3, 22, false, 16);
  const SolverReport a = solve_mhtgd(in.x, in.mask, in.dims, SolverConfig{}, in.x);
  const SolverReport b = solve_mhtgd(in.x, in.mask, in.dims, SolverConfig{}, in.x);
  EXPECT_EQ(a.objective, b.objective);
  EXPECT_EQ(a.recovered, b.recovered);
}
