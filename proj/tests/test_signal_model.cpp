#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "htgd/errors.hpp"
#include "htgd/signal_model.hpp"
#include "oracle.hpp"

using namespace htgd;

namespace {

SpectralModel single(double f, Index L = 1) {
  SpectralModel m;
  m.freqs = Eigen::VectorXd::Constant(1, f);
  m.amps = Eigen::MatrixXd::Ones(1, L);
  m.phases = Eigen::MatrixXd::Zero(1, L);
  return m;
}

}  // namespace

TEST(ProblemDims, OddLengthIsKept) {
  const auto d = ProblemDims::make(65, 5, 4, 40);
  EXPECT_EQ(d.length(), 65);
  EXPECT_EQ(d.n(), 33);
  EXPECT_FALSE(d.embedded());
  EXPECT_DOUBLE_EQ(d.p(), 40.0 / 65.0);
}

TEST(ProblemDims, EvenLengthIsEmbedded) {
  const auto d = ProblemDims::make(64, 2, 3, 20);
  EXPECT_EQ(d.length(), 65);
  EXPECT_EQ(d.n(), 33);
  EXPECT_TRUE(d.embedded());
}

TEST(ProblemDims, RejectsBadSizes) {
  EXPECT_THROW(ProblemDims::make(9, 1, 0, 9), InvalidArgument);
  EXPECT_THROW(ProblemDims::make(9, 1, 5, 9), InvalidArgument);  // K must be < n = 5
  EXPECT_THROW(ProblemDims::make(9, 1, 2, 10), InvalidArgument);
  EXPECT_THROW(ProblemDims::make(9, 0, 2, 9), InvalidArgument);
  EXPECT_NO_THROW(ProblemDims::make(9, 1, 4, 9));
}

TEST(Synthesize, ZeroFrequencyGivesOnes) {
  const auto d = ProblemDims::make(3, 1, 1, 3);
  const Eigen::MatrixXcd x = synthesize(single(0.0), d);
  ASSERT_EQ(x.rows(), 3);
  for (Index j = 0; j < 3; ++j) EXPECT_NEAR(std::abs(x(j, 0) - 1.0), 0.0, 1e-15);
}

TEST(Synthesize, NyquistAlternatesOnEmbeddedLength) {
  const auto d = ProblemDims::make(4, 1, 1, 4);
  const Eigen::MatrixXcd x = synthesize(single(0.5), d);
  ASSERT_EQ(x.rows(), 5);
  const double expect[] = {1, -1, 1, -1};
  for (Index j = 0; j < 4; ++j) EXPECT_NEAR(std::abs(x(j, 0) - expect[j]), 0.0, 1e-14);
}

TEST(Synthesize, MatchesSumOfSingleSinusoids) {
  const auto d = ProblemDims::make(33, 3, 2, 33);
  const SpectralModel m = random_model(d, 1.5 / 33, false, 11);
  const Eigen::MatrixXcd x = synthesize(m, d);
  const auto d1 = ProblemDims::make(33, 3, 1, 33);
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(x.rows(), x.cols());
  for (Index k = 0; k < 2; ++k) {
    SpectralModel mk;
    mk.freqs = Eigen::VectorXd::Constant(1, m.freqs(k));
    mk.amps = m.amps.row(k);
    mk.phases = m.phases.row(k);
    sum += synthesize(mk, d1);
  }
  EXPECT_LE((x - sum).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Synthesize, AgreesWithDirectFormula) {
  const auto d = ProblemDims::make(21, 2, 3, 21);
  const SpectralModel m = random_model(d, 0.05, false, 5);
  const Eigen::MatrixXcd x = synthesize(m, d);
  for (Index l = 0; l < 2; ++l)
    for (Index j = 0; j < 21; ++j) {
      std::complex<double> v = 0;
      for (Index k = 0; k < 3; ++k)
        v += std::polar(m.amps(k, l), -2 * std::numbers::pi * m.freqs(k) * static_cast<double>(j) + m.phases(k, l));
      EXPECT_NEAR(std::abs(x(j, l) - v), 0.0, 1e-12);
    }
}

TEST(Synthesize, LinearInCoefficients) {
  const auto d = ProblemDims::make(17, 2, 2, 17);
  SpectralModel a = random_model(d, 0.1, false, 1);
  SpectralModel b = a;
  b.phases.array() += 0.7;
  const Eigen::MatrixXcd sa = a.coefficients(), sb = b.coefficients();
  const Eigen::MatrixXcd steer = steering_matrix(a.freqs, d.length());
  EXPECT_LE((synthesize(a, d) + synthesize(b, d) - steer * (sa + sb)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Synthesize, RejectsShapeMismatch) {
  const auto d = ProblemDims::make(9, 2, 1, 9);
  EXPECT_THROW(synthesize(single(0.1, 1), d), InvalidArgument);
}

TEST(RandomModel, SingleFrequencyAlwaysValid) {
  const auto d = ProblemDims::make(9, 1, 1, 9);
  for (std::uint64_t s = 0; s < 50; ++s) EXPECT_NO_THROW(random_model(d, 0.9, false, s).validate());
}

TEST(RandomModel, SeparationHoldsOverManyDraws) {
  const auto d = ProblemDims::make(65, 2, 4, 65);
  const double sep = 1.5 / 65;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const SpectralModel m = random_model(d, sep, false, s);
    for (Index i = 0; i < 4; ++i)
      for (Index j = 0; j < i; ++j) ASSERT_GE(oracle::wrap(m.freqs(i), m.freqs(j)), sep) << "seed " << s;
  }
}

TEST(RandomModel, DistributionBounds) {
  const auto d = ProblemDims::make(65, 3, 5, 65);
  for (std::uint64_t s = 0; s < 100; ++s) {
    const SpectralModel m = random_model(d, 0.01, false, s);
    EXPECT_GE(m.amps.minCoeff(), 0.5);
    EXPECT_LE(m.amps.maxCoeff(), 1.5);
    EXPECT_GE(m.phases.minCoeff(), 0.0);
    EXPECT_LT(m.phases.maxCoeff(), 2 * std::numbers::pi);
    EXPECT_GE(m.freqs.minCoeff(), 0.0);
    EXPECT_LT(m.freqs.maxCoeff(), 1.0);
  }
}

TEST(RandomModel, ConstantAmplitudeRows) {
  const auto d = ProblemDims::make(33, 4, 3, 33);
  const SpectralModel m = random_model(d, 0.05, true, 9);
  for (Index k = 0; k < 3; ++k)
    for (Index l = 1; l < 4; ++l) EXPECT_EQ(m.amps(k, l), m.amps(k, 0));
}

TEST(RandomModel, DeterministicPerSeed) {
  const auto d = ProblemDims::make(33, 2, 3, 33);
  const SpectralModel a = random_model(d, 0.05, false, 42), b = random_model(d, 0.05, false, 42);
  EXPECT_EQ(a.freqs, b.freqs);
  EXPECT_EQ(a.amps, b.amps);
  EXPECT_EQ(a.phases, b.phases);
  EXPECT_NE(a.freqs, random_model(d, 0.05, false, 43).freqs);
}

TEST(RandomModel, InfeasibleSeparationRejected) {
  const auto d = ProblemDims::make(33, 1, 4, 33);
  EXPECT_THROW(random_model(d, 0.3, false, 1), InvalidArgument);
}

TEST(RandomModel, ExhaustedBudgetIsGenerationFailure) {
  // K * sep = 1 is allowed, but such a draw essentially never occurs.
  const auto d = ProblemDims::make(33, 1, 4, 33);
  EXPECT_THROW(random_model(d, 0.25, false, 1), GenerationFailure);
}

TEST(SampleMask, FullMaskIsIdentity) {
  const auto d = ProblemDims::make(7, 1, 1, 7);
  const SamplingMask m = sample_mask(d, 3);
  ASSERT_EQ(m.size(), 7);
  for (Index j = 0; j < 7; ++j) EXPECT_EQ(m.indices[j], j);
}

TEST(SampleMask, SingletonInRange) {
  const auto d = ProblemDims::make(5, 1, 1, 1);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const SamplingMask m = sample_mask(d, s);
    ASSERT_EQ(m.size(), 1);
    EXPECT_GE(m.indices[0], 0);
    EXPECT_LT(m.indices[0], 5);
  }
}

TEST(SampleMask, UniformInclusion) {
  const auto d = ProblemDims::make(10, 1, 1, 5);
  std::vector<int> hits(10, 0);
  const int draws = 10000;
  for (int s = 0; s < draws; ++s)
    for (Index j : sample_mask(d, static_cast<std::uint64_t>(s)).indices) ++hits[j];
  for (int h : hits) EXPECT_NEAR(static_cast<double>(h) / draws, 0.5, 0.02);
}

TEST(SampleMask, SortedUniqueAndNeverTheEmbeddedSample) {
  const auto d = ProblemDims::make(64, 1, 3, 64);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const SamplingMask m = sample_mask(d, s);
    ASSERT_EQ(m.size(), 64);
    for (std::size_t i = 1; i < m.indices.size(); ++i) EXPECT_LT(m.indices[i - 1], m.indices[i]);
    EXPECT_LT(m.indices.back(), 64);  // internal index 64 stays unobserved
  }
}

TEST(MakeMask, ValidatesIndices) {
  EXPECT_THROW(make_mask({0, 5}, 5), InvalidArgument);
  EXPECT_THROW(make_mask({1, 1}, 5), InvalidArgument);
  EXPECT_EQ(make_mask({3, 0}, 5).indices, (std::vector<Index>{0, 3}));
}

TEST(ApplyMask, Examples) {
  std::mt19937_64 rng(1);
  const Eigen::VectorXcd x = oracle::randv(3, rng);
  const Eigen::VectorXcd y = apply_mask(x, make_mask({0, 2}, 3));
  EXPECT_EQ(y(0), x(0));
  EXPECT_EQ(y(1), std::complex<double>(0));
  EXPECT_EQ(y(2), x(2));
  EXPECT_EQ(apply_mask(x, make_mask({0, 1, 2}, 3)), x);
}

TEST(ApplyMask, IdempotentAndSelfAdjoint) {
  std::mt19937_64 rng(2);
  const SamplingMask m = make_mask({1, 4, 5, 8}, 11);
  const Eigen::VectorXcd x = oracle::randv(11, rng), y = oracle::randv(11, rng);
  EXPECT_EQ(apply_mask(apply_mask(x, m), m), apply_mask(x, m));
  EXPECT_NEAR(std::abs(apply_mask(x, m).dot(y) - x.dot(apply_mask(y, m))), 0.0, 1e-12);
}

TEST(WrapDistance, TorusMetric) {
  EXPECT_NEAR(wrap_distance(0.99, 0.01), 0.02, 1e-15);
  EXPECT_NEAR(wrap_distance(0.2, 0.7), 0.5, 1e-15);
  EXPECT_EQ(wrap_distance(0.3, 0.3), 0.0);
}
