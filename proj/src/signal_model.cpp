#include "htgd/signal_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "htgd/errors.hpp"
#include "htgd/rng.hpp"

namespace htgd {

ProblemDims ProblemDims::make(Index N, Index L, Index K, Index M) {
  if (N < 1) throw_invalid("N must be positive");
  if (L < 1) throw_invalid("L must be positive");
  if (K < 1) throw_invalid("K must be at least 1");
  if (M < 1 || M > N) throw_invalid("M must satisfy 1 <= M <= N (got M=" + std::to_string(M) + ", N=" + std::to_string(N) + ")");
  ProblemDims d{N, L, K, M};
  if (K >= d.n()) throw_invalid("K must be smaller than n = " + std::to_string(d.n()));
  return d;
}

Eigen::MatrixXcd SpectralModel::coefficients() const {
  Eigen::MatrixXcd s(amps.rows(), amps.cols());
  for (Index l = 0; l < amps.cols(); ++l)
    for (Index k = 0; k < amps.rows(); ++k) s(k, l) = std::polar(amps(k, l), phases(k, l));
  return s;
}

void SpectralModel::validate() const {
  const Index k = freqs.size();
  if (k < 1) throw_invalid("model needs at least one frequency");
  if (amps.rows() != k || phases.rows() != k || amps.cols() != phases.cols() || amps.cols() < 1)
    throw_invalid("amplitude/phase matrices must be K x L");
  for (Index i = 0; i < k; ++i) {
    if (!(freqs(i) >= 0.0 && freqs(i) < 1.0)) throw_invalid("frequencies must lie in [0, 1)");
    for (Index j = 0; j < i; ++j)
      if (freqs(i) == freqs(j)) throw_invalid("frequencies must be distinct");
  }
  if (!(amps.array() > 0.0).all()) throw_invalid("amplitudes must be positive");
  if (!phases.allFinite()) throw_invalid("phases must be finite");
  if (is_ca) {
    for (Index i = 0; i < k; ++i)
      if ((amps.row(i).array() != amps(i, 0)).any()) throw_invalid("constant-amplitude model has a varying row");
  }
}

Eigen::VectorXd SamplingMask::indicator(Index length) const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(length);
  for (Index j : indices) v(j) = 1.0;
  return v;
}

Eigen::MatrixXcd steering_matrix(const Eigen::VectorXd& freqs, Index rows) {
  Eigen::MatrixXcd a(rows, freqs.size());
  for (Index k = 0; k < freqs.size(); ++k) {
    for (Index j = 0; j < rows; ++j) {
      // Reduce f*j mod 1 before scaling so large j keeps full phase accuracy.
      const double turns = std::fmod(freqs(k) * static_cast<double>(j), 1.0);
      a(j, k) = std::polar(1.0, -2.0 * std::numbers::pi * turns);
    }
  }
  return a;
}

Eigen::MatrixXcd synthesize(const SpectralModel& model, const ProblemDims& dims) {
  model.validate();
  if (model.K() != dims.K || model.L() != dims.L)
    throw_invalid("model is " + std::to_string(model.K()) + "x" + std::to_string(model.L()) +
                  " but dims request K=" + std::to_string(dims.K) + ", L=" + std::to_string(dims.L));
  return steering_matrix(model.freqs, dims.length()) * model.coefficients();
}

double wrap_distance(double a, double b) {
  double d = std::fmod(std::abs(a - b), 1.0);
  return std::min(d, 1.0 - d);
}

SpectralModel random_model(const ProblemDims& dims, double min_sep, bool is_ca, std::uint64_t seed) {
  if (!(min_sep >= 0.0) || min_sep * static_cast<double>(dims.K) > 1.0)
    throw_invalid("minimum separation " + std::to_string(min_sep) + " is infeasible for K=" + std::to_string(dims.K));

  Rng rng = make_rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> amp(0.5, 1.5);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);

  constexpr int kMaxAttempts = 10000;
  SpectralModel m;
  m.is_ca = is_ca;
  m.freqs.resize(dims.K);
  bool ok = false;
  for (int attempt = 0; attempt < kMaxAttempts && !ok; ++attempt) {
    for (Index k = 0; k < dims.K; ++k) m.freqs(k) = unit(rng);
    ok = true;
    for (Index i = 0; i < dims.K && ok; ++i)
      for (Index j = 0; j < i && ok; ++j)
        ok = wrap_distance(m.freqs(i), m.freqs(j)) >= min_sep && m.freqs(i) != m.freqs(j);
  }
  if (!ok) throw GenerationFailure("no frequency draw met the separation within 10^4 attempts");

  m.amps.resize(dims.K, dims.L);
  m.phases.resize(dims.K, dims.L);
  for (Index k = 0; k < dims.K; ++k) {
    const double row_amp = amp(rng);
    for (Index l = 0; l < dims.L; ++l) m.amps(k, l) = is_ca ? row_amp : amp(rng);
  }
  for (Index k = 0; k < dims.K; ++k)
    for (Index l = 0; l < dims.L; ++l) m.phases(k, l) = phase(rng);
  return m;
}

SamplingMask sample_mask(const ProblemDims& dims, std::uint64_t seed) {
  if (dims.M > dims.N || dims.M < 0) throw_invalid("mask size exceeds N");
  Rng rng = make_rng(seed);
  std::vector<Index> pool(static_cast<std::size_t>(dims.N));
  std::iota(pool.begin(), pool.end(), Index{0});
  // Partial Fisher-Yates: the first M slots become a uniform M-subset.
  for (Index i = 0; i < dims.M; ++i) {
    std::uniform_int_distribution<Index> pick(i, dims.N - 1);
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(pick(rng))]);
  }
  pool.resize(static_cast<std::size_t>(dims.M));
  std::sort(pool.begin(), pool.end());
  return SamplingMask{std::move(pool)};
}

SamplingMask make_mask(std::vector<Index> indices, Index N) {
  std::sort(indices.begin(), indices.end());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] < 0 || indices[i] >= N) throw_invalid("mask index out of range");
    if (i > 0 && indices[i] == indices[i - 1]) throw_invalid("mask index repeated");
  }
  return SamplingMask{std::move(indices)};
}

Eigen::VectorXcd apply_mask(const Eigen::VectorXcd& x, const SamplingMask& mask) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(x.size());
  for (Index j : mask.indices)
    if (j < x.size()) out(j) = x(j);
  return out;
}

Eigen::MatrixXcd apply_mask(const Eigen::MatrixXcd& x, const SamplingMask& mask) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(x.rows(), x.cols());
  for (Index j : mask.indices)
    if (j < x.rows()) out.row(j) = x.row(j);
  return out;
}

}  // namespace htgd
