#include "htgd/mhtgd.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "htgd/errors.hpp"
#include "htgd/kernels.hpp"
#include "htgd/linalg.hpp"
#include "htgd/retrieval.hpp"
#include "htgd/rng.hpp"

namespace htgd {
namespace {

double sq(const Eigen::VectorXcd& v) { return kernels::norm_sq({v.data(), static_cast<std::size_t>(v.size())}); }

Eigen::MatrixXcd hstack(const std::vector<const Eigen::MatrixXcd*>& parts, bool conjugate) {
  const Index rows = parts.front()->rows();
  const Index k = parts.front()->cols();
  Eigen::MatrixXcd out(rows, k * static_cast<Index>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (conjugate)
      out.middleCols(static_cast<Index>(i) * k, k) = parts[i]->conjugate();
    else
      out.middleCols(static_cast<Index>(i) * k, k) = *parts[i];
  }
  return out;
}

}  // namespace

FactorSetM FactorSetM::zeros(Index L, Index n, Index K) {
  FactorSetM z;
  z.set.blocks.assign(static_cast<std::size_t>(2 * L), Eigen::MatrixXcd::Zero(n, K));
  return z;
}

MhtgdProblem::MhtgdProblem(const ProblemDims& dims, const SamplingMask& mask, const Eigen::MatrixXcd& weighted_obs)
    : dims_(dims), ops_(dims.n()), mask_(mask.indicator(dims.length())) {
  if (weighted_obs.rows() != dims.length() || weighted_obs.cols() != dims.L)
    throw_invalid("weighted observations must be " + std::to_string(dims.length()) + " x " + std::to_string(dims.L));
  y_ = weighted_obs;
  for (Index l = 0; l < dims.L; ++l) y_.col(l) = y_.col(l).cwiseProduct(mask_.cast<std::complex<double>>());
}

void MhtgdProblem::check_shape(const FactorSet& z) const {
  if (static_cast<Index>(z.blocks.size()) != 2 * dims_.L) throw_invalid("MHTGD factor set needs 2L blocks");
  for (const auto& b : z.blocks)
    if (b.rows() != dims_.n() || b.cols() != dims_.K) throw_invalid("MHTGD factor blocks must be n x K");
}

double MhtgdProblem::objective(const FactorSet& zs) const {
  check_shape(zs);
  const Index L = dims_.L;
  const double p = dims_.p();
  const double Ld = static_cast<double>(L);
  auto z1 = [&](Index l) -> const Eigen::MatrixXcd& { return zs.blocks[static_cast<std::size_t>(2 * l)]; };
  auto z2 = [&](Index l) -> const Eigen::MatrixXcd& { return zs.blocks[static_cast<std::size_t>(2 * l + 1)]; };

  // ||sum_q conj(Z1^q) Z1^q^T||_F^2 = sum_{p,q} ||Z1^p^H Z1^q||_F^2
  double coupling = 0.0;
  for (Index a = 0; a < L; ++a)
    for (Index b = 0; b < L; ++b) coupling += (z1(a).adjoint() * z1(b)).squaredNorm();

  double f = 0.0;
  for (Index l = 0; l < L; ++l) {
    const Eigen::VectorXcd g = ops_.adjoint_lowrank(Lift::hankel, z2(l), z1(l));
    const Eigen::VectorXcd resid = g.cwiseProduct(mask_.cast<std::complex<double>>()) - y_.col(l);
    const Eigen::VectorXcd w = ops_.adjoint_lowrank(Lift::toeplitz, z1(l), z1(l));

    double cross = 0.0;  // Re tr(C Z2 Z2^H) = sum_q ||Z1^q^T Z2^l||_F^2
    for (Index q = 0; q < L; ++q) cross += (z1(q).transpose() * z2(l)).squaredNorm();

    f += sq(resid) / (2.0 * p);
    f += 0.5 * (lowrank_frob_sq(z2(l), z1(l)) - sq(g));
    f += 0.25 * (lowrank_frob_sq(z1(l), z1(l)) - sq(w));
    f += 0.25 * (coupling - 2.0 * Ld * cross + Ld * Ld * (z2(l).adjoint() * z2(l)).squaredNorm());
  }
  return f;
}

FactorSet MhtgdProblem::gradient(const FactorSet& zs) const {
  check_shape(zs);
  const Index L = dims_.L;
  const double p = dims_.p();
  const double Ld = static_cast<double>(L);
  auto z1 = [&](Index l) -> const Eigen::MatrixXcd& { return zs.blocks[static_cast<std::size_t>(2 * l)]; };
  auto z2 = [&](Index l) -> const Eigen::MatrixXcd& { return zs.blocks[static_cast<std::size_t>(2 * l + 1)]; };

  std::vector<const Eigen::MatrixXcd*> ones, twos;
  for (Index l = 0; l < L; ++l) {
    ones.push_back(&z1(l));
    twos.push_back(&z2(l));
  }
  const Eigen::MatrixXcd u1 = hstack(ones, false);       // [Z1^1 .. Z1^L]
  const Eigen::MatrixXcd c1 = hstack(ones, true);        // [conj Z1^q]
  const Eigen::MatrixXcd c2 = hstack(twos, true);        // [conj Z2^q]

  FactorSet out;
  out.blocks.resize(static_cast<std::size_t>(2 * L));
  for (Index l = 0; l < L; ++l) {
    const Eigen::MatrixXcd& a = z1(l);
    const Eigen::MatrixXcd& b = z2(l);
    const Eigen::VectorXcd g = ops_.adjoint_lowrank(Lift::hankel, b, a);
    const Eigen::VectorXcd r = (g.cwiseProduct(mask_.cast<std::complex<double>>()) - y_.col(l)) / p - g;
    const Eigen::VectorXcd w = ops_.adjoint_lowrank(Lift::toeplitz, a, a);
    const Eigen::MatrixXcd ga = a.adjoint() * a;
    const Eigen::MatrixXcd gb = b.adjoint() * b;

    Eigen::MatrixXcd d1 = ops_.lift_mul(Lift::hankel, r.conjugate(), b);
    d1.noalias() += a * (ga + gb);
    d1 -= ops_.lift_mul(Lift::toeplitz, w, a);
    d1.noalias() += Ld * (u1 * (u1.adjoint() * a));
    d1.noalias() -= Ld * (c2 * (c2.adjoint() * a));

    Eigen::MatrixXcd d2 = ops_.lift_mul(Lift::hankel, r, a);
    d2.noalias() += b * (ga + Ld * Ld * gb);
    d2.noalias() -= Ld * (c1 * (c1.adjoint() * b));

    out.blocks[static_cast<std::size_t>(2 * l)] = std::move(d1);
    out.blocks[static_cast<std::size_t>(2 * l + 1)] = std::move(d2);
  }
  return out;
}

Eigen::MatrixXcd MhtgdProblem::reconstruct(const FactorSet& zs) const {
  check_shape(zs);
  Eigen::MatrixXcd x(dims_.length(), dims_.L);
  for (Index l = 0; l < dims_.L; ++l)
    x.col(l) = ops_.unweight(ops_.adjoint_lowrank(Lift::hankel, zs.blocks[static_cast<std::size_t>(2 * l + 1)],
                                                  zs.blocks[static_cast<std::size_t>(2 * l)]));
  return x;
}

FactorSet MhtgdProblem::initialize(std::uint64_t seed) const {
  const Index n = dims_.n();
  const Index K = dims_.K;
  FactorSetM z = FactorSetM::zeros(dims_.L, n, K);
  for (Index l = 0; l < dims_.L; ++l) {
    const Eigen::VectorXcd v = y_.col(l) / dims_.p();
    const TruncatedSvd svd = n <= kDenseInitMaxN ? truncated_svd(ops_.apply(Lift::hankel, v), K)
                                                 : hankel_truncated_svd(ops_, v, K, derive_seed(seed, {static_cast<std::uint64_t>(l)}));
    const Eigen::VectorXd root = svd.sigma.cwiseSqrt();
    z.z1(l) = svd.V * root.asDiagonal();
    z.z2(l) = svd.U * root.asDiagonal();
  }
  return std::move(z.set);
}

FactorSetM spectral_init(const Eigen::MatrixXcd& weighted_obs, const SamplingMask& mask, const ProblemDims& dims) {
  return FactorSetM{MhtgdProblem(dims, mask, weighted_obs).initialize()};
}

double objective_f(const FactorSetM& z, const Eigen::MatrixXcd& weighted_obs, const SamplingMask& mask, const ProblemDims& dims) {
  const double f = MhtgdProblem(dims, mask, weighted_obs).objective(z.set);
  if (!std::isfinite(f)) throw NumericalFailure("objective_f is not finite");
  return f;
}

FactorSetM grad_f(const FactorSetM& z, const Eigen::MatrixXcd& weighted_obs, const SamplingMask& mask, const ProblemDims& dims) {
  FactorSetM g{MhtgdProblem(dims, mask, weighted_obs).gradient(z.set)};
  if (!g.set.all_finite()) throw NumericalFailure("grad_f produced non-finite entries");
  return g;
}

namespace detail {

Eigen::MatrixXcd weighted_observations(const Eigen::MatrixXcd& observed, const SamplingMask& mask,
                                       const ProblemDims& dims, const StructuredOps& ops) {
  if (observed.cols() != dims.L) throw_invalid("observation matrix must have L columns");
  if (observed.rows() != dims.N && observed.rows() != dims.length())
    throw_invalid("observation matrix must have N or internal-length rows");
  Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(dims.length(), dims.L);
  full.topRows(observed.rows()) = observed;
  full = apply_mask(full, mask);
  for (Index l = 0; l < dims.L; ++l) full.col(l) = ops.weight(full.col(l));
  return full;
}

void finish_report(SolverReport& rep, const ProblemDims& dims, const std::optional<Eigen::MatrixXcd>& truth) {
  if (rep.recovered.rows() > dims.N) rep.recovered = rep.recovered.topRows(dims.N).eval();
  if (truth) {
    if (truth->rows() < dims.N || truth->cols() != dims.L) throw_invalid("ground truth has the wrong shape");
    rep.nmse = nmse(rep.recovered, truth->topRows(dims.N));
  }
}

}  // namespace detail

SolverReport solve_mhtgd(const Eigen::MatrixXcd& observed, const SamplingMask& mask, const ProblemDims& dims,
                         const SolverConfig& cfg, const std::optional<Eigen::MatrixXcd>& truth) {
  cfg.validate();
  for (Index j : mask.indices)
    if (j >= dims.N) throw_invalid("mask index beyond N");
  const auto t0 = std::chrono::steady_clock::now();
  const StructuredOps ops(dims.n());
  const MhtgdProblem problem(dims, mask, detail::weighted_observations(observed, mask, dims, ops));
  SolverReport rep;
  try {
    FactorSet z = problem.initialize(cfg.seed);
    const double init_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rep = run_descent(problem, std::move(z), cfg);
    rep.init_seconds = init_s;
    rep.total_seconds += init_s;
  } catch (const NumericalFailure& e) {
    rep.stop = StopReason::numerical_failure;
    rep.message = e.what();
    rep.recovered = Eigen::MatrixXcd::Zero(dims.length(), dims.L);
  }
  detail::finish_report(rep, dims, truth);
  return rep;
}

}  // namespace htgd
