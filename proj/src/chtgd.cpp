#include "htgd/chtgd.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "htgd/errors.hpp"
#include "htgd/kernels.hpp"
#include "htgd/linalg.hpp"
#include "htgd/mhtgd.hpp"
#include "htgd/rng.hpp"

namespace htgd {
namespace {

double sq(const Eigen::VectorXcd& v) { return kernels::norm_sq({v.data(), static_cast<std::size_t>(v.size())}); }

}  // namespace

FactorSetC FactorSetC::zeros(Index L, Index n, Index K) {
  FactorSetC z;
  z.set.blocks.assign(static_cast<std::size_t>(L), Eigen::MatrixXcd::Zero(n, K));
  return z;
}

ChtgdProblem::ChtgdProblem(const ProblemDims& dims, const SamplingMask& mask, const Eigen::MatrixXcd& weighted_obs)
    : dims_(dims), ops_(dims.n()), mask_(mask.indicator(dims.length())) {
  if (weighted_obs.rows() != dims.length() || weighted_obs.cols() != dims.L)
    throw_invalid("weighted observations must be " + std::to_string(dims.length()) + " x " + std::to_string(dims.L));
  y_ = weighted_obs;
  for (Index l = 0; l < dims.L; ++l) y_.col(l) = y_.col(l).cwiseProduct(mask_.cast<std::complex<double>>());
}

void ChtgdProblem::check_shape(const FactorSet& z) const {
  if (static_cast<Index>(z.blocks.size()) != dims_.L) throw_invalid("CHTGD factor set needs L blocks");
  for (const auto& b : z.blocks)
    if (b.rows() != dims_.n() || b.cols() != dims_.K) throw_invalid("CHTGD factor blocks must be n x K");
}

double ChtgdProblem::objective(const FactorSet& zs) const {
  check_shape(zs);
  const double p = dims_.p();
  const auto& z1 = zs.blocks.front();
  const double g11 = (z1.adjoint() * z1).squaredNorm();

  double f = 0.0;
  for (Index l = 0; l < dims_.L; ++l) {
    const auto& z = zs.blocks[static_cast<std::size_t>(l)];
    const Eigen::MatrixXcd zc = z.conjugate();
    const Eigen::VectorXcd g = ops_.adjoint_lowrank(Lift::hankel, z, zc);
    const Eigen::VectorXcd resid = g.cwiseProduct(mask_.cast<std::complex<double>>()) - y_.col(l);
    f += sq(resid) / (4.0 * p);
    f += 0.25 * (lowrank_frob_sq(z, zc) - sq(g));
    if (l > 0) f += 0.25 * (g11 - 2.0 * (z1.adjoint() * z).squaredNorm() + (z.adjoint() * z).squaredNorm());
  }
  const Eigen::VectorXcd w = ops_.adjoint_lowrank(Lift::toeplitz, z1, z1);
  f += 0.25 * (lowrank_frob_sq(z1, z1) - sq(w));
  return f;
}

FactorSet ChtgdProblem::gradient(const FactorSet& zs) const {
  check_shape(zs);
  const double p = dims_.p();
  const double Ld = static_cast<double>(dims_.L);
  const auto& z1 = zs.blocks.front();
  const Eigen::MatrixXcd g11 = z1.adjoint() * z1;

  FactorSet out;
  out.blocks.resize(static_cast<std::size_t>(dims_.L));
  for (Index l = 0; l < dims_.L; ++l) {
    const auto& z = zs.blocks[static_cast<std::size_t>(l)];
    const Eigen::MatrixXcd zc = z.conjugate();
    const Eigen::VectorXcd g = ops_.adjoint_lowrank(Lift::hankel, z, zc);
    const Eigen::VectorXcd r = (g.cwiseProduct(mask_.cast<std::complex<double>>()) - y_.col(l)) / p - g;

    Eigen::MatrixXcd d = ops_.lift_mul(Lift::hankel, r, zc);
    if (l == 0) {
      const Eigen::VectorXcd w = ops_.adjoint_lowrank(Lift::toeplitz, z1, z1);
      d -= ops_.lift_mul(Lift::toeplitz, w, z1);
      d.noalias() += z1 * (z1.transpose() * zc + Ld * g11);
      for (Index q = 1; q < dims_.L; ++q) {
        const auto& zq = zs.blocks[static_cast<std::size_t>(q)];
        d.noalias() -= zq * (zq.adjoint() * z1);
      }
    } else {
      d.noalias() += z * (z.transpose() * zc + z.adjoint() * z);
      d.noalias() -= z1 * (z1.adjoint() * z);
    }
    out.blocks[static_cast<std::size_t>(l)] = std::move(d);
  }
  return out;
}

Eigen::MatrixXcd ChtgdProblem::reconstruct(const FactorSet& zs) const {
  check_shape(zs);
  Eigen::MatrixXcd x(dims_.length(), dims_.L);
  for (Index l = 0; l < dims_.L; ++l) {
    const auto& z = zs.blocks[static_cast<std::size_t>(l)];
    x.col(l) = ops_.unweight(ops_.adjoint_lowrank(Lift::hankel, z, z.conjugate()));
  }
  return x;
}

FactorSet ChtgdProblem::initialize(std::uint64_t seed, bool* clustered) const {
  const Index n = dims_.n();
  FactorSetC z = FactorSetC::zeros(dims_.L, n, dims_.K);
  bool any_cluster = false;
  for (Index l = 0; l < dims_.L; ++l) {
    const Eigen::VectorXcd v = y_.col(l) / dims_.p();
    const TakagiResult tk = n <= kDenseInitMaxN
                                ? takagi_truncated(ops_.apply(Lift::hankel, v), dims_.K)
                                : takagi_from_svd(hankel_truncated_svd(ops_, v, dims_.K, derive_seed(seed, {static_cast<std::uint64_t>(l)})));
    any_cluster = any_cluster || tk.clustered;
    z.z(l) = tk.U * tk.sigma.cwiseSqrt().asDiagonal();
  }
  if (clustered) *clustered = any_cluster;
  return std::move(z.set);
}

FactorSetC spectral_init_ca(const Eigen::MatrixXcd& weighted_obs, const SamplingMask& mask, const ProblemDims& dims) {
  return FactorSetC{ChtgdProblem(dims, mask, weighted_obs).initialize()};
}

double objective_g(const FactorSetC& z, const Eigen::MatrixXcd& weighted_obs, const SamplingMask& mask, const ProblemDims& dims) {
  const double f = ChtgdProblem(dims, mask, weighted_obs).objective(z.set);
  if (!std::isfinite(f)) throw NumericalFailure("objective_g is not finite");
  return f;
}

FactorSetC grad_g(const FactorSetC& z, const Eigen::MatrixXcd& weighted_obs, const SamplingMask& mask, const ProblemDims& dims) {
  FactorSetC g{ChtgdProblem(dims, mask, weighted_obs).gradient(z.set)};
  if (!g.set.all_finite()) throw NumericalFailure("grad_g produced non-finite entries");
  return g;
}

SolverReport solve_chtgd(const Eigen::MatrixXcd& observed, const SamplingMask& mask, const ProblemDims& dims,
                         const SolverConfig& cfg, const std::optional<Eigen::MatrixXcd>& truth) {
  cfg.validate();
  for (Index j : mask.indices)
    if (j >= dims.N) throw_invalid("mask index beyond N");
  const auto t0 = std::chrono::steady_clock::now();
  const StructuredOps ops(dims.n());
  const ChtgdProblem problem(dims, mask, detail::weighted_observations(observed, mask, dims, ops));
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
