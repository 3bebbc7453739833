#include "htgd/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "htgd/chtgd.hpp"
#include "htgd/mhtgd.hpp"
#include "htgd/reference.hpp"
#include "htgd/rng.hpp"
#include "htgd/structured_ops.hpp"

namespace htgd {
namespace {

Eigen::MatrixXcd random_matrix(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXcd m(rows, cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r) m(r, c) = {g(rng), g(rng)};
  return m;
}

FactorSet random_like(const FactorSet& z, Rng& rng) {
  FactorSet out;
  for (const auto& b : z.blocks) out.blocks.push_back(random_matrix(b.rows(), b.cols(), rng));
  return out;
}

SelftestCase make_case(std::string name, double value, double threshold) {
  return {std::move(name), std::isfinite(value) && value <= threshold, value, threshold};
}

StructuredOps ops_for(Index n, bool corrupt) {
  if (!corrupt) return StructuredOps(n);
  Eigen::VectorXd omega = weight_vector(2 * n - 1).omega;
  omega(n - 1) *= 1.01;
  return StructuredOps(n, std::move(omega));
}

// Central-difference directional derivative against Re<grad, d>.
template <class Problem>
double fd_error(const Problem& problem, const FactorSet& z, Rng& rng) {
  const FactorSet d = random_like(z, rng);
  const double h = 1e-6 * std::sqrt(z.squared_norm() / d.squared_norm());
  const double fd = (problem.objective(z.stepped(-h, d)) - problem.objective(z.stepped(h, d))) / (2.0 * h);
  const double an = inner_real(problem.gradient(z), d);
  return std::abs(fd - an) / std::max(std::abs(an), 1e-300);
}

void operator_cases(const SelftestOptions& opts, std::vector<SelftestCase>& out) {
  Rng rng = make_rng(derive_seed(opts.seed, {1}));
  double gg = 0, ww = 0, hh = 0, tt = 0;
  for (Index N : {5, 33, 65}) {
    const Index n = (N + 1) / 2;
    const StructuredOps ops = ops_for(n, opts.corrupt_weights);
    const Eigen::VectorXd a = weight_vector(N).counts;
    for (int trial = 0; trial < 10; ++trial) {
      const Eigen::VectorXcd x = random_matrix(N, 1, rng);
      const double xi = x.cwiseAbs().maxCoeff();
      gg = std::max(gg, (ops.adjoint(Lift::hankel, ops.apply(Lift::hankel, x)) - x).cwiseAbs().maxCoeff() / xi);
      ww = std::max(ww, (ops.adjoint(Lift::toeplitz, ops.apply(Lift::toeplitz, x)) - x).cwiseAbs().maxCoeff() / xi);
      const Eigen::VectorXcd ax = a.cast<std::complex<double>>().cwiseProduct(x);
      hh = std::max(hh, (hankel_adjoint(hankel_lift(x)) - ax).cwiseAbs().maxCoeff() / ax.cwiseAbs().maxCoeff());
      tt = std::max(tt, (toeplitz_adjoint(toeplitz_lift(x)) - ax).cwiseAbs().maxCoeff() / ax.cwiseAbs().maxCoeff());
    }
  }
  out.push_back(make_case("G*G = I", gg, 1e-12));
  out.push_back(make_case("W*W = I", ww, 1e-12));
  out.push_back(make_case("H*H = diag(a)", hh, 1e-12));
  out.push_back(make_case("T*T = diag(a)", tt, 1e-12));
}

void fast_path_cases(const SelftestOptions& opts, std::vector<SelftestCase>& out) {
  Rng rng = make_rng(derive_seed(opts.seed, {2}));
  double mul = 0, adj = 0;
  for (Index n : {16, 64})
    for (Index K : {1, 4}) {
      const StructuredOps ops(n);
      for (int trial = 0; trial < 5; ++trial) {
        const Eigen::VectorXcd v = random_matrix(2 * n - 1, 1, rng);
        const Eigen::MatrixXcd a = random_matrix(n, K, rng), b = random_matrix(n, K, rng);
        for (Lift op : {Lift::hankel, Lift::toeplitz}) {
          const Eigen::MatrixXcd ref_mul = reference::lift_mul(ops, op, v, a);
          mul = std::max(mul, (ops.lift_mul(op, v, a) - ref_mul).norm() / ref_mul.norm());
          const Eigen::VectorXcd ref_adj = reference::adjoint_lowrank(ops, op, a, b);
          adj = std::max(adj, (ops.adjoint_lowrank(op, a, b) - ref_adj).norm() / ref_adj.norm());
        }
      }
    }
  out.push_back(make_case("fast lift_mul vs dense", mul, 1e-10));
  out.push_back(make_case("fast adjoint_lowrank vs dense", adj, 1e-10));
}

void gradient_cases(const SelftestOptions& opts, std::vector<SelftestCase>& out) {
  Rng rng = make_rng(derive_seed(opts.seed, {3}));
  double fd_f = 0, fd_g = 0, dense_f = 0, dense_g = 0;
  for (Index L : {2, 3})
    for (int trial = 0; trial < 3; ++trial) {
      const ProblemDims dims = ProblemDims::make(15, L, 2, 10);
      const SamplingMask mask = sample_mask(dims, derive_seed(opts.seed, {3, static_cast<std::uint64_t>(L), static_cast<std::uint64_t>(trial)}));
      const Eigen::MatrixXcd y = apply_mask(Eigen::MatrixXcd(random_matrix(dims.length(), L, rng)), mask);

      const MhtgdProblem pm(dims, mask, y);
      FactorSetM zm{random_like(FactorSetM::zeros(L, dims.n(), dims.K).set, rng)};
      fd_f = std::max(fd_f, fd_error(pm, zm.set, rng));
      const double fm = pm.objective(zm.set);
      dense_f = std::max(dense_f, std::abs(fm - reference::objective_f_dense(zm, y, mask, dims)) / fm);

      const ChtgdProblem pc(dims, mask, y);
      FactorSetC zc{random_like(FactorSetC::zeros(L, dims.n(), dims.K).set, rng)};
      fd_g = std::max(fd_g, fd_error(pc, zc.set, rng));
      const double fc = pc.objective(zc.set);
      dense_g = std::max(dense_g, std::abs(fc - reference::objective_g_dense(zc, y, mask, dims)) / fc);
    }
  out.push_back(make_case("grad f finite difference", fd_f, 1e-4));
  out.push_back(make_case("grad g finite difference", fd_g, 1e-4));
  out.push_back(make_case("objective f factored vs dense", dense_f, 1e-10));
  out.push_back(make_case("objective g factored vs dense", dense_g, 1e-10));
}

void construction_cases(const SelftestOptions& opts, std::vector<SelftestCase>& out) {
  double cons_m = 0, obj_m = 0, grad_m = 0, cons_c = 0, obj_c = 0, grad_c = 0;
  for (int trial = 0; trial < 5; ++trial) {
    const std::uint64_t s = derive_seed(opts.seed, {4, static_cast<std::uint64_t>(trial)});
    const ProblemDims dims = ProblemDims::make(33, 3, 4, 20);
    const SamplingMask mask = sample_mask(dims, derive_seed(s, {1}));
    const StructuredOps ops(dims.n());
    for (bool ca : {false, true}) {
      const SpectralModel model = random_model(dims, 1.5 / dims.N, ca, derive_seed(s, {0}));
      const Eigen::MatrixXcd x = synthesize(model, dims);
      const Eigen::MatrixXcd y = detail::weighted_observations(apply_mask(x, mask), mask, dims, ops);
      const double scale = apply_mask(y, mask).squaredNorm();
      if (!ca) {
        const FactorSetM z = reference::exact_factors(model, dims);
        const MhtgdProblem p(dims, mask, y);
        cons_m = std::max(cons_m, reference::constraint_residuals(z, dims).max());
        obj_m = std::max(obj_m, std::abs(p.objective(z.set)) / scale);
        grad_m = std::max(grad_m, std::sqrt(p.gradient(z.set).squared_norm()) / std::pow(z.set.squared_norm(), 1.5));
      } else {
        const FactorSetC z = reference::exact_factors_ca(model, dims);
        const ChtgdProblem p(dims, mask, y);
        cons_c = std::max(cons_c, reference::constraint_residuals_ca(z, dims).max());
        obj_c = std::max(obj_c, std::abs(p.objective(z.set)) / scale);
        grad_c = std::max(grad_c, std::sqrt(p.gradient(z.set).squared_norm()) / std::pow(z.set.squared_norm(), 1.5));
      }
    }
  }
  out.push_back(make_case("exact factors: constraints", cons_m, 1e-8));
  out.push_back(make_case("exact factors: objective f", obj_m, 1e-10));
  out.push_back(make_case("exact factors: grad f", grad_m, 1e-6));
  out.push_back(make_case("exact CA factors: constraints", cons_c, 1e-8));
  out.push_back(make_case("exact CA factors: objective g", obj_c, 1e-10));
  out.push_back(make_case("exact CA factors: grad g", grad_c, 1e-6));
}

}  // namespace

std::vector<SelftestCase> run_selftest(const SelftestOptions& opts) {
  std::vector<SelftestCase> out;
  operator_cases(opts, out);
  fast_path_cases(opts, out);
  gradient_cases(opts, out);
  construction_cases(opts, out);
  return out;
}

std::string format_selftest(const std::vector<SelftestCase>& cases) {
  std::ostringstream os;
  int failed = 0;
  for (const auto& c : cases) {
    os << (c.passed ? "PASS  " : "FAIL  ") << std::left << std::setw(34) << c.name << std::right
       << std::scientific << std::setprecision(2) << std::setw(10) << c.value << "  <= " << c.threshold << '\n';
    failed += c.passed ? 0 : 1;
  }
  os << cases.size() - failed << "/" << cases.size() << " checks passed\n";
  return os.str();
}

}  // namespace htgd
