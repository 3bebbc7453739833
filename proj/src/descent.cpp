#include "htgd/descent.hpp"

namespace htgd {

void SolverConfig::validate() const {
  if (!(tol > 0.0)) throw_invalid("tol must be positive");
  if (max_iter < 0) throw_invalid("max_iter must be non-negative");
  if (!(armijo.shrink > 0.0 && armijo.shrink < 1.0)) throw_invalid("Armijo shrink must lie in (0, 1)");
  if (!(armijo.sufficient > 0.0 && armijo.sufficient < 1.0)) throw_invalid("Armijo constant c must lie in (0, 1)");
  if (!(armijo.growth >= 1.0)) throw_invalid("Armijo growth must be >= 1");
  if (armijo.max_backtracks < 1) throw_invalid("max_backtracks must be >= 1");
  if (!(armijo.initial_step > 0.0)) throw_invalid("initial step must be positive");
  if (!(time_limit_s >= 0.0)) throw_invalid("time limit must be non-negative");
}

std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::converged: return "converged";
    case StopReason::max_iter: return "max_iter";
    case StopReason::line_search_failure: return "line_search_failure";
    case StopReason::numerical_failure: return "numerical_failure";
    case StopReason::time_limit: return "time_limit";
  }
  return "unknown";
}

double FactorSet::squared_norm() const {
  double s = 0.0;
  for (const auto& b : blocks) s += b.squaredNorm();
  return s;
}

bool FactorSet::all_finite() const {
  for (const auto& b : blocks)
    if (!b.allFinite()) return false;
  return true;
}

FactorSet FactorSet::stepped(double eta, const FactorSet& g) const {
  if (g.blocks.size() != blocks.size()) throw_invalid("factor sets differ in block count");
  FactorSet out;
  out.blocks.reserve(blocks.size());
  for (std::size_t i = 0; i < blocks.size(); ++i) out.blocks.push_back(blocks[i] - eta * g.blocks[i]);
  return out;
}

double inner_real(const FactorSet& a, const FactorSet& b) {
  if (a.blocks.size() != b.blocks.size()) throw_invalid("factor sets differ in block count");
  double s = 0.0;
  for (std::size_t i = 0; i < a.blocks.size(); ++i)
    s += (a.blocks[i].array().conjugate() * b.blocks[i].array()).real().sum();
  return s;
}

}  // namespace htgd
