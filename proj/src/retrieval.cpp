#include "htgd/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "htgd/errors.hpp"
#include "htgd/linalg.hpp"
#include "htgd/signal_model.hpp"
#include "htgd/structured_ops.hpp"

namespace htgd {

FrequencyEstimate esprit(const Eigen::MatrixXcd& x, Index K) {
  const Index len = x.rows() % 2 == 1 ? x.rows() : x.rows() - 1;
  const Index n = (len + 1) / 2;
  if (len < 1 || x.cols() < 1) throw_invalid("esprit: empty signal");
  if (K < 1 || K >= n) throw_invalid("esprit: need 1 <= K < n");

  Eigen::MatrixXcd stacked(n, n * x.cols());
  for (Index l = 0; l < x.cols(); ++l) stacked.middleCols(l * n, n) = hankel_lift(x.col(l).head(len));

  const TruncatedSvd svd = thin_svd(stacked);
  const Eigen::VectorXd& s = svd.sigma;
  if (!(s(0) > 0.0) || s(K - 1) / s(0) < 1e-12) throw RankDeficient("esprit: signal subspace has rank below K");
  const Eigen::MatrixXcd us = svd.U.leftCols(K);

  // Shift invariance: us[1:] = us[:-1] Psi, eigenvalues of Psi are exp(-i 2 pi f).
  const Eigen::MatrixXcd psi = us.topRows(n - 1).completeOrthogonalDecomposition().solve(us.bottomRows(n - 1));
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(psi, false);
  if (es.info() != Eigen::Success) throw NumericalFailure("esprit: eigen solver failed");

  FrequencyEstimate out;
  for (Index k = 0; k < K; ++k) {
    double f = -std::arg(es.eigenvalues()(k)) / (2.0 * std::numbers::pi);
    f -= std::floor(f);
    if (f >= 1.0) f = 0.0;
    out.freqs.push_back(f);
  }
  std::sort(out.freqs.begin(), out.freqs.end());
  return out;
}

FrequencyMatch match_frequencies(const std::vector<double>& estimate, const std::vector<double>& reference) {
  if (estimate.size() != reference.size()) throw_invalid("match_frequencies: lists differ in length");
  const std::size_t k = estimate.size();
  FrequencyMatch best;
  best.max_wrap_error = INFINITY;
  if (k == 0) {
    best.max_wrap_error = 0.0;
    return best;
  }
  auto cost = [&](const std::vector<Index>& perm) {
    double worst = 0.0;
    for (std::size_t i = 0; i < k; ++i)
      worst = std::max(worst, wrap_distance(estimate[i], reference[static_cast<std::size_t>(perm[i])]));
    return worst;
  };

  if (k <= 8) {
    std::vector<Index> perm(k);
    std::iota(perm.begin(), perm.end(), Index{0});
    do {
      const double c = cost(perm);
      if (c < best.max_wrap_error) best = {perm, c};
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
  }

  std::vector<Index> est_order(k), ref_order(k);
  std::iota(est_order.begin(), est_order.end(), Index{0});
  std::iota(ref_order.begin(), ref_order.end(), Index{0});
  std::sort(est_order.begin(), est_order.end(), [&](Index a, Index b) { return estimate[static_cast<std::size_t>(a)] < estimate[static_cast<std::size_t>(b)]; });
  std::sort(ref_order.begin(), ref_order.end(), [&](Index a, Index b) { return reference[static_cast<std::size_t>(a)] < reference[static_cast<std::size_t>(b)]; });
  for (std::size_t shift = 0; shift < k; ++shift) {
    std::vector<Index> perm(k);
    for (std::size_t i = 0; i < k; ++i)
      perm[static_cast<std::size_t>(est_order[i])] = ref_order[(i + shift) % k];
    const double c = cost(perm);
    if (c < best.max_wrap_error) best = {perm, c};
  }
  return best;
}

double nmse(const Eigen::MatrixXcd& estimate, const Eigen::MatrixXcd& truth) {
  if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols()) throw_invalid("nmse: shape mismatch");
  const double denom = truth.squaredNorm();
  if (!(denom > 0.0)) throw_invalid("nmse: reference signal is zero");
  return (estimate - truth).squaredNorm() / denom;
}

}  // namespace htgd
