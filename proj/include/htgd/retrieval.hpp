#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace htgd {

using Index = Eigen::Index;

struct FrequencyEstimate {
  std::vector<double> freqs;                ///< ascending, in [0, 1)
  std::optional<std::vector<Index>> pairing;  ///< pairing[i]: reference index matched to freqs[i]
  std::optional<double> max_wrap_error;
};

/// ESPRIT on the stacked Hankel lifts [H x_1, ..., H x_L]. An even row count
/// drops the last sample. Throws RankDeficient when sigma_K / sigma_1 < 1e-12.
FrequencyEstimate esprit(const Eigen::MatrixXcd& x, Index K);

struct FrequencyMatch {
  std::vector<Index> pairing;
  double max_wrap_error = 0;
};

/// Assignment minimizing the largest wrap distance: exhaustive for K <= 8,
/// best cyclic alignment of the sorted lists otherwise.
FrequencyMatch match_frequencies(const std::vector<double>& estimate, const std::vector<double>& reference);

/// ||est - truth||_F^2 / ||truth||_F^2. Throws InvalidArgument for zero truth.
double nmse(const Eigen::MatrixXcd& estimate, const Eigen::MatrixXcd& truth);

inline constexpr double kSuccessNmse = 1e-6;

}  // namespace htgd
