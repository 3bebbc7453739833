#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace htgd {

struct SelftestCase {
  std::string name;
  bool passed = false;
  double value = 0;      ///< worst observed error
  double threshold = 0;  ///< pass iff value <= threshold
};

struct SelftestOptions {
  std::uint64_t seed = 1;
  /// Fault injection: perturb one entry of the weight vector used by the
  /// operator-identity checks. Those checks must then fail.
  bool corrupt_weights = false;
};

/// Operator identities, FFT-vs-dense products, finite-difference gradients
/// and exact-factor constructions at small sizes.
std::vector<SelftestCase> run_selftest(const SelftestOptions& opts = {});

/// Fixed-width table, one row per case, with a final summary line.
std::string format_selftest(const std::vector<SelftestCase>& cases);

}  // namespace htgd
