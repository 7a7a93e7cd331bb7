#pragma once

#include <span>

namespace wmod {

struct WilcoxonResult {
  /// Sum of the ranks of the positive differences a - b (W+).
  double statistic = 0.0;
  double p_value = 1.0;
  /// Pairs left after dropping zero differences.
  int n_used = 0;
  bool exact = false;
};

inline constexpr int kWilcoxonExactLimit = 20;

/// Two-sided Wilcoxon signed-rank test on paired samples. Zero differences
/// are dropped and tied magnitudes get mid-ranks. Up to kWilcoxonExactLimit
/// pairs the null distribution of W+ is computed exactly (ties included);
/// beyond that the normal approximation with tie and continuity correction
/// is used. Throws DimensionMismatch or AllZeroDifferences.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b);

}  // namespace wmod
