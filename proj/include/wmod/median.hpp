#pragma once

#include <optional>
#include <span>
#include <vector>

#include "wmod/net.hpp"

namespace wmod {

using OpinionState = std::vector<double>;

struct TieInterval {
  double smallest;
  double largest;
};

struct MedianResult {
  double value;
  /// Set when the weighted median is not unique.
  std::optional<TieInterval> tie;

  bool unique() const noexcept { return !tie.has_value(); }
};

/// Weighted median of `values` under `weights` (nonnegative, summing to 1).
///
/// A candidate z is a median when the weight strictly below z and the weight
/// strictly above z are each at most 1/2. Comparisons against 1/2 are exact
/// unless `tolerance` is raised. When several medians exist the one closest
/// to `anchor` is returned; ties in distance go to the smaller candidate
/// (impossible when `anchor` is itself one of the values).
///
/// Throws EmptyInput, DimensionMismatch or WeightSumInvalid.
MedianResult weighted_median(std::span<const double> values, std::span<const double> weights,
                             double anchor, double tolerance = 0.0);

/// Med(x; W): entry i is the weighted median of x under row i of W, with ties
/// resolved towards x_i.
OpinionState median_operator(std::span<const double> x, const InfluenceMatrix& w);

/// Same as median_operator() but writes into `out` and reuses the neighbour
/// lists of `w`; this is the form the integrator calls.
class MedianOperator {
 public:
  explicit MedianOperator(const InfluenceMatrix& w);

  int n() const noexcept { return static_cast<int>(neighbors_.size()); }
  void apply(std::span<const double> x, std::span<double> out) const;
  double apply_row(int i, std::span<const double> x) const;

 private:
  struct Entry {
    int node;
    double weight;
  };
  std::vector<std::vector<Entry>> neighbors_;
};

}  // namespace wmod
