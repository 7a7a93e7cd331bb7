#include "wmod/median.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wmod/error.hpp"

namespace wmod {

namespace {

struct Group {
  double value;
  double weight;
};

struct MedianRange {
  std::size_t lo;  // index of the smallest median group
  std::size_t hi;  // index of the largest median group
};

// `groups` holds distinct values in increasing order. The weight strictly
// below group k is summed from the bottom and the weight strictly above from
// the top, so each comparison against 1/2 sees an exact partial sum.
MedianRange median_range(std::span<const Group> groups, double tolerance) {
  const std::size_t m = groups.size();
  const double half = 0.5 + tolerance;

  std::size_t lo = m;
  double above = 0.0;
  std::vector<double> above_of(m);
  for (std::size_t k = m; k-- > 0;) {
    above_of[k] = above;
    above += groups[k].weight;
  }
  for (std::size_t k = 0; k < m; ++k) {
    if (above_of[k] <= half) {
      lo = k;
      break;
    }
  }
  std::size_t hi = m;
  double below = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    if (below <= half) hi = k;
    below += groups[k].weight;
  }
  if (lo < m && hi < m && lo <= hi) return {lo, hi};

  // Only reachable when the weights sum to slightly more than 1; fall back to
  // the most balanced split.
  std::size_t best = 0;
  double best_score = INFINITY;
  below = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double score = std::max(below, above_of[k]);
    if (score < best_score) {
      best_score = score;
      best = k;
    }
    below += groups[k].weight;
  }
  return {best, best};
}

void collect_groups(std::vector<std::pair<double, double>>& pairs, std::vector<Group>& groups) {
  std::sort(pairs.begin(), pairs.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  groups.clear();
  for (const auto& [value, weight] : pairs) {
    if (!groups.empty() && groups.back().value == value) {
      groups.back().weight += weight;
    } else {
      groups.push_back({value, weight});
    }
  }
}

}  // namespace

MedianResult weighted_median(std::span<const double> values, std::span<const double> weights,
                             double anchor, double tolerance) {
  if (values.empty()) throw Error(ErrorKind::EmptyInput, "weighted median of an empty tuple");
  if (values.size() != weights.size()) {
    throw Error(ErrorKind::DimensionMismatch, "values and weights differ in length");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(ErrorKind::WeightSumInvalid, "weights must be finite and nonnegative");
    }
    total += w;
  }
  if (std::abs(total - 1.0) > kRowSumTolerance) {
    throw Error(ErrorKind::WeightSumInvalid, "weights sum to " + format_double(total));
  }

  std::vector<std::pair<double, double>> pairs;
  pairs.reserve(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) pairs.emplace_back(values[k], weights[k]);
  std::vector<Group> groups;
  collect_groups(pairs, groups);

  const auto [lo, hi] = median_range(groups, tolerance);
  if (lo == hi) return {groups[lo].value, std::nullopt};

  const TieInterval tie{groups[lo].value, groups[hi].value};
  double value;
  if (anchor <= tie.smallest) {
    value = tie.smallest;
  } else if (anchor >= tie.largest) {
    value = tie.largest;
  } else {
    // Every tuple value inside the interval is a median; pick the nearest.
    const auto first = groups.begin() + static_cast<std::ptrdiff_t>(lo);
    const auto last = groups.begin() + static_cast<std::ptrdiff_t>(hi) + 1;
    const auto upper = std::lower_bound(first, last, anchor,
                                        [](const Group& g, double a) { return g.value < a; });
    const auto lower = std::prev(upper);
    value = (upper->value - anchor < anchor - lower->value) ? upper->value : lower->value;
  }
  return {value, tie};
}

MedianOperator::MedianOperator(const InfluenceMatrix& w) : neighbors_(w.n()) {
  for (int i = 0; i < w.n(); ++i) {
    const auto row = w.row(i);
    for (int j = 0; j < w.n(); ++j) {
      if (row[j] > 0.0) neighbors_[i].push_back({j, row[j]});
    }
  }
}

double MedianOperator::apply_row(int i, std::span<const double> x) const {
  const auto& nbrs = neighbors_[i];
  std::vector<std::pair<double, double>> pairs;
  pairs.reserve(nbrs.size());
  for (const auto& e : nbrs) pairs.emplace_back(x[e.node], e.weight);
  std::vector<Group> groups;
  groups.reserve(nbrs.size());
  collect_groups(pairs, groups);
  const auto [lo, hi] = median_range(groups, 0.0);
  // Zero-weight entries can only be medians strictly inside the tie interval,
  // and x_i is an entry of the tuple, so clamping is the closest median.
  return std::clamp(x[i], groups[lo].value, groups[hi].value);
}

void MedianOperator::apply(std::span<const double> x, std::span<double> out) const {
  if (x.size() != neighbors_.size() || out.size() != neighbors_.size()) {
    throw Error(ErrorKind::DimensionMismatch, "state length " + std::to_string(x.size()) +
                                                  " does not match n=" +
                                                  std::to_string(neighbors_.size()));
  }
  for (int i = 0; i < n(); ++i) out[i] = apply_row(i, x);
}

OpinionState median_operator(std::span<const double> x, const InfluenceMatrix& w) {
  OpinionState out(x.size());
  MedianOperator(w).apply(x, out);
  return out;
}

}  // namespace wmod
