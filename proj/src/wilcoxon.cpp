#include "wmod/wilcoxon.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "wmod/error.hpp"

namespace wmod {

namespace {

struct Ranked {
  std::vector<long> doubled_ranks;  // 2 * mid-rank, always an integer
  std::vector<bool> positive;
  double tie_term = 0.0;  // sum of t^3 - t over tie groups
};

Ranked rank_differences(const std::vector<double>& diffs) {
  const std::size_t n = diffs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return std::abs(diffs[x]) < std::abs(diffs[y]); });
  Ranked r;
  r.doubled_ranks.assign(n, 0);
  r.positive.assign(n, false);
  for (std::size_t k = 0; k < n;) {
    std::size_t end = k + 1;
    while (end < n && std::abs(diffs[order[end]]) == std::abs(diffs[order[k]])) ++end;
    // ranks k+1 .. end share the mid-rank (k + 1 + end) / 2
    const long doubled = static_cast<long>(k + 1 + end);
    for (std::size_t m = k; m < end; ++m) r.doubled_ranks[order[m]] = doubled;
    const double t = static_cast<double>(end - k);
    r.tie_term += t * t * t - t;
    k = end;
  }
  for (std::size_t i = 0; i < n; ++i) r.positive[i] = diffs[i] > 0.0;
  return r;
}

double exact_two_sided(const Ranked& r, long observed_doubled) {
  const long total = std::accumulate(r.doubled_ranks.begin(), r.doubled_ranks.end(), 0L);
  // counts[s]: number of sign assignments whose positive doubled-rank sum is s
  std::vector<double> counts(static_cast<std::size_t>(total) + 1, 0.0);
  counts[0] = 1.0;
  long reach = 0;
  for (long rank : r.doubled_ranks) {
    for (long s = reach; s >= 0; --s) counts[s + rank] += counts[s];
    reach += rank;
  }
  const double all = std::ldexp(1.0, static_cast<int>(r.doubled_ranks.size()));
  double lower = 0.0, upper = 0.0;
  for (long s = 0; s <= total; ++s) {
    if (s <= observed_doubled) lower += counts[s];
    if (s >= observed_doubled) upper += counts[s];
  }
  return std::min(1.0, 2.0 * std::min(lower, upper) / all);
}

}  // namespace

WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorKind::DimensionMismatch, "paired samples differ in length");
  std::vector<double> diffs;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    if (d != 0.0) diffs.push_back(d);
  }
  if (diffs.empty()) throw Error(ErrorKind::AllZeroDifferences, "all paired differences are zero");

  const Ranked r = rank_differences(diffs);
  long observed = 0;
  for (std::size_t i = 0; i < diffs.size(); ++i) {
    if (r.positive[i]) observed += r.doubled_ranks[i];
  }

  WilcoxonResult result;
  result.n_used = static_cast<int>(diffs.size());
  result.statistic = static_cast<double>(observed) / 2.0;
  if (result.n_used <= kWilcoxonExactLimit) {
    result.exact = true;
    result.p_value = exact_two_sided(r, observed);
    return result;
  }
  const double n = result.n_used;
  const double mean = n * (n + 1.0) / 4.0;
  const double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - r.tie_term / 48.0;
  if (var <= 0.0) {
    result.p_value = 1.0;
    return result;
  }
  const double deviation = std::max(0.0, std::abs(result.statistic - mean) - 0.5);
  const double z = deviation / std::sqrt(var);
  result.p_value = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  return result;
}

}  // namespace wmod
