#include "wmod/control.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "wmod/error.hpp"
#include "wmod/rng.hpp"

namespace wmod {

namespace {

void require_complete(const CohesionReport& report) {
  if (!report.complete) {
    throw Error(ErrorKind::IncompleteReport, "cohesive-set enumeration was truncated");
  }
}

class HittingSetSearch {
 public:
  HittingSetSearch(std::vector<std::uint64_t> sets, std::uint64_t budget)
      : sets_(std::move(sets)), budget_(budget) {}

  std::uint64_t greedy() const {
    std::uint64_t chosen = 0;
    std::vector<std::uint64_t> uncovered = sets_;
    while (!uncovered.empty()) {
      int best = -1;
      int best_count = 0;
      for (int v = 0; v < 64; ++v) {
        const std::uint64_t bit = std::uint64_t{1} << v;
        int count = 0;
        for (std::uint64_t s : uncovered) count += (s & bit) ? 1 : 0;
        if (count > best_count) {
          best = v;
          best_count = count;
        }
      }
      chosen |= std::uint64_t{1} << best;
      std::erase_if(uncovered, [&](std::uint64_t s) { return (s & chosen) != 0; });
    }
    return chosen;
  }

  void solve() {
    best_ = greedy();
    best_size_ = std::popcount(best_);
    branch(0, 0, sets_);
  }

  std::uint64_t best() const { return best_; }
  bool exhausted() const { return exhausted_; }

 private:
  // Sets pairwise disjoint on the available nodes each need their own pin.
  static int packing_bound(const std::vector<std::uint64_t>& uncovered, std::uint64_t available) {
    std::vector<std::uint64_t> restricted;
    restricted.reserve(uncovered.size());
    for (std::uint64_t s : uncovered) restricted.push_back(s & available);
    std::sort(restricted.begin(), restricted.end(), [](std::uint64_t a, std::uint64_t b) {
      return std::popcount(a) < std::popcount(b);
    });
    std::uint64_t used = 0;
    int bound = 0;
    for (std::uint64_t s : restricted) {
      if ((s & used) == 0) {
        used |= s;
        ++bound;
      }
    }
    return bound;
  }

  void branch(std::uint64_t chosen, std::uint64_t excluded, const std::vector<std::uint64_t>& uncovered) {
    if (exhausted_) return;
    if (++nodes_ > budget_) {
      exhausted_ = true;
      return;
    }
    if (uncovered.empty()) {
      if (std::popcount(chosen) < best_size_) {
        best_ = chosen;
        best_size_ = std::popcount(chosen);
      }
      return;
    }
    const std::uint64_t available = ~excluded;
    const auto smallest = std::min_element(
        uncovered.begin(), uncovered.end(), [&](std::uint64_t a, std::uint64_t b) {
          return std::popcount(a & available) < std::popcount(b & available);
        });
    std::uint64_t candidates = *smallest & available;
    if (candidates == 0) return;
    if (std::popcount(chosen) + packing_bound(uncovered, available) >= best_size_) return;

    std::uint64_t branch_excluded = excluded;
    std::vector<std::uint64_t> rest;
    while (candidates) {
      const std::uint64_t bit = candidates & (~candidates + 1);
      candidates &= candidates - 1;
      rest.clear();
      for (std::uint64_t s : uncovered) {
        if (!(s & bit)) rest.push_back(s);
      }
      branch(chosen | bit, branch_excluded, rest);
      if (exhausted_) return;
      branch_excluded |= bit;
    }
  }

  std::vector<std::uint64_t> sets_;
  std::uint64_t budget_;
  std::uint64_t nodes_ = 0;
  std::uint64_t best_ = 0;
  int best_size_ = 0;
  bool exhausted_ = false;
};

}  // namespace

FeasibilityResult pinning_feasible(const NodeSet& pinned, const CohesionReport& report) {
  require_complete(report);
  for (const auto& set : report.minimal_cohesive_sets) {
    if (!set.intersects(pinned)) return {false, set};
  }
  return {true, std::nullopt};
}

PinningSolution minimal_pinning_set(const CohesionReport& report,
                                    std::optional<std::uint64_t> budget) {
  require_complete(report);
  std::vector<std::uint64_t> sets;
  for (const auto& s : report.minimal_cohesive_sets) sets.push_back(s.mask());
  HittingSetSearch search(std::move(sets), budget.value_or(std::numeric_limits<std::uint64_t>::max()));
  search.solve();

  PinningSolution solution;
  solution.pinned = NodeSet::from_mask(search.best());
  solution.size = solution.pinned.size();
  solution.certified_optimal = !search.exhausted();
  return solution;
}

bool reaches_target(const InfluenceMatrix& w, const PinningConfig& cfg, std::span<const double> x0,
                    double tol, const SimulationCheckOptions& options) {
  IntegratorOptions io;
  io.step = options.step;
  io.t_max = options.t_max;
  io.eq_tol = options.eq_tol;
  io.stride = std::numeric_limits<int>::max();
  const auto traj = integrate(x0, pinned_field(w, cfg), io);
  const auto& x = traj.final_state();
  return std::all_of(x.begin(), x.end(),
                     [&](double v) { return std::abs(v - cfg.target) < tol; });
}

double verify_pinning_by_simulation(const InfluenceMatrix& w, const PinningConfig& cfg, int trials,
                                    double tol, const SimulationCheckOptions& options) {
  if (trials < 1) throw Error(ErrorKind::ConfigInvalid, "trials must be positive");
  validate(cfg, w.n());
  Rng rng(options.seed);
  int successes = 0;
  OpinionState x0(static_cast<std::size_t>(w.n()));
  for (int t = 0; t < trials; ++t) {
    for (double& v : x0) v = rng.uniform(cfg.target - options.spread, cfg.target + options.spread);
    if (reaches_target(w, cfg, x0, tol, options)) ++successes;
  }
  return static_cast<double>(successes) / trials;
}

}  // namespace wmod
