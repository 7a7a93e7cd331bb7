#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "wmod/cohesion.hpp"
#include "wmod/dynamics.hpp"

namespace wmod {

struct FeasibilityResult {
  bool feasible = false;
  /// A minimal cohesive set containing no pinned node, when infeasible.
  std::optional<NodeSet> witness;
};

/// Pinning drives every initial state to the target iff every cohesive set
/// holds a pinned node. Every cohesive set contains a minimal one, so it is
/// enough to test the minimal sets. Throws IncompleteReport.
FeasibilityResult pinning_feasible(const NodeSet& pinned, const CohesionReport& report);

struct PinningSolution {
  NodeSet pinned;
  std::size_t size = 0;
  bool certified_optimal = false;
  std::optional<NodeSet> uncovered_witness;
};

/// Minimum hitting set of report.minimal_cohesive_sets. A greedy cover seeds
/// the upper bound; branch and bound then branches on the smallest uncovered
/// set and prunes with the size of a disjoint packing of uncovered sets.
/// `budget` caps search nodes; if it runs out the best set found so far is
/// returned with certified_optimal = false. Throws IncompleteReport.
PinningSolution minimal_pinning_set(const CohesionReport& report,
                                    std::optional<std::uint64_t> budget = std::nullopt);

struct SimulationCheckOptions {
  double step = 0.01;
  double t_max = 500.0;
  double eq_tol = 1e-9;
  std::uint64_t seed = 0;
  /// Half-width of the box around the target used for random initial states.
  double spread = 5.0;
};

/// Integrates the pinned dynamics from `x0` and reports whether the final
/// state is within `tol` of target * 1 in the max norm.
bool reaches_target(const InfluenceMatrix& w, const PinningConfig& cfg, std::span<const double> x0,
                    double tol, const SimulationCheckOptions& options = {});

/// Fraction of `trials` uniform random initial states in
/// [target - spread, target + spread]^n that reach the target.
double verify_pinning_by_simulation(const InfluenceMatrix& w, const PinningConfig& cfg, int trials,
                                    double tol, const SimulationCheckOptions& options = {});

}  // namespace wmod
