#pragma once

#include <functional>
#include <span>
#include <vector>

#include "wmod/cohesion.hpp"
#include "wmod/median.hpp"
#include "wmod/net.hpp"

namespace wmod {

/// Distinct opinion levels of a state, largest first. level_sets[k] holds the
/// nodes at levels[k]; prefixes and suffixes of this list are the "top r" and
/// "bottom" groups used by the equilibrium test.
struct OrderStatistics {
  std::vector<double> levels;
  std::vector<NodeSet> level_sets;

  int n_diff() const noexcept { return static_cast<int>(levels.size()); }
  /// Union of the r highest levels (r is 1-based).
  NodeSet top(int r) const;
  /// Union of levels r..n_diff (r is 1-based).
  NodeSet from(int r) const;
};

/// Groups sorted values by single linkage: neighbours at most `cluster_tol`
/// apart share a level. Each level is reported as the mean of its values.
OrderStatistics order_statistics(std::span<const double> x, double cluster_tol = 0.0);

/// f(x) = Med(x; W) - x.
OpinionState ctwm_rhs(std::span<const double> x, const InfluenceMatrix& w);

struct PinningConfig {
  NodeSet pinned;
  std::vector<double> gamma;
  double target = 0.0;

  /// gamma_i = `gamma` on pinned nodes and 0 elsewhere.
  static PinningConfig uniform(int n, NodeSet pinned, double gamma, double target);
};

void validate(const PinningConfig& cfg, int n);

enum class PinnedForm {
  /// x_i' = g_i u + (1 - g_i) Med_i - x_i. u 1 is an equilibrium.
  Relaxed,
  /// x_i' = g_i u + (1 - g_i)(Med_i - x_i). Kept for comparison only.
  Scaled,
};

OpinionState pinned_rhs(std::span<const double> x, const InfluenceMatrix& w,
                        const PinningConfig& cfg, PinnedForm form = PinnedForm::Relaxed);

/// out = rhs(x). Must be deterministic and must not retain the spans.
using VectorField = std::function<void(std::span<const double>, std::span<double>)>;

VectorField ctwm_field(const InfluenceMatrix& w);
VectorField pinned_field(const InfluenceMatrix& w, const PinningConfig& cfg,
                         PinnedForm form = PinnedForm::Relaxed);

enum class Method { RungeKutta4, Euler };

struct IntegratorOptions {
  double step = 0.01;
  double t_max = 100.0;
  double eq_tol = 1e-9;
  /// Store every `stride`-th step (the final state is always stored).
  int stride = 1;
  /// Residual must stay below eq_tol for this many consecutive steps.
  int consecutive = 3;
  Method method = Method::RungeKutta4;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<OpinionState> states;
  bool converged = false;
  /// ||rhs(final state)||_inf
  double residual = 0.0;

  const OpinionState& final_state() const { return states.back(); }
  double final_time() const { return times.back(); }
};

/// Fixed-step integration until the residual ||rhs(x)||_inf has been below
/// eq_tol for `consecutive` successive steps or t_max is reached. A state
/// whose residual is exactly zero is a fixed point and ends the run at once.
/// Throws ConfigInvalid for bad options and NonFiniteState on blow-up.
Trajectory integrate(std::span<const double> x0, const VectorField& rhs,
                     const IntegratorOptions& options = {});

enum class EquilibriumClass { Consensus, DisagreementEquilibrium, NotEquilibrium };

std::string to_string(EquilibriumClass c);

struct EquilibriumReport {
  std::vector<double> levels;
  std::vector<NodeSet> level_sets;
  /// prefix_maximal[r-1]: the r highest levels form a maximal cohesive set.
  std::vector<bool> prefix_maximal;
  EquilibriumClass classification = EquilibriumClass::NotEquilibrium;
};

inline constexpr double kDefaultClusterTol = 1e-5;

EquilibriumReport classify_equilibrium(std::span<const double> x, const InfluenceMatrix& w,
                                       double cluster_tol = kDefaultClusterTol);

}  // namespace wmod
