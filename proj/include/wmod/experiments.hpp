#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "wmod/net.hpp"

namespace wmod {

struct SweepConfig {
  GraphModel family = GraphModel::ErdosRenyi;
  int n = 15;
  std::vector<double> params;
  int replicates = 30;
  int mean_out_degree = 4;  // WS only
  std::uint64_t seed = 1;
  /// Search-node cap for cohesive-set enumeration (and for the hitting-set
  /// search) per replicate.
  std::uint64_t enumeration_budget = 50'000'000;
};

void validate(const SweepConfig& cfg);

struct SweepPoint {
  double param = 0.0;
  double mean = 0.0;
  /// Sample standard deviation (n - 1 denominator; 0 for one sample).
  double sd = 0.0;
  /// 1.96 * sd / sqrt(number of counted replicates).
  double ci95 = 0.0;
  /// Replicates dropped because a search budget ran out.
  int truncated_count = 0;
  /// Minimal pinning numbers of the counted replicates, in replicate order.
  std::vector<int> values;
};

struct SweepResult {
  SweepConfig config;
  std::vector<SweepPoint> points;
};

/// Replicate r of parameter k uses the network seed derive_seed(seed, k, r),
/// so any sweep point can be rerun on its own. Output does not depend on
/// `jobs`.
SweepResult run_sweep(const SweepConfig& cfg, int jobs = 1);

/// Pinning number of a single network, or -1 if a budget ran out.
int minimal_pinning_number(const InfluenceMatrix& w, std::uint64_t budget);

/// True when every decrease between consecutive points happens between
/// points whose 95% confidence intervals overlap.
bool non_decreasing_up_to_ci(const SweepResult& result);

/// CSV with header `param,mean,sd,ci95,truncated_count`.
void write_sweep_csv(const SweepResult& result, std::ostream& out);

}  // namespace wmod
