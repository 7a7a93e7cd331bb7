#include "wmod/experiments.hpp"

#include <atomic>
#include <cmath>
#include <ostream>
#include <thread>

#include "wmod/cohesion.hpp"
#include "wmod/control.hpp"
#include "wmod/error.hpp"
#include "wmod/rng.hpp"

namespace wmod {

void validate(const SweepConfig& cfg) {
  if (cfg.replicates < 1) throw Error(ErrorKind::ConfigInvalid, "replicates must be at least 1");
  if (cfg.params.empty()) throw Error(ErrorKind::ConfigInvalid, "no sweep parameters given");
  if (cfg.n > 64) throw Error(ErrorKind::ConfigInvalid, "sweeps support at most 64 nodes");
  for (double p : cfg.params) {
    GraphGenConfig g{cfg.family, cfg.n, p, cfg.mean_out_degree, 0};
    validate(g);
  }
}

int minimal_pinning_number(const InfluenceMatrix& w, std::uint64_t budget) {
  const auto report = enumerate_minimal_cohesive(w, budget);
  if (!report.complete) return -1;
  const auto solution = minimal_pinning_set(report, budget);
  return solution.certified_optimal ? static_cast<int>(solution.size) : -1;
}

SweepResult run_sweep(const SweepConfig& cfg, int jobs) {
  validate(cfg);
  const std::size_t n_params = cfg.params.size();
  const std::size_t reps = static_cast<std::size_t>(cfg.replicates);
  std::vector<int> outcome(n_params * reps, 0);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t task = next++; task < outcome.size(); task = next++) {
      const std::size_t k = task / reps;
      const std::size_t r = task % reps;
      GraphGenConfig g{cfg.family, cfg.n, cfg.params[k], cfg.mean_out_degree,
                       derive_seed(cfg.seed, k, r)};
      outcome[task] = minimal_pinning_number(gen_network(g), cfg.enumeration_budget);
    }
  };
  const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(outcome.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  SweepResult result;
  result.config = cfg;
  for (std::size_t k = 0; k < n_params; ++k) {
    SweepPoint point;
    point.param = cfg.params[k];
    for (std::size_t r = 0; r < reps; ++r) {
      const int v = outcome[k * reps + r];
      if (v < 0) {
        ++point.truncated_count;
      } else {
        point.values.push_back(v);
      }
    }
    const auto m = point.values.size();
    if (m == 0) {
      point.mean = point.sd = point.ci95 = std::nan("");
    } else {
      double sum = 0.0;
      for (int v : point.values) sum += v;
      point.mean = sum / static_cast<double>(m);
      double ss = 0.0;
      for (int v : point.values) ss += (v - point.mean) * (v - point.mean);
      point.sd = m > 1 ? std::sqrt(ss / static_cast<double>(m - 1)) : 0.0;
      point.ci95 = 1.96 * point.sd / std::sqrt(static_cast<double>(m));
    }
    result.points.push_back(std::move(point));
  }
  return result;
}

bool non_decreasing_up_to_ci(const SweepResult& result) {
  for (std::size_t k = 1; k < result.points.size(); ++k) {
    const auto& a = result.points[k - 1];
    const auto& b = result.points[k];
    if (b.mean >= a.mean) continue;
    const bool overlap = b.mean + b.ci95 >= a.mean - a.ci95;
    if (!overlap) return false;
  }
  return true;
}

void write_sweep_csv(const SweepResult& result, std::ostream& out) {
  out << "param,mean,sd,ci95,truncated_count\n";
  for (const auto& p : result.points) {
    out << format_double(p.param) << ',' << format_double(p.mean) << ',' << format_double(p.sd)
        << ',' << format_double(p.ci95) << ',' << p.truncated_count << '\n';
  }
}

}  // namespace wmod
