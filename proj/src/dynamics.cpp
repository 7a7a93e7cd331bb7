#include "wmod/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "wmod/error.hpp"

namespace wmod {

NodeSet OrderStatistics::top(int r) const {
  std::vector<int> out;
  for (int k = 0; k < r && k < n_diff(); ++k) {
    out.insert(out.end(), level_sets[k].begin(), level_sets[k].end());
  }
  return NodeSet(std::move(out));
}

NodeSet OrderStatistics::from(int r) const {
  std::vector<int> out;
  for (int k = std::max(r, 1) - 1; k < n_diff(); ++k) {
    out.insert(out.end(), level_sets[k].begin(), level_sets[k].end());
  }
  return NodeSet(std::move(out));
}

OrderStatistics order_statistics(std::span<const double> x, double cluster_tol) {
  for (double v : x) {
    if (!std::isfinite(v)) throw Error(ErrorKind::NonFiniteState, "state has a non-finite entry");
  }
  std::vector<int> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return x[a] > x[b]; });

  OrderStatistics stats;
  std::vector<int> members;
  double sum = 0.0;
  auto flush = [&] {
    if (members.empty()) return;
    const double hi = x[members.front()];
    const double lo = x[members.back()];
    stats.levels.push_back(hi == lo ? hi : sum / static_cast<double>(members.size()));
    stats.level_sets.emplace_back(members);
    members.clear();
    sum = 0.0;
  };
  for (int i : order) {
    if (!members.empty() && x[members.back()] - x[i] > cluster_tol) flush();
    members.push_back(i);
    sum += x[i];
  }
  flush();
  return stats;
}

OpinionState ctwm_rhs(std::span<const double> x, const InfluenceMatrix& w) {
  if (static_cast<int>(x.size()) != w.n()) {
    throw Error(ErrorKind::DimensionMismatch, "state length does not match the matrix");
  }
  OpinionState out = median_operator(x, w);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= x[i];
  return out;
}

PinningConfig PinningConfig::uniform(int n, NodeSet pinned, double gamma, double target) {
  PinningConfig cfg;
  cfg.gamma.assign(static_cast<std::size_t>(n), 0.0);
  for (int i : pinned) {
    if (i < n) cfg.gamma[i] = gamma;
  }
  cfg.pinned = std::move(pinned);
  cfg.target = target;
  return cfg;
}

void validate(const PinningConfig& cfg, int n) {
  if (static_cast<int>(cfg.gamma.size()) != n) {
    throw Error(ErrorKind::DimensionMismatch, "gamma has the wrong length");
  }
  if (!cfg.pinned.empty() && cfg.pinned.members().back() >= n) {
    throw Error(ErrorKind::ConfigInvalid, "pinned node out of range");
  }
  if (!std::isfinite(cfg.target)) throw Error(ErrorKind::ConfigInvalid, "target must be finite");
  for (int i = 0; i < n; ++i) {
    const double g = cfg.gamma[i];
    if (cfg.pinned.contains(i)) {
      if (!(g > 0.0 && g <= 1.0)) {
        throw Error(ErrorKind::ConfigInvalid, "gamma of pinned node " + std::to_string(i) + " must lie in (0,1]");
      }
    } else if (g != 0.0) {
      throw Error(ErrorKind::ConfigInvalid, "gamma of unpinned node " + std::to_string(i) + " must be 0");
    }
  }
}

namespace {

void pinned_apply(const MedianOperator& med, const PinningConfig& cfg, PinnedForm form,
                  std::span<const double> x, std::span<double> out) {
  med.apply(x, out);
  const double u = cfg.target;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double g = cfg.gamma[i];
    // g u + (1 - g) m - x, arranged so that x = m = u gives exactly 0
    out[i] = form == PinnedForm::Relaxed ? g * (u - out[i]) + (out[i] - x[i])
                                         : g * u + (1.0 - g) * (out[i] - x[i]);
  }
}

}  // namespace

OpinionState pinned_rhs(std::span<const double> x, const InfluenceMatrix& w,
                        const PinningConfig& cfg, PinnedForm form) {
  if (static_cast<int>(x.size()) != w.n()) {
    throw Error(ErrorKind::DimensionMismatch, "state length does not match the matrix");
  }
  validate(cfg, w.n());
  OpinionState out(x.size());
  pinned_apply(MedianOperator(w), cfg, form, x, out);
  return out;
}

VectorField ctwm_field(const InfluenceMatrix& w) {
  return [med = MedianOperator(w)](std::span<const double> x, std::span<double> out) {
    med.apply(x, out);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= x[i];
  };
}

VectorField pinned_field(const InfluenceMatrix& w, const PinningConfig& cfg, PinnedForm form) {
  validate(cfg, w.n());
  return [med = MedianOperator(w), cfg, form](std::span<const double> x, std::span<double> out) {
    pinned_apply(med, cfg, form, x, out);
  };
}

namespace {

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double e : v) m = std::max(m, std::abs(e));
  return m;
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double e) { return std::isfinite(e); });
}

}  // namespace

Trajectory integrate(std::span<const double> x0, const VectorField& rhs,
                     const IntegratorOptions& options) {
  if (!(options.step > 0.0 && options.step <= 0.1)) {
    throw Error(ErrorKind::ConfigInvalid, "step must lie in (0, 0.1]");
  }
  if (!(options.eq_tol > 0.0)) throw Error(ErrorKind::ConfigInvalid, "eq_tol must be positive");
  if (!(options.t_max >= 0.0)) throw Error(ErrorKind::ConfigInvalid, "t_max must be nonnegative");
  if (options.stride < 1 || options.consecutive < 1) {
    throw Error(ErrorKind::ConfigInvalid, "stride and consecutive must be positive");
  }
  if (!all_finite(x0)) throw Error(ErrorKind::NonFiniteState, "initial state is not finite");

  const std::size_t n = x0.size();
  const double h = options.step;
  const auto max_steps = static_cast<long long>(std::ceil(options.t_max / h - 1e-9));

  OpinionState x(x0.begin(), x0.end());
  OpinionState k1(n), k2(n), k3(n), k4(n), tmp(n);

  Trajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(x);

  long long step = 0;
  int hits = 0;
  while (true) {
    rhs(x, k1);
    traj.residual = max_abs(k1);
    if (traj.residual == 0.0) {
      traj.converged = true;
      break;
    }
    if (traj.residual < options.eq_tol) {
      if (++hits >= options.consecutive) {
        traj.converged = true;
        break;
      }
    } else {
      hits = 0;
    }
    if (step >= max_steps) break;

    if (options.method == Method::Euler) {
      for (std::size_t i = 0; i < n; ++i) x[i] += h * k1[i];
    } else {
      for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
      rhs(tmp, k2);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
      rhs(tmp, k3);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
      rhs(tmp, k4);
      for (std::size_t i = 0; i < n; ++i) {
        x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      }
    }
    ++step;
    if (!all_finite(x)) {
      throw Error(ErrorKind::NonFiniteState, "state diverged at t=" + format_double(step * h));
    }
    if (step % options.stride == 0) {
      traj.times.push_back(static_cast<double>(step) * h);
      traj.states.push_back(x);
    }
  }
  const double t_end = static_cast<double>(step) * h;
  if (traj.times.back() != t_end) {
    traj.times.push_back(t_end);
    traj.states.push_back(x);
  }
  return traj;
}

std::string to_string(EquilibriumClass c) {
  switch (c) {
    case EquilibriumClass::Consensus: return "Consensus";
    case EquilibriumClass::DisagreementEquilibrium: return "DisagreementEquilibrium";
    case EquilibriumClass::NotEquilibrium: return "NotEquilibrium";
  }
  return "Unknown";
}

EquilibriumReport classify_equilibrium(std::span<const double> x, const InfluenceMatrix& w,
                                       double cluster_tol) {
  if (static_cast<int>(x.size()) != w.n()) {
    throw Error(ErrorKind::DimensionMismatch, "state length does not match the matrix");
  }
  auto stats = order_statistics(x, cluster_tol);
  EquilibriumReport report;
  bool all_maximal = true;
  for (int r = 1; r <= stats.n_diff(); ++r) {
    const NodeSet upper = stats.top(r);
    const bool maximal = is_cohesive(upper, w) && is_maximal_cohesive(upper, w);
    report.prefix_maximal.push_back(maximal);
    all_maximal = all_maximal && maximal;
  }
  if (stats.n_diff() == 1) {
    report.classification = EquilibriumClass::Consensus;
  } else {
    report.classification = all_maximal ? EquilibriumClass::DisagreementEquilibrium
                                        : EquilibriumClass::NotEquilibrium;
  }
  report.levels = std::move(stats.levels);
  report.level_sets = std::move(stats.level_sets);
  return report;
}

}  // namespace wmod
