#include "wmod/serialize.hpp"

#include <ostream>

#include "wmod/net.hpp"

namespace wmod {

using nlohmann::json;

json to_json(const NodeSet& s) { return s.members(); }

NodeSet node_set_from_json(const json& j) { return NodeSet(j.get<std::vector<int>>()); }

json to_json(const CohesionReport& r) {
  json sets = json::array();
  for (const auto& s : r.minimal_cohesive_sets) sets.push_back(to_json(s));
  return {{"minimal_cohesive_sets", sets},
          {"only_global_maximal", r.only_global_maximal},
          {"complete", r.complete}};
}

json to_json(const PinningSolution& s) {
  json j{{"pinned", to_json(s.pinned)}, {"size", s.size}, {"certified_optimal", s.certified_optimal}};
  if (s.uncovered_witness) j["uncovered_witness"] = to_json(*s.uncovered_witness);
  return j;
}

json to_json(const EquilibriumReport& r) {
  json sets = json::array();
  for (const auto& s : r.level_sets) sets.push_back(to_json(s));
  return {{"classification", to_string(r.classification)},
          {"n_diff", r.levels.size()},
          {"levels", r.levels},
          {"level_sets", sets},
          {"prefix_maximal", r.prefix_maximal}};
}

json to_json(const DecisiveGraph& g) {
  json edges = json::array();
  for (int i = 0; i < g.n; ++i) {
    for (int j : g.successors[i]) edges.push_back({i, j});
  }
  json sinks = json::array();
  for (const auto& s : sink_components(g)) sinks.push_back(to_json(s));
  return {{"n", g.n}, {"edges", edges}, {"sink_components", sinks},
          {"has_globally_reachable_node", sinks.size() == 1}};
}

json to_json(const SweepConfig& c) {
  return {{"family", to_string(c.family)},
          {"n", c.n},
          {"params", c.params},
          {"replicates", c.replicates},
          {"mean_out_degree", c.mean_out_degree},
          {"seed", c.seed},
          {"enumeration_budget", c.enumeration_budget}};
}

json to_json(const WilcoxonResult& w) {
  return {{"statistic", w.statistic}, {"p_value", w.p_value}, {"n_used", w.n_used}, {"exact", w.exact}};
}

json to_json(const ErrorSummary& s) {
  return {{"mean", s.mean}, {"median", s.median}, {"count", s.count}};
}

json to_json(const FitResult& f, const EstimationDataset& data) {
  json fits = json::array();
  for (const auto& pf : f.fits) {
    const auto& ex = data.experiments.at(pf.experiment);
    fits.push_back({{"experiment", ex.id},
                    {"participant", ex.participants.at(pf.participant)},
                    {"gamma", pf.gamma},
                    {"training_sse", pf.training_sse},
                    {"samples", pf.samples}});
  }
  return {{"aggregator", to_string(f.aggregator)},
          {"train_count", f.train_count},
          {"include_self", f.options.include_self},
          {"training_sse", f.training_sse},
          {"fits", fits},
          {"warnings", f.warnings}};
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& out) {
  const std::size_t n = traj.states.empty() ? 0 : traj.states.front().size();
  out << 't';
  for (std::size_t i = 0; i < n; ++i) out << ",x_" << i;
  out << '\n';
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    out << format_double(traj.times[k]);
    for (double v : traj.states[k]) out << ',' << format_double(v);
    out << '\n';
  }
}

}  // namespace wmod
