#pragma once

#include <iosfwd>

#include <json.hpp>

#include "wmod/cohesion.hpp"
#include "wmod/control.hpp"
#include "wmod/dynamics.hpp"
#include "wmod/empirical.hpp"
#include "wmod/experiments.hpp"
#include "wmod/wilcoxon.hpp"

namespace wmod {

nlohmann::json to_json(const NodeSet& s);
NodeSet node_set_from_json(const nlohmann::json& j);

/// {"minimal_cohesive_sets":[[..]],"only_global_maximal":b,"complete":b}
nlohmann::json to_json(const CohesionReport& r);
/// {"pinned":[..],"size":k,"certified_optimal":b}
nlohmann::json to_json(const PinningSolution& s);
nlohmann::json to_json(const EquilibriumReport& r);
nlohmann::json to_json(const DecisiveGraph& g);
nlohmann::json to_json(const SweepConfig& c);
nlohmann::json to_json(const WilcoxonResult& w);
nlohmann::json to_json(const ErrorSummary& s);
nlohmann::json to_json(const FitResult& f, const EstimationDataset& data);

/// CSV with header `t,x_0,...,x_{n-1}`, one row per stored state.
void write_trajectory_csv(const Trajectory& traj, std::ostream& out);

}  // namespace wmod
