// wmod: simulate | cohesion | pinning | sweep | fit
//
// Exit codes: 0 success, 1 error, 2 integration stopped at t_max without
// converging. Node indices are 0-based everywhere.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "wmod/cohesion.hpp"
#include "wmod/control.hpp"
#include "wmod/dynamics.hpp"
#include "wmod/empirical.hpp"
#include "wmod/error.hpp"
#include "wmod/experiments.hpp"
#include "wmod/net.hpp"
#include "wmod/rng.hpp"
#include "wmod/serialize.hpp"
#include "wmod/wilcoxon.hpp"

using nlohmann::json;
using namespace wmod;

namespace {

struct Global {
  std::uint64_t seed = 1;
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  int verbose = 0;
};

// Matrix either from a file or from the generator.
struct MatrixSource {
  std::string path;
  std::string gen;  // "er" or "ws"
  int n = 10;
  double p = 0.3;
  int degree = 4;

  void add_to(CLI::App* app) {
    auto* m = app->add_option("--matrix", path, "Influence matrix (CSV or JSON)");
    auto* g = app->add_option("--gen", gen, "Generate a network instead: er or ws")
                  ->check(CLI::IsMember({"er", "ws"}));
    m->excludes(g);
    app->add_option("--n", n, "Generated node count");
    app->add_option("--p", p, "Link (er) or rewiring (ws) probability");
    app->add_option("--degree", degree, "Out-degree for ws");
  }

  InfluenceMatrix load(std::uint64_t seed) const {
    if (!path.empty()) return load_matrix(path);
    if (gen.empty()) throw Error(ErrorKind::ConfigInvalid, "give --matrix or --gen");
    return gen_network({parse_graph_model(gen), n, p, degree, seed});
  }

  json describe() const {
    if (!path.empty()) return {{"matrix", path}};
    return {{"gen", gen}, {"n", n}, {"p", p}, {"degree", degree}};
  }
};

json metadata(const std::string& command, const Global& g, json config) {
  config["seed"] = g.seed;
  return {{"tool", "wmod"}, {"version", WMOD_VERSION}, {"command", command}, {"config", std::move(config)}};
}

void emit_json(const json& j, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot write '" + path + "'");
  return out;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  MatrixSource source;
  std::vector<double> x0;
  bool random_x0 = false;
  double step = 0.01;
  double t_max = 100.0;
  double eq_tol = 1e-9;
  int stride = 1;
  std::string method = "rk4";
  std::vector<int> pinned;
  double gamma = 0.5;
  double target = 0.0;
  std::string form = "relaxed";
  double cluster_tol = kDefaultClusterTol;
  std::string trajectory;
  std::string report;
};

int run_simulate(const SimulateArgs& a, const Global& g) {
  const auto w = a.source.load(g.seed);
  std::vector<double> x0 = a.x0;
  if (a.random_x0) {
    Rng rng(derive_seed(g.seed, 1, 0));
    x0.resize(static_cast<std::size_t>(w.n()));
    for (auto& v : x0) v = rng.uniform(-1.0, 1.0);
  }
  if (static_cast<int>(x0.size()) != w.n()) {
    throw Error(ErrorKind::DimensionMismatch, "x0 has " + std::to_string(x0.size()) + " entries, matrix has " +
                                                  std::to_string(w.n()) + " nodes");
  }
  IntegratorOptions opts;
  opts.step = a.step;
  opts.t_max = a.t_max;
  opts.eq_tol = a.eq_tol;
  opts.stride = a.stride;
  opts.method = a.method == "euler" ? Method::Euler : Method::RungeKutta4;

  const bool pinning = !a.pinned.empty();
  VectorField field = ctwm_field(w);
  if (pinning) {
    const auto cfg = PinningConfig::uniform(w.n(), NodeSet(a.pinned), a.gamma, a.target);
    field = pinned_field(w, cfg, a.form == "scaled" ? PinnedForm::Scaled : PinnedForm::Relaxed);
  }
  const auto traj = integrate(x0, field, opts);

  if (!a.trajectory.empty()) {
    auto out = open_out(a.trajectory);
    write_trajectory_csv(traj, out);
  }
  json config{{"source", a.source.describe()}, {"x0", x0}, {"step", a.step}, {"t_max", a.t_max},
              {"eq_tol", a.eq_tol}, {"stride", a.stride}, {"method", a.method},
              {"cluster_tol", a.cluster_tol}};
  if (pinning) {
    config["pinning"] = {{"pinned", a.pinned}, {"gamma", a.gamma}, {"target", a.target}, {"form", a.form}};
  }
  json report = metadata("simulate", g, std::move(config));
  report["converged"] = traj.converged;
  report["final_time"] = traj.final_time();
  report["residual"] = traj.residual;
  report["final_state"] = traj.final_state();
  report["equilibrium"] = to_json(classify_equilibrium(traj.final_state(), w, a.cluster_tol));
  emit_json(report, a.report);
  return traj.converged ? 0 : 2;
}

// ---------------------------------------------------------------- cohesion

struct CohesionArgs {
  MatrixSource source;
  std::optional<std::uint64_t> limit;
  bool decisive = false;
  std::string out;
};

int run_cohesion(const CohesionArgs& a, const Global& g) {
  const auto w = a.source.load(g.seed);
  const auto report = enumerate_minimal_cohesive(w, a.limit);
  json config{{"source", a.source.describe()}, {"decisive", a.decisive}};
  if (a.limit) config["limit"] = *a.limit;
  json j = metadata("cohesion", g, std::move(config));
  j.update(to_json(report));
  json maximal = json::array();
  if (report.complete) {
    std::vector<NodeSet> seen;
    for (const auto& c : report.minimal_cohesive_sets) {
      auto m = cohesive_closure(c, w);
      if (std::find(seen.begin(), seen.end(), m) == seen.end()) seen.push_back(std::move(m));
    }
    std::sort(seen.begin(), seen.end());
    for (const auto& m : seen) maximal.push_back(to_json(m));
  }
  j["closures_of_minimal_sets"] = maximal;
  if (a.decisive) j["decisive_graph"] = to_json(decisive_links(w));
  emit_json(j, a.out);
  if (!report.complete) std::cerr << "warning: enumeration budget ran out; result is partial\n";
  return 0;
}

// ----------------------------------------------------------------- pinning

struct PinningArgs {
  MatrixSource source;
  std::vector<int> pinned;
  std::optional<std::uint64_t> budget;
  int verify = 0;
  double gamma = 0.5;
  double target = 0.0;
  double tol = 1e-4;
  double t_max = 500.0;
  std::string out;
};

int run_pinning(const PinningArgs& a, const Global& g) {
  const auto w = a.source.load(g.seed);
  const auto report = enumerate_minimal_cohesive(w, a.budget);
  if (!report.complete) throw Error(ErrorKind::IncompleteReport, "enumeration budget ran out");
  json config{{"source", a.source.describe()}, {"verify_trials", a.verify}, {"gamma", a.gamma},
              {"target", a.target}, {"tol", a.tol}, {"t_max", a.t_max}};
  if (a.budget) config["budget"] = *a.budget;

  NodeSet pinned;
  json j;
  if (a.pinned.empty()) {
    const auto solution = minimal_pinning_set(report, a.budget);
    pinned = solution.pinned;
    j = metadata("pinning", g, std::move(config));
    j.update(to_json(solution));
  } else {
    pinned = NodeSet(a.pinned);
    const auto feas = pinning_feasible(pinned, report);
    config["pinned"] = a.pinned;
    j = metadata("pinning", g, std::move(config));
    j["pinned"] = to_json(pinned);
    j["size"] = pinned.size();
    j["feasible"] = feas.feasible;
    if (feas.witness) j["uncovered_witness"] = to_json(*feas.witness);
  }
  if (a.verify > 0) {
    SimulationCheckOptions opts;
    opts.t_max = a.t_max;
    opts.seed = derive_seed(g.seed, 2, 0);
    const auto cfg = PinningConfig::uniform(w.n(), pinned, a.gamma, a.target);
    j["simulated_success_fraction"] = verify_pinning_by_simulation(w, cfg, a.verify, a.tol, opts);
  }
  emit_json(j, a.out);
  return 0;
}

// ------------------------------------------------------------------- sweep

struct SweepArgs {
  std::string family = "er";
  int n = 15;
  std::vector<double> params;
  int replicates = 30;
  int degree = 4;
  std::uint64_t budget = SweepConfig{}.enumeration_budget;
  std::string out;
};

int run_sweep_cmd(const SweepArgs& a, const Global& g) {
  SweepConfig cfg;
  cfg.family = parse_graph_model(a.family);
  cfg.n = a.n;
  cfg.params = a.params;
  cfg.replicates = a.replicates;
  cfg.mean_out_degree = a.degree;
  cfg.seed = g.seed;
  cfg.enumeration_budget = a.budget;
  const auto result = run_sweep(cfg, g.jobs);

  json meta = metadata("sweep", g, to_json(cfg));
  json values = json::array();
  for (const auto& p : result.points) values.push_back({{"param", p.param}, {"values", p.values}});
  meta["replicate_values"] = values;
  if (a.out.empty() || a.out == "-") {
    write_sweep_csv(result, std::cout);
    std::cerr << meta.dump() << '\n';
  } else {
    auto out = open_out(a.out);
    write_sweep_csv(result, out);
    emit_json(meta, a.out + ".meta.json");
  }
  if (g.verbose > 0) {
    std::cerr << (non_decreasing_up_to_ci(result) ? "trend: non-decreasing up to CI overlap\n"
                                                  : "trend: decreases beyond CI overlap\n");
  }
  return 0;
}

// --------------------------------------------------------------------- fit

struct FitArgs {
  std::string data;
  bool synthetic = false;
  SyntheticConfig synth;
  std::string aggregator = "both";
  std::size_t train = 20;
  std::optional<std::size_t> holdout_end;
  bool exclude_self = false;
  std::string out;
};

json score_json(const ScoreResult& s) {
  json j{{"model", to_json(s.model_summary)}, {"baseline", to_json(s.baseline_summary)}};
  try {
    j["wilcoxon"] = to_json(wilcoxon_signed_rank(s.model_errors(), s.baseline_errors()));
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::AllZeroDifferences) throw;
    j["wilcoxon"] = nullptr;
  }
  json raw = json::array();
  for (const auto& p : s.model) raw.push_back(p.raw_error);
  j["model_raw_errors"] = raw;
  j["model_scaled_errors"] = s.model_errors();
  j["baseline_scaled_errors"] = s.baseline_errors();
  return j;
}

int run_fit(FitArgs a, const Global& g) {
  EstimationDataset data;
  if (a.synthetic) {
    a.synth.seed = g.seed;
    data = synthesize_dataset(a.synth);
  } else {
    if (a.data.empty()) throw Error(ErrorKind::ConfigInvalid, "give --data or --synthetic");
    data = load_estimation_csv(std::filesystem::path(a.data));
  }
  if (data.experiments.empty()) throw Error(ErrorKind::EmptyInput, "dataset has no experiments");
  std::size_t questions = data.experiments.front().question_count();
  for (const auto& ex : data.experiments) questions = std::min(questions, ex.question_count());
  const QuestionRange holdout{a.train, a.holdout_end.value_or(questions)};

  json config{{"train", a.train}, {"holdout", {holdout.begin, holdout.end}},
              {"include_self", !a.exclude_self}, {"aggregator", a.aggregator}};
  if (a.synthetic) {
    config["synthetic"] = {{"experiments", a.synth.experiments}, {"min_participants", a.synth.min_participants},
                           {"max_participants", a.synth.max_participants}, {"questions", a.synth.questions},
                           {"gamma", a.synth.gamma}, {"noise_sd", a.synth.noise_sd},
                           {"initial_sd", a.synth.initial_sd},
                           {"aggregator", to_string(a.synth.aggregator)}};
  } else {
    config["data"] = a.data;
  }
  json j = metadata("fit", g, std::move(config));
  j["excluded"] = data.excluded;

  std::vector<Aggregator> aggs;
  if (a.aggregator != "average") aggs.push_back(Aggregator::Median);
  if (a.aggregator != "median") aggs.push_back(Aggregator::Average);
  FitOptions opts;
  opts.include_self = !a.exclude_self;
  json models = json::object();
  for (auto agg : aggs) {
    const auto fit = fit_inertia(data, agg, a.train, opts);
    for (const auto& w : fit.warnings) std::cerr << "warning: " << w << '\n';
    json m = to_json(fit, data);
    m["holdout"] = score_json(predict_and_score(data, fit, holdout));
    models[to_string(agg)] = std::move(m);
  }
  j["models"] = std::move(models);
  emit_json(j, a.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted-median opinion dynamics toolkit"};
  app.set_version_flag("--version", std::string(WMOD_VERSION));
  app.set_config("--config", "", "TOML/INI file with option defaults; command-line flags win");
  app.require_subcommand(1);

  Global global;
  app.add_option("--seed", global.seed, "Master RNG seed")->capture_default_str();
  app.add_option("--jobs", global.jobs, "Worker threads for sweeps")->check(CLI::PositiveNumber);
  app.add_flag("-v,--verbose", global.verbose, "More diagnostics on stderr");

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Integrate the dynamics from one initial state");
  sim.source.add_to(s);
  auto* x0 = s->add_option("--x0", sim.x0, "Initial state, comma separated")->delimiter(',');
  s->add_flag("--random-x0", sim.random_x0, "Uniform initial state on [-1,1]")->excludes(x0);
  s->add_option("--step", sim.step)->capture_default_str();
  s->add_option("--t-max", sim.t_max)->capture_default_str();
  s->add_option("--eq-tol", sim.eq_tol)->capture_default_str();
  s->add_option("--stride", sim.stride, "Keep every k-th step in the trajectory")->capture_default_str();
  s->add_option("--method", sim.method)->check(CLI::IsMember({"rk4", "euler"}))->capture_default_str();
  s->add_option("--pinned", sim.pinned, "Pinned nodes, comma separated")->delimiter(',');
  s->add_option("--gamma", sim.gamma, "Pinning strength on pinned nodes")->capture_default_str();
  s->add_option("--target", sim.target, "Pinning target u")->capture_default_str();
  s->add_option("--form", sim.form)->check(CLI::IsMember({"relaxed", "scaled"}))->capture_default_str();
  s->add_option("--cluster-tol", sim.cluster_tol)->capture_default_str();
  s->add_option("--trajectory", sim.trajectory, "Trajectory CSV output");
  s->add_option("-o,--out", sim.report, "Report JSON output (default stdout)");

  CohesionArgs coh;
  auto* c = app.add_subcommand("cohesion", "Minimal cohesive sets and decisive links");
  coh.source.add_to(c);
  c->add_option("--limit", coh.limit, "Search-node budget");
  c->add_flag("--decisive", coh.decisive, "Also report the decisive-link graph");
  c->add_option("-o,--out", coh.out, "JSON output (default stdout)");

  PinningArgs pin;
  auto* p = app.add_subcommand("pinning", "Minimal pinning set, or feasibility of a given one");
  pin.source.add_to(p);
  p->add_option("--pinned", pin.pinned, "Check this pinned set instead of optimizing")->delimiter(',');
  p->add_option("--budget", pin.budget, "Search-node budget");
  p->add_option("--verify", pin.verify, "Random-start simulations to run on the pinned set");
  p->add_option("--gamma", pin.gamma)->capture_default_str();
  p->add_option("--target", pin.target)->capture_default_str();
  p->add_option("--tol", pin.tol)->capture_default_str();
  p->add_option("--t-max", pin.t_max)->capture_default_str();
  p->add_option("-o,--out", pin.out, "JSON output (default stdout)");

  SweepArgs sw;
  auto* w = app.add_subcommand("sweep", "Pinning number over a network-parameter sweep");
  w->add_option("--family", sw.family)->check(CLI::IsMember({"er", "ws"}))->capture_default_str();
  w->add_option("--n", sw.n)->capture_default_str();
  w->add_option("--params", sw.params, "Parameter values, comma separated")->delimiter(',')->required();
  w->add_option("--replicates", sw.replicates)->capture_default_str();
  w->add_option("--degree", sw.degree, "Out-degree for ws")->capture_default_str();
  w->add_option("--budget", sw.budget, "Search-node budget per replicate")->capture_default_str();
  w->add_option("-o,--out", sw.out, "CSV output; metadata goes to <out>.meta.json");

  FitArgs fit;
  auto* f = app.add_subcommand("fit", "Fit inertia coefficients and score held-out predictions");
  auto* data_opt = f->add_option("--data", fit.data, "Estimation CSV");
  f->add_flag("--synthetic", fit.synthetic, "Use a synthetic dataset")->excludes(data_opt);
  f->add_option("--aggregator", fit.aggregator)
      ->check(CLI::IsMember({"median", "average", "both"}))
      ->capture_default_str();
  f->add_option("--train", fit.train, "Training questions")->capture_default_str();
  f->add_option("--holdout-end", fit.holdout_end, "End of the held-out question range");
  f->add_flag("--exclude-self", fit.exclude_self, "Leave the participant out of the aggregate");
  f->add_option("--synthetic-gamma", fit.synth.gamma)->capture_default_str();
  f->add_option("--synthetic-noise", fit.synth.noise_sd)->capture_default_str();
  f->add_option("--synthetic-experiments", fit.synth.experiments)->capture_default_str();
  f->add_option("--synthetic-questions", fit.synth.questions)->capture_default_str();
  f->add_option("-o,--out", fit.out, "JSON output (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*s) return run_simulate(sim, global);
    if (*c) return run_cohesion(coh, global);
    if (*p) return run_pinning(pin, global);
    if (*w) return run_sweep_cmd(sw, global);
    if (*f) return run_fit(fit, global);
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
