#include "wmod/empirical.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "wmod/error.hpp"
#include "wmod/net.hpp"
#include "wmod/rng.hpp"

namespace wmod {

// ------------------------------------------------------------------- input

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    const auto first = field.find_first_not_of(" \t\r");
    const auto last = field.find_last_not_of(" \t\r");
    fields.push_back(first == std::string::npos ? "" : field.substr(first, last - first + 1));
  }
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_number(const std::string& s, std::size_t line, const char* what) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw Error(ErrorKind::ParseError,
                "line " + std::to_string(line) + ": bad " + what + " '" + s + "'");
  }
  return v;
}

template <typename Key>
std::size_t index_of(std::vector<Key>& keys, const Key& key) {
  const auto it = std::find(keys.begin(), keys.end(), key);
  if (it != keys.end()) return static_cast<std::size_t>(it - keys.begin());
  keys.push_back(key);
  return keys.size() - 1;
}

}  // namespace

EstimationDataset load_estimation_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (header.empty() && std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") != std::string::npos) header = split_csv_line(line);
  }
  const std::vector<std::string> expected{"experiment", "participant", "question", "round", "estimate"};
  if (header.size() < expected.size() || !std::equal(expected.begin(), expected.end(), header.begin()) ||
      (header.size() == 6 && header[5] != "scale") || header.size() > 6) {
    throw Error(ErrorKind::ParseError,
                "expected header experiment,participant,question,round,estimate[,scale]");
  }
  const bool has_scale = header.size() == 6;

  struct Partial {
    std::array<std::optional<double>, kRounds> rounds;
  };
  struct Building {
    std::vector<std::string> participants, questions;
    std::map<std::pair<std::size_t, std::size_t>, Partial> cells;
    std::map<std::size_t, double> scale;
  };
  std::vector<std::string> experiment_ids;
  std::vector<Building> building;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto f = split_csv_line(line);
    if (f.size() != header.size()) {
      throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": expected " +
                                             std::to_string(header.size()) + " fields");
    }
    const std::size_t e = index_of(experiment_ids, f[0]);
    if (e == building.size()) building.emplace_back();
    auto& b = building[e];
    const std::size_t p = index_of(b.participants, f[1]);
    const std::size_t q = index_of(b.questions, f[2]);
    const double round = parse_number(f[3], line_no, "round");
    if (round != 1.0 && round != 2.0 && round != 3.0) {
      throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": round must be 1, 2 or 3");
    }
    auto& slot = b.cells[{p, q}].rounds[static_cast<std::size_t>(round) - 1];
    if (slot) {
      throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": duplicate record");
    }
    slot = parse_number(f[4], line_no, "estimate");
    if (has_scale && !f[5].empty()) {
      const double s = parse_number(f[5], line_no, "scale");
      if (!(s > 0.0)) throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": scale must be positive");
      b.scale[q] = s;
    }
  }

  EstimationDataset data;
  for (std::size_t e = 0; e < building.size(); ++e) {
    auto& b = building[e];
    Experiment ex;
    ex.id = experiment_ids[e];
    ex.participants = b.participants;
    ex.questions = b.questions;
    ex.estimates.assign(ex.participants.size(),
                        std::vector<std::optional<RoundEstimates>>(ex.questions.size()));
    ex.scale.assign(ex.questions.size(), std::nullopt);
    for (const auto& [q, s] : b.scale) ex.scale[q] = s;
    for (std::size_t p = 0; p < ex.participants.size(); ++p) {
      for (std::size_t q = 0; q < ex.questions.size(); ++q) {
        const auto it = b.cells.find({p, q});
        const bool complete = it != b.cells.end() &&
                              std::all_of(it->second.rounds.begin(), it->second.rounds.end(),
                                          [](const auto& r) { return r.has_value(); });
        if (complete) {
          const auto& r = it->second.rounds;
          ex.estimates[p][q] = RoundEstimates{*r[0], *r[1], *r[2]};
        } else {
          data.excluded.push_back("experiment " + ex.id + ", participant " + ex.participants[p] +
                                  ", question " + ex.questions[q] + ": incomplete rounds");
        }
      }
    }
    data.experiments.push_back(std::move(ex));
  }
  return data;
}

EstimationDataset load_estimation_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open '" + path.string() + "'");
  return load_estimation_csv(in);
}

void write_estimation_csv(const EstimationDataset& data, std::ostream& out) {
  bool any_scale = false;
  for (const auto& ex : data.experiments) {
    for (const auto& s : ex.scale) any_scale = any_scale || s.has_value();
  }
  out << "experiment,participant,question,round,estimate" << (any_scale ? ",scale" : "") << '\n';
  for (const auto& ex : data.experiments) {
    for (std::size_t p = 0; p < ex.participants.size(); ++p) {
      for (std::size_t q = 0; q < ex.questions.size(); ++q) {
        if (!ex.estimates[p][q]) continue;
        for (int r = 0; r < kRounds; ++r) {
          out << ex.id << ',' << ex.participants[p] << ',' << ex.questions[q] << ',' << r + 1 << ','
              << format_double((*ex.estimates[p][q])[r]);
          if (any_scale) out << ',' << (ex.scale[q] ? format_double(*ex.scale[q]) : "");
          out << '\n';
        }
      }
    }
  }
}

// ------------------------------------------------------------------ models

std::string to_string(Aggregator a) { return a == Aggregator::Median ? "median" : "average"; }

double aggregate(std::span<const double> values, Aggregator a) {
  if (values.empty()) throw Error(ErrorKind::InsufficientData, "aggregate of no values");
  if (a == Aggregator::Average) {
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t m = sorted.size();
  return m % 2 == 1 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
}

namespace {

// Group aggregate of round `round` on question q, as seen by participant p.
std::optional<double> group_value(const Experiment& ex, std::size_t p, std::size_t q, int round,
                                  Aggregator aggregator, bool include_self) {
  std::vector<double> values;
  for (std::size_t k = 0; k < ex.participants.size(); ++k) {
    if (!include_self && k == p) continue;
    if (ex.estimates[k][q]) values.push_back((*ex.estimates[k][q])[round]);
  }
  if (values.empty()) return std::nullopt;
  return aggregate(values, aggregator);
}

}  // namespace

const ParticipantFit* FitResult::find(std::size_t experiment, std::size_t participant) const {
  for (const auto& f : fits) {
    if (f.experiment == experiment && f.participant == participant) return &f;
  }
  return nullptr;
}

FitResult fit_inertia(const EstimationDataset& data, Aggregator aggregator, std::size_t train_count,
                      const FitOptions& options) {
  FitResult result;
  result.aggregator = aggregator;
  result.train_count = train_count;
  result.options = options;
  for (std::size_t e = 0; e < data.experiments.size(); ++e) {
    const auto& ex = data.experiments[e];
    if (train_count > ex.question_count()) {
      throw Error(ErrorKind::ConfigInvalid, "experiment " + ex.id + " has only " +
                                                std::to_string(ex.question_count()) + " questions");
    }
    for (std::size_t p = 0; p < ex.participants.size(); ++p) {
      ParticipantFit pf;
      pf.experiment = e;
      pf.participant = p;
      for (int t = 0; t < kTransitions; ++t) {
        std::vector<double> as, bs;
        for (std::size_t q = 0; q < train_count; ++q) {
          if (!ex.estimates[p][q]) continue;
          const auto group = group_value(ex, p, q, t, aggregator, options.include_self);
          if (!group) continue;
          const auto& x = *ex.estimates[p][q];
          as.push_back(x[t] - *group);
          bs.push_back(x[t + 1] - *group);
        }
        double ab = 0.0, aa = 0.0;
        for (std::size_t k = 0; k < as.size(); ++k) {
          ab += as[k] * bs[k];
          aa += as[k] * as[k];
        }
        double gamma = 0.0;
        if (aa > 0.0) {
          gamma = std::clamp(ab / aa, 0.0, 1.0);
        } else if (std::any_of(bs.begin(), bs.end(), [](double v) { return v != 0.0; })) {
          result.warnings.push_back("InsufficientData: experiment " + ex.id + ", participant " +
                                    ex.participants[p] + ", transition " + std::to_string(t + 1) +
                                    " never deviates from the group; inertia set to 0");
        }
        double sse = 0.0;
        for (std::size_t k = 0; k < as.size(); ++k) {
          const double r = bs[k] - gamma * as[k];
          sse += r * r;
        }
        pf.gamma[t] = gamma;
        pf.training_sse[t] = sse;
        pf.samples[t] = static_cast<int>(as.size());
        result.training_sse += sse;
      }
      result.fits.push_back(pf);
    }
  }
  return result;
}

FitResult without_inertia(const FitResult& fit) {
  FitResult out = fit;
  for (auto& f : out.fits) f.gamma.fill(0.0);
  return out;
}

ErrorSummary summarize(std::span<const double> errors) {
  ErrorSummary s;
  s.count = errors.size();
  if (errors.empty()) return s;
  double sum = 0.0;
  for (double e : errors) sum += e;
  s.mean = sum / static_cast<double>(errors.size());
  s.median = aggregate(errors, Aggregator::Median);
  return s;
}

std::vector<double> ScoreResult::model_errors() const {
  std::vector<double> out;
  for (const auto& p : model) out.push_back(p.scaled_error);
  return out;
}

std::vector<double> ScoreResult::baseline_errors() const {
  std::vector<double> out;
  for (const auto& p : baseline) out.push_back(p.scaled_error);
  return out;
}

namespace {

std::vector<Prediction> score_with(const EstimationDataset& data, const FitResult& fit,
                                   QuestionRange holdout) {
  std::vector<Prediction> out;
  for (std::size_t e = 0; e < data.experiments.size(); ++e) {
    const auto& ex = data.experiments[e];
    if (holdout.end > ex.question_count()) {
      throw Error(ErrorKind::ConfigInvalid, "holdout exceeds the questions of experiment " + ex.id);
    }
    for (std::size_t q = holdout.begin; q < holdout.end; ++q) {
      bool any = false;
      for (std::size_t p = 0; p < ex.participants.size(); ++p) {
        if (!ex.estimates[p][q]) continue;
        any = true;
        const ParticipantFit* pf = fit.find(e, p);
        if (!pf) throw Error(ErrorKind::ConfigInvalid, "fit does not cover experiment " + ex.id);
        const auto& x = *ex.estimates[p][q];
        for (int t = 0; t < kTransitions; ++t) {
          const auto group = group_value(ex, p, q, t, fit.aggregator, fit.options.include_self);
          if (!group) continue;
          Prediction pr;
          pr.experiment = e;
          pr.participant = p;
          pr.question = q;
          pr.transition = t;
          pr.predicted = pf->gamma[t] * x[t] + (1.0 - pf->gamma[t]) * *group;
          pr.actual = x[t + 1];
          pr.raw_error = std::abs(pr.predicted - pr.actual);
          pr.scaled_error = ex.scale[q] ? pr.raw_error / *ex.scale[q] : pr.raw_error;
          out.push_back(pr);
        }
      }
      if (!any) {
        throw Error(ErrorKind::MissingRound, "experiment " + ex.id + ", question " + ex.questions[q] +
                                                 " has no complete record");
      }
    }
  }
  return out;
}

}  // namespace

ScoreResult predict_and_score(const EstimationDataset& data, const FitResult& fit,
                              QuestionRange holdout) {
  if (holdout.begin >= holdout.end) throw Error(ErrorKind::ConfigInvalid, "empty holdout range");
  if (holdout.begin < fit.train_count) {
    throw Error(ErrorKind::ConfigInvalid, "holdout overlaps the training questions");
  }
  ScoreResult result;
  result.model = score_with(data, fit, holdout);
  result.baseline = score_with(data, without_inertia(fit), holdout);
  const auto m = result.model_errors();
  const auto b = result.baseline_errors();
  result.model_summary = summarize(m);
  result.baseline_summary = summarize(b);
  return result;
}

// --------------------------------------------------------------- synthesis

EstimationDataset synthesize_dataset(const SyntheticConfig& cfg) {
  if (cfg.experiments < 1 || cfg.questions < 1 || cfg.min_participants < 1 ||
      cfg.max_participants < cfg.min_participants) {
    throw Error(ErrorKind::ConfigInvalid, "invalid synthetic dataset shape");
  }
  Rng rng(cfg.seed);
  EstimationDataset data;
  for (int e = 0; e < cfg.experiments; ++e) {
    Experiment ex;
    ex.id = "e" + std::to_string(e + 1);
    const int span = cfg.max_participants - cfg.min_participants + 1;
    const int participants = cfg.min_participants + static_cast<int>(rng.below(static_cast<std::uint64_t>(span)));
    for (int p = 0; p < participants; ++p) ex.participants.push_back("p" + std::to_string(p + 1));
    for (int q = 0; q < cfg.questions; ++q) ex.questions.push_back("q" + std::to_string(q + 1));
    ex.scale.assign(ex.questions.size(), std::nullopt);
    ex.estimates.assign(ex.participants.size(),
                        std::vector<std::optional<RoundEstimates>>(ex.questions.size()));
    std::vector<double> current(static_cast<std::size_t>(participants));
    for (int q = 0; q < cfg.questions; ++q) {
      const double truth = rng.uniform(0.2, 0.8);
      std::vector<RoundEstimates> rounds(static_cast<std::size_t>(participants));
      for (int p = 0; p < participants; ++p) {
        current[p] = truth + rng.normal(0.0, cfg.initial_sd);
        rounds[p][0] = current[p];
      }
      for (int t = 0; t < kTransitions; ++t) {
        const double group = aggregate(current, cfg.aggregator);
        for (int p = 0; p < participants; ++p) {
          double next = cfg.gamma * current[p] + (1.0 - cfg.gamma) * group;
          if (cfg.noise_sd > 0.0) next += rng.normal(0.0, cfg.noise_sd);
          rounds[p][t + 1] = next;
        }
        for (int p = 0; p < participants; ++p) current[p] = rounds[p][t + 1];
      }
      for (int p = 0; p < participants; ++p) ex.estimates[p][q] = rounds[p];
    }
    data.experiments.push_back(std::move(ex));
  }
  return data;
}

}  // namespace wmod
