#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace wmod {

// Round-structured estimation data: in each experiment a small group answers
// the same ordered questions three times, seeing the others' previous
// answers between rounds.

inline constexpr int kRounds = 3;
inline constexpr int kTransitions = kRounds - 1;

using RoundEstimates = std::array<double, kRounds>;

struct Experiment {
  std::string id;
  std::vector<std::string> participants;
  std::vector<std::string> questions;
  /// estimates[p][q]; empty when the participant lacks a round for q.
  std::vector<std::vector<std::optional<RoundEstimates>>> estimates;
  /// Known answer range per question, used to normalize errors.
  std::vector<std::optional<double>> scale;

  std::size_t question_count() const { return questions.size(); }
};

struct EstimationDataset {
  std::vector<Experiment> experiments;
  /// One entry per (experiment, participant, question) dropped at load time.
  std::vector<std::string> excluded;
};

/// CSV with header `experiment,participant,question,round,estimate` and an
/// optional trailing `scale` column. Rounds are 1..3. Experiments,
/// participants and questions keep their order of first appearance. Records
/// without all three rounds are excluded and listed in `excluded`.
EstimationDataset load_estimation_csv(std::istream& in);
EstimationDataset load_estimation_csv(const std::filesystem::path& path);
void write_estimation_csv(const EstimationDataset& data, std::ostream& out);

enum class Aggregator { Median, Average };

std::string to_string(Aggregator a);

/// Plain median (midpoint of the two central values for even counts) or mean.
double aggregate(std::span<const double> values, Aggregator a);

struct FitOptions {
  /// Whether a participant's own estimate enters the group aggregate.
  bool include_self = true;
};

struct ParticipantFit {
  std::size_t experiment = 0;
  std::size_t participant = 0;
  /// Inertia coefficient per transition (round 1->2, round 2->3), in [0, 1].
  std::array<double, kTransitions> gamma{};
  std::array<double, kTransitions> training_sse{};
  std::array<int, kTransitions> samples{};
};

struct FitResult {
  Aggregator aggregator = Aggregator::Median;
  std::size_t train_count = 0;
  FitOptions options;
  std::vector<ParticipantFit> fits;
  double training_sse = 0.0;
  std::vector<std::string> warnings;

  const ParticipantFit* find(std::size_t experiment, std::size_t participant) const;
};

/// Least-squares inertia per participant and transition over the first
/// `train_count` questions:
///   x(t+1) ~ g x(t) + (1 - g) A(t),   g = sum(a b) / sum(a a) clipped to [0, 1]
/// with a = x(t) - A(t), b = x(t+1) - A(t). If sum(a a) = 0 the coefficient
/// is 0 (and a warning is recorded when some b is nonzero).
FitResult fit_inertia(const EstimationDataset& data, Aggregator aggregator, std::size_t train_count,
                      const FitOptions& options = {});

/// Copy of `fit` with every coefficient forced to 0 (pure aggregate model).
FitResult without_inertia(const FitResult& fit);

struct QuestionRange {
  std::size_t begin = 0;
  std::size_t end = 0;
};

struct Prediction {
  std::size_t experiment = 0;
  std::size_t participant = 0;
  std::size_t question = 0;
  int transition = 0;
  double predicted = 0.0;
  double actual = 0.0;
  double raw_error = 0.0;
  /// raw_error divided by the question's scale when known, else raw_error.
  double scaled_error = 0.0;
};

struct ErrorSummary {
  double mean = 0.0;
  double median = 0.0;
  std::size_t count = 0;
};

struct ScoreResult {
  std::vector<Prediction> model;
  /// Same records scored with every coefficient forced to 0.
  std::vector<Prediction> baseline;
  ErrorSummary model_summary;
  ErrorSummary baseline_summary;

  std::vector<double> model_errors() const;
  std::vector<double> baseline_errors() const;
};

ErrorSummary summarize(std::span<const double> errors);

/// Predicts round t+1 from round t on the held-out questions with the fitted
/// coefficients and scores each prediction. Throws ConfigInvalid when the
/// holdout overlaps the training questions and MissingRound when a held-out
/// question has no complete record in some experiment.
ScoreResult predict_and_score(const EstimationDataset& data, const FitResult& fit,
                              QuestionRange holdout);

struct SyntheticConfig {
  int experiments = 18;
  int min_participants = 5;
  int max_participants = 6;
  int questions = 30;
  double gamma = 0.3;
  double noise_sd = 0.0;
  Aggregator aggregator = Aggregator::Median;
  /// Round-1 estimates are truth + N(0, initial_sd), truth ~ U(0.2, 0.8).
  double initial_sd = 0.15;
  std::uint64_t seed = 0;
};

/// Data generated by the inertia model itself (aggregate includes self).
EstimationDataset synthesize_dataset(const SyntheticConfig& cfg);

}  // namespace wmod
