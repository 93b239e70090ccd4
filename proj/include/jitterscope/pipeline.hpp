#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "jitterscope/baseline.hpp"
#include "jitterscope/calendar.hpp"
#include "jitterscope/clustering.hpp"
#include "jitterscope/config.hpp"
#include "jitterscope/evaluate.hpp"
#include "jitterscope/events.hpp"
#include "jitterscope/marketlabel.hpp"
#include "jitterscope/normalizer.hpp"
#include "jitterscope/selection.hpp"
#include "jitterscope/svm.hpp"

namespace jitterscope::pipeline {

inline const std::string kBurstTag = "burst";
inline const std::string kSentimentTag = "sentiment";
inline const std::string kWindowedTag = "windowed";

/// Parses, keyword-filters, tokenizes and sentiment-scores the tweet file.
std::vector<events::StreamTweet> prepare_tweets(const PipelineConfig& config);

struct TrainingSpan {
  Timestamp begin = 0;
  Timestamp end = 0;
};

/// [first tweet, train_end]; train_end comes from the config or from
/// train_fraction of the tweet span. Throws FatalError("calibrate") without
/// tweets.
TrainingSpan training_span(const PipelineConfig& config, std::span<const events::StreamTweet> tweets);

struct DetectorModel {
  ratetrack::BurstThresholds thresholds;
  double bandwidth = 0.0;
  double grid_step = 0.0;
  TrainingSpan span;
  Timestamp data_end = 0;  // last tweet
  ratetrack::WordClustering clustering;
};

/// Vocabulary, thresholds and word clusters from the training tweets only.
DetectorModel calibrate_stage(const PipelineConfig& config, std::span<const events::StreamTweet> tweets);

std::vector<events::EventVector> detect_stage(const PipelineConfig& config, const DetectorModel& model,
                                              std::span<const events::StreamTweet> tweets);

struct MarketData {
  market::MarketCalendar calendar;
  market::VolatilitySeries volatility;
};

MarketData load_market(const PipelineConfig& config);

struct LabelStage {
  double multiplier = 0.0;
  market::LabelSets sets;
  std::vector<market::LabeledEvent> labeled;
  Timestamp slots_from = 0;  // evaluated T_true slots lie in [slots_from, slots_to]
  Timestamp slots_to = 0;
};

std::vector<market::LabeledEvent> label_vectors(std::span<const market::MappedVector> mapped,
                                                const market::LabelSets& sets, Timestamp match_window);

/// Maps, dedupes and labels detector vectors against one multiplier's sets.
LabelStage label_stage(const PipelineConfig& config, const MarketData& market_data,
                       std::span<const events::EventVector> vectors, Timestamp train_end, double multiplier);

struct TrainedModel {
  ml::Normalizer normalizer;
  ml::FeatureSelection selection;  // indices into the normalized features
  ml::FeatureSelection alternate;  // the other method's ranking, for the report
  int cv_folds = 0;
  double cv_f1 = 0.0;
  ml::KernelClassifier classifier;

  Eigen::VectorXd transform(const Eigen::VectorXd& raw) const;
};

/// Training rows: label != -1 and t' + match_window <= train_end.
bool in_training(const market::LabeledEvent& e, Timestamp match_window, Timestamp train_end);

TrainedModel train_stage(const PipelineConfig& config, std::span<const market::LabeledEvent> labeled,
                         Timestamp train_end);

struct Prediction {
  Timestamp event_start = 0;
  Timestamp snapshot = 0;
  Timestamp t_prime = 0;
  int truth = 0;  // -1, 0 or 1
  int predicted = 0;
  double decision = 0.0;
};

/// Classifies every post-training vector in t' order. Labels become known
/// match_window after t'; those with label 0 or 1 then update the model.
std::vector<Prediction> classify_stage(const PipelineConfig& config, const TrainedModel& model,
                                       std::span<const market::LabeledEvent> labeled, Timestamp train_end);

struct Metrics {
  std::string detector;
  double multiplier = 0.0;
  eval::Prf1 prf;
  std::optional<double> auc;
  std::optional<eval::MirResult> mir;
  std::size_t stream_length = 0;
  std::size_t inserted_misses = 0;
};

struct Evaluation {
  Metrics metrics;
  std::vector<eval::RocPoint> roc;
  eval::LabelStreamPair pair;
};

Evaluation evaluate_stage(const PipelineConfig& config, const std::string& detector, const LabelStage& labels,
                          std::span<const Prediction> predictions);

/// P/R/F1 always; ROC and AUC when both classes occur; MIR when the stream
/// is longer than the chain order.
Evaluation evaluate_pair(const std::string& detector, double multiplier, eval::LabelStreamPair pair, int markov_order);

/// P/R/F1 of predictions against planted impact flags. A prediction takes the
/// flag of the planted event whose [time, end + slack] holds its snapshot
/// (0 when none does); impacted planted events after train_end without any
/// prediction count as misses.
eval::Prf1 score_planted(std::span<const Prediction> predictions, const nlohmann::json& truth, Timestamp train_end,
                         Timestamp slack = kSecondsPerHour);

struct BaselineRun {
  std::vector<baseline::SentimentEvent> detected;
  LabelStage labels;
  TrainedModel model;
  std::vector<Prediction> predictions;
  Evaluation evaluation;
};

BaselineRun baseline_stage(const PipelineConfig& config, std::span<const events::StreamTweet> tweets,
                           const MarketData& market_data, Timestamp train_end, double multiplier);

/// Every stage for every multiplier, writing each artifact under the output
/// directory, and returns the combined report (also written as report.json).
nlohmann::json run_pipeline(const PipelineConfig& config);

/// Rebuilds report.json from the per-multiplier metrics files present.
nlohmann::json assemble_report(const PipelineConfig& config);

}  // namespace jitterscope::pipeline
