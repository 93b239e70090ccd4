#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "jitterscope/common.hpp"
#include "jitterscope/marketlabel.hpp"
#include "jitterscope/selection.hpp"
#include "jitterscope/svm.hpp"

namespace jitterscope::pipeline {

struct PipelineConfig {
  // [paths]; relative paths resolve against the config file's directory
  std::filesystem::path tweets;
  std::filesystem::path market;
  std::filesystem::path lexicon;
  std::filesystem::path stopwords;
  std::filesystem::path calendar;
  std::filesystem::path truth;  // optional planted ground truth
  std::filesystem::path out_dir = "out";

  // [ingest]
  std::vector<std::string> keywords;  // empty: keep every tweet
  int vocabulary_min_count = 5;
  int vocabulary_max_words = 2000;

  // [ratetrack]
  double bandwidth = 600.0;
  double grid_step = 300.0;
  double cluster_cutoff = 0.7;

  // [events]
  Timestamp tick = 60;
  double evaluation_lag = 600.0;
  Timestamp max_event_age = kSecondsPerDay;
  double update_ratio = 1.1;
  LatLon market_location{37.9838, 23.7275};

  // [market]
  int volatility_window = market::kDefaultVolatilityWindow;
  Timestamp match_window = market::kDefaultMatchWindow;
  std::vector<double> multipliers{2.0, 2.5, 3.0};
  market::BaselineMode baseline_mode = market::BaselineMode::MeanAbs;

  // [mlcore]
  ml::SelectionMethod selection = ml::SelectionMethod::Cfs;
  int infogain_bins = ml::kDefaultInfoGainBins;
  double infogain_alpha = ml::kDefaultInfoGainAlpha;
  int cv_folds = 10;
  std::vector<ml::KernelSpec> kernels{ml::KernelSpec::linear(), ml::KernelSpec::polynomial(2),
                                      ml::KernelSpec::polynomial(3)};
  std::vector<double> Cs{0.1, 1.0, 10.0};
  std::vector<ml::ClassWeights> class_weights{{1.0, 1.0}, {1.0, 2.0}, {1.0, 4.0}};
  double svm_tolerance = 1e-3;

  // [evaluate]
  int markov_order = 1;

  // [baseline]
  Timestamp baseline_window = 2 * kSecondsPerHour;
  Timestamp baseline_step = 300;
  double baseline_update_ratio = 1.1;
  Timestamp baseline_max_shift = kSecondsPerDay;

  // [pipeline]
  double train_fraction = 0.5;
  std::optional<Timestamp> train_end;
  std::uint64_t seed = 42;

  /// Throws std::invalid_argument naming the first bad parameter.
  void validate() const;
};

/// Reads the sectioned key/value file. Unknown sections or keys are errors.
PipelineConfig load_config(const std::filesystem::path& path);
PipelineConfig parse_config(std::istream& in, const std::filesystem::path& base_dir);

/// Writes `config` in the same format, one commented line per key.
void write_config(std::ostream& out, const PipelineConfig& config);

std::string format_multiplier(double m);

}  // namespace jitterscope::pipeline
