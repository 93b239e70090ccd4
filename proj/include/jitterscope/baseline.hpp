#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "jitterscope/calendar.hpp"
#include "jitterscope/common.hpp"
#include "jitterscope/evaluate.hpp"
#include "jitterscope/events.hpp"
#include "jitterscope/marketlabel.hpp"

namespace jitterscope::baseline {

constexpr Timestamp kDefaultWindow = 2 * kSecondsPerHour;
constexpr Timestamp kDefaultStep = 300;
constexpr Timestamp kMaxShift = kSecondsPerDay;

struct SentimentSeries {
  std::vector<Timestamp> timestamps;
  Eigen::VectorXd values;  // SSI_W over (t - window, t]
  Timestamp window = kDefaultWindow;
  Timestamp step = kDefaultStep;
};

/// SSI_W of the tweets in each trailing window, sampled at begin, begin+step,
/// ... up to end. Tweets must be time-sorted.
SentimentSeries sentiment_series(std::span<const events::StreamTweet> tweets, Timestamp begin, Timestamp end,
                                 Timestamp window = kDefaultWindow, Timestamp step = kDefaultStep);

struct SentimentEvent {
  Timestamp start = 0;
  std::vector<Timestamp> emissions;  // start first, then each update
  std::vector<double> values;        // SSI_W at each emission
  double final_value = 0.0;
};

/// Opens when the value reaches the running mean of all samples so far,
/// emits an update when the value is at least `update_ratio` times the last
/// emitted one (and strictly above it), closes when the value drops below the
/// running mean.
std::vector<SentimentEvent> sentiment_detect(const SentimentSeries& series, double update_ratio = 1.1);

/// One single-feature vector per emission, sorted by snapshot time.
std::vector<events::EventVector> sentiment_vectors(std::span<const SentimentEvent> detected);

/// Maps vectors to the next market open, drops those shifted by more than
/// `max_shift`, keeps the latest vector per (start, t') and, when distinct
/// events collide on one t', only the one with the larger feature
/// `strength_index` (earlier start on ties).
std::vector<market::MappedVector> shift_and_resolve(std::span<const events::EventVector> vectors,
                                                    const market::MarketCalendar& calendar,
                                                    Timestamp max_shift = kMaxShift, Eigen::Index strength_index = 0);

/// 1 if a T_true slot lies in [start, start+length], else -1 if a T_neutral
/// slot does, else 0.
int window_label(Timestamp start, Timestamp length, const market::LabelSets& sets);

/// Output of an external window-based detector.
struct ScoredWindow {
  Timestamp start = 0;
  int predicted = 0;
  double decision = 0.0;
};

/// Labels every window, drops the -1 ones and inserts a miss for every T_true
/// slot in [slots_from, slots_to] not covered by any scored window.
eval::LabelStreamPair score_windows(std::span<const ScoredWindow> windows, Timestamp length,
                                    const market::LabelSets& sets, Timestamp slots_from, Timestamp slots_to);

}  // namespace jitterscope::baseline
