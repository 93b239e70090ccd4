#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "jitterscope/calendar.hpp"
#include "jitterscope/common.hpp"
#include "jitterscope/events.hpp"
#include "jitterscope/ingest.hpp"

namespace jitterscope::market {

constexpr int kDefaultVolatilityWindow = 24;
constexpr Timestamp kDefaultMatchWindow = kSecondsPerHour;  // T_time
constexpr double kFalseToTrueRatio = 0.8;
// Without a calendar, bars further apart than this start a new session.
constexpr Timestamp kDefaultSessionGap = 15 * 60;

struct VolatilitySeries {
  std::vector<Timestamp> timestamps;
  Eigen::VectorXd volatility;  // V(s)
  Eigen::VectorXd slope;       // V'(s), per second; 0 at the first slot of a session
  std::vector<int> session;    // session ordinal of each slot
  std::vector<Timestamp> window_start;  // time of the oldest price in the window

  std::size_t size() const { return timestamps.size(); }
};

/// Rolling sample stdev of log returns over `window` returns ending at each
/// bar. Sessions come from `calendar` when given (bars outside every session
/// are dropped), otherwise from gaps longer than `max_gap`. Only bars with a
/// full in-session window produce a slot. Throws FatalError on a
/// non-positive price or fewer than window+2 bars.
VolatilitySeries compute_volatility(std::span<const ingest::MarketBar> bars, int window = kDefaultVolatilityWindow,
                                    const MarketCalendar* calendar = nullptr, Timestamp max_gap = kDefaultSessionGap);

enum class BaselineMode { MeanAbs, Signed, PositiveOnly };

BaselineMode parse_baseline_mode(const std::string& s);
std::string to_string(BaselineMode mode);

/// Mean of |V'|, V' or max(V', 0) over slots with timestamp <= train_end.
/// Throws FatalError when the result is not positive.
double slope_baseline(const VolatilitySeries& vol, Timestamp train_end, BaselineMode mode = BaselineMode::MeanAbs);

enum class SlotClass { True, Neutral, False };

struct LabelSets {
  std::vector<Timestamp> timestamps;
  std::vector<SlotClass> classes;
  std::vector<Timestamp> true_slots;     // sorted
  std::vector<Timestamp> neutral_slots;  // sorted
  std::vector<Timestamp> false_slots;    // sorted
  double baseline = 0.0;
  double true_threshold = 0.0;
  double false_threshold = 0.0;
};

LabelSets build_label_sets(const VolatilitySeries& vol, double multiplier, double baseline);
LabelSets build_label_sets(const VolatilitySeries& vol, double multiplier, Timestamp train_end,
                           BaselineMode mode = BaselineMode::MeanAbs);

/// 1 if a T_true slot lies strictly within `match_window` of `t_prime`, else
/// -1 if a T_neutral slot does, else 0.
int assign_label(Timestamp t_prime, const LabelSets& sets, Timestamp match_window = kDefaultMatchWindow);

/// Distance from `t` to the nearest element of sorted `slots`; nullopt if empty.
std::optional<Timestamp> nearest_distance(std::span<const Timestamp> slots, Timestamp t);

struct MappedVector {
  events::EventVector vector;
  Timestamp t_prime = 0;
};

/// Maps each vector to next_open_time(snapshot) and keeps, per (event start,
/// t'), only the latest snapshot. Input must be sorted by snapshot time.
std::vector<MappedVector> dedupe_same_open(std::span<const events::EventVector> vectors,
                                           const MarketCalendar& calendar);

struct LabeledEvent {
  Timestamp event_start = 0;
  Timestamp snapshot = 0;
  Timestamp t_prime = 0;
  int label = 0;
  Eigen::VectorXd features;
};

}  // namespace jitterscope::market
