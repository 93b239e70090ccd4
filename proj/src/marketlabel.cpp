#include "jitterscope/marketlabel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace jitterscope::market {
namespace {

double sample_stdev(std::span<const double> xs) {
  const double n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / (n - 1.0));
}

}  // namespace

VolatilitySeries compute_volatility(std::span<const ingest::MarketBar> bars, int window,
                                    const MarketCalendar* calendar, Timestamp max_gap) {
  if (window < 2) throw std::invalid_argument("volatility window must be at least 2");
  if (bars.size() < static_cast<std::size_t>(window) + 2)
    throw FatalError("need at least " + std::to_string(window + 2) + " market bars, got " +
                         std::to_string(bars.size()),
                     "label");
  for (const auto& b : bars)
    if (!(b.price > 0.0))
      throw FatalError("non-positive price at " + std::to_string(b.timestamp), "label");

  // Split bars into sessions.
  std::vector<std::vector<ingest::MarketBar>> sessions;
  std::optional<Timestamp> current_open;
  for (const auto& b : bars) {
    if (calendar) {
      const auto s = calendar->session_containing(b.timestamp);
      if (!s) continue;
      if (!current_open || *current_open != s->open) {
        sessions.emplace_back();
        current_open = s->open;
      }
    } else if (sessions.empty() || b.timestamp - sessions.back().back().timestamp > max_gap) {
      sessions.emplace_back();
    }
    sessions.back().push_back(b);
  }

  std::vector<Timestamp> times;
  std::vector<double> vol;
  std::vector<double> slope;
  std::vector<int> session_ids;
  std::vector<Timestamp> starts;
  std::vector<double> returns;
  for (std::size_t si = 0; si < sessions.size(); ++si) {
    const auto& sb = sessions[si];
    returns.clear();
    bool first_slot = true;
    for (std::size_t k = 1; k < sb.size(); ++k) {
      returns.push_back(std::log(sb[k].price / sb[k - 1].price));
      if (k < static_cast<std::size_t>(window)) continue;
      const std::span<const double> win(returns.data() + returns.size() - window, static_cast<std::size_t>(window));
      const double v = sample_stdev(win);
      const double d = first_slot ? 0.0 : (v - vol.back()) / static_cast<double>(sb[k].timestamp - times.back());
      times.push_back(sb[k].timestamp);
      vol.push_back(v);
      slope.push_back(d);
      session_ids.push_back(static_cast<int>(si));
      starts.push_back(sb[k - static_cast<std::size_t>(window)].timestamp);
      first_slot = false;
    }
  }

  VolatilitySeries out;
  out.timestamps = std::move(times);
  out.volatility = Eigen::Map<const Eigen::VectorXd>(vol.data(), static_cast<Eigen::Index>(vol.size()));
  out.slope = Eigen::Map<const Eigen::VectorXd>(slope.data(), static_cast<Eigen::Index>(slope.size()));
  out.session = std::move(session_ids);
  out.window_start = std::move(starts);
  return out;
}

BaselineMode parse_baseline_mode(const std::string& s) {
  if (s == "mean-abs") return BaselineMode::MeanAbs;
  if (s == "signed") return BaselineMode::Signed;
  if (s == "positive") return BaselineMode::PositiveOnly;
  throw std::invalid_argument("unknown baseline mode '" + s + "' (mean-abs, signed, positive)");
}

std::string to_string(BaselineMode mode) {
  switch (mode) {
    case BaselineMode::MeanAbs: return "mean-abs";
    case BaselineMode::Signed: return "signed";
    case BaselineMode::PositiveOnly: return "positive";
  }
  return "mean-abs";
}

double slope_baseline(const VolatilitySeries& vol, Timestamp train_end, BaselineMode mode) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < vol.size() && vol.timestamps[i] <= train_end; ++i) {
    const double d = vol.slope[static_cast<Eigen::Index>(i)];
    switch (mode) {
      case BaselineMode::MeanAbs: sum += std::abs(d); break;
      case BaselineMode::Signed: sum += d; break;
      case BaselineMode::PositiveOnly: sum += std::max(d, 0.0); break;
    }
    ++n;
  }
  if (n == 0) throw FatalError("no volatility slots in the training span", "label");
  const double b = sum / static_cast<double>(n);
  if (!(b > 0.0))
    throw FatalError("volatility slope baseline is " + std::to_string(b) + " (" + to_string(mode) +
                         "); cannot set thresholds",
                     "label");
  return b;
}

LabelSets build_label_sets(const VolatilitySeries& vol, double multiplier, double baseline) {
  if (!(multiplier > 0.0)) throw std::invalid_argument("multiplier must be positive");
  if (!(baseline > 0.0)) throw FatalError("baseline must be positive", "label");
  LabelSets sets;
  sets.baseline = baseline;
  sets.true_threshold = multiplier * baseline;
  sets.false_threshold = kFalseToTrueRatio * sets.true_threshold;
  sets.timestamps = vol.timestamps;
  sets.classes.reserve(vol.size());
  for (std::size_t i = 0; i < vol.size(); ++i) {
    const double d = vol.slope[static_cast<Eigen::Index>(i)];
    const Timestamp t = vol.timestamps[i];
    if (d > sets.true_threshold) {
      sets.classes.push_back(SlotClass::True);
      sets.true_slots.push_back(t);
    } else if (d < sets.false_threshold) {
      sets.classes.push_back(SlotClass::False);
      sets.false_slots.push_back(t);
    } else {
      sets.classes.push_back(SlotClass::Neutral);
      sets.neutral_slots.push_back(t);
    }
  }
  return sets;
}

LabelSets build_label_sets(const VolatilitySeries& vol, double multiplier, Timestamp train_end, BaselineMode mode) {
  return build_label_sets(vol, multiplier, slope_baseline(vol, train_end, mode));
}

std::optional<Timestamp> nearest_distance(std::span<const Timestamp> slots, Timestamp t) {
  if (slots.empty()) return std::nullopt;
  auto it = std::lower_bound(slots.begin(), slots.end(), t);
  Timestamp best = std::numeric_limits<Timestamp>::max();
  if (it != slots.end()) best = *it - t;
  if (it != slots.begin()) best = std::min(best, t - *std::prev(it));
  return best;
}

int assign_label(Timestamp t_prime, const LabelSets& sets, Timestamp match_window) {
  const auto near = [&](const std::vector<Timestamp>& slots) {
    const auto d = nearest_distance(slots, t_prime);
    return d && *d < match_window;
  };
  if (near(sets.true_slots)) return 1;
  if (near(sets.neutral_slots)) return -1;
  return 0;
}

std::vector<MappedVector> dedupe_same_open(std::span<const events::EventVector> vectors,
                                           const MarketCalendar& calendar) {
  std::vector<MappedVector> mapped;
  mapped.reserve(vectors.size());
  std::map<std::pair<Timestamp, Timestamp>, std::size_t> latest;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (i > 0 && vectors[i].snapshot < vectors[i - 1].snapshot)
      throw std::invalid_argument("dedupe_same_open needs vectors sorted by snapshot time");
    const Timestamp tp = calendar.next_open_time(vectors[i].snapshot);
    latest[{vectors[i].event_start, tp}] = i;
    mapped.push_back({vectors[i], tp});
  }
  std::vector<MappedVector> out;
  for (std::size_t i = 0; i < mapped.size(); ++i)
    if (latest.at({mapped[i].vector.event_start, mapped[i].t_prime}) == i) out.push_back(std::move(mapped[i]));
  return out;
}

}  // namespace jitterscope::market
