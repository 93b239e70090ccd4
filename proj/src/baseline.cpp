#include "jitterscope/baseline.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace jitterscope::baseline {

SentimentSeries sentiment_series(std::span<const events::StreamTweet> tweets, Timestamp begin, Timestamp end,
                                 Timestamp window, Timestamp step) {
  if (window <= 0 || step <= 0) throw std::invalid_argument("window and step must be positive");
  SentimentSeries s;
  s.window = window;
  s.step = step;
  std::vector<double> values;
  std::size_t lo = 0;
  std::size_t hi = 0;
  for (Timestamp t = begin; t <= end; t += step) {
    while (hi < tweets.size() && tweets[hi].timestamp <= t) ++hi;
    while (lo < hi && tweets[lo].timestamp <= t - window) ++lo;
    s.timestamps.push_back(t);
    values.push_back(events::weighted_ssi(tweets.subspan(lo, hi - lo)));
  }
  s.values = Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  return s;
}

std::vector<SentimentEvent> sentiment_detect(const SentimentSeries& series, double update_ratio) {
  std::vector<SentimentEvent> out;
  std::optional<SentimentEvent> active;
  double sum = 0.0;
  for (std::size_t i = 0; i < series.timestamps.size(); ++i) {
    const double v = series.values[static_cast<Eigen::Index>(i)];
    const Timestamp t = series.timestamps[i];
    sum += v;
    const double mean = sum / static_cast<double>(i + 1);
    if (!active) {
      if (v >= mean) active = SentimentEvent{t, {t}, {v}, v};
      continue;
    }
    if (v < mean) {
      out.push_back(std::move(*active));
      active.reset();
      continue;
    }
    const double last = active->values.back();
    if (v >= update_ratio * last && v > last) {
      active->emissions.push_back(t);
      active->values.push_back(v);
      active->final_value = v;
    }
  }
  if (active) out.push_back(std::move(*active));
  return out;
}

std::vector<events::EventVector> sentiment_vectors(std::span<const SentimentEvent> detected) {
  std::vector<events::EventVector> out;
  for (const auto& e : detected)
    for (std::size_t k = 0; k < e.emissions.size(); ++k) {
      events::EventVector v;
      v.event_start = e.start;
      v.snapshot = e.emissions[k];
      v.n_categories = 0;
      v.features = Eigen::VectorXd::Constant(1, e.values[k]);
      out.push_back(std::move(v));
    }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.snapshot < b.snapshot; });
  return out;
}

std::vector<market::MappedVector> shift_and_resolve(std::span<const events::EventVector> vectors,
                                                    const market::MarketCalendar& calendar, Timestamp max_shift,
                                                    Eigen::Index strength_index) {
  std::vector<events::EventVector> kept;
  for (const auto& v : vectors)
    if (calendar.next_open_time(v.snapshot) - v.snapshot <= max_shift) kept.push_back(v);
  auto mapped = market::dedupe_same_open(kept, calendar);

  std::map<Timestamp, std::size_t> strongest;
  for (std::size_t i = 0; i < mapped.size(); ++i) {
    auto [it, fresh] = strongest.try_emplace(mapped[i].t_prime, i);
    if (fresh) continue;
    const auto& cur = mapped[it->second];
    const double a = mapped[i].vector.features[strength_index];
    const double b = cur.vector.features[strength_index];
    if (a > b || (a == b && mapped[i].vector.event_start < cur.vector.event_start)) it->second = i;
  }
  std::vector<market::MappedVector> out;
  for (std::size_t i = 0; i < mapped.size(); ++i)
    if (strongest.at(mapped[i].t_prime) == i) out.push_back(std::move(mapped[i]));
  return out;
}

int window_label(Timestamp start, Timestamp length, const market::LabelSets& sets) {
  const auto any_in = [&](const std::vector<Timestamp>& slots) {
    auto it = std::lower_bound(slots.begin(), slots.end(), start);
    return it != slots.end() && *it <= start + length;
  };
  if (any_in(sets.true_slots)) return 1;
  if (any_in(sets.neutral_slots)) return -1;
  return 0;
}

eval::LabelStreamPair score_windows(std::span<const ScoredWindow> windows, Timestamp length,
                                    const market::LabelSets& sets, Timestamp slots_from, Timestamp slots_to) {
  eval::LabelStreamPair pair;
  for (const auto& w : windows) {
    const int c = window_label(w.start, length, sets);
    if (c == -1) continue;
    pair.entries.push_back({w.start, c, w.predicted, w.decision, false, w.start});
  }
  for (Timestamp s : sets.true_slots) {
    if (s < slots_from || s > slots_to) continue;
    const bool covered = std::any_of(windows.begin(), windows.end(),
                                     [&](const ScoredWindow& w) { return w.start <= s && s <= w.start + length; });
    if (!covered) pair.entries.push_back({s, 1, 0, -std::numeric_limits<double>::infinity(), true, s});
  }
  std::stable_sort(pair.entries.begin(), pair.entries.end(),
                   [](const auto& a, const auto& b) { return a.t_prime < b.t_prime; });
  return pair;
}

}  // namespace jitterscope::baseline
