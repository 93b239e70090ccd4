#include <doctest.h>

#include <random>

#include "jitterscope/baseline.hpp"

using namespace jitterscope;
using namespace jitterscope::baseline;

namespace {

SentimentSeries series(std::vector<double> v) {
  SentimentSeries s;
  for (std::size_t i = 0; i < v.size(); ++i) s.timestamps.push_back(static_cast<Timestamp>(i) * 300);
  s.values = Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  return s;
}

market::LabelSets slots(std::vector<Timestamp> t, std::vector<Timestamp> n) {
  market::LabelSets s;
  s.true_slots = std::move(t);
  s.neutral_slots = std::move(n);
  return s;
}

events::EventVector one(Timestamp start, Timestamp snapshot, double v) {
  return {start, snapshot, 0, Eigen::VectorXd::Constant(1, v), false};
}

}  // namespace

TEST_CASE("sentiment detector on a sawtooth") {
  const auto ev = sentiment_detect(series({1, 2, 3, 1, 2, 4}));
  REQUIRE(ev.size() == 2);
  CHECK(ev[0].start == 0);
  CHECK(ev[0].emissions == std::vector<Timestamp>{0, 300, 600});
  CHECK(ev[0].final_value == 3);
  CHECK(ev[1].start == 1200);
  CHECK(ev[1].emissions == std::vector<Timestamp>{1200, 1500});
  CHECK(ev[1].final_value == 4);
  const auto vecs = sentiment_vectors(ev);
  CHECK(vecs.size() == 5);
  CHECK(vecs.back().features[0] == 4);
}

TEST_CASE("sentiment detector: small rises do not update") {
  const auto ev = sentiment_detect(series({10, 10.5, 10.9, 11.2}));
  REQUIRE(ev.size() == 1);
  CHECK(ev[0].emissions.size() == 2);
  CHECK(ev[0].values.back() == 11.2);
}

TEST_CASE("sentiment series equals weighted SSI of each trailing window") {
  std::mt19937_64 rng(31);
  std::vector<events::StreamTweet> tweets;
  for (int i = 0; i < 400; ++i) {
    events::StreamTweet t;
    t.timestamp = static_cast<Timestamp>(rng() % 40000);
    t.followers = static_cast<std::int64_t>(rng() % 1000);
    t.ssi = static_cast<int>(rng() % 9) - 4;
    tweets.push_back(t);
  }
  std::sort(tweets.begin(), tweets.end(), [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
  const auto s = sentiment_series(tweets, 0, 40000, 3600, 600);
  REQUIRE(!s.timestamps.empty());
  for (std::size_t i = 0; i < s.timestamps.size(); ++i) {
    const Timestamp t = s.timestamps[i];
    std::vector<events::StreamTweet> in;
    for (const auto& tw : tweets)
      if (tw.timestamp > t - 3600 && tw.timestamp <= t) in.push_back(tw);
    CHECK(s.values[static_cast<Eigen::Index>(i)] == doctest::Approx(events::weighted_ssi(in)));
  }
}

TEST_CASE("window_label is monotone in window length") {
  std::mt19937_64 rng(32);
  for (int k = 0; k < 200; ++k) {
    std::vector<Timestamp> t;
    std::vector<Timestamp> n;
    for (int i = 0; i < 5; ++i) t.push_back(static_cast<Timestamp>(rng() % 100000));
    for (int i = 0; i < 5; ++i) n.push_back(static_cast<Timestamp>(rng() % 100000));
    std::sort(t.begin(), t.end());
    std::sort(n.begin(), n.end());
    const auto sets = slots(t, n);
    const auto start = static_cast<Timestamp>(rng() % 100000);
    int prev = window_label(start, 0, sets);
    for (Timestamp len = 600; len < 20000; len += 600) {
      const int cur = window_label(start, len, sets);
      // 0 -> -1 -> 1 only.
      if (prev == 1) CHECK(cur == 1);
      if (prev == -1) CHECK(cur != 0);
      prev = cur;
    }
  }
  const auto sets = slots({1000}, {500});
  CHECK(window_label(0, 1000, sets) == 1);
  CHECK(window_label(0, 999, sets) == -1);
  CHECK(window_label(0, 499, sets) == 0);
}

TEST_CASE("score_windows drops neutral windows and inserts uncovered misses") {
  const auto sets = slots({1000, 9000}, {5000});
  const std::vector<ScoredWindow> w{{0, 1, 0.5}, {4000, 1, 0.4}, {6000, 0, -0.2}};
  const auto pair = score_windows(w, 1500, sets, 0, 20000);
  REQUIRE(pair.size() == 3);
  CHECK(pair.truth_stream() == std::vector<int>{1, 0, 1});
  CHECK(pair.predicted_stream() == std::vector<int>{1, 0, 0});
  CHECK(pair.inserted_misses() == 1);
}

TEST_CASE("shift_and_resolve: long shifts dropped, stronger event wins a shared open") {
  const auto cal = market::MarketCalendar::weekdays(7 * 3600, 14 * 3600);
  const Timestamp fri = 8 * kSecondsPerDay;  // 1970-01-09
  const Timestamp mon = 11 * kSecondsPerDay;
  std::vector<events::EventVector> v{one(fri + 15 * 3600, fri + 15 * 3600, 9),  // shifts to Monday, > 24 h
                                     one(mon + 1000, mon + 1000, 2), one(mon + 2000, mon + 2000, 5),
                                     one(mon + 2000, mon + 3000, 1)};
  const auto out = shift_and_resolve(v, cal);
  REQUIRE(out.size() == 1);
  // The later event's latest vector (1) is weaker than the earlier one (2).
  CHECK(out[0].vector.event_start == mon + 1000);
  CHECK(out[0].vector.features[0] == 2);
  CHECK(out[0].t_prime == mon + 7 * 3600);
}
