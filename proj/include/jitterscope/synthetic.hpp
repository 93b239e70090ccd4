#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "jitterscope/calendar.hpp"
#include "jitterscope/common.hpp"
#include "jitterscope/ingest.hpp"

namespace jitterscope::synth {

struct PlantedEvent {
  Timestamp time = 0;
  Timestamp duration = 20 * 60;
  std::string topic;
  std::vector<std::string> words;  // drawn by every surge tweet
  int surge_size = 600;
  int words_per_tweet = 3;
  double verified_ratio = 0.1;
  double followers_median = 500.0;
  LatLon geo_center{};
  double geo_spread_km = 100.0;
  double geo_fraction = 0.5;
  double sentiment_rate = 0.8;  // share of tweets carrying a sentiment term
  int polarity = 1;             // +1 positive terms, -1 negative terms
  bool impact = false;
};

struct MarketModel {
  double base_price = 100.0;
  Timestamp bar = 300;
  double sigma = 0.0008;       // per-bar log-return stdev
  double spike_sigma = 10.0;   // spike returns in units of sigma
  int spike_bars = 3;
  Timestamp spike_delay = 600;  // after the next open at or after the event
  std::vector<Timestamp> spurious_spikes;
};

struct SyntheticScenario {
  std::uint64_t seed = 7;
  Timestamp start = 0;
  Timestamp duration = 14 * kSecondsPerDay;
  double train_fraction = 0.5;
  std::string chatter_word = "greece";  // carried by every tweet
  double background_rate = 1.0 / 120.0;  // tweets per second
  int words_per_background_tweet = 3;
  std::vector<std::string> background_words;
  double background_sentiment_rate = 0.1;
  double background_verified_ratio = 0.05;
  double background_geo_fraction = 0.3;
  std::vector<std::string> positive_terms;
  std::vector<std::string> negative_terms;
  std::vector<PlantedEvent> planted;
  MarketModel market;
  market::MarketCalendar calendar;

  Timestamp train_end() const;
  /// Throws std::invalid_argument when planted times fall outside the span.
  void validate() const;
};

struct SyntheticData {
  std::vector<ingest::TweetRecord> tweets;  // time-sorted
  std::vector<ingest::MarketBar> bars;
  nlohmann::json truth;
};

/// 14 days from Monday 2015-06-01, Mon-Fri 07:00-17:00 UTC, 20 planted
/// events (two per trading day, impact alternating so each half holds five
/// impacted and five non-impacted), spurious market spikes at 16:30.
SyntheticScenario default_scenario(std::uint64_t seed);

/// Deterministic for a given scenario (including its seed).
SyntheticData generate_synthetic(const SyntheticScenario& scenario);

/// Writes tweets.jsonl, market.csv, truth.json, calendar.json, lexicon.txt,
/// stopwords.txt and a jitterscope.conf that points at them.
void write_synthetic(const SyntheticScenario& scenario, const SyntheticData& data, const std::filesystem::path& dir);

}  // namespace jitterscope::synth
