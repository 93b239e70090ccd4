#pragma once

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "jitterscope/clustering.hpp"
#include "jitterscope/common.hpp"
#include "jitterscope/ratetrack.hpp"

namespace jitterscope::events {

/// A tweet as the detector sees it: vocabulary tokens plus the author and
/// sentiment statistics that feed the event features.
struct StreamTweet {
  Timestamp timestamp = 0;
  std::vector<std::string> tokens;
  std::int64_t followers = 0;
  bool verified = false;
  std::optional<LatLon> location;
  int ssi = 0;
};

/// Index layout of a 2N+10 feature vector:
/// |W_0|, R_0, |W_1|, R_1, ..., |W_{N-1}|, R_{N-1}, R, S, V, F_AVG, F_MAX,
/// D_AVG, D_W_AVG, L, SSI, SSI_W.
struct FeatureLayout {
  int n_categories = 0;

  Eigen::Index dimension() const { return 2 * n_categories + 10; }
  Eigen::Index word_count(int category) const { return 2 * category; }
  Eigen::Index word_rate(int category) const { return 2 * category + 1; }
  Eigen::Index max_rate() const { return 2 * n_categories; }
  Eigen::Index max_slope() const { return 2 * n_categories + 1; }
  Eigen::Index verified_ratio() const { return 2 * n_categories + 2; }
  Eigen::Index followers_avg() const { return 2 * n_categories + 3; }
  Eigen::Index followers_max() const { return 2 * n_categories + 4; }
  Eigen::Index distance_avg() const { return 2 * n_categories + 5; }
  Eigen::Index distance_weighted_avg() const { return 2 * n_categories + 6; }
  Eigen::Index dispersion() const { return 2 * n_categories + 7; }
  Eigen::Index ssi() const { return 2 * n_categories + 8; }
  Eigen::Index ssi_weighted() const { return 2 * n_categories + 9; }

  std::vector<std::string> names() const;
};

struct EventVector {
  Timestamp event_start = 0;
  Timestamp snapshot = 0;
  int n_categories = 0;
  Eigen::VectorXd features;
  bool geo_missing = false;
};

struct AudienceFeatures {
  double verified_ratio = 0.0;
  double followers_avg = 0.0;
  double followers_max = 0.0;
};

struct GeoFeatures {
  double distance_avg = 0.0;
  double distance_weighted_avg = 0.0;
  double dispersion = 0.0;
  bool geo_missing = true;
};

struct SentimentFeatures {
  double ssi = 0.0;
  double ssi_weighted = 0.0;
};

/// V, F_AVG, F_MAX over the tweets; all zero when there are none.
AudienceFeatures audience_features(std::span<const StreamTweet> tweets);

/// Haversine distances of geo-tagged tweets to `market`. D_W_AVG weights each
/// tweet by its share of the geo-tagged followers (equal weights when nobody
/// has followers). L is the coefficient of variation of distances from the
/// mean coordinate. Zeros with `geo_missing` when no tweet has coordinates.
GeoFeatures geo_features(std::span<const StreamTweet> tweets, const LatLon& market);

/// SSI = |mean ssi|, SSI_W = |follower-weighted mean ssi|.
SentimentFeatures sentiment_features(std::span<const StreamTweet> tweets);

/// Follower-weighted |mean ssi|; shared by the event features and the
/// sentiment baseline.
double weighted_ssi(std::span<const StreamTweet> tweets);

/// Elementwise maximum over snapshots. Requires at least one.
Eigen::VectorXd merge_max(std::span<const Eigen::VectorXd> snapshots);

struct WordPeak {
  double rate = 0.0;
  double slope = 0.0;
};

/// State of the single active event.
struct ActiveEvent {
  Timestamp start = 0;
  std::vector<Timestamp> update_times;
  std::set<std::string> words;                 // every word bursty since start
  std::map<std::string, WordPeak> peaks;       // running maxima since start
  std::map<std::string, double> rates_at_last_update;
  std::vector<StreamTweet> tweets;             // candidate tweets since start
  std::vector<Eigen::VectorXd> snapshots;      // raw per-update features
  Eigen::VectorXd merged;

  Timestamp last_update() const { return update_times.back(); }

  /// Tweets containing at least one of the event's words.
  std::vector<StreamTweet> associated_tweets() const;
};

struct WordFeatures {
  Eigen::VectorXd counts;  // |W_i|
  Eigen::VectorXd rates;   // R_i
  double max_rate = 0.0;   // R
  double max_slope = 0.0;  // S
};

/// Per-category word counts and peak rates, R and S, over the event's words.
WordFeatures word_features(const ActiveEvent& event, const ratetrack::WordClustering& clustering);

/// Raw (unmerged) feature snapshot of `event` at its current state.
Eigen::VectorXd raw_snapshot(const ActiveEvent& event, const ratetrack::WordClustering& clustering,
                             const LatLon& market, bool* geo_missing = nullptr);

struct DetectorConfig {
  double bandwidth = ratetrack::kDefaultBandwidth;
  Timestamp tick = 60;
  // Rates and slopes are read at tick - evaluation_lag. A kernel estimate read
  // at the newest arrival only sees the past, so its slope is never positive.
  double evaluation_lag = ratetrack::kDefaultBandwidth;
  Timestamp max_event_age = kSecondsPerDay;
  double update_ratio = 1.1;
  LatLon market_location{37.9838, 23.7275};
};

/// The detection loop. Tracks every word of the clustering vocabulary; other
/// tokens are ignored.
class Detector {
public:
  Detector(DetectorConfig config, ratetrack::BurstThresholds thresholds, ratetrack::WordClustering clustering);

  /// Processes the tweets that arrived in (now - tick, now] and returns the
  /// vectors emitted at `now`. Throws std::logic_error if `now` decreases.
  std::vector<EventVector> tick(Timestamp now, std::span<const StreamTweet> new_tweets);

  const std::optional<ActiveEvent>& active() const { return active_; }
  const ratetrack::WordClustering& clustering() const { return clustering_; }
  const ratetrack::WordRateTrack& track(const std::string& word) const;
  std::set<std::string> bursty_words() const;

private:
  EventVector emit(Timestamp now, const std::map<std::string, double>& rates);
  void open_event(Timestamp now, std::vector<StreamTweet> tick_tweets, const std::set<std::string>& bursty,
                  const std::map<std::string, ratetrack::RateSlope>& live);

  DetectorConfig config_;
  ratetrack::BurstThresholds thresholds_;
  ratetrack::WordClustering clustering_;
  FeatureLayout layout_;
  std::vector<ratetrack::WordRateTrack> tracks_;
  std::map<std::string, std::size_t, std::less<>> track_index_;
  std::optional<ActiveEvent> active_;
  std::deque<StreamTweet> recent_;  // tweets since the lagged read time while idle
  std::optional<Timestamp> last_now_;
};

/// Runs the detector over time-sorted tweets with ticks on multiples of
/// `config.tick`, from the first tick after `begin` through `end`.
std::vector<EventVector> run_detection(std::span<const StreamTweet> tweets, const DetectorConfig& config,
                                       const ratetrack::BurstThresholds& thresholds,
                                       const ratetrack::WordClustering& clustering, Timestamp begin, Timestamp end);

}  // namespace jitterscope::events
