#include "jitterscope/events.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace jitterscope::events {

std::vector<std::string> FeatureLayout::names() const {
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(dimension()));
  for (int i = 0; i < n_categories; ++i) {
    out.push_back("W_" + std::to_string(i));
    out.push_back("R_" + std::to_string(i));
  }
  for (const char* name : {"R", "S", "V", "F_AVG", "F_MAX", "D_AVG", "D_W_AVG", "L", "SSI", "SSI_W"})
    out.emplace_back(name);
  return out;
}

AudienceFeatures audience_features(std::span<const StreamTweet> tweets) {
  AudienceFeatures out;
  if (tweets.empty()) return out;
  double verified = 0.0;
  double followers = 0.0;
  for (const auto& t : tweets) {
    if (t.verified) verified += 1.0;
    followers += static_cast<double>(t.followers);
    out.followers_max = std::max(out.followers_max, static_cast<double>(t.followers));
  }
  const double n = static_cast<double>(tweets.size());
  out.verified_ratio = verified / n;
  out.followers_avg = followers / n;
  return out;
}

GeoFeatures geo_features(std::span<const StreamTweet> tweets, const LatLon& market) {
  GeoFeatures out;
  std::vector<const StreamTweet*> geo;
  for (const auto& t : tweets)
    if (t.location) geo.push_back(&t);
  if (geo.empty()) return out;
  out.geo_missing = false;

  const double n = static_cast<double>(geo.size());
  double follower_total = 0.0;
  for (const auto* t : geo) follower_total += static_cast<double>(t->followers);

  LatLon centre{0.0, 0.0};
  for (const auto* t : geo) {
    const double d = haversine_km(*t->location, market);
    const double w = follower_total > 0.0 ? static_cast<double>(t->followers) / follower_total : 1.0 / n;
    out.distance_avg += d / n;
    out.distance_weighted_avg += w * d;
    centre.lat += t->location->lat / n;
    centre.lon += t->location->lon / n;
  }

  double mean = 0.0;
  std::vector<double> from_centre;
  from_centre.reserve(geo.size());
  for (const auto* t : geo) {
    from_centre.push_back(haversine_km(*t->location, centre));
    mean += from_centre.back() / n;
  }
  if (mean > 0.0) {
    double var = 0.0;
    for (double d : from_centre) var += (d - mean) * (d - mean) / n;
    out.dispersion = std::sqrt(var) / mean;
  }
  return out;
}

double weighted_ssi(std::span<const StreamTweet> tweets) {
  if (tweets.empty()) return 0.0;
  double follower_total = 0.0;
  for (const auto& t : tweets) follower_total += static_cast<double>(t.followers);
  const double n = static_cast<double>(tweets.size());
  double acc = 0.0;
  for (const auto& t : tweets) {
    const double w = follower_total > 0.0 ? static_cast<double>(t.followers) / follower_total : 1.0 / n;
    acc += w * t.ssi;
  }
  return std::abs(acc);
}

SentimentFeatures sentiment_features(std::span<const StreamTweet> tweets) {
  SentimentFeatures out;
  if (tweets.empty()) return out;
  double sum = 0.0;
  for (const auto& t : tweets) sum += t.ssi;
  out.ssi = std::abs(sum / static_cast<double>(tweets.size()));
  out.ssi_weighted = weighted_ssi(tweets);
  return out;
}

Eigen::VectorXd merge_max(std::span<const Eigen::VectorXd> snapshots) {
  if (snapshots.empty()) throw std::invalid_argument("merge_max needs at least one snapshot");
  Eigen::VectorXd out = snapshots.front();
  for (const auto& s : snapshots.subspan(1)) {
    if (s.size() != out.size()) throw std::invalid_argument("merge_max: dimension mismatch");
    out = out.cwiseMax(s);
  }
  return out;
}

std::vector<StreamTweet> ActiveEvent::associated_tweets() const {
  std::vector<StreamTweet> out;
  for (const auto& t : tweets) {
    if (std::any_of(t.tokens.begin(), t.tokens.end(), [&](const std::string& w) { return words.contains(w); }))
      out.push_back(t);
  }
  return out;
}

WordFeatures word_features(const ActiveEvent& event, const ratetrack::WordClustering& clustering) {
  const int n = clustering.n_categories();
  WordFeatures out;
  out.counts = Eigen::VectorXd::Zero(n);
  out.rates = Eigen::VectorXd::Zero(n);
  out.max_slope = 0.0;
  bool any_slope = false;
  for (const auto& w : event.words) {
    const auto cat = clustering.category_of(w);
    if (!cat) continue;
    out.counts[*cat] += 1.0;
    const auto peak = event.peaks.find(w);
    if (peak == event.peaks.end()) continue;
    out.rates[*cat] = std::max(out.rates[*cat], peak->second.rate);
    out.max_slope = any_slope ? std::max(out.max_slope, peak->second.slope) : peak->second.slope;
    any_slope = true;
  }
  out.max_rate = n > 0 ? out.rates.maxCoeff() : 0.0;
  return out;
}

Eigen::VectorXd raw_snapshot(const ActiveEvent& event, const ratetrack::WordClustering& clustering,
                             const LatLon& market, bool* geo_missing) {
  const FeatureLayout layout{clustering.n_categories()};
  Eigen::VectorXd f = Eigen::VectorXd::Zero(layout.dimension());
  const auto wf = word_features(event, clustering);
  for (int i = 0; i < layout.n_categories; ++i) {
    f[layout.word_count(i)] = wf.counts[i];
    f[layout.word_rate(i)] = wf.rates[i];
  }
  f[layout.max_rate()] = wf.max_rate;
  f[layout.max_slope()] = wf.max_slope;

  const auto tweets = event.associated_tweets();
  const auto audience = audience_features(tweets);
  const auto geo = geo_features(tweets, market);
  const auto senti = sentiment_features(tweets);
  f[layout.verified_ratio()] = audience.verified_ratio;
  f[layout.followers_avg()] = audience.followers_avg;
  f[layout.followers_max()] = audience.followers_max;
  f[layout.distance_avg()] = geo.distance_avg;
  f[layout.distance_weighted_avg()] = geo.distance_weighted_avg;
  f[layout.dispersion()] = geo.dispersion;
  f[layout.ssi()] = senti.ssi;
  f[layout.ssi_weighted()] = senti.ssi_weighted;
  if (geo_missing) *geo_missing = geo.geo_missing;
  return f;
}

Detector::Detector(DetectorConfig config, ratetrack::BurstThresholds thresholds,
                   ratetrack::WordClustering clustering)
    : config_(config), thresholds_(thresholds), clustering_(std::move(clustering)),
      layout_{clustering_.n_categories()} {
  if (config_.tick <= 0) throw std::invalid_argument("tick must be positive");
  if (!(config_.evaluation_lag >= 0)) throw std::invalid_argument("evaluation lag must not be negative");
  tracks_.reserve(clustering_.words().size());
  for (const auto& w : clustering_.words()) {
    track_index_.emplace(w, tracks_.size());
    tracks_.emplace_back(w, config_.bandwidth);
  }
}

const ratetrack::WordRateTrack& Detector::track(const std::string& word) const {
  const auto it = track_index_.find(word);
  if (it == track_index_.end()) throw std::out_of_range("untracked word: " + word);
  return tracks_[it->second];
}

std::set<std::string> Detector::bursty_words() const {
  std::set<std::string> out;
  for (const auto& t : tracks_)
    if (t.state() == ratetrack::BurstState::Bursty) out.insert(t.word());
  return out;
}

EventVector Detector::emit(Timestamp now, const std::map<std::string, double>& rates) {
  auto& ev = *active_;
  bool geo_missing = true;
  ev.snapshots.push_back(raw_snapshot(ev, clustering_, config_.market_location, &geo_missing));
  ev.merged = ev.snapshots.size() == 1 ? ev.snapshots.front() : ev.merged.cwiseMax(ev.snapshots.back()).eval();
  ev.update_times.push_back(now);
  ev.rates_at_last_update = rates;
  return EventVector{ev.start, now, layout_.n_categories, ev.merged, geo_missing};
}

void Detector::open_event(Timestamp now, std::vector<StreamTweet> tick_tweets, const std::set<std::string>& bursty,
                          const std::map<std::string, ratetrack::RateSlope>& live) {
  ActiveEvent ev;
  ev.start = now;
  ev.words = bursty;
  ev.tweets = std::move(tick_tweets);
  for (const auto& [w, rs] : live) ev.peaks[w] = WordPeak{rs.rate, rs.slope};
  active_ = std::move(ev);
}

std::vector<EventVector> Detector::tick(Timestamp now, std::span<const StreamTweet> new_tweets) {
  if (last_now_ && now < *last_now_) throw std::logic_error("detection tick time decreased");
  last_now_ = now;

  // Tweets that arrived in this tick; retained only if an event is (or
  // becomes) active.
  std::vector<StreamTweet> tick_tweets;
  tick_tweets.reserve(new_tweets.size());
  for (const auto& tw : new_tweets) {
    StreamTweet kept = tw;
    kept.tokens.clear();
    for (const auto& tok : tw.tokens) {
      const auto it = track_index_.find(tok);
      if (it == track_index_.end()) continue;
      if (std::find(kept.tokens.begin(), kept.tokens.end(), tok) != kept.tokens.end()) continue;
      kept.tokens.push_back(tok);
      tracks_[it->second].add_arrival(static_cast<double>(tw.timestamp));
    }
    if (!kept.tokens.empty()) tick_tweets.push_back(std::move(kept));
  }

  const double t = static_cast<double>(now) - config_.evaluation_lag;
  const double horizon = t - ratetrack::kKernelCutoff * config_.bandwidth;
  std::map<std::string, ratetrack::RateSlope> live;
  std::set<std::string> bursty;
  for (auto& track : tracks_) {
    track.prune_before(horizon);
    ratetrack::RateSlope rs;
    if (!track.empty()) {
      rs = track.rate_and_slope_at(t);
      live.emplace(track.word(), rs);
    }
    track.apply_burst_rule(t, rs, thresholds_);
    if (track.state() == ratetrack::BurstState::Bursty) bursty.insert(track.word());
  }
  std::map<std::string, double> rates;
  for (const auto& [w, rs] : live) rates.emplace(w, rs.rate);

  std::vector<EventVector> emitted;
  if (active_ && (bursty.empty() || now - active_->start > config_.max_event_age)) active_.reset();

  if (!active_) {
    recent_.insert(recent_.end(), std::make_move_iterator(tick_tweets.begin()),
                   std::make_move_iterator(tick_tweets.end()));
    while (!recent_.empty() && static_cast<double>(recent_.front().timestamp) < t) recent_.pop_front();
    if (bursty.empty()) return emitted;
    open_event(now, {std::make_move_iterator(recent_.begin()), std::make_move_iterator(recent_.end())}, bursty, live);
    recent_.clear();
    emitted.push_back(emit(now, rates));
    return emitted;
  }

  auto& ev = *active_;
  ev.tweets.insert(ev.tweets.end(), std::make_move_iterator(tick_tweets.begin()),
                   std::make_move_iterator(tick_tweets.end()));
  ev.words.insert(bursty.begin(), bursty.end());
  for (const auto& [w, rs] : live) {
    auto [it, inserted] = ev.peaks.try_emplace(w, WordPeak{rs.rate, rs.slope});
    if (!inserted) {
      it->second.rate = std::max(it->second.rate, rs.rate);
      it->second.slope = std::max(it->second.slope, rs.slope);
    }
  }

  double total_now = 0.0;
  double total_last = 0.0;
  for (const auto& w : ev.words) {
    if (auto it = rates.find(w); it != rates.end()) total_now += it->second;
    if (auto it = ev.rates_at_last_update.find(w); it != ev.rates_at_last_update.end()) total_last += it->second;
  }
  if (total_now > config_.update_ratio * total_last) emitted.push_back(emit(now, rates));
  return emitted;
}

std::vector<EventVector> run_detection(std::span<const StreamTweet> tweets, const DetectorConfig& config,
                                       const ratetrack::BurstThresholds& thresholds,
                                       const ratetrack::WordClustering& clustering, Timestamp begin, Timestamp end) {
  Detector detector(config, thresholds, clustering);
  std::vector<EventVector> out;
  const Timestamp step = config.tick;
  // First tick strictly after `begin`, aligned to a multiple of the tick.
  Timestamp now = (begin >= 0 ? begin / step : (begin - step + 1) / step) * step + step;
  std::size_t next = 0;
  while (next < tweets.size() && tweets[next].timestamp <= now - step) ++next;
  for (; now <= end; now += step) {
    const std::size_t first = next;
    while (next < tweets.size() && tweets[next].timestamp <= now) ++next;
    auto emitted = detector.tick(now, tweets.subspan(first, next - first));
    out.insert(out.end(), std::make_move_iterator(emitted.begin()), std::make_move_iterator(emitted.end()));
  }
  return out;
}

}  // namespace jitterscope::events
