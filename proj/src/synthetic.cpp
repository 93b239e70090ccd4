#include "jitterscope/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <stdexcept>

#include "jitterscope/config.hpp"

namespace jitterscope::synth {
namespace {

constexpr std::uint64_t kMarketStream = 0x9e3779b97f4a7c15ULL;

const std::vector<std::string> kFinance{"bank",  "bond",    "debt",     "euro",      "stock",   "loan",
                                        "bailout", "creditor", "default", "deposit", "yield", "tranche",
                                        "austerity", "memorandum", "drachma", "haircut"};
const std::vector<std::string> kPolitics{"election", "parliament", "minister", "vote",   "campaign", "senator",
                                         "ballot",   "coalition",  "opposition", "speech", "debate",   "candidate",
                                         "poll",     "mayor",      "council",  "protest"};
const std::vector<std::string> kGossip{"celebrity", "actress", "singer", "wedding", "divorce", "concert",
                                       "album",     "fashion", "movie",  "premiere", "scandal", "romance",
                                       "tour",      "award",   "dress",  "party"};

const LatLon kAthens{37.9838, 23.7275};
const std::vector<LatLon> kFarCentres{{40.7128, -74.0060}, {51.5074, -0.1278}, {35.6762, 139.6503}};

std::vector<std::string> background_vocabulary(int n) {
  static constexpr char kCons[] = "bdfgklmnprstvz";
  static constexpr char kVow[] = "aeiou";
  constexpr int nc = sizeof kCons - 1;
  constexpr int nv = sizeof kVow - 1;
  constexpr int syllables = nc * nv;
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) {
    const int a = i % syllables;
    const int b = ((i / syllables) * 17 + 11 + i) % syllables;
    std::string w;
    w += kCons[a % nc];
    w += kVow[a / nc];
    w += kCons[b % nc];
    w += kVow[b / nc];
    w += 'k';
    out.push_back(w);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::string> sample_distinct(const std::vector<std::string>& pool, std::size_t k, std::mt19937_64& rng) {
  std::vector<std::string> copy = pool;
  std::shuffle(copy.begin(), copy.end(), rng);
  copy.resize(std::min(k, copy.size()));
  return copy;
}

LatLon offset_point(const LatLon& centre, double spread_km, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double r = spread_km * std::sqrt(u(rng));
  const double theta = 2.0 * std::numbers::pi * u(rng);
  const double dlat = r * std::cos(theta) / 111.0;
  const double dlon = r * std::sin(theta) / (111.0 * std::max(0.1, std::cos(centre.lat * std::numbers::pi / 180.0)));
  return {std::clamp(centre.lat + dlat, -89.9, 89.9), std::remainder(centre.lon + dlon, 360.0)};
}

std::int64_t sample_followers(double median, std::mt19937_64& rng) {
  std::lognormal_distribution<double> d(std::log(std::max(1.0, median)), 1.0);
  return static_cast<std::int64_t>(std::floor(d(rng)));
}

std::string join_words(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) out += (out.empty() ? "" : " ") + w;
  return out;
}

}  // namespace

Timestamp SyntheticScenario::train_end() const {
  return start + static_cast<Timestamp>(std::floor(train_fraction * static_cast<double>(duration)));
}

void SyntheticScenario::validate() const {
  if (duration <= 0) throw std::invalid_argument("scenario duration must be positive");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw std::invalid_argument("train_fraction must lie in (0,1)");
  if (background_rate < 0.0) throw std::invalid_argument("background rate must be non-negative");
  if (background_rate > 0.0 && background_words.empty())
    throw std::invalid_argument("background rate needs background words");
  for (const auto& p : planted) {
    if (p.time < start || p.time + p.duration > start + duration)
      throw std::invalid_argument("planted event at " + std::to_string(p.time) + " lies outside the scenario");
    if (p.words.empty() || p.surge_size < 0 || p.duration <= 0)
      throw std::invalid_argument("planted event needs words, a duration and a non-negative size");
  }
}

SyntheticScenario default_scenario(std::uint64_t seed) {
  SyntheticScenario s;
  s.seed = seed;
  s.start = 1433116800;  // Monday 2015-06-01 00:00 UTC
  s.duration = 14 * kSecondsPerDay;
  s.background_words = background_vocabulary(200);
  s.positive_terms = {"good", "great", "excellent", "happy", "strong", "gain"};
  s.negative_terms = {"bad", "terrible", "crash", "panic", "fear", "loss"};
  std::array<std::optional<market::MarketCalendar::DailyHours>, 7> weekly{};
  for (int d = 0; d < 5; ++d) weekly[static_cast<std::size_t>(d)] = market::MarketCalendar::DailyHours{7 * kSecondsPerHour, 17 * kSecondsPerHour};
  const auto first_day = s.start / kSecondsPerDay;
  s.calendar = market::MarketCalendar(weekly, {}, first_day, first_day + 20);

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Timestamp> jitter(-15 * 60, 15 * 60);
  int non_impact_count = 0;
  for (int week = 0; week < 2; ++week)
    for (int wd = 0; wd < 5; ++wd) {
      const Timestamp day = s.start + (week * 7 + wd) * kSecondsPerDay;
      for (int slot = 0; slot < 2; ++slot) {
        PlantedEvent e;
        e.time = day + (slot == 0 ? 10 * kSecondsPerHour : 13 * kSecondsPerHour + 1800) + jitter(rng);
        e.impact = (slot == 0) == (wd % 2 == 0);
        e.polarity = (week * 5 + wd + slot) % 2 == 0 ? 1 : -1;
        if (e.impact) {
          e.topic = "finance";
          e.words = sample_distinct(kFinance, 6, rng);
          e.verified_ratio = 0.5;
          e.followers_median = 20000.0;
          e.geo_center = kAthens;
          e.geo_spread_km = 30.0;
          e.geo_fraction = 0.6;
        } else {
          const bool politics = non_impact_count % 2 == 0;
          e.topic = politics ? "politics" : "gossip";
          e.words = sample_distinct(politics ? kPolitics : kGossip, 6, rng);
          e.verified_ratio = 0.05;
          e.followers_median = 300.0;
          e.geo_center = kFarCentres[static_cast<std::size_t>(non_impact_count) % kFarCentres.size()];
          e.geo_spread_km = 500.0;
          e.geo_fraction = 0.4;
          ++non_impact_count;
        }
        s.planted.push_back(std::move(e));
      }
    }
  for (int d : {1, 4, 8, 10}) s.market.spurious_spikes.push_back(s.start + d * kSecondsPerDay + 16 * kSecondsPerHour + 1800);
  s.validate();
  return s;
}

SyntheticData generate_synthetic(const SyntheticScenario& scenario) {
  scenario.validate();
  SyntheticData data;
  std::mt19937_64 rng(scenario.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int author = 0;

  const auto sentiment_term = [&](int polarity) {
    const auto& pool = polarity > 0 ? scenario.positive_terms : scenario.negative_terms;
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    return pool[pick(rng)];
  };

  // Background chatter as a Poisson process.
  if (scenario.background_rate > 0.0) {
    std::exponential_distribution<double> gap(scenario.background_rate);
    double t = static_cast<double>(scenario.start);
    const double end = static_cast<double>(scenario.start + scenario.duration);
    while (true) {
      t += gap(rng);
      if (t >= end) break;
      ingest::TweetRecord r;
      r.timestamp = static_cast<Timestamp>(std::floor(t));
      auto words = sample_distinct(scenario.background_words,
                                   static_cast<std::size_t>(scenario.words_per_background_tweet), rng);
      words.insert(words.begin(), scenario.chatter_word);
      if (!scenario.positive_terms.empty() && !scenario.negative_terms.empty() &&
          unit(rng) < scenario.background_sentiment_rate)
        words.push_back(sentiment_term(unit(rng) < 0.5 ? 1 : -1));
      r.text = join_words(words);
      r.author_id = "u" + std::to_string(author++ % 5000);
      r.followers = sample_followers(200.0, rng);
      r.verified = unit(rng) < scenario.background_verified_ratio;
      if (unit(rng) < scenario.background_geo_fraction)
        r.location = LatLon{-60.0 + 130.0 * unit(rng), -180.0 + 360.0 * unit(rng)};
      data.tweets.push_back(std::move(r));
    }
  }

  // Planted surges.
  for (const auto& p : scenario.planted) {
    std::uniform_real_distribution<double> when(0.0, static_cast<double>(p.duration));
    for (int k = 0; k < p.surge_size; ++k) {
      ingest::TweetRecord r;
      r.timestamp = p.time + static_cast<Timestamp>(std::floor(when(rng)));
      auto words = sample_distinct(p.words, static_cast<std::size_t>(p.words_per_tweet), rng);
      words.insert(words.begin(), scenario.chatter_word);
      if (!scenario.positive_terms.empty() && !scenario.negative_terms.empty() && unit(rng) < p.sentiment_rate)
        words.push_back(sentiment_term(p.polarity));
      r.text = join_words(words);
      r.author_id = "u" + std::to_string(author++ % 5000);
      r.followers = sample_followers(p.followers_median, rng);
      r.verified = unit(rng) < p.verified_ratio;
      if (unit(rng) < p.geo_fraction) r.location = offset_point(p.geo_center, p.geo_spread_km, rng);
      data.tweets.push_back(std::move(r));
    }
  }
  std::stable_sort(data.tweets.begin(), data.tweets.end(),
                   [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });

  // Market: log random walk on session bars, plus spike returns.
  const auto& mk = scenario.market;
  std::mt19937_64 mrng(scenario.seed ^ kMarketStream);
  std::normal_distribution<double> z(0.0, 1.0);
  const auto sessions = scenario.calendar.sessions_between(scenario.start, scenario.start + scenario.duration);
  std::map<Timestamp, int> spike_left;  // bar time -> remaining spike bars starting there
  const auto bar_at_or_after = [&](Timestamp t) {
    for (const auto& s : sessions) {
      if (t > s.close) continue;
      const Timestamp from = std::max(t, s.open);
      return s.open + ((from - s.open + mk.bar - 1) / mk.bar) * mk.bar;
    }
    return t;
  };
  nlohmann::json spikes = nlohmann::json::array();
  for (const auto& p : scenario.planted)
    if (p.impact) {
      const Timestamp t0 = bar_at_or_after(scenario.calendar.next_open_time(p.time) + mk.spike_delay);
      spike_left[t0] = mk.spike_bars;
      spikes.push_back({{"time", t0}, {"kind", "impact"}});
    }
  for (Timestamp t : mk.spurious_spikes) {
    const Timestamp t0 = bar_at_or_after(t);
    spike_left[t0] = mk.spike_bars;
    spikes.push_back({{"time", t0}, {"kind", "spurious"}});
  }
  double logp = std::log(mk.base_price);
  int spiking = 0;
  for (const auto& s : sessions) {
    for (Timestamp t = s.open; t <= s.close; t += mk.bar) {
      if (auto it = spike_left.find(t); it != spike_left.end()) spiking = it->second;
      double r = mk.sigma * z(mrng);
      if (spiking > 0) {
        r += (unit(mrng) < 0.5 ? -1.0 : 1.0) * mk.spike_sigma * mk.sigma;
        --spiking;
      }
      if (t != s.open || !data.bars.empty()) logp += r;
      data.bars.push_back({t, std::exp(logp)});
    }
    spiking = 0;
  }

  nlohmann::json events = nlohmann::json::array();
  for (const auto& p : scenario.planted)
    events.push_back({{"time", p.time},
                      {"end", p.time + p.duration},
                      {"impact", p.impact},
                      {"topic", p.topic},
                      {"words", p.words},
                      {"surge_size", p.surge_size}});
  data.truth = {{"seed", scenario.seed},
                {"start", scenario.start},
                {"end", scenario.start + scenario.duration},
                {"train_end", scenario.train_end()},
                {"events", events},
                {"spikes", spikes}};
  return data;
}

void write_synthetic(const SyntheticScenario& scenario, const SyntheticData& data, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  ingest::write_tweet_stream(dir / "tweets.jsonl", data.tweets);
  ingest::write_market_csv(dir / "market.csv", data.bars);
  const auto write_text = [&](const char* name, const std::string& text) {
    std::ofstream out(dir / name);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    out << text;
  };
  write_text("truth.json", data.truth.dump(2) + "\n");
  write_text("calendar.json", scenario.calendar.to_json().dump(2) + "\n");

  static const std::map<std::string, int> kStrength{{"good", 2},  {"great", 3},     {"excellent", 4}, {"happy", 3},
                                                    {"strong", 2}, {"gain", 2},     {"bad", -2},      {"terrible", -4},
                                                    {"crash", -4}, {"panic", -3},   {"fear", -3},     {"loss", -2}};
  std::string lex = "# synthetic scenario lexicon\n";
  for (const auto* pool : {&scenario.positive_terms, &scenario.negative_terms})
    for (const auto& t : *pool) {
      auto it = kStrength.find(t);
      const int v = it != kStrength.end() ? it->second : (pool == &scenario.positive_terms ? 2 : -2);
      lex += t + "\t" + std::to_string(v) + "\n";
    }
  lex += "[boosters]\nvery\t1\nextremely\t2\n[negations]\nnot\nnever\n";
  write_text("lexicon.txt", lex);
  write_text("stopwords.txt", "a\nan\nand\nare\nas\nat\nbe\nby\nfor\nfrom\nin\nis\nit\nof\non\nor\nthat\nthe\nto\nwas\nwith\n");

  pipeline::PipelineConfig cfg;
  cfg.tweets = "tweets.jsonl";
  cfg.market = "market.csv";
  cfg.lexicon = "lexicon.txt";
  cfg.stopwords = "stopwords.txt";
  cfg.calendar = "calendar.json";
  cfg.truth = "truth.json";
  cfg.out_dir = "out";
  cfg.keywords = {scenario.chatter_word};
  cfg.train_end = scenario.train_end();
  cfg.seed = scenario.seed;
  std::ofstream conf(dir / "jitterscope.conf");
  conf << "; generated synthetic scenario, seed " << scenario.seed << "\n";
  pipeline::write_config(conf, cfg);
}

}  // namespace jitterscope::synth
