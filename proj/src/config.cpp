#include "jitterscope/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <stdexcept>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace jitterscope::pipeline {
namespace {

namespace fs = std::filesystem;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s + ",") {
    if (c == ',') {
      const auto t = trim(cur);
      if (!t.empty()) out.push_back(t);
      cur.clear();
    } else {
      cur += c;
    }
  }
  return out;
}

std::string fmt(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

double to_double(const std::string& key, const std::string& s) {
  double v = 0.0;
  const auto t = trim(s);
  const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
  if (r.ec != std::errc{} || r.ptr != t.data() + t.size())
    throw std::invalid_argument("config: '" + s + "' is not a number (" + key + ")");
  return v;
}

std::int64_t to_int(const std::string& key, const std::string& s) {
  std::int64_t v = 0;
  const auto t = trim(s);
  const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
  if (r.ec != std::errc{} || r.ptr != t.data() + t.size())
    throw std::invalid_argument("config: '" + s + "' is not an integer (" + key + ")");
  return v;
}

template <typename T>
std::string join(const std::vector<T>& xs, const std::function<std::string(const T&)>& f) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ", " : "") + f(xs[i]);
  return out;
}

ml::ClassWeights parse_weights(const std::string& key, const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("config key " + key + ": weights look like 1:2");
  return {to_double(key, s.substr(0, colon)), to_double(key, s.substr(colon + 1))};
}

fs::path resolve(const fs::path& base, const std::string& s) {
  if (s.empty()) return {};
  fs::path p(s);
  return p.is_absolute() ? p : base / p;
}

struct Key {
  std::string doc;
  std::function<void(PipelineConfig&, const std::string&)> set;
  std::function<std::string(const PipelineConfig&)> get;
};

using Schema = std::vector<std::pair<std::string, std::vector<std::pair<std::string, Key>>>>;

// Path setters resolve against `base`.
Schema make_schema(const fs::path& base) {
  const auto path_key = [base](fs::path PipelineConfig::*member, std::string doc) {
    return Key{std::move(doc), [base, member](PipelineConfig& c, const std::string& v) { c.*member = resolve(base, v); },
               [member](const PipelineConfig& c) { return (c.*member).string(); }};
  };
  const auto dbl = [](double PipelineConfig::*member, std::string doc) {
    return Key{doc, [member, doc](PipelineConfig& c, const std::string& v) { c.*member = to_double(doc, v); },
               [member](const PipelineConfig& c) { return fmt(c.*member); }};
  };
  const auto i64 = [](Timestamp PipelineConfig::*member, std::string doc) {
    return Key{doc, [member, doc](PipelineConfig& c, const std::string& v) { c.*member = to_int(doc, v); },
               [member](const PipelineConfig& c) { return std::to_string(c.*member); }};
  };
  const auto int32 = [](int PipelineConfig::*member, std::string doc) {
    return Key{doc,
               [member, doc](PipelineConfig& c, const std::string& v) { c.*member = static_cast<int>(to_int(doc, v)); },
               [member](const PipelineConfig& c) { return std::to_string(c.*member); }};
  };

  return {
      {"paths",
       {{"tweets", path_key(&PipelineConfig::tweets, "tweet JSON-lines file")},
        {"market", path_key(&PipelineConfig::market, "market CSV with header ts,price")},
        {"lexicon", path_key(&PipelineConfig::lexicon, "sentiment lexicon")},
        {"stopwords", path_key(&PipelineConfig::stopwords, "stop-word list, one per line")},
        {"calendar", path_key(&PipelineConfig::calendar, "market calendar JSON")},
        {"truth", path_key(&PipelineConfig::truth, "planted ground truth JSON (optional)")},
        {"out", path_key(&PipelineConfig::out_dir, "artifact directory (default out)")}}},
      {"ingest",
       {{"keywords", Key{"comma-separated filter terms; empty keeps every tweet",
                         [](PipelineConfig& c, const std::string& v) { c.keywords = split_list(v); },
                         [](const PipelineConfig& c) {
                           return join<std::string>(c.keywords, [](const std::string& k) { return k; });
                         }}},
        {"vocabulary_min_count", int32(&PipelineConfig::vocabulary_min_count,
                                       "training tweets a stem needs to be tracked (default 5)")},
        {"vocabulary_max_words",
         int32(&PipelineConfig::vocabulary_max_words, "most frequent stems kept (default 2000)")}}},
      {"ratetrack",
       {{"bandwidth", dbl(&PipelineConfig::bandwidth, "kernel bandwidth in seconds (default 600)")},
        {"grid_step", dbl(&PipelineConfig::grid_step, "calibration and clustering grid step in seconds (default 300)")},
        {"cluster_cutoff", dbl(&PipelineConfig::cluster_cutoff, "average-linkage distance cutoff (default 0.7)")}}},
      {"events",
       {{"tick", i64(&PipelineConfig::tick, "detection period in seconds (default 60)")},
        {"evaluation_lag", dbl(&PipelineConfig::evaluation_lag,
                               "seconds behind each tick at which rates and slopes are read (default 600)")},
        {"max_event_age", i64(&PipelineConfig::max_event_age, "event lifetime cap in seconds (default 86400)")},
        {"update_ratio", dbl(&PipelineConfig::update_ratio, "rate-sum growth that emits an update (default 1.1)")},
        {"market_lat", Key{"market latitude (default 37.9838)",
                           [](PipelineConfig& c, const std::string& v) { c.market_location.lat = to_double("market_lat", v); },
                           [](const PipelineConfig& c) { return fmt(c.market_location.lat); }}},
        {"market_lon", Key{"market longitude (default 23.7275)",
                           [](PipelineConfig& c, const std::string& v) { c.market_location.lon = to_double("market_lon", v); },
                           [](const PipelineConfig& c) { return fmt(c.market_location.lon); }}}}},
      {"market",
       {{"volatility_window", int32(&PipelineConfig::volatility_window, "returns per volatility window (default 24)")},
        {"match_window", i64(&PipelineConfig::match_window, "T_time in seconds (default 3600)")},
        {"multipliers", Key{"comma-separated T_true multipliers (default 2, 2.5, 3)",
                            [](PipelineConfig& c, const std::string& v) {
                              c.multipliers.clear();
                              for (const auto& m : split_list(v)) c.multipliers.push_back(to_double("multipliers", m));
                            },
                            [](const PipelineConfig& c) {
                              return join<double>(c.multipliers, [](const double& m) { return fmt(m); });
                            }}},
        {"baseline_mode", Key{"slope baseline: mean-abs, signed or positive (default mean-abs)",
                              [](PipelineConfig& c, const std::string& v) {
                                c.baseline_mode = market::parse_baseline_mode(trim(v));
                              },
                              [](const PipelineConfig& c) { return market::to_string(c.baseline_mode); }}}}},
      {"mlcore",
       {{"selection", Key{"feature selection: cfs or infogain (default cfs)",
                          [](PipelineConfig& c, const std::string& v) { c.selection = ml::parse_selection_method(trim(v)); },
                          [](const PipelineConfig& c) { return ml::to_string(c.selection); }}},
        {"infogain_bins", int32(&PipelineConfig::infogain_bins, "equal-frequency bins (default 10)")},
        {"infogain_alpha", dbl(&PipelineConfig::infogain_alpha, "G-test significance level (default 0.01)")},
        {"cv_folds", int32(&PipelineConfig::cv_folds, "cross-validation folds (default 10)")},
        {"kernels", Key{"kernel grid: linear, poly:<d>[:<c>], rbf:<w> (default linear, poly:2, poly:3)",
                        [](PipelineConfig& c, const std::string& v) {
                          c.kernels.clear();
                          for (const auto& k : split_list(v)) c.kernels.push_back(ml::parse_kernel(k));
                        },
                        [](const PipelineConfig& c) {
                          return join<ml::KernelSpec>(c.kernels, [](const ml::KernelSpec& k) { return k.describe(); });
                        }}},
        {"C", Key{"regularization grid (default 0.1, 1, 10)",
                  [](PipelineConfig& c, const std::string& v) {
                    c.Cs.clear();
                    for (const auto& x : split_list(v)) c.Cs.push_back(to_double("C", x));
                  },
                  [](const PipelineConfig& c) { return join<double>(c.Cs, [](const double& x) { return fmt(x); }); }}},
        {"class_weights", Key{"positive:negative loss weights (default 1:1, 1:2, 1:4)",
                              [](PipelineConfig& c, const std::string& v) {
                                c.class_weights.clear();
                                for (const auto& x : split_list(v)) c.class_weights.push_back(parse_weights("class_weights", x));
                              },
                              [](const PipelineConfig& c) {
                                return join<ml::ClassWeights>(c.class_weights, [](const ml::ClassWeights& w) {
                                  return fmt(w.positive) + ":" + fmt(w.negative);
                                });
                              }}},
        {"tolerance", dbl(&PipelineConfig::svm_tolerance, "SMO stopping tolerance (default 0.001)")}}},
      {"evaluate", {{"markov_order", int32(&PipelineConfig::markov_order, "Markov chain order for MIR (default 1)")}}},
      {"baseline",
       {{"window", i64(&PipelineConfig::baseline_window, "sentiment window in seconds (default 7200)")},
        {"step", i64(&PipelineConfig::baseline_step, "sentiment step in seconds (default 300)")},
        {"update_ratio", dbl(&PipelineConfig::baseline_update_ratio, "sentiment growth for an update (default 1.1)")},
        {"max_shift", i64(&PipelineConfig::baseline_max_shift, "longest shift to the next open in seconds (default 86400)")}}},
      {"pipeline",
       {{"train_fraction", dbl(&PipelineConfig::train_fraction, "training share of the tweet span (default 0.5)")},
        {"train_end", Key{"absolute end of the training span, UTC seconds; overrides train_fraction",
                          [](PipelineConfig& c, const std::string& v) {
                            if (trim(v).empty()) c.train_end.reset();
                            else c.train_end = to_int("train_end", v);
                          },
                          [](const PipelineConfig& c) { return c.train_end ? std::to_string(*c.train_end) : ""; }}},
        {"seed", Key{"random seed (default 42)",
                     [](PipelineConfig& c, const std::string& v) { c.seed = static_cast<std::uint64_t>(to_int("seed", v)); },
                     [](const PipelineConfig& c) { return std::to_string(c.seed); }}}}},
  };
}

}  // namespace

void PipelineConfig::validate() const {
  const auto positive = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("config: ") + what + " must be positive");
  };
  positive(bandwidth > 0, "bandwidth");
  positive(grid_step > 0, "grid_step");
  positive(cluster_cutoff > 0, "cluster_cutoff");
  positive(tick > 0, "tick");
  if (!(evaluation_lag >= 0)) throw std::invalid_argument("config: evaluation_lag must not be negative");
  positive(max_event_age > 0, "max_event_age");
  positive(update_ratio > 0, "update_ratio");
  positive(volatility_window > 1, "volatility_window - 1");
  positive(match_window > 0, "match_window");
  positive(vocabulary_min_count > 0, "vocabulary_min_count");
  positive(vocabulary_max_words > 0, "vocabulary_max_words");
  positive(infogain_bins > 0, "infogain_bins");
  positive(infogain_alpha > 0 && infogain_alpha < 1, "infogain_alpha (below 1)");
  positive(cv_folds > 1, "cv_folds - 1");
  positive(svm_tolerance > 0, "tolerance");
  positive(markov_order > 0, "markov_order");
  positive(baseline_window > 0, "baseline window");
  positive(baseline_step > 0, "baseline step");
  positive(baseline_update_ratio > 0, "baseline update_ratio");
  positive(baseline_max_shift > 0, "baseline max_shift");
  positive(!multipliers.empty(), "multiplier count");
  for (double m : multipliers) positive(m > 0, "multipliers");
  positive(!kernels.empty() && !Cs.empty() && !class_weights.empty(), "grid size");
  for (double c : Cs) positive(c > 0, "C");
  for (const auto& w : class_weights) positive(w.positive > 0 && w.negative > 0, "class_weights");
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw std::invalid_argument("config: train_fraction must lie in (0, 1)");
}

PipelineConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  PipelineConfig cfg;
  const auto sch = make_schema(base_dir);
  for (const auto& [section, body] : tree) {
    auto sec = std::find_if(sch.begin(), sch.end(), [&](const auto& s) { return s.first == section; });
    if (sec == sch.end()) throw std::invalid_argument("config: unknown section [" + section + "]");
    for (const auto& [key, value] : body) {
      auto k = std::find_if(sec->second.begin(), sec->second.end(), [&](const auto& kv) { return kv.first == key; });
      if (k == sec->second.end()) throw std::invalid_argument("config: unknown key " + section + "." + key);
      k->second.set(cfg, value.data());
    }
  }
  cfg.validate();
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file " + path.string());
  return parse_config(in, fs::absolute(path).parent_path());
}

void write_config(std::ostream& out, const PipelineConfig& config) {
  bool first = true;
  for (const auto& [section, keys] : make_schema({})) {
    out << (first ? "" : "\n") << "[" << section << "]\n";
    first = false;
    for (const auto& [key, k] : keys) out << "; " << k.doc << "\n" << key << " = " << k.get(config) << "\n";
  }
}

std::string format_multiplier(double m) { return fmt(m); }

}  // namespace jitterscope::pipeline
