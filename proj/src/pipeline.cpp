#include "jitterscope/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <iostream>
#include <map>
#include <set>

#include "jitterscope/artifacts.hpp"
#include "jitterscope/ingest.hpp"
#include "jitterscope/sentiment.hpp"

namespace jitterscope::pipeline {
namespace fs = std::filesystem;

std::vector<events::StreamTweet> prepare_tweets(const PipelineConfig& config) {
  auto parsed = ingest::parse_tweet_stream(config.tweets);
  if (!parsed.malformed_lines.empty())
    std::clog << "warning: skipped " << parsed.malformed_lines.size() << " malformed tweet lines\n";
  auto records = std::move(parsed.records);
  if (!config.keywords.empty())
    records = ingest::filter_by_terms(records, std::set<std::string>(config.keywords.begin(), config.keywords.end()));
  const auto stopwords = ingest::load_stopwords(config.stopwords);
  const auto lexicon = ingest::load_lexicon(config.lexicon);
  std::vector<events::StreamTweet> out;
  out.reserve(records.size());
  for (auto& r : records) {
    events::StreamTweet t;
    t.timestamp = r.timestamp;
    t.tokens = ingest::tokenize_and_stem(r.text, stopwords);
    t.followers = r.followers;
    t.verified = r.verified;
    t.location = r.location;
    t.ssi = ingest::score_tweet_sentiment(t.tokens, lexicon).ssi();
    out.push_back(std::move(t));
  }
  return out;
}

TrainingSpan training_span(const PipelineConfig& config, std::span<const events::StreamTweet> tweets) {
  if (tweets.empty()) throw FatalError("no tweets to calibrate on", "calibrate");
  TrainingSpan span;
  span.begin = tweets.front().timestamp;
  const Timestamp last = tweets.back().timestamp;
  span.end = config.train_end
                 ? *config.train_end
                 : span.begin + static_cast<Timestamp>(std::floor(config.train_fraction * static_cast<double>(last - span.begin)));
  if (span.end <= span.begin) throw FatalError("training span ends before the first tweet", "calibrate");
  return span;
}

DetectorModel calibrate_stage(const PipelineConfig& config, std::span<const events::StreamTweet> tweets) {
  DetectorModel model;
  model.span = training_span(config, tweets);
  model.data_end = tweets.back().timestamp;
  model.bandwidth = config.bandwidth;
  model.grid_step = config.grid_step;

  std::map<std::string, int> counts;
  for (const auto& t : tweets) {
    if (t.timestamp > model.span.end) break;
    for (const auto& w : std::set<std::string>(t.tokens.begin(), t.tokens.end())) ++counts[w];
  }
  std::vector<std::pair<std::string, int>> ranked;
  for (const auto& [w, c] : counts)
    if (c >= config.vocabulary_min_count) ranked.emplace_back(w, c);
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  if (ranked.size() > static_cast<std::size_t>(config.vocabulary_max_words))
    ranked.resize(static_cast<std::size_t>(config.vocabulary_max_words));
  if (ranked.empty()) throw FatalError("no word reaches the vocabulary count in the training span", "calibrate");
  std::vector<std::string> vocabulary;
  for (const auto& [w, c] : ranked) vocabulary.push_back(w);
  std::sort(vocabulary.begin(), vocabulary.end());

  std::map<std::string, std::size_t> index;
  std::vector<ratetrack::WordRateTrack> tracks;
  for (const auto& w : vocabulary) {
    index[w] = tracks.size();
    tracks.emplace_back(w, config.bandwidth);
  }
  for (const auto& t : tweets) {
    if (t.timestamp > model.span.end) break;
    for (const auto& w : std::set<std::string>(t.tokens.begin(), t.tokens.end()))
      if (auto it = index.find(w); it != index.end()) tracks[it->second].add_arrival(static_cast<double>(t.timestamp));
  }
  const auto begin = static_cast<double>(model.span.begin);
  const auto end = static_cast<double>(model.span.end);
  model.thresholds = ratetrack::calibrate_thresholds(tracks, config.grid_step, begin, end);
  const auto grid = ratetrack::uniform_grid(begin, end, config.grid_step);
  if (grid.size() < 3) throw FatalError("training span too short for the clustering grid", "calibrate");
  model.clustering = ratetrack::cluster_words(tracks, grid, config.cluster_cutoff);
  return model;
}

std::vector<events::EventVector> detect_stage(const PipelineConfig& config, const DetectorModel& model,
                                              std::span<const events::StreamTweet> tweets) {
  if (tweets.empty()) return {};
  events::DetectorConfig dc;
  dc.bandwidth = model.bandwidth;
  dc.tick = config.tick;
  dc.evaluation_lag = config.evaluation_lag;
  dc.max_event_age = config.max_event_age;
  dc.update_ratio = config.update_ratio;
  dc.market_location = config.market_location;
  const auto tail = static_cast<Timestamp>(std::ceil(ratetrack::kKernelCutoff * model.bandwidth));
  return events::run_detection(tweets, dc, model.thresholds, model.clustering, tweets.front().timestamp - config.tick,
                               tweets.back().timestamp + tail);
}

MarketData load_market(const PipelineConfig& config) {
  MarketData m;
  m.calendar = market::MarketCalendar::load(config.calendar);
  const auto bars = ingest::parse_market_csv(config.market);
  m.volatility = market::compute_volatility(bars, config.volatility_window, &m.calendar);
  if (m.volatility.size() == 0) throw FatalError("no volatility slots inside market sessions", "label");
  return m;
}

std::vector<market::LabeledEvent> label_vectors(std::span<const market::MappedVector> mapped,
                                                const market::LabelSets& sets, Timestamp match_window) {
  std::vector<market::LabeledEvent> out;
  out.reserve(mapped.size());
  for (const auto& m : mapped)
    out.push_back({m.vector.event_start, m.vector.snapshot, m.t_prime,
                   market::assign_label(m.t_prime, sets, match_window), m.vector.features});
  return out;
}

namespace {

LabelStage make_label_stage(const PipelineConfig& config, const MarketData& market_data, Timestamp train_end,
                            double multiplier) {
  LabelStage stage;
  stage.multiplier = multiplier;
  stage.sets = market::build_label_sets(market_data.volatility, multiplier, train_end, config.baseline_mode);
  stage.slots_from = train_end + 1;
  stage.slots_to = market_data.volatility.timestamps.back();
  return stage;
}

}  // namespace

LabelStage label_stage(const PipelineConfig& config, const MarketData& market_data,
                       std::span<const events::EventVector> vectors, Timestamp train_end, double multiplier) {
  auto stage = make_label_stage(config, market_data, train_end, multiplier);
  const auto mapped = market::dedupe_same_open(vectors, market_data.calendar);
  stage.labeled = label_vectors(mapped, stage.sets, config.match_window);
  return stage;
}

Eigen::VectorXd TrainedModel::transform(const Eigen::VectorXd& raw) const {
  if (raw.size() != normalizer.input_dim) throw FatalError("feature vector has the wrong dimension", "classify");
  const Eigen::VectorXd z = normalizer.apply(raw);
  Eigen::VectorXd out(static_cast<Eigen::Index>(selection.indices.size()));
  for (std::size_t k = 0; k < selection.indices.size(); ++k) out[static_cast<Eigen::Index>(k)] = z[selection.indices[k]];
  return out;
}

bool in_training(const market::LabeledEvent& e, Timestamp match_window, Timestamp train_end) {
  return e.label != -1 && e.t_prime + match_window <= train_end;
}

TrainedModel train_stage(const PipelineConfig& config, std::span<const market::LabeledEvent> labeled,
                         Timestamp train_end) {
  std::vector<const market::LabeledEvent*> rows;
  for (const auto& e : labeled)
    if (in_training(e, config.match_window, train_end)) rows.push_back(&e);
  const auto positives = std::count_if(rows.begin(), rows.end(), [](const auto* e) { return e->label == 1; });
  const auto negatives = static_cast<std::ptrdiff_t>(rows.size()) - positives;
  if (positives < 2 || negatives < 2)
    throw FatalError("training span holds " + std::to_string(positives) + " positive and " +
                         std::to_string(negatives) + " negative events; need at least 2 of each",
                     "train");
  const Eigen::Index dim = rows.front()->features.size();
  Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()), dim);
  std::vector<int> y;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i]->features.size() != dim) throw FatalError("training vectors differ in dimension", "train");
    X.row(static_cast<Eigen::Index>(i)) = rows[i]->features.transpose();
    y.push_back(rows[i]->label);
  }

  TrainedModel m;
  m.normalizer = ml::fit_normalizer(X);
  if (!m.normalizer.dropped.empty())
    std::clog << "warning: dropped " << m.normalizer.dropped.size() << " zero-variance feature columns\n";
  if (m.normalizer.output_dim() == 0) throw FatalError("every feature is constant over the training span", "train");
  const Eigen::MatrixXd Xn = m.normalizer.apply_rows(X);
  const auto cfs = ml::cfs_select(Xn, y);
  const auto ig = ml::infogain_rank(Xn, y, config.infogain_bins, config.infogain_alpha);
  m.selection = config.selection == ml::SelectionMethod::Cfs ? cfs : ig;
  m.alternate = config.selection == ml::SelectionMethod::Cfs ? ig : cfs;
  const Eigen::MatrixXd Xs = ml::select_columns(Xn, m.selection.indices);

  ml::CvGrid grid{config.kernels, config.Cs, config.class_weights};
  const auto cv = ml::cross_validate(Xs, y, config.cv_folds, grid, config.seed, config.svm_tolerance);
  for (const auto& w : cv.warnings) std::clog << "warning: " << w << "\n";
  m.cv_folds = cv.folds;
  m.cv_f1 = cv.best_f1;
  m.classifier = ml::train(Xs, y, cv.best);
  return m;
}

std::vector<Prediction> classify_stage(const PipelineConfig& config, const TrainedModel& model,
                                       std::span<const market::LabeledEvent> labeled, Timestamp train_end) {
  std::vector<const market::LabeledEvent*> test;
  for (const auto& e : labeled)
    if (e.t_prime + config.match_window > train_end) test.push_back(&e);
  std::stable_sort(test.begin(), test.end(), [](const auto* a, const auto* b) {
    if (a->t_prime != b->t_prime) return a->t_prime < b->t_prime;
    if (a->snapshot != b->snapshot) return a->snapshot < b->snapshot;
    return a->event_start < b->event_start;
  });

  struct Pending {
    Timestamp available_at;
    Eigen::VectorXd x;
    int label;
  };
  std::deque<Pending> pending;
  ml::KernelClassifier classifier = model.classifier;
  std::vector<Prediction> out;
  for (const auto* e : test) {
    while (!pending.empty() && pending.front().available_at <= e->t_prime) {
      classifier = ml::online_update(classifier, pending.front().x, pending.front().label);
      pending.pop_front();
    }
    const Eigen::VectorXd x = model.transform(e->features);
    const double d = classifier.decision(x);
    out.push_back({e->event_start, e->snapshot, e->t_prime, e->label, d > 0.0 ? 1 : 0, d});
    if (e->label != -1) pending.push_back({e->t_prime + config.match_window, x, e->label});
  }
  return out;
}

Evaluation evaluate_stage(const PipelineConfig& config, const std::string& detector, const LabelStage& labels,
                          std::span<const Prediction> predictions) {
  std::vector<eval::ScoredEvent> scored;
  for (const auto& p : predictions)
    if (p.truth != -1) scored.push_back({p.event_start, p.t_prime, p.truth, p.predicted, p.decision});
  std::vector<Timestamp> extra;
  for (const auto& e : labels.labeled) extra.push_back(e.t_prime);

  return evaluate_pair(detector, labels.multiplier,
                       eval::build_streams(scored, labels.sets, config.match_window, labels.slots_from,
                                           labels.slots_to, extra),
                       config.markov_order);
}

Evaluation evaluate_pair(const std::string& detector, double multiplier, eval::LabelStreamPair pair, int markov_order) {
  Evaluation ev;
  ev.pair = std::move(pair);
  auto& m = ev.metrics;
  m.detector = detector;
  m.multiplier = multiplier;
  m.stream_length = ev.pair.size();
  m.inserted_misses = ev.pair.inserted_misses();
  m.prf = eval::prf1(ev.pair);
  std::vector<double> decisions;
  std::vector<int> truth;
  for (const auto& e : ev.pair.entries) {
    decisions.push_back(e.decision);
    truth.push_back(e.truth);
  }
  const bool both = std::count(truth.begin(), truth.end(), 1) > 0 && std::count(truth.begin(), truth.end(), 0) > 0;
  if (both) {
    ev.roc = eval::roc_curve(decisions, truth);
    m.auc = eval::roc_auc(ev.roc);
  }
  if (ev.pair.size() > static_cast<std::size_t>(markov_order)) m.mir = eval::mir(ev.pair, markov_order);
  return ev;
}

eval::Prf1 score_planted(std::span<const Prediction> predictions, const nlohmann::json& truth, Timestamp train_end,
                         Timestamp slack) {
  struct Planted {
    Timestamp begin;
    Timestamp end;
    bool impact;
    bool seen = false;
  };
  std::vector<Planted> planted;
  for (const auto& e : truth.at("events"))
    planted.push_back({e.at("time").get<Timestamp>(), e.at("end").get<Timestamp>() + slack, e.at("impact").get<bool>()});
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  for (const auto& p : predictions) {
    int flag = 0;
    for (auto& pl : planted)
      if (pl.begin <= p.snapshot && p.snapshot <= pl.end) {
        flag = pl.impact ? 1 : 0;
        pl.seen = true;
        break;
      }
    if (flag == 1 && p.predicted == 1) ++tp;
    else if (flag == 0 && p.predicted == 1) ++fp;
    else if (flag == 1 && p.predicted == 0) ++fn;
  }
  for (const auto& pl : planted)
    if (pl.impact && !pl.seen && pl.begin > train_end) ++fn;
  return eval::prf1_from_counts(tp, fp, fn);
}

BaselineRun baseline_stage(const PipelineConfig& config, std::span<const events::StreamTweet> tweets,
                           const MarketData& market_data, Timestamp train_end, double multiplier) {
  BaselineRun run;
  if (tweets.empty()) throw FatalError("no tweets for the sentiment baseline", "baseline");
  const Timestamp step = config.baseline_step;
  const Timestamp first = tweets.front().timestamp;
  const Timestamp begin = (first >= 0 ? first / step : (first - step + 1) / step) * step + step;
  const auto series = baseline::sentiment_series(tweets, begin, tweets.back().timestamp + step,
                                                 config.baseline_window, step);
  run.detected = baseline::sentiment_detect(series, config.baseline_update_ratio);
  const auto vectors = baseline::sentiment_vectors(run.detected);
  const auto mapped = baseline::shift_and_resolve(vectors, market_data.calendar, config.baseline_max_shift, 0);
  run.labels = make_label_stage(config, market_data, train_end, multiplier);
  run.labels.labeled = label_vectors(mapped, run.labels.sets, config.match_window);
  run.model = train_stage(config, run.labels.labeled, train_end);
  run.predictions = classify_stage(config, run.model, run.labels.labeled, train_end);
  run.evaluation = evaluate_stage(config, kSentimentTag, run.labels, run.predictions);
  return run;
}

nlohmann::json run_pipeline(const PipelineConfig& config) {
  fs::create_directories(config.out_dir);
  const auto tweets = prepare_tweets(config);
  const auto detector = calibrate_stage(config, tweets);
  write_json(artifact_path(config, "detector.json"), to_json(detector));
  const auto vectors = detect_stage(config, detector, tweets);
  write_jsonl(artifact_path(config, "events.jsonl"), to_json_lines(vectors));
  const auto market_data = load_market(config);
  const Timestamp train_end = detector.span.end;
  std::optional<nlohmann::json> truth;
  if (!config.truth.empty()) truth = read_json(config.truth);

  for (double m : config.multipliers) {
    const auto labels = label_stage(config, market_data, vectors, train_end, m);
    write_jsonl(artifact_path(config, "labels", m, ".jsonl"), to_json_lines(labels.labeled));
    write_json(artifact_path(config, "slots", m, ".json"), to_json(labels));
    const auto model = train_stage(config, labels.labeled, train_end);
    write_json(artifact_path(config, "model", m, ".json"), to_json(model));
    const auto predictions = classify_stage(config, model, labels.labeled, train_end);
    write_jsonl(artifact_path(config, "predictions", m, ".jsonl"), to_json_lines(predictions));
    const auto ev = evaluate_stage(config, kBurstTag, labels, predictions);
    write_json(artifact_path(config, "metrics", m, ".json"), to_json(ev.metrics));
    write_roc_csv(artifact_path(config, "roc", m, ".csv"), ev.roc);
    if (truth) {
      auto j = to_json(score_planted(predictions, *truth, train_end));
      j["multiplier"] = m;
      write_json(artifact_path(config, "planted", m, ".json"), j);
    }
    const auto base = baseline_stage(config, tweets, market_data, train_end, m);
    write_json(artifact_path(config, "metrics_sentiment", m, ".json"), to_json(base.evaluation.metrics));
    write_roc_csv(artifact_path(config, "roc_sentiment", m, ".csv"), base.evaluation.roc);
  }
  return assemble_report(config);
}

nlohmann::json assemble_report(const PipelineConfig& config) {
  nlohmann::json reports = nlohmann::json::array();
  nlohmann::json planted = nlohmann::json::array();
  for (const std::string stem : {"metrics", "metrics_sentiment", "metrics_windowed"})
    for (double m : config.multipliers) {
      const auto p = artifact_path(config, stem, m, ".json");
      if (fs::exists(p)) reports.push_back(read_json(p));
    }
  for (double m : config.multipliers) {
    const auto p = artifact_path(config, "planted", m, ".json");
    if (fs::exists(p)) planted.push_back(read_json(p));
  }
  nlohmann::json report = {{"reports", reports}};
  if (!planted.empty()) report["planted"] = planted;
  write_json(artifact_path(config, "report.json"), report);
  return report;
}

}  // namespace jitterscope::pipeline
