#include "properties.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "jitterscope/calendar.hpp"
#include "jitterscope/clustering.hpp"
#include "jitterscope/evaluate.hpp"
#include "jitterscope/marketlabel.hpp"
#include "jitterscope/ratetrack.hpp"
#include "jitterscope/selection.hpp"
#include "jitterscope/svm.hpp"
#include "oracles.hpp"

namespace props {

using namespace jitterscope;

KernelReport kernel_checks(int fixtures, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  KernelReport rep;
  for (int f = 0; f < fixtures; ++f) {
    const double bw = 60.0 + unit(rng) * 3540.0;
    const int n = 1 + static_cast<int>(rng() % 50);
    ratetrack::WordRateTrack track("w", bw);
    std::vector<double> arrivals;
    for (int i = 0; i < n; ++i) arrivals.push_back(std::round(unit(rng) * 10.0 * bw));
    std::sort(arrivals.begin(), arrivals.end());
    for (double a : arrivals) track.add_arrival(a);
    ++rep.fixtures;

    for (int q = 0; q < 5; ++q) {
      const double t = -bw + unit(rng) * 12.0 * bw;
      // Skip points next to the truncation edge (the rate jumps there) and
      // points where the slope is a near-cancelling sum.
      double scale = 0.0;
      bool near_edge = false;
      for (double a : arrivals) {
        scale += std::abs(ratetrack::gaussian_kernel_derivative(t - a, bw));
        if (std::abs(std::abs(t - a) - ratetrack::kKernelCutoff * bw) < 1.0) near_edge = true;
      }
      const double slope = track.slope_at(t);
      if (near_edge || std::abs(slope) < 1e-3 * scale || scale == 0.0) continue;
      const double h = 0.01;
      const double fd = (track.rate_at(t + h) - track.rate_at(t - h)) / (2.0 * h);
      rep.max_slope_rel_error = std::max(rep.max_slope_rel_error, std::abs(fd - slope) / std::abs(slope));
      ++rep.slope_checks;
    }

    const double lo = arrivals.front() - 5.0 * bw;
    const double hi = arrivals.back() + 5.0 * bw;
    const double step = bw / 40.0;
    double mass = 0.0;
    double prev = track.rate_at(lo);
    for (double t = lo + step; t <= hi + 1e-9; t += step) {
      const double cur = track.rate_at(t);
      mass += 0.5 * (prev + cur) * step;
      prev = cur;
    }
    rep.max_mass_rel_error = std::max(rep.max_mass_rel_error, std::abs(mass - n) / n);
  }
  return rep;
}

BurstReport burst_state_checks(int cases, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  BurstReport rep;
  for (int c = 0; c < cases; ++c) {
    const ratetrack::BurstThresholds th{0.01 + unit(rng), 1e-6 + unit(rng) * 1e-2};
    ratetrack::WordRateTrack track("w");
    bool bursty = false;
    const int len = 1 + static_cast<int>(rng() % 50);
    for (int s = 0; s < len; ++s) {
      double rate = 0.0;
      switch (rng() % 4) {
        case 0: rate = th.rate; break;
        case 1: rate = th.rate * (1.0 + (unit(rng) - 0.5) * 1e-9); break;
        default: rate = unit(rng) * 2.0 * th.rate; break;
      }
      double slope = 0.0;
      switch (rng() % 4) {
        case 0: slope = th.slope; break;
        case 1: slope = -unit(rng) * th.slope; break;
        default: slope = (unit(rng) * 4.0 - 2.0) * th.slope; break;
      }
      const bool next = bursty ? !(rate < th.rate) : (rate > th.rate && slope > th.slope);
      const auto tr = track.apply_burst_rule(static_cast<double>(s), {rate, slope}, th);
      const auto expected_tr = next == bursty ? ratetrack::BurstTransition::Unchanged
                               : next         ? ratetrack::BurstTransition::EnteredBurst
                                              : ratetrack::BurstTransition::ExitedBurst;
      const bool state_ok = (track.state() == ratetrack::BurstState::Bursty) == next;
      const bool entry_ok = next ? track.burst_entry_time().has_value() : !track.burst_entry_time().has_value();
      if (!state_ok || tr != expected_tr || !entry_ok) ++rep.violations;
      bursty = next;
      ++rep.steps;
    }
    ++rep.cases;
  }
  return rep;
}

ClusterReport clustering_checks(int fixtures, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ClusterReport rep;
  const double span = 20000.0;
  const auto grid = ratetrack::uniform_grid(0.0, span, 300.0);
  for (int f = 0; f < fixtures; ++f) {
    const int n = 2 + static_cast<int>(rng() % 8);
    const int groups = 1 + static_cast<int>(rng() % 4);
    std::vector<double> centers;
    for (int g = 0; g < groups; ++g) centers.push_back(unit(rng) * span);
    std::vector<ratetrack::WordRateTrack> tracks;
    for (int w = 0; w < n; ++w) {
      ratetrack::WordRateTrack t("w" + std::to_string(w), 600.0);
      const double center = centers[rng() % centers.size()];
      std::vector<double> arr;
      const int burst = static_cast<int>(rng() % 40);
      std::normal_distribution<double> around(center, 900.0);
      for (int k = 0; k < burst; ++k) arr.push_back(std::clamp(std::round(around(rng)), 0.0, span));
      const int noise = 1 + static_cast<int>(rng() % 15);
      for (int k = 0; k < noise; ++k) arr.push_back(std::round(unit(rng) * span));
      std::sort(arr.begin(), arr.end());
      for (double a : arr) t.add_arrival(a);
      tracks.push_back(std::move(t));
    }
    const bool twin = n < 10 && rng() % 2 == 0;
    if (twin) {
      ratetrack::WordRateTrack copy("twin", 600.0);
      for (double a : tracks.front().arrivals()) copy.add_arrival(a);
      tracks.push_back(std::move(copy));
    }
    const auto d = ratetrack::rate_distance_matrix(tracks, grid);
    const auto got = ratetrack::agglomerative_cluster(d, 0.7);
    const auto want = oracle::average_linkage(d, 0.7);
    const auto words = ratetrack::cluster_words(tracks, grid, 0.7);
    if (got != want || words.categories() != want) ++rep.mismatches;
    if (twin) {
      ++rep.identical_fixtures;
      if (words.categories().front() != words.categories().back()) ++rep.identical_split;
    }
    ++rep.fixtures;
  }
  return rep;
}

MonotoneReport monotone_merge(std::span<const events::EventVector> vectors) {
  MonotoneReport rep;
  std::map<Timestamp, const events::EventVector*> last;
  for (const auto& v : vectors) {
    ++rep.vectors;
    auto [it, fresh] = last.try_emplace(v.event_start, &v);
    if (fresh) {
      ++rep.events;
      continue;
    }
    const auto& prev = *it->second;
    if (prev.snapshot >= v.snapshot || prev.features.size() != v.features.size() ||
        (v.features.array() < prev.features.array()).any())
      ++rep.violations;
    it->second = &v;
  }
  return rep;
}

namespace {

market::LabelSets sets_from(std::vector<Timestamp> ts, std::vector<market::SlotClass> classes) {
  market::LabelSets s;
  s.timestamps = std::move(ts);
  s.classes = std::move(classes);
  for (std::size_t i = 0; i < s.timestamps.size(); ++i) {
    switch (s.classes[i]) {
      case market::SlotClass::True: s.true_slots.push_back(s.timestamps[i]); break;
      case market::SlotClass::Neutral: s.neutral_slots.push_back(s.timestamps[i]); break;
      case market::SlotClass::False: s.false_slots.push_back(s.timestamps[i]); break;
    }
  }
  return s;
}

events::EventVector vec(Timestamp start, Timestamp snapshot) {
  return {start, snapshot, 0, Eigen::VectorXd::Constant(10, static_cast<double>(snapshot - start)), false};
}

}  // namespace

LabelReport labeling_checks(int layouts, std::uint64_t seed) {
  LabelReport rep;
  {
    // One trading day 07:00-17:00 with a jitter at 07:30 and a neutral slot
    // at 10:40. Event A starts before the open and updates three times,
    // event B sits near the neutral slot, event C sees only calm slots.
    const Timestamp day = 1433116800;
    const auto at = [&](int h, int m) { return day + h * 3600 + m * 60; };
    const auto calendar = market::MarketCalendar::weekdays(7 * 3600, 17 * 3600);
    market::VolatilitySeries vol;
    for (Timestamp t = at(7, 0); t <= at(17, 0); t += 300) {
      vol.timestamps.push_back(t);
      vol.session.push_back(0);
      vol.window_start.push_back(t);
    }
    const auto n = static_cast<Eigen::Index>(vol.timestamps.size());
    vol.volatility = Eigen::VectorXd::Ones(n);
    vol.slope = Eigen::VectorXd::Constant(n, 0.5);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (vol.timestamps[static_cast<std::size_t>(i)] == at(7, 30)) vol.slope[i] = 3.0;
      if (vol.timestamps[static_cast<std::size_t>(i)] == at(10, 40)) vol.slope[i] = 1.8;
    }
    const auto sets = market::build_label_sets(vol, 2.0, 1.0);
    const std::vector<events::EventVector> vectors{vec(at(5, 0), at(5, 0)),   vec(at(5, 0), at(5, 20)),
                                                   vec(at(5, 0), at(5, 40)),  vec(at(5, 0), at(6, 0)),
                                                   vec(at(10, 0), at(10, 0)), vec(at(13, 0), at(13, 0)),
                                                   vec(at(13, 0), at(13, 20))};
    const auto mapped = market::dedupe_same_open(vectors, calendar);
    std::vector<std::pair<Timestamp, int>> got;
    for (const auto& m : mapped) got.emplace_back(m.vector.snapshot, market::assign_label(m.t_prime, sets, 3600));
    const std::vector<std::pair<Timestamp, int>> want{
        {at(6, 0), 1}, {at(10, 0), -1}, {at(13, 0), 0}, {at(13, 20), 0}};
    rep.worked_day = got == want && mapped.front().t_prime == at(7, 0);
    std::ostringstream detail;
    for (const auto& [s, l] : got) detail << (s - day) / 60 << "min:" << l << " ";
    rep.worked_day_detail = detail.str();
  }

  std::mt19937_64 rng(seed);
  for (int l = 0; l < layouts; ++l) {
    const int n = 1 + static_cast<int>(rng() % 200);
    std::set<Timestamp> uniq;
    while (static_cast<int>(uniq.size()) < n) uniq.insert(static_cast<Timestamp>(rng() % 100000));
    std::vector<Timestamp> ts(uniq.begin(), uniq.end());
    std::vector<market::SlotClass> classes;
    for (int i = 0; i < n; ++i) classes.push_back(static_cast<market::SlotClass>(rng() % 3));
    const auto sets = sets_from(ts, classes);
    const Timestamp window = 60 + static_cast<Timestamp>(rng() % 7141);
    for (int q = 0; q < 20; ++q) {
      Timestamp t = -5000 + static_cast<Timestamp>(rng() % 110000);
      if (q % 5 == 0) t = ts[rng() % ts.size()] + (rng() % 2 ? window : -window);  // exactly on the boundary
      const int got = market::assign_label(t, sets, window);
      const int want = oracle::scan_label(t, sets.true_slots, sets.neutral_slots, window);
      if (got != want) ++rep.mismatches;
      ++rep.queries;
    }
    ++rep.layouts;
  }
  return rep;
}

ClassifierReport classifier_checks(std::uint64_t seed) {
  ClassifierReport rep;
  const auto accuracy = [](const ml::KernelClassifier& m, const Eigen::MatrixXd& X, std::span<const int> y) {
    int ok = 0;
    for (Eigen::Index i = 0; i < X.rows(); ++i) ok += m.predict(X.row(i).transpose()) == y[static_cast<std::size_t>(i)];
    return static_cast<double>(ok) / static_cast<double>(X.rows());
  };
  const auto kkt = [&](const ml::KernelClassifier& m) {
    rep.max_kkt_residual = std::max(rep.max_kkt_residual, ml::kkt_residuals(m).maxCoeff());
  };

  Eigen::MatrixXd xor_x(4, 2);
  xor_x << 1, 1, -1, -1, 1, -1, -1, 1;
  const std::vector<int> xor_y{1, 1, 0, 0};
  const auto poly = ml::train(xor_x, xor_y, {ml::KernelSpec::polynomial(2, 1.0), 10.0, {}, 1e-3});
  rep.poly_solves_xor = accuracy(poly, xor_x, xor_y) == 1.0;
  kkt(poly);
  rep.linear_xor_certificate = oracle::hulls_intersect(xor_x, xor_y, Eigen::VectorXd::Constant(4, 0.5));
  const auto lin = ml::train(xor_x, xor_y, {ml::KernelSpec::linear(), 10.0, {}, 1e-3});
  rep.linear_fails_xor = accuracy(lin, xor_x, xor_y) < 1.0;
  kkt(lin);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  {
    Eigen::MatrixXd X(40, 2);
    std::vector<int> y;
    for (int i = 0; i < 40; ++i) {
      const int c = i % 2;
      X(i, 0) = g(rng) + (c ? 4.0 : -4.0);
      X(i, 1) = g(rng) + (c ? 1.0 : -1.0);
      y.push_back(c);
    }
    if (const auto cert = oracle::perceptron(X, y)) {
      bool ok = true;
      for (Eigen::Index i = 0; i < X.rows(); ++i)
        ok = ok && (y[static_cast<std::size_t>(i)] == 1 ? 1.0 : -1.0) * (X.row(i).dot(cert->first) + cert->second) > 0;
      rep.separable_certificate = ok;
    }
    const auto m = ml::train(X, y, {ml::KernelSpec::linear(), 100.0, {}, 1e-3});
    rep.linear_solves_separable = accuracy(m, X, y) == 1.0;
    kkt(m);
  }

  {
    const int n = 60;
    Eigen::MatrixXd X(n, 2);
    std::vector<int> y;
    for (int i = 0; i < n; ++i) {
      const int c = (rng() % 3 == 0) ? 1 : 0;
      X(i, 0) = g(rng) + (c ? 1.0 : -0.5);
      X(i, 1) = g(rng) * (c ? 0.5 : 1.5);
      y.push_back(c);
    }
    const ml::SvmParams params{ml::KernelSpec::polynomial(2, 1.0), 1.0, {1.0, 2.0}, 1e-6};
    const int head = 40;
    auto online = ml::train(X.topRows(head), std::span<const int>(y).first(head), params);
    for (int i = head; i < n; ++i) online = ml::online_update(online, X.row(i).transpose(), y[static_cast<std::size_t>(i)]);
    online = ml::online_update(online, X.row(0).transpose(), -1);
    const auto batch = ml::train(X, y, params);
    std::uniform_real_distribution<double> box(-4.0, 4.0);
    for (int p = 0; p < 500; ++p) {
      Eigen::Vector2d x(box(rng), box(rng));
      const double a = online.decision(x);
      const double b = batch.decision(x);
      rep.max_decision_gap = std::max(rep.max_decision_gap, std::abs(a - b));
      if ((a > 0) != (b > 0)) ++rep.probe_disagreements;
      ++rep.probes;
    }
    kkt(ml::train(X, y, {ml::KernelSpec::polynomial(2, 1.0), 1.0, {1.0, 2.0}, 1e-3}));
    kkt(ml::train(X, y, {ml::KernelSpec::gaussian(1.0), 10.0, {}, 1e-3}));
  }
  return rep;
}

SelectionReport planted_feature_trials(int trials, std::uint64_t seed) {
  SelectionReport rep;
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(t));
    std::normal_distribution<double> g(0.0, 1.0);
    const int n = 200;
    Eigen::MatrixXd X(n, 5);
    std::vector<int> y;
    for (int i = 0; i < n; ++i) {
      const int c = i < n / 2 ? 1 : 0;
      y.push_back(c);
      X(i, 0) = c + 0.5 * g(rng);
      for (int j = 1; j < 5; ++j) X(i, j) = g(rng);
    }
    const auto cfs = ml::cfs_select(X, y);
    const auto ig = ml::infogain_rank(X, y);
    rep.cfs_first += !cfs.indices.empty() && cfs.indices.front() == 0;
    rep.infogain_first += !ig.indices.empty() && ig.indices.front() == 0;
    ++rep.trials;
  }
  return rep;
}

MetricsReport metrics_checks(int auc_fixtures, std::uint64_t seed) {
  MetricsReport rep;
  const auto p = eval::prf1_from_counts(29, 13, 7);
  rep.precision = p.precision;
  rep.recall = p.recall;
  rep.f1 = p.f1;
  std::mt19937_64 rng(seed);
  for (int f = 0; f < auc_fixtures; ++f) {
    const int n = 2 + static_cast<int>(rng() % 60);
    std::vector<double> d;
    std::vector<int> y;
    for (int i = 0; i < n; ++i) {
      y.push_back(i == 0 ? 1 : i == 1 ? 0 : static_cast<int>(rng() % 2));
      d.push_back(rng() % 10 == 0 ? -std::numeric_limits<double>::infinity()
                                  : static_cast<double>(rng() % 21) / 10.0 - 1.0);
    }
    const double auc = eval::roc_auc(eval::roc_curve(d, y));
    rep.max_auc_error = std::max(rep.max_auc_error, std::abs(auc - oracle::mann_whitney_auc(d, y)));
    ++rep.auc_fixtures;
  }
  return rep;
}

InformationReport information_checks(std::size_t n, std::uint64_t seed) {
  InformationReport rep;
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution quarter(0.25);
  std::bernoulli_distribution half(0.5);
  std::vector<int> a;
  std::vector<int> b;
  for (std::size_t i = 0; i < n; ++i) {
    a.push_back(quarter(rng) ? 1 : 0);
    b.push_back(half(rng) ? 1 : 0);
  }
  rep.bernoulli_entropy_rate = eval::entropy_rate(eval::fit_markov(a));
  const auto self = eval::mir(a, a);
  rep.mir_self = self.mir;
  rep.h_self = self.h_truth;
  rep.mir_independent = eval::mir(a, b).mir;
  return rep;
}

}  // namespace props

#include <chrono>
#include <fstream>

#include "jitterscope/artifacts.hpp"
#include "jitterscope/config.hpp"
#include "jitterscope/stages.hpp"
#include "jitterscope/synthetic.hpp"

namespace props {

namespace {

namespace fs = std::filesystem;

pipeline::PipelineConfig write_scenario(const fs::path& dir, std::uint64_t seed) {
  fs::remove_all(dir);
  const auto scenario = synth::default_scenario(seed);
  synth::write_synthetic(scenario, synth::generate_synthetic(scenario), dir / "data");
  return pipeline::load_config(dir / "data" / "jitterscope.conf");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Names of files that differ or exist on one side only.
std::vector<std::string> compare_dirs(const fs::path& a, const fs::path& b) {
  std::set<std::string> names;
  for (const auto& d : {a, b})
    for (const auto& e : fs::directory_iterator(d)) names.insert(e.path().filename().string());
  std::vector<std::string> out;
  for (const auto& n : names)
    if (!fs::exists(a / n) || !fs::exists(b / n) || slurp(a / n) != slurp(b / n)) out.push_back(n);
  return out;
}

}  // namespace

EndToEndReport planted_recovery(const fs::path& dir, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  auto cfg = write_scenario(dir, seed);
  cfg.out_dir = dir / "out";
  const auto report = pipeline::run_pipeline(cfg);
  EndToEndReport rep;
  const auto truth = pipeline::read_json(cfg.truth);
  for (const auto& e : truth.at("events")) {
    ++rep.planted;
    rep.impacted += e.at("impact").get<bool>();
  }
  for (const auto& r : report.at("reports")) {
    if (r.at("multiplier").get<double>() != 2.5) continue;
    const double mir = r.at("mir_bits").is_null() ? 0.0 : r.at("mir_bits").get<double>();
    if (r.at("detector") == pipeline::kBurstTag) {
      rep.burst_mir = mir;
      rep.burst_f1 = r.at("f1").get<double>();
    }
    if (r.at("detector") == pipeline::kSentimentTag) rep.sentiment_mir = mir;
  }
  for (const auto& p : report.at("planted"))
    if (p.at("multiplier").get<double>() == 2.5) rep.planted_f1 = p.at("f1").get<double>();
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

DeterminismReport determinism_checks(const fs::path& dir, std::uint64_t seed) {
  DeterminismReport rep;
  auto cfg = write_scenario(dir, seed);

  auto first = cfg;
  first.out_dir = dir / "first";
  pipeline::run_pipeline(first);
  auto second = cfg;
  second.out_dir = dir / "second";
  pipeline::run_pipeline(second);
  auto diff = compare_dirs(first.out_dir, second.out_dir);
  rep.repeat_identical = diff.empty();
  for (auto& d : diff) rep.differing.push_back("repeat:" + d);

  auto staged = cfg;
  staged.out_dir = dir / "staged";
  pipeline::run_calibrate(staged);
  pipeline::run_detect(staged);
  pipeline::run_label(staged);
  pipeline::run_train(staged);
  pipeline::run_classify(staged);
  pipeline::run_evaluate(staged);
  pipeline::run_baseline(staged);
  diff = compare_dirs(first.out_dir, staged.out_dir);
  rep.staged_identical = diff.empty();
  for (auto& d : diff) rep.differing.push_back("staged:" + d);

  // Cut every tweet and bar after the training span and retrain.
  const auto train_end = pipeline::load_detector(first).span.end;
  const fs::path cut_dir = dir / "cut";
  fs::create_directories(cut_dir);
  {
    std::ifstream in(cfg.tweets);
    std::ofstream out(cut_dir / "tweets.jsonl");
    std::string line;
    while (std::getline(in, line))
      if (nlohmann::json::parse(line).at("ts").get<Timestamp>() <= train_end) out << line << "\n";
  }
  auto bars = ingest::parse_market_csv(cfg.market);
  std::erase_if(bars, [&](const ingest::MarketBar& b) { return b.timestamp > train_end; });
  ingest::write_market_csv(cut_dir / "market.csv", bars);
  auto cut = cfg;
  cut.tweets = cut_dir / "tweets.jsonl";
  cut.market = cut_dir / "market.csv";
  cut.train_end = train_end;
  cut.out_dir = cut_dir / "out";
  pipeline::run_calibrate(cut);
  pipeline::run_detect(cut);
  pipeline::run_label(cut);
  pipeline::run_train(cut);
  rep.model_without_future_identical = true;
  for (double m : cfg.multipliers) {
    const auto name = pipeline::artifact_path(first, "model", m, ".json").filename();
    if (slurp(first.out_dir / name) != slurp(cut.out_dir / name)) {
      rep.model_without_future_identical = false;
      rep.differing.push_back("cut:" + name.string());
    }
  }
  return rep;
}

}  // namespace props
