#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "jitterscope/artifacts.hpp"
#include "jitterscope/pipeline.hpp"
#include "jitterscope/rake.hpp"
#include "jitterscope/stages.hpp"
#include "jitterscope/synthetic.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace jitterscope;
using namespace jitterscope::pipeline;

namespace {

struct GlobalOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<double> multipliers;
};

PipelineConfig resolve_config(const GlobalOptions& g) {
  if (g.config.empty()) throw FatalError("--config is required for this subcommand", "config");
  PipelineConfig cfg;
  try {
    cfg = load_config(g.config);
  } catch (const std::invalid_argument& e) {
    throw FatalError(e.what(), "config");
  }
  if (g.seed) cfg.seed = *g.seed;
  if (!g.out.empty()) cfg.out_dir = g.out;
  if (!g.multipliers.empty()) cfg.multipliers = g.multipliers;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw FatalError(e.what(), "config");
  }
  fs::create_directories(cfg.out_dir);
  return cfg;
}

std::vector<int> read_binary_stream(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw FatalError("cannot read " + path.string(), "mir");
  std::vector<int> out;
  std::string tok;
  while (in >> tok) {
    if (tok != "0" && tok != "1") throw FatalError("stream values must be 0 or 1: " + path.string(), "mir");
    out.push_back(tok == "1");
  }
  return out;
}

json mir_json(const eval::MirResult& r) {
  return {{"h_truth_bits", r.h_truth}, {"h_predicted_bits", r.h_predicted}, {"h_joint_bits", r.h_joint},
          {"mir_bits", r.mir}};
}

void print(const json& j) { std::cout << j.dump(2) << "\n"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Twitter burst events versus stock market volatility"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalOptions g;
  app.add_option("--config", g.config, "configuration file");
  app.add_option("--seed", g.seed, "random seed (overrides the config)");
  app.add_option("--out", g.out, "output directory (overrides the config)");
  app.add_option("--multiplier", g.multipliers, "T_true multiplier, repeatable (replaces the config set)");

  auto* keywords = app.add_subcommand("keywords", "extract filter keywords from a document");
  std::string kw_input;
  std::string kw_stopwords;
  ingest::RakeOptions rake;
  keywords->add_option("--input", kw_input, "plain-text document")->required();
  keywords->add_option("--stopwords", kw_stopwords, "stop-word list (default: from the config)");
  keywords->add_option("--max-words", rake.max_words_per_keyword, "longest phrase kept");
  keywords->add_option("--min-occurrences", rake.min_occurrences, "minimum phrase occurrences");
  keywords->add_option("--min-score", rake.min_score, "minimum phrase score");

  auto* calibrate = app.add_subcommand("calibrate", "thresholds and word clusters from the training span");
  auto* detect = app.add_subcommand("detect", "run the event detector over the tweet stream");
  auto* label = app.add_subcommand("label", "label event vectors against market volatility");
  auto* train = app.add_subcommand("train", "feature selection, cross-validation and training");
  auto* classify = app.add_subcommand("classify", "online classification of post-training events");
  auto* evaluate = app.add_subcommand("evaluate", "precision, recall, F1, ROC and MIR");

  auto* mir_cmd = app.add_subcommand("mir", "mutual information rate of two binary streams");
  std::string mir_truth;
  std::string mir_predicted;
  int mir_order = 1;
  mir_cmd->add_option("--truth", mir_truth, "whitespace-separated 0/1 stream");
  mir_cmd->add_option("--predicted", mir_predicted, "whitespace-separated 0/1 stream");
  mir_cmd->add_option("--order", mir_order, "Markov chain order");

  auto* base_cmd = app.add_subcommand("baseline", "sentiment baseline, or score an external window detector");
  std::string windowed;
  Timestamp window_length = 3600;
  base_cmd->add_option("--windowed", windowed, "JSONL of {start, predicted, decision} windows");
  base_cmd->add_option("--window-length", window_length, "window length in seconds");

  auto* synth_cmd = app.add_subcommand("synth", "write a seeded synthetic scenario");
  auto* run_cmd = app.add_subcommand("run", "every stage for every multiplier");

  CLI11_PARSE(app, argc, argv);

  try {
    if (keywords->parsed()) {
      ingest::StopWords sw;
      if (!kw_stopwords.empty()) sw = ingest::load_stopwords(kw_stopwords);
      else sw = ingest::load_stopwords(resolve_config(g).stopwords);
      std::ifstream in(kw_input);
      if (!in) throw FatalError("cannot read " + kw_input, "keywords");
      std::stringstream buf;
      buf << in.rdbuf();
      json out = json::array();
      for (const auto& k : ingest::rake_extract_keywords(buf.str(), sw, rake))
        out.push_back({{"phrase", k.phrase}, {"score", k.score}, {"occurrences", k.occurrences}});
      print(out);
      return 0;
    }

    if (synth_cmd->parsed()) {
      const auto scenario = synth::default_scenario(g.seed.value_or(7));
      const fs::path dir = g.out.empty() ? fs::path("synthetic") : fs::path(g.out);
      synth::write_synthetic(scenario, synth::generate_synthetic(scenario), dir);
      std::cout << "wrote scenario to " << dir.string() << "\n";
      return 0;
    }

    if (mir_cmd->parsed() && !mir_truth.empty()) {
      if (mir_predicted.empty()) throw FatalError("--truth needs --predicted", "mir");
      const auto c = read_binary_stream(mir_truth);
      const auto l = read_binary_stream(mir_predicted);
      if (c.size() != l.size()) throw FatalError("streams differ in length", "mir");
      print(mir_json(eval::mir(c, l, mir_order)));
      return 0;
    }

    const auto cfg = resolve_config(g);

    if (run_cmd->parsed()) {
      print(run_pipeline(cfg));
      return 0;
    }

    if (calibrate->parsed()) {
      const auto model = run_calibrate(cfg);
      std::cout << model.clustering.words().size() << " words in " << model.clustering.n_categories()
                << " clusters\n";
      return 0;
    }
    if (detect->parsed()) {
      std::cout << run_detect(cfg).size() << " event vectors\n";
      return 0;
    }
    if (label->parsed()) {
      run_label(cfg);
      return 0;
    }
    if (train->parsed()) {
      run_train(cfg);
      return 0;
    }
    if (classify->parsed()) {
      run_classify(cfg);
      return 0;
    }
    if (evaluate->parsed()) {
      print(run_evaluate(cfg));
      return 0;
    }
    if (mir_cmd->parsed()) {
      json out = json::array();
      for (double m : cfg.multipliers) {
        const auto ev = evaluate_stage(cfg, kBurstTag, load_labels(cfg, m), load_predictions(cfg, m));
        auto j = mir_json(eval::mir(ev.pair.truth_stream(), ev.pair.predicted_stream(), mir_order));
        j["multiplier"] = m;
        out.push_back(j);
      }
      print(out);
      return 0;
    }
    if (base_cmd->parsed()) {
      std::optional<fs::path> file;
      if (!windowed.empty()) file = windowed;
      print(run_baseline(cfg, file, window_length));
      return 0;
    }
  } catch (const FatalError& e) {
    std::cerr << "error [" << (e.stage().empty() ? "pipeline" : e.stage()) << "]: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
