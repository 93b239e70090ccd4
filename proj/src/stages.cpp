#include "jitterscope/stages.hpp"

#include "jitterscope/artifacts.hpp"

namespace jitterscope::pipeline {

DetectorModel load_detector(const PipelineConfig& config) {
  return detector_from_json(read_json(artifact_path(config, "detector.json")));
}

std::vector<events::EventVector> load_events(const PipelineConfig& config) {
  std::vector<events::EventVector> out;
  for (const auto& j : read_jsonl(artifact_path(config, "events.jsonl"))) out.push_back(event_vector_from_json(j));
  return out;
}

LabelStage load_labels(const PipelineConfig& config, double multiplier) {
  auto stage = label_stage_from_json(read_json(artifact_path(config, "slots", multiplier, ".json")));
  for (const auto& j : read_jsonl(artifact_path(config, "labels", multiplier, ".jsonl")))
    stage.labeled.push_back(labeled_event_from_json(j));
  return stage;
}

std::vector<Prediction> load_predictions(const PipelineConfig& config, double multiplier) {
  std::vector<Prediction> out;
  for (const auto& j : read_jsonl(artifact_path(config, "predictions", multiplier, ".jsonl")))
    out.push_back(prediction_from_json(j));
  return out;
}

DetectorModel run_calibrate(const PipelineConfig& config) {
  std::filesystem::create_directories(config.out_dir);
  auto model = calibrate_stage(config, prepare_tweets(config));
  write_json(artifact_path(config, "detector.json"), to_json(model));
  return model;
}

std::vector<events::EventVector> run_detect(const PipelineConfig& config) {
  auto vectors = detect_stage(config, load_detector(config), prepare_tweets(config));
  write_jsonl(artifact_path(config, "events.jsonl"), to_json_lines(vectors));
  return vectors;
}

void run_label(const PipelineConfig& config) {
  const auto model = load_detector(config);
  const auto vectors = load_events(config);
  const auto market_data = load_market(config);
  for (double m : config.multipliers) {
    const auto stage = label_stage(config, market_data, vectors, model.span.end, m);
    write_jsonl(artifact_path(config, "labels", m, ".jsonl"), to_json_lines(stage.labeled));
    write_json(artifact_path(config, "slots", m, ".json"), to_json(stage));
  }
}

void run_train(const PipelineConfig& config) {
  const auto model = load_detector(config);
  for (double m : config.multipliers)
    write_json(artifact_path(config, "model", m, ".json"),
               to_json(train_stage(config, load_labels(config, m).labeled, model.span.end)));
}

void run_classify(const PipelineConfig& config) {
  const auto model = load_detector(config);
  for (double m : config.multipliers) {
    const auto stage = load_labels(config, m);
    const auto trained = trained_model_from_json(read_json(artifact_path(config, "model", m, ".json")));
    write_jsonl(artifact_path(config, "predictions", m, ".jsonl"),
                to_json_lines(classify_stage(config, trained, stage.labeled, model.span.end)));
  }
}

nlohmann::json run_evaluate(const PipelineConfig& config) {
  const auto model = load_detector(config);
  std::optional<nlohmann::json> truth;
  if (!config.truth.empty()) truth = read_json(config.truth);
  for (double m : config.multipliers) {
    const auto stage = load_labels(config, m);
    const auto predictions = load_predictions(config, m);
    const auto ev = evaluate_stage(config, kBurstTag, stage, predictions);
    write_json(artifact_path(config, "metrics", m, ".json"), to_json(ev.metrics));
    write_roc_csv(artifact_path(config, "roc", m, ".csv"), ev.roc);
    if (truth) {
      auto j = to_json(score_planted(predictions, *truth, model.span.end));
      j["multiplier"] = m;
      write_json(artifact_path(config, "planted", m, ".json"), j);
    }
  }
  return assemble_report(config);
}

nlohmann::json run_baseline(const PipelineConfig& config, const std::optional<std::filesystem::path>& windowed,
                            Timestamp window_length) {
  const auto model = load_detector(config);
  const auto market_data = load_market(config);
  if (windowed) {
    std::vector<baseline::ScoredWindow> windows;
    for (const auto& j : read_jsonl(*windowed))
      windows.push_back({j.at("start").get<Timestamp>(), j.at("predicted").get<int>(),
                         j.value("decision", j.at("predicted").get<double>())});
    for (double m : config.multipliers) {
      const auto sets = market::build_label_sets(market_data.volatility, m, model.span.end, config.baseline_mode);
      auto pair = baseline::score_windows(windows, window_length, sets, model.span.end + 1,
                                          market_data.volatility.timestamps.back());
      const auto ev = evaluate_pair(kWindowedTag, m, std::move(pair), config.markov_order);
      write_json(artifact_path(config, "metrics_windowed", m, ".json"), to_json(ev.metrics));
      write_roc_csv(artifact_path(config, "roc_windowed", m, ".csv"), ev.roc);
    }
  } else {
    const auto tweets = prepare_tweets(config);
    for (double m : config.multipliers) {
      const auto run = baseline_stage(config, tweets, market_data, model.span.end, m);
      write_json(artifact_path(config, "metrics_sentiment", m, ".json"), to_json(run.evaluation.metrics));
      write_roc_csv(artifact_path(config, "roc_sentiment", m, ".csv"), run.evaluation.roc);
    }
  }
  return assemble_report(config);
}

}  // namespace jitterscope::pipeline
