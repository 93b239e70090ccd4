#pragma once

#include <filesystem>
#include <optional>

#include <json.hpp>

#include "jitterscope/pipeline.hpp"

// Each stage reads the previous stage's artifacts from the output directory
// and writes its own, so a run can stop and resume at any stage boundary.
namespace jitterscope::pipeline {

/// detector.json
DetectorModel run_calibrate(const PipelineConfig& config);
/// events.jsonl
std::vector<events::EventVector> run_detect(const PipelineConfig& config);
/// labels_m*.jsonl and slots_m*.json per multiplier.
void run_label(const PipelineConfig& config);
/// model_m*.json
void run_train(const PipelineConfig& config);
/// predictions_m*.jsonl
void run_classify(const PipelineConfig& config);
/// metrics_m*.json, roc_m*.csv and planted_m*.json; returns the report.
nlohmann::json run_evaluate(const PipelineConfig& config);
/// Sentiment baseline metrics, or with `windowed` the external window
/// detector's scored windows (JSONL of start, predicted, decision).
nlohmann::json run_baseline(const PipelineConfig& config,
                            const std::optional<std::filesystem::path>& windowed = std::nullopt,
                            Timestamp window_length = kSecondsPerHour);

DetectorModel load_detector(const PipelineConfig& config);
std::vector<events::EventVector> load_events(const PipelineConfig& config);
/// Sets and slot range from slots_m*.json plus the labeled vectors.
LabelStage load_labels(const PipelineConfig& config, double multiplier);
std::vector<Prediction> load_predictions(const PipelineConfig& config, double multiplier);

}  // namespace jitterscope::pipeline
