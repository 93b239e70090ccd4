#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "jitterscope/pipeline.hpp"

namespace jitterscope::pipeline {

std::filesystem::path artifact_path(const PipelineConfig& config, const std::string& name);
/// e.g. ("labels", 2.5, ".jsonl") -> labels_m2.5.jsonl
std::filesystem::path artifact_path(const PipelineConfig& config, const std::string& stem, double multiplier,
                                    const std::string& extension);

nlohmann::json to_json(const DetectorModel& m);
DetectorModel detector_from_json(const nlohmann::json& j);

nlohmann::json to_json(const events::EventVector& v);
events::EventVector event_vector_from_json(const nlohmann::json& j);

nlohmann::json to_json(const market::LabeledEvent& e);
market::LabeledEvent labeled_event_from_json(const nlohmann::json& j);

nlohmann::json to_json(const LabelStage& s);
/// Restores the sets and slot range; `labeled` stays empty.
LabelStage label_stage_from_json(const nlohmann::json& j);

nlohmann::json to_json(const TrainedModel& m);
TrainedModel trained_model_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Prediction& p);
Prediction prediction_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Metrics& m);
nlohmann::json to_json(const eval::Prf1& p);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

void write_jsonl(const std::filesystem::path& path, const std::vector<nlohmann::json>& lines);

template <typename Range>
std::vector<nlohmann::json> to_json_lines(const Range& items) {
  std::vector<nlohmann::json> out;
  for (const auto& item : items) out.push_back(to_json(item));
  return out;
}
std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path);

void write_roc_csv(const std::filesystem::path& path, std::span<const eval::RocPoint> roc);

}  // namespace jitterscope::pipeline
