#include "jitterscope/artifacts.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace jitterscope::pipeline {
namespace {

using nlohmann::json;

json vec(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd vec_from(const json& j) {
  const auto xs = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
}

json indices(const std::vector<Eigen::Index>& xs) { return std::vector<std::int64_t>(xs.begin(), xs.end()); }

std::vector<Eigen::Index> indices_from(const json& j) {
  const auto xs = j.get<std::vector<std::int64_t>>();
  return {xs.begin(), xs.end()};
}

json selection_json(const ml::FeatureSelection& s) {
  return {{"method", ml::to_string(s.method)}, {"indices", indices(s.indices)}, {"scores", vec(s.scores)}};
}

ml::FeatureSelection selection_from(const json& j) {
  ml::FeatureSelection s;
  s.method = ml::parse_selection_method(j.at("method").get<std::string>());
  s.indices = indices_from(j.at("indices"));
  s.scores = vec_from(j.at("scores"));
  return s;
}

char class_code(market::SlotClass c) {
  switch (c) {
    case market::SlotClass::True: return 'T';
    case market::SlotClass::Neutral: return 'N';
    case market::SlotClass::False: return 'F';
  }
  return 'F';
}

}  // namespace

std::filesystem::path artifact_path(const PipelineConfig& config, const std::string& name) {
  return config.out_dir / name;
}

std::filesystem::path artifact_path(const PipelineConfig& config, const std::string& stem, double multiplier,
                                    const std::string& extension) {
  return config.out_dir / (stem + "_m" + format_multiplier(multiplier) + extension);
}

json to_json(const DetectorModel& m) {
  return {{"t_r", m.thresholds.rate},
          {"t_s", m.thresholds.slope},
          {"delta_s", m.bandwidth},
          {"grid_step", m.grid_step},
          {"train_begin", m.span.begin},
          {"train_end", m.span.end},
          {"data_end", m.data_end},
          {"words", m.clustering.words()},
          {"categories", m.clustering.categories()}};
}

DetectorModel detector_from_json(const json& j) {
  try {
    DetectorModel m;
    m.thresholds = {j.at("t_r").get<double>(), j.at("t_s").get<double>()};
    m.bandwidth = j.at("delta_s").get<double>();
    m.grid_step = j.at("grid_step").get<double>();
    m.span = {j.at("train_begin").get<Timestamp>(), j.at("train_end").get<Timestamp>()};
    m.data_end = j.at("data_end").get<Timestamp>();
    m.clustering = ratetrack::WordClustering(j.at("words").get<std::vector<std::string>>(),
                                             j.at("categories").get<std::vector<int>>());
    return m;
  } catch (const json::exception& e) {
    throw FatalError(std::string("malformed detector sidecar: ") + e.what(), "detect");
  }
}

json to_json(const events::EventVector& v) {
  return {{"event_start_ts", v.event_start},
          {"snapshot_ts", v.snapshot},
          {"n_categories", v.n_categories},
          {"features", vec(v.features)},
          {"geo_missing", v.geo_missing}};
}

events::EventVector event_vector_from_json(const json& j) {
  events::EventVector v;
  v.event_start = j.at("event_start_ts").get<Timestamp>();
  v.snapshot = j.at("snapshot_ts").get<Timestamp>();
  v.n_categories = j.at("n_categories").get<int>();
  v.features = vec_from(j.at("features"));
  v.geo_missing = j.at("geo_missing").get<bool>();
  return v;
}

json to_json(const market::LabeledEvent& e) {
  return {{"event_start_ts", e.event_start},
          {"snapshot", e.snapshot},
          {"t_prime", e.t_prime},
          {"label", e.label},
          {"features", vec(e.features)}};
}

market::LabeledEvent labeled_event_from_json(const json& j) {
  market::LabeledEvent e;
  e.event_start = j.at("event_start_ts").get<Timestamp>();
  e.snapshot = j.at("snapshot").get<Timestamp>();
  e.t_prime = j.at("t_prime").get<Timestamp>();
  e.label = j.at("label").get<int>();
  e.features = vec_from(j.at("features"));
  return e;
}

json to_json(const LabelStage& s) {
  std::string classes;
  for (auto c : s.sets.classes) classes += class_code(c);
  return {{"multiplier", s.multiplier},
          {"baseline", s.sets.baseline},
          {"t_true_val", s.sets.true_threshold},
          {"t_false_val", s.sets.false_threshold},
          {"slots_from", s.slots_from},
          {"slots_to", s.slots_to},
          {"timestamps", s.sets.timestamps},
          {"classes", classes}};
}

LabelStage label_stage_from_json(const json& j) {
  LabelStage s;
  s.multiplier = j.at("multiplier").get<double>();
  s.sets.baseline = j.at("baseline").get<double>();
  s.sets.true_threshold = j.at("t_true_val").get<double>();
  s.sets.false_threshold = j.at("t_false_val").get<double>();
  s.slots_from = j.at("slots_from").get<Timestamp>();
  s.slots_to = j.at("slots_to").get<Timestamp>();
  s.sets.timestamps = j.at("timestamps").get<std::vector<Timestamp>>();
  const auto classes = j.at("classes").get<std::string>();
  if (classes.size() != s.sets.timestamps.size()) throw FatalError("slot file: class count mismatch", "label");
  for (std::size_t i = 0; i < classes.size(); ++i) {
    const Timestamp t = s.sets.timestamps[i];
    switch (classes[i]) {
      case 'T': s.sets.classes.push_back(market::SlotClass::True); s.sets.true_slots.push_back(t); break;
      case 'N': s.sets.classes.push_back(market::SlotClass::Neutral); s.sets.neutral_slots.push_back(t); break;
      case 'F': s.sets.classes.push_back(market::SlotClass::False); s.sets.false_slots.push_back(t); break;
      default: throw FatalError("slot file: unknown class code", "label");
    }
  }
  return s;
}

json to_json(const TrainedModel& m) {
  const auto& c = m.classifier;
  json pool = json::array();
  for (Eigen::Index i = 0; i < c.pool().rows(); ++i) pool.push_back(vec(c.pool().row(i).transpose()));
  return {{"normalizer",
           {{"input_dim", m.normalizer.input_dim},
            {"kept", indices(m.normalizer.kept)},
            {"dropped", indices(m.normalizer.dropped)},
            {"mean", vec(m.normalizer.mean)},
            {"stdev", vec(m.normalizer.stdev)}}},
          {"selection", selection_json(m.selection)},
          {"alternate", selection_json(m.alternate)},
          {"cv", {{"folds", m.cv_folds}, {"f1", m.cv_f1}}},
          {"kernel", c.params().kernel.describe()},
          {"C", c.params().C},
          {"weights", {{"positive", c.params().weights.positive}, {"negative", c.params().weights.negative}}},
          {"tolerance", c.params().tolerance},
          {"max_iterations", c.params().max_iterations},
          {"support_indices", indices(c.support_indices())},
          {"pool", pool},
          {"labels", c.labels()},
          {"alpha", vec(c.alpha())},
          {"bias", c.bias()},
          {"iterations", c.iterations()}};
}

TrainedModel trained_model_from_json(const json& j) {
  try {
    TrainedModel m;
    const auto& nz = j.at("normalizer");
    m.normalizer.input_dim = nz.at("input_dim").get<Eigen::Index>();
    m.normalizer.kept = indices_from(nz.at("kept"));
    m.normalizer.dropped = indices_from(nz.at("dropped"));
    m.normalizer.mean = vec_from(nz.at("mean"));
    m.normalizer.stdev = vec_from(nz.at("stdev"));
    m.selection = selection_from(j.at("selection"));
    m.alternate = selection_from(j.at("alternate"));
    m.cv_folds = j.at("cv").at("folds").get<int>();
    m.cv_f1 = j.at("cv").at("f1").get<double>();
    ml::SvmParams p;
    p.kernel = ml::parse_kernel(j.at("kernel").get<std::string>());
    p.C = j.at("C").get<double>();
    p.weights = {j.at("weights").at("positive").get<double>(), j.at("weights").at("negative").get<double>()};
    p.tolerance = j.at("tolerance").get<double>();
    p.max_iterations = j.at("max_iterations").get<std::int64_t>();
    const auto& pool_j = j.at("pool");
    const auto cols = static_cast<Eigen::Index>(m.selection.indices.size());
    Eigen::MatrixXd pool(static_cast<Eigen::Index>(pool_j.size()), cols);
    for (std::size_t i = 0; i < pool_j.size(); ++i) {
      const auto row = vec_from(pool_j[i]);
      if (row.size() != cols) throw FatalError("model sidecar: pool row has wrong width", "train");
      pool.row(static_cast<Eigen::Index>(i)) = row.transpose();
    }
    m.classifier = ml::KernelClassifier(p, std::move(pool), j.at("labels").get<std::vector<int>>(),
                                        vec_from(j.at("alpha")), j.at("bias").get<double>(),
                                        j.at("iterations").get<std::int64_t>());
    return m;
  } catch (const json::exception& e) {
    throw FatalError(std::string("malformed model sidecar: ") + e.what(), "train");
  }
}

json to_json(const Prediction& p) {
  return {{"event_start", p.event_start}, {"snapshot", p.snapshot}, {"t_prime", p.t_prime},
          {"truth", p.truth},             {"predicted", p.predicted}, {"decision", p.decision}};
}

Prediction prediction_from_json(const json& j) {
  Prediction p;
  p.event_start = j.at("event_start").get<Timestamp>();
  p.snapshot = j.at("snapshot").get<Timestamp>();
  p.t_prime = j.at("t_prime").get<Timestamp>();
  p.truth = j.at("truth").get<int>();
  p.predicted = j.at("predicted").get<int>();
  p.decision = j.at("decision").get<double>();
  return p;
}

json to_json(const eval::Prf1& p) {
  return {{"precision", p.precision}, {"recall", p.recall}, {"f1", p.f1}, {"tp", p.tp},
          {"fp", p.fp},               {"fn", p.fn},         {"degenerate", p.degenerate}};
}

json to_json(const Metrics& m) {
  json j = {{"detector", m.detector},
            {"multiplier", m.multiplier},
            {"precision", m.prf.precision},
            {"recall", m.prf.recall},
            {"f1", m.prf.f1},
            {"auc", m.auc ? json(*m.auc) : json(nullptr)},
            {"mir_bits", m.mir ? json(m.mir->mir) : json(nullptr)},
            {"stream_length", m.stream_length},
            {"inserted_misses", m.inserted_misses},
            {"tp", m.prf.tp},
            {"fp", m.prf.fp},
            {"fn", m.prf.fn},
            {"degenerate", m.prf.degenerate}};
  if (m.mir) {
    j["h_truth_bits"] = m.mir->h_truth;
    j["h_predicted_bits"] = m.mir->h_predicted;
    j["h_joint_bits"] = m.mir->h_joint;
  }
  return j;
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FatalError("cannot read artifact " + path.string(), "load");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw FatalError("artifact " + path.string() + ": " + e.what(), "load");
  }
}

void write_jsonl(const std::filesystem::path& path, const std::vector<json>& lines) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& l : lines) out << l.dump() << "\n";
}

std::vector<json> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FatalError("cannot read artifact " + path.string(), "load");
  std::vector<json> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw FatalError("artifact " + path.string() + " line " + std::to_string(n) + ": " + e.what(), "load");
    }
  }
  return out;
}

void write_roc_csv(const std::filesystem::path& path, std::span<const eval::RocPoint> roc) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "fpr,tpr,threshold\n";
  char buf[128];
  for (const auto& p : roc) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", p.fpr, p.tpr, p.threshold);
    out << buf;
  }
}

}  // namespace jitterscope::pipeline
