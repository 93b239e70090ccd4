#pragma once

// Randomized property checks shared by the unit tests and the acceptance
// binary. Each returns the raw measurements; callers apply the tolerances.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "jitterscope/events.hpp"

namespace props {

struct KernelReport {
  int fixtures = 0;
  int slope_checks = 0;
  double max_slope_rel_error = 0.0;
  double max_mass_rel_error = 0.0;
};
KernelReport kernel_checks(int fixtures, std::uint64_t seed);

struct BurstReport {
  int cases = 0;
  int steps = 0;
  int violations = 0;
};
BurstReport burst_state_checks(int cases, std::uint64_t seed);

struct ClusterReport {
  int fixtures = 0;
  int mismatches = 0;
  int identical_fixtures = 0;
  int identical_split = 0;
};
ClusterReport clustering_checks(int fixtures, std::uint64_t seed);

struct MonotoneReport {
  int events = 0;
  int vectors = 0;
  int violations = 0;
};
MonotoneReport monotone_merge(std::span<const jitterscope::events::EventVector> vectors);

struct LabelReport {
  bool worked_day = false;
  std::string worked_day_detail;
  int layouts = 0;
  int queries = 0;
  int mismatches = 0;
};
LabelReport labeling_checks(int layouts, std::uint64_t seed);

struct ClassifierReport {
  bool poly_solves_xor = false;
  bool linear_xor_certificate = false;
  bool linear_fails_xor = false;
  bool separable_certificate = false;
  bool linear_solves_separable = false;
  int probes = 0;
  int probe_disagreements = 0;
  double max_decision_gap = 0.0;
  double max_kkt_residual = 0.0;
};
ClassifierReport classifier_checks(std::uint64_t seed);

struct SelectionReport {
  int trials = 0;
  int cfs_first = 0;
  int infogain_first = 0;
};
SelectionReport planted_feature_trials(int trials, std::uint64_t seed);

struct MetricsReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  int auc_fixtures = 0;
  double max_auc_error = 0.0;
};
MetricsReport metrics_checks(int auc_fixtures, std::uint64_t seed);

struct InformationReport {
  double bernoulli_entropy_rate = 0.0;
  double mir_self = 0.0;
  double h_self = 0.0;
  double mir_independent = 0.0;
};
InformationReport information_checks(std::size_t n, std::uint64_t seed);

}  // namespace props

namespace props {

struct EndToEndReport {
  int planted = 0;
  int impacted = 0;
  double planted_f1 = 0.0;  // at multiplier 2.5
  double burst_mir = 0.0;
  double sentiment_mir = 0.0;
  double burst_f1 = 0.0;
  double seconds = 0.0;
};
/// Writes the default seeded scenario under `dir` and runs every stage.
EndToEndReport planted_recovery(const std::filesystem::path& dir, std::uint64_t seed);

struct DeterminismReport {
  bool repeat_identical = false;
  bool staged_identical = false;
  bool model_without_future_identical = false;
  std::vector<std::string> differing;
};
DeterminismReport determinism_checks(const std::filesystem::path& dir, std::uint64_t seed);

}  // namespace props
