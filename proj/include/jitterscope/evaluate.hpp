#pragma once

#include <limits>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "jitterscope/common.hpp"
#include "jitterscope/marketlabel.hpp"

namespace jitterscope::eval {

/// A classified event: its market time, true label C and predicted label L.
struct ScoredEvent {
  Timestamp event_start = 0;
  Timestamp t_prime = 0;
  int truth = 0;      // C, 0 or 1
  int predicted = 0;  // L, 0 or 1
  double decision = 0.0;
};

struct StreamEntry {
  Timestamp t_prime = 0;
  int truth = 0;
  int predicted = 0;
  double decision = 0.0;
  bool inserted_miss = false;
  Timestamp event_start = 0;
};

struct LabelStreamPair {
  std::vector<StreamEntry> entries;

  std::size_t size() const { return entries.size(); }
  std::size_t inserted_misses() const;
  std::vector<int> truth_stream() const;
  std::vector<int> predicted_stream() const;
};

/// Orders the events by t' and inserts a (C=1, L=0) miss for every T_true
/// slot in [slots_from, slots_to] with no event t' strictly within
/// `match_window`. `extra_match_times` are further t' values (e.g. training
/// events) that count as matches without entering the stream. Inserted misses
/// carry decision -inf. Throws FatalError on duplicate (event_start, t').
LabelStreamPair build_streams(std::span<const ScoredEvent> events, const market::LabelSets& sets,
                              Timestamp match_window, Timestamp slots_from, Timestamp slots_to,
                              std::span<const Timestamp> extra_match_times = {});

struct Prf1 {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  bool degenerate = false;  // some ratio had a zero denominator
};

Prf1 prf1_from_counts(std::size_t tp, std::size_t fp, std::size_t fn);
Prf1 prf1(const LabelStreamPair& pair);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;
};

/// Threshold sweep over the distinct decision values (predict positive when
/// decision >= threshold), from (0,0) at +inf to (1,1). Throws FatalError when
/// only one class is present.
std::vector<RocPoint> roc_curve(std::span<const double> decisions, std::span<const int> labels);
double roc_auc(std::span<const RocPoint> curve);

struct MarkovChainModel {
  int alphabet = 2;
  int order = 1;
  Eigen::VectorXd occupancy;    // per context, empirical frequency
  Eigen::MatrixXd transitions;  // contexts x alphabet, rows sum to 1
};

/// Empirical order-`order` chain. A context with no outgoing transitions gets
/// add-1/2 smoothing, i.e. a uniform row. Requires length > order.
MarkovChainModel fit_markov(std::span<const int> stream, int alphabet = 2, int order = 1);

/// -sum_c occupancy_c sum_j p(j|c) log2 p(j|c).
double entropy_rate(const MarkovChainModel& model);

struct MirResult {
  double h_truth = 0.0;
  double h_predicted = 0.0;
  double h_joint = 0.0;
  double mir = 0.0;
};

/// H(C) + H(L) - H(C,L) from marginal binary chains and the joint 4-symbol
/// chain; values in (-1e-9, 0) are clamped to 0. Requires length >= 2.
MirResult mir(const LabelStreamPair& pair, int order = 1);
MirResult mir(std::span<const int> truth, std::span<const int> predicted, int order = 1);

}  // namespace jitterscope::eval
