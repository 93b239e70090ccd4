#include "jitterscope/evaluate.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace jitterscope::eval {

std::size_t LabelStreamPair::inserted_misses() const {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [](const StreamEntry& e) { return e.inserted_miss; }));
}

std::vector<int> LabelStreamPair::truth_stream() const {
  std::vector<int> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.truth);
  return out;
}

std::vector<int> LabelStreamPair::predicted_stream() const {
  std::vector<int> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.predicted);
  return out;
}

LabelStreamPair build_streams(std::span<const ScoredEvent> events, const market::LabelSets& sets,
                              Timestamp match_window, Timestamp slots_from, Timestamp slots_to,
                              std::span<const Timestamp> extra_match_times) {
  LabelStreamPair pair;
  std::set<std::pair<Timestamp, Timestamp>> seen;
  std::vector<Timestamp> matchable(extra_match_times.begin(), extra_match_times.end());
  for (const auto& e : events) {
    if (e.truth != 0 && e.truth != 1) throw std::invalid_argument("stream truth labels must be 0 or 1");
    if (!seen.insert({e.event_start, e.t_prime}).second)
      throw FatalError("duplicate event (" + std::to_string(e.event_start) + ", " + std::to_string(e.t_prime) +
                           ") in label stream; dedupe first",
                       "evaluate");
    pair.entries.push_back({e.t_prime, e.truth, e.predicted, e.decision, false, e.event_start});
    matchable.push_back(e.t_prime);
  }
  std::sort(matchable.begin(), matchable.end());
  for (Timestamp s : sets.true_slots) {
    if (s < slots_from || s > slots_to) continue;
    const auto d = market::nearest_distance(matchable, s);
    if (!d || *d >= match_window)
      pair.entries.push_back({s, 1, 0, -std::numeric_limits<double>::infinity(), true, s});
  }
  std::stable_sort(pair.entries.begin(), pair.entries.end(), [](const StreamEntry& a, const StreamEntry& b) {
    if (a.t_prime != b.t_prime) return a.t_prime < b.t_prime;
    if (a.inserted_miss != b.inserted_miss) return !a.inserted_miss;
    return a.event_start < b.event_start;
  });
  return pair;
}

Prf1 prf1_from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
  Prf1 r;
  r.tp = tp;
  r.fp = fp;
  r.fn = fn;
  const double t = static_cast<double>(tp);
  if (tp + fp > 0) r.precision = t / static_cast<double>(tp + fp);
  else r.degenerate = true;
  if (tp + fn > 0) r.recall = t / static_cast<double>(tp + fn);
  else r.degenerate = true;
  if (r.precision + r.recall > 0.0) r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
  else r.degenerate = true;
  return r;
}

Prf1 prf1(const LabelStreamPair& pair) {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  for (const auto& e : pair.entries) {
    if (e.truth == 1 && e.predicted == 1) ++tp;
    else if (e.truth == 0 && e.predicted == 1) ++fp;
    else if (e.truth == 1 && e.predicted == 0) ++fn;
  }
  return prf1_from_counts(tp, fp, fn);
}

std::vector<RocPoint> roc_curve(std::span<const double> decisions, std::span<const int> labels) {
  if (decisions.size() != labels.size()) throw std::invalid_argument("decision and label counts differ");
  std::vector<std::size_t> order(decisions.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return decisions[a] > decisions[b]; });
  double pos = 0.0;
  double neg = 0.0;
  for (int l : labels) (l == 1 ? pos : neg) += 1.0;
  if (pos == 0.0 || neg == 0.0) throw FatalError("ROC needs both classes", "evaluate");

  std::vector<RocPoint> curve{{0.0, 0.0, std::numeric_limits<double>::infinity()}};
  double tp = 0.0;
  double fp = 0.0;
  std::size_t k = 0;
  while (k < order.size()) {
    const double th = decisions[order[k]];
    while (k < order.size() && decisions[order[k]] == th) {
      (labels[order[k]] == 1 ? tp : fp) += 1.0;
      ++k;
    }
    curve.push_back({fp / neg, tp / pos, th});
  }
  return curve;
}

double roc_auc(std::span<const RocPoint> curve) {
  double area = 0.0;
  for (std::size_t i = 1; i < curve.size(); ++i)
    area += (curve[i].fpr - curve[i - 1].fpr) * (curve[i].tpr + curve[i - 1].tpr) / 2.0;
  return area;
}

}  // namespace jitterscope::eval
