#include "jitterscope/selection.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>

#include "jitterscope/common.hpp"
#include "jitterscope/ratetrack.hpp"

namespace jitterscope::ml {
namespace {

void require_two_classes(std::span<const int> y, Eigen::Index rows) {
  if (static_cast<Eigen::Index>(y.size()) != rows) throw std::invalid_argument("label count does not match rows");
  std::size_t pos = 0;
  for (int v : y) {
    if (v != 0 && v != 1) throw std::invalid_argument("labels must be 0 or 1");
    pos += static_cast<std::size_t>(v);
  }
  if (pos == 0 || pos == y.size()) throw FatalError("feature selection needs both classes in the labels", "select");
}

double entropy_bits(std::span<const double> counts, double total) {
  double h = 0.0;
  for (double c : counts)
    if (c > 0.0) h -= c / total * std::log2(c / total);
  return h;
}

}  // namespace

std::string to_string(SelectionMethod m) { return m == SelectionMethod::Cfs ? "cfs" : "infogain"; }

SelectionMethod parse_selection_method(const std::string& s) {
  if (s == "cfs") return SelectionMethod::Cfs;
  if (s == "infogain") return SelectionMethod::InfoGain;
  throw std::invalid_argument("unknown selection method '" + s + "' (cfs, infogain)");
}

Eigen::VectorXd class_correlations(const Eigen::MatrixXd& X, std::span<const int> y) {
  Eigen::VectorXd labels(static_cast<Eigen::Index>(y.size()));
  for (std::size_t i = 0; i < y.size(); ++i) labels[static_cast<Eigen::Index>(i)] = y[i];
  Eigen::VectorXd out(X.cols());
  for (Eigen::Index c = 0; c < X.cols(); ++c) out[c] = std::abs(ratetrack::pearson(X.col(c), labels));
  return out;
}

Eigen::MatrixXd feature_correlations(const Eigen::MatrixXd& X) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Identity(X.cols(), X.cols());
  for (Eigen::Index a = 0; a < X.cols(); ++a)
    for (Eigen::Index b = a + 1; b < X.cols(); ++b) out(a, b) = out(b, a) = std::abs(ratetrack::pearson(X.col(a), X.col(b)));
  return out;
}

double cfs_merit(std::span<const Eigen::Index> subset, const Eigen::VectorXd& class_corr,
                 const Eigen::MatrixXd& feature_corr) {
  const auto k = static_cast<double>(subset.size());
  if (subset.empty()) return 0.0;
  double rcf = 0.0;
  for (auto i : subset) rcf += class_corr[i];
  rcf /= k;
  double rff = 0.0;
  for (std::size_t a = 0; a < subset.size(); ++a)
    for (std::size_t b = a + 1; b < subset.size(); ++b) rff += feature_corr(subset[a], subset[b]);
  const double pairs = k * (k - 1.0) / 2.0;
  if (pairs > 0.0) rff /= pairs;
  const double denom = std::sqrt(k + k * (k - 1.0) * rff);
  return denom > 0.0 ? k * rcf / denom : 0.0;
}

FeatureSelection cfs_select(const Eigen::MatrixXd& X, std::span<const int> y, int max_stale) {
  require_two_classes(y, X.rows());
  if (X.cols() == 0) throw FatalError("no features to select from", "select");
  const Eigen::VectorXd rcf = class_correlations(X, y);
  const Eigen::MatrixXd rff = feature_correlations(X);

  struct Node {
    double merit = 0.0;
    std::vector<Eigen::Index> members;  // sorted
    std::vector<Eigen::Index> order;    // insertion order
  };
  constexpr double kEps = 1e-12;
  std::vector<Node> open{Node{}};
  std::set<std::vector<Eigen::Index>> visited{{}};
  Node best;
  int stale = 0;
  while (!open.empty() && stale < max_stale) {
    // Highest merit first; ties go to the lexicographically smaller subset.
    auto head_it = std::max_element(open.begin(), open.end(), [](const Node& a, const Node& b) {
      if (a.merit != b.merit) return a.merit < b.merit;
      return a.members > b.members;
    });
    Node head = std::move(*head_it);
    open.erase(head_it);
    bool improved = false;
    for (Eigen::Index f = 0; f < X.cols(); ++f) {
      if (std::binary_search(head.members.begin(), head.members.end(), f)) continue;
      Node child;
      child.members = head.members;
      child.members.insert(std::upper_bound(child.members.begin(), child.members.end(), f), f);
      if (!visited.insert(child.members).second) continue;
      child.order = head.order;
      child.order.push_back(f);
      child.merit = cfs_merit(child.members, rcf, rff);
      if (child.merit > best.merit + kEps) {
        best = child;
        improved = true;
      }
      open.push_back(std::move(child));
    }
    stale = improved ? 0 : stale + 1;
  }

  FeatureSelection sel;
  sel.method = SelectionMethod::Cfs;
  sel.scores = rcf;
  sel.indices = best.order;
  if (sel.indices.empty()) {
    Eigen::Index top = 0;
    rcf.maxCoeff(&top);
    sel.indices.push_back(top);
  }
  return sel;
}

std::vector<int> equal_frequency_bins(const Eigen::VectorXd& values, int bins) {
  if (bins < 1) throw std::invalid_argument("bins must be positive");
  const auto n = static_cast<std::size_t>(values.size());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[static_cast<Eigen::Index>(a)] < values[static_cast<Eigen::Index>(b)];
  });
  std::vector<int> out(n, 0);
  std::size_t r = 0;
  while (r < n) {
    std::size_t end = r;
    const double v = values[static_cast<Eigen::Index>(order[r])];
    while (end < n && values[static_cast<Eigen::Index>(order[end])] == v) ++end;
    const int b = std::min(bins - 1, static_cast<int>(r * static_cast<std::size_t>(bins) / n));
    for (std::size_t k = r; k < end; ++k) out[order[k]] = b;
    r = end;
  }
  return out;
}

double information_gain(std::span<const int> bins, std::span<const int> y) {
  const auto n = static_cast<double>(y.size());
  std::map<int, std::array<double, 2>> table;
  std::array<double, 2> totals{0.0, 0.0};
  for (std::size_t i = 0; i < y.size(); ++i) {
    table[bins[i]][static_cast<std::size_t>(y[i])] += 1.0;
    totals[static_cast<std::size_t>(y[i])] += 1.0;
  }
  double conditional = 0.0;
  for (const auto& [bin, counts] : table) {
    const double m = counts[0] + counts[1];
    conditional += m / n * entropy_bits(counts, m);
  }
  return std::max(0.0, entropy_bits(totals, n) - conditional);
}

FeatureSelection infogain_rank(const Eigen::MatrixXd& X, std::span<const int> y, int bins, double alpha) {
  require_two_classes(y, X.rows());
  if (X.cols() == 0) throw FatalError("no features to select from", "select");
  FeatureSelection sel;
  sel.method = SelectionMethod::InfoGain;
  sel.scores.resize(X.cols());
  std::vector<bool> retained(static_cast<std::size_t>(X.cols()), false);
  const double n = static_cast<double>(X.rows());
  for (Eigen::Index c = 0; c < X.cols(); ++c) {
    const auto b = equal_frequency_bins(X.col(c), bins);
    const double ig = information_gain(b, y);
    sel.scores[c] = ig;
    const auto used = std::set<int>(b.begin(), b.end()).size();
    if (ig > 0.0 && used > 1) {
      // G statistic of the bin x class table, in nats.
      const double g = 2.0 * n * std::numbers::ln2 * ig;
      const boost::math::chi_squared dist(static_cast<double>(used - 1));
      retained[static_cast<std::size_t>(c)] = boost::math::cdf(boost::math::complement(dist, g)) < alpha;
    }
  }
  std::vector<Eigen::Index> ranked(static_cast<std::size_t>(X.cols()));
  std::iota(ranked.begin(), ranked.end(), Eigen::Index{0});
  std::stable_sort(ranked.begin(), ranked.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return sel.scores[a] > sel.scores[b]; });
  for (auto c : ranked)
    if (retained[static_cast<std::size_t>(c)]) sel.indices.push_back(c);
  if (sel.indices.empty()) sel.indices.push_back(ranked.front());
  return sel;
}

}  // namespace jitterscope::ml
