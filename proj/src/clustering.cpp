#include "jitterscope/clustering.hpp"

#include <limits>
#include <stdexcept>

namespace jitterscope::ratetrack {

WordClustering::WordClustering(std::vector<std::string> words, std::vector<int> categories)
    : words_(std::move(words)), categories_(std::move(categories)) {
  if (words_.size() != categories_.size()) throw std::invalid_argument("words/categories size mismatch");
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (categories_[i] < 0) throw std::invalid_argument("negative category");
    if (!index_.emplace(words_[i], categories_[i]).second)
      throw std::invalid_argument("duplicate word in clustering: " + words_[i]);
    n_categories_ = std::max(n_categories_, categories_[i] + 1);
  }
}

std::optional<int> WordClustering::category_of(const std::string& word) const {
  const auto it = index_.find(word);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::vector<std::string>> WordClustering::members() const {
  std::vector<std::vector<std::string>> out(static_cast<std::size_t>(n_categories_));
  for (std::size_t i = 0; i < words_.size(); ++i) out[static_cast<std::size_t>(categories_[i])].push_back(words_[i]);
  return out;
}

WordClustering WordClustering::from_members(const std::vector<std::vector<std::string>>& members) {
  std::vector<std::string> words;
  std::vector<int> cats;
  for (std::size_t c = 0; c < members.size(); ++c) {
    for (const auto& w : members[c]) {
      words.push_back(w);
      cats.push_back(static_cast<int>(c));
    }
  }
  return WordClustering(std::move(words), std::move(cats));
}

std::vector<int> agglomerative_cluster(const Eigen::MatrixXd& distance, double cutoff, Linkage linkage) {
  const Eigen::Index n = distance.rows();
  if (distance.cols() != n) throw std::invalid_argument("distance matrix must be square");
  Eigen::MatrixXd d = distance;
  std::vector<int> owner(static_cast<std::size_t>(n));
  std::vector<double> size(static_cast<std::size_t>(n), 1.0);
  std::vector<bool> active(static_cast<std::size_t>(n), true);
  for (Eigen::Index i = 0; i < n; ++i) owner[static_cast<std::size_t>(i)] = static_cast<int>(i);

  // Cluster slots are indexed by their smallest member, so scanning slots in
  // order gives the documented tie-break.
  while (true) {
    double best = std::numeric_limits<double>::infinity();
    Eigen::Index bi = -1;
    Eigen::Index bj = -1;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!active[static_cast<std::size_t>(i)]) continue;
      for (Eigen::Index j = i + 1; j < n; ++j) {
        if (!active[static_cast<std::size_t>(j)]) continue;
        if (d(i, j) < best) {
          best = d(i, j);
          bi = i;
          bj = j;
        }
      }
    }
    if (bi < 0 || best > cutoff) break;

    const double na = size[static_cast<std::size_t>(bi)];
    const double nb = size[static_cast<std::size_t>(bj)];
    for (Eigen::Index k = 0; k < n; ++k) {
      if (!active[static_cast<std::size_t>(k)] || k == bi || k == bj) continue;
      double merged = 0.0;
      switch (linkage) {
        case Linkage::Single: merged = std::min(d(bi, k), d(bj, k)); break;
        case Linkage::Complete: merged = std::max(d(bi, k), d(bj, k)); break;
        case Linkage::Average: merged = (na * d(bi, k) + nb * d(bj, k)) / (na + nb); break;
      }
      d(bi, k) = d(k, bi) = merged;
    }
    size[static_cast<std::size_t>(bi)] = na + nb;
    active[static_cast<std::size_t>(bj)] = false;
    for (auto& o : owner)
      if (o == bj) o = static_cast<int>(bi);
  }

  std::vector<int> labels(static_cast<std::size_t>(n), -1);
  std::vector<int> slot_label(static_cast<std::size_t>(n), -1);
  int next = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto slot = static_cast<std::size_t>(owner[static_cast<std::size_t>(i)]);
    if (slot_label[slot] < 0) slot_label[slot] = next++;
    labels[static_cast<std::size_t>(i)] = slot_label[slot];
  }
  return labels;
}

Eigen::MatrixXd rate_distance_matrix(std::span<const WordRateTrack> tracks, std::span<const double> grid) {
  if (grid.size() < 3) throw std::invalid_argument("clustering grid needs at least 3 samples");
  const auto n = static_cast<Eigen::Index>(tracks.size());
  Eigen::MatrixXd samples(static_cast<Eigen::Index>(grid.size()), n);
  for (Eigen::Index i = 0; i < n; ++i) samples.col(i) = sample_rates(tracks[static_cast<std::size_t>(i)], grid);
  Eigen::MatrixXd dist = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) dist(i, j) = dist(j, i) = 1.0 - pearson(samples.col(i), samples.col(j));
  return dist;
}

WordClustering cluster_words(std::span<const WordRateTrack> tracks, std::span<const double> grid, double cutoff,
                             Linkage linkage) {
  if (tracks.empty()) throw std::invalid_argument("cluster_words needs at least one track");
  std::vector<std::string> words;
  for (const auto& t : tracks) words.push_back(t.word());
  if (tracks.size() == 1) return WordClustering(std::move(words), {0});
  return WordClustering(std::move(words), agglomerative_cluster(rate_distance_matrix(tracks, grid), cutoff, linkage));
}

}  // namespace jitterscope::ratetrack
