#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "jitterscope/ratetrack.hpp"

namespace jitterscope::ratetrack {

enum class Linkage { Single, Complete, Average };

constexpr double kDefaultClusterCutoff = 0.7;

/// Word -> category assignment. Categories are numbered in order of the first
/// word (in input order) that belongs to them.
class WordClustering {
public:
  WordClustering() = default;
  WordClustering(std::vector<std::string> words, std::vector<int> categories);

  int n_categories() const { return n_categories_; }
  const std::vector<std::string>& words() const { return words_; }
  const std::vector<int>& categories() const { return categories_; }

  std::optional<int> category_of(const std::string& word) const;

  /// Member words per category, in input order.
  std::vector<std::vector<std::string>> members() const;

  /// Rebuilds from per-category word lists (as stored in the model sidecar).
  static WordClustering from_members(const std::vector<std::vector<std::string>>& members);

private:
  std::vector<std::string> words_;
  std::vector<int> categories_;
  std::map<std::string, int, std::less<>> index_;
  int n_categories_ = 0;
};

/// Agglomerative clustering of a symmetric distance matrix, merging while the
/// closest pair of clusters is within `cutoff`. Returns a label per row,
/// numbered by first appearance. Ties go to the pair whose smallest members
/// come first.
std::vector<int> agglomerative_cluster(const Eigen::MatrixXd& distance, double cutoff,
                                       Linkage linkage = Linkage::Average);

/// 1 - Pearson correlation of sampled rates for every pair of tracks.
Eigen::MatrixXd rate_distance_matrix(std::span<const WordRateTrack> tracks, std::span<const double> grid);

WordClustering cluster_words(std::span<const WordRateTrack> tracks, std::span<const double> grid,
                             double cutoff = kDefaultClusterCutoff, Linkage linkage = Linkage::Average);

}  // namespace jitterscope::ratetrack
