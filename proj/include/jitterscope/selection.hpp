#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace jitterscope::ml {

enum class SelectionMethod { Cfs, InfoGain };

std::string to_string(SelectionMethod m);
SelectionMethod parse_selection_method(const std::string& s);

struct FeatureSelection {
  SelectionMethod method = SelectionMethod::Cfs;
  std::vector<Eigen::Index> indices;  // in selection (or rank) order
  Eigen::VectorXd scores;             // per input feature
};

constexpr int kCfsMaxStale = 5;
constexpr int kDefaultInfoGainBins = 10;
constexpr double kDefaultInfoGainAlpha = 0.01;

/// CFS merit of a subset: k*mean|r_cf| / sqrt(k + k(k-1)*mean|r_ff|), with
/// precomputed |r_cf| and |r_ff|. 0 for the empty set.
double cfs_merit(std::span<const Eigen::Index> subset, const Eigen::VectorXd& class_corr,
                 const Eigen::MatrixXd& feature_corr);

/// |Pearson| of every column against the labels, and between column pairs.
Eigen::VectorXd class_correlations(const Eigen::MatrixXd& X, std::span<const int> y);
Eigen::MatrixXd feature_correlations(const Eigen::MatrixXd& X);

/// Best-first forward search over subsets maximizing the CFS merit. Stops
/// after kCfsMaxStale consecutive expansions that do not improve the best
/// subset. `y` holds 0/1 labels. Throws FatalError if one class is missing.
FeatureSelection cfs_select(const Eigen::MatrixXd& X, std::span<const int> y, int max_stale = kCfsMaxStale);

/// Bin index of every value under equal-frequency binning; tied values share
/// a bin.
std::vector<int> equal_frequency_bins(const Eigen::VectorXd& values, int bins);

/// H(y) - H(y | bin) in bits.
double information_gain(std::span<const int> bins, std::span<const int> y);

/// Information-gain ranking. Scores are H(y) - H(y|bin) in bits; a feature is
/// retained when its score is positive and its G-test of independence is
/// significant at `alpha`. Ranked by score descending.
FeatureSelection infogain_rank(const Eigen::MatrixXd& X, std::span<const int> y, int bins = kDefaultInfoGainBins,
                               double alpha = kDefaultInfoGainAlpha);

}  // namespace jitterscope::ml
