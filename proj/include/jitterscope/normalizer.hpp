#pragma once

#include <vector>

#include <Eigen/Core>

namespace jitterscope::ml {

/// Zero-mean, unit-variance scaling fitted on a training matrix. Columns with
/// zero variance are dropped; `kept` lists the surviving input columns.
struct Normalizer {
  Eigen::Index input_dim = 0;
  std::vector<Eigen::Index> kept;
  std::vector<Eigen::Index> dropped;
  Eigen::VectorXd mean;   // per kept column
  Eigen::VectorXd stdev;  // population stdev per kept column

  Eigen::Index output_dim() const { return static_cast<Eigen::Index>(kept.size()); }

  template <typename Derived>
  Eigen::VectorXd apply(const Eigen::MatrixBase<Derived>& x) const {
    Eigen::VectorXd out(output_dim());
    for (Eigen::Index k = 0; k < output_dim(); ++k)
      out[k] = (x[kept[static_cast<std::size_t>(k)]] - mean[k]) / stdev[k];
    return out;
  }

  /// Row-wise transform.
  Eigen::MatrixXd apply_rows(const Eigen::MatrixXd& X) const;
};

/// Requires at least two rows; throws std::invalid_argument otherwise.
Normalizer fit_normalizer(const Eigen::MatrixXd& X);

/// Column subset of every row of `X`.
Eigen::MatrixXd select_columns(const Eigen::MatrixXd& X, const std::vector<Eigen::Index>& columns);

}  // namespace jitterscope::ml
