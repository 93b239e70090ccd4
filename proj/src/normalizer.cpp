#include "jitterscope/normalizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace jitterscope::ml {

Eigen::MatrixXd Normalizer::apply_rows(const Eigen::MatrixXd& X) const {
  if (X.cols() != input_dim) throw std::invalid_argument("normalizer applied to wrong dimension");
  Eigen::MatrixXd out(X.rows(), output_dim());
  for (Eigen::Index r = 0; r < X.rows(); ++r) out.row(r) = apply(X.row(r).transpose()).transpose();
  return out;
}

Normalizer fit_normalizer(const Eigen::MatrixXd& X) {
  if (X.rows() < 2) throw std::invalid_argument("fit_normalizer needs at least two rows");
  Normalizer nz;
  nz.input_dim = X.cols();
  std::vector<double> means;
  std::vector<double> sds;
  const double n = static_cast<double>(X.rows());
  for (Eigen::Index c = 0; c < X.cols(); ++c) {
    const double m = X.col(c).mean();
    const double var = (X.col(c).array() - m).square().sum() / n;
    const double sd = std::sqrt(var);
    // Relative cut so a constant column stays dropped despite rounding in the mean.
    if (!(sd > 1e-12 * std::max(1.0, std::abs(m)))) {
      nz.dropped.push_back(c);
      continue;
    }
    nz.kept.push_back(c);
    means.push_back(m);
    sds.push_back(sd);
  }
  nz.mean = Eigen::Map<Eigen::VectorXd>(means.data(), static_cast<Eigen::Index>(means.size()));
  nz.stdev = Eigen::Map<Eigen::VectorXd>(sds.data(), static_cast<Eigen::Index>(sds.size()));
  return nz;
}

Eigen::MatrixXd select_columns(const Eigen::MatrixXd& X, const std::vector<Eigen::Index>& columns) {
  Eigen::MatrixXd out(X.rows(), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t k = 0; k < columns.size(); ++k) {
    if (columns[k] < 0 || columns[k] >= X.cols()) throw std::out_of_range("column index out of range");
    out.col(static_cast<Eigen::Index>(k)) = X.col(columns[k]);
  }
  return out;
}

}  // namespace jitterscope::ml
