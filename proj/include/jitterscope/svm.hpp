#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace jitterscope::ml {

enum class KernelType { Linear, Polynomial, Gaussian };

struct KernelSpec {
  KernelType type = KernelType::Polynomial;
  int degree = 3;      // polynomial
  double coef = 1.0;   // polynomial: (x.y + coef)^degree
  double width = 1.0;  // gaussian: exp(-|x-y|^2 / (2 width^2))

  static KernelSpec linear() { return {KernelType::Linear, 1, 0.0, 1.0}; }
  static KernelSpec polynomial(int degree, double coef = 1.0) { return {KernelType::Polynomial, degree, coef, 1.0}; }
  static KernelSpec gaussian(double width) { return {KernelType::Gaussian, 1, 0.0, width}; }

  template <typename A, typename B>
  double operator()(const Eigen::MatrixBase<A>& x, const Eigen::MatrixBase<B>& y) const {
    switch (type) {
      case KernelType::Linear: return x.dot(y);
      case KernelType::Polynomial: return std::pow(x.dot(y) + coef, degree);
      case KernelType::Gaussian: return std::exp(-(x - y).squaredNorm() / (2.0 * width * width));
    }
    return 0.0;
  }

  /// Rank used to break cross-validation ties: linear 1, polynomial its
  /// degree, gaussian after every polynomial.
  int complexity() const;
  std::string describe() const;
  bool operator==(const KernelSpec&) const = default;
};

/// Parses "linear", "poly:<degree>[:<coef>]" or "rbf:<width>".
KernelSpec parse_kernel(const std::string& s);

struct ClassWeights {
  double positive = 1.0;
  double negative = 1.0;
  bool operator==(const ClassWeights&) const = default;
};

struct SvmParams {
  KernelSpec kernel;
  double C = 1.0;
  ClassWeights weights;
  double tolerance = 1e-3;
  std::int64_t max_iterations = 10'000'000;
};

/// Soft-margin kernel SVM. Keeps the whole training pool so it can be
/// re-solved after online updates; support vectors are the rows with a
/// positive dual coefficient.
class KernelClassifier {
public:
  KernelClassifier() = default;
  KernelClassifier(SvmParams params, Eigen::MatrixXd pool, std::vector<int> labels, Eigen::VectorXd alpha,
                   double bias, std::int64_t iterations);

  const SvmParams& params() const { return params_; }
  const Eigen::MatrixXd& pool() const { return pool_; }
  const std::vector<int>& labels() const { return labels_; }  // 0/1
  const Eigen::VectorXd& alpha() const { return alpha_; }
  double bias() const { return bias_; }
  std::int64_t iterations() const { return iterations_; }
  std::vector<Eigen::Index> support_indices() const;

  template <typename Derived>
  double decision(const Eigen::MatrixBase<Derived>& x) const {
    double f = bias_;
    for (Eigen::Index i = 0; i < pool_.rows(); ++i)
      if (alpha_[i] > 0.0) f += alpha_[i] * sign(i) * params_.kernel(pool_.row(i).transpose(), x);
    return f;
  }

  /// 1 when decision(x) > threshold.
  template <typename Derived>
  int predict(const Eigen::MatrixBase<Derived>& x, double threshold = 0.0) const {
    return decision(x) > threshold ? 1 : 0;
  }

  double upper_bound(Eigen::Index i) const {
    return params_.C * (labels_[static_cast<std::size_t>(i)] == 1 ? params_.weights.positive : params_.weights.negative);
  }

private:
  double sign(Eigen::Index i) const { return labels_[static_cast<std::size_t>(i)] == 1 ? 1.0 : -1.0; }

  SvmParams params_;
  Eigen::MatrixXd pool_;
  std::vector<int> labels_;
  Eigen::VectorXd alpha_;
  double bias_ = 0.0;
  std::int64_t iterations_ = 0;
};

/// SMO with second-order working-set selection until the maximal violating
/// pair gap falls below params.tolerance. `labels` are 0/1 and both classes
/// must appear. `warm_alpha`, when given, must be feasible. Throws
/// FatalError("train") on non-convergence.
KernelClassifier train(const Eigen::MatrixXd& X, std::span<const int> labels, const SvmParams& params,
                       const std::optional<Eigen::VectorXd>& warm_alpha = std::nullopt);

/// Per-sample KKT violation of the trained model on its own pool.
Eigen::VectorXd kkt_residuals(const KernelClassifier& model);

/// Appends (x, label) and re-solves warm-started from the current duals.
/// Label -1 (neutral) leaves the model unchanged.
KernelClassifier online_update(const KernelClassifier& model, const Eigen::VectorXd& x, int label);

struct CvGrid {
  std::vector<KernelSpec> kernels;
  std::vector<double> Cs;
  std::vector<ClassWeights> weights;
};

struct CvScore {
  SvmParams params;
  double mean_f1 = 0.0;
};

struct CvResult {
  SvmParams best;
  double best_f1 = 0.0;
  int folds = 0;
  std::vector<CvScore> scores;
  std::vector<std::string> warnings;
};

/// Stratified k-fold assignment, shuffled with `seed`. Returns the fold of
/// every row and the fold count actually used (reduced when a class has
/// fewer rows than folds).
std::pair<std::vector<int>, int> stratified_folds(std::span<const int> labels, int folds, std::uint64_t seed);

/// Positive-class F1; 0 when there are no true positives.
double positive_f1(std::span<const int> truth, std::span<const int> predicted);

/// Grid search maximizing mean positive-class F1 over stratified folds. Ties
/// go to lower C, then lower kernel complexity, then grid order.
CvResult cross_validate(const Eigen::MatrixXd& X, std::span<const int> labels, int folds, const CvGrid& grid,
                        std::uint64_t seed, double tolerance = 1e-3);

}  // namespace jitterscope::ml
