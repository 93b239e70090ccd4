#include "jitterscope/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "jitterscope/common.hpp"

namespace jitterscope::ml {
namespace {

constexpr double kTau = 1e-12;

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

int KernelSpec::complexity() const {
  switch (type) {
    case KernelType::Linear: return 1;
    case KernelType::Polynomial: return degree;
    case KernelType::Gaussian: return std::numeric_limits<int>::max();
  }
  return 0;
}

std::string KernelSpec::describe() const {
  switch (type) {
    case KernelType::Linear: return "linear";
    case KernelType::Polynomial: return "poly:" + std::to_string(degree) + ":" + format_double(coef);
    case KernelType::Gaussian: return "rbf:" + format_double(width);
  }
  return "linear";
}

KernelSpec parse_kernel(const std::string& s) {
  const auto parts = split(s, ':');
  try {
    if (parts[0] == "linear" && parts.size() == 1) return KernelSpec::linear();
    if (parts[0] == "poly" && (parts.size() == 2 || parts.size() == 3)) {
      const int d = std::stoi(parts[1]);
      if (d < 1) throw std::invalid_argument("degree");
      return KernelSpec::polynomial(d, parts.size() == 3 ? std::stod(parts[2]) : 1.0);
    }
    if (parts[0] == "rbf" && parts.size() == 2) {
      const double w = std::stod(parts[1]);
      if (!(w > 0.0)) throw std::invalid_argument("width");
      return KernelSpec::gaussian(w);
    }
  } catch (const std::logic_error&) {
  }
  throw std::invalid_argument("bad kernel spec '" + s + "' (linear, poly:<d>[:<c>], rbf:<w>)");
}

KernelClassifier::KernelClassifier(SvmParams params, Eigen::MatrixXd pool, std::vector<int> labels,
                                   Eigen::VectorXd alpha, double bias, std::int64_t iterations)
    : params_(std::move(params)),
      pool_(std::move(pool)),
      labels_(std::move(labels)),
      alpha_(std::move(alpha)),
      bias_(bias),
      iterations_(iterations) {
  if (static_cast<Eigen::Index>(labels_.size()) != pool_.rows() || alpha_.size() != pool_.rows())
    throw std::invalid_argument("classifier pool, labels and duals differ in length");
}

std::vector<Eigen::Index> KernelClassifier::support_indices() const {
  std::vector<Eigen::Index> out;
  for (Eigen::Index i = 0; i < alpha_.size(); ++i)
    if (alpha_[i] > 0.0) out.push_back(i);
  return out;
}

KernelClassifier train(const Eigen::MatrixXd& X, std::span<const int> labels, const SvmParams& params,
                       const std::optional<Eigen::VectorXd>& warm_alpha) {
  const Eigen::Index n = X.rows();
  if (static_cast<Eigen::Index>(labels.size()) != n) throw std::invalid_argument("label count does not match rows");
  if (!(params.C > 0.0) || !(params.weights.positive > 0.0) || !(params.weights.negative > 0.0))
    throw std::invalid_argument("C and class weights must be positive");
  Eigen::VectorXd y(n);
  Eigen::VectorXd ub(n);
  bool has_pos = false;
  bool has_neg = false;
  for (Eigen::Index i = 0; i < n; ++i) {
    const int l = labels[static_cast<std::size_t>(i)];
    if (l != 0 && l != 1) throw std::invalid_argument("training labels must be 0 or 1");
    y[i] = l == 1 ? 1.0 : -1.0;
    ub[i] = params.C * (l == 1 ? params.weights.positive : params.weights.negative);
    (l == 1 ? has_pos : has_neg) = true;
  }
  if (!has_pos || !has_neg) throw FatalError("training data must contain both classes", "train");

  Eigen::MatrixXd Q(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j)
      Q(i, j) = Q(j, i) = y[i] * y[j] * params.kernel(X.row(i).transpose(), X.row(j).transpose());

  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  if (warm_alpha) {
    if (warm_alpha->size() != n) throw std::invalid_argument("warm-start duals differ in length");
    alpha = warm_alpha->cwiseMax(0.0).cwiseMin(ub);
  }
  Eigen::VectorXd G = Q * alpha - Eigen::VectorXd::Ones(n);

  const auto in_up = [&](Eigen::Index t) { return (y[t] > 0 && alpha[t] < ub[t]) || (y[t] < 0 && alpha[t] > 0); };
  const auto in_low = [&](Eigen::Index t) { return (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < ub[t]); };

  std::int64_t iter = 0;
  double gap = std::numeric_limits<double>::infinity();
  for (;; ++iter) {
    // Maximal violating i, then j by second-order gain.
    double gmax = -std::numeric_limits<double>::infinity();
    Eigen::Index i = -1;
    for (Eigen::Index t = 0; t < n; ++t)
      if (in_up(t) && -y[t] * G[t] > gmax) {
        gmax = -y[t] * G[t];
        i = t;
      }
    double gmin = std::numeric_limits<double>::infinity();
    double best_obj = std::numeric_limits<double>::infinity();
    Eigen::Index j = -1;
    for (Eigen::Index t = 0; t < n; ++t) {
      if (!in_low(t)) continue;
      const double v = -y[t] * G[t];
      gmin = std::min(gmin, v);
      if (i < 0) continue;
      const double diff = gmax - v;
      if (diff > 0.0) {
        double quad = Q(i, i) + Q(t, t) - 2.0 * y[i] * y[t] * Q(i, t);
        if (quad <= 0.0) quad = kTau;
        const double obj = -diff * diff / quad;
        if (obj < best_obj) {
          best_obj = obj;
          j = t;
        }
      }
    }
    gap = gmax - gmin;
    if (i < 0 || j < 0 || gap < params.tolerance) break;
    if (iter >= params.max_iterations)
      throw FatalError("SMO did not converge after " + std::to_string(iter) + " iterations (n=" + std::to_string(n) +
                           ", gap=" + std::to_string(gap) + ", kernel=" + params.kernel.describe() +
                           ", C=" + std::to_string(params.C) + ")",
                       "train");

    const double ai = alpha[i];
    const double aj = alpha[j];
    const double Ci = ub[i];
    const double Cj = ub[j];
    if (y[i] != y[j]) {
      double quad = Q(i, i) + Q(j, j) + 2.0 * Q(i, j);
      if (quad <= 0.0) quad = kTau;
      const double delta = (-G[i] - G[j]) / quad;
      const double diff = ai - aj;
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0.0) {
        if (alpha[j] < 0.0) {
          alpha[j] = 0.0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = -diff;
      }
      if (diff > Ci - Cj) {
        if (alpha[i] > Ci) {
          alpha[i] = Ci;
          alpha[j] = Ci - diff;
        }
      } else if (alpha[j] > Cj) {
        alpha[j] = Cj;
        alpha[i] = Cj + diff;
      }
    } else {
      double quad = Q(i, i) + Q(j, j) - 2.0 * Q(i, j);
      if (quad <= 0.0) quad = kTau;
      const double delta = (G[i] - G[j]) / quad;
      const double sum = ai + aj;
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > Ci) {
        if (alpha[i] > Ci) {
          alpha[i] = Ci;
          alpha[j] = sum - Ci;
        }
      } else if (alpha[j] < 0.0) {
        alpha[j] = 0.0;
        alpha[i] = sum;
      }
      if (sum > Cj) {
        if (alpha[j] > Cj) {
          alpha[j] = Cj;
          alpha[i] = sum - Cj;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = sum;
      }
    }
    const double di = alpha[i] - ai;
    const double dj = alpha[j] - aj;
    G += Q.col(i) * di + Q.col(j) * dj;
  }

  // Offset from free vectors, or the midpoint of the feasible interval.
  double upper = std::numeric_limits<double>::infinity();
  double lower = -std::numeric_limits<double>::infinity();
  double free_sum = 0.0;
  int n_free = 0;
  for (Eigen::Index t = 0; t < n; ++t) {
    const double yg = y[t] * G[t];
    if (alpha[t] >= ub[t]) {
      if (y[t] < 0) upper = std::min(upper, yg);
      else lower = std::max(lower, yg);
    } else if (alpha[t] <= 0.0) {
      if (y[t] > 0) upper = std::min(upper, yg);
      else lower = std::max(lower, yg);
    } else {
      ++n_free;
      free_sum += yg;
    }
  }
  const double rho = n_free > 0 ? free_sum / n_free : (upper + lower) / 2.0;

  std::vector<int> pool_labels(labels.begin(), labels.end());
  return KernelClassifier(params, X, std::move(pool_labels), std::move(alpha), -rho, iter);
}

Eigen::VectorXd kkt_residuals(const KernelClassifier& model) {
  const auto& X = model.pool();
  Eigen::VectorXd out(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const double y = model.labels()[static_cast<std::size_t>(i)] == 1 ? 1.0 : -1.0;
    const double margin = y * model.decision(X.row(i).transpose()) - 1.0;
    const double a = model.alpha()[i];
    if (a <= 0.0) out[i] = std::max(0.0, -margin);
    else if (a >= model.upper_bound(i)) out[i] = std::max(0.0, margin);
    else out[i] = std::abs(margin);
  }
  return out;
}

KernelClassifier online_update(const KernelClassifier& model, const Eigen::VectorXd& x, int label) {
  if (label == -1) return model;
  if (label != 0 && label != 1) throw std::invalid_argument("online label must be -1, 0 or 1");
  const Eigen::Index n = model.pool().rows();
  if (x.size() != model.pool().cols()) throw std::invalid_argument("online sample has wrong dimension");
  Eigen::MatrixXd pool(n + 1, model.pool().cols());
  pool.topRows(n) = model.pool();
  pool.row(n) = x.transpose();
  std::vector<int> labels = model.labels();
  labels.push_back(label);
  Eigen::VectorXd warm = Eigen::VectorXd::Zero(n + 1);
  warm.head(n) = model.alpha();
  return train(pool, labels, model.params(), warm);
}

std::pair<std::vector<int>, int> stratified_folds(std::span<const int> labels, int folds, std::uint64_t seed) {
  if (folds < 2) throw std::invalid_argument("cross-validation needs at least 2 folds");
  std::vector<std::size_t> pos;
  std::vector<std::size_t> neg;
  for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] == 1 ? pos : neg).push_back(i);
  const int smallest = static_cast<int>(std::min(pos.size(), neg.size()));
  const int used = std::min(folds, smallest);
  if (used < 2) throw FatalError("each class needs at least 2 samples for cross-validation", "train");
  std::mt19937_64 rng(seed);
  std::vector<int> assignment(labels.size(), 0);
  for (auto* group : {&pos, &neg}) {
    std::shuffle(group->begin(), group->end(), rng);
    for (std::size_t k = 0; k < group->size(); ++k) assignment[(*group)[k]] = static_cast<int>(k % used);
  }
  return {assignment, used};
}

double positive_f1(std::span<const int> truth, std::span<const int> predicted) {
  double tp = 0;
  double fp = 0;
  double fn = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == 1 && predicted[i] == 1) ++tp;
    else if (truth[i] == 0 && predicted[i] == 1) ++fp;
    else if (truth[i] == 1 && predicted[i] == 0) ++fn;
  }
  return tp > 0 ? 2 * tp / (2 * tp + fp + fn) : 0.0;
}

CvResult cross_validate(const Eigen::MatrixXd& X, std::span<const int> labels, int folds, const CvGrid& grid,
                        std::uint64_t seed, double tolerance) {
  if (grid.kernels.empty() || grid.Cs.empty() || grid.weights.empty())
    throw std::invalid_argument("cross-validation grid has an empty axis");
  CvResult result;
  const auto [assignment, used] = stratified_folds(labels, folds, seed);
  result.folds = used;
  if (used < folds)
    result.warnings.push_back("reduced cross-validation folds from " + std::to_string(folds) + " to " +
                              std::to_string(used) + " (smallest class too small)");

  bool have_best = false;
  for (const auto& kernel : grid.kernels)
    for (double C : grid.Cs)
      for (const auto& w : grid.weights) {
        SvmParams p;
        p.kernel = kernel;
        p.C = C;
        p.weights = w;
        p.tolerance = tolerance;
        double f1_sum = 0.0;
        for (int f = 0; f < used; ++f) {
          std::vector<Eigen::Index> tr;
          std::vector<Eigen::Index> te;
          for (std::size_t i = 0; i < labels.size(); ++i)
            (assignment[i] == f ? te : tr).push_back(static_cast<Eigen::Index>(i));
          Eigen::MatrixXd Xtr(static_cast<Eigen::Index>(tr.size()), X.cols());
          std::vector<int> ytr;
          for (std::size_t k = 0; k < tr.size(); ++k) {
            Xtr.row(static_cast<Eigen::Index>(k)) = X.row(tr[k]);
            ytr.push_back(labels[static_cast<std::size_t>(tr[k])]);
          }
          const auto model = train(Xtr, ytr, p);
          std::vector<int> truth;
          std::vector<int> pred;
          for (auto i : te) {
            truth.push_back(labels[static_cast<std::size_t>(i)]);
            pred.push_back(model.predict(X.row(i).transpose()));
          }
          f1_sum += positive_f1(truth, pred);
        }
        const double mean = f1_sum / used;
        result.scores.push_back({p, mean});
        constexpr double kTie = 1e-12;
        bool better = !have_best || mean > result.best_f1 + kTie;
        if (have_best && std::abs(mean - result.best_f1) <= kTie) {
          if (C != result.best.C) better = C < result.best.C;
          else better = kernel.complexity() < result.best.kernel.complexity();
        }
        if (better) {
          result.best = p;
          result.best_f1 = mean;
          have_best = true;
        }
      }
  return result;
}

}  // namespace jitterscope::ml
