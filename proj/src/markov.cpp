#include <cmath>
#include <stdexcept>

#include "jitterscope/evaluate.hpp"

namespace jitterscope::eval {

MarkovChainModel fit_markov(std::span<const int> stream, int alphabet, int order) {
  if (alphabet < 2) throw std::invalid_argument("alphabet must have at least 2 symbols");
  if (order < 1) throw std::invalid_argument("Markov order must be at least 1");
  const auto n = static_cast<int>(stream.size());
  if (n <= order) throw std::invalid_argument("stream too short for the Markov order");
  for (int s : stream)
    if (s < 0 || s >= alphabet) throw std::invalid_argument("symbol outside the alphabet");

  Eigen::Index contexts = 1;
  for (int k = 0; k < order; ++k) contexts *= alphabet;
  const auto context_at = [&](int end) {  // symbols [end-order, end)
    Eigen::Index c = 0;
    for (int k = end - order; k < end; ++k) c = c * alphabet + stream[static_cast<std::size_t>(k)];
    return c;
  };

  MarkovChainModel m;
  m.alphabet = alphabet;
  m.order = order;
  m.occupancy = Eigen::VectorXd::Zero(contexts);
  for (int end = order; end <= n; ++end) m.occupancy[context_at(end)] += 1.0;
  m.occupancy /= m.occupancy.sum();

  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(contexts, alphabet);
  for (int i = order; i < n; ++i) counts(context_at(i), stream[static_cast<std::size_t>(i)]) += 1.0;
  m.transitions.resize(contexts, alphabet);
  for (Eigen::Index c = 0; c < contexts; ++c) {
    const double total = counts.row(c).sum();
    if (total > 0.0) {
      m.transitions.row(c) = counts.row(c) / total;
    } else {
      m.transitions.row(c).setConstant(0.5 / (0.5 * alphabet));
    }
  }
  return m;
}

double entropy_rate(const MarkovChainModel& model) {
  double h = 0.0;
  for (Eigen::Index c = 0; c < model.transitions.rows(); ++c) {
    double row = 0.0;
    for (Eigen::Index j = 0; j < model.transitions.cols(); ++j) {
      const double p = model.transitions(c, j);
      if (p > 0.0) row -= p * std::log2(p);
    }
    h += model.occupancy[c] * row;
  }
  return h;
}

MirResult mir(std::span<const int> truth, std::span<const int> predicted, int order) {
  if (truth.size() != predicted.size()) throw std::invalid_argument("streams differ in length");
  if (truth.size() < 2) throw std::invalid_argument("MIR needs streams of length at least 2");
  std::vector<int> joint(truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) joint[i] = 2 * truth[i] + predicted[i];
  MirResult r;
  r.h_truth = entropy_rate(fit_markov(truth, 2, order));
  r.h_predicted = entropy_rate(fit_markov(predicted, 2, order));
  r.h_joint = entropy_rate(fit_markov(joint, 4, order));
  r.mir = r.h_truth + r.h_predicted - r.h_joint;
  if (r.mir < 0.0 && r.mir > -1e-9) r.mir = 0.0;
  return r;
}

MirResult mir(const LabelStreamPair& pair, int order) {
  const auto c = pair.truth_stream();
  const auto l = pair.predicted_stream();
  return mir(c, l, order);
}

}  // namespace jitterscope::eval
