#pragma once

#include <cmath>
#include <deque>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "jitterscope/common.hpp"

namespace jitterscope::ratetrack {

/// The Gaussian kernel is cut off beyond this many bandwidths.
constexpr double kKernelCutoff = 4.0;
constexpr double kDefaultBandwidth = 600.0;

/// Truncated Gaussian density with standard deviation `bandwidth`.
template <typename Scalar>
Scalar gaussian_kernel(Scalar x, Scalar bandwidth) {
  if (std::abs(x) > Scalar(kKernelCutoff) * bandwidth) return Scalar(0);
  const Scalar z = x / bandwidth;
  return std::exp(Scalar(-0.5) * z * z) / (bandwidth * std::sqrt(Scalar(2) * std::numbers::pi_v<Scalar>));
}

/// d/dx of gaussian_kernel, with the same truncation.
template <typename Scalar>
Scalar gaussian_kernel_derivative(Scalar x, Scalar bandwidth) {
  return -x / (bandwidth * bandwidth) * gaussian_kernel(x, bandwidth);
}

/// Largest |f'| of the kernel, reached at x = +-bandwidth.
template <typename Scalar>
Scalar max_kernel_derivative(Scalar bandwidth) {
  return std::abs(gaussian_kernel_derivative(bandwidth, bandwidth));
}

struct BurstThresholds {
  double rate = 0.0;   // T_R, events/s
  double slope = 0.0;  // T_S, events/s^2

  bool operator==(const BurstThresholds&) const = default;
};

enum class BurstState { Normal, Bursty };
enum class BurstTransition { Unchanged, EnteredBurst, ExitedBurst };

struct RateSlope {
  double rate = 0.0;
  double slope = 0.0;
};

/// Arrival history of one word with a kernel-smoothed rate estimate and the
/// normal/bursty state machine. Single writer; const queries are safe to
/// share once writes stop.
class WordRateTrack {
public:
  explicit WordRateTrack(std::string word, double bandwidth = kDefaultBandwidth);

  const std::string& word() const { return word_; }
  double bandwidth() const { return bandwidth_; }
  const std::deque<double>& arrivals() const { return arrivals_; }
  bool empty() const { return arrivals_.empty(); }

  /// Inserts keeping arrivals sorted; appends in O(1) for in-order input.
  void add_arrival(double t);

  /// Drops arrivals strictly older than `t`.
  void prune_before(double t);

  double rate_at(double t) const;
  double slope_at(double t) const;
  RateSlope rate_and_slope_at(double t) const;

  BurstState state() const { return state_; }
  std::optional<double> burst_entry_time() const { return entry_time_; }

  /// Enters burst iff normal, rate > T_R and slope > T_S; exits iff bursty and
  /// rate < T_R. Throws std::logic_error if `t` decreases between calls.
  BurstTransition update_burst_state(double t, const BurstThresholds& thresholds);

  /// Same transition rule with externally computed rate and slope.
  BurstTransition apply_burst_rule(double t, RateSlope current, const BurstThresholds& thresholds);

private:
  std::string word_;
  double bandwidth_;
  std::deque<double> arrivals_;
  BurstState state_ = BurstState::Normal;
  std::optional<double> entry_time_;
  std::optional<double> last_update_;
};

/// Times begin, begin+step, ... up to and including end.
std::vector<double> uniform_grid(double begin, double end, double step);

/// Rate of `track` sampled at each grid time.
Eigen::VectorXd sample_rates(const WordRateTrack& track, std::span<const double> grid);

/// T_R = max over words of the grid-averaged rate, T_S = max over words of the
/// grid-averaged slope with non-positive averages counted as zero. Averages
/// run over a uniform grid spanning [begin, end]. Throws FatalError when no
/// track has arrivals.
BurstThresholds calibrate_thresholds(std::span<const WordRateTrack> tracks, double grid_step, double begin,
                                     double end);

/// As above over the span of all arrivals.
BurstThresholds calibrate_thresholds(std::span<const WordRateTrack> tracks, double grid_step);

/// Floor applied to T_S when no word has a positive mean slope.
constexpr double kMinSlopeThreshold = 1e-12;

/// Pearson correlation; 0 when either input has zero variance.
template <typename DerivedA, typename DerivedB>
double pearson(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  const auto n = a.size();
  if (n < 2 || b.size() != n) return 0.0;
  const double ma = a.mean();
  const double mb = b.mean();
  const Eigen::ArrayXd da = a.array() - ma;
  const Eigen::ArrayXd db = b.array() - mb;
  const double saa = (da * da).sum();
  const double sbb = (db * db).sum();
  if (!(saa > 0.0) || !(sbb > 0.0)) return 0.0;
  const double r = (da * db).sum() / std::sqrt(saa * sbb);
  return std::clamp(r, -1.0, 1.0);
}

/// Pearson correlation of the two tracks' rates sampled on `grid`.
/// Requires at least three grid samples.
double rate_correlation(const WordRateTrack& a, const WordRateTrack& b, std::span<const double> grid);

}  // namespace jitterscope::ratetrack
