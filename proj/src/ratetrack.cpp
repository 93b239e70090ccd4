#include "jitterscope/ratetrack.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace jitterscope::ratetrack {

WordRateTrack::WordRateTrack(std::string word, double bandwidth) : word_(std::move(word)), bandwidth_(bandwidth) {
  if (!(bandwidth > 0.0)) throw std::invalid_argument("bandwidth must be positive");
}

void WordRateTrack::add_arrival(double t) {
  if (arrivals_.empty() || arrivals_.back() <= t) {
    arrivals_.push_back(t);
    return;
  }
  arrivals_.insert(std::upper_bound(arrivals_.begin(), arrivals_.end(), t), t);
}

void WordRateTrack::prune_before(double t) {
  while (!arrivals_.empty() && arrivals_.front() < t) arrivals_.pop_front();
}

RateSlope WordRateTrack::rate_and_slope_at(double t) const {
  const double reach = kKernelCutoff * bandwidth_;
  auto first = std::lower_bound(arrivals_.begin(), arrivals_.end(), t - reach);
  RateSlope out;
  const double inv_var = 1.0 / (bandwidth_ * bandwidth_);
  for (auto it = first; it != arrivals_.end() && *it <= t + reach; ++it) {
    const double x = t - *it;
    const double f = gaussian_kernel(x, bandwidth_);
    out.rate += f;
    out.slope -= x * inv_var * f;
  }
  return out;
}

double WordRateTrack::rate_at(double t) const { return rate_and_slope_at(t).rate; }

double WordRateTrack::slope_at(double t) const { return rate_and_slope_at(t).slope; }

BurstTransition WordRateTrack::update_burst_state(double t, const BurstThresholds& thresholds) {
  return apply_burst_rule(t, rate_and_slope_at(t), thresholds);
}

BurstTransition WordRateTrack::apply_burst_rule(double t, RateSlope current, const BurstThresholds& thresholds) {
  if (last_update_ && t < *last_update_)
    throw std::logic_error("burst state of '" + word_ + "' updated with decreasing time");
  last_update_ = t;
  if (state_ == BurstState::Normal) {
    if (current.rate > thresholds.rate && current.slope > thresholds.slope) {
      state_ = BurstState::Bursty;
      entry_time_ = t;
      return BurstTransition::EnteredBurst;
    }
    return BurstTransition::Unchanged;
  }
  if (current.rate < thresholds.rate) {
    state_ = BurstState::Normal;
    entry_time_.reset();
    return BurstTransition::ExitedBurst;
  }
  return BurstTransition::Unchanged;
}

std::vector<double> uniform_grid(double begin, double end, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("grid step must be positive");
  std::vector<double> grid;
  if (end < begin) return grid;
  const auto n = static_cast<std::size_t>(std::floor((end - begin) / step)) + 1;
  grid.reserve(n);
  for (std::size_t i = 0; i < n; ++i) grid.push_back(begin + static_cast<double>(i) * step);
  return grid;
}

Eigen::VectorXd sample_rates(const WordRateTrack& track, std::span<const double> grid) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) out[static_cast<Eigen::Index>(i)] = track.rate_at(grid[i]);
  return out;
}

BurstThresholds calibrate_thresholds(std::span<const WordRateTrack> tracks, double grid_step, double begin,
                                     double end) {
  const bool any = std::any_of(tracks.begin(), tracks.end(), [](const WordRateTrack& t) { return !t.empty(); });
  if (!any) throw FatalError("no arrivals in training data; cannot calibrate thresholds", "calibrate");
  const auto grid = uniform_grid(begin, end, grid_step);
  if (grid.empty()) throw FatalError("empty calibration interval", "calibrate");

  BurstThresholds th;
  const double n = static_cast<double>(grid.size());
  for (const auto& track : tracks) {
    double rate_sum = 0.0;
    double slope_sum = 0.0;
    for (double t : grid) {
      const auto rs = track.rate_and_slope_at(t);
      rate_sum += rs.rate;
      slope_sum += rs.slope;
    }
    th.rate = std::max(th.rate, rate_sum / n);
    th.slope = std::max(th.slope, std::max(0.0, slope_sum / n));
  }
  if (!(th.rate > 0.0)) throw FatalError("all grid-averaged rates are zero; cannot calibrate", "calibrate");
  th.slope = std::max(th.slope, kMinSlopeThreshold);
  return th;
}

BurstThresholds calibrate_thresholds(std::span<const WordRateTrack> tracks, double grid_step) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& t : tracks) {
    if (t.empty()) continue;
    lo = std::min(lo, t.arrivals().front());
    hi = std::max(hi, t.arrivals().back());
  }
  if (lo > hi) throw FatalError("no arrivals in training data; cannot calibrate thresholds", "calibrate");
  return calibrate_thresholds(tracks, grid_step, lo, hi);
}

double rate_correlation(const WordRateTrack& a, const WordRateTrack& b, std::span<const double> grid) {
  if (grid.size() < 3) throw std::invalid_argument("rate_correlation needs at least 3 grid samples");
  return pearson(sample_rates(a, grid), sample_rates(b, grid));
}

}  // namespace jitterscope::ratetrack
