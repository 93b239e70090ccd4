#include <doctest.h>

#include <cmath>
#include <random>

#include "jitterscope/clustering.hpp"
#include "jitterscope/ratetrack.hpp"
#include "oracles.hpp"
#include "properties.hpp"

using namespace jitterscope;
using namespace jitterscope::ratetrack;

TEST_CASE("kernel: slope matches finite differences and mass integrates to count") {
  const auto rep = props::kernel_checks(200, 1);
  CHECK(rep.fixtures == 200);
  CHECK(rep.slope_checks > 500);
  CHECK(rep.max_slope_rel_error < 1e-6);
  CHECK(rep.max_mass_rel_error < 0.01);
}

TEST_CASE("kernel: empty track reads zero") {
  WordRateTrack t("w");
  CHECK(t.rate_at(0.0) == 0.0);
  CHECK(t.slope_at(0.0) == 0.0);
}

TEST_CASE("kernel: single arrival peaks at the arrival with zero slope") {
  WordRateTrack t("w", 600.0);
  t.add_arrival(1000.0);
  CHECK(t.rate_at(1000.0) == doctest::Approx(1.0 / (600.0 * std::sqrt(2.0 * M_PI))));
  CHECK(t.slope_at(1000.0) == 0.0);
  CHECK(t.slope_at(900.0) > 0.0);
  CHECK(t.slope_at(1100.0) < 0.0);
  CHECK(t.rate_at(1000.0 + 4.0 * 600.0 + 1.0) == 0.0);
}

TEST_CASE("kernel: rate is continuous away from the truncation edge") {
  WordRateTrack t("w", 300.0);
  for (double a : {0.0, 50.0, 80.0, 400.0}) t.add_arrival(a);
  for (double x = -500.0; x < 900.0; x += 7.3) {
    const double d = std::abs(t.rate_at(x + 1e-3) - t.rate_at(x));
    CHECK(d < 1e-8);
  }
}

TEST_CASE("burst: state machine matches the rule") {
  const auto rep = props::burst_state_checks(2000, 2);
  CHECK(rep.cases == 2000);
  CHECK(rep.violations == 0);
}

TEST_CASE("burst: equality does not enter, rate at threshold does not exit") {
  const BurstThresholds th{1.0, 0.1};
  WordRateTrack t("w");
  CHECK(t.apply_burst_rule(0, {1.0, 0.5}, th) == BurstTransition::Unchanged);
  CHECK(t.apply_burst_rule(1, {2.0, 0.1}, th) == BurstTransition::Unchanged);
  CHECK(t.apply_burst_rule(2, {2.0, 0.2}, th) == BurstTransition::EnteredBurst);
  CHECK(t.burst_entry_time() == 2.0);
  CHECK(t.apply_burst_rule(3, {1.0, -5.0}, th) == BurstTransition::Unchanged);
  CHECK(t.apply_burst_rule(4, {0.99, 0.0}, th) == BurstTransition::ExitedBurst);
  CHECK(!t.burst_entry_time());
}

TEST_CASE("calibrate: thresholds equal brute-force grid averages") {
  std::mt19937_64 rng(5);
  std::vector<WordRateTrack> tracks;
  for (int w = 0; w < 6; ++w) {
    WordRateTrack t("w" + std::to_string(w), 600.0);
    std::vector<double> arr;
    const int n = 5 + static_cast<int>(rng() % 100);
    for (int i = 0; i < n; ++i) arr.push_back(std::round(std::uniform_real_distribution<double>(0, 50000)(rng)));
    std::sort(arr.begin(), arr.end());
    for (double a : arr) t.add_arrival(a);
    tracks.push_back(std::move(t));
  }
  const double begin = 0.0;
  const double end = 50000.0;
  const double step = 60.0;
  const auto th = calibrate_thresholds(tracks, step, begin, end);
  double want_rate = 0.0;
  double want_slope = 0.0;
  for (const auto& t : tracks) {
    double r = 0.0;
    double s = 0.0;
    int k = 0;
    for (double x = begin; x <= end + 1e-9; x += step, ++k) {
      r += t.rate_at(x);
      s += t.slope_at(x);
    }
    want_rate = std::max(want_rate, r / k);
    want_slope = std::max(want_slope, s / k);
  }
  CHECK(th.rate == doctest::Approx(want_rate).epsilon(1e-9));
  CHECK(th.slope == doctest::Approx(std::max(want_slope, kMinSlopeThreshold)).epsilon(1e-9));
  CHECK_THROWS(calibrate_thresholds(std::vector<WordRateTrack>{WordRateTrack("x")}, 60.0));
}

TEST_CASE("clustering: average linkage matches the naive oracle") {
  const auto rep = props::clustering_checks(150, 3);
  CHECK(rep.mismatches == 0);
  CHECK(rep.identical_fixtures > 0);
  CHECK(rep.identical_split == 0);
}

TEST_CASE("clustering: cutoff zero keeps singletons, cutoff two merges everything") {
  Eigen::MatrixXd d(3, 3);
  d << 0, 0.2, 0.9, 0.2, 0, 0.8, 0.9, 0.8, 0;
  CHECK(agglomerative_cluster(d, 0.0) == std::vector<int>{0, 1, 2});
  CHECK(agglomerative_cluster(d, 0.5) == std::vector<int>{0, 0, 1});
  CHECK(agglomerative_cluster(d, 2.0) == std::vector<int>{0, 0, 0});
  CHECK(agglomerative_cluster(d, 0.5) == oracle::average_linkage(d, 0.5));
}

TEST_CASE("pearson: constant input gives zero") {
  Eigen::VectorXd a = Eigen::VectorXd::Constant(5, 2.0);
  Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(5, 0, 1);
  CHECK(pearson(a, b) == 0.0);
  CHECK(pearson(b, b) == doctest::Approx(1.0));
  CHECK(pearson(b, Eigen::VectorXd(-b)) == doctest::Approx(-1.0));
}
