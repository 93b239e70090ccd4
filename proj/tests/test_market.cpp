#include <doctest.h>

#include <cmath>
#include <random>

#include "jitterscope/calendar.hpp"
#include "jitterscope/marketlabel.hpp"
#include "oracles.hpp"
#include "properties.hpp"
#include "test_paths.hpp"

using namespace jitterscope;
using namespace jitterscope::market;

namespace {

// Next open instant by walking days: Mon-Fri sessions, 1970-01-01 was a Thursday.
Timestamp scan_next_open(Timestamp t, Timestamp open, Timestamp close, const std::set<std::int64_t>& holidays) {
  for (std::int64_t d = t / kSecondsPerDay;; ++d) {
    if ((d + 3) % 7 >= 5 || holidays.contains(d)) continue;
    const Timestamp o = d * kSecondsPerDay + open;
    const Timestamp c = d * kSecondsPerDay + close;
    if (t <= c) return std::max(t, o);
  }
}

events::EventVector vec(Timestamp start, Timestamp snapshot, double v) {
  return {start, snapshot, 0, Eigen::VectorXd::Constant(10, v), false};
}

}  // namespace

TEST_CASE("calendar: iso dates and weekdays") {
  CHECK(parse_iso_date("1970-01-01") == 0);
  CHECK(format_iso_date(parse_iso_date("2015-07-06")) == "2015-07-06");
  CHECK(weekday_of(parse_iso_date("2015-07-06")) == 0);
  CHECK(weekday_of(0) == 3);
}

TEST_CASE("calendar: next_open_time agrees with a day scan") {
  const Timestamp open = 7 * 3600;
  const Timestamp close = 14 * 3600 + 20 * 60;
  std::set<std::int64_t> holidays{parse_iso_date("2015-04-10"), parse_iso_date("2015-04-13"),
                                  parse_iso_date("2015-05-01")};
  std::array<std::optional<MarketCalendar::DailyHours>, 7> weekly{};
  for (int d = 0; d < 5; ++d) weekly[static_cast<std::size_t>(d)] = MarketCalendar::DailyHours{open, close};
  const MarketCalendar cal(weekly, holidays);
  std::mt19937_64 rng(9);
  const Timestamp lo = parse_iso_date("2015-04-01") * kSecondsPerDay;
  for (int i = 0; i < 5000; ++i) {
    Timestamp t = lo + static_cast<Timestamp>(rng() % (40 * kSecondsPerDay));
    if (i % 5 == 0) t = (t / kSecondsPerDay) * kSecondsPerDay + (i % 2 ? open : close) + static_cast<Timestamp>(i % 3) - 1;
    REQUIRE(cal.next_open_time(t) == scan_next_open(t, open, close, holidays));
  }
}

TEST_CASE("calendar: json round trip and the shipped file") {
  const auto cal = MarketCalendar::load(test_paths::data_dir / "calendar.json");
  CHECK(MarketCalendar::from_json(cal.to_json()).to_json() == cal.to_json());
  // 2015-07-06 falls in the closure.
  CHECK(!cal.session_on_day(parse_iso_date("2015-07-06")));
  CHECK(cal.session_on_day(parse_iso_date("2015-08-03")));
}

TEST_CASE("volatility: rolling stdev of log returns matches the oracle") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> step(0.0, 0.01);
  std::vector<ingest::MarketBar> bars;
  std::vector<double> prices;
  double p = 10.0;
  for (int i = 0; i < 80; ++i) {
    p *= std::exp(step(rng));
    bars.push_back({1000 + i * 300, p});
    prices.push_back(p);
  }
  const int window = 24;
  const auto vol = compute_volatility(bars, window);
  const auto want = oracle::rolling_log_return_stdev(prices, window);
  REQUIRE(vol.size() == want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    CHECK(vol.timestamps[i] == bars[i + window].timestamp);
    CHECK(vol.volatility[static_cast<Eigen::Index>(i)] == doctest::Approx(want[i]).epsilon(1e-10));
  }
  CHECK(vol.slope[0] == 0.0);
  CHECK(vol.slope[1] == doctest::Approx((want[1] - want[0]) / 300.0).epsilon(1e-9));
  CHECK_THROWS_AS(compute_volatility(std::span(bars).first(window + 1), window), FatalError);
}

TEST_CASE("volatility: a long gap starts a new session") {
  std::vector<ingest::MarketBar> bars;
  for (int i = 0; i < 40; ++i) bars.push_back({i * 300, 10.0 + (i % 3)});
  for (int i = 0; i < 40; ++i) bars.push_back({100000 + i * 300, 10.0 + (i % 4)});
  const auto vol = compute_volatility(bars, 10);
  CHECK(vol.size() == 60);
  CHECK(vol.session.front() != vol.session.back());
  CHECK(vol.slope[30] == 0.0);
}

TEST_CASE("slope baseline modes") {
  VolatilitySeries vol;
  vol.timestamps = {0, 300, 600, 900};
  vol.volatility = Eigen::Vector4d(1, 2, 1, 3);
  vol.slope = Eigen::Vector4d(0, 2, -1, 3);
  vol.session = {0, 0, 0, 0};
  CHECK(slope_baseline(vol, 900, BaselineMode::MeanAbs) == 1.5);
  CHECK(slope_baseline(vol, 900, BaselineMode::Signed) == 1.0);
  CHECK(slope_baseline(vol, 900, BaselineMode::PositiveOnly) == 1.25);
  CHECK(slope_baseline(vol, 600, BaselineMode::MeanAbs) == 1.0);
  vol.slope = Eigen::Vector4d(0, -2, -1, -3);
  CHECK_THROWS_AS(slope_baseline(vol, 900, BaselineMode::Signed), FatalError);
  CHECK_THROWS_AS(slope_baseline(vol, 900, BaselineMode::PositiveOnly), FatalError);
}

TEST_CASE("labeling: worked day and random layouts against a scan") {
  const auto rep = props::labeling_checks(2000, 6);
  CHECK_MESSAGE(rep.worked_day, rep.worked_day_detail);
  CHECK(rep.mismatches == 0);
  CHECK(rep.queries > 0);
}

TEST_CASE("dedupe keeps the latest snapshot per start and open") {
  const auto cal = MarketCalendar::weekdays(7 * 3600, 14 * 3600);
  // 1970-01-05 is a Monday.
  const Timestamp mon = 4 * kSecondsPerDay;
  std::vector<events::EventVector> v{vec(mon + 3600, mon + 3600, 1), vec(mon + 3600, mon + 4000, 2),
                                     vec(mon + 3600, mon + 8 * 3600, 3), vec(mon + 5000, mon + 9 * 3600, 4)};
  const auto out = dedupe_same_open(v, cal);
  REQUIRE(out.size() == 3);
  CHECK(out[0].vector.features[0] == 2);
  CHECK(out[0].t_prime == mon + 7 * 3600);
  CHECK(out[1].t_prime == mon + 8 * 3600);
  CHECK(out[2].t_prime == mon + 9 * 3600);
  std::swap(v[0], v[2]);
  CHECK_THROWS(dedupe_same_open(v, cal));
}
