#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "jitterscope/common.hpp"

namespace jitterscope::market {

/// Days since 1970-01-01 for an ISO "YYYY-MM-DD" date.
std::int64_t parse_iso_date(const std::string& date);
std::string format_iso_date(std::int64_t days);

/// Monday = 0 ... Sunday = 6.
int weekday_of(std::int64_t days_since_epoch);

struct Session {
  Timestamp open = 0;
  Timestamp close = 0;  // inclusive

  bool contains(Timestamp t) const { return open <= t && t <= close; }
  bool operator==(const Session&) const = default;
};

/// Weekly template of UTC trading sessions with holidays and an optional
/// horizon. A market is open on [open, close], both ends inclusive.
class MarketCalendar {
public:
  struct DailyHours {
    Timestamp open_offset = 0;   // seconds after 00:00 UTC
    Timestamp close_offset = 0;
  };

  MarketCalendar() = default;
  MarketCalendar(std::array<std::optional<DailyHours>, 7> weekly, std::set<std::int64_t> holidays,
                 std::optional<std::int64_t> first_day = {}, std::optional<std::int64_t> last_day = {});

  /// Mon-Fri sessions with the same hours every day.
  static MarketCalendar weekdays(Timestamp open_offset, Timestamp close_offset);

  /// {"sessions": {"mon": ["07:00","17:00"], ...}, "holidays": [...],
  ///  "horizon": ["YYYY-MM-DD", "YYYY-MM-DD"]}
  static MarketCalendar from_json(const nlohmann::json& j);
  static MarketCalendar load(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  std::optional<Session> session_on_day(std::int64_t day) const;
  std::optional<Session> session_containing(Timestamp t) const;
  bool is_open(Timestamp t) const { return session_containing(t).has_value(); }

  /// `t` if the market is open at `t`, else the next session open. Throws
  /// FatalError when `t` lies outside the horizon or no session follows.
  Timestamp next_open_time(Timestamp t) const;

  /// Sessions overlapping [begin, end], in order.
  std::vector<Session> sessions_between(Timestamp begin, Timestamp end) const;

private:
  bool in_horizon(std::int64_t day) const;

  std::array<std::optional<DailyHours>, 7> weekly_{};
  std::set<std::int64_t> holidays_;
  std::optional<std::int64_t> first_day_;
  std::optional<std::int64_t> last_day_;
};

}  // namespace jitterscope::market
