#include "jitterscope/calendar.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace jitterscope::market {
namespace {

constexpr std::array<const char*, 7> kDayKeys{"mon", "tue", "wed", "thu", "fri", "sat", "sun"};

// Bounded search window when no horizon is declared.
constexpr std::int64_t kMaxLookaheadDays = 366;

Timestamp parse_clock(const std::string& s) {
  int h = -1;
  int m = -1;
  char tail = 0;
  if (std::sscanf(s.c_str(), "%d:%d%c", &h, &m, &tail) != 2 || h < 0 || h > 24 || m < 0 || m > 59 ||
      (h == 24 && m != 0))
    throw FatalError("bad clock time '" + s + "' in calendar", "calendar");
  return static_cast<Timestamp>(h) * kSecondsPerHour + m * 60;
}

std::string format_clock(Timestamp offset) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "%02d:%02d", static_cast<int>(offset / kSecondsPerHour),
                static_cast<int>(offset % kSecondsPerHour / 60));
  return buf;
}

std::int64_t day_of(Timestamp t) {
  return t >= 0 ? t / kSecondsPerDay : -((-t + kSecondsPerDay - 1) / kSecondsPerDay);
}

}  // namespace

std::int64_t parse_iso_date(const std::string& date) {
  int y = 0;
  unsigned m = 0;
  unsigned d = 0;
  char tail = 0;
  if (std::sscanf(date.c_str(), "%d-%u-%u%c", &y, &m, &d, &tail) != 3)
    throw FatalError("bad date '" + date + "' in calendar", "calendar");
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
  if (!ymd.ok()) throw FatalError("bad date '" + date + "' in calendar", "calendar");
  return std::chrono::sys_days{ymd}.time_since_epoch().count();
}

std::string format_iso_date(std::int64_t days) {
  const std::chrono::year_month_day ymd{std::chrono::sys_days{std::chrono::days{days}}};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()));
  return buf;
}

int weekday_of(std::int64_t days_since_epoch) {
  // 1970-01-01 was a Thursday.
  return static_cast<int>(((days_since_epoch + 3) % 7 + 7) % 7);
}

MarketCalendar::MarketCalendar(std::array<std::optional<DailyHours>, 7> weekly, std::set<std::int64_t> holidays,
                               std::optional<std::int64_t> first_day, std::optional<std::int64_t> last_day)
    : weekly_(weekly), holidays_(std::move(holidays)), first_day_(first_day), last_day_(last_day) {
  for (const auto& h : weekly_) {
    if (h && !(h->open_offset < h->close_offset && h->close_offset <= kSecondsPerDay))
      throw FatalError("calendar session must open before it closes within one day", "calendar");
  }
  if (first_day_ && last_day_ && *first_day_ > *last_day_)
    throw FatalError("calendar horizon ends before it starts", "calendar");
}

MarketCalendar MarketCalendar::weekdays(Timestamp open_offset, Timestamp close_offset) {
  std::array<std::optional<DailyHours>, 7> weekly{};
  for (int d = 0; d < 5; ++d) weekly[d] = DailyHours{open_offset, close_offset};
  return MarketCalendar(weekly, {});
}

MarketCalendar MarketCalendar::from_json(const nlohmann::json& j) {
  try {
    std::array<std::optional<DailyHours>, 7> weekly{};
    const auto& sessions = j.at("sessions");
    for (auto it = sessions.begin(); it != sessions.end(); ++it) {
      std::size_t idx = kDayKeys.size();
      for (std::size_t d = 0; d < kDayKeys.size(); ++d)
        if (it.key() == kDayKeys[d]) idx = d;
      if (idx == kDayKeys.size()) throw FatalError("unknown weekday '" + it.key() + "' in calendar", "calendar");
      const auto& pair = it.value();
      if (!pair.is_array() || pair.size() != 2) throw FatalError("session must be [open, close]", "calendar");
      weekly[idx] = DailyHours{parse_clock(pair[0].get<std::string>()), parse_clock(pair[1].get<std::string>())};
    }
    std::set<std::int64_t> holidays;
    if (j.contains("holidays"))
      for (const auto& h : j.at("holidays")) holidays.insert(parse_iso_date(h.get<std::string>()));
    std::optional<std::int64_t> first;
    std::optional<std::int64_t> last;
    if (j.contains("horizon")) {
      const auto& hz = j.at("horizon");
      if (!hz.is_array() || hz.size() != 2) throw FatalError("horizon must be [first, last]", "calendar");
      first = parse_iso_date(hz[0].get<std::string>());
      last = parse_iso_date(hz[1].get<std::string>());
    }
    return MarketCalendar(weekly, std::move(holidays), first, last);
  } catch (const nlohmann::json::exception& e) {
    throw FatalError(std::string("malformed calendar: ") + e.what(), "calendar");
  }
}

MarketCalendar MarketCalendar::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FatalError("cannot open calendar file " + path.string(), "calendar");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FatalError("calendar " + path.string() + ": " + e.what(), "calendar");
  }
  return from_json(j);
}

nlohmann::json MarketCalendar::to_json() const {
  nlohmann::json j;
  j["sessions"] = nlohmann::json::object();
  for (std::size_t d = 0; d < weekly_.size(); ++d)
    if (weekly_[d])
      j["sessions"][kDayKeys[d]] = {format_clock(weekly_[d]->open_offset), format_clock(weekly_[d]->close_offset)};
  j["holidays"] = nlohmann::json::array();
  for (auto h : holidays_) j["holidays"].push_back(format_iso_date(h));
  if (first_day_ && last_day_) j["horizon"] = {format_iso_date(*first_day_), format_iso_date(*last_day_)};
  return j;
}

bool MarketCalendar::in_horizon(std::int64_t day) const {
  return (!first_day_ || day >= *first_day_) && (!last_day_ || day <= *last_day_);
}

std::optional<Session> MarketCalendar::session_on_day(std::int64_t day) const {
  if (!in_horizon(day) || holidays_.contains(day)) return std::nullopt;
  const auto& hours = weekly_[static_cast<std::size_t>(weekday_of(day))];
  if (!hours) return std::nullopt;
  const Timestamp base = day * kSecondsPerDay;
  return Session{base + hours->open_offset, base + hours->close_offset};
}

std::optional<Session> MarketCalendar::session_containing(Timestamp t) const {
  const auto day = day_of(t);
  // A session closing at 24:00 contains midnight of the following day.
  for (auto d : {day, day - 1}) {
    auto s = session_on_day(d);
    if (s && s->contains(t)) return s;
  }
  return std::nullopt;
}

Timestamp MarketCalendar::next_open_time(Timestamp t) const {
  const auto day = day_of(t);
  if (!in_horizon(day))
    throw FatalError("time " + std::to_string(t) + " lies outside the calendar horizon", "calendar");
  if (is_open(t)) return t;
  const std::int64_t stop = last_day_ ? *last_day_ : day + kMaxLookaheadDays;
  for (auto d = day; d <= stop; ++d) {
    auto s = session_on_day(d);
    if (s && s->open >= t) return s->open;
  }
  throw FatalError("no market session after time " + std::to_string(t), "calendar");
}

std::vector<Session> MarketCalendar::sessions_between(Timestamp begin, Timestamp end) const {
  std::vector<Session> out;
  if (end < begin) return out;
  for (auto d = day_of(begin) - 1; d <= day_of(end); ++d) {
    auto s = session_on_day(d);
    if (s && s->close >= begin && s->open <= end) out.push_back(*s);
  }
  return out;
}

}  // namespace jitterscope::market
