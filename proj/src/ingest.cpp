#include "jitterscope/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "jitterscope/porter.hpp"

namespace jitterscope::ingest {
namespace {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FatalError("cannot read " + path.string(), "ingest");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::optional<TweetRecord> parse_tweet_object(const std::string& line) {
  const json obj = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (!obj.is_object()) return std::nullopt;

  const auto ts = obj.find("ts");
  const auto text = obj.find("text");
  if (ts == obj.end() || !ts->is_number_integer()) return std::nullopt;
  if (text == obj.end() || !text->is_string()) return std::nullopt;

  TweetRecord rec;
  rec.timestamp = ts->get<Timestamp>();
  if (rec.timestamp <= 0) return std::nullopt;
  rec.text = text->get<std::string>();

  if (auto it = obj.find("user"); it != obj.end()) {
    if (!it->is_string()) return std::nullopt;
    rec.author_id = it->get<std::string>();
  }
  if (auto it = obj.find("followers"); it != obj.end()) {
    if (!it->is_number_integer()) return std::nullopt;
    rec.followers = it->get<std::int64_t>();
    if (rec.followers < 0) return std::nullopt;
  }
  if (auto it = obj.find("verified"); it != obj.end()) {
    if (!it->is_boolean()) return std::nullopt;
    rec.verified = it->get<bool>();
  }

  const auto lat = obj.find("lat");
  const auto lon = obj.find("lon");
  const bool has_lat = lat != obj.end() && !lat->is_null();
  const bool has_lon = lon != obj.end() && !lon->is_null();
  if (has_lat != has_lon) return std::nullopt;
  if (has_lat) {
    if (!lat->is_number() || !lon->is_number()) return std::nullopt;
    LatLon loc{lat->get<double>(), lon->get<double>()};
    if (loc.lat < -90.0 || loc.lat > 90.0 || loc.lon < -180.0 || loc.lon > 180.0) return std::nullopt;
    rec.location = loc;
  }
  return rec;
}

bool is_blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

void check_malformed(std::size_t malformed, std::size_t total, const std::vector<std::size_t>& lines,
                     const std::string& what) {
  if (total == 0) return;
  if (static_cast<double>(malformed) > kMaxMalformedFraction * static_cast<double>(total)) {
    std::ostringstream msg;
    msg << malformed << " of " << total << " " << what << " lines malformed (lines";
    for (std::size_t i = 0; i < lines.size() && i < 20; ++i) msg << ' ' << lines[i];
    if (lines.size() > 20) msg << " ...";
    msg << ')';
    throw FatalError(msg.str(), "ingest");
  }
}

bool is_word_byte(unsigned char c) {
  return std::isalnum(c) || c >= 0x80;
}

}  // namespace

ParseResult<TweetRecord> parse_tweet_lines(std::string_view content) {
  ParseResult<TweetRecord> result;
  std::size_t line_no = 0;
  std::size_t total = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    std::size_t end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    std::string line(content.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (is_blank(line)) continue;
    ++total;
    if (auto rec = parse_tweet_object(line))
      result.records.push_back(std::move(*rec));
    else
      result.malformed_lines.push_back(line_no);
  }
  check_malformed(result.malformed_lines.size(), total, result.malformed_lines, "tweet");
  std::stable_sort(result.records.begin(), result.records.end(),
                   [](const TweetRecord& a, const TweetRecord& b) { return a.timestamp < b.timestamp; });
  return result;
}

ParseResult<TweetRecord> parse_tweet_stream(const std::filesystem::path& path) {
  return parse_tweet_lines(read_file(path));
}

std::string serialize_tweet(const TweetRecord& record) {
  json obj;
  obj["ts"] = record.timestamp;
  obj["text"] = record.text;
  obj["user"] = record.author_id;
  obj["followers"] = record.followers;
  obj["verified"] = record.verified;
  if (record.location) {
    obj["lat"] = record.location->lat;
    obj["lon"] = record.location->lon;
  }
  return obj.dump();
}

void write_tweet_stream(const std::filesystem::path& path, const std::vector<TweetRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FatalError("cannot write " + path.string(), "ingest");
  for (const auto& r : records) out << serialize_tweet(r) << '\n';
}

std::vector<MarketBar> parse_market_csv(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  std::string line;
  std::vector<MarketBar> bars;
  std::vector<std::size_t> bad;
  std::size_t line_no = 0;
  std::size_t total = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_blank(line)) continue;
    if (!header_seen) {
      header_seen = true;
      if (line == "ts,price") continue;
      throw FatalError("market file must start with header \"ts,price\"", "ingest");
    }
    ++total;
    const auto comma = line.find(',');
    try {
      if (comma == std::string::npos) throw std::invalid_argument("no comma");
      const std::string ts_str = line.substr(0, comma);
      const std::string price_str = line.substr(comma + 1);
      std::size_t used_ts = 0;
      std::size_t used_price = 0;
      MarketBar bar;
      bar.timestamp = std::stoll(ts_str, &used_ts);
      bar.price = std::stod(price_str, &used_price);
      if (used_ts != ts_str.size() || used_price != price_str.size()) throw std::invalid_argument("trailing");
      bars.push_back(bar);
    } catch (const std::exception&) {
      bad.push_back(line_no);
    }
  }
  check_malformed(bad.size(), total, bad, "market");
  std::stable_sort(bars.begin(), bars.end(),
                   [](const MarketBar& a, const MarketBar& b) { return a.timestamp < b.timestamp; });
  for (std::size_t i = 0; i < bars.size(); ++i) {
    if (!(bars[i].price > 0.0))
      throw FatalError("non-positive price at ts " + std::to_string(bars[i].timestamp), "ingest");
    if (i > 0 && bars[i].timestamp == bars[i - 1].timestamp)
      throw FatalError("duplicate market timestamp " + std::to_string(bars[i].timestamp), "ingest");
  }
  return bars;
}

void write_market_csv(const std::filesystem::path& path, const std::vector<MarketBar>& bars) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FatalError("cannot write " + path.string(), "ingest");
  out << "ts,price\n";
  char buf[64];
  for (const auto& b : bars) {
    std::snprintf(buf, sizeof buf, "%.17g", b.price);
    out << b.timestamp << ',' << buf << '\n';
  }
}

StopWords load_stopwords(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  StopWords words;
  std::string line;
  while (std::getline(in, line)) {
    std::string w;
    for (unsigned char c : line) {
      if (std::isspace(c)) continue;
      w.push_back(static_cast<char>(std::tolower(c)));
    }
    if (w.empty() || w.front() == '#') continue;
    words.insert(std::move(w));
  }
  return words;
}

std::vector<std::string> surface_words(std::string_view text) {
  std::vector<std::string> words;
  std::size_t i = 0;
  const std::size_t n = text.size();
  auto lower = [](std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
  };
  while (i < n) {
    if (std::isspace(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < n && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    const std::string chunk = lower(text.substr(i, j - i));
    i = j;
    if (chunk.starts_with("http://") || chunk.starts_with("https://") || chunk.starts_with("www.")) continue;
    if (chunk.front() == '@') continue;
    // Punctuation splits a whitespace chunk into words; apostrophes are dropped
    // so "greece's" becomes "greeces".
    std::string word;
    for (unsigned char c : chunk) {
      if (c == '\'') continue;
      if (is_word_byte(c)) {
        word.push_back(static_cast<char>(c));
      } else if (!word.empty()) {
        words.push_back(std::move(word));
        word.clear();
      }
    }
    if (!word.empty()) words.push_back(std::move(word));
  }
  return words;
}

std::vector<std::string> tokenize_and_stem(std::string_view text, const StopWords& stopwords) {
  std::vector<std::string> tokens;
  for (auto& word : surface_words(text)) {
    if (stopwords.contains(word)) continue;
    std::string stem = stem_fixed_point(word);
    if (stem.empty() || stopwords.contains(stem)) continue;
    tokens.push_back(std::move(stem));
  }
  return tokens;
}

std::vector<TweetRecord> filter_by_terms(const std::vector<TweetRecord>& records,
                                         const std::set<std::string>& required_terms) {
  if (required_terms.empty()) throw std::invalid_argument("filter_by_terms: required_terms must be non-empty");
  std::set<std::string> lowered;
  for (const auto& t : required_terms) {
    std::string l = t;
    std::transform(l.begin(), l.end(), l.begin(), [](unsigned char c) { return std::tolower(c); });
    lowered.insert(std::move(l));
  }
  std::vector<TweetRecord> kept;
  for (const auto& r : records) {
    const auto words = surface_words(r.text);
    if (std::any_of(words.begin(), words.end(), [&](const std::string& w) { return lowered.contains(w); }))
      kept.push_back(r);
  }
  return kept;
}

}  // namespace jitterscope::ingest
