#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "jitterscope/common.hpp"

namespace jitterscope::ingest {

struct TweetRecord {
  Timestamp timestamp = 0;
  std::string text;
  std::string author_id;
  std::int64_t followers = 0;
  bool verified = false;
  std::optional<LatLon> location;

  bool operator==(const TweetRecord&) const = default;
};

struct MarketBar {
  Timestamp timestamp = 0;
  double price = 0.0;

  bool operator==(const MarketBar&) const = default;
};

struct TokenizedTweet {
  TweetRecord record;
  std::vector<std::string> tokens;
};

using StopWords = std::set<std::string, std::less<>>;

/// Result of a tolerant line-oriented parse.
template <typename Record>
struct ParseResult {
  std::vector<Record> records;
  std::vector<std::size_t> malformed_lines;  // 1-based
};

/// Fraction of non-blank lines that may be malformed before the parse fails.
constexpr double kMaxMalformedFraction = 0.10;

/// Reads JSON-lines tweets (keys ts, text, user, followers, verified, lat,
/// lon). Records come back stably sorted by timestamp; malformed lines are
/// skipped and reported. Throws FatalError when the file cannot be read or
/// more than 10% of lines are malformed.
ParseResult<TweetRecord> parse_tweet_stream(const std::filesystem::path& path);

/// Same as parse_tweet_stream but over an in-memory buffer.
ParseResult<TweetRecord> parse_tweet_lines(std::string_view content);

std::string serialize_tweet(const TweetRecord& record);
void write_tweet_stream(const std::filesystem::path& path, const std::vector<TweetRecord>& records);

/// CSV with header "ts,price". Prices must be positive and timestamps strictly
/// increasing after sorting.
std::vector<MarketBar> parse_market_csv(const std::filesystem::path& path);
void write_market_csv(const std::filesystem::path& path, const std::vector<MarketBar>& bars);

/// One token per line; blank lines and '#' comments ignored.
StopWords load_stopwords(const std::filesystem::path& path);

/// Lowercases, strips URLs, @-mentions and punctuation, drops stop-words,
/// Porter-stems the remainder (to a fixed point) and drops stems that are
/// themselves stop-words. Idempotent on its own joined output.
std::vector<std::string> tokenize_and_stem(std::string_view text, const StopWords& stopwords);

/// Lowercased surface words with URLs and mentions removed; no stemming and no
/// stop-word filtering.
std::vector<std::string> surface_words(std::string_view text);

/// Keeps records whose surface words intersect `required_terms`
/// (case-insensitive). Order and multiplicity are preserved.
std::vector<TweetRecord> filter_by_terms(const std::vector<TweetRecord>& records,
                                         const std::set<std::string>& required_terms);

}  // namespace jitterscope::ingest
