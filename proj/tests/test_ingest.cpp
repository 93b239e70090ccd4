#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "jitterscope/ingest.hpp"
#include "jitterscope/porter.hpp"
#include "jitterscope/rake.hpp"
#include "jitterscope/sentiment.hpp"
#include "oracles.hpp"
#include "test_paths.hpp"

using namespace jitterscope;
using namespace jitterscope::ingest;

namespace {

StopWords small_stopwords() {
  return {"a", "an", "and", "the", "of", "to", "in", "on", "is", "was", "for", "with", "at", "by", "as"};
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("parse: empty input gives no records") {
  const auto r = parse_tweet_lines("");
  CHECK(r.records.empty());
  CHECK(r.malformed_lines.empty());
}

TEST_CASE("parse: shuffled timestamps come back sorted") {
  const std::string lines =
      R"({"ts":300,"text":"c","user":"u","followers":1,"verified":false})"
      "\n"
      R"({"ts":100,"text":"a","user":"u","followers":1,"verified":true,"lat":1.5,"lon":2.5})"
      "\n"
      R"({"ts":200,"text":"b","user":"u","followers":1,"verified":false})"
      "\n";
  const auto r = parse_tweet_lines(lines);
  REQUIRE(r.records.size() == 3);
  std::vector<Timestamp> ts;
  for (const auto& t : r.records) ts.push_back(t.timestamp);
  auto sorted = ts;
  std::sort(sorted.begin(), sorted.end());
  CHECK(ts == sorted);
  CHECK(r.records.front().location.has_value());
  CHECK(r.records.front().verified);
}

TEST_CASE("parse: line without text is skipped and counted") {
  std::string lines;
  for (int i = 0; i < 20; ++i)
    lines += R"({"ts":)" + std::to_string(100 + i) + R"(,"text":"x","user":"u","followers":0,"verified":false})" + "\n";
  lines += R"({"ts":500,"user":"u","followers":0,"verified":false})"
           "\n";
  const auto r = parse_tweet_lines(lines);
  CHECK(r.records.size() == 20);
  CHECK(r.malformed_lines.size() == 1);
  CHECK(r.malformed_lines.front() == 21);
}

TEST_CASE("parse: too many malformed lines is fatal") {
  std::string lines = R"({"ts":1,"text":"x","user":"u","followers":0,"verified":false})"
                      "\nnot json\n";
  CHECK_THROWS_AS(parse_tweet_lines(lines), FatalError);
}

TEST_CASE("parse: serialize then parse is lossless") {
  std::mt19937_64 rng(3);
  std::vector<TweetRecord> records;
  for (int i = 0; i < 50; ++i) {
    TweetRecord r;
    r.timestamp = 1000 + i * 7;
    r.text = "word" + std::to_string(i) + " \"quoted\" \\ unicode \xce\xb1";
    r.author_id = "user" + std::to_string(rng() % 10);
    r.followers = static_cast<std::int64_t>(rng() % 100000);
    r.verified = rng() % 2 == 0;
    if (i % 3 == 0) r.location = LatLon{std::uniform_real_distribution<double>(-90, 90)(rng),
                                        std::uniform_real_distribution<double>(-180, 180)(rng)};
    records.push_back(r);
  }
  std::string buf;
  for (const auto& r : records) buf += serialize_tweet(r) + "\n";
  const auto back = parse_tweet_lines(buf);
  CHECK(back.records == records);
}

TEST_CASE("tokenize: worked examples") {
  const auto sw = small_stopwords();
  CHECK(tokenize_and_stem("", sw).empty());
  CHECK(tokenize_and_stem("the and a", sw).empty());
  CHECK(tokenize_and_stem("Greek DEBT repayment!! http://x.co", sw) ==
        std::vector<std::string>{"greek", "debt", "repay"});
  CHECK(tokenize_and_stem("@someone Greece banks", sw) == std::vector<std::string>{"greec", "bank"});
}

TEST_CASE("tokenize: idempotent on its own joined output") {
  const auto sw = small_stopwords();
  for (const char* text : {"Relational databases are generalizations of conditional operations",
                           "The hopefulness of Greek bankers was decreasing rapidly in the negotiations",
                           "Capital controls: controlling, controlled, controllers!"}) {
    const auto once = tokenize_and_stem(text, sw);
    std::string joined;
    for (const auto& t : once) joined += t + " ";
    CHECK(tokenize_and_stem(joined, sw) == once);
  }
}

TEST_CASE("porter: reference pairs") {
  // Pairs from the published Porter vocabulary/output lists.
  const std::vector<std::pair<std::string, std::string>> pairs{
      {"caresses", "caress"}, {"ponies", "poni"},       {"cats", "cat"},          {"feed", "feed"},
      {"agreed", "agre"},     {"plastered", "plaster"}, {"motoring", "motor"},    {"sing", "sing"},
      {"conflated", "conflat"}, {"hopping", "hop"},     {"filing", "file"},       {"happy", "happi"},
      {"relational", "relat"}, {"conditional", "condit"}, {"rational", "ration"}, {"digitizer", "digit"},
      {"generalization", "gener"}, {"hopeful", "hope"}, {"goodness", "good"},    {"adjustable", "adjust"},
      {"repayment", "repay"}, {"controlling", "control"}, {"generate", "gener"}, {"probate", "probat"}};
  for (const auto& [w, s] : pairs) CHECK_MESSAGE(porter_stem(w) == s, w);
}

TEST_CASE("filter_by_terms") {
  TweetRecord a{1, "Greek banks reopen", "u", 0, false, {}};
  TweetRecord b{2, "Spanish vote today", "u", 0, false, {}};
  TweetRecord c{3, "GREECE again", "u", 0, false, {}};
  const std::vector<TweetRecord> in{a, b, c, a};
  const auto kept = filter_by_terms(in, {"greece", "greek"});
  CHECK(kept == std::vector<TweetRecord>{a, c, a});
  CHECK(filter_by_terms({a}, {"spain"}).empty());
  CHECK(filter_by_terms({}, {"greek"}).empty());
  CHECK_THROWS(filter_by_terms(in, {}));
}

TEST_CASE("sentiment: default, max/min and negation flip") {
  SentimentLexicon lex;
  lex.strengths = {{"excel", 4}, {"fear", -3}, {"good", 2}};
  lex.negations = {"not"};
  lex.boosters = {{"very", 1}};
  CHECK(score_tweet_sentiment({"bank", "loan"}, lex) == SentimentScore{1, -1});
  CHECK(score_tweet_sentiment({"excel", "fear"}, lex) == SentimentScore{4, -3});
  CHECK(score_tweet_sentiment({"excel", "fear"}, lex).ssi() == 1);
  CHECK(score_tweet_sentiment({"not", "excel"}, lex) == SentimentScore{1, -4});
  CHECK(score_tweet_sentiment({"very", "good"}, lex) == SentimentScore{3, -1});
}

TEST_CASE("sentiment: contribution stays in [-4, 4] for shipped lexicon") {
  const auto lex = load_lexicon(test_paths::data_dir / "lexicon.txt");
  const auto sw = load_stopwords(test_paths::data_dir / "stopwords.txt");
  lex.validate();
  CHECK(!sw.contains("not"));
  std::vector<std::string> vocab;
  for (const auto& [w, s] : lex.strengths) vocab.push_back(w);
  for (const auto& n : lex.negations) vocab.push_back(n);
  for (const auto& [b, s] : lex.boosters) vocab.push_back(b);
  std::mt19937_64 rng(11);
  for (int i = 0; i < 2000; ++i) {
    std::vector<std::string> toks;
    const auto len = rng() % 8;
    for (std::size_t k = 0; k < len; ++k) toks.push_back(vocab[rng() % vocab.size()]);
    const auto s = score_tweet_sentiment(toks, lex);
    CHECK(s.positivity >= 1);
    CHECK(s.negativity <= -1);
    CHECK(s.ssi() >= -4);
    CHECK(s.ssi() <= 4);
  }
}

TEST_CASE("rake: empty document and a single repeated word") {
  const auto sw = small_stopwords();
  CHECK(rake_extract_keywords("", sw, {2, 4, 1.2}).empty());
  const auto one = rake_extract_keywords("drachma. drachma. drachma. drachma.", sw, {2, 4, 0.0});
  REQUIRE(one.size() == 1);
  CHECK(one[0].phrase == "drachma");
  CHECK(one[0].score == 1.0);
  CHECK(one[0].occurrences == 4);
}

TEST_CASE("rake: fixture document against a co-occurrence oracle") {
  const auto doc = read_file(test_paths::tests_data_dir / "rake_document.txt");
  const auto sw = load_stopwords(test_paths::data_dir / "stopwords.txt");
  const auto got = rake_extract_keywords(doc, sw, {2, 4, 1.2});
  const auto want = oracle::rake(doc, sw, 2, 4, 1.2);
  REQUIRE(got.size() == want.size());
  CHECK(!got.empty());
  for (std::size_t i = 0; i < got.size(); ++i) {
    CHECK(got[i].phrase == want[i].phrase);
    CHECK(got[i].score == doctest::Approx(want[i].score).epsilon(1e-12));
    CHECK(got[i].occurrences == want[i].occurrences);
  }
  // Single-word phrases score degree/freq >= 1.
  for (const auto& k : rake_extract_keywords(doc, sw, {2, 1, 0.0}))
    if (k.phrase.find(' ') == std::string::npos) CHECK(k.score >= 1.0);
}

TEST_CASE("market csv round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "jitterscope_ingest_test";
  std::filesystem::create_directories(dir);
  std::vector<MarketBar> bars{{100, 1.5}, {400, 1.25}, {700, 2.0 / 3.0}};
  write_market_csv(dir / "m.csv", bars);
  CHECK(parse_market_csv(dir / "m.csv") == bars);
  std::ofstream(dir / "bad.csv") << "ts,price\n100,-1\n";
  CHECK_THROWS_AS(parse_market_csv(dir / "bad.csv"), FatalError);
}
