#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace jitterscope::ingest {

/// Term strengths in [-5,-1] or [1,5]; boosters add magnitude to the
/// following sentiment term; negations flip its sign.
struct SentimentLexicon {
  std::map<std::string, int, std::less<>> strengths;
  std::map<std::string, int, std::less<>> boosters;
  std::set<std::string, std::less<>> negations;

  /// Throws FatalError when a strength is zero or out of range.
  void validate() const;
};

/// Lexicon file: "token<TAB>strength" lines, '#' comments, and optional
/// "[boosters]" / "[negations]" sections. With `stem_terms`, sentiment and
/// booster terms are passed through the same stemmer as tweet tokens.
SentimentLexicon load_lexicon(const std::filesystem::path& path, bool stem_terms = true);

struct SentimentScore {
  int positivity = 1;
  int negativity = -1;

  int ssi() const { return positivity + negativity; }
  bool operator==(const SentimentScore&) const = default;
};

/// Max positive and min negative term strength over the tokens, defaulting to
/// +1 / -1. A negation directly before a term (or before its booster) flips it.
SentimentScore score_tweet_sentiment(const std::vector<std::string>& tokens, const SentimentLexicon& lexicon);

}  // namespace jitterscope::ingest
