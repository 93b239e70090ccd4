#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "jitterscope/ingest.hpp"

namespace jitterscope::ingest {

struct RakeOptions {
  int max_words_per_keyword = 2;
  int min_occurrences = 4;
  double min_score = 1.2;
};

struct ScoredKeyword {
  std::string phrase;
  double score = 0.0;
  int occurrences = 0;

  bool operator==(const ScoredKeyword&) const = default;
};

/// Rapid automatic keyword extraction. Candidate phrases are maximal runs of
/// non-stop-words between punctuation; phrases longer than
/// `max_words_per_keyword` are discarded before word degree and frequency are
/// tabulated. A phrase scores the sum of degree(w)/freq(w) over its words.
/// Phrases seen fewer than `min_occurrences` times or scoring below
/// `min_score` are dropped. Sorted by descending score, then phrase.
std::vector<ScoredKeyword> rake_extract_keywords(std::string_view document, const StopWords& stopwords,
                                                 const RakeOptions& options = {});

}  // namespace jitterscope::ingest
