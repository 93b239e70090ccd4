#include "jitterscope/rake.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <stdexcept>

namespace jitterscope::ingest {
namespace {

bool is_numeric(std::string_view w) {
  return std::all_of(w.begin(), w.end(), [](unsigned char c) { return std::isdigit(c) || c == '.'; });
}

// Splits into phrase fragments at punctuation, each fragment a list of
// lowercase words.
std::vector<std::vector<std::string>> fragments(std::string_view document) {
  std::vector<std::vector<std::string>> out(1);
  std::string word;
  auto flush_word = [&] {
    if (!word.empty()) out.back().push_back(std::move(word));
    word.clear();
  };
  for (unsigned char c : document) {
    if (std::isalnum(c) || c >= 0x80) {
      word.push_back(static_cast<char>(std::tolower(c)));
    } else if (c == '\'') {
      continue;
    } else if (std::isspace(c)) {
      flush_word();
    } else {
      flush_word();
      if (!out.back().empty()) out.emplace_back();
    }
  }
  flush_word();
  return out;
}

}  // namespace

std::vector<ScoredKeyword> rake_extract_keywords(std::string_view document, const StopWords& stopwords,
                                                 const RakeOptions& options) {
  if (options.max_words_per_keyword < 1) throw std::invalid_argument("max_words_per_keyword must be >= 1");
  if (options.min_occurrences < 1) throw std::invalid_argument("min_occurrences must be >= 1");

  std::vector<std::vector<std::string>> phrases;
  for (const auto& frag : fragments(document)) {
    std::vector<std::string> current;
    auto close = [&] {
      if (!current.empty() && static_cast<int>(current.size()) <= options.max_words_per_keyword)
        phrases.push_back(current);
      current.clear();
    };
    for (const auto& w : frag) {
      if (stopwords.contains(w) || is_numeric(w))
        close();
      else
        current.push_back(w);
    }
    close();
  }

  std::map<std::string, double> freq;
  std::map<std::string, double> degree;
  for (const auto& p : phrases) {
    for (const auto& w : p) {
      freq[w] += 1.0;
      degree[w] += static_cast<double>(p.size());
    }
  }

  std::map<std::string, ScoredKeyword> keywords;
  for (const auto& p : phrases) {
    std::string key;
    double score = 0.0;
    for (const auto& w : p) {
      if (!key.empty()) key.push_back(' ');
      key += w;
      score += degree[w] / freq[w];
    }
    auto& kw = keywords[key];
    kw.phrase = key;
    kw.score = score;
    ++kw.occurrences;
  }

  std::vector<ScoredKeyword> result;
  for (auto& [_, kw] : keywords)
    if (kw.occurrences >= options.min_occurrences && kw.score >= options.min_score) result.push_back(kw);
  std::sort(result.begin(), result.end(), [](const ScoredKeyword& a, const ScoredKeyword& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.phrase < b.phrase;
  });
  return result;
}

}  // namespace jitterscope::ingest
