#include "jitterscope/sentiment.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "jitterscope/common.hpp"
#include "jitterscope/porter.hpp"

namespace jitterscope::ingest {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

void SentimentLexicon::validate() const {
  for (const auto& [term, s] : strengths) {
    if (s == 0 || s < -5 || s > 5)
      throw FatalError("lexicon strength out of range for '" + term + "': " + std::to_string(s), "ingest");
  }
}

SentimentLexicon load_lexicon(const std::filesystem::path& path, bool stem_terms) {
  std::ifstream in(path);
  if (!in) throw FatalError("cannot read lexicon " + path.string(), "ingest");
  enum class Section { Terms, Boosters, Negations } section = Section::Terms;
  SentimentLexicon lex;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (line == "[boosters]") { section = Section::Boosters; continue; }
    if (line == "[negations]") { section = Section::Negations; continue; }
    if (line == "[terms]") { section = Section::Terms; continue; }

    const auto tab = line.find('\t');
    std::string term = lowercase(trim(line.substr(0, tab)));
    if (section == Section::Negations) {
      lex.negations.insert(term);
      continue;
    }
    if (tab == std::string::npos)
      throw FatalError("lexicon line " + std::to_string(line_no) + " lacks a strength", "ingest");
    int value = 0;
    try {
      value = std::stoi(trim(line.substr(tab + 1)));
    } catch (const std::exception&) {
      throw FatalError("lexicon line " + std::to_string(line_no) + " has a non-integer strength", "ingest");
    }
    if (stem_terms) term = stem_fixed_point(term);
    if (section == Section::Boosters)
      lex.boosters[term] = value;
    else
      lex.strengths[term] = value;
  }
  lex.validate();
  return lex;
}

SentimentScore score_tweet_sentiment(const std::vector<std::string>& tokens, const SentimentLexicon& lexicon) {
  SentimentScore score;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto hit = lexicon.strengths.find(tokens[i]);
    if (hit == lexicon.strengths.end()) continue;
    int s = hit->second;
    std::size_t back = i;
    if (back > 0) {
      if (auto boost = lexicon.boosters.find(tokens[back - 1]); boost != lexicon.boosters.end()) {
        s += s > 0 ? boost->second : -boost->second;
        --back;
      }
    }
    if (back > 0 && lexicon.negations.contains(tokens[back - 1])) s = -s;
    s = std::clamp(s, -5, 5);
    if (s > 0) score.positivity = std::max(score.positivity, s);
    if (s < 0) score.negativity = std::min(score.negativity, s);
  }
  return score;
}

}  // namespace jitterscope::ingest
