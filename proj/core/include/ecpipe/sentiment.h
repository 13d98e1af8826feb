#pragma once

#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "ecpipe/corpus.h"

namespace ecpipe {

// A lexicon pattern is either a literal word or a prefix ending in '*'.
struct LexiconPattern {
  std::string text;  // without the trailing '*'
  bool prefix = false;
};

class LexiconCategory {
 public:
  LexiconCategory(std::string name, std::vector<LexiconPattern> patterns);

  const std::string& name() const { return name_; }
  const std::vector<LexiconPattern>& patterns() const { return patterns_; }

  bool matches(std::string_view token) const;

 private:
  std::string name_;
  std::vector<LexiconPattern> patterns_;
  std::unordered_set<std::string> literals_;
  std::unordered_set<std::string> prefixes_;
  std::size_t longest_prefix_ = 0;
};

class Lexicon {
 public:
  Lexicon() = default;
  // Throws kDuplicateCategory on repeated names.
  explicit Lexicon(std::vector<LexiconCategory> categories);

  const std::vector<LexiconCategory>& categories() const { return categories_; }
  std::vector<std::string> category_names() const;

 private:
  std::vector<LexiconCategory> categories_;
};

// Dictionary text format: `%name` opens a category, following non-empty lines
// are its patterns, `#` starts a comment line. Throws kParseError (message
// carries the line number) or kDuplicateCategory.
Lexicon parse_lexicon(std::string_view text);
Lexicon load_lexicon(const std::string& path);

// Small open-vocabulary lexicon with the ten regression categories
// (posemo, negemo, anx, anger, sad, certain, cogproc, insight, cause,
// discrep). For demos and tests; user dictionaries replace it in practice.
std::string_view bundled_lexicon_text();
const Lexicon& bundled_lexicon();

struct SentimentScores {
  std::vector<std::string> categories;
  // Percentage of tokens that hit each category, in [0, 100].
  std::vector<double> scores;
  std::size_t token_count = 0;

  // Throws kSchemaViolation for an unknown category name.
  double at(std::string_view category) const;
};

// score = 100 * hits / tokens for every category. Each token counts at most
// once per category but may hit several categories. Empty input scores 0.
SentimentScores score(const TokenStream& tokens, const Lexicon& lexicon);

}  // namespace ecpipe
