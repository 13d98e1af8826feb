#include "ecpipe/sentiment.h"

#include <algorithm>
#include <set>

#include "ecpipe/csv.h"
#include "ecpipe/error.h"

namespace ecpipe {

LexiconCategory::LexiconCategory(std::string name,
                                 std::vector<LexiconPattern> patterns)
    : name_(std::move(name)), patterns_(std::move(patterns)) {
  for (const auto& p : patterns_) {
    if (p.prefix) {
      prefixes_.insert(p.text);
      longest_prefix_ = std::max(longest_prefix_, p.text.size());
    } else {
      literals_.insert(p.text);
    }
  }
}

bool LexiconCategory::matches(std::string_view token) const {
  if (literals_.count(std::string(token))) return true;
  const std::size_t limit = std::min(token.size(), longest_prefix_);
  std::string probe;
  for (std::size_t n = 0; n <= limit; ++n) {
    probe.assign(token.substr(0, n));
    if (prefixes_.count(probe)) return true;
  }
  return false;
}

Lexicon::Lexicon(std::vector<LexiconCategory> categories)
    : categories_(std::move(categories)) {
  std::set<std::string> names;
  for (const auto& c : categories_) {
    if (!names.insert(c.name()).second) {
      throw Error(ErrorCode::kDuplicateCategory, "category '" + c.name() + "' defined twice");
    }
  }
}

std::vector<std::string> Lexicon::category_names() const {
  std::vector<std::string> out;
  for (const auto& c : categories_) out.push_back(c.name());
  return out;
}

Lexicon parse_lexicon(std::string_view text) {
  struct Pending {
    std::string name;
    std::size_t line;
    std::vector<LexiconPattern> patterns;
  };
  std::vector<Pending> blocks;
  auto close_block = [&] {
    if (!blocks.empty() && blocks.back().patterns.empty()) {
      throw Error(ErrorCode::kParseError,
                  "line " + std::to_string(blocks.back().line) + ": category '" +
                      blocks.back().name + "' has no patterns");
    }
  };
  std::size_t pos = 0, line_no = 0;
  // A UTF-8 byte order mark is tolerated.
  if (text.substr(0, 3) == "\xEF\xBB\xBF") pos = 3;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    const std::string where = "line " + std::to_string(line_no);
    if (line.empty() || line[0] == '#') continue;
    if (line[0] == '%') {
      close_block();
      const std::string name = trim(std::string_view(line).substr(1));
      if (name.empty()) throw Error(ErrorCode::kParseError, where + ": empty category name");
      for (const auto& b : blocks) {
        if (b.name == name) {
          throw Error(ErrorCode::kDuplicateCategory, where + ": category '" + name + "' defined twice");
        }
      }
      blocks.push_back({name, line_no, {}});
      continue;
    }
    if (blocks.empty()) {
      throw Error(ErrorCode::kParseError, where + ": pattern before any %category line");
    }
    if (line.find_first_of(" \t") != std::string::npos) {
      throw Error(ErrorCode::kParseError, where + ": pattern '" + line + "' contains whitespace");
    }
    const std::size_t star = line.find('*');
    LexiconPattern p;
    if (star == std::string::npos) {
      p.text = to_lower(line);
    } else if (star + 1 == line.size()) {
      p.text = to_lower(line.substr(0, star));
      p.prefix = true;
    } else {
      throw Error(ErrorCode::kParseError,
                  where + ": wildcard must be the final character in '" + line + "'");
    }
    if (p.text.empty() && !p.prefix) {
      throw Error(ErrorCode::kParseError, where + ": empty pattern");
    }
    if (p.text.empty()) {
      throw Error(ErrorCode::kParseError, where + ": bare '*' would match every token");
    }
    blocks.back().patterns.push_back(std::move(p));
  }
  close_block();
  std::vector<LexiconCategory> categories;
  for (auto& b : blocks) categories.emplace_back(std::move(b.name), std::move(b.patterns));
  return Lexicon(std::move(categories));
}

Lexicon load_lexicon(const std::string& path) {
  try {
    return parse_lexicon(read_file(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kFileUnreadable) throw;
    throw Error(e.code(), path + ": " + e.what());
  }
}

const Lexicon& bundled_lexicon() {
  static const Lexicon lexicon = parse_lexicon(bundled_lexicon_text());
  return lexicon;
}

double SentimentScores::at(std::string_view category) const {
  for (std::size_t i = 0; i < categories.size(); ++i)
    if (categories[i] == category) return scores[i];
  throw Error(ErrorCode::kSchemaViolation, "no sentiment category '" + std::string(category) + "'");
}

SentimentScores score(const TokenStream& tokens, const Lexicon& lexicon) {
  SentimentScores out;
  out.categories = lexicon.category_names();
  out.scores.assign(out.categories.size(), 0.0);
  out.token_count = tokens.size();
  if (tokens.empty()) return out;
  const auto& cats = lexicon.categories();
  std::vector<std::size_t> hits(cats.size(), 0);
  for (const auto& t : tokens)
    for (std::size_t c = 0; c < cats.size(); ++c)
      if (cats[c].matches(t)) ++hits[c];
  for (std::size_t c = 0; c < cats.size(); ++c) {
    out.scores[c] = 100.0 * static_cast<double>(hits[c]) / static_cast<double>(tokens.size());
  }
  return out;
}

}  // namespace ecpipe
