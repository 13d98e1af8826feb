#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ecpipe/date.h"

namespace ecpipe {

enum class Sector {
  kServices,
  kTechnology,
  kFinancial,
  kHealthcare,
  kBasicMaterials,
  kConsumer,
  kIndustrial,
  kUtilities,
  kNotSpecified,
};

inline constexpr std::array<Sector, 9> kAllSectors = {
    Sector::kServices,       Sector::kTechnology, Sector::kFinancial,
    Sector::kHealthcare,     Sector::kBasicMaterials, Sector::kConsumer,
    Sector::kIndustrial,     Sector::kUtilities,  Sector::kNotSpecified,
};

// "Services", "Basic Materials", ...
std::string_view sector_name(Sector s);
// Parenthesized abbreviations: "Service", "Tech", "Fin", "Health", "Mat",
// "Con", "Ind", "Util"; "NotSpec" for the unassigned bucket.
std::string_view sector_short_name(Sector s);
// Accepts full or short names, case-insensitive. Throws kUnknownSector.
Sector parse_sector(std::string_view text);
// Sector ETF whose daily returns define index-relative performance.
std::string_view reference_index(Sector s);

struct TranscriptRecord {
  std::string id;
  std::string ticker;
  Date call_date;
  Sector sector = Sector::kNotSpecified;
  int quarter = 1;
  int fiscal_year = 0;
  std::string text;
};

struct LineError {
  std::size_t line = 0;
  std::string message;
};

struct TranscriptLoad {
  std::vector<TranscriptRecord> records;
  std::vector<LineError> errors;
  // Non-blank lines seen; records.size() + errors.size() == lines.
  std::size_t lines = 0;
};

// Parses one JSON object per line with fields
// `id, ticker, date, sector, quarter, fiscal_year, text`. Bad lines are
// reported in `errors` and the rest are kept. A repeated (ticker, date) or
// repeated id is an error on the later line. Throws kFileUnreadable.
TranscriptLoad load_transcripts(const std::string& path);
TranscriptLoad parse_transcripts(std::string_view jsonl);

// Serializes records in the same JSONL schema load_transcripts reads.
std::string to_jsonl(const std::vector<TranscriptRecord>& records);

using TokenStream = std::vector<std::string>;

// Lowercased word tokens. Splits on anything that is not an ASCII letter,
// digit or apostrophe (U+2019 counts as an apostrophe), trims leading and
// trailing apostrophes, and drops tokens that contain a digit.
TokenStream tokenize(std::string_view text);

std::string join_tokens(const TokenStream& tokens);

}  // namespace ecpipe
