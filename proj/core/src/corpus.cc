#include "ecpipe/corpus.h"

#include <map>
#include <set>
#include <utility>

#include <json.hpp>

#include "ecpipe/csv.h"
#include "ecpipe/error.h"

namespace ecpipe {

namespace {

struct SectorInfo {
  Sector sector;
  std::string_view name;
  std::string_view short_name;
  std::string_view index;
};

constexpr std::array<SectorInfo, 9> kSectorTable = {{
    {Sector::kServices, "Services", "Service", "IYC"},
    {Sector::kTechnology, "Technology", "Tech", "XLK"},
    {Sector::kFinancial, "Financial", "Fin", "XLF"},
    {Sector::kHealthcare, "Healthcare", "Health", "XLV"},
    {Sector::kBasicMaterials, "Basic Materials", "Mat", "XLB"},
    {Sector::kConsumer, "Consumer", "Con", "XLY"},
    {Sector::kIndustrial, "Industrial", "Ind", "XLI"},
    {Sector::kUtilities, "Utilities", "Util", "XLU"},
    {Sector::kNotSpecified, "Not Specified", "NotSpec", "SP500"},
}};

const SectorInfo& info(Sector s) {
  for (const auto& e : kSectorTable)
    if (e.sector == s) return e;
  throw Error(ErrorCode::kUnknownSector, "invalid sector value");
}

std::string squash(std::string_view s) {
  std::string out;
  for (char c : to_lower(s))
    if (c != ' ' && c != '_' && c != '-') out.push_back(c);
  return out;
}

}  // namespace

std::string_view sector_name(Sector s) { return info(s).name; }
std::string_view sector_short_name(Sector s) { return info(s).short_name; }
std::string_view reference_index(Sector s) { return info(s).index; }

Sector parse_sector(std::string_view text) {
  const std::string key = squash(text);
  for (const auto& e : kSectorTable) {
    if (key == squash(e.name) || key == squash(e.short_name)) return e.sector;
  }
  throw Error(ErrorCode::kUnknownSector, "unknown sector '" + std::string(text) + "'");
}

namespace {

TranscriptRecord parse_record(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kSchemaViolation, "not a JSON object");
  auto field = [&](const char* name) -> const nlohmann::json& {
    auto it = j.find(name);
    if (it == j.end() || it->is_null()) {
      throw Error(ErrorCode::kSchemaViolation, std::string("missing field '") + name + "'");
    }
    return *it;
  };
  auto string_field = [&](const char* name) {
    const auto& v = field(name);
    if (!v.is_string()) {
      throw Error(ErrorCode::kSchemaViolation, std::string("field '") + name + "' must be a string");
    }
    return v.get<std::string>();
  };
  auto int_field = [&](const char* name) {
    const auto& v = field(name);
    if (!v.is_number_integer()) {
      throw Error(ErrorCode::kSchemaViolation, std::string("field '") + name + "' must be an integer");
    }
    return v.get<long>();
  };

  TranscriptRecord r;
  r.id = trim(string_field("id"));
  r.ticker = trim(string_field("ticker"));
  if (r.id.empty()) throw Error(ErrorCode::kSchemaViolation, "empty id");
  if (r.ticker.empty()) throw Error(ErrorCode::kSchemaViolation, "empty ticker");
  try {
    r.call_date = parse_date(string_field("date"));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kSchemaViolation) throw;
    throw Error(ErrorCode::kSchemaViolation, e.what());
  }
  try {
    r.sector = parse_sector(string_field("sector"));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kSchemaViolation) throw;
    throw Error(ErrorCode::kSchemaViolation, e.what());
  }
  const long quarter = int_field("quarter");
  if (quarter < 1 || quarter > 4) {
    throw Error(ErrorCode::kSchemaViolation,
                "quarter must be 1..4, got " + std::to_string(quarter));
  }
  r.quarter = static_cast<int>(quarter);
  r.fiscal_year = static_cast<int>(int_field("fiscal_year"));
  r.text = string_field("text");
  if (trim(r.text).empty()) throw Error(ErrorCode::kSchemaViolation, "empty text");
  return r;
}

}  // namespace

TranscriptLoad parse_transcripts(std::string_view jsonl) {
  TranscriptLoad out;
  std::set<std::pair<std::string, Date>> seen_calls;
  std::set<std::string> seen_ids;
  std::size_t pos = 0, line_no = 0;
  while (pos < jsonl.size()) {
    std::size_t end = jsonl.find('\n', pos);
    if (end == std::string_view::npos) end = jsonl.size();
    const std::string_view line = jsonl.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (trim(line).empty()) continue;
    ++out.lines;
    try {
      const auto j = nlohmann::json::parse(line);
      TranscriptRecord r = parse_record(j);
      if (!seen_ids.insert(r.id).second) {
        throw Error(ErrorCode::kSchemaViolation, "duplicate id '" + r.id + "'");
      }
      if (!seen_calls.insert({r.ticker, r.call_date}).second) {
        throw Error(ErrorCode::kSchemaViolation,
                    "duplicate call " + r.ticker + " on " + format_date(r.call_date));
      }
      out.records.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      out.errors.push_back({line_no, std::string("SchemaViolation: invalid JSON: ") + e.what()});
    } catch (const Error& e) {
      out.errors.push_back({line_no, e.what()});
    }
  }
  return out;
}

TranscriptLoad load_transcripts(const std::string& path) {
  return parse_transcripts(read_file(path));
}

std::string to_jsonl(const std::vector<TranscriptRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    nlohmann::ordered_json j;
    j["id"] = r.id;
    j["ticker"] = r.ticker;
    j["date"] = format_date(r.call_date);
    j["sector"] = std::string(sector_name(r.sector));
    j["quarter"] = r.quarter;
    j["fiscal_year"] = r.fiscal_year;
    j["text"] = r.text;
    out += j.dump() + '\n';
  }
  return out;
}

TokenStream tokenize(std::string_view text) {
  TokenStream tokens;
  std::string current;
  auto flush = [&] {
    std::size_t b = 0, e = current.size();
    while (b < e && current[b] == '\'') ++b;
    while (e > b && current[e - 1] == '\'') --e;
    std::string word = current.substr(b, e - b);
    current.clear();
    if (word.empty()) return;
    for (char c : word)
      if (c >= '0' && c <= '9') return;
    tokens.push_back(std::move(word));
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const unsigned char c = static_cast<unsigned char>(text[i]);
    if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '\'') {
      current.push_back(static_cast<char>(c));
    } else if (c >= 'A' && c <= 'Z') {
      current.push_back(static_cast<char>(c - 'A' + 'a'));
    } else if (c == 0xE2 && i + 2 < text.size() &&
               static_cast<unsigned char>(text[i + 1]) == 0x80 &&
               static_cast<unsigned char>(text[i + 2]) == 0x99) {
      current.push_back('\'');  // U+2019 right single quotation mark
      i += 2;
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

std::string join_tokens(const TokenStream& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

}  // namespace ecpipe
