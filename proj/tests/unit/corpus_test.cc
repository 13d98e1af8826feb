#include "ecpipe/corpus.h"

#include <gtest/gtest.h>

#include "test_util.h"

namespace ecpipe {
namespace {

using testing::error_code_of;

std::string line(const std::string& id, const std::string& ticker, const std::string& date,
                 const std::string& sector, int quarter, const std::string& text = "Good quarter.") {
  return R"({"id":")" + id + R"(","ticker":")" + ticker + R"(","date":")" + date +
         R"(","sector":")" + sector + R"(","quarter":)" + std::to_string(quarter) +
         R"(,"fiscal_year":2019,"text":")" + text + "\"}\n";
}

TEST(Transcripts, WellFormedFile) {
  const auto load = parse_transcripts(line("a", "AAA", "2019-01-02", "Technology", 1) +
                                      line("b", "BBB", "2019-01-02", "Financial", 2) +
                                      line("c", "AAA", "2019-04-02", "Technology", 3));
  EXPECT_EQ(load.records.size(), 3u);
  EXPECT_TRUE(load.errors.empty());
  EXPECT_EQ(load.lines, 3u);
}

TEST(Transcripts, ShortSectorNameNormalized) {
  const auto load = parse_transcripts(line("a", "AAA", "2019-01-02", "Tech", 1));
  ASSERT_EQ(load.records.size(), 1u);
  EXPECT_EQ(load.records[0].sector, Sector::kTechnology);
}

TEST(Transcripts, BadLinesReportedOthersKept) {
  const auto load = parse_transcripts(line("a", "AAA", "2019-01-02", "Tech", 5) +
                                      line("b", "BBB", "2019-01-02", "Tech", 1) +
                                      line("c", "CCC", "2019-13-02", "Tech", 1) +
                                      line("d", "DDD", "2019-01-02", "Crypto", 1) +
                                      line("e", "EEE", "2019-01-02", "Tech", 1, "   ") +
                                      "{not json}\n" +
                                      line("f", "BBB", "2019-01-02", "Tech", 2) +
                                      line("b", "GGG", "2019-02-02", "Tech", 2));
  ASSERT_EQ(load.records.size(), 1u);
  EXPECT_EQ(load.records[0].id, "b");
  EXPECT_EQ(load.errors.size(), 7u);
  EXPECT_EQ(load.errors[0].line, 1u);
  EXPECT_EQ(load.records.size() + load.errors.size(), load.lines);
}

TEST(Transcripts, JsonlRoundTrip) {
  const auto first = parse_transcripts(line("a", "AAA", "2019-01-02", "Basic Materials", 4, "It\\u2019s \\\"fine\\\"."));
  ASSERT_EQ(first.records.size(), 1u);
  const auto again = parse_transcripts(to_jsonl(first.records));
  ASSERT_EQ(again.records.size(), 1u);
  EXPECT_EQ(again.records[0].text, first.records[0].text);
  EXPECT_EQ(again.records[0].sector, Sector::kBasicMaterials);
}

TEST(Transcripts, UnreadableFile) {
  EXPECT_EQ(error_code_of([] { load_transcripts("/nonexistent/x.jsonl"); }), ErrorCode::kFileUnreadable);
}

TEST(Tokenize, Examples) {
  EXPECT_EQ(tokenize("Revenue grew 15% \xE2\x80\x94 great quarter!"),
            (TokenStream{"revenue", "grew", "great", "quarter"}));
  EXPECT_TRUE(tokenize("").empty());
  EXPECT_EQ(tokenize("Q3 EBITDA margin"), (TokenStream{"ebitda", "margin"}));
}

TEST(Tokenize, Apostrophes) {
  EXPECT_EQ(tokenize("We're 'quoted' it\xE2\x80\x99s"), (TokenStream{"we're", "quoted", "it's"}));
}

TEST(Tokenize, IdempotentOnJoinedOutput) {
  for (const char* text : {"Hello, World! 2019 was great's", "A-B c_d   e'f''", "\xC3\xA9t\xC3\xA9 x"}) {
    const auto once = tokenize(text);
    EXPECT_EQ(tokenize(join_tokens(once)), once);
  }
}

TEST(Sectors, ReferenceIndexTable) {
  EXPECT_EQ(reference_index(Sector::kTechnology), "XLK");
  EXPECT_EQ(reference_index(Sector::kUtilities), "XLU");
  EXPECT_EQ(reference_index(Sector::kNotSpecified), "SP500");
  EXPECT_EQ(reference_index(Sector::kServices), "IYC");
  EXPECT_EQ(reference_index(Sector::kFinancial), "XLF");
  EXPECT_EQ(reference_index(Sector::kHealthcare), "XLV");
  EXPECT_EQ(reference_index(Sector::kBasicMaterials), "XLB");
  EXPECT_EQ(reference_index(Sector::kConsumer), "XLY");
  EXPECT_EQ(reference_index(Sector::kIndustrial), "XLI");
}

TEST(Sectors, ParseFullAndShortNames) {
  for (Sector s : kAllSectors) {
    EXPECT_EQ(parse_sector(sector_name(s)), s);
    EXPECT_EQ(parse_sector(sector_short_name(s)), s);
  }
  EXPECT_EQ(parse_sector("basic materials"), Sector::kBasicMaterials);
  EXPECT_EQ(error_code_of([] { parse_sector("Crypto"); }), ErrorCode::kUnknownSector);
}

}  // namespace
}  // namespace ecpipe
