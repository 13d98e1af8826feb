#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ecpipe/corpus.h"

namespace ecpipe {

// Parameters of the synthetic market. Every call gets a latent direction;
// the stock moves with it (large enough to define SBL at the default tau,
// and against the sector index for five days so IBL(5) is defined), and the
// transcript carries marker words that agree with it with probability
// `signal`.
struct SyntheticSpec {
  std::uint64_t seed = 0;
  std::vector<Sector> sectors = {Sector::kFinancial, Sector::kHealthcare,
                                 Sector::kBasicMaterials, Sector::kServices,
                                 Sector::kTechnology};
  int tickers_per_sector = 4;
  int first_year = 2016;
  int last_year = 2019;
  std::size_t words_per_doc = 120;
  double signal = 0.9;
  // Fraction of calls without a fundamentals row, and of fundamentals rows
  // missing an estimate.
  double fundamentals_missing = 0.15;
  double recommendations_per_call = 4.0;
};

struct SyntheticData {
  std::vector<TranscriptRecord> transcripts;
  std::vector<int> directions;  // latent label per transcript
  std::string transcripts_jsonl;
  std::string prices_csv;  // stocks and reference indices
  std::string recommendations_csv;
  std::string fundamentals_csv;
};

SyntheticData generate_synthetic(const SyntheticSpec& spec);

// Token documents whose label is planted by marker words: label-1 documents
// contain "alpha" markers and label-0 documents "omega" markers amid shared
// filler. With `shuffle_labels` the labels are permuted afterwards, breaking
// the link.
std::vector<std::pair<TokenStream, int>> marker_documents(std::size_t count,
                                                          std::size_t length,
                                                          std::uint64_t seed,
                                                          bool shuffle_labels = false);

}  // namespace ecpipe
