#pragma once

#include "ecpipe/fundamentals.h"
#include "ecpipe/harness.h"
#include "ecpipe/recommendations.h"
#include "ecpipe/synthetic.h"

namespace ecpipe::testing {

inline PipelineInputs inputs_from(const SyntheticData& data) {
  PipelineInputs in;
  in.transcripts = data.transcripts;
  in.prices = parse_price_csv(data.prices_csv);
  in.recommendations = parse_recommendations_csv(data.recommendations_csv);
  in.fundamentals = parse_fundamentals_csv(data.fundamentals_csv);
  in.lexicon = bundled_lexicon();
  return in;
}

// Small enough for one core: two sectors, tiny embeddings, few epochs.
inline ExperimentConfig small_config() {
  ExperimentConfig c;
  c.sectors = {Sector::kFinancial, Sector::kTechnology};
  c.seeds = {0, 1};
  c.min_seeds = 2;
  c.min_examples = 5;
  c.graph.feature_dim = 8;
  c.gnn.graph_embedding_dim = 8;
  c.gnn.head_hidden = 8;
  c.gnn.doc_dim = 8;
  c.gnn.epochs = 5;
  c.gnn.batch_size = 16;
  c.gnn.learning_rate = 0.2;
  c.doc2vec.dims = {8, 16};
  c.doc2vec.epochs = 5;
  c.doc2vec.infer_steps = 5;
  c.doc2vec.learning_rate = 0.05;
  c.classifier.head.max_iterations = 300;
  c.classifier.head.epochs = 30;
  c.classifier.mlp_hidden_by_dim = {8, 8, 8};
  return c;
}

inline SyntheticSpec small_spec(std::uint64_t seed = 0) {
  SyntheticSpec s;
  s.seed = seed;
  s.sectors = {Sector::kFinancial, Sector::kTechnology};
  s.tickers_per_sector = 3;
  s.words_per_doc = 60;
  return s;
}

}  // namespace ecpipe::testing
