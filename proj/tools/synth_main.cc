#include <exception>
#include <filesystem>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "ecpipe/csv.h"
#include "ecpipe/error.h"
#include "ecpipe/experiment_config.h"
#include "ecpipe/synthetic.h"
#include "ecpipe/textgraph.h"

namespace fs = std::filesystem;

// Writes a synthetic corpus with planted labels, stand-in word vectors and a
// small experiment config that the ecpipe tool can run directly.
int main(int argc, char** argv) {
  CLI::App app{"Generate a synthetic earnings-call dataset"};
  std::string out_dir = "sample";
  ecpipe::SyntheticSpec spec;
  spec.sectors = {ecpipe::Sector::kFinancial, ecpipe::Sector::kTechnology};
  spec.tickers_per_sector = 10;
  spec.words_per_doc = 40;
  std::size_t vector_dim = 16;
  app.add_option("--out-dir", out_dir, "Output directory")->capture_default_str();
  app.add_option("--seed", spec.seed, "Generator seed")->capture_default_str();
  app.add_option("--tickers", spec.tickers_per_sector, "Tickers per sector")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--words", spec.words_per_doc, "Words per transcript")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--signal", spec.signal, "Probability that markers agree with the label")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  app.add_option("--vector-dim", vector_dim, "Dimension of the stand-in word vectors")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  try {
    fs::create_directories(out_dir);
    auto out = [&](const char* name) { return (fs::path(out_dir) / name).string(); };
    const auto data = ecpipe::generate_synthetic(spec);
    ecpipe::write_file(out("transcripts.jsonl"), data.transcripts_jsonl);
    ecpipe::write_file(out("prices.csv"), data.prices_csv);
    ecpipe::write_file(out("recommendations.csv"), data.recommendations_csv);
    ecpipe::write_file(out("fundamentals.csv"), data.fundamentals_csv);

    // Fallback vectors rescaled to unit range stand in for pre-trained ones.
    std::set<std::string> words;
    for (const auto& t : data.transcripts) {
      for (auto& w : ecpipe::tokenize(t.text)) words.insert(std::move(w));
    }
    std::ostringstream vectors;
    for (const auto& w : words) {
      vectors << w;
      for (double x : ecpipe::fallback_vector(w, vector_dim, spec.seed))
        vectors << ' ' << ecpipe::format_number(x / ecpipe::kFallbackFeatureRange, 9);
      vectors << '\n';
    }
    ecpipe::write_file(out("word_vectors.txt"), vectors.str());

    ecpipe::ExperimentConfig c;
    c.sectors = spec.sectors;
    c.methods.assign(std::begin(ecpipe::kAllMethods), std::end(ecpipe::kAllMethods));
    c.seeds = {0, 1, 2};
    c.min_seeds = 3;
    c.min_examples = 10;
    c.inputs = {.transcripts = "transcripts.jsonl",
                .prices = "prices.csv",
                .recommendations = "recommendations.csv",
                .fundamentals = "fundamentals.csv",
                .word_vectors = "word_vectors.txt"};
    c.graph.feature_dim = vector_dim;
    c.gnn.graph_embedding_dim = 16;
    c.gnn.head_hidden = 16;
    c.gnn.doc_dim = 16;
    c.gnn.batch_size = 16;
    c.gnn.learning_rate = 0.2;
    c.gnn.epochs = 30;
    c.doc2vec.dims = {8, 16};
    c.doc2vec.learning_rate = 0.05;
    c.doc2vec.epochs = 30;
    c.doc2vec.infer_steps = 10;
    c.classifier.mlp_hidden_by_dim = {8, 8, 8};
    c.validate();
    ecpipe::write_file(out("config.json"), ecpipe::experiment_config_to_json(c, 2) + "\n");
    std::cout << out_dir << '\n';
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
