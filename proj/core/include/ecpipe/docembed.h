#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ecpipe/corpus.h"
#include "ecpipe/matrix.h"

namespace ecpipe {

inline constexpr std::size_t kDefaultMinCount = 2;
inline constexpr double kDefaultDoc2VecLearningRate = 0.001;
inline constexpr int kDefaultNegatives = 5;
inline constexpr int kDefaultDoc2VecWindow = 5;

class Vocab {
 public:
  Vocab() = default;

  std::size_t size() const { return words_.size(); }
  std::size_t min_count() const { return min_count_; }
  const std::vector<std::string>& words() const { return words_; }
  const std::vector<std::size_t>& counts() const { return counts_; }
  std::optional<std::uint32_t> find(const std::string& word) const;

  // Indices of in-vocabulary tokens, OOV tokens dropped.
  std::vector<std::uint32_t> encode(const TokenStream& tokens) const;

  static Vocab from_parts(std::vector<std::string> words,
                          std::vector<std::size_t> counts,
                          std::size_t min_count);

 private:
  std::vector<std::string> words_;
  std::vector<std::size_t> counts_;
  std::unordered_map<std::string, std::uint32_t> index_;
  std::size_t min_count_ = kDefaultMinCount;
};

// Words with total frequency >= min_count, ordered by descending count then
// lexicographically. Throws kEmptyVocab.
Vocab build_vocab(std::span<const TokenStream> corpus,
                  std::size_t min_count = kDefaultMinCount);

struct Doc2VecConfig {
  std::size_t dim = 100;
  double learning_rate = kDefaultDoc2VecLearningRate;
  // Learning rate decays linearly to learning_rate * min_learning_rate_ratio.
  double min_learning_rate_ratio = 1e-4;
  int negatives = kDefaultNegatives;
  int window = kDefaultDoc2VecWindow;
  int epochs = 20;
  std::size_t min_count = kDefaultMinCount;
  std::uint64_t seed = 0;
};

// Paragraph vectors (distributed memory, mean of context) trained with
// negative sampling. Rows of doc_vectors align with doc_ids.
struct DocEmbeddings {
  Doc2VecConfig config;
  Vocab vocab;
  std::vector<std::string> doc_ids;
  Matrix doc_vectors;  // docs x dim
  Matrix word_input;   // vocab x dim
  Matrix word_output;  // vocab x dim
  std::vector<double> epoch_loss;

  std::optional<std::vector<double>> vector_for(const std::string& id) const;
};

// Builds the vocabulary from `corpus` with config.min_count and trains.
// Throws kEmptyVocab, kNonFiniteLoss, kInvalidConfig.
DocEmbeddings train_pvdm(std::span<const TokenStream> corpus,
                         std::span<const std::string> doc_ids,
                         const Doc2VecConfig& config);
// Uses a prebuilt vocabulary.
DocEmbeddings train_pvdm(std::span<const TokenStream> corpus,
                         std::span<const std::string> doc_ids,
                         const Vocab& vocab, const Doc2VecConfig& config);

// Negative-sampling objective of one document, with negatives drawn from
// `negative_seed`. Used to check that a single pass lowers the loss.
double pvdm_objective(const DocEmbeddings& model, std::size_t doc_row,
                      const TokenStream& tokens, std::uint64_t negative_seed);
// One SGD pass over the document's positions at `learning_rate`, drawing the
// same negatives pvdm_objective would for `negative_seed`. Returns the loss
// accumulated before each update.
double pvdm_sgd_pass(DocEmbeddings& model, std::size_t doc_row,
                     const TokenStream& tokens, double learning_rate,
                     std::uint64_t negative_seed);

struct InferredVector {
  std::vector<double> values;
  bool all_oov = false;  // no known tokens: values is the initialization
};

// Fits a fresh document vector with the word matrices frozen. `steps` passes
// over the document; the learning rate decays like training.
InferredVector infer_vector(const TokenStream& doc, const DocEmbeddings& model,
                            int steps, std::uint64_t seed,
                            std::optional<double> learning_rate = std::nullopt);

double cosine_similarity(std::span<const double> a, std::span<const double> b);

// Embedding store file (JSON): header fields `format`, `version`, `dim`,
// `vocab_size`, `config`, `seed`, then `documents` {id: vector}, the
// vocabulary with counts, and both word matrices so vectors can be inferred
// for unseen documents.
std::string embedding_store_to_string(const DocEmbeddings& model);
DocEmbeddings embedding_store_from_string(std::string_view text);
void save_embedding_store(const std::string& path, const DocEmbeddings& model);
DocEmbeddings load_embedding_store(const std::string& path);

}  // namespace ecpipe
