#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ecpipe/corpus.h"
#include "ecpipe/matrix.h"

namespace ecpipe {

inline constexpr int kDefaultGraphWindow = 3;
inline constexpr std::uint64_t kDefaultFeatureSeed = 17;
inline constexpr double kFallbackFeatureRange = 0.05;

// Symmetric 0/1 adjacency without self-loops, stored as sorted neighbor lists.
class Adjacency {
 public:
  Adjacency() = default;
  explicit Adjacency(std::size_t n) : neighbors_(n) {}

  // Idempotent; self-loops are ignored.
  void add_edge(std::size_t u, std::size_t v);

  std::size_t num_nodes() const { return neighbors_.size(); }
  std::size_t num_edges() const;
  bool has_edge(std::size_t u, std::size_t v) const;
  const std::vector<std::uint32_t>& neighbors(std::size_t u) const {
    return neighbors_[u];
  }
  std::size_t degree(std::size_t u) const { return neighbors_[u].size(); }

  // A * x for an n x d matrix x.
  Matrix multiply(const Matrix& x) const;
  Matrix dense() const;
  // Relabels node i as perm[i].
  Adjacency permuted(const std::vector<std::size_t>& perm) const;

 private:
  std::vector<std::vector<std::uint32_t>> neighbors_;
};

struct TextGraph {
  std::vector<std::string> nodes;  // first-occurrence order
  Adjacency adjacency;
  Matrix node_features;  // |V| x d once attached, empty before

  std::size_t num_nodes() const { return nodes.size(); }
};

// Unique words become nodes; two words are joined when some occurrences lie
// at most `window` positions apart. Throws kEmptyDocument on no tokens and
// kInvalidConfig for window < 1.
TextGraph build_text_graph(const TokenStream& tokens,
                           int window = kDefaultGraphWindow);

// Word vectors keyed by word, all of one dimension.
class EmbeddingTable {
 public:
  explicit EmbeddingTable(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return rows_.size(); }
  // Throws kDimensionMismatch if vector.size() != dim().
  void add(std::string word, std::vector<double> vector);
  const std::vector<double>* find(const std::string& word) const;

 private:
  std::size_t dim_;
  std::unordered_map<std::string, std::vector<double>> rows_;
};

// Plain-text vectors: each line is a word followed by `dim` reals separated by
// spaces. Dimension is taken from the first line. Throws kFileUnreadable,
// kParseError, kDimensionMismatch.
EmbeddingTable load_embedding_table(const std::string& path);
EmbeddingTable parse_embedding_table(std::string_view text);

// Deterministic stand-in for a word missing from the table: uniform in
// [-0.05, 0.05], derived from (word, seed) only, so the same word gets the
// same vector in every document and every run.
std::vector<double> fallback_vector(const std::string& word, std::size_t dim,
                                    std::uint64_t seed);

// Fills node_features from `table`, falling back per missing word. Throws
// kDimensionMismatch if table.dim() != dim.
void attach_features(TextGraph& graph, const EmbeddingTable& table,
                     std::size_t dim, std::uint64_t seed = kDefaultFeatureSeed);
// Fallback vectors for every node (no pre-trained table).
void attach_fallback_features(TextGraph& graph, std::size_t dim,
                              std::uint64_t seed = kDefaultFeatureSeed);

}  // namespace ecpipe
