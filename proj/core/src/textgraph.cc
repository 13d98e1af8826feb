#include "ecpipe/textgraph.h"

#include <algorithm>
#include <optional>
#include <sstream>

#include "ecpipe/csv.h"
#include "ecpipe/error.h"
#include "ecpipe/rng.h"

namespace ecpipe {

void Adjacency::add_edge(std::size_t u, std::size_t v) {
  if (u == v) return;
  auto insert = [](std::vector<std::uint32_t>& list, std::uint32_t x) {
    auto it = std::lower_bound(list.begin(), list.end(), x);
    if (it == list.end() || *it != x) list.insert(it, x);
  };
  insert(neighbors_[u], static_cast<std::uint32_t>(v));
  insert(neighbors_[v], static_cast<std::uint32_t>(u));
}

std::size_t Adjacency::num_edges() const {
  std::size_t twice = 0;
  for (const auto& n : neighbors_) twice += n.size();
  return twice / 2;
}

bool Adjacency::has_edge(std::size_t u, std::size_t v) const {
  const auto& list = neighbors_[u];
  return std::binary_search(list.begin(), list.end(), static_cast<std::uint32_t>(v));
}

Matrix Adjacency::multiply(const Matrix& x) const {
  if (x.rows() != neighbors_.size()) {
    throw Error(ErrorCode::kShapeMismatch,
                "adjacency has " + std::to_string(neighbors_.size()) +
                    " nodes, features have " + std::to_string(x.rows()) + " rows");
  }
  Matrix out(x.rows(), x.cols());
  for (std::size_t u = 0; u < neighbors_.size(); ++u) {
    auto dst = out.row(u);
    for (std::uint32_t v : neighbors_[u]) {
      auto src = x.row(v);
      for (std::size_t j = 0; j < src.size(); ++j) dst[j] += src[j];
    }
  }
  return out;
}

Matrix Adjacency::dense() const {
  Matrix a(neighbors_.size(), neighbors_.size());
  for (std::size_t u = 0; u < neighbors_.size(); ++u)
    for (std::uint32_t v : neighbors_[u]) a(u, v) = 1.0;
  return a;
}

Adjacency Adjacency::permuted(const std::vector<std::size_t>& perm) const {
  Adjacency out(neighbors_.size());
  for (std::size_t u = 0; u < neighbors_.size(); ++u)
    for (std::uint32_t v : neighbors_[u]) out.add_edge(perm[u], perm[v]);
  return out;
}

TextGraph build_text_graph(const TokenStream& tokens, int window) {
  if (window < 1) {
    throw Error(ErrorCode::kInvalidConfig, "graph window must be >= 1");
  }
  if (tokens.empty()) throw Error(ErrorCode::kEmptyDocument, "no tokens");
  TextGraph g;
  std::unordered_map<std::string, std::uint32_t> index;
  std::vector<std::uint32_t> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) {
    auto [it, inserted] = index.try_emplace(t, static_cast<std::uint32_t>(g.nodes.size()));
    if (inserted) g.nodes.push_back(t);
    ids.push_back(it->second);
  }
  g.adjacency = Adjacency(g.nodes.size());
  const std::size_t w = static_cast<std::size_t>(window);
  for (std::size_t i = 0; i < ids.size(); ++i)
    for (std::size_t j = i + 1; j < ids.size() && j <= i + w; ++j)
      g.adjacency.add_edge(ids[i], ids[j]);
  return g;
}

void EmbeddingTable::add(std::string word, std::vector<double> vector) {
  if (vector.size() != dim_) {
    throw Error(ErrorCode::kDimensionMismatch,
                "vector for '" + word + "' has " + std::to_string(vector.size()) +
                    " entries, table dimension is " + std::to_string(dim_));
  }
  rows_.insert_or_assign(std::move(word), std::move(vector));
}

const std::vector<double>* EmbeddingTable::find(const std::string& word) const {
  auto it = rows_.find(word);
  return it == rows_.end() ? nullptr : &it->second;
}

EmbeddingTable parse_embedding_table(std::string_view text) {
  std::optional<EmbeddingTable> table;
  std::size_t pos = 0, line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    std::istringstream in(line);
    std::string word, field;
    in >> word;
    std::vector<double> values;
    while (in >> field) {
      try {
        values.push_back(parse_double(field));
      } catch (const Error&) {
        throw Error(ErrorCode::kParseError,
                    "line " + std::to_string(line_no) + ": bad value '" + field + "'");
      }
    }
    if (values.empty()) {
      throw Error(ErrorCode::kParseError, "line " + std::to_string(line_no) + ": no values");
    }
    if (!table) table.emplace(values.size());
    try {
      table->add(std::move(word), std::move(values));
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!table) throw Error(ErrorCode::kParseError, "embedding table is empty");
  return std::move(*table);
}

EmbeddingTable load_embedding_table(const std::string& path) {
  return parse_embedding_table(read_file(path));
}

std::vector<double> fallback_vector(const std::string& word, std::size_t dim,
                                    std::uint64_t seed) {
  Rng rng(mix_seed(fnv1a64_str(word), seed));
  std::vector<double> v(dim);
  for (double& x : v) x = rng.uniform(-kFallbackFeatureRange, kFallbackFeatureRange);
  return v;
}

void attach_features(TextGraph& graph, const EmbeddingTable& table,
                     std::size_t dim, std::uint64_t seed) {
  if (table.dim() != dim) {
    throw Error(ErrorCode::kDimensionMismatch,
                "embedding table dimension " + std::to_string(table.dim()) +
                    " != expected " + std::to_string(dim));
  }
  Matrix features(graph.num_nodes(), dim);
  for (std::size_t i = 0; i < graph.num_nodes(); ++i) {
    const auto* row = table.find(graph.nodes[i]);
    const std::vector<double> v = row ? *row : fallback_vector(graph.nodes[i], dim, seed);
    std::copy(v.begin(), v.end(), features.row(i).begin());
  }
  graph.node_features = std::move(features);
}

void attach_fallback_features(TextGraph& graph, std::size_t dim, std::uint64_t seed) {
  attach_features(graph, EmbeddingTable(dim), dim, seed);
}

}  // namespace ecpipe
