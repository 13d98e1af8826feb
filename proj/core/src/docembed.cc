#include "ecpipe/docembed.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <json.hpp>

#include "ecpipe/autodiff.h"
#include "ecpipe/csv.h"
#include "ecpipe/error.h"
#include "ecpipe/rng.h"

namespace ecpipe {

std::optional<std::uint32_t> Vocab::find(const std::string& word) const {
  auto it = index_.find(word);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::uint32_t> Vocab::encode(const TokenStream& tokens) const {
  std::vector<std::uint32_t> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens)
    if (auto id = find(t)) ids.push_back(*id);
  return ids;
}

Vocab Vocab::from_parts(std::vector<std::string> words,
                        std::vector<std::size_t> counts, std::size_t min_count) {
  if (words.size() != counts.size()) {
    throw Error(ErrorCode::kSchemaViolation, "vocab words/counts length mismatch");
  }
  Vocab v;
  v.words_ = std::move(words);
  v.counts_ = std::move(counts);
  v.min_count_ = min_count;
  for (std::uint32_t i = 0; i < v.words_.size(); ++i) v.index_.emplace(v.words_[i], i);
  return v;
}

Vocab build_vocab(std::span<const TokenStream> corpus, std::size_t min_count) {
  std::map<std::string, std::size_t> counts;
  for (const auto& doc : corpus)
    for (const auto& t : doc) ++counts[t];
  std::vector<std::pair<std::string, std::size_t>> kept;
  for (auto& [w, c] : counts)
    if (c >= min_count) kept.emplace_back(w, c);
  if (kept.empty()) {
    throw Error(ErrorCode::kEmptyVocab,
                "no word occurs at least " + std::to_string(min_count) + " times");
  }
  std::stable_sort(kept.begin(), kept.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> words;
  std::vector<std::size_t> freq;
  for (auto& [w, c] : kept) {
    words.push_back(w);
    freq.push_back(c);
  }
  return Vocab::from_parts(std::move(words), std::move(freq), min_count);
}

std::optional<std::vector<double>> DocEmbeddings::vector_for(const std::string& id) const {
  for (std::size_t i = 0; i < doc_ids.size(); ++i) {
    if (doc_ids[i] == id) {
      auto row = doc_vectors.row(i);
      return std::vector<double>(row.begin(), row.end());
    }
  }
  return std::nullopt;
}

namespace {

// Cumulative unigram^0.75 weights for negative draws.
class NegativeSampler {
 public:
  explicit NegativeSampler(const Vocab& vocab) {
    double total = 0.0;
    for (std::size_t c : vocab.counts()) {
      total += std::pow(static_cast<double>(c), 0.75);
      cumulative_.push_back(total);
    }
  }

  std::uint32_t draw(Rng& rng) const {
    const double u = rng.uniform() * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    return static_cast<std::uint32_t>(it - cumulative_.begin());
  }

  // A sample different from `target`, or nullopt for a one-word vocabulary.
  std::optional<std::uint32_t> draw_excluding(Rng& rng, std::uint32_t target) const {
    if (cumulative_.size() < 2) return std::nullopt;
    for (int attempt = 0; attempt < 64; ++attempt) {
      const std::uint32_t w = draw(rng);
      if (w != target) return w;
    }
    return std::nullopt;
  }

 private:
  std::vector<double> cumulative_;
};

void validate(const Doc2VecConfig& c) {
  if (c.dim == 0 || c.negatives < 0 || c.window < 0 || c.epochs < 0 ||
      !(c.learning_rate >= 0.0) || !(c.min_learning_rate_ratio >= 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "bad Doc2Vec config");
  }
}

std::vector<double> initial_doc_vector(std::size_t dim, Rng& rng) {
  std::vector<double> v(dim);
  const double half = 0.5 / static_cast<double>(dim);
  for (double& x : v) x = rng.uniform(-half, half);
  return v;
}

double log_sigmoid(double x) {
  return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

// One pass of PV-DM over `ids`. When `update_words` is false only the
// document vector moves (inference). Returns the summed loss.
double pass(std::span<double> doc, Matrix& word_input, Matrix& word_output,
            const std::vector<std::uint32_t>& ids, const NegativeSampler& sampler,
            int window, int negatives, double lr, Rng& rng, bool update_words,
            bool apply) {
  const std::size_t dim = doc.size();
  std::vector<double> h(dim), err(dim);
  std::vector<std::uint32_t> context;
  double loss = 0.0;
  for (std::size_t pos = 0; pos < ids.size(); ++pos) {
    context.clear();
    const std::size_t lo = pos >= static_cast<std::size_t>(window) ? pos - window : 0;
    const std::size_t hi = std::min(ids.size(), pos + window + 1);
    for (std::size_t c = lo; c < hi; ++c)
      if (c != pos) context.push_back(ids[c]);
    const double scale = 1.0 / static_cast<double>(1 + context.size());
    std::copy(doc.begin(), doc.end(), h.begin());
    for (std::uint32_t w : context) {
      auto row = word_input.row(w);
      for (std::size_t j = 0; j < dim; ++j) h[j] += row[j];
    }
    for (double& x : h) x *= scale;
    std::fill(err.begin(), err.end(), 0.0);

    const std::uint32_t target = ids[pos];
    for (int s = 0; s <= negatives; ++s) {
      std::uint32_t word = target;
      double label = 1.0;
      if (s > 0) {
        auto neg = sampler.draw_excluding(rng, target);
        if (!neg) break;
        word = *neg;
        label = 0.0;
      }
      auto out = word_output.row(word);
      const double score = dot(h, out);
      loss -= label > 0.0 ? log_sigmoid(score) : log_sigmoid(-score);
      if (!apply) continue;
      const double g = (label - autodiff::sigmoid(score)) * lr;
      for (std::size_t j = 0; j < dim; ++j) err[j] += g * out[j];
      if (update_words)
        for (std::size_t j = 0; j < dim; ++j) out[j] += g * h[j];
    }
    if (!apply) continue;
    for (std::size_t j = 0; j < dim; ++j) doc[j] += err[j] * scale;
    if (update_words) {
      for (std::uint32_t w : context) {
        auto row = word_input.row(w);
        for (std::size_t j = 0; j < dim; ++j) row[j] += err[j] * scale;
      }
    }
  }
  return loss;
}

}  // namespace

DocEmbeddings train_pvdm(std::span<const TokenStream> corpus,
                         std::span<const std::string> doc_ids,
                         const Doc2VecConfig& config) {
  if (corpus.empty()) throw Error(ErrorCode::kEmptyVocab, "empty corpus");
  return train_pvdm(corpus, doc_ids, build_vocab(corpus, config.min_count), config);
}

DocEmbeddings train_pvdm(std::span<const TokenStream> corpus,
                         std::span<const std::string> doc_ids,
                         const Vocab& vocab, const Doc2VecConfig& config) {
  validate(config);
  if (corpus.size() != doc_ids.size()) {
    throw Error(ErrorCode::kShapeMismatch, "corpus and id list differ in length");
  }
  if (vocab.size() == 0) throw Error(ErrorCode::kEmptyVocab, "empty vocabulary");
  DocEmbeddings m;
  m.config = config;
  m.vocab = vocab;
  m.doc_ids.assign(doc_ids.begin(), doc_ids.end());
  const std::size_t dim = config.dim;
  Rng init(mix_seed(config.seed, 11));
  m.word_input = Matrix(vocab.size(), dim);
  const double half = 0.5 / static_cast<double>(dim);
  for (double& x : m.word_input.values()) x = init.uniform(-half, half);
  m.word_output = Matrix(vocab.size(), dim);
  m.doc_vectors = Matrix(corpus.size(), dim);
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    const auto v = initial_doc_vector(dim, init);
    std::copy(v.begin(), v.end(), m.doc_vectors.row(d).begin());
  }

  std::vector<std::vector<std::uint32_t>> encoded;
  encoded.reserve(corpus.size());
  for (const auto& doc : corpus) encoded.push_back(vocab.encode(doc));

  const NegativeSampler sampler(vocab);
  Rng rng(mix_seed(config.seed, 12));
  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);
  const double total_steps = static_cast<double>(config.epochs) * static_cast<double>(corpus.size());
  double done = 0.0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    double loss = 0.0;
    for (std::size_t d : order) {
      const double progress = total_steps > 0 ? done / total_steps : 0.0;
      const double lr = config.learning_rate *
                        std::max(config.min_learning_rate_ratio, 1.0 - progress);
      loss += pass(m.doc_vectors.row(d), m.word_input, m.word_output, encoded[d],
                   sampler, config.window, config.negatives, lr, rng, true, true);
      done += 1.0;
    }
    if (!std::isfinite(loss)) {
      throw Error(ErrorCode::kNonFiniteLoss,
                  "Doc2Vec epoch " + std::to_string(epoch) + " loss " + format_number(loss));
    }
    m.epoch_loss.push_back(loss);
  }
  return m;
}

double pvdm_objective(const DocEmbeddings& model, std::size_t doc_row,
                      const TokenStream& tokens, std::uint64_t negative_seed) {
  DocEmbeddings copy = model;
  Rng rng(negative_seed);
  const NegativeSampler sampler(copy.vocab);
  return pass(copy.doc_vectors.row(doc_row), copy.word_input, copy.word_output,
              copy.vocab.encode(tokens), sampler, copy.config.window,
              copy.config.negatives, 0.0, rng, false, false);
}

double pvdm_sgd_pass(DocEmbeddings& model, std::size_t doc_row,
                     const TokenStream& tokens, double learning_rate,
                     std::uint64_t negative_seed) {
  Rng rng(negative_seed);
  const NegativeSampler sampler(model.vocab);
  return pass(model.doc_vectors.row(doc_row), model.word_input, model.word_output,
              model.vocab.encode(tokens), sampler, model.config.window,
              model.config.negatives, learning_rate, rng, true, true);
}

InferredVector infer_vector(const TokenStream& doc, const DocEmbeddings& model,
                            int steps, std::uint64_t seed,
                            std::optional<double> learning_rate) {
  const std::size_t dim = model.config.dim;
  Rng rng(mix_seed(seed, 13));
  InferredVector out;
  out.values = initial_doc_vector(dim, rng);
  const auto ids = model.vocab.encode(doc);
  if (ids.empty()) {
    out.all_oov = true;
    return out;
  }
  if (steps <= 0) return out;
  const double lr0 = learning_rate.value_or(model.config.learning_rate);
  // The word matrices are read-only here; pass() only writes them when
  // update_words is set.
  Matrix& input = const_cast<Matrix&>(model.word_input);
  Matrix& output = const_cast<Matrix&>(model.word_output);
  const NegativeSampler sampler(model.vocab);
  for (int s = 0; s < steps; ++s) {
    const double lr = lr0 * std::max(model.config.min_learning_rate_ratio,
                                     1.0 - static_cast<double>(s) / steps);
    pass(out.values, input, output, ids, sampler, model.config.window,
         model.config.negatives, lr, rng, false, true);
  }
  return out;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  const double na = norm2(a), nb = norm2(b);
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot(a, b) / (na * nb);
}

namespace {

nlohmann::ordered_json matrix_rows(const Matrix& m) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    rows.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return rows;
}

Matrix matrix_from_rows(const nlohmann::json& rows, std::size_t cols) {
  Matrix m(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto v = rows[r].get<std::vector<double>>();
    if (v.size() != cols) throw Error(ErrorCode::kDimensionMismatch, "embedding row width");
    std::copy(v.begin(), v.end(), m.row(r).begin());
  }
  return m;
}

}  // namespace

std::string embedding_store_to_string(const DocEmbeddings& model) {
  const auto& c = model.config;
  nlohmann::ordered_json j;
  j["format"] = "ecpipe.docembed";
  j["version"] = 1;
  j["dim"] = c.dim;
  j["vocab_size"] = model.vocab.size();
  j["seed"] = c.seed;
  j["config"] = {{"learning_rate", c.learning_rate},
                 {"min_learning_rate_ratio", c.min_learning_rate_ratio},
                 {"negatives", c.negatives},
                 {"window", c.window},
                 {"epochs", c.epochs},
                 {"min_count", c.min_count}};
  nlohmann::ordered_json docs = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < model.doc_ids.size(); ++i) {
    auto row = model.doc_vectors.row(i);
    docs[model.doc_ids[i]] = std::vector<double>(row.begin(), row.end());
  }
  j["documents"] = std::move(docs);
  j["vocab"] = model.vocab.words();
  j["counts"] = model.vocab.counts();
  j["word_input"] = matrix_rows(model.word_input);
  j["word_output"] = matrix_rows(model.word_output);
  j["epoch_loss"] = model.epoch_loss;
  return j.dump() + "\n";
}

DocEmbeddings embedding_store_from_string(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.at("format").get<std::string>() != "ecpipe.docembed" ||
        j.at("version").get<int>() != 1) {
      throw Error(ErrorCode::kSchemaViolation, "not an ecpipe embedding store");
    }
    DocEmbeddings m;
    const auto& c = j.at("config");
    m.config.dim = j.at("dim").get<std::size_t>();
    m.config.seed = j.at("seed").get<std::uint64_t>();
    m.config.learning_rate = c.at("learning_rate").get<double>();
    m.config.min_learning_rate_ratio = c.at("min_learning_rate_ratio").get<double>();
    m.config.negatives = c.at("negatives").get<int>();
    m.config.window = c.at("window").get<int>();
    m.config.epochs = c.at("epochs").get<int>();
    m.config.min_count = c.at("min_count").get<std::size_t>();
    m.vocab = Vocab::from_parts(j.at("vocab").get<std::vector<std::string>>(),
                                j.at("counts").get<std::vector<std::size_t>>(),
                                m.config.min_count);
    // nlohmann::json (unordered) sorts object keys; keep file order instead.
    const auto ordered = nlohmann::ordered_json::parse(text);
    const auto& docs = ordered.at("documents");
    m.doc_vectors = Matrix(docs.size(), m.config.dim);
    std::size_t r = 0;
    for (auto it = docs.begin(); it != docs.end(); ++it, ++r) {
      m.doc_ids.push_back(it.key());
      const auto v = it.value().get<std::vector<double>>();
      if (v.size() != m.config.dim) {
        throw Error(ErrorCode::kDimensionMismatch, "document vector for " + it.key());
      }
      std::copy(v.begin(), v.end(), m.doc_vectors.row(r).begin());
    }
    m.word_input = matrix_from_rows(j.at("word_input"), m.config.dim);
    m.word_output = matrix_from_rows(j.at("word_output"), m.config.dim);
    m.epoch_loss = j.at("epoch_loss").get<std::vector<double>>();
    if (m.word_input.rows() != m.vocab.size() || m.word_output.rows() != m.vocab.size()) {
      throw Error(ErrorCode::kDimensionMismatch, "word matrices do not match vocab");
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchemaViolation, std::string("embedding store: ") + e.what());
  }
}

void save_embedding_store(const std::string& path, const DocEmbeddings& model) {
  write_file(path, embedding_store_to_string(model));
}

DocEmbeddings load_embedding_store(const std::string& path) {
  return embedding_store_from_string(read_file(path));
}

}  // namespace ecpipe
