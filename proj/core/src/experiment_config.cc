#include "ecpipe/experiment_config.h"

#include <filesystem>
#include <set>

#include <json.hpp>

#include "ecpipe/csv.h"
#include "ecpipe/error.h"

namespace ecpipe {

using nlohmann::json;

std::string_view method_name(Method m) {
  switch (m) {
    case Method::kStockGnn: return "StockGNN";
    case Method::kDeSvm: return "DEsvm";
    case Method::kDeLogReg: return "DElogreg";
    case Method::kDeMlp: return "DEmlp";
    case Method::kSeMlp: return "SE-mlp";
    case Method::kSentimentMlp: return "sentiment-mlp";
    case Method::kCombinedMlp: return "combined-mlp";
  }
  return "unknown";
}

Method parse_method(std::string_view text) {
  const std::string t = to_lower(trim(text));
  for (Method m : kAllMethods)
    if (to_lower(method_name(m)) == t) return m;
  throw Error(ErrorCode::kInvalidConfig, "unknown method '" + std::string(text) + "'");
}

bool uses_doc_embeddings(Method m) {
  return m == Method::kDeSvm || m == Method::kDeLogReg || m == Method::kDeMlp ||
         m == Method::kCombinedMlp;
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kInvalidConfig, what); };
  if (sectors.empty()) fail("no sectors selected");
  if (methods.empty()) fail("no methods selected");
  if (seeds.empty()) fail("no seeds");
  if (split.test_year <= split.train_max_year) fail("test year must follow training years");
  if (!(split.validation_fraction > 0.0 && split.validation_fraction < 1.0))
    fail("validation_fraction must lie in (0, 1)");
  if (graph.window < 1) fail("graph window must be >= 1");
  if (graph.feature_dim == 0) fail("graph feature_dim must be positive");
  if (gnn.steps < 1) fail("gnn steps must be >= 1");
  if (gnn.graph_embedding_dim == 0 || gnn.head_hidden == 0 || gnn.batch_size == 0)
    fail("gnn dimensions must be positive");
  if (!(gnn.learning_rate > 0.0) || gnn.epochs < 1) fail("bad gnn optimizer settings");
  if (doc2vec.dims.empty()) fail("doc2vec dims empty");
  for (std::size_t d : doc2vec.dims)
    if (d == 0) fail("doc2vec dims must be positive");
  if (doc2vec.epochs < 0 || doc2vec.infer_steps < 0 || doc2vec.negatives < 0)
    fail("bad doc2vec settings");
  if (classifier.mlp_hidden_by_dim.size() != 3) fail("mlp_hidden_by_dim needs 3 widths");
  if (label.kind == LabelKind::Kind::kIndex && (label.k < 3 || label.k > 5))
    fail("IBL k must be 3, 4 or 5");
  if (label.kind == LabelKind::Kind::kShock && !(label.tau >= 0.0)) fail("tau must be >= 0");
  if (max_gap_days < 1) fail("max_gap_days must be >= 1");
}

namespace {

// Reads only the keys listed; anything else in `obj` is an error so typos do
// not silently fall back to defaults.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw Error(ErrorCode::kInvalidConfig, path_ + " must be an object");
  }
  ~ObjectReader() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (auto it = obj_.begin(); it != obj_.end(); ++it)
      if (!seen_.contains(it.key()))
        throw Error(ErrorCode::kInvalidConfig, "unknown key " + path_ + "." + it.key());
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    auto it = obj_.find(key);
    if (it == obj_.end()) return;
    try {
      out = it->get<T>();
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kInvalidConfig, path_ + "." + key + ": " + e.what());
    }
  }

  const json* child(const char* key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

std::string resolve(const std::string& base, const std::string& p) {
  if (p.empty() || base.empty() || std::filesystem::path(p).is_absolute()) return p;
  return (std::filesystem::path(base) / p).lexically_normal().string();
}

MlpOutput parse_output(const std::string& s) {
  if (s == "sigmoid") return MlpOutput::kSigmoid;
  if (s == "softmax") return MlpOutput::kSoftmax;
  throw Error(ErrorCode::kInvalidConfig, "mlp output must be sigmoid or softmax");
}

std::string output_name(MlpOutput o) { return o == MlpOutput::kSigmoid ? "sigmoid" : "softmax"; }

}  // namespace

ExperimentConfig parse_experiment_config(std::string_view json_text, const std::string& base_dir) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, std::string("config is not valid JSON: ") + e.what());
  }
  ExperimentConfig c;
  {
    ObjectReader r(root, "config");
    std::string label = c.label.name();
    r.get("label", label);
    c.label = LabelKind::parse(label);
    r.get("max_gap_days", c.max_gap_days);
    std::vector<std::string> sectors;
    r.get("sectors", sectors);
    if (!sectors.empty()) {
      c.sectors.clear();
      for (const auto& s : sectors) {
        try {
          c.sectors.push_back(parse_sector(s));
        } catch (const Error& e) {
          throw Error(ErrorCode::kInvalidConfig, e.what());
        }
      }
    }
    std::vector<std::string> methods;
    r.get("methods", methods);
    if (!methods.empty()) {
      c.methods.clear();
      for (const auto& m : methods) c.methods.push_back(parse_method(m));
    }
    r.get("seeds", c.seeds);
    r.get("min_examples", c.min_examples);
    r.get("min_seeds", c.min_seeds);
    r.get("threads", c.threads);
    if (const json* s = r.child("split")) {
      ObjectReader sr(*s, "split");
      sr.get("train_max_year", c.split.train_max_year);
      sr.get("test_year", c.split.test_year);
      sr.get("validation_fraction", c.split.validation_fraction);
    }
    if (const json* in = r.child("inputs")) {
      ObjectReader ir(*in, "inputs");
      ir.get("transcripts", c.inputs.transcripts);
      ir.get("prices", c.inputs.prices);
      ir.get("indices", c.inputs.indices);
      ir.get("recommendations", c.inputs.recommendations);
      ir.get("fundamentals", c.inputs.fundamentals);
      ir.get("lexicon", c.inputs.lexicon);
      ir.get("word_vectors", c.inputs.word_vectors);
    }
    if (const json* g = r.child("graph")) {
      ObjectReader gr(*g, "graph");
      gr.get("window", c.graph.window);
      gr.get("feature_dim", c.graph.feature_dim);
      gr.get("feature_seed", c.graph.feature_seed);
    }
    if (const json* g = r.child("gnn")) {
      ObjectReader gr(*g, "gnn");
      gr.get("steps", c.gnn.steps);
      gr.get("graph_embedding_dim", c.gnn.graph_embedding_dim);
      gr.get("head_hidden", c.gnn.head_hidden);
      gr.get("batch_size", c.gnn.batch_size);
      gr.get("learning_rate", c.gnn.learning_rate);
      gr.get("epochs", c.gnn.epochs);
      gr.get("patience", c.gnn.patience);
      gr.get("doc_dim", c.gnn.doc_dim);
    }
    if (const json* d = r.child("doc2vec")) {
      ObjectReader dr(*d, "doc2vec");
      dr.get("dims", c.doc2vec.dims);
      dr.get("learning_rate", c.doc2vec.learning_rate);
      dr.get("negatives", c.doc2vec.negatives);
      dr.get("min_count", c.doc2vec.min_count);
      dr.get("window", c.doc2vec.window);
      dr.get("epochs", c.doc2vec.epochs);
      dr.get("infer_steps", c.doc2vec.infer_steps);
      dr.get("seed", c.doc2vec.seed);
      std::string mode = c.doc2vec.mode == Doc2VecMode::kInfer ? "infer" : "train_all";
      dr.get("mode", mode);
      if (mode == "infer") {
        c.doc2vec.mode = Doc2VecMode::kInfer;
      } else if (mode == "train_all") {
        c.doc2vec.mode = Doc2VecMode::kTrainAll;
      } else {
        throw Error(ErrorCode::kInvalidConfig, "doc2vec.mode must be infer or train_all");
      }
    }
    if (const json* k = r.child("classifier")) {
      ObjectReader kr(*k, "classifier");
      auto& h = c.classifier.head;
      kr.get("learning_rate", h.learning_rate);
      kr.get("max_iterations", h.max_iterations);
      kr.get("tolerance", h.tolerance);
      kr.get("l2", h.l2);
      kr.get("mlp_epochs", h.epochs);
      kr.get("mlp_batch_size", h.batch_size);
      kr.get("mlp_learning_rate", h.mlp_learning_rate);
      kr.get("mlp_hidden_by_dim", c.classifier.mlp_hidden_by_dim);
      kr.get("se_hidden", c.classifier.se_hidden);
      std::string de = output_name(c.classifier.de_output);
      std::string se = output_name(c.classifier.se_output);
      kr.get("de_output", de);
      kr.get("se_output", se);
      c.classifier.de_output = parse_output(de);
      c.classifier.se_output = parse_output(se);
    }
  }
  auto& in = c.inputs;
  for (std::string* p : {&in.transcripts, &in.prices, &in.indices, &in.recommendations,
                         &in.fundamentals, &in.lexicon, &in.word_vectors})
    *p = resolve(base_dir, *p);
  c.validate();
  return c;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  const std::string text = read_file(path);
  return parse_experiment_config(text, std::filesystem::path(path).parent_path().string());
}

std::string experiment_config_to_json(const ExperimentConfig& c, int indent) {
  nlohmann::ordered_json j;
  j["label"] = c.label.name();
  j["max_gap_days"] = c.max_gap_days;
  std::vector<std::string> sectors, methods;
  for (Sector s : c.sectors) sectors.emplace_back(sector_short_name(s));
  for (Method m : c.methods) methods.emplace_back(method_name(m));
  j["sectors"] = sectors;
  j["methods"] = methods;
  j["seeds"] = c.seeds;
  j["min_examples"] = c.min_examples;
  j["min_seeds"] = c.min_seeds;
  j["threads"] = c.threads;
  j["split"] = {{"train_max_year", c.split.train_max_year},
                {"test_year", c.split.test_year},
                {"validation_fraction", c.split.validation_fraction}};
  j["inputs"] = {{"transcripts", c.inputs.transcripts},
                 {"prices", c.inputs.prices},
                 {"indices", c.inputs.indices},
                 {"recommendations", c.inputs.recommendations},
                 {"fundamentals", c.inputs.fundamentals},
                 {"lexicon", c.inputs.lexicon},
                 {"word_vectors", c.inputs.word_vectors}};
  j["graph"] = {{"window", c.graph.window},
                {"feature_dim", c.graph.feature_dim},
                {"feature_seed", c.graph.feature_seed}};
  j["gnn"] = {{"steps", c.gnn.steps},
              {"graph_embedding_dim", c.gnn.graph_embedding_dim},
              {"head_hidden", c.gnn.head_hidden},
              {"batch_size", c.gnn.batch_size},
              {"learning_rate", c.gnn.learning_rate},
              {"epochs", c.gnn.epochs},
              {"patience", c.gnn.patience},
              {"doc_dim", c.gnn.doc_dim}};
  j["doc2vec"] = {{"dims", c.doc2vec.dims},
                  {"learning_rate", c.doc2vec.learning_rate},
                  {"negatives", c.doc2vec.negatives},
                  {"min_count", c.doc2vec.min_count},
                  {"window", c.doc2vec.window},
                  {"epochs", c.doc2vec.epochs},
                  {"infer_steps", c.doc2vec.infer_steps},
                  {"seed", c.doc2vec.seed},
                  {"mode", c.doc2vec.mode == Doc2VecMode::kInfer ? "infer" : "train_all"}};
  const auto& h = c.classifier.head;
  j["classifier"] = {{"learning_rate", h.learning_rate},
                     {"max_iterations", h.max_iterations},
                     {"tolerance", h.tolerance},
                     {"l2", h.l2},
                     {"mlp_epochs", h.epochs},
                     {"mlp_batch_size", h.batch_size},
                     {"mlp_learning_rate", h.mlp_learning_rate},
                     {"mlp_hidden_by_dim", c.classifier.mlp_hidden_by_dim},
                     {"se_hidden", c.classifier.se_hidden},
                     {"de_output", output_name(c.classifier.de_output)},
                     {"se_output", output_name(c.classifier.se_output)}};
  return j.dump(indent);
}

}  // namespace ecpipe
