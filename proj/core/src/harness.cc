#include "ecpipe/harness.h"

#include <algorithm>
#include <functional>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <numeric>
#include <set>
#include <thread>

#include "ecpipe/docembed.h"
#include "ecpipe/error.h"
#include "ecpipe/neural.h"
#include "ecpipe/rng.h"

namespace ecpipe {

void run_parallel(std::size_t jobs, unsigned threads,
                  const std::function<void(std::size_t)>& job) {
  if (threads <= 1 || jobs <= 1) {
    for (std::size_t i = 0; i < jobs; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t failed_job = jobs;
  std::exception_ptr failure;
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs; i = next++) {
      try {
        job(i);
      } catch (...) {
        std::lock_guard lock(mu);
        // Report the lowest failing job so the error does not depend on timing.
        if (i < failed_job) {
          failed_job = i;
          failure = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned n = static_cast<unsigned>(std::min<std::size_t>(threads, jobs));
  for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

AssembledDataset assemble_dataset(std::span<const TranscriptRecord> corpus,
                                  const PriceTable& prices, const PriceTable& indices,
                                  const LabelKind& label, int max_gap_days) {
  AssembledDataset out;
  out.label = label;
  auto exclude = [&](const TranscriptRecord& t, std::string reason) {
    ++out.reason_counts[reason];
    out.exclusions.push_back({t.id, std::move(reason)});
  };
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& t = corpus[i];
    auto stock = prices.find(t.ticker);
    if (stock == prices.end()) {
      exclude(t, "missing prices");
      continue;
    }
    const PriceSeries* index = nullptr;
    if (label.needs_index()) {
      auto it = indices.find(std::string(reference_index(t.sector)));
      if (it == indices.end()) {
        exclude(t, "missing index");
        continue;
      }
      index = &it->second;
    }
    std::optional<int> y;
    try {
      y = compute_label(label, stock->second, index, t.call_date, max_gap_days);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kMissingPrice && e.code() != ErrorCode::kNoNeighbor) throw;
      exclude(t, "missing price data");
      continue;
    }
    if (!y) {
      exclude(t, label.kind == LabelKind::Kind::kShock ? "below tau" : "IBL undefined");
      continue;
    }
    LabeledExample ex;
    ex.transcript = i;
    ex.id = t.id;
    ex.ticker = t.ticker;
    ex.call_date = t.call_date;
    ex.sector = t.sector;
    ex.year = year_of(t.call_date);
    ex.quarter = t.quarter;
    ex.label = *y;
    out.examples.push_back(std::move(ex));
  }
  return out;
}

Table labels_table(const AssembledDataset& dataset) {
  Table t({"id", "ticker", "date", "sector", "year", "quarter", "label_kind", "label"});
  const std::string kind = dataset.label.name();
  for (const auto& e : dataset.examples) {
    t.add_row({e.id, e.ticker, format_date(e.call_date), std::string(sector_short_name(e.sector)),
               std::to_string(e.year), std::to_string(e.quarter), kind,
               std::to_string(e.label)});
  }
  return t;
}

Table exclusions_table(const AssembledDataset& dataset) {
  Table t({"id", "reason"});
  for (const auto& e : dataset.exclusions) t.add_row({e.id, e.reason});
  return t;
}

namespace {

std::uint64_t digest_of(const std::string& bytes) { return fnv1a64_str(bytes); }

}  // namespace

PipelineInputs load_inputs(const ExperimentConfig& config) {
  PipelineInputs in;
  const auto& p = config.inputs;
  if (p.transcripts.empty()) throw Error(ErrorCode::kInvalidConfig, "inputs.transcripts not set");
  if (p.prices.empty()) throw Error(ErrorCode::kInvalidConfig, "inputs.prices not set");
  {
    const std::string text = read_file(p.transcripts);
    in.digests["transcripts"] = digest_of(text);
    auto load = parse_transcripts(text);
    in.transcripts = std::move(load.records);
    in.transcript_errors = std::move(load.errors);
  }
  {
    const std::string text = read_file(p.prices);
    in.digests["prices"] = digest_of(text);
    in.prices = parse_price_csv(text);
  }
  if (!p.indices.empty()) {
    const std::string text = read_file(p.indices);
    in.digests["indices"] = digest_of(text);
    for (auto& [symbol, series] : parse_price_csv(text)) {
      if (!in.prices.emplace(symbol, std::move(series)).second) {
        throw Error(ErrorCode::kSchemaViolation,
                    "symbol " + symbol + " appears in both price files");
      }
    }
  }
  if (!p.recommendations.empty()) {
    const std::string text = read_file(p.recommendations);
    in.digests["recommendations"] = digest_of(text);
    in.recommendations = parse_recommendations_csv(text);
  }
  if (!p.fundamentals.empty()) {
    const std::string text = read_file(p.fundamentals);
    in.digests["fundamentals"] = digest_of(text);
    in.fundamentals = parse_fundamentals_csv(text);
  }
  if (!p.lexicon.empty()) {
    const std::string text = read_file(p.lexicon);
    in.digests["lexicon"] = digest_of(text);
    in.lexicon = parse_lexicon(text);
  } else {
    in.lexicon = bundled_lexicon();
  }
  if (!p.word_vectors.empty()) {
    const std::string text = read_file(p.word_vectors);
    in.digests["word_vectors"] = digest_of(text);
    in.word_vectors = parse_embedding_table(text);
    if (in.word_vectors->dim() != config.graph.feature_dim) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "word vectors have dimension " + std::to_string(in.word_vectors->dim()) +
                      ", graph.feature_dim is " + std::to_string(config.graph.feature_dim));
    }
  }
  return in;
}

std::string experiment_digest(const ExperimentConfig& config, const PipelineInputs& inputs) {
  ExperimentConfig c = config;
  c.inputs = InputPaths{};
  c.threads = 1;  // thread count never changes results
  std::string key = experiment_config_to_json(c);
  for (const auto& [name, d] : inputs.digests) key += "|" + name + "=" + std::to_string(d);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64_str(key)));
  return buf;
}

std::pair<double, double> mean_sd(std::span<const double> values) {
  if (values.empty()) return {0.0, 0.0};
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  // Identical values: the rounded mean would leave a spurious nonzero sd.
  if (std::adjacent_find(values.begin(), values.end(), std::not_equal_to<>()) == values.end())
    return {values.front(), 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0))};
}

const ResultCell* ResultTable::find(Sector sector, Method method) const {
  for (const auto& c : cells)
    if (c.sector == sector && c.method == method) return &c;
  return nullptr;
}

Table ResultTable::to_table() const {
  Table t({"sector", "method", "runs", "accuracy_mean", "accuracy_sd", "precision_mean",
           "precision_sd", "recall_mean", "recall_sd", "train_n", "test_n", "doc_dim", "note"});
  for (const auto& c : cells) {
    t.add_row({std::string(sector_short_name(c.sector)), std::string(method_name(c.method)),
               std::to_string(c.runs), format_number(c.accuracy_mean, 4),
               format_number(c.accuracy_sd, 4), format_number(c.precision_mean, 4),
               format_number(c.precision_sd, 4), format_number(c.recall_mean, 4),
               format_number(c.recall_sd, 4), std::to_string(c.train_size),
               std::to_string(c.test_size), c.doc_dims.empty() ? "-" : c.doc_dims,
               c.below_min_seeds ? "fewer seeds than min_seeds" : ""});
  }
  return t;
}

ResultTable summarize_runs(std::span<const RunRecord> runs, const ExperimentConfig& config) {
  ResultTable table;
  for (Sector s : config.sectors) {
    for (Method m : config.methods) {
      std::vector<double> acc, prec, rec;
      std::set<std::size_t> dims;
      ResultCell cell;
      cell.sector = s;
      cell.method = m;
      for (const auto& r : runs) {
        if (r.sector != s || r.method != m) continue;
        acc.push_back(r.metrics.accuracy);
        prec.push_back(r.metrics.macro_precision);
        rec.push_back(r.metrics.macro_recall);
        cell.train_size = r.train_size;
        cell.test_size = r.test_size;
        if (r.doc_dim > 0) dims.insert(r.doc_dim);
      }
      if (acc.empty()) continue;
      cell.runs = acc.size();
      std::tie(cell.accuracy_mean, cell.accuracy_sd) = mean_sd(acc);
      std::tie(cell.precision_mean, cell.precision_sd) = mean_sd(prec);
      std::tie(cell.recall_mean, cell.recall_sd) = mean_sd(rec);
      for (std::size_t d : dims) cell.doc_dims += (cell.doc_dims.empty() ? "" : "/") + std::to_string(d);
      cell.below_min_seeds = static_cast<int>(cell.runs) < config.min_seeds;
      table.cells.push_back(std::move(cell));
    }
  }
  return table;
}

Table runs_table(std::span<const RunRecord> runs) {
  Table t({"sector", "method", "seed", "accuracy", "macro_precision", "macro_recall", "train_n",
           "test_n", "doc_dim"});
  for (const auto& r : runs) {
    t.add_row({std::string(sector_short_name(r.sector)), std::string(method_name(r.method)),
               std::to_string(r.seed), format_number(r.metrics.accuracy, 6),
               format_number(r.metrics.macro_precision, 6),
               format_number(r.metrics.macro_recall, 6), std::to_string(r.train_size),
               std::to_string(r.test_size), std::to_string(r.doc_dim)});
  }
  return t;
}

namespace {

struct SectorSplit {
  std::vector<std::size_t> train;  // indices into dataset.examples, date order
  std::vector<std::size_t> test;
};

// Latest training year, or the last `fraction` of rows when that year is too
// small or covers everything.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> validation_split(
    const std::vector<std::size_t>& train, const std::vector<LabeledExample>& ex,
    double fraction) {
  std::vector<std::size_t> fit, val;
  if (train.empty()) return {fit, val};
  int latest = 0;
  for (std::size_t i : train) latest = std::max(latest, ex[i].year);
  for (std::size_t i : train) (ex[i].year == latest ? val : fit).push_back(i);
  const double want = fraction * static_cast<double>(train.size());
  if (fit.empty() || static_cast<double>(val.size()) < want) {
    const auto cut = static_cast<std::size_t>(std::ceil(want));
    fit.assign(train.begin(), train.end() - static_cast<std::ptrdiff_t>(cut));
    val.assign(train.end() - static_cast<std::ptrdiff_t>(cut), train.end());
  }
  return {fit, val};
}

std::size_t keyed_hidden(std::size_t key_dim, const ClassifierSettings& s) {
  if (key_dim <= 100) return s.mlp_hidden_by_dim[0];
  if (key_dim <= 200) return s.mlp_hidden_by_dim[1];
  return s.mlp_hidden_by_dim[2];
}

HeadKind head_kind(Method m) {
  switch (m) {
    case Method::kDeSvm: return HeadKind::kLinearSvm;
    case Method::kDeLogReg: return HeadKind::kLogReg;
    default: return HeadKind::kMlp;
  }
}

FeatureSource feature_source(Method m) {
  switch (m) {
    case Method::kSeMlp: return FeatureSource::kSalesEps;
    case Method::kSentimentMlp: return FeatureSource::kSentiment;
    case Method::kCombinedMlp: return FeatureSource::kCombined;
    default: return FeatureSource::kEmbedding;
  }
}

// Everything the per-seed jobs read. Built once, then shared read-only.
struct Features {
  std::map<std::size_t, std::map<std::size_t, std::vector<double>>> doc;  // dim -> transcript -> vec
  std::map<std::size_t, std::vector<double>> sentiment;
  std::map<std::size_t, std::vector<double>> sales_eps;  // complete records only
  std::map<std::size_t, GraphExample> graphs;            // keyed by transcript
};

std::uint64_t job_seed(std::uint64_t seed, Sector s, Method m) {
  return mix_seed(mix_seed(seed, static_cast<std::uint64_t>(s) + 1),
                  static_cast<std::uint64_t>(m) + 1);
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, const PipelineInputs& inputs,
                                const ProgressFn& progress) {
  config.validate();
  auto say = [&](const std::string& msg) {
    if (progress) progress(msg);
  };
  ExperimentResult result;
  result.dataset = assemble_dataset(inputs.transcripts, inputs.prices, inputs.prices,
                                    config.label, config.max_gap_days);
  const auto& ex = result.dataset.examples;

  std::map<Sector, SectorSplit> splits;
  for (std::size_t i = 0; i < ex.size(); ++i) {
    auto& s = splits[ex[i].sector];
    if (ex[i].year <= config.split.train_max_year) s.train.push_back(i);
    if (ex[i].year == config.split.test_year) s.test.push_back(i);
  }
  std::string shortfall;
  for (Sector s : config.sectors) {
    const auto& sp = splits[s];
    if (sp.train.size() < config.min_examples || sp.test.size() < config.min_examples) {
      shortfall += std::string(shortfall.empty() ? "" : "; ") +
                   std::string(sector_short_name(s)) + " train " +
                   std::to_string(sp.train.size()) + " test " + std::to_string(sp.test.size());
    }
  }
  if (!shortfall.empty()) {
    throw Error(ErrorCode::kInsufficientData,
                "need " + std::to_string(config.min_examples) + " examples per split: " + shortfall);
  }
  for (auto& [sector, sp] : splits) {
    auto by_date = [&](std::size_t a, std::size_t b) {
      return ex[a].call_date != ex[b].call_date ? ex[a].call_date < ex[b].call_date
                                                : ex[a].id < ex[b].id;
    };
    std::sort(sp.train.begin(), sp.train.end(), by_date);
    std::sort(sp.test.begin(), sp.test.end(), by_date);
  }

  const std::set<Sector> wanted(config.sectors.begin(), config.sectors.end());
  std::set<std::size_t> used;  // transcripts that reach a job
  for (const auto& e : ex)
    if (wanted.contains(e.sector) &&
        (e.year <= config.split.train_max_year || e.year == config.split.test_year))
      used.insert(e.transcript);

  std::map<std::size_t, TokenStream> tokens;
  for (std::size_t t : used) tokens[t] = tokenize(inputs.transcripts[t].text);

  const bool any_de = std::any_of(config.methods.begin(), config.methods.end(), uses_doc_embeddings);
  const bool has_gnn = std::find(config.methods.begin(), config.methods.end(), Method::kStockGnn) !=
                       config.methods.end();
  std::set<std::size_t> dims;
  if (any_de) dims.insert(config.doc2vec.dims.begin(), config.doc2vec.dims.end());
  if (has_gnn && config.gnn.doc_dim > 0) dims.insert(config.gnn.doc_dim);

  Features features;
  if (!dims.empty()) {
    // Doc2Vec training text: every transcript up to the last training year
    // (through the test year in train_all mode), labeled or not.
    const int last_year = config.doc2vec.mode == Doc2VecMode::kInfer ? config.split.train_max_year
                                                                     : config.split.test_year;
    std::vector<TokenStream> corpus;
    std::vector<std::string> ids;
    std::set<std::size_t> trained;
    for (std::size_t t = 0; t < inputs.transcripts.size(); ++t) {
      const auto& tr = inputs.transcripts[t];
      if (year_of(tr.call_date) > last_year) continue;
      corpus.push_back(tokens.contains(t) ? tokens[t] : tokenize(tr.text));
      ids.push_back(tr.id);
      trained.insert(t);
    }
    const std::vector<std::size_t> dim_list(dims.begin(), dims.end());
    std::vector<DocEmbeddings> models(dim_list.size());
    run_parallel(dim_list.size(), config.threads, [&](std::size_t k) {
      Doc2VecConfig dc;
      dc.dim = dim_list[k];
      dc.learning_rate = config.doc2vec.learning_rate;
      dc.negatives = config.doc2vec.negatives;
      dc.window = config.doc2vec.window;
      dc.epochs = config.doc2vec.epochs;
      dc.min_count = config.doc2vec.min_count;
      dc.seed = mix_seed(config.doc2vec.seed, dim_list[k]);
      models[k] = train_pvdm(corpus, ids, dc);
    });
    for (std::size_t k = 0; k < dim_list.size(); ++k) {
      say("doc2vec dim " + std::to_string(dim_list[k]) + " trained on " +
          std::to_string(corpus.size()) + " transcripts");
      auto& out = features.doc[dim_list[k]];
      std::map<std::string, std::size_t> row_of;
      for (std::size_t r = 0; r < models[k].doc_ids.size(); ++r) row_of[models[k].doc_ids[r]] = r;
      for (std::size_t t : used) {
        const auto& id = inputs.transcripts[t].id;
        if (trained.contains(t)) {
          auto row = models[k].doc_vectors.row(row_of.at(id));
          out[t] = std::vector<double>(row.begin(), row.end());
        } else {
          out[t] = infer_vector(tokens[t], models[k], config.doc2vec.infer_steps,
                                mix_seed(config.doc2vec.seed, fnv1a64_str(id)))
                       .values;
        }
      }
    }
  }

  for (std::size_t t : used) {
    const auto s = score(tokens[t], inputs.lexicon);
    features.sentiment[t] = s.scores;
    const auto& tr = inputs.transcripts[t];
    if (auto f = match_fundamentals(inputs.fundamentals, tr.ticker, tr.call_date);
        f && f->complete()) {
      features.sales_eps[t] = {*f->actual_sales, *f->estimated_sales, *f->actual_eps,
                               *f->estimated_eps};
    }
  }

  if (has_gnn) {
    for (const auto& e : ex) {
      if (!used.contains(e.transcript)) continue;
      GraphExample g;
      g.graph = build_text_graph(tokens[e.transcript], config.graph.window);
      if (inputs.word_vectors) {
        attach_features(g.graph, *inputs.word_vectors, config.graph.feature_dim,
                        config.graph.feature_seed);
      } else {
        attach_fallback_features(g.graph, config.graph.feature_dim, config.graph.feature_seed);
      }
      if (config.gnn.doc_dim > 0) g.doc_embedding = features.doc.at(config.gnn.doc_dim).at(e.transcript);
      g.label = e.label;
      features.graphs.emplace(e.transcript, std::move(g));
    }
    say("built " + std::to_string(features.graphs.size()) + " text graphs");
  }

  struct Job {
    Sector sector;
    Method method;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (Sector s : config.sectors)
    for (Method m : config.methods)
      for (std::uint64_t seed : config.seeds) jobs.push_back({s, m, seed});
  result.runs.resize(jobs.size());
  std::vector<std::string> checkpoints(jobs.size());

  auto feature_row = [&](Method m, std::size_t dim, std::size_t t) -> std::optional<std::vector<double>> {
    switch (m) {
      case Method::kSeMlp: {
        auto it = features.sales_eps.find(t);
        if (it == features.sales_eps.end()) return std::nullopt;
        return it->second;
      }
      case Method::kSentimentMlp: return features.sentiment.at(t);
      case Method::kCombinedMlp: {
        auto v = features.sentiment.at(t);
        const auto& d = features.doc.at(dim).at(t);
        v.insert(v.end(), d.begin(), d.end());
        return v;
      }
      default: return features.doc.at(dim).at(t);
    }
  };
  auto matrix_for = [&](Method m, std::size_t dim, const std::vector<std::size_t>& rows) {
    FeatureMatrix fm;
    fm.source = feature_source(m);
    std::vector<std::vector<double>> data;
    for (std::size_t i : rows) {
      if (auto v = feature_row(m, dim, ex[i].transcript)) {
        data.push_back(std::move(*v));
        fm.labels.push_back(ex[i].label);
      }
    }
    const std::size_t p = data.empty() ? 0 : data.front().size();
    fm.x = Matrix(data.size(), p);
    for (std::size_t r = 0; r < data.size(); ++r)
      std::copy(data[r].begin(), data[r].end(), fm.x.row(r).begin());
    return fm;
  };
  auto head_config = [&](Method m, std::size_t dim, std::size_t width, std::uint64_t seed) {
    HeadConfig hc = config.classifier.head;
    hc.kind = head_kind(m);
    hc.seed = seed;
    if (m == Method::kSeMlp) {
      hc.hidden = config.classifier.se_hidden;
      hc.output = config.classifier.se_output;
    } else {
      hc.hidden = keyed_hidden(uses_doc_embeddings(m) ? dim : width, config.classifier);
      hc.output = config.classifier.de_output;
    }
    return hc;
  };

  run_parallel(jobs.size(), config.threads, [&](std::size_t j) {
    const Job& job = jobs[j];
    const auto& sp = splits.at(job.sector);
    const std::uint64_t seed = job_seed(job.seed, job.sector, job.method);
    RunRecord rec;
    rec.sector = job.sector;
    rec.method = job.method;
    rec.seed = job.seed;
    std::vector<int> truth, pred;

    if (job.method == Method::kStockGnn) {
      auto [fit, val] = validation_split(sp.train, ex, config.split.validation_fraction);
      std::vector<GraphExample> fit_set, val_set;
      for (std::size_t i : fit) fit_set.push_back(features.graphs.at(ex[i].transcript));
      for (std::size_t i : val) val_set.push_back(features.graphs.at(ex[i].transcript));
      GnnTrainConfig gc;
      gc.learning_rate = config.gnn.learning_rate;
      gc.epochs = config.gnn.epochs;
      gc.batch_size = config.gnn.batch_size;
      gc.patience = config.gnn.patience;
      gc.seed = seed;
      gc.threads = 1;
      gc.shape.feature_dim = config.graph.feature_dim;
      gc.shape.graph_embedding_dim = config.gnn.graph_embedding_dim;
      gc.shape.doc_dim = config.gnn.doc_dim;
      gc.shape.head_hidden = config.gnn.head_hidden;
      gc.shape.steps = config.gnn.steps;
      const auto trained = train_stock_gnn(fit_set, val_set, gc);
      for (std::size_t i : sp.test) {
        const auto& g = features.graphs.at(ex[i].transcript);
        const auto prob = forward_classify(g.graph, trained.model, g.doc_embedding);
        pred.push_back(prob[1] >= 0.5 ? 1 : 0);
        truth.push_back(g.label);
      }
      rec.train_size = sp.train.size();
      rec.doc_dim = config.gnn.doc_dim;
      checkpoints[j] = checkpoint_to_string(trained.model, gc);
    } else {
      std::size_t dim = 0;
      if (uses_doc_embeddings(job.method)) {
        dim = config.doc2vec.dims.front();
        if (config.doc2vec.dims.size() > 1) {
          auto [fit, val] = validation_split(sp.train, ex, config.split.validation_fraction);
          double best = -1.0;
          for (std::size_t d : config.doc2vec.dims) {
            const auto fm = matrix_for(job.method, d, fit);
            const auto vm = matrix_for(job.method, d, val);
            const auto head = fit_head(fm, head_config(job.method, d, fm.x.cols(), seed));
            const double acc = evaluate(predict(head, vm.x).labels, vm.labels).accuracy;
            if (acc > best) {
              best = acc;
              dim = d;
            }
          }
        }
      }
      const auto train = matrix_for(job.method, dim, sp.train);
      const auto test = matrix_for(job.method, dim, sp.test);
      if (test.labels.empty()) {
        throw Error(ErrorCode::kInsufficientData,
                    std::string(method_name(job.method)) + " has no usable test rows in " +
                        std::string(sector_short_name(job.sector)));
      }
      const auto head = fit_head(train, head_config(job.method, dim, train.x.cols(), seed));
      pred = predict(head, test.x).labels;
      truth = test.labels;
      rec.train_size = train.labels.size();
      rec.doc_dim = dim;
    }
    rec.test_size = truth.size();
    rec.metrics = evaluate(pred, truth);
    result.runs[j] = std::move(rec);
  });

  for (std::size_t j = 0; j < jobs.size(); ++j) {
    if (checkpoints[j].empty()) continue;
    result.checkpoints["stockgnn_" + std::string(sector_short_name(jobs[j].sector)) + "_seed" +
                       std::to_string(jobs[j].seed) + ".json"] = std::move(checkpoints[j]);
  }
  result.table = summarize_runs(result.runs, config);
  return result;
}

std::vector<RegressionRow> build_regression_rows(const ExperimentConfig& config,
                                                 const PipelineInputs& inputs) {
  const int k = config.label.kind == LabelKind::Kind::kIndex ? config.label.k : kPerfDays;
  const double tau = config.label.kind == LabelKind::Kind::kShock ? config.label.tau
                                                                    : kDefaultShockTau;
  const std::vector<std::pair<std::string, LabelKind>> kinds = {
      {"y_v", LabelKind::value()},
      {"y_s", LabelKind::shock(tau)},
      {"y_I" + std::to_string(k), LabelKind::index(k)}};
  std::vector<RegressionRow> rows(inputs.transcripts.size());
  for (const auto& [name, kind] : kinds) {
    for (auto& r : rows) r.labels[name] = std::nullopt;
    const auto ds = assemble_dataset(inputs.transcripts, inputs.prices, inputs.prices, kind,
                                     config.max_gap_days);
    for (const auto& e : ds.examples) rows[e.transcript].labels[name] = e.label;
  }
  const bool have_recs = !inputs.recommendations.empty();
  for (std::size_t t = 0; t < rows.size(); ++t) {
    const auto& tr = inputs.transcripts[t];
    auto& r = rows[t];
    const auto s = score(tokenize(tr.text), inputs.lexicon);
    for (std::size_t c = 0; c < s.categories.size(); ++c) r.continuous[s.categories[c]] = s.scores[c];
    const auto f = match_fundamentals(inputs.fundamentals, tr.ticker, tr.call_date);
    r.continuous["actual_sales"] = f ? f->actual_sales : std::nullopt;
    r.continuous["estimated_sales"] = f ? f->estimated_sales : std::nullopt;
    r.continuous["actual_eps"] = f ? f->actual_eps : std::nullopt;
    r.continuous["estimated_eps"] = f ? f->estimated_eps : std::nullopt;
    r.categorical["sector"] = std::string(sector_short_name(tr.sector));
    r.categorical["year"] = std::to_string(year_of(tr.call_date));
    for (MarWindow w : {MarWindow::kPrior1m, MarWindow::kPost5d}) {
      std::optional<std::string> v;
      if (have_recs) {
        if (auto m = compute_mar(inputs.recommendations, tr.ticker, tr.call_date, w))
          v = std::string(rating_name(*m));
      }
      r.categorical[std::string(mar_window_name(w))] = v;
    }
  }
  return rows;
}

}  // namespace ecpipe
