#include "commands.h"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>

#include "ecpipe/date.h"
#include "ecpipe/docembed.h"
#include "ecpipe/error.h"
#include "ecpipe/harness.h"
#include "ecpipe/reports.h"
#include "ecpipe/rng.h"
#include "ecpipe/textgraph.h"

namespace ecpipe::cli {

namespace fs = std::filesystem;

namespace {

class Session {
 public:
  explicit Session(const Options& options) : options_(options) {
    if (options.config_path.empty()) {
      throw Error(ErrorCode::kInvalidConfig, "--config is required");
    }
    config = load_experiment_config(options.config_path);
    if (options.seed) config.seeds = {*options.seed};
    if (options.window) config.graph.window = *options.window;
    if (options.threads) config.threads = *options.threads;
    config.validate();
    inputs = load_inputs(config);
    dir = (fs::path(options.out_dir) / experiment_digest(config, inputs)).string();
    fs::create_directories(dir);
    write_file(path("config.json"), experiment_config_to_json(config, 2) + "\n");
  }

  std::string path(const std::string& name) const { return (fs::path(dir) / name).string(); }

  void emit(const std::string& name, const Table& table) const {
    write_file(path(name + ".csv"), table.to_csv());
    write_file(path(name + ".txt"), table.to_text());
    say("wrote " + name + " (" + std::to_string(table.rows().size()) + " rows)");
  }

  void say(const std::string& message) const {
    if (!options_.quiet) std::cerr << message << '\n';
  }

  ProgressFn progress() const {
    if (options_.quiet) return nullptr;
    return [](const std::string& m) { std::cerr << m << '\n'; };
  }

  AssembledDataset dataset() const {
    return assemble_dataset(inputs.transcripts, inputs.prices, inputs.prices, config.label,
                            config.max_gap_days);
  }

  ExperimentConfig config;
  PipelineInputs inputs;
  std::string dir;

 private:
  const Options& options_;
};

Table count_table(const std::string& key, const std::map<std::string, std::size_t>& counts) {
  Table t({key, "count"});
  for (const auto& [k, n] : counts) t.add_row({k, std::to_string(n)});
  return t;
}

// Grouped bars from table columns: one bar group per distinct value of
// `category_column`, one series per (value column, split value).
std::string chart(const std::string& title, const Table& table,
                  const std::string& category_column, const std::string& split_column,
                  const std::vector<std::string>& value_columns) {
  const auto& h = table.header();
  auto col = [&](const std::string& name) {
    return static_cast<std::size_t>(std::find(h.begin(), h.end(), name) - h.begin());
  };
  const std::size_t cat = col(category_column);
  const std::size_t split = split_column.empty() ? h.size() : col(split_column);
  std::vector<std::string> categories;
  std::map<std::string, std::size_t> cat_index;
  for (const auto& row : table.rows()) {
    if (cat_index.emplace(row[cat], categories.size()).second) categories.push_back(row[cat]);
  }
  std::vector<ChartSeries> series;
  std::map<std::string, std::size_t> series_index;
  for (const auto& row : table.rows()) {
    for (const auto& v : value_columns) {
      const std::string name = split < h.size() ? v + " " + split_column + "=" + row[split] : v;
      auto [it, added] = series_index.emplace(name, series.size());
      if (added) series.push_back({name, std::vector<double>(categories.size(), 0.0)});
      series[it->second].values[cat_index[row[cat]]] = parse_double(row[col(v)]);
    }
  }
  return svg_bar_chart(title, categories, series);
}

std::string dependent_name(const LabelKind& label) {
  switch (label.kind) {
    case LabelKind::Kind::kValue:
      return "y_v";
    case LabelKind::Kind::kShock:
      return "y_s";
    case LabelKind::Kind::kIndex:
      return "y_I" + std::to_string(label.k);
  }
  return "y_v";
}

bool in_sectors(const ExperimentConfig& c, Sector s) {
  return std::find(c.sectors.begin(), c.sectors.end(), s) != c.sectors.end();
}

}  // namespace

std::string run_ingest(const Options& options) {
  Session s(options);
  const auto& in = s.inputs;
  Table summary({"input", "records", "digest"});
  auto digest = [&](const std::string& name) {
    auto it = in.digests.find(name);
    if (it == in.digests.end()) return std::string("-");
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(it->second));
    return std::string(buf);
  };
  std::size_t points = 0;
  for (const auto& [_, series] : in.prices) points += series.size();
  summary.add_row({"transcripts", std::to_string(in.transcripts.size()), digest("transcripts")});
  summary.add_row({"transcript_errors", std::to_string(in.transcript_errors.size()), "-"});
  summary.add_row({"price_series", std::to_string(in.prices.size()), digest("prices")});
  summary.add_row({"price_points", std::to_string(points), "-"});
  summary.add_row(
      {"recommendations", std::to_string(in.recommendations.size()), digest("recommendations")});
  summary.add_row({"fundamentals", std::to_string(in.fundamentals.size()), digest("fundamentals")});
  summary.add_row(
      {"lexicon_categories", std::to_string(in.lexicon.categories().size()), digest("lexicon")});
  summary.add_row({"word_vectors", std::to_string(in.word_vectors ? in.word_vectors->size() : 0),
                   digest("word_vectors")});
  s.emit("ingest", summary);

  Table errors({"line", "message"});
  for (const auto& e : in.transcript_errors) errors.add_row({std::to_string(e.line), e.message});
  s.emit("transcript_errors", errors);

  std::map<std::string, std::size_t> per_sector;
  for (const auto& t : in.transcripts) ++per_sector[std::string(sector_short_name(t.sector))];
  s.emit("transcripts_by_sector", count_table("sector", per_sector));
  return s.dir;
}

std::string run_label(const Options& options) {
  Session s(options);
  const auto ds = s.dataset();
  s.emit("labels", labels_table(ds));
  s.emit("exclusions", exclusions_table(ds));
  s.emit("exclusion_counts", count_table("reason", ds.reason_counts));
  return s.dir;
}

std::string run_sentiment(const Options& options) {
  Session s(options);
  const auto ds = s.dataset();
  std::vector<SentimentScores> scores;
  scores.reserve(ds.examples.size());
  for (const auto& e : ds.examples) {
    scores.push_back(score(tokenize(s.inputs.transcripts[e.transcript].text), s.inputs.lexicon));
  }
  std::vector<std::string> header = {"id", "ticker", "year", "label", "tokens"};
  const auto cats = s.inputs.lexicon.category_names();
  header.insert(header.end(), cats.begin(), cats.end());
  Table per_doc(header);
  for (std::size_t i = 0; i < ds.examples.size(); ++i) {
    const auto& e = ds.examples[i];
    std::vector<std::string> row = {e.id, e.ticker, std::to_string(e.year),
                                    std::to_string(e.label),
                                    std::to_string(scores[i].token_count)};
    for (double v : scores[i].scores) row.push_back(format_number(v, 6));
    per_doc.add_row(std::move(row));
  }
  s.emit("sentiment", per_doc);
  const Table by_year = report_sentiment_by_year(ds, scores);
  s.emit("sentiment_by_year", by_year);
  std::vector<std::string> shown;
  for (const char* c : {"posemo", "negemo"}) {
    if (std::find(cats.begin(), cats.end(), c) != cats.end()) shown.emplace_back(c);
  }
  if (!shown.empty() && !by_year.rows().empty()) {
    write_file(s.path("sentiment_by_year.svg"),
               chart("Mean sentiment by year and label", by_year, "year", "label", shown));
  }
  return s.dir;
}

std::string run_embed(const Options& options) {
  Session s(options);
  const auto& c = s.config;
  std::vector<TokenStream> train_docs, test_docs;
  std::vector<std::string> train_ids, test_ids;
  for (const auto& t : s.inputs.transcripts) {
    if (!in_sectors(c, t.sector)) continue;
    const int y = year_of(t.call_date);
    if (y <= c.split.train_max_year || c.doc2vec.mode == Doc2VecMode::kTrainAll) {
      train_docs.push_back(tokenize(t.text));
      train_ids.push_back(t.id);
    } else if (y == c.split.test_year) {
      test_docs.push_back(tokenize(t.text));
      test_ids.push_back(t.id);
    }
  }
  if (train_docs.empty()) throw Error(ErrorCode::kInsufficientData, "no training documents");

  Table summary({"dim", "train_docs", "inferred_docs", "vocab", "final_loss"});
  for (std::size_t dim : c.doc2vec.dims) {
    Doc2VecConfig dc;
    dc.dim = dim;
    dc.learning_rate = c.doc2vec.learning_rate;
    dc.negatives = c.doc2vec.negatives;
    dc.min_count = c.doc2vec.min_count;
    dc.window = c.doc2vec.window;
    dc.epochs = c.doc2vec.epochs;
    dc.seed = c.doc2vec.seed;
    s.say("training Doc2Vec dim " + std::to_string(dim));
    const DocEmbeddings model = train_pvdm(train_docs, train_ids, dc);
    save_embedding_store(s.path("doc2vec_" + std::to_string(dim) + ".store"), model);

    std::vector<std::string> header = {"id", "split"};
    for (std::size_t j = 0; j < dim; ++j) header.push_back("v" + std::to_string(j));
    Table vectors(header);
    for (std::size_t d = 0; d < model.doc_ids.size(); ++d) {
      std::vector<std::string> row = {model.doc_ids[d], "train"};
      for (std::size_t j = 0; j < dim; ++j) row.push_back(format_number(model.doc_vectors(d, j), 9));
      vectors.add_row(std::move(row));
    }
    for (std::size_t d = 0; d < test_docs.size(); ++d) {
      const auto v = infer_vector(test_docs[d], model, c.doc2vec.infer_steps,
                                  mix_seed(c.doc2vec.seed, d));
      std::vector<std::string> row = {test_ids[d], "inferred"};
      for (double x : v.values) row.push_back(format_number(x, 9));
      vectors.add_row(std::move(row));
    }
    s.emit("doc_vectors_" + std::to_string(dim), vectors);
    summary.add_row({std::to_string(dim), std::to_string(train_docs.size()),
                     std::to_string(test_docs.size()), std::to_string(model.vocab.size()),
                     model.epoch_loss.empty() ? "-" : format_number(model.epoch_loss.back(), 6)});
  }
  s.emit("embed", summary);
  return s.dir;
}

std::string run_graph(const Options& options) {
  Session s(options);
  const auto& c = s.config;
  Table t({"id", "ticker", "tokens", "nodes", "edges", "vector_hits"});
  for (const auto& tr : s.inputs.transcripts) {
    if (!in_sectors(c, tr.sector)) continue;
    const TokenStream tokens = tokenize(tr.text);
    if (tokens.empty()) {
      t.add_row({tr.id, tr.ticker, "0", "0", "0", "0"});
      continue;
    }
    const TextGraph g = build_text_graph(tokens, c.graph.window);
    std::size_t hits = 0;
    if (s.inputs.word_vectors) {
      for (const auto& w : g.nodes) hits += s.inputs.word_vectors->find(w) != nullptr;
    }
    t.add_row({tr.id, tr.ticker, std::to_string(tokens.size()), std::to_string(g.num_nodes()),
               std::to_string(g.adjacency.num_edges()), std::to_string(hits)});
  }
  s.emit("graphs", t);
  return s.dir;
}

std::string run_train(const Options& options) {
  Session s(options);
  const auto result = run_experiment(s.config, s.inputs, s.progress());
  const fs::path dir = fs::path(s.dir) / "checkpoints";
  fs::create_directories(dir);
  for (const auto& [name, contents] : result.checkpoints) write_file((dir / name).string(), contents);
  s.say("wrote " + std::to_string(result.checkpoints.size()) + " checkpoints");
  s.emit("runs", runs_table(result.runs));
  s.emit("exclusion_counts", count_table("reason", result.dataset.reason_counts));
  return s.dir;
}

std::string run_evaluate(const Options& options) {
  Session s(options);
  const auto result = run_experiment(s.config, s.inputs, s.progress());
  s.emit("runs", runs_table(result.runs));
  const Table table = result.table.to_table();
  s.emit("results", table);
  std::cout << table.to_text();
  return s.dir;
}

std::string run_regress(const Options& options) {
  Session s(options);
  const auto rows = build_regression_rows(s.config, s.inputs);
  const std::string dep = dependent_name(s.config.label);
  std::vector<GridSpec> grids = {sentiment_grid(dep)};
  if (!s.inputs.recommendations.empty()) grids.push_back(recommendation_grid(dep));
  for (const auto& grid : grids) {
    s.say("fitting " + grid.name);
    const auto fits = run_model_grid(rows, grid);
    s.emit("regression_" + grid.name, regression_table(fits));
    s.emit("bic_" + grid.name, bic_table(fits));
  }
  return s.dir;
}

std::string run_report(const Options& options) {
  Session s(options);
  const auto ds = s.dataset();
  for (const auto& [name, by] : {std::pair{"year", GroupBy::kYear},
                                 std::pair{"quarter", GroupBy::kQuarter},
                                 std::pair{"sector", GroupBy::kSector}}) {
    const Table t = report_distributions(ds, by);
    s.emit(std::string("distribution_") + name, t);
    if (!t.rows().empty()) {
      write_file(s.path(std::string("distribution_") + name + ".svg"),
                 chart(std::string("Label fractions by ") + name, t, "group", "",
                       {"fraction0", "fraction1"}));
    }
  }
  if (!s.inputs.fundamentals.empty()) {
    const auto bm = report_beat_miss(ds, s.inputs.transcripts, s.inputs.fundamentals);
    s.emit("beat_miss", bm.rows);
    s.emit("beat_miss_flagged", bm.flagged);
  }
  return s.dir;
}

}  // namespace ecpipe::cli
