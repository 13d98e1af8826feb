#include <exception>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.h"
#include "ecpipe/error.h"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitData = 3;

struct Command {
  const char* name;
  const char* help;
  std::function<std::string(const ecpipe::cli::Options&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  using namespace ecpipe::cli;
  const std::vector<Command> commands = {
      {"ingest", "Load and validate every configured input", run_ingest},
      {"label", "Assemble the labeled dataset and exclusion report", run_label},
      {"sentiment", "Score labeled transcripts against the lexicon", run_sentiment},
      {"embed", "Train Doc2Vec on training-year text and infer test vectors", run_embed},
      {"graph", "Build graph-of-words statistics per transcript", run_graph},
      {"train", "Run the experiment grid and write model checkpoints", run_train},
      {"evaluate", "Run the experiment grid and write the result table", run_evaluate},
      {"regress", "Fit the logistic regression grids", run_regress},
      {"report", "Label distributions and beat/miss factors", run_report},
  };

  CLI::App app{"Earnings call transcripts to stock price movement labels and models"};
  app.require_subcommand(1);
  Options options;
  std::uint64_t seed = 0;
  int window = 0;
  unsigned threads = 0;
  const Command* chosen = nullptr;
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", options.config_path, "Experiment config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out-dir", options.out_dir, "Output root")->capture_default_str();
    sub->add_option("--seed", seed, "Run a single seed instead of the configured list");
    sub->add_option("--window", window, "Graph-of-words window")->check(CLI::PositiveNumber);
    sub->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_flag("-q,--quiet", options.quiet, "No progress output");
    sub->callback([&chosen, &c] { chosen = &c; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  for (auto* sub : app.get_subcommands()) {
    if (sub->count("--seed")) options.seed = seed;
    if (sub->count("--window")) options.window = window;
    if (sub->count("--threads")) options.threads = threads;
  }

  try {
    std::cout << chosen->run(options) << '\n';
    return 0;
  } catch (const ecpipe::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return ecpipe::is_validation_error(e.code()) ? kExitValidation : kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
}
