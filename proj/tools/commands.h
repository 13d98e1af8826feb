#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "ecpipe/experiment_config.h"

namespace ecpipe::cli {

struct Options {
  std::string config_path;
  std::string out_dir = "ecpipe-out";
  std::optional<std::uint64_t> seed;  // replaces the configured seed list
  std::optional<int> window;          // graph window override
  std::optional<unsigned> threads;
  bool quiet = false;
};

// Each command loads the config and inputs, writes its tables as .csv and
// .txt under <out_dir>/<experiment digest>/ and returns that directory.
std::string run_ingest(const Options& options);
std::string run_label(const Options& options);
std::string run_sentiment(const Options& options);
std::string run_embed(const Options& options);
std::string run_graph(const Options& options);
std::string run_train(const Options& options);
std::string run_evaluate(const Options& options);
std::string run_regress(const Options& options);
std::string run_report(const Options& options);

}  // namespace ecpipe::cli
