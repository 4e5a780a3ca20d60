#include <cstdio>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "sibris/experiment.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string trace;
  std::optional<int> jobs;
  bool deterministic = false;
  bool quiet = false;
  std::string var;
  std::string values;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "experiment configuration file")->required();
  cmd->add_option("--seed", o.seed, "master seed (overrides the config)");
  cmd->add_option("--out", o.out, "CSV output path (stdout when absent everywhere)");
  cmd->add_option("--trace", o.trace, "per-iteration WSSE trace CSV");
  cmd->add_option("--jobs", o.jobs, "worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);
  cmd->add_flag("--deterministic", o.deterministic, "write wall_ms = 0 for byte-stable output");
  cmd->add_flag("-q,--quiet", o.quiet, "no progress on stderr");
}

int execute(const Overrides& o, bool sweep) {
  sibris::ExperimentConfig cfg = sibris::parse_config(o.config);
  if (o.seed) cfg.master_seed = *o.seed;
  if (!o.out.empty()) cfg.output_path = o.out;
  if (!o.trace.empty()) cfg.trace_path = o.trace;
  if (o.jobs) cfg.jobs = *o.jobs;
  if (o.deterministic) cfg.deterministic_timing = true;
  if (sweep) {
    cfg.sweep_var = o.var;
    cfg.sweep_values.clear();
    std::stringstream ss(o.values);
    std::string item;
    std::vector<std::string> bad;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        cfg.sweep_values.push_back(std::stod(item, &used));
        if (used != item.size()) bad.push_back("bad sweep value '" + item + "'");
      } catch (const std::exception&) {
        bad.push_back("bad sweep value '" + item + "'");
      }
    }
    if (!bad.empty()) throw sibris::ValidationError(bad);
  }
  cfg.validate();

  sibris::ProgressFn progress;
  if (!o.quiet)
    progress = [](std::size_t done, std::size_t total) {
      std::fprintf(stderr, "\r%zu/%zu drops", done, total);
      if (done == total) std::fputc('\n', stderr);
    };
  const auto rows = sibris::run_experiment(cfg, progress);
  const std::string csv = sibris::format_csv(rows);
  if (cfg.output_path.empty())
    std::cout << csv;
  else
    sibris::write_text_file(cfg.output_path, csv);
  if (!cfg.trace_path.empty()) sibris::write_text_file(cfg.trace_path, sibris::format_trace_csv(rows));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SIB-RIS NOMA cognitive radio joint optimization experiments"};
  app.require_subcommand(1);
  Overrides o;
  CLI::App* run_cmd = app.add_subcommand("run", "run the configured experiment");
  add_common(run_cmd, o);
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "run the experiment over one swept variable");
  add_common(sweep_cmd, o);
  sweep_cmd->add_option("--var", o.var, "K, P_dbm, N, M or r_th")->required();
  sweep_cmd->add_option("--values", o.values, "comma-separated values")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    return execute(o, sweep_cmd->parsed());
  } catch (const sibris::ParseError& e) {
    std::cerr << o.config << ":" << e.line() << ": " << e.what() << "\n";
    return kExitConfig;
  } catch (const sibris::ValidationError& e) {
    for (const auto& p : e.problems()) std::cerr << "config: " << p << "\n";
    return kExitConfig;
  } catch (const sibris::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  }
}
