#ifndef SIBRIS_EXPERIMENT_HPP
#define SIBRIS_EXPERIMENT_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sibris/baselines.hpp"

namespace sibris {

/// Malformed configuration text; `line` is 1-based, 0 when unknown.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, unsigned long line)
      : std::runtime_error(what), line_(line) {}
  unsigned long line() const { return line_; }

 private:
  unsigned long line_;
};

/// Well-formed configuration whose values break one or more invariants.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  Scenario scenario;            // template; positions are drawn per drop
  std::optional<int> upa_columns;
  SystemParams params;          // watts
  double p_dbm = 34.0;
  double sigma2_dbw = -80.0;

  std::vector<SchemeId> schemes{{Scheme::Proposed}};
  std::string sweep_var = "none";  // K, P_dbm, N, M, r_th or none
  std::vector<double> sweep_values;
  int n_drops = 20;
  std::uint64_t master_seed = 1;
  std::string output_path;
  std::string trace_path;  // optional per-iteration WSSE traces
  int jobs = 1;
  bool deterministic_timing = false;  // write wall_ms = 0

  BcdConfig bcd;

  /// Throws ValidationError listing every violated invariant.
  void validate() const;
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config(const std::string& path);

/// Scenario and parameters for one sweep point.
struct SweepPoint {
  Scenario scenario;
  SystemParams params;
};
SweepPoint apply_sweep(const ExperimentConfig& cfg, std::optional<double> value);

struct ResultRow {
  std::string scheme;
  std::string sweep_var;
  std::optional<double> sweep_value;
  int drop = 0;
  std::uint64_t seed = 0;
  double wsse = 0.0;
  double pu_rate = 0.0;
  std::string status;
  int outer_iters = 0;
  double wall_ms = 0.0;
  std::vector<double> trace;  // outer-iteration WSSE, BCD schemes only
};

inline constexpr const char* kCsvHeader =
    "scheme,sweep_var,sweep_value,drop,seed,wsse_bps_hz,pu_rate_bps_hz,status,outer_iters,wall_ms";

/// All schemes on one drop at one sweep point.
std::vector<ResultRow> evaluate_drop(const ExperimentConfig& cfg,
                                     std::optional<double> sweep_value, int drop);

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

/// Rows ordered by sweep value, then drop, then scheme as configured.
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg,
                                      const ProgressFn& progress = {});

std::string format_csv(const std::vector<ResultRow>& rows);
std::string format_trace_csv(const std::vector<ResultRow>& rows);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace sibris

#endif  // SIBRIS_EXPERIMENT_HPP
