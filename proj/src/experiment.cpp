#include "sibris/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace sibris {

namespace {

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class T>
bool parse_number(const std::string& text, T& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  const char* end = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(t.data(), end, out);
  return ec == std::errc() && ptr == end;
}

// Typed access to one section; every failure lands in `problems`.
class Section {
 public:
  Section(std::string name, const boost::property_tree::ptree* tree,
          std::vector<std::string>& problems)
      : name_(std::move(name)), tree_(tree), problems_(problems) {}

  template <class T>
  void get(const std::string& key, T& target) {
    const auto raw = lookup(key);
    if (!raw) return;
    T v{};
    if (parse_number(*raw, v))
      target = v;
    else
      problems_.push_back(name_ + "." + key + ": cannot parse '" + *raw + "'");
  }

  void get_bool(const std::string& key, bool& target) {
    const auto raw = lookup(key);
    if (!raw) return;
    const std::string v = trim(*raw);
    if (v == "true" || v == "1" || v == "yes")
      target = true;
    else if (v == "false" || v == "0" || v == "no")
      target = false;
    else
      problems_.push_back(name_ + "." + key + ": expected true/false, got '" + v + "'");
  }

  void get_string(const std::string& key, std::string& target) {
    if (const auto raw = lookup(key)) target = trim(*raw);
  }

  std::optional<std::vector<double>> get_list(const std::string& key) {
    const auto raw = lookup(key);
    if (!raw) return std::nullopt;
    std::vector<double> out;
    for (const auto& item : split_list(*raw)) {
      double v = 0.0;
      if (parse_number(item, v))
        out.push_back(v);
      else
        problems_.push_back(name_ + "." + key + ": cannot parse '" + item + "'");
    }
    return out;
  }

  std::optional<std::string> lookup(const std::string& key) {
    used_.insert(key);
    if (!tree_) return std::nullopt;
    const auto it = tree_->find(key);
    if (it == tree_->not_found()) return std::nullopt;
    return it->second.data();
  }

  void report_unknown() const {
    if (!tree_) return;
    for (const auto& [key, _] : *tree_)
      if (!used_.count(key)) problems_.push_back("unknown key " + name_ + "." + key);
  }

 private:
  std::string name_;
  const boost::property_tree::ptree* tree_;
  std::vector<std::string>& problems_;
  std::set<std::string> used_;
};

const std::set<std::string> kSweepVars{"none", "K", "P_dbm", "N", "M", "r_th"};

bool is_positive_integer(double v) { return v >= 1.0 && v == std::floor(v) && v < 1e6; }

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> problems)
    : std::runtime_error("invalid configuration: " + join(problems, "; ")),
      problems_(std::move(problems)) {}

void ExperimentConfig::validate() const {
  std::vector<std::string> bad;
  auto check = [&](bool ok, const std::string& msg) {
    if (!ok) bad.push_back(msg);
  };
  check(scenario.n_pt_antennas >= 1, "scenario.n_antennas must be >= 1");
  check(scenario.n_ris >= 1, "scenario.n_ris must be >= 1");
  check(scenario.elements_per_ris >= 1, "scenario.elements must be >= 1");
  if (upa_columns)
    check(*upa_columns >= 1 && scenario.elements_per_ris % *upa_columns == 0,
          "scenario.upa_columns must divide scenario.elements");
  check(scenario.rician_kappa >= 0.0, "scenario.kappa must be >= 0");
  check(scenario.spacing_ratio > 0.0, "scenario.spacing_ratio must be > 0");
  check(std::isfinite(p_dbm), "params.p_dbm must be finite");
  check(std::isfinite(sigma2_dbw), "params.sigma2_dbw must be finite");
  check(params.chi > 0.0 && params.chi <= 1.0, "params.chi must lie in (0, 1]");
  check(params.mu >= 0.0, "params.mu must be >= 0");
  check(params.r_th >= 0.0, "params.r_th must be >= 0");
  if (params.weights.size() != 0) {
    check(params.weights.size() == scenario.n_ris, "params.weights needs one entry per RIS");
    check((params.weights.array() >= 0.0).all(), "params.weights must be nonnegative");
    check(sweep_var != "M", "params.weights cannot be combined with an M sweep");
  }
  check(!schemes.empty(), "experiment.schemes must name at least one scheme");
  for (const auto& s : schemes)
    check(s.kind != Scheme::AaNoma || s.active_power > 0.0, "AA-NOMA power must be positive");
  check(kSweepVars.count(sweep_var) == 1,
        "experiment.sweep_var must be one of none, K, P_dbm, N, M, r_th");
  if (sweep_var == "none") {
    check(sweep_values.empty(), "experiment.sweep_values given without sweep_var");
  } else {
    check(!sweep_values.empty(), "experiment.sweep_values must be nonempty for a sweep");
    for (double v : sweep_values) {
      if (sweep_var == "K" || sweep_var == "N" || sweep_var == "M")
        check(is_positive_integer(v), "sweep value " + format_number(v) + " for " + sweep_var +
                                          " must be a positive integer");
      if (sweep_var == "r_th") check(v >= 0.0, "r_th sweep values must be >= 0");
      if (sweep_var == "K" && upa_columns)
        check(static_cast<long>(v) % *upa_columns == 0,
              "sweep value " + format_number(v) + " not divisible by scenario.upa_columns");
    }
  }
  check(n_drops >= 1, "experiment.n_drops must be >= 1");
  check(jobs >= 0, "experiment.jobs must be >= 0");
  check(bcd.outer_rel_tol > 0.0 && bcd.outer_abs_tol > 0.0, "solver tolerances must be > 0");
  check(bcd.max_outer >= 1, "solver.max_outer must be >= 1");
  check(bcd.init_delta_fraction > 0.0 && bcd.init_delta_fraction <= 1.0,
        "solver.init_delta_fraction must lie in (0, 1]");
  const auto& sch = bcd.refl.schedule;
  check(sch.rho0 > 0.0 && sch.scale_c > 1.0 && sch.rho_max >= sch.rho0,
        "solver penalty schedule needs rho0 > 0, scale_c > 1, rho_max >= rho0");
  check(bcd.refl.max_inner >= 1 && bcd.refl.inner_tol > 0.0,
        "solver.max_inner >= 1 and solver.inner_tol > 0 required");
  check(bcd.refl.sdp.tol > 0.0 && bcd.refl.sdp.max_iters >= 1,
        "solver.sdp_tol > 0 and solver.sdp_max_iters >= 1 required");
  if (!bad.empty()) throw ValidationError(bad);
}

ExperimentConfig parse_config_text(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError(e.message(), e.line());
  }

  std::vector<std::string> problems;
  static const std::set<std::string> sections{"scenario", "params", "experiment", "solver"};
  for (const auto& [name, sub] : tree) {
    if (sub.empty() && !sub.data().empty())
      problems.push_back("key '" + name + "' must sit inside a section");
    else if (!sections.count(name))
      problems.push_back("unknown section [" + name + "]");
  }
  auto section = [&](const std::string& name) {
    const auto it = tree.find(name);
    return Section(name, it == tree.not_found() ? nullptr : &it->second, problems);
  };

  ExperimentConfig cfg;
  {
    Section s = section("scenario");
    s.get("n_antennas", cfg.scenario.n_pt_antennas);
    s.get("n_ris", cfg.scenario.n_ris);
    s.get("elements", cfg.scenario.elements_per_ris);
    int cols = 0;
    if (s.lookup("upa_columns")) {
      s.get("upa_columns", cols);
      cfg.upa_columns = cols;
    }
    s.get("kappa", cfg.scenario.rician_kappa);
    s.get("beta0_db", cfg.scenario.beta0_db);
    s.get("spacing_ratio", cfg.scenario.spacing_ratio);
    s.report_unknown();
  }
  {
    Section s = section("params");
    s.get("p_dbm", cfg.p_dbm);
    s.get("sigma2_dbw", cfg.sigma2_dbw);
    s.get("chi", cfg.params.chi);
    s.get("mu", cfg.params.mu);
    s.get("r_th", cfg.params.r_th);
    if (auto w = s.get_list("weights"))
      cfg.params.weights = Eigen::Map<const RVector>(w->data(), static_cast<Eigen::Index>(w->size()));
    s.report_unknown();
  }
  {
    Section s = section("experiment");
    if (auto raw = s.lookup("schemes")) {
      cfg.schemes.clear();
      for (const auto& name : split_list(*raw)) {
        try {
          cfg.schemes.push_back(parse_scheme(name));
        } catch (const std::invalid_argument& e) {
          problems.push_back(std::string("experiment.schemes: ") + e.what());
        }
      }
    }
    s.get_string("sweep_var", cfg.sweep_var);
    if (auto v = s.get_list("sweep_values")) cfg.sweep_values = *v;
    s.get("n_drops", cfg.n_drops);
    s.get("master_seed", cfg.master_seed);
    s.get_string("output", cfg.output_path);
    s.get_string("trace_output", cfg.trace_path);
    s.get("jobs", cfg.jobs);
    s.get_bool("deterministic_timing", cfg.deterministic_timing);
    s.report_unknown();
  }
  {
    Section s = section("solver");
    s.get("outer_rel_tol", cfg.bcd.outer_rel_tol);
    s.get("max_outer", cfg.bcd.max_outer);
    s.get("init_delta_fraction", cfg.bcd.init_delta_fraction);
    DcLoopSettings& d = cfg.bcd.refl;
    s.get("rho0", d.schedule.rho0);
    s.get("scale_c", d.schedule.scale_c);
    s.get("rho_max", d.schedule.rho_max);
    s.get("inner_tol", d.inner_tol);
    s.get("max_inner", d.max_inner);
    s.get("rank_tol", d.rank_tol);
    s.get("sdp_tol", d.sdp.tol);
    s.get("sdp_max_iters", d.sdp.max_iters);
    cfg.bcd.beam = d;
    s.report_unknown();
  }
  if (!problems.empty()) throw ValidationError(problems);

  if (cfg.upa_columns) cfg.scenario.kx = *cfg.upa_columns;
  else if (cfg.scenario.elements_per_ris >= 1)
    cfg.scenario.kx = default_upa_columns(cfg.scenario.elements_per_ris);
  cfg.params.P = dbm_to_watts(cfg.p_dbm);
  cfg.params.sigma2 = dbw_to_watts(cfg.sigma2_dbw);
  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

SweepPoint apply_sweep(const ExperimentConfig& cfg, std::optional<double> value) {
  SweepPoint pt{cfg.scenario, cfg.params};
  if (!value || cfg.sweep_var == "none") return pt;
  const double v = *value;
  if (cfg.sweep_var == "K") {
    pt.scenario.elements_per_ris = static_cast<int>(v);
    pt.scenario.kx = cfg.upa_columns ? *cfg.upa_columns : default_upa_columns(static_cast<int>(v));
  } else if (cfg.sweep_var == "N") {
    pt.scenario.n_pt_antennas = static_cast<int>(v);
  } else if (cfg.sweep_var == "M") {
    pt.scenario.n_ris = static_cast<int>(v);
  } else if (cfg.sweep_var == "P_dbm") {
    pt.params.P = dbm_to_watts(v);
  } else if (cfg.sweep_var == "r_th") {
    pt.params.r_th = v;
  }
  return pt;
}

namespace {

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

void fill_from_run(ResultRow& row, const RunReport& r) {
  row.status = to_string(r.status);
  row.outer_iters = r.outer_iterations();
  row.trace = r.wsse_trace;
  if (r.status != RunStatus::InitInfeasible) {
    row.wsse = r.wsse();
    row.pu_rate = r.pu_rate;
  }
}

}  // namespace

std::vector<ResultRow> evaluate_drop(const ExperimentConfig& cfg,
                                     std::optional<double> sweep_value, int drop) {
  const SweepPoint pt = apply_sweep(cfg, sweep_value);
  const std::uint64_t seed = derive_seed(cfg.master_seed, static_cast<std::uint64_t>(drop));

  std::vector<ResultRow> rows;
  const Scenario sc = draw_scenario(pt.scenario, seed);
  const ChannelSet ch = draw_channels(sc, seed);
  std::optional<RunReport> proposed;

  for (const SchemeId& id : cfg.schemes) {
    ResultRow row;
    row.scheme = id.name();
    row.sweep_var = cfg.sweep_var;
    row.sweep_value = sweep_value;
    row.drop = drop;
    row.seed = seed;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      switch (id.kind) {
        case Scheme::Proposed:
          if (!proposed) proposed = run(ch, pt.params, cfg.bcd, Receiver::Sic);
          fill_from_run(row, *proposed);
          break;
        case Scheme::Sud:
          fill_from_run(row, run(ch, pt.params, cfg.bcd, Receiver::Sud));
          break;
        case Scheme::Tdma: {
          const TdmaReport t = tdma(ch, pt.params, cfg.bcd);
          row.wsse = t.wsse;
          row.pu_rate = t.pu_rate;
          row.outer_iters = t.outer_iters;
          row.status = t.any_infeasible ? "slot_infeasible" : "converged";
          for (const auto& s : t.slots)
            if (s.status == RunStatus::MaxOuter && !t.any_infeasible) row.status = "max_outer";
          break;
        }
        case Scheme::Proposed2bit: {
          if (!proposed) proposed = run(ch, pt.params, cfg.bcd, Receiver::Sic);
          const QuantizedReport q = quantize_run(*proposed, ch, pt.params, cfg.bcd);
          row.outer_iters = proposed->outer_iterations();
          row.trace = proposed->wsse_trace;
          if (proposed->status == RunStatus::InitInfeasible) {
            row.status = to_string(proposed->status);
          } else if (!q.feasible) {
            row.status = "quantized_infeasible";
          } else {
            row.status = q.beam_repaired ? "repaired" : to_string(proposed->status);
            row.wsse = q.wsse;
            row.pu_rate = q.pu_rate;
          }
          break;
        }
        case Scheme::AaNoma: {
          const ActiveChannelSet ac = draw_active_channels(sc, seed);
          const AaNomaResult a = aa_noma(ac, pt.params, id.active_power);
          row.status = a.feasible ? "ok" : "infeasible";
          row.wsse = a.wsse;
          row.pu_rate = a.pu_rate;
          break;
        }
      }
    } catch (const std::exception& e) {
      row.status = "error";
      row.wsse = 0.0;
      row.pu_rate = 0.0;
    }
    row.wall_ms = cfg.deterministic_timing ? 0.0 : elapsed_ms(t0);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg, const ProgressFn& progress) {
  cfg.validate();
  std::vector<std::optional<double>> points;
  if (cfg.sweep_var == "none")
    points.push_back(std::nullopt);
  else
    for (double v : cfg.sweep_values) points.push_back(v);

  const std::size_t total = points.size() * static_cast<std::size_t>(cfg.n_drops);
  std::vector<std::vector<ResultRow>> results(total);
  std::atomic<std::size_t> next{0}, done{0};
  std::mutex progress_mutex;

  auto worker = [&] {
    for (std::size_t idx = next++; idx < total; idx = next++) {
      const auto point = points[idx / static_cast<std::size_t>(cfg.n_drops)];
      const int drop = static_cast<int>(idx % static_cast<std::size_t>(cfg.n_drops));
      results[idx] = evaluate_drop(cfg, point, drop);
      const std::size_t d = ++done;
      if (progress) {
        std::lock_guard lock(progress_mutex);
        progress(d, total);
      }
    }
  };

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t n_threads =
      std::min<std::size_t>(total, cfg.jobs == 0 ? hw : static_cast<unsigned>(cfg.jobs));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::vector<ResultRow> rows;
  for (auto& r : results)
    for (auto& row : r) rows.push_back(std::move(row));
  return rows;
}

std::string format_csv(const std::vector<ResultRow>& rows) {
  std::string out = std::string(kCsvHeader) + "\n";
  char buf[64];
  for (const auto& r : rows) {
    out += r.scheme + "," + r.sweep_var + ",";
    if (r.sweep_value) out += format_number(*r.sweep_value);
    out += "," + std::to_string(r.drop) + "," + std::to_string(r.seed) + ",";
    out += format_number(r.wsse) + "," + format_number(r.pu_rate) + ",";
    out += r.status + "," + std::to_string(r.outer_iters) + ",";
    std::snprintf(buf, sizeof buf, "%.3f", r.wall_ms);
    out += std::string(buf) + "\n";
  }
  return out;
}

std::string format_trace_csv(const std::vector<ResultRow>& rows) {
  std::string out = "scheme,sweep_var,sweep_value,drop,iteration,wsse_bps_hz\n";
  for (const auto& r : rows) {
    for (std::size_t t = 0; t < r.trace.size(); ++t) {
      out += r.scheme + "," + r.sweep_var + ",";
      if (r.sweep_value) out += format_number(*r.sweep_value);
      out += "," + std::to_string(r.drop) + "," + std::to_string(t) + "," +
             format_number(r.trace[t]) + "\n";
    }
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace sibris
