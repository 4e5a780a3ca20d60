#ifndef SIBRIS_BASELINES_HPP
#define SIBRIS_BASELINES_HPP

#include <string>
#include <vector>

#include "sibris/bcd.hpp"

namespace sibris {

enum class Scheme { Proposed, Sud, Tdma, Proposed2bit, AaNoma };

struct SchemeId {
  Scheme kind = Scheme::Proposed;
  double active_power = 0.0;  // W, AA-NOMA only

  // "proposed", "sud", "tdma", "proposed_2bit", "aa_noma_<dBm>dbm"
  std::string name() const;
  void validate() const;
};

/// Parses the names produced by SchemeId::name(); "aa_noma_15dbm" style.
SchemeId parse_scheme(const std::string& text);

/// Outcome of one scheme on one drop.
struct SchemeOutcome {
  double wsse = 0.0;     // bits/s/Hz
  double pu_rate = 0.0;  // bits/s/Hz
  std::string status;
  int outer_iters = 0;
};

// gamma_j = S_j / (sum_{i != j} S_i + |h^H w|^2 + sigma^2), summed as WSSE.
double sud_wsse(const NetworkState& s, const ChannelSet& ch, const SystemParams& p);

/// One equal slot per RIS, each running the single-RIS pipeline.
struct TdmaReport {
  std::vector<RunReport> slots;
  double wsse = 0.0;     // (1/M) sum of slot rates
  double pu_rate = 0.0;  // worst slot
  int outer_iters = 0;   // summed over slots
  bool any_infeasible = false;
};

TdmaReport tdma(const ChannelSet& ch, const SystemParams& p, const BcdConfig& cfg = {});
double tdma_wsse(const ChannelSet& ch, const SystemParams& p, const BcdConfig& cfg = {});

/// Snap every phase to the nearest of {0, pi/2, pi, 3pi/2}; ties go to the
/// smaller level.
CVector quantize_2bit(const CVector& phi);
double quantize_phase_2bit(double phase);

struct QuantizedReport {
  RunReport continuous;
  NetworkState state;  // quantized phases, re-optimized delta (and w on repair)
  double wsse = 0.0;
  double pu_rate = 0.0;
  bool feasible = false;
  bool beam_repaired = false;
};

QuantizedReport proposed_2bit(const ChannelSet& ch, const SystemParams& p,
                              const BcdConfig& cfg = {});
/// The quantization stage alone, applied to a finished continuous run.
QuantizedReport quantize_run(const RunReport& continuous, const ChannelSet& ch,
                             const SystemParams& p, const BcdConfig& cfg = {});

struct AaNomaResult {
  double wsse = 0.0;
  double pu_rate = 0.0;
  double scale = 0.0;  // common ST power scaling in [0, 1]
  bool feasible = false;
  CVector w;
  RVector st_powers;  // received ST powers at the AP
};

/// PT beams to the PU at full power, each ST beams to the AP with power
/// scale * P_a, scale being the largest value in [0, 1] that keeps the PU
/// rate above threshold.
AaNomaResult aa_noma(const ActiveChannelSet& ac, const SystemParams& p, double active_power);
double aa_noma_wsse(const ActiveChannelSet& ac, const SystemParams& p, double active_power);

}  // namespace sibris

#endif  // SIBRIS_BASELINES_HPP
