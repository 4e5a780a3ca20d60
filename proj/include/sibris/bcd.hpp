#ifndef SIBRIS_BCD_HPP
#define SIBRIS_BCD_HPP

#include <optional>
#include <string>
#include <vector>

#include "sibris/beam.hpp"
#include "sibris/ps.hpp"
#include "sibris/refl.hpp"

namespace sibris {

struct BcdConfig {
  double outer_rel_tol = 0.01;
  double outer_abs_tol = 1e-6;  // bits/s/Hz
  int max_outer = 50;
  DcLoopSettings refl;
  DcLoopSettings beam;
  double init_delta_fraction = 0.9;

  void validate() const;
};

enum class RunStatus { Converged, MaxOuter, InitInfeasible };
std::string to_string(RunStatus s);

/// Counters and diagnostics of one outer iteration.
struct OuterStep {
  int refl_inner = 0;
  int beam_inner = 0;
  double refl_rank_gap = 0.0;
  double beam_rank_gap = 0.0;
  bool refl_accepted = false;
  bool beam_accepted = false;
  bool ps_accepted = false;
  // |f1(aux*) - sum w_j ln(1 + gamma_j)| right after the aux update.
  double fp_residual = 0.0;
};

struct RunReport {
  std::vector<double> wsse_trace;  // bits/s/Hz, entry 0 is the initial point
  std::vector<OuterStep> steps;
  NetworkState final_state;
  RVector final_rates;  // per RIS, bits/s/Hz
  double pu_rate = 0.0;
  ConstraintReport constraints;
  RunStatus status = RunStatus::InitInfeasible;
  Decoder decoder;

  int outer_iterations() const { return static_cast<int>(steps.size()); }
  double wsse() const { return wsse_trace.empty() ? 0.0 : wsse_trace.back(); }
  // Largest drop between consecutive trace entries (0 for a monotone trace).
  double max_decrease() const;
};

/// Beamformer, unit phases and delta = fraction * EH bound. Returns nullopt
/// when no feasible start was found.
std::optional<NetworkState> initialize(const ChannelSet& ch, const SystemParams& p,
                                       const BcdConfig& cfg);

Decoder make_decoder(const ChannelSet& ch, const SystemParams& p, Receiver receiver);

RunReport run(const ChannelSet& ch, const SystemParams& p, const BcdConfig& cfg = {},
              Receiver receiver = Receiver::Sic,
              const std::optional<NetworkState>& start = std::nullopt);

}  // namespace sibris

#endif  // SIBRIS_BCD_HPP
