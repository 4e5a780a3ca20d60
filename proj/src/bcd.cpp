#include "sibris/bcd.hpp"

#include <cmath>

namespace sibris {

void BcdConfig::validate() const {
  if (!(outer_rel_tol > 0.0) || !(outer_abs_tol > 0.0) || max_outer < 1)
    throw std::invalid_argument("BcdConfig: tolerances must be positive, max_outer >= 1");
  if (!(init_delta_fraction > 0.0) || init_delta_fraction > 1.0)
    throw std::invalid_argument("BcdConfig: init_delta_fraction must lie in (0, 1]");
  refl.schedule.validate();
  beam.schedule.validate();
}

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Converged: return "converged";
    case RunStatus::MaxOuter: return "max_outer";
    case RunStatus::InitInfeasible: return "init_infeasible";
  }
  return "unknown";
}

double RunReport::max_decrease() const {
  double worst = 0.0;
  for (std::size_t t = 1; t < wsse_trace.size(); ++t)
    worst = std::max(worst, wsse_trace[t - 1] - wsse_trace[t]);
  return worst;
}

Decoder make_decoder(const ChannelSet& ch, const SystemParams& p, Receiver receiver) {
  return receiver == Receiver::Sic ? Decoder::sic(decoding_order(ch, p))
                                   : Decoder::sud(ch.n_ris());
}

namespace {

RVector init_delta(const NetworkState& s, const ChannelSet& ch, const SystemParams& p,
                   double fraction) {
  const int m = ch.n_ris();
  const double need = p.mu * ch.n_elements();
  RVector d(m);
  for (int j = 0; j < m; ++j) {
    const double incident = p.chi * (ch.F[static_cast<std::size_t>(j)] * s.w).squaredNorm();
    const double ratio = need <= 0.0 ? 1.0 : incident > 0.0 ? 1.0 - need / incident : 0.0;
    const double ub = std::sqrt(std::clamp(ratio, 0.0, 1.0));
    d(j) = std::clamp(fraction * ub, kDeltaLo, kDeltaHi);
  }
  return d;
}

bool fully_feasible(const NetworkState& s, const ChannelSet& ch, const SystemParams& p) {
  return constraint_report(s, ch, p).feasible(1e-6);
}

}  // namespace

std::optional<NetworkState> initialize(const ChannelSet& ch, const SystemParams& p,
                                       const BcdConfig& cfg) {
  const int m = ch.n_ris();
  NetworkState s;
  s.w = reference_beamformer(static_cast<int>(ch.n_antennas()), p.P);
  s.phi.assign(static_cast<std::size_t>(m), CVector::Ones(ch.n_elements()));
  s.delta = init_delta(s, ch, p, cfg.init_delta_fraction);
  if (fully_feasible(s, ch, p)) return s;

  // Zero-rate surrogate: only the constraints remain.
  const AuxVars zero{RVector::Constant(m, kAlphaFloor), CVector::Zero(m)};
  try {
    const BeamResult b = solve_beam(zero, s, ch, p, Decoder::sud(m), cfg.beam,
                                    BeamMode::Feasibility);
    if (b.accepted) {
      s.w = b.w;
      s.delta = init_delta(s, ch, p, cfg.init_delta_fraction);
    }
  } catch (const SubproblemInfeasible&) {
    return std::nullopt;
  }
  if (fully_feasible(s, ch, p)) return s;
  return std::nullopt;
}

RunReport run(const ChannelSet& ch, const SystemParams& p, const BcdConfig& cfg,
              Receiver receiver, const std::optional<NetworkState>& start) {
  ch.validate();
  p.validate(ch.n_ris());
  cfg.validate();

  RunReport rep;
  rep.decoder = make_decoder(ch, p, receiver);
  const Decoder& dec = rep.decoder;

  std::optional<NetworkState> init = start ? start : initialize(ch, p, cfg);
  if (!init) {
    rep.status = RunStatus::InitInfeasible;
    return rep;
  }
  NetworkState s = std::move(*init);
  check_state(s, ch);
  rep.wsse_trace.push_back(wsse(s, ch, p, dec));
  rep.status = RunStatus::MaxOuter;

  for (int t = 0; t < cfg.max_outer; ++t) {
    OuterStep step;

    const AuxVars aux = update_aux(s, ch, p, dec);
    step.fp_residual = std::abs(f1(aux, s, ch, p, dec) - weighted_sum_rate_nats(s, ch, p, dec));

    try {
      const ReflectionResult r = solve_reflection(aux, s, ch, p, dec, cfg.refl);
      step.refl_inner = r.inner_iterations;
      step.refl_rank_gap = r.max_rank_gap;
      step.refl_accepted = r.accepted;
      s.phi = r.phi;
    } catch (const SubproblemInfeasible&) {
    }

    try {
      const BeamResult b = solve_beam(aux, s, ch, p, dec, cfg.beam, BeamMode::Ascent);
      step.beam_inner = b.inner_iterations;
      step.beam_rank_gap = b.max_rank_gap;
      step.beam_accepted = b.accepted;
      s.w = b.w;
    } catch (const SubproblemInfeasible&) {
    }

    try {
      const RVector d = solve_ps(build_ps_qp(aux, s, ch, p, dec));
      NetworkState cand = s;
      cand.delta = d;
      if (f1(aux, cand, ch, p, dec) >= f1(aux, s, ch, p, dec) &&
          constraint_report(cand, ch, p).feasible(1e-6)) {
        s.delta = d;
        step.ps_accepted = true;
      }
    } catch (const SubproblemInfeasible&) {
    }

    rep.steps.push_back(step);
    const double prev = rep.wsse_trace.back();
    const double cur = wsse(s, ch, p, dec);
    rep.wsse_trace.push_back(cur);
    const double gain = cur - prev;
    if (std::abs(gain) <= cfg.outer_abs_tol ||
        (prev > 0.0 && gain / prev <= cfg.outer_rel_tol)) {
      rep.status = RunStatus::Converged;
      break;
    }
  }

  const RVector gamma = sinrs(s, ch, p, dec);
  rep.final_rates = gamma.unaryExpr([](double g) { return std::log2(1.0 + g); });
  rep.pu_rate = pu_rate(s, ch, p);
  rep.constraints = constraint_report(s, ch, p);
  rep.final_state = std::move(s);
  return rep;
}

}  // namespace sibris
