#include "sibris/baselines.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace sibris {

std::string SchemeId::name() const {
  switch (kind) {
    case Scheme::Proposed: return "proposed";
    case Scheme::Sud: return "sud";
    case Scheme::Tdma: return "tdma";
    case Scheme::Proposed2bit: return "proposed_2bit";
    case Scheme::AaNoma: {
      const double dbm = 10.0 * std::log10(active_power) + 30.0;
      const long rounded = std::lround(dbm);
      std::string s = std::abs(dbm - static_cast<double>(rounded)) < 1e-9
                          ? std::to_string(rounded)
                          : std::to_string(dbm);
      return "aa_noma_" + s + "dbm";
    }
  }
  return "unknown";
}

void SchemeId::validate() const {
  if (kind == Scheme::AaNoma && !(active_power > 0.0))
    throw std::invalid_argument("AA-NOMA needs a positive ST power");
}

SchemeId parse_scheme(const std::string& text) {
  if (text == "proposed") return {Scheme::Proposed};
  if (text == "sud") return {Scheme::Sud};
  if (text == "tdma") return {Scheme::Tdma};
  if (text == "proposed_2bit") return {Scheme::Proposed2bit};
  const std::string prefix = "aa_noma_", suffix = "dbm";
  if (text.size() > prefix.size() + suffix.size() && text.rfind(prefix, 0) == 0 &&
      text.compare(text.size() - suffix.size(), suffix.size(), suffix) == 0) {
    const std::string num = text.substr(prefix.size(), text.size() - prefix.size() - suffix.size());
    std::size_t used = 0;
    double dbm = 0.0;
    try {
      dbm = std::stod(num, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == num.size()) return {Scheme::AaNoma, dbm_to_watts(dbm)};
  }
  throw std::invalid_argument("unknown scheme '" + text + "'");
}

double sud_wsse(const NetworkState& s, const ChannelSet& ch, const SystemParams& p) {
  return wsse(s, ch, p, Decoder::sud(ch.n_ris()));
}

TdmaReport tdma(const ChannelSet& ch, const SystemParams& p, const BcdConfig& cfg) {
  const int m = ch.n_ris();
  TdmaReport rep;
  rep.pu_rate = std::numeric_limits<double>::infinity();
  for (int j = 0; j < m; ++j) {
    SystemParams slot = p;
    if (p.weights.size() != 0) slot.weights = RVector::Constant(1, p.weight(j));
    RunReport r = run(ch.only(j), slot, cfg, Receiver::Sic);
    if (r.status == RunStatus::InitInfeasible) {
      rep.any_infeasible = true;
    } else {
      rep.wsse += r.wsse();
      rep.pu_rate = std::min(rep.pu_rate, r.pu_rate);
    }
    rep.outer_iters += r.outer_iterations();
    rep.slots.push_back(std::move(r));
  }
  rep.wsse /= static_cast<double>(m);
  if (!std::isfinite(rep.pu_rate)) rep.pu_rate = 0.0;
  return rep;
}

double tdma_wsse(const ChannelSet& ch, const SystemParams& p, const BcdConfig& cfg) {
  return tdma(ch, p, cfg).wsse;
}

double quantize_phase_2bit(double phase) {
  constexpr double step = std::numbers::pi / 2.0;
  double best_level = 0.0, best = std::numeric_limits<double>::infinity();
  for (int q = 0; q < 4; ++q) {
    const double level = q * step;
    const double d = std::abs(std::remainder(phase - level, 2.0 * std::numbers::pi));
    if (d < best - 1e-12) {
      best = d;
      best_level = level;
    }
  }
  return best_level;
}

CVector quantize_2bit(const CVector& phi) {
  CVector out(phi.size());
  for (Eigen::Index k = 0; k < phi.size(); ++k)
    out(k) = std::polar(1.0, quantize_phase_2bit(std::arg(phi(k))));
  return out;
}

namespace {

// Re-optimize delta for the current phases and beam; feasibility first, the
// surrogate second.
bool refit_delta(NetworkState& s, const ChannelSet& ch, const SystemParams& p,
                 const Decoder& dec) {
  const AuxVars aux = update_aux(s, ch, p, dec);
  try {
    NetworkState cand = s;
    cand.delta = solve_ps(build_ps_qp(aux, s, ch, p, dec));
    const bool was_feasible = constraint_report(s, ch, p).feasible(1e-6);
    const bool now_feasible = constraint_report(cand, ch, p).feasible(1e-6);
    if (now_feasible && (!was_feasible || f1(aux, cand, ch, p, dec) >= f1(aux, s, ch, p, dec)))
      s = std::move(cand);
  } catch (const SubproblemInfeasible&) {
  }
  return constraint_report(s, ch, p).feasible(1e-6);
}

}  // namespace

QuantizedReport quantize_run(const RunReport& continuous, const ChannelSet& ch,
                             const SystemParams& p, const BcdConfig& cfg) {
  QuantizedReport out;
  out.continuous = continuous;
  if (continuous.status == RunStatus::InitInfeasible) return out;
  const Decoder& dec = continuous.decoder;

  NetworkState s = continuous.final_state;
  for (auto& v : s.phi) v = quantize_2bit(v);
  bool ok = refit_delta(s, ch, p, dec);
  if (!ok) {
    const int m = ch.n_ris();
    const AuxVars zero{RVector::Constant(m, kAlphaFloor), CVector::Zero(m)};
    try {
      const BeamResult b = solve_beam(zero, s, ch, p, dec, cfg.beam, BeamMode::Feasibility);
      if (b.accepted) {
        s.w = b.w;
        out.beam_repaired = true;
      }
    } catch (const SubproblemInfeasible&) {
    }
    ok = refit_delta(s, ch, p, dec);
  }
  out.state = s;
  out.feasible = ok;
  if (ok) {
    out.wsse = wsse(s, ch, p, dec);
    out.pu_rate = pu_rate(s, ch, p);
  }
  return out;
}

QuantizedReport proposed_2bit(const ChannelSet& ch, const SystemParams& p,
                              const BcdConfig& cfg) {
  return quantize_run(run(ch, p, cfg, Receiver::Sic), ch, p, cfg);
}

AaNomaResult aa_noma(const ActiveChannelSet& ac, const SystemParams& p, double active_power) {
  if (!(active_power > 0.0)) throw std::invalid_argument("aa_noma: P_a must be positive");
  const int m = static_cast<int>(ac.st_ap.size());
  if (ac.st_pu.size() != ac.st_ap.size()) throw std::invalid_argument("aa_noma: ST link count");

  AaNomaResult res;
  const double hp = ac.h_p.norm();
  res.w = hp > 0.0 ? CVector(std::sqrt(p.P) * ac.h_p / hp) : CVector::Zero(ac.h_p.size());
  const double pu_signal = std::norm(ac.h_p.dot(res.w));

  RVector to_ap(m);
  double to_pu = 0.0;
  for (int j = 0; j < m; ++j) {
    const auto i = static_cast<std::size_t>(j);
    const double n = ac.st_ap[i].norm();
    const CVector v = n > 0.0 ? CVector(ac.st_ap[i] / n) : CVector::Zero(ac.st_ap[i].size());
    to_ap(j) = active_power * std::norm(ac.st_ap[i].dot(v));
    to_pu += active_power * std::norm(ac.st_pu[i].dot(v));
  }

  const double th = p.sinr_threshold();
  const double budget = th > 0.0 ? pu_signal / th - p.sigma2
                                 : std::numeric_limits<double>::infinity();
  if (budget <= 0.0) return res;
  res.feasible = true;
  res.scale = to_pu > 0.0 ? std::min(1.0, budget / to_pu) : 1.0;
  res.st_powers = res.scale * to_ap;

  const double floor = std::norm(ac.h.dot(res.w)) + p.sigma2;
  const Decoder dec = Decoder::sic(order_from_gains(res.st_powers));
  res.wsse = wsse_from_sinrs(sinrs_from_powers(res.st_powers, floor, dec), p);
  res.pu_rate = std::log2(1.0 + pu_signal / (res.scale * to_pu + p.sigma2));
  return res;
}

double aa_noma_wsse(const ActiveChannelSet& ac, const SystemParams& p, double active_power) {
  return aa_noma(ac, p, active_power).wsse;
}

}  // namespace sibris
