// Acceptance suite: one PASS/FAIL line per criterion, desk scale
// (M = 2, K = 8, N = 4, 20 seeded drops unless stated otherwise).

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "sibris/experiment.hpp"

using namespace sibris;

namespace {

constexpr std::uint64_t kMaster = 2024;
constexpr int kDrops = 20;

int failures = 0;

void report(bool ok, const std::string& name, const std::string& detail) {
  std::printf("%s  %-28s %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[200];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// a >= b up to solver noise
bool at_least(double a, double b) { return a >= b - 1e-6 * std::max(1.0, std::abs(b)); }

ChannelSet desk_drop(int drop) {
  const std::uint64_t seed = derive_seed(kMaster, static_cast<std::uint64_t>(drop));
  Scenario tmpl;
  tmpl.n_ris = 2;
  tmpl.elements_per_ris = 8;
  tmpl.kx = default_upa_columns(8);
  tmpl.n_pt_antennas = 4;
  return draw_channels(draw_scenario(tmpl, seed), seed);
}

CVector random_cvector(Eigen::Index n, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> nd(0.0, scale / std::sqrt(2.0));
  CVector v(n);
  for (auto& x : v) x = Complex(nd(rng), nd(rng));
  return v;
}

NetworkState random_state(const ChannelSet& ch, double power, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, 0.95), ph(-M_PI, M_PI);
  NetworkState s;
  s.w = random_cvector(ch.n_antennas(), rng, 1.0);
  s.w *= std::sqrt(power * u(rng)) / s.w.norm();
  for (int j = 0; j < ch.n_ris(); ++j) {
    CVector v(ch.n_elements());
    for (auto& x : v) x = std::polar(1.0, ph(rng));
    s.phi.push_back(v);
  }
  s.delta = RVector(ch.n_ris());
  for (auto& d : s.delta) d = u(rng);
  return s;
}

std::vector<double> column(const std::vector<ResultRow>& rows, const std::string& scheme,
                           std::optional<double> value) {
  std::vector<double> out;
  for (const auto& r : rows)
    if (r.scheme == scheme && r.sweep_value == value) out.push_back(r.wsse);
  return out;
}

std::vector<ResultRow> sweep(const std::string& schemes, const std::string& var,
                             const std::string& values, int n_ris = 2) {
  ExperimentConfig cfg = parse_config_text(
      "[scenario]\nn_antennas = 4\nn_ris = " + std::to_string(n_ris) +
      "\nelements = 8\n[experiment]\nschemes = " + schemes + "\nsweep_var = " + var +
      "\nsweep_values = " + values + "\nn_drops = " + std::to_string(kDrops) +
      "\nmaster_seed = " + std::to_string(kMaster) + "\njobs = 0\n");
  return run_experiment(cfg);
}

}  // namespace

int main() {
  const auto suite_start = std::chrono::steady_clock::now();
  const SystemParams p;

  // Desk-scale Proposed runs shared by several criteria.
  std::vector<ChannelSet> channels;
  std::vector<RunReport> runs;
  const auto t0 = std::chrono::steady_clock::now();
  for (int d = 0; d < kDrops; ++d) {
    channels.push_back(desk_drop(d));
    runs.push_back(run(channels.back(), p));
  }
  const double desk_minutes =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / 60.0;

  {
    double worst_drop = 0.0;
    int worst_iters = 0, infeasible = 0, unconverged = 0;
    for (const auto& r : runs) {
      if (r.status == RunStatus::InitInfeasible) {
        ++infeasible;
        continue;
      }
      if (r.status != RunStatus::Converged) ++unconverged;
      worst_drop = std::max(worst_drop, r.max_decrease());
      worst_iters = std::max(worst_iters, r.outer_iterations());
    }
    const bool ok = worst_drop <= 1e-6 && worst_iters <= 30 && unconverged == 0 &&
                    infeasible == 0 && desk_minutes < 10.0;
    report(ok, "monotone-bcd",
           fmt("max decrease %.2e, max outer iters %.0f, suite %.2f min", worst_drop, worst_iters,
               desk_minutes) +
               fmt(", unconverged %.0f, init-infeasible %.0f", unconverged, infeasible));
  }

  {
    double worst = 0.0;
    for (const auto& r : runs)
      for (const auto& s : r.steps) worst = std::max(worst, s.fp_residual);
    report(worst <= 1e-9, "fp-fixed-point", fmt("max |f1(aux*) - sum w ln(1+g)| = %.2e", worst));
  }

  {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 5.0);
    double worst = 0.0;
    for (int t = 0; t < 200; ++t) {
      const ChannelSet& ch = channels[static_cast<std::size_t>(t % kDrops)];
      const NetworkState s = random_state(ch, p.P, rng);
      const Decoder dec = Decoder::sic(decoding_order(ch, p));
      const RVector gamma = sinrs(s, ch, p, dec);
      const RVector b = quadratic_denominators(s, ch, p, dec);
      for (int j = 0; j < ch.n_ris(); ++j) {
        const double alpha = u(rng), weight = 0.5 + u(rng);
        const Complex a = effective_gain(j, s, ch);
        const Complex beta = std::sqrt(weight * (1.0 + alpha)) * a / b(j);
        const double got = quadratic_transform_term(weight, alpha, beta, a, b(j));
        const double want = weight * (1.0 + alpha) * gamma(j) / (1.0 + gamma(j));
        worst = std::max(worst, std::abs(got - want));
      }
    }
    report(worst <= 1e-9, "qt-optimum", fmt("max deviation %.2e over 200 random states", worst));
  }

  {
    std::mt19937_64 rng(6);
    double worst = 0.0;
    int perms = 0;
    for (int m = 1; m <= 4; ++m) {
      for (int t = 0; t < 10; ++t) {
        ChannelSet ch;
        ch.h = random_cvector(3, rng, 1e-4);
        ch.h_p = random_cvector(3, rng, 1e-3);
        for (int j = 0; j < m; ++j) {
          CMatrix f(6, 3);
          for (int c = 0; c < 3; ++c) f.col(c) = random_cvector(6, rng, 3e-2);
          ch.F.push_back(f);
          ch.g.push_back(random_cvector(6, rng, 3e-2));
          ch.g_p.push_back(random_cvector(6, rng, 1e-2));
        }
        const NetworkState s = random_state(ch, p.P, rng);
        std::vector<int> order(static_cast<std::size_t>(m));
        std::iota(order.begin(), order.end(), 0);
        double first = -1.0;
        do {
          const RVector g = sic_sinrs(s, ch, p, order);
          const double sum = g.unaryExpr([](double x) { return std::log2(1.0 + x); }).sum();
          if (first < 0.0) first = sum;
          worst = std::max(worst, std::abs(sum - first) / first);
          ++perms;
        } while (std::next_permutation(order.begin(), order.end()));
      }
    }
    report(worst <= 1e-9, "sic-telescoping",
           fmt("max relative spread %.2e over %.0f orders (M = 1..4)", worst, perms));
  }

  {
    double worst_refl = 0.0, worst_beam = 0.0;
    for (const auto& r : runs)
      for (const auto& s : r.steps) {
        worst_refl = std::max(worst_refl, s.refl_rank_gap);
        worst_beam = std::max(worst_beam, s.beam_rank_gap);
      }
    report(worst_refl <= 1e-3 && worst_beam <= 1e-3, "rank-one-quality",
           fmt("max (Tr - s_max)/Tr: reflection %.2e, beam %.2e", worst_refl, worst_beam));
  }

  {
    double um = 0.0, power = 0.0, worst = 1e300;
    int checked = 0;
    for (const auto& r : runs) {
      if (r.status != RunStatus::Converged) continue;
      ++checked;
      um = std::max(um, r.constraints.unit_modulus_error);
      power = std::max(power, r.final_state.w.squaredNorm() / p.P - 1.0);
      worst = std::min({worst, r.constraints.qos_rel,
                        *std::min_element(r.constraints.eh_rel.begin(), r.constraints.eh_rel.end())});
    }
    report(checked > 0 && um <= 1e-12 && power <= 1e-9 && worst >= -1e-6, "final-feasibility",
           fmt("unit-modulus err %.1e, ||w||^2/P - 1 = %.1e, worst EH/QoS rel slack %.2e", um, power,
               worst));
  }

  {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 1e300;
    bool feasible = true;
    for (int t = 0; t < 50; ++t) {
      PsQp qp{RVector(2), RVector(2), RVector(2), RVector(2), 0.05 + 0.8 * u(rng)};
      for (int i = 0; i < 2; ++i) {
        qp.a(i) = 3.0 * u(rng) - 0.5;
        qp.c(i) = 2.0 * u(rng);
        qp.box_upper(i) = 0.3 + 0.7 * u(rng);
        qp.qos_k(i) = u(rng);
      }
      const RVector d = solve_ps(qp);
      feasible = feasible && qp.qos_k.dot(d.cwiseAbs2()) <= qp.qos_C * (1.0 + 1e-9);
      double best = -1e300;
      for (double x = kDeltaLo; x <= std::min(qp.box_upper(0), kDeltaHi); x += 0.005)
        for (double y = kDeltaLo; y <= std::min(qp.box_upper(1), kDeltaHi); y += 0.005) {
          RVector g(2);
          g << x, y;
          if (qp.qos_k.dot(g.cwiseAbs2()) <= qp.qos_C) best = std::max(best, qp.objective(g));
        }
      worst = std::min(worst, qp.objective(d) - best);
    }
    report(feasible && worst >= -1e-3, "ps-oracle",
           fmt("min (solver - grid) over 50 QPs = %.2e", worst));
  }

  {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> nd(0.0, 1.0);
    double worst = 0.0;
    bool optimal = true;
    for (int t = 0; t < 30; ++t) {
      HermitianMatrix c(2, 2);
      const Complex off(nd(rng), nd(rng));
      c << nd(rng), off, std::conj(off), nd(rng);
      SdpProblem prob = SdpProblem::single_block(c);
      HermitianMatrix e0 = HermitianMatrix::Zero(2, 2), e1 = e0;
      e0(0, 0) = 1.0;
      e1(1, 1) = 1.0;
      prob.add_equality(e0, 1.0);
      prob.add_equality(e1, 1.0);
      const SdpSolution s = solve_sdp(prob);
      optimal = optimal && s.status == SdpStatus::Optimal;
      // X = [[1, z], [conj z, 1]], |z| <= 1; brute force over z on the circle
      double best = -1e300;
      for (int i = 0; i < 100000; ++i) {
        const Complex z = std::polar(1.0, 2.0 * M_PI * i / 100000.0);
        best = std::max(best, c(0, 0).real() + c(1, 1).real() + 2.0 * (std::conj(c(0, 1)) * std::conj(z)).real());
      }
      worst = std::max(worst, std::abs(s.objective_value - best));
    }
    report(optimal && worst <= 1e-5, "sdp-oracle", fmt("max |solver - brute force| = %.2e over 30 objectives", worst));
  }

  // Trend checks.
  {
    int beat_tdma = 0, beat_sud = 0, counted = 0;
    for (int d = 0; d < kDrops; ++d) {
      if (runs[d].status == RunStatus::InitInfeasible) continue;
      ++counted;
      const double prop = runs[d].wsse();
      const double t = tdma_wsse(channels[d], p);
      const double s = run(channels[d], p, BcdConfig{}, Receiver::Sud).wsse();
      beat_tdma += at_least(prop, t);
      beat_sud += at_least(prop, s);
    }
    const double ft = double(beat_tdma) / std::max(counted, 1);
    const double fs = double(beat_sud) / std::max(counted, 1);
    report(ft >= 0.9, "trend-proposed-vs-tdma", fmt("Proposed >= TDMA in %.0f%% of %.0f drops", 100 * ft, counted));
    report(fs >= 0.9, "trend-proposed-vs-sud", fmt("Proposed >= SUD in %.0f%% of %.0f drops", 100 * fs, counted));
  }
  {
    const auto rows = sweep("proposed", "K", "8, 16");
    const double a = median(column(rows, "proposed", 8.0)), b = median(column(rows, "proposed", 16.0));
    report(at_least(b, a), "trend-wsse-vs-K", fmt("median WSSE K=8: %.4f, K=16: %.4f", a, b));
  }
  {
    const auto rows = sweep("proposed", "P_dbm", "30, 36");
    const double a = median(column(rows, "proposed", 30.0)), b = median(column(rows, "proposed", 36.0));
    report(at_least(b, a), "trend-wsse-vs-P", fmt("median WSSE 30 dBm: %.4f, 36 dBm: %.4f", a, b));
  }
  {
    const auto rows = sweep("proposed", "r_th", "0.5, 2.5");
    const double a = median(column(rows, "proposed", 0.5)), b = median(column(rows, "proposed", 2.5));
    report(at_least(a, b), "trend-wsse-vs-Rth", fmt("median WSSE R=0.5: %.4f, R=2.5: %.4f", a, b));
  }
  {
    const auto rows = sweep("tdma", "M", "2, 4");
    const double a = median(column(rows, "tdma", 2.0)), b = median(column(rows, "tdma", 4.0));
    report(at_least(a, b), "trend-tdma-vs-M", fmt("median TDMA WSSE M=2: %.4f, M=4: %.4f", a, b));
  }

  {
    std::vector<double> loss;
    double worst_excess = -1e300;
    bool all_feasible = true;
    for (int d = 0; d < kDrops; ++d) {
      if (runs[d].status == RunStatus::InitInfeasible) continue;
      const QuantizedReport q = quantize_run(runs[d], channels[d], p);
      all_feasible = all_feasible && q.feasible;
      const double cont = runs[d].wsse();
      worst_excess = std::max(worst_excess, q.wsse - cont);
      loss.push_back(cont > 0.0 ? (cont - q.wsse) / cont : 0.0);
    }
    const double med = median(loss);
    report(worst_excess <= 1e-9 && med <= 0.15 && all_feasible, "two-bit-restriction",
           fmt("max (2-bit - continuous) = %.2e, median loss %.1f%%", worst_excess, 100 * med));
  }

  const double total =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - suite_start).count() / 60.0;
  std::printf("%s  %d criterion line(s) failed; total %.2f min\n", failures ? "FAIL" : "PASS",
              failures, total);
  return failures ? 1 : 0;
}
