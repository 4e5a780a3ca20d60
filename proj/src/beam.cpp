#include "sibris/beam.hpp"

#include <cmath>

namespace sibris {

namespace {

HermitianMatrix pad(const CMatrix& top_left) {
  const Eigen::Index n = top_left.rows();
  HermitianMatrix out = HermitianMatrix::Zero(n + 1, n + 1);
  out.topLeftCorner(n, n) = top_left;
  return out;
}

HermitianMatrix scalar_block(double v) { return HermitianMatrix::Constant(1, 1, v); }

}  // namespace

BeamMatrices build_beam_matrices(const AuxVars& aux, const NetworkState& s,
                                 const ChannelSet& ch, const SystemParams& /*p*/) {
  check_state(s, ch);
  const int m = ch.n_ris();
  const Eigen::Index n = ch.n_antennas();
  if (aux.beta.size() != m) throw std::invalid_argument("build_beam_matrices: aux size differs from M");

  BeamMatrices out;
  for (int j = 0; j < m; ++j) {
    const auto i = static_cast<std::size_t>(j);
    const Eigen::RowVectorXcd xi =
        s.delta(j) * (ch.g[i].adjoint() * s.phi[i].asDiagonal() * ch.F[i]);
    const Eigen::RowVectorXcd xi_p =
        s.delta(j) * (ch.g_p[i].adjoint() * s.phi[i].asDiagonal() * ch.F[i]);
    const Eigen::RowVectorXcd r = std::conj(aux.beta(j)) * xi;

    HermitianMatrix nm = HermitianMatrix::Zero(n + 1, n + 1);
    nm.block(n, 0, 1, n) = r;
    nm.block(0, n, n, 1) = r.adjoint();

    out.xi.push_back(xi);
    out.xi_p.push_back(xi_p);
    out.N.push_back(std::move(nm));
    out.M.push_back(pad(xi.adjoint() * xi));
    out.M_p.push_back(pad(xi_p.adjoint() * xi_p));
    out.T.push_back(pad(ch.F[i].adjoint() * ch.F[i]));
  }
  out.H = pad(ch.h * ch.h.adjoint());
  out.H_p = pad(ch.h_p * ch.h_p.adjoint());
  out.Xi = pad(CMatrix::Identity(n, n));
  return out;
}

CVector extract_beam(const HermitianMatrix& w_hat) {
  const Eigen::Index n = w_hat.rows() - 1;
  const auto top = max_eigpair(w_hat);
  const Complex last = top.vector(n);
  if (std::abs(last) == 0.0) return CVector::Zero(n);
  return top.vector.head(n) / last;
}

BeamResult solve_beam(const AuxVars& aux, const NetworkState& s, const ChannelSet& ch,
                      const SystemParams& p, const Decoder& dec,
                      const DcLoopSettings& settings, BeamMode mode) {
  settings.schedule.validate();
  const int m = ch.n_ris();
  const Eigen::Index n = ch.n_antennas();
  const BeamMatrices mats = build_beam_matrices(aux, s, ch, p);

  // Block 0 is W_hat, block 1 is upsilon.
  SdpProblem base;
  base.block_sizes = {static_cast<int>(n + 1), 1};

  HermitianMatrix c = HermitianMatrix::Zero(n + 1, n + 1);
  if (mode == BeamMode::Ascent) {
    double beta_sum = 0.0;
    for (int j = 0; j < m; ++j) {
      const auto jj = static_cast<std::size_t>(j);
      c += fp_weight(aux, p, j) * mats.N[jj];
      double coef = 0.0;
      for (int i = 0; i < m; ++i)
        if (dec.in_denominator(i, j)) coef += std::norm(aux.beta(i));
      c -= coef * mats.M[jj];
      beta_sum += std::norm(aux.beta(j));
    }
    c -= beta_sum * mats.H;
  }
  base.objective.push_back({0, c});

  HermitianMatrix corner = HermitianMatrix::Zero(n + 1, n + 1);
  corner(n, n) = 1.0;
  base.equalities.push_back({{{0, corner}}, 1.0});
  base.inequalities.push_back({{{0, mats.Xi}}, p.P});

  const double need = p.mu * ch.n_elements();
  if (need > 0.0) {
    for (int j = 0; j < m; ++j) {
      const double d = s.delta(j);
      const double scale = p.chi * (1.0 - d * d);
      if (!(scale > 0.0)) throw SubproblemInfeasible("beam: EH unattainable at delta = 1");
      base.inequalities.push_back({{{0, -scale * mats.T[static_cast<std::size_t>(j)]}}, -need});
    }
  }
  const double th = p.sinr_threshold();
  if (th > 0.0) {
    HermitianMatrix q = -mats.H_p;
    for (const auto& mp : mats.M_p) q += th * mp;
    base.inequalities.push_back({{{0, q}}, -th * p.sigma2});
  }

  auto penalized = [&](const HermitianMatrix& w_hat, double ups, double rho) {
    return trace_product(c, w_hat) - rho * ups;
  };

  BeamResult res;
  HermitianMatrix anchor = lift(s.w);
  double rho = settings.schedule.rho0;
  double prev_obj = penalized(anchor, 0.0, rho);
  SdpWarmStart warm;
  const HermitianMatrix eye = HermitianMatrix::Identity(n + 1, n + 1);

  for (int l = 0; l < settings.max_inner; ++l) {
    SdpProblem prob = base;
    prob.objective.push_back({1, scalar_block(-rho)});
    const AffineMinorant dc = dc_linearization(anchor);
    prob.inequalities.push_back({{{0, eye - dc.projector}, {1, scalar_block(-1.0)}}, 0.0});

    const SdpSolution sol = solve_sdp(prob, settings.sdp, warm.empty() ? nullptr : &warm);
    res.last_status = sol.status;
    ++res.inner_iterations;
    if (sol.status == SdpStatus::Infeasible)
      throw SubproblemInfeasible("beam: lifted SDP reported infeasible");
    warm = sol.warm;

    const double ups = sol.blocks[1](0, 0).real();
    const double obj = penalized(sol.blocks[0], ups, rho);
    res.objective_trace.push_back(obj);
    res.upsilon_trace.push_back(ups);
    res.max_rank_gap = relative_rank_gap(sol.blocks[0]);
    res.lifted = {sol.blocks[0], ups};
    anchor = sol.blocks[0];

    const bool settled =
        std::abs(obj - prev_obj) <= settings.inner_tol * std::max(std::abs(prev_obj), 1e-12);
    prev_obj = obj;
    if (settled && res.max_rank_gap <= settings.rank_tol) break;
    rho = settings.schedule.next(rho);
  }

  NetworkState cand = s;
  cand.w = extract_beam(anchor);
  const double pw = cand.w.squaredNorm();
  if (pw > p.P) {
    cand.w *= std::sqrt(p.P / pw);
    res.rescaled = true;
  }
  const ConstraintReport rep = constraint_report(cand, ch, p);
  bool ok = rep.power_rel >= -1e-9 && (th <= 0.0 || rep.qos_rel >= -settings.accept_tol);
  if (need > 0.0)
    for (double e : rep.eh_rel) ok = ok && e >= -settings.accept_tol;
  if (ok && mode == BeamMode::Ascent) ok = f1(aux, cand, ch, p, dec) >= f1(aux, s, ch, p, dec);
  res.accepted = ok;
  res.w = ok ? cand.w : s.w;
  return res;
}

}  // namespace sibris
