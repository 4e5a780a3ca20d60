#include "sibris/refl.hpp"

#include <cmath>

namespace sibris {

namespace {

HermitianMatrix unit_entry(Eigen::Index n, Eigen::Index k) {
  HermitianMatrix e = HermitianMatrix::Zero(n, n);
  e(k, k) = 1.0;
  return e;
}

HermitianMatrix scalar_block(double v) { return HermitianMatrix::Constant(1, 1, v); }

}  // namespace

void PenaltySchedule::validate() const {
  if (!(rho0 > 0.0) || !(scale_c > 1.0) || !(rho_max >= rho0))
    throw std::invalid_argument("penalty schedule: need rho0 > 0, c > 1, rho_max >= rho0");
}

HermitianMatrix lift(const CVector& v) {
  CVector hat(v.size() + 1);
  hat << v, Complex(1.0, 0.0);
  return hat * hat.adjoint();
}

double rank_one_gap(const HermitianMatrix& x) {
  return std::max(0.0, x.trace().real() - max_eigpair(x).value);
}

double relative_rank_gap(const HermitianMatrix& x) {
  const double tr = x.trace().real();
  return tr > 0.0 ? rank_one_gap(x) / tr : 0.0;
}

AffineMinorant dc_linearization(const HermitianMatrix& prev) {
  const auto top = max_eigpair(prev);
  return {top.value, top.vector * top.vector.adjoint(), prev};
}

CVector extract_reflection(const HermitianMatrix& phi_hat) {
  const Eigen::Index k = phi_hat.rows() - 1;
  const CVector v = max_eigpair(phi_hat).vector;
  const Complex last = v(k);
  CVector phi(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const Complex e = std::abs(last) > 0.0 ? v(i) / last : v(i);
    phi(i) = std::abs(e) > 0.0 ? e / std::abs(e) : Complex(1.0, 0.0);
  }
  return phi;
}

ReflectionMatrices build_lift_matrices(const AuxVars& aux, const NetworkState& s,
                                       const ChannelSet& ch, const SystemParams& p) {
  check_state(s, ch);
  const int m = ch.n_ris();
  const Eigen::Index k = ch.n_elements();
  if (aux.alpha.size() != m || aux.beta.size() != m)
    throw std::invalid_argument("build_lift_matrices: aux size differs from M");

  ReflectionMatrices out;
  for (int j = 0; j < m; ++j) {
    const auto i = static_cast<std::size_t>(j);
    const CVector fw = ch.F[i] * s.w;
    const Eigen::RowVectorXcd eps =
        s.delta(j) * ch.g[i].conjugate().cwiseProduct(fw).transpose();
    const Eigen::RowVectorXcd eps_p =
        s.delta(j) * ch.g_p[i].conjugate().cwiseProduct(fw).transpose();

    const Eigen::RowVectorXcd r = fp_weight(aux, p, j) * std::conj(aux.beta(j)) * eps;
    HermitianMatrix lam = HermitianMatrix::Zero(k + 1, k + 1);
    lam.block(k, 0, 1, k) = r;
    lam.block(0, k, k, 1) = r.adjoint();

    HermitianMatrix om = HermitianMatrix::Zero(k + 1, k + 1);
    om.topLeftCorner(k, k) = eps.adjoint() * eps;
    HermitianMatrix om_p = HermitianMatrix::Zero(k + 1, k + 1);
    om_p.topLeftCorner(k, k) = eps_p.adjoint() * eps_p;

    out.eps.push_back(eps);
    out.eps_p.push_back(eps_p);
    out.Lambda.push_back(std::move(lam));
    out.Omega.push_back(std::move(om));
    out.Omega_p.push_back(std::move(om_p));
  }
  return out;
}

ReflectionResult solve_reflection(const AuxVars& aux, const NetworkState& s,
                                  const ChannelSet& ch, const SystemParams& p,
                                  const Decoder& dec, const DcLoopSettings& settings) {
  settings.schedule.validate();
  const int m = ch.n_ris();
  const Eigen::Index k = ch.n_elements();
  const ReflectionMatrices mats = build_lift_matrices(aux, s, ch, p);

  // Blocks 0..M-1 hold Phi_hat_j, blocks M..2M-1 hold eta_j.
  SdpProblem base;
  base.block_sizes.assign(static_cast<std::size_t>(m), static_cast<int>(k + 1));
  base.block_sizes.resize(static_cast<std::size_t>(2 * m), 1);

  for (int i = 0; i < m; ++i) {
    double coef = 0.0;
    for (int j = 0; j < m; ++j)
      if (dec.in_denominator(j, i)) coef += std::norm(aux.beta(j));
    const auto ii = static_cast<std::size_t>(i);
    base.objective.push_back({i, mats.Lambda[ii] - coef * mats.Omega[ii]});
    for (Eigen::Index e = 0; e <= k; ++e)
      base.equalities.push_back({{{i, unit_entry(k + 1, e)}}, 1.0});
  }

  const double th = p.sinr_threshold();
  if (th > 0.0) {
    const double budget = std::norm(ch.h_p.dot(s.w)) / th - p.sigma2;
    if (budget < 0.0)
      throw SubproblemInfeasible("reflection: PU constraint unattainable for current w");
    LinearForm qos;
    qos.rhs = budget;
    for (int j = 0; j < m; ++j) qos.terms.push_back({j, mats.Omega_p[static_cast<std::size_t>(j)]});
    base.inequalities.push_back(std::move(qos));
  }

  std::vector<HermitianMatrix> anchor;
  for (int j = 0; j < m; ++j) anchor.push_back(lift(s.phi[static_cast<std::size_t>(j)]));

  auto penalized = [&](const std::vector<HermitianMatrix>& phis, const RVector& eta,
                       double rho) {
    double v = 0.0;
    for (int j = 0; j < m; ++j)
      v += trace_product(base.objective[static_cast<std::size_t>(j)].matrix,
                         phis[static_cast<std::size_t>(j)]);
    return v - rho * eta.sum();
  };

  ReflectionResult res;
  double rho = settings.schedule.rho0;
  double prev_obj = penalized(anchor, RVector::Zero(m), rho);
  SdpWarmStart warm;
  const HermitianMatrix eye = HermitianMatrix::Identity(k + 1, k + 1);

  for (int l = 0; l < settings.max_inner; ++l) {
    SdpProblem prob = base;
    for (int j = 0; j < m; ++j) {
      prob.objective.push_back({m + j, scalar_block(-rho)});
      // Tr(Phi) - sigma_l - Tr(v v^H (Phi - Phi_l)) <= eta; the constant part
      // vanishes because Tr(v v^H Phi_l) = sigma_l.
      const AffineMinorant dc = dc_linearization(anchor[static_cast<std::size_t>(j)]);
      prob.inequalities.push_back(
          {{{j, eye - dc.projector}, {m + j, scalar_block(-1.0)}}, 0.0});
    }
    const SdpSolution sol = solve_sdp(prob, settings.sdp, warm.empty() ? nullptr : &warm);
    res.last_status = sol.status;
    ++res.inner_iterations;
    if (sol.status == SdpStatus::Infeasible)
      throw SubproblemInfeasible("reflection: lifted SDP reported infeasible");
    warm = sol.warm;

    std::vector<HermitianMatrix> phis(sol.blocks.begin(), sol.blocks.begin() + m);
    RVector eta(m);
    for (int j = 0; j < m; ++j) eta(j) = sol.blocks[static_cast<std::size_t>(m + j)](0, 0).real();
    const double obj = penalized(phis, eta, rho);
    res.objective_trace.push_back(obj);
    res.eta_trace.push_back(eta);

    double gap = 0.0;
    for (const auto& x : phis) gap = std::max(gap, relative_rank_gap(x));
    res.max_rank_gap = gap;
    res.lifted = {phis, eta};
    anchor = std::move(phis);

    const bool settled =
        std::abs(obj - prev_obj) <= settings.inner_tol * std::max(std::abs(prev_obj), 1e-12);
    prev_obj = obj;
    if (settled && gap <= settings.rank_tol) break;
    rho = settings.schedule.next(rho);
  }

  // Keep the incoming vectors unless the extracted point is feasible and does
  // not lower the surrogate.
  NetworkState cand = s;
  for (int j = 0; j < m; ++j)
    cand.phi[static_cast<std::size_t>(j)] = extract_reflection(anchor[static_cast<std::size_t>(j)]);
  const ConstraintReport rep = constraint_report(cand, ch, p);
  const bool qos_ok = th <= 0.0 || rep.qos_rel >= -settings.accept_tol;
  res.accepted = qos_ok && f1(aux, cand, ch, p, dec) >= f1(aux, s, ch, p, dec);
  res.phi = res.accepted ? cand.phi : s.phi;
  return res;
}

}  // namespace sibris
