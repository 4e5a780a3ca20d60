#include "sibris/ps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sibris {

double PsQp::objective(const RVector& delta) const {
  return a.dot(delta) - c.dot(delta.cwiseAbs2());
}

void PsQp::validate() const {
  const Eigen::Index m = a.size();
  if (c.size() != m || box_upper.size() != m || qos_k.size() != m)
    throw std::invalid_argument("PsQp: coefficient sizes differ");
  if ((c.array() < 0.0).any() || (qos_k.array() < 0.0).any())
    throw std::invalid_argument("PsQp: c and k must be nonnegative");
}

PsQp build_ps_qp(const AuxVars& aux, const NetworkState& s, const ChannelSet& ch,
                 const SystemParams& p, const Decoder& dec) {
  check_state(s, ch);
  const int m = ch.n_ris();
  const double need = p.mu * ch.n_elements();
  PsQp qp{RVector(m), RVector(m), RVector(m), RVector(m), 0.0};

  RVector gain2(m);
  for (int j = 0; j < m; ++j) {
    const auto i = static_cast<std::size_t>(j);
    const CVector fw = ch.F[i] * s.w;
    const Complex e = ch.g[i].dot(s.phi[i].cwiseProduct(fw));
    const Complex ep = ch.g_p[i].dot(s.phi[i].cwiseProduct(fw));
    qp.a(j) = 2.0 * fp_weight(aux, p, j) * (std::conj(aux.beta(j)) * e).real();
    gain2(j) = std::norm(e);
    qp.qos_k(j) = std::norm(ep);

    const double incident = p.chi * fw.squaredNorm();
    const double ratio = need <= 0.0 ? 1.0 : incident > 0.0 ? 1.0 - need / incident : -1.0;
    if (need > 0.0 && ratio <= 0.0) throw EhInfeasible("ps: EH requirement unattainable");
    qp.box_upper(j) = std::sqrt(std::max(0.0, std::min(1.0, ratio)));
  }
  for (int i = 0; i < m; ++i) {
    double b = 0.0;
    for (int j = 0; j < m; ++j)
      if (dec.in_denominator(j, i)) b += std::norm(aux.beta(j));
    qp.c(i) = gain2(i) * b;
  }

  const double th = p.sinr_threshold();
  if (th > 0.0) {
    qp.qos_C = std::norm(ch.h_p.dot(s.w)) / th - p.sigma2;
    if (qp.qos_C <= 0.0) throw QosInfeasible("ps: PU constraint unattainable for current w");
  } else {
    qp.qos_C = std::numeric_limits<double>::infinity();
  }
  return qp;
}

namespace {

// Coordinate maximizer of a d - (c + lambda k) d^2 over [lo, hi].
double coordinate_max(double a, double q, double lo, double hi) {
  if (q <= 0.0) {
    if (a > 0.0) return hi;
    if (a < 0.0) return lo;
    return 0.5 * (lo + hi);
  }
  return std::clamp(a / (2.0 * q), lo, hi);
}

}  // namespace

RVector solve_ps(const PsQp& qp, double tol) {
  qp.validate();
  const Eigen::Index m = qp.a.size();
  RVector upper(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    upper(j) = std::min(qp.box_upper(j), kDeltaHi);
    if (upper(j) < kDeltaLo) throw SubproblemInfeasible("ps: empty box");
  }
  const double floor_load = qp.qos_k.dot(RVector::Constant(m, kDeltaLo * kDeltaLo));
  if (floor_load > qp.qos_C) throw SubproblemInfeasible("ps: box misses the PU ellipsoid");

  auto primal = [&](double lambda) {
    RVector d(m);
    for (Eigen::Index j = 0; j < m; ++j)
      d(j) = coordinate_max(qp.a(j), qp.c(j) + lambda * qp.qos_k(j), kDeltaLo, upper(j));
    return d;
  };
  auto load = [&](const RVector& d) { return qp.qos_k.dot(d.cwiseAbs2()); };

  RVector d = primal(0.0);
  if (load(d) <= qp.qos_C) return d;

  // load(primal(lambda)) is nonincreasing in lambda.
  double lo = 0.0, hi = 1.0;
  while (load(primal(hi)) > qp.qos_C) {
    hi *= 2.0;
    if (hi > 1e300) break;
  }
  for (int it = 0; it < 200 && hi - lo > tol * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (load(primal(mid)) > qp.qos_C ? lo : hi) = mid;
  }
  d = primal(hi);
  // Guard against roundoff in the last bisection step.
  const double l = load(d);
  if (l > qp.qos_C) d *= std::sqrt(qp.qos_C / l);
  return d.cwiseMax(kDeltaLo);
}

}  // namespace sibris
