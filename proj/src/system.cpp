#include "sibris/system.hpp"

#include <algorithm>
#include <numeric>

namespace sibris {

namespace {

void check_index(int j, const ChannelSet& ch) {
  if (j < 0 || j >= ch.n_ris()) throw std::out_of_range("RIS index out of range");
}

}  // namespace

void SystemParams::validate(int n_ris) const {
  if (!(P > 0.0) || !(sigma2 > 0.0) || !(chi > 0.0) || !(mu >= 0.0) || !(r_th >= 0.0))
    throw std::invalid_argument("params: P, sigma2, chi must be positive; mu, r_th >= 0");
  if (weights.size() != 0) {
    if (weights.size() != n_ris) throw std::invalid_argument("params: weight count differs from M");
    if ((weights.array() < 0.0).any()) throw std::invalid_argument("params: negative weight");
  }
}

Decoder::Decoder(Receiver receiver, std::vector<int> order)
    : receiver_(receiver), order_(std::move(order)), position_(order_.size(), -1) {
  for (std::size_t p = 0; p < order_.size(); ++p) {
    const int u = order_[p];
    if (u < 0 || u >= static_cast<int>(order_.size()) || position_[static_cast<std::size_t>(u)] != -1)
      throw std::invalid_argument("decoding order is not a permutation");
    position_[static_cast<std::size_t>(u)] = static_cast<int>(p);
  }
}

Decoder Decoder::sud(int n_users) {
  std::vector<int> order(static_cast<std::size_t>(n_users));
  std::iota(order.begin(), order.end(), 0);
  return {Receiver::Sud, std::move(order)};
}

bool Decoder::interferes(int j, int i) const {
  if (i == j) return false;
  if (receiver_ == Receiver::Sud) return true;
  return position_[static_cast<std::size_t>(i)] > position_[static_cast<std::size_t>(j)];
}

void check_state(const NetworkState& s, const ChannelSet& ch) {
  if (s.w.size() != ch.n_antennas() || s.n_ris() != ch.n_ris() || s.delta.size() != ch.n_ris())
    throw std::invalid_argument("state shape differs from channels");
  for (const auto& v : s.phi)
    if (v.size() != ch.n_elements()) throw std::invalid_argument("phi length differs from K");
}

double harvested_power(int j, const NetworkState& s, const ChannelSet& ch,
                       const SystemParams& p) {
  check_index(j, ch);
  const double d = s.delta(j);
  return p.chi * (1.0 - d * d) * (ch.F[static_cast<std::size_t>(j)] * s.w).squaredNorm();
}

Complex effective_gain(int j, const NetworkState& s, const ChannelSet& ch) {
  check_index(j, ch);
  const auto i = static_cast<std::size_t>(j);
  const CVector fw = ch.F[i] * s.w;
  // g^H diag(Fw) phi = sum_k conj(g_k) (Fw)_k phi_k
  return s.delta(j) * (ch.g[i].conjugate().cwiseProduct(fw).cwiseProduct(s.phi[i])).sum();
}

Complex effective_gain_reflected(int j, const NetworkState& s, const ChannelSet& ch) {
  check_index(j, ch);
  const auto i = static_cast<std::size_t>(j);
  const Eigen::RowVectorXcd xi = ch.g[i].adjoint() * s.phi[i].asDiagonal() * ch.F[i];
  return s.delta(j) * (xi * s.w)(0);
}

Complex leakage_gain(int j, const NetworkState& s, const ChannelSet& ch) {
  check_index(j, ch);
  const auto i = static_cast<std::size_t>(j);
  const CVector fw = ch.F[i] * s.w;
  return s.delta(j) * (ch.g_p[i].conjugate().cwiseProduct(fw).cwiseProduct(s.phi[i])).sum();
}

RVector received_powers(const NetworkState& s, const ChannelSet& ch) {
  RVector out(ch.n_ris());
  for (int j = 0; j < ch.n_ris(); ++j) out(j) = std::norm(effective_gain(j, s, ch));
  return out;
}

double ap_floor(const NetworkState& s, const ChannelSet& ch, const SystemParams& p) {
  return std::norm(ch.h.dot(s.w)) + p.sigma2;
}

double pu_sinr(const NetworkState& s, const ChannelSet& ch, const SystemParams& p) {
  double interference = 0.0;
  for (int i = 0; i < ch.n_ris(); ++i) interference += std::norm(leakage_gain(i, s, ch));
  return std::norm(ch.h_p.dot(s.w)) / (interference + p.sigma2);
}

double pu_rate(const NetworkState& s, const ChannelSet& ch, const SystemParams& p) {
  return std::log2(1.0 + pu_sinr(s, ch, p));
}

RVector sinrs_from_powers(const RVector& powers, double floor, const Decoder& dec) {
  const int m = static_cast<int>(powers.size());
  if (dec.size() != m) throw std::invalid_argument("decoder size differs from user count");
  RVector gamma(m);
  for (int j = 0; j < m; ++j) {
    double den = floor;
    for (int i = 0; i < m; ++i)
      if (dec.interferes(j, i)) den += powers(i);
    gamma(j) = powers(j) / den;
  }
  return gamma;
}

RVector sinrs(const NetworkState& s, const ChannelSet& ch, const SystemParams& p,
              const Decoder& dec) {
  return sinrs_from_powers(received_powers(s, ch), ap_floor(s, ch, p), dec);
}

RVector sic_sinrs(const NetworkState& s, const ChannelSet& ch, const SystemParams& p,
                  const std::vector<int>& order) {
  return sinrs(s, ch, p, Decoder::sic(order));
}

double wsse_from_sinrs(const RVector& gamma, const SystemParams& p) {
  double r = 0.0;
  for (Eigen::Index j = 0; j < gamma.size(); ++j)
    r += p.weight(static_cast<int>(j)) * std::log2(1.0 + gamma(j));
  return r;
}

double wsse(const NetworkState& s, const ChannelSet& ch, const SystemParams& p,
            const Decoder& dec) {
  return wsse_from_sinrs(sinrs(s, ch, p, dec), p);
}

bool ConstraintReport::feasible(double tol) const {
  return delta_bounds_ok && unit_modulus_error <= tol && worst_relative() >= -tol;
}

double ConstraintReport::worst_relative() const {
  double worst = std::min(power_rel, qos_rel);
  for (double e : eh_rel) worst = std::min(worst, e);
  return worst;
}

ConstraintReport constraint_report(const NetworkState& s, const ChannelSet& ch,
                                   const SystemParams& p) {
  check_state(s, ch);
  ConstraintReport r;
  const int k = ch.n_elements();
  const double need = p.mu * k;
  r.power_slack = p.P - s.w.squaredNorm();
  r.power_rel = r.power_slack / p.P;
  for (int j = 0; j < ch.n_ris(); ++j) {
    const double slack = harvested_power(j, s, ch, p) - need;
    r.eh_slack.push_back(slack);
    r.eh_rel.push_back(need > 0.0 ? slack / need : slack);
    for (Eigen::Index e = 0; e < s.phi[static_cast<std::size_t>(j)].size(); ++e)
      r.unit_modulus_error = std::max(
          r.unit_modulus_error, std::abs(std::abs(s.phi[static_cast<std::size_t>(j)](e)) - 1.0));
    if (!(s.delta(j) > 0.0 && s.delta(j) < 1.0)) r.delta_bounds_ok = false;
  }
  const double gp = pu_sinr(s, ch, p);
  r.pu_rate_slack = std::log2(1.0 + gp) - p.r_th;
  const double th = p.sinr_threshold();
  r.qos_rel = th > 0.0 ? gp / th - 1.0 : 1.0;
  return r;
}

CVector reference_beamformer(int n, double power) {
  const double a = std::sqrt(power / n) / std::sqrt(2.0);
  return CVector::Constant(n, Complex(a, a));
}

std::vector<int> order_from_gains(const RVector& gains) {
  std::vector<int> order(static_cast<std::size_t>(gains.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return gains(a) > gains(b); });
  return order;
}

RVector reference_gains(const ChannelSet& ch, const SystemParams& p) {
  NetworkState ref;
  ref.w = reference_beamformer(ch.n_antennas(), p.P);
  ref.phi.assign(static_cast<std::size_t>(ch.n_ris()), CVector::Ones(ch.n_elements()));
  ref.delta = RVector::Ones(ch.n_ris());
  RVector gains(ch.n_ris());
  for (int j = 0; j < ch.n_ris(); ++j) gains(j) = std::abs(effective_gain(j, ref, ch));
  return gains;
}

std::vector<int> decoding_order(const ChannelSet& ch, const SystemParams& p) {
  return order_from_gains(reference_gains(ch, p));
}

}  // namespace sibris
