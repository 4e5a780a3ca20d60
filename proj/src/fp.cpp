#include "sibris/fp.hpp"

namespace sibris {

double dual_transform_value(double alpha, double gamma) {
  return std::log1p(alpha) - alpha + (1.0 + alpha) * gamma / (1.0 + gamma);
}

double quadratic_transform_term(double weight, double alpha, Complex beta, Complex gain,
                                double denominator) {
  return 2.0 * std::sqrt(weight * (1.0 + alpha)) * (std::conj(beta) * gain).real() -
         std::norm(beta) * denominator;
}

RVector quadratic_denominators(const NetworkState& s, const ChannelSet& ch,
                               const SystemParams& p, const Decoder& dec) {
  const RVector pw = received_powers(s, ch);
  const double floor = ap_floor(s, ch, p);
  const int m = ch.n_ris();
  RVector b(m);
  for (int j = 0; j < m; ++j) {
    b(j) = floor;
    for (int i = 0; i < m; ++i)
      if (dec.in_denominator(j, i)) b(j) += pw(i);
  }
  return b;
}

AuxVars update_aux(const NetworkState& s, const ChannelSet& ch, const SystemParams& p,
                   const Decoder& dec) {
  const int m = ch.n_ris();
  const RVector gamma = sinrs(s, ch, p, dec);
  const RVector b = quadratic_denominators(s, ch, p, dec);
  AuxVars aux{RVector(m), CVector(m)};
  for (int j = 0; j < m; ++j) {
    aux.alpha(j) = std::max(gamma(j), kAlphaFloor);
    aux.beta(j) = fp_weight(aux, p, j) * effective_gain(j, s, ch) / b(j);
  }
  return aux;
}

double f1(const AuxVars& aux, const NetworkState& s, const ChannelSet& ch,
          const SystemParams& p, const Decoder& dec) {
  const RVector b = quadratic_denominators(s, ch, p, dec);
  double v = 0.0;
  for (int j = 0; j < ch.n_ris(); ++j) {
    const double a = aux.alpha(j);
    v += p.weight(j) * (std::log1p(a) - a);
    v += quadratic_transform_term(p.weight(j), a, aux.beta(j), effective_gain(j, s, ch), b(j));
  }
  return v;
}

double weighted_sum_rate_nats(const NetworkState& s, const ChannelSet& ch,
                              const SystemParams& p, const Decoder& dec) {
  const RVector gamma = sinrs(s, ch, p, dec);
  double v = 0.0;
  for (int j = 0; j < ch.n_ris(); ++j) v += p.weight(j) * std::log1p(gamma(j));
  return v;
}

}  // namespace sibris
