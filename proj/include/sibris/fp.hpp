#ifndef SIBRIS_FP_HPP
#define SIBRIS_FP_HPP

#include "sibris/system.hpp"

namespace sibris {

// Auxiliary variables of the Lagrangian dual (alpha) and quadratic (beta)
// transforms.
struct AuxVars {
  RVector alpha;
  CVector beta;
};

// Smallest alpha handed out by update_aux; alpha must stay positive.
inline constexpr double kAlphaFloor = 1e-12;

// ln(1 + a) - a + (1 + a) g / (1 + g)
double dual_transform_value(double alpha, double gamma);

// 2 sqrt(w (1 + a)) Re{conj(b) A} - |b|^2 B for one user.
double quadratic_transform_term(double weight, double alpha, Complex beta, Complex gain,
                                double denominator);

// B_j = sum of S_i over the users in j's denominator (own term included)
// plus |h^H w|^2 + sigma^2.
RVector quadratic_denominators(const NetworkState& s, const ChannelSet& ch,
                               const SystemParams& p, const Decoder& dec);

// alpha_j = gamma_j (floored at kAlphaFloor),
// beta_j = sqrt(w_j (1 + alpha_j)) A_j / B_j.
AuxVars update_aux(const NetworkState& s, const ChannelSet& ch, const SystemParams& p,
                   const Decoder& dec);

// Surrogate objective in nats.
double f1(const AuxVars& aux, const NetworkState& s, const ChannelSet& ch,
          const SystemParams& p, const Decoder& dec);

// sqrt(w_j (1 + alpha_j)), the recurring coefficient of the linear terms.
inline double fp_weight(const AuxVars& aux, const SystemParams& p, int j) {
  return std::sqrt(p.weight(j) * (1.0 + aux.alpha(j)));
}

// Weighted sum rate in nats, sum_j w_j ln(1 + gamma_j).
double weighted_sum_rate_nats(const NetworkState& s, const ChannelSet& ch,
                              const SystemParams& p, const Decoder& dec);

}  // namespace sibris

#endif  // SIBRIS_FP_HPP
