#ifndef SIBRIS_PS_HPP
#define SIBRIS_PS_HPP

#include <limits>

#include "sibris/fp.hpp"

namespace sibris {

class EhInfeasible : public SubproblemInfeasible {
 public:
  using SubproblemInfeasible::SubproblemInfeasible;
};

class QosInfeasible : public SubproblemInfeasible {
 public:
  using SubproblemInfeasible::SubproblemInfeasible;
};

/// maximize sum a_j d_j - sum c_j d_j^2
/// s.t. lo <= d_j <= min(box_upper_j, hi), sum k_j d_j^2 <= C
struct PsQp {
  RVector a;
  RVector c;
  RVector box_upper;
  RVector qos_k;
  double qos_C = std::numeric_limits<double>::infinity();

  double objective(const RVector& delta) const;
  void validate() const;
};

inline constexpr double kDeltaLo = 1e-6;
inline constexpr double kDeltaHi = 1.0 - 1e-6;

/// Coefficients for fixed aux, w and phi. A zero PU threshold leaves C
/// infinite.
PsQp build_ps_qp(const AuxVars& aux, const NetworkState& s, const ChannelSet& ch,
                 const SystemParams& p, const Decoder& dec);

/// Dual bisection on the multiplier of the coupling constraint. Throws
/// SubproblemInfeasible if the box and the ellipsoid do not meet.
RVector solve_ps(const PsQp& qp, double tol = 1e-12);

}  // namespace sibris

#endif  // SIBRIS_PS_HPP
