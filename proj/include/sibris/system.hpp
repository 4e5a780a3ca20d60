#ifndef SIBRIS_SYSTEM_HPP
#define SIBRIS_SYSTEM_HPP

#include <vector>

#include "sibris/channel.hpp"
#include "sibris/types.hpp"

namespace sibris {

/// Decision variables: PT beamformer, per-RIS reflection vectors and
/// power-splitting coefficients.
struct NetworkState {
  CVector w;
  std::vector<CVector> phi;
  RVector delta;

  int n_ris() const { return static_cast<int>(phi.size()); }
};

struct SystemParams {
  double P = 2.511886431509580;  // W (34 dBm)
  double sigma2 = 1e-8;          // W (-80 dBW)
  double chi = 0.8;
  double mu = 1e-6;  // W per element
  double r_th = 1.5;  // bits/s/Hz
  RVector weights;    // one per RIS; empty means all ones

  double weight(int j) const { return weights.size() == 0 ? 1.0 : weights(j); }
  // 2^R_th - 1, the SINR the PU must reach.
  double sinr_threshold() const { return std::exp2(r_th) - 1.0; }
  void validate(int n_ris) const;
};

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double dbw_to_watts(double dbw) { return std::pow(10.0, dbw / 10.0); }

/// How the AP treats the other RIS signals when decoding user j.
enum class Receiver { Sic, Sud };

/// Fixed decoding rule. `order[p]` is the user decoded at position p.
class Decoder {
 public:
  Decoder() = default;
  Decoder(Receiver receiver, std::vector<int> order);
  static Decoder sic(std::vector<int> order) { return {Receiver::Sic, std::move(order)}; }
  static Decoder sud(int n_users);

  Receiver receiver() const { return receiver_; }
  const std::vector<int>& order() const { return order_; }
  int size() const { return static_cast<int>(order_.size()); }

  // True when user i's signal sits in the SINR denominator of user j.
  bool interferes(int j, int i) const;
  // True when S_i appears in B_j of the quadratic transform (own term or
  // interferer).
  bool in_denominator(int j, int i) const { return i == j || interferes(j, i); }

 private:
  Receiver receiver_ = Receiver::Sic;
  std::vector<int> order_;
  std::vector<int> position_;
};

struct ConstraintReport {
  double power_slack = 0.0;          // P - ||w||^2
  std::vector<double> eh_slack;      // chi (1 - d^2) ||F w||^2 - mu K
  double pu_rate_slack = 0.0;        // log2(1 + gamma_p) - R_th
  double unit_modulus_error = 0.0;   // max | |phi_jk| - 1 |
  bool delta_bounds_ok = true;       // 0 < delta_j < 1

  // Scale-free versions used for tolerance checks.
  double power_rel = 0.0;            // slack / P
  std::vector<double> eh_rel;        // slack / (mu K)
  double qos_rel = 0.0;              // gamma_p / (2^R_th - 1) - 1

  bool feasible(double tol = 1e-6) const;
  double worst_relative() const;
};

double harvested_power(int j, const NetworkState& s, const ChannelSet& ch,
                       const SystemParams& p);

// A_j = delta_j g_j^H diag(F_j w) phi_j
Complex effective_gain(int j, const NetworkState& s, const ChannelSet& ch);
// The same quantity evaluated as delta_j g_j^H diag(phi_j) F_j w.
Complex effective_gain_reflected(int j, const NetworkState& s, const ChannelSet& ch);
// delta_j g_pj^H diag(F_j w) phi_j, the leakage of RIS j at the PU.
Complex leakage_gain(int j, const NetworkState& s, const ChannelSet& ch);

// S_j = |A_j|^2 for all users.
RVector received_powers(const NetworkState& s, const ChannelSet& ch);
// |h^H w|^2 + sigma^2, the floor of every AP denominator.
double ap_floor(const NetworkState& s, const ChannelSet& ch, const SystemParams& p);

double pu_sinr(const NetworkState& s, const ChannelSet& ch, const SystemParams& p);
double pu_rate(const NetworkState& s, const ChannelSet& ch, const SystemParams& p);

// Per-user SINR (indexed by user) from received powers and the common floor.
RVector sinrs_from_powers(const RVector& powers, double floor, const Decoder& dec);

RVector sinrs(const NetworkState& s, const ChannelSet& ch, const SystemParams& p,
              const Decoder& dec);
// SIC SINRs for the decoding permutation `order` (0-based users).
RVector sic_sinrs(const NetworkState& s, const ChannelSet& ch, const SystemParams& p,
                  const std::vector<int>& order);

// sum_j w_j log2(1 + gamma_j)
double wsse_from_sinrs(const RVector& gamma, const SystemParams& p);
double wsse(const NetworkState& s, const ChannelSet& ch, const SystemParams& p,
            const Decoder& dec);

ConstraintReport constraint_report(const NetworkState& s, const ChannelSet& ch,
                                   const SystemParams& p);

// Full-power beamformer with identical real and imaginary parts:
// every entry sqrt(P/N) (1 + j)/sqrt(2).
CVector reference_beamformer(int n, double power);

// Users sorted by descending gain, ties by ascending index.
std::vector<int> order_from_gains(const RVector& gains);

// Reference gains |g_j^H diag(F_j w0) phi0| with delta = 1 and phi0 = 1.
RVector reference_gains(const ChannelSet& ch, const SystemParams& p);
std::vector<int> decoding_order(const ChannelSet& ch, const SystemParams& p);

// Throws std::invalid_argument when shapes disagree with the channels.
void check_state(const NetworkState& s, const ChannelSet& ch);

}  // namespace sibris

#endif  // SIBRIS_SYSTEM_HPP
