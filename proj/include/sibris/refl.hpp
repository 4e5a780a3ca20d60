#ifndef SIBRIS_REFL_HPP
#define SIBRIS_REFL_HPP

#include <vector>

#include "sibris/conic.hpp"
#include "sibris/fp.hpp"

namespace sibris {

/// Penalty weight escalation rho <- min(c rho, rho_max) of the DC loops.
struct PenaltySchedule {
  double rho0 = 1e-3;
  double scale_c = 10.0;
  double rho_max = 1e6;

  double next(double rho) const { return std::min(scale_c * rho, rho_max); }
  void validate() const;
};

/// Settings shared by the reflection and beamforming DC loops.
struct DcLoopSettings {
  PenaltySchedule schedule;
  double inner_tol = 1e-4;  // relative change of the penalized objective
  int max_inner = 30;
  // The loop also waits until (Tr - sigma_max) / Tr of every lifted block is
  // below this value.
  double rank_tol = 1e-4;
  // Relative slack tolerated on constraints of the extracted point.
  double accept_tol = 1e-6;
  SdpOptions sdp{1e-6, 20000};
};

/// Lifted reflection blocks [phi; 1][phi; 1]^H with their DC slacks.
struct LiftedReflection {
  std::vector<HermitianMatrix> Phi_hat;
  RVector eta;
};

/// Coefficient matrices of the lifted reflection problem, one per RIS.
struct ReflectionMatrices {
  std::vector<Eigen::RowVectorXcd> eps;    // delta_j g_j^H diag(F_j w)
  std::vector<Eigen::RowVectorXcd> eps_p;  // delta_j g_pj^H diag(F_j w)
  std::vector<HermitianMatrix> Lambda;
  std::vector<HermitianMatrix> Omega;
  std::vector<HermitianMatrix> Omega_p;
};

ReflectionMatrices build_lift_matrices(const AuxVars& aux, const NetworkState& s,
                                       const ChannelSet& ch, const SystemParams& p);

/// [v; 1][v; 1]^H
HermitianMatrix lift(const CVector& v);

/// Tr(X) - sigma_max(X) for PSD X; zero exactly for rank one.
double rank_one_gap(const HermitianMatrix& x);
/// rank_one_gap(x) / Tr(x), 0 for a zero matrix.
double relative_rank_gap(const HermitianMatrix& x);

/// Affine under-estimator sigma_max(X) >= sigma + Tr(P (X - X_l)) built at X_l.
struct AffineMinorant {
  double sigma = 0.0;
  HermitianMatrix projector;  // v v^H for the top eigenvector v of X_l
  HermitianMatrix anchor;     // X_l

  double operator()(const HermitianMatrix& x) const {
    return sigma + trace_product(projector, x - anchor);
  }
};

AffineMinorant dc_linearization(const HermitianMatrix& prev);

/// Unit-modulus reflection vector from a lifted block: principal eigenvector,
/// divided by its last entry, then phase-projected entrywise.
CVector extract_reflection(const HermitianMatrix& phi_hat);

struct ReflectionResult {
  std::vector<CVector> phi;              // returned reflection vectors
  std::vector<double> objective_trace;   // penalized SDP objective per inner step
  std::vector<RVector> eta_trace;
  LiftedReflection lifted;               // last SDP iterate
  int inner_iterations = 0;
  double max_rank_gap = 0.0;             // max relative gap of the last iterate
  bool accepted = false;                 // false: incoming phi retained
  SdpStatus last_status = SdpStatus::Optimal;
};

/// Penalized DC loop over the jointly lifted reflection blocks. The incoming
/// state must be feasible; the result never lowers f1 for fixed aux, w, delta.
/// Throws SubproblemInfeasible when the PU constraint cannot be met.
ReflectionResult solve_reflection(const AuxVars& aux, const NetworkState& s,
                                  const ChannelSet& ch, const SystemParams& p,
                                  const Decoder& dec, const DcLoopSettings& settings = {});

}  // namespace sibris

#endif  // SIBRIS_REFL_HPP
