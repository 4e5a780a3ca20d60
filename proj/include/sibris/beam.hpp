#ifndef SIBRIS_BEAM_HPP
#define SIBRIS_BEAM_HPP

#include <vector>

#include "sibris/refl.hpp"

namespace sibris {

/// Lifted beamformer [w; 1][w; 1]^H and its DC slack.
struct LiftedBeam {
  HermitianMatrix W_hat;
  double upsilon = 0.0;
};

/// Coefficient matrices of the lifted beamforming problem; all are
/// (N+1) x (N+1) and act on W_hat.
struct BeamMatrices {
  std::vector<Eigen::RowVectorXcd> xi;    // delta_j g_j^H diag(phi_j) F_j
  std::vector<Eigen::RowVectorXcd> xi_p;  // delta_j g_pj^H diag(phi_j) F_j
  std::vector<HermitianMatrix> N;         // Tr(N_jj W) = 2 Re{conj(beta_j) xi_j w}
  std::vector<HermitianMatrix> M;         // Tr(M_jj W) = |xi_j w|^2
  std::vector<HermitianMatrix> M_p;       // Tr(M_jp W) = |xi_jp w|^2
  std::vector<HermitianMatrix> T;         // Tr(T_j W) = ||F_j w||^2
  HermitianMatrix H;                      // |h^H w|^2
  HermitianMatrix H_p;                    // |h_p^H w|^2
  HermitianMatrix Xi;                     // ||w||^2
};

BeamMatrices build_beam_matrices(const AuxVars& aux, const NetworkState& s,
                                 const ChannelSet& ch, const SystemParams& p);

/// Beamformer from a lifted matrix: principal eigenvector over its last entry.
CVector extract_beam(const HermitianMatrix& w_hat);

enum class BeamMode {
  Ascent,       // maximize the surrogate; result must not lower f1
  Feasibility,  // ignore the surrogate; accept any feasible extracted point
};

struct BeamResult {
  CVector w;
  std::vector<double> objective_trace;
  std::vector<double> upsilon_trace;
  LiftedBeam lifted;
  int inner_iterations = 0;
  double max_rank_gap = 0.0;
  bool accepted = false;  // false: incoming w retained
  bool rescaled = false;  // power repair applied to the extracted point
  SdpStatus last_status = SdpStatus::Optimal;
};

/// Penalized DC loop for the PT beamformer with phi and delta fixed.
/// Throws SubproblemInfeasible when the lifted SDP has no feasible point.
BeamResult solve_beam(const AuxVars& aux, const NetworkState& s, const ChannelSet& ch,
                      const SystemParams& p, const Decoder& dec,
                      const DcLoopSettings& settings = {},
                      BeamMode mode = BeamMode::Ascent);

}  // namespace sibris

#endif  // SIBRIS_BEAM_HPP
