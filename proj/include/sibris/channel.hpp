#ifndef SIBRIS_CHANNEL_HPP
#define SIBRIS_CHANNEL_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "sibris/types.hpp"

namespace sibris {

using Point3 = Eigen::Vector3d;

/// Large-scale path-loss exponents per link family.
struct PathlossExponents {
  double pt_ap = 3.5;
  double ris_pu = 2.8;
  double pt_ris = 2.2;
  double ris_ap = 2.8;
  double pt_pu = 2.8;
};

/// Geometry and physical parameters of one network drop.
///
/// Each RIS is a UPA in the xz-plane with `kx` columns and
/// `elements_per_ris / kx` rows; the PT carries a ULA along the x axis.
struct Scenario {
  int n_pt_antennas = 4;
  int n_ris = 4;
  int elements_per_ris = 20;
  int kx = 5;

  Point3 pt{0.0, 0.0, 10.0};
  Point3 ap{20.0, 15.0, 1.0};
  Point3 pu{0.0, 0.0, 0.0};
  std::vector<Point3> ris;

  double rician_kappa = 3.0;
  PathlossExponents exponents;
  double beta0_db = -20.0;
  double spacing_ratio = 0.5;  // antenna spacing over wavelength
  std::uint64_t seed = 0;

  int kz() const { return elements_per_ris / kx; }
  void validate() const;
};

/// Column count for a K-element UPA: 5 when K allows it, otherwise the largest
/// divisor of K not exceeding 5.
int default_upa_columns(int elements);

/// Complex channels of one drop. Shapes: h, h_p are N; F[j] is K x N;
/// g[j], g_p[j] are K.
struct ChannelSet {
  CVector h;
  CVector h_p;
  std::vector<CMatrix> F;
  std::vector<CVector> g;
  std::vector<CVector> g_p;

  int n_antennas() const { return static_cast<int>(h.size()); }
  int n_ris() const { return static_cast<int>(F.size()); }
  int n_elements() const { return F.empty() ? 0 : static_cast<int>(F[0].rows()); }
  void validate() const;

  /// Channel set restricted to a single RIS (used by per-slot schemes).
  ChannelSet only(int j) const;
};

/// Channels for the active-antenna benchmark: the same PT links plus
/// multi-antenna ST -> AP and ST -> PU vectors, STs sitting at the RIS sites.
struct ActiveChannelSet {
  CVector h;
  CVector h_p;
  std::vector<CVector> st_ap;
  std::vector<CVector> st_pu;
};

// beta0 - 10 alpha log10(d / d0), in dB.
template <typename Real>
Real path_loss_db(Real d, Real alpha, Real beta0_db = Real(-20), Real d0 = Real(1)) {
  if (!(d > Real(0))) throw std::domain_error("path_loss_db: distance must be > 0");
  return beta0_db - Real(10) * alpha * std::log10(d / d0);
}

template <typename Real>
Real db_to_linear(Real db) {
  return std::pow(Real(10), db / Real(10));
}

// ULA response: entry n is exp(-j 2 pi s n cos(phi)).
template <typename Real>
ComplexVector<Real> ula_steering(int n, Real phi, Real spacing_ratio) {
  if (n < 1) throw std::invalid_argument("ula_steering: n must be >= 1");
  const Real step = -Real(2) * std::numbers::pi_v<Real> * spacing_ratio * std::cos(phi);
  ComplexVector<Real> a(n);
  for (int i = 0; i < n; ++i) a(i) = std::polar(Real(1), step * Real(i));
  return a;
}

// UPA response a_x(phi, theta) (Kronecker) a_z(theta); the z index runs fastest.
template <typename Real>
ComplexVector<Real> upa_steering(int kx, int kz, Real phi, Real theta, Real spacing_ratio) {
  if (kx < 1 || kz < 1) throw std::invalid_argument("upa_steering: sizes must be >= 1");
  const Real two_pi_s = Real(2) * std::numbers::pi_v<Real> * spacing_ratio;
  const Real step_x = -two_pi_s * std::sin(theta) * std::cos(phi);
  const Real step_z = -two_pi_s * std::cos(theta);
  ComplexVector<Real> a(kx * kz);
  for (int x = 0; x < kx; ++x)
    for (int z = 0; z < kz; ++z)
      a(x * kz + z) = std::polar(Real(1), step_x * Real(x)) * std::polar(Real(1), step_z * Real(z));
  return a;
}

/// Azimuth (from +x in the horizontal plane) and polar angle (from +z) of the
/// ray from `from` to `to`.
struct RayAngles {
  double azimuth;
  double elevation;
};
RayAngles ray_angles(const Point3& from, const Point3& to);

/// splitmix64 finalizer applied to `master ^ index`; used for every seed
/// derivation so that drops are independent streams.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Scenario with fresh random PU and RIS positions; array shapes and physical
/// parameters are taken from `tmpl`.
Scenario draw_scenario(const Scenario& tmpl, std::uint64_t seed);

/// Rician channels for every link of `scenario`.
ChannelSet draw_channels(const Scenario& scenario, std::uint64_t seed);

ActiveChannelSet draw_active_channels(const Scenario& scenario, std::uint64_t seed,
                                      int st_antennas = 4);

}  // namespace sibris

#endif  // SIBRIS_CHANNEL_HPP
