#ifndef SIBRIS_TEST_UTIL_HPP
#define SIBRIS_TEST_UTIL_HPP

#include <cmath>
#include <random>

#include "sibris/bcd.hpp"

namespace testutil {

using namespace sibris;

inline CVector random_cvector(Eigen::Index n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale / std::sqrt(2.0));
  CVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = Complex(nd(rng), nd(rng));
  return v;
}

inline CMatrix random_cmatrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng,
                              double scale = 1.0) {
  CMatrix m(r, c);
  for (Eigen::Index j = 0; j < c; ++j) m.col(j) = random_cvector(r, rng, scale);
  return m;
}

inline HermitianMatrix random_hermitian(Eigen::Index n, std::mt19937_64& rng) {
  const CMatrix a = random_cmatrix(n, n, rng);
  return 0.5 * (a + a.adjoint());
}

inline HermitianMatrix random_psd(Eigen::Index n, std::mt19937_64& rng, Eigen::Index rank = -1) {
  const CMatrix a = random_cmatrix(n, rank < 0 ? n : rank, rng);
  return a * a.adjoint();
}

inline CVector random_phases(Eigen::Index k, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-M_PI, M_PI);
  CVector v(k);
  for (Eigen::Index i = 0; i < k; ++i) v(i) = std::polar(1.0, u(rng));
  return v;
}

// Unstructured channels with magnitudes loosely matching a desk drop.
inline ChannelSet random_channels(int m, int k, int n, std::mt19937_64& rng) {
  ChannelSet ch;
  ch.h = random_cvector(n, rng, 1e-4);
  ch.h_p = random_cvector(n, rng, 1e-3);
  for (int j = 0; j < m; ++j) {
    ch.F.push_back(random_cmatrix(k, n, rng, 3e-2));
    ch.g.push_back(random_cvector(k, rng, 3e-2));
    ch.g_p.push_back(random_cvector(k, rng, 1e-2));
  }
  return ch;
}

inline NetworkState random_state(const ChannelSet& ch, double power, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.1, 0.9);
  NetworkState s;
  s.w = random_cvector(ch.n_antennas(), rng);
  s.w *= std::sqrt(power) / s.w.norm();
  for (int j = 0; j < ch.n_ris(); ++j) s.phi.push_back(random_phases(ch.n_elements(), rng));
  s.delta = RVector(ch.n_ris());
  for (int j = 0; j < ch.n_ris(); ++j) s.delta(j) = u(rng);
  return s;
}

inline Scenario desk_template(int m = 2, int k = 8, int n = 4) {
  Scenario s;
  s.n_ris = m;
  s.elements_per_ris = k;
  s.kx = default_upa_columns(k);
  s.n_pt_antennas = n;
  return s;
}

inline ChannelSet desk_channels(std::uint64_t master, int drop, int m = 2, int k = 8, int n = 4) {
  const std::uint64_t seed = derive_seed(master, static_cast<std::uint64_t>(drop));
  return draw_channels(draw_scenario(desk_template(m, k, n), seed), seed);
}

}  // namespace testutil

#endif  // SIBRIS_TEST_UTIL_HPP
