#include "sibris/channel.hpp"

#include <algorithm>
#include <random>

namespace sibris {

namespace {

// Stream salts so that geometry, channels and AA channels never share draws.
constexpr std::uint64_t kGeometrySalt = 0x67656f6d65747279ULL;
constexpr std::uint64_t kChannelSalt = 0x6368616e6e656c73ULL;
constexpr std::uint64_t kActiveSalt = 0x6163746976652d61ULL;

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }

  // CN(0, 1)
  Complex cn() {
    std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
    const double re = nd(rng_);
    const double im = nd(rng_);
    return {re, im};
  }

  CVector cn_vector(Eigen::Index n) {
    CVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = cn();
    return v;
  }

  CMatrix cn_matrix(Eigen::Index rows, Eigen::Index cols) {
    CMatrix m(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c)
      for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = cn();
    return m;
  }

  Point3 in_disc(double cx, double cy, double radius) {
    const double r = radius * std::sqrt(uniform(0.0, 1.0));
    const double t = uniform(0.0, 2.0 * std::numbers::pi);
    return {cx + r * std::cos(t), cy + r * std::sin(t), 0.0};
  }

 private:
  std::mt19937_64 rng_;
};

double amplitude(const Scenario& s, const Point3& a, const Point3& b, double alpha) {
  const double db = path_loss_db((b - a).norm(), alpha, s.beta0_db);
  return std::sqrt(db_to_linear(db));
}

template <typename Los, typename Nlos>
auto rician(double kappa, const Los& los, const Nlos& nlos) {
  const double wl = std::sqrt(kappa / (kappa + 1.0));
  const double wn = std::sqrt(1.0 / (kappa + 1.0));
  return (wl * los + wn * nlos).eval();
}

CVector ris_response(const Scenario& s, const Point3& at, const Point3& toward) {
  const RayAngles ang = ray_angles(at, toward);
  return upa_steering<double>(s.kx, s.kz(), ang.azimuth, ang.elevation, s.spacing_ratio);
}

CVector ula_response(const Scenario& s, int n, const Point3& at, const Point3& toward) {
  return ula_steering<double>(n, ray_angles(at, toward).azimuth, s.spacing_ratio);
}

}  // namespace

void Scenario::validate() const {
  if (n_pt_antennas < 1) throw std::invalid_argument("scenario: N must be >= 1");
  if (n_ris < 1) throw std::invalid_argument("scenario: M must be >= 1");
  if (elements_per_ris < 1 || kx < 1 || elements_per_ris % kx != 0)
    throw std::invalid_argument("scenario: K must be a positive multiple of kx");
  if (!(rician_kappa >= 0.0)) throw std::invalid_argument("scenario: kappa must be >= 0");
  for (double e : {exponents.pt_ap, exponents.ris_pu, exponents.pt_ris, exponents.ris_ap,
                   exponents.pt_pu})
    if (!(e > 0.0)) throw std::invalid_argument("scenario: path-loss exponents must be > 0");
  if (static_cast<int>(ris.size()) != n_ris)
    throw std::invalid_argument("scenario: RIS position count differs from M");
  auto finite = [](const Point3& p) { return p.allFinite(); };
  if (!finite(pt) || !finite(ap) || !finite(pu))
    throw std::invalid_argument("scenario: non-finite node position");
  for (const auto& p : ris)
    if (!finite(p)) throw std::invalid_argument("scenario: non-finite RIS position");
}

int default_upa_columns(int elements) {
  for (int c = 5; c > 1; --c)
    if (elements % c == 0) return c;
  return 1;
}

void ChannelSet::validate() const {
  const auto n = h.size();
  if (n == 0 || h_p.size() != n) throw std::invalid_argument("channels: bad PT vectors");
  if (F.empty() || g.size() != F.size() || g_p.size() != F.size())
    throw std::invalid_argument("channels: RIS link counts differ");
  const auto k = F[0].rows();
  for (std::size_t j = 0; j < F.size(); ++j) {
    if (F[j].rows() != k || F[j].cols() != n || g[j].size() != k || g_p[j].size() != k)
      throw std::invalid_argument("channels: inconsistent RIS link shapes");
    if (!F[j].allFinite() || !g[j].allFinite() || !g_p[j].allFinite())
      throw std::invalid_argument("channels: non-finite entry");
  }
  if (!h.allFinite() || !h_p.allFinite()) throw std::invalid_argument("channels: non-finite entry");
}

ChannelSet ChannelSet::only(int j) const {
  const auto i = static_cast<std::size_t>(j);
  return ChannelSet{h, h_p, {F.at(i)}, {g.at(i)}, {g_p.at(i)}};
}

RayAngles ray_angles(const Point3& from, const Point3& to) {
  const Point3 d = to - from;
  const double r = d.norm();
  if (!(r > 0.0)) throw std::domain_error("ray_angles: coincident points");
  return {std::atan2(d.y(), d.x()), std::acos(std::clamp(d.z() / r, -1.0, 1.0))};
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = (master ^ index) + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Scenario draw_scenario(const Scenario& tmpl, std::uint64_t seed) {
  Scenario s = tmpl;
  s.seed = seed;
  Sampler rs(derive_seed(seed, kGeometrySalt));
  s.ris.clear();
  for (int j = 0; j < s.n_ris; ++j) {
    Point3 p = rs.in_disc(5.0, 0.0, 10.0);
    p.z() = rs.uniform(7.0, 10.0);
    s.ris.push_back(p);
  }
  s.pu = rs.in_disc(0.0, 0.0, 20.0);
  s.validate();
  return s;
}

ChannelSet draw_channels(const Scenario& s, std::uint64_t seed) {
  s.validate();
  Sampler rs(derive_seed(seed, kChannelSalt));
  const int n = s.n_pt_antennas;
  const int k = s.elements_per_ris;
  const double kappa = s.rician_kappa;
  const auto& ex = s.exponents;

  ChannelSet ch;
  ch.h = amplitude(s, s.pt, s.ap, ex.pt_ap) *
         rician(kappa, ula_response(s, n, s.pt, s.ap), rs.cn_vector(n));
  ch.h_p = amplitude(s, s.pt, s.pu, ex.pt_pu) *
           rician(kappa, ula_response(s, n, s.pt, s.pu), rs.cn_vector(n));
  for (const Point3& r : s.ris) {
    const CMatrix los_f = ris_response(s, r, s.pt) * ula_response(s, n, s.pt, r).adjoint();
    ch.F.push_back(amplitude(s, s.pt, r, ex.pt_ris) * rician(kappa, los_f, rs.cn_matrix(k, n)));
    ch.g.push_back(amplitude(s, r, s.ap, ex.ris_ap) *
                   rician(kappa, ris_response(s, r, s.ap), rs.cn_vector(k)));
    ch.g_p.push_back(amplitude(s, r, s.pu, ex.ris_pu) *
                     rician(kappa, ris_response(s, r, s.pu), rs.cn_vector(k)));
  }
  return ch;
}

ActiveChannelSet draw_active_channels(const Scenario& s, std::uint64_t seed, int st_antennas) {
  const ChannelSet base = draw_channels(s, seed);
  Sampler rs(derive_seed(seed, kActiveSalt));
  ActiveChannelSet ac{base.h, base.h_p, {}, {}};
  for (const Point3& st : s.ris) {
    ac.st_ap.push_back(amplitude(s, st, s.ap, s.exponents.ris_ap) *
                       rician(s.rician_kappa, ula_response(s, st_antennas, st, s.ap),
                              rs.cn_vector(st_antennas)));
    ac.st_pu.push_back(amplitude(s, st, s.pu, s.exponents.ris_pu) *
                       rician(s.rician_kappa, ula_response(s, st_antennas, st, s.pu),
                              rs.cn_vector(st_antennas)));
  }
  return ac;
}

}  // namespace sibris
