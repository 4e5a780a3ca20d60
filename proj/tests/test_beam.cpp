#include <doctest.h>

#include "sibris/beam.hpp"
#include "test_util.hpp"

using namespace sibris;

TEST_CASE("lifted beam matrices reproduce the direct quantities") {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 10; ++t) {
    const ChannelSet ch = testutil::random_channels(2, 3, 2, rng);
    const NetworkState s = testutil::random_state(ch, 2.0, rng);
    const SystemParams p;
    const Decoder dec = Decoder::sic({0, 1});
    const AuxVars aux = update_aux(s, ch, p, dec);
    const BeamMatrices m = build_beam_matrices(aux, s, ch, p);

    NetworkState probe = s;
    probe.w = testutil::random_cvector(2, rng);
    const HermitianMatrix w_hat = lift(probe.w);
    auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(std::abs(b), 1e-300); };
    for (int j = 0; j < 2; ++j) {
      const Complex xi_w = s.delta(j) * ch.g[j].dot(s.phi[j].cwiseProduct(ch.F[j] * probe.w));
      const Complex xip_w = s.delta(j) * ch.g_p[j].dot(s.phi[j].cwiseProduct(ch.F[j] * probe.w));
      CHECK(close(trace_product(m.N[j], w_hat), 2.0 * (std::conj(aux.beta(j)) * xi_w).real()));
      CHECK(close(trace_product(m.M[j], w_hat), std::norm(xi_w)));
      CHECK(close(trace_product(m.M_p[j], w_hat), std::norm(xip_w)));
      CHECK(close(trace_product(m.T[j], w_hat), (ch.F[j] * probe.w).squaredNorm()));
    }
    CHECK(close(trace_product(m.H, w_hat), std::norm(ch.h.dot(probe.w))));
    CHECK(close(trace_product(m.H_p, w_hat), std::norm(ch.h_p.dot(probe.w))));
    CHECK(close(trace_product(m.Xi, w_hat), probe.w.squaredNorm()));

    const HermitianMatrix origin = lift(CVector::Zero(2));
    CHECK(trace_product(m.Xi, origin) == 0.0);
    CHECK(origin(2, 2) == Complex(1.0, 0.0));

    AuxVars zero = aux;
    zero.beta.setZero();
    CHECK(build_beam_matrices(zero, s, ch, p).N[0].cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("lifted PU constraint is affine in the lifted matrix") {
  std::mt19937_64 rng(2);
  const ChannelSet ch = testutil::random_channels(2, 3, 3, rng);
  const NetworkState s = testutil::random_state(ch, 2.0, rng);
  const SystemParams p;
  const BeamMatrices m = build_beam_matrices(update_aux(s, ch, p, Decoder::sud(2)), s, ch, p);
  const double th = p.sinr_threshold();
  auto lhs = [&](const HermitianMatrix& w) {
    return th * (trace_product(m.M_p[0], w) + trace_product(m.M_p[1], w)) - trace_product(m.H_p, w);
  };
  for (int t = 0; t < 20; ++t) {
    const HermitianMatrix a = testutil::random_hermitian(4, rng), b = testutil::random_hermitian(4, rng);
    const double x = 0.3 + t, y = -1.7 * t;
    CHECK(lhs(x * a + y * b) == doctest::Approx(x * lhs(a) + y * lhs(b)).epsilon(1e-10));
  }
}

TEST_CASE("single antenna: matches a brute force over the beam power") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 4; ++t) {
    const ChannelSet ch = testutil::random_channels(1, 3, 1, rng);
    SystemParams p;
    NetworkState s = testutil::random_state(ch, 0.5 * p.P, rng);
    const Decoder dec = Decoder::sic({0});
    REQUIRE(constraint_report(s, ch, p).feasible());
    const AuxVars aux = update_aux(s, ch, p, dec);

    // The power terms do not depend on the phase, so the best phase aligns
    // the linear term; only |w|^2 is left to search.
    const Complex xi = s.delta(0) * ch.g[0].dot(s.phi[0].cwiseProduct(ch.F[0].col(0)));
    const double theta = std::arg(aux.beta(0)) - std::arg(xi);
    double best = -1e300, best_r2 = 0.0;
    NetworkState probe = s;
    for (int i = 1; i <= 200000; ++i) {
      const double r2 = p.P * i / 200000.0;
      probe.w(0) = std::polar(std::sqrt(r2), theta);
      if (!constraint_report(probe, ch, p).feasible(0.0)) continue;
      const double v = f1(aux, probe, ch, p, dec);
      if (v > best) {
        best = v;
        best_r2 = r2;
      }
    }
    const BeamResult r = solve_beam(aux, s, ch, p, dec);
    REQUIRE(r.accepted);
    NetworkState out = s;
    out.w = r.w;
    const double got = f1(aux, out, ch, p, dec);
    CHECK(got >= best - 1e-6 * std::abs(best));
    CHECK(got <= best + 1e-6 * std::abs(best));
    if (best_r2 == p.P) CHECK(r.w.squaredNorm() == doctest::Approx(p.P).epsilon(1e-6));
  }
}

TEST_CASE("desk drops: ascent, feasibility and rank-one quality") {
  for (int drop = 0; drop < 4; ++drop) {
    const ChannelSet ch = testutil::desk_channels(31, drop);
    const SystemParams p;
    const auto init = initialize(ch, p, BcdConfig{});
    REQUIRE(init.has_value());
    const Decoder dec = make_decoder(ch, p, Receiver::Sic);
    const AuxVars aux = update_aux(*init, ch, p, dec);
    const BeamResult r = solve_beam(aux, *init, ch, p, dec);
    NetworkState out = *init;
    out.w = r.w;
    CHECK(f1(aux, out, ch, p, dec) >= f1(aux, *init, ch, p, dec) - 1e-6);
    const ConstraintReport rep = constraint_report(out, ch, p);
    CHECK(out.w.squaredNorm() <= p.P * (1.0 + 1e-9));
    CHECK(rep.qos_rel >= -1e-6);
    for (double e : rep.eh_rel) CHECK(e >= -1e-6);
    CHECK(r.max_rank_gap <= 1e-3);
  }
}

TEST_CASE("restart at the optimum settles quickly with no slack") {
  const ChannelSet ch = testutil::desk_channels(31, 7);
  const SystemParams p;
  const auto init = initialize(ch, p, BcdConfig{});
  REQUIRE(init.has_value());
  const Decoder dec = make_decoder(ch, p, Receiver::Sic);
  const AuxVars aux = update_aux(*init, ch, p, dec);
  const BeamResult first = solve_beam(aux, *init, ch, p, dec);
  NetworkState s = *init;
  s.w = first.w;
  const BeamResult again = solve_beam(aux, s, ch, p, dec);
  CHECK(again.inner_iterations <= 3);
  CHECK(again.lifted.upsilon <= 1e-6);
}

TEST_CASE("feasibility mode repairs a beam that starves the PU") {
  const ChannelSet ch = testutil::desk_channels(31, 3);
  const SystemParams p;
  auto init = initialize(ch, p, BcdConfig{});
  REQUIRE(init.has_value());
  NetworkState s = *init;
  // rotate the beam into the null space of h_p
  const CVector hp = ch.h_p / ch.h_p.norm();
  s.w -= hp * hp.dot(s.w);
  REQUIRE(constraint_report(s, ch, p).qos_rel < 0.0);
  const AuxVars zero{RVector::Constant(2, kAlphaFloor), CVector::Zero(2)};
  const BeamResult r = solve_beam(zero, s, ch, p, Decoder::sud(2), DcLoopSettings{}, BeamMode::Feasibility);
  CHECK(r.accepted);
  s.w = r.w;
  CHECK(constraint_report(s, ch, p).qos_rel >= -1e-6);
}

TEST_CASE("energy harvesting that cannot be met raises") {
  std::mt19937_64 rng(4);
  const ChannelSet ch = testutil::random_channels(1, 3, 2, rng);
  const SystemParams p;
  NetworkState s = testutil::random_state(ch, 1.0, rng);
  s.delta(0) = 1.0;
  const Decoder dec = Decoder::sic({0});
  CHECK_THROWS_AS(solve_beam(update_aux(s, ch, p, dec), s, ch, p, dec), SubproblemInfeasible);
}
