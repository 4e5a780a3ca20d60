#include <doctest.h>

#include "sibris/bcd.hpp"
#include "test_util.hpp"

using namespace sibris;

TEST_CASE("initial point") {
  const ChannelSet ch = testutil::desk_channels(51, 0);
  SystemParams p;
  const BcdConfig cfg;
  const auto a = initialize(ch, p, cfg), b = initialize(ch, p, cfg);
  REQUIRE(a.has_value());
  CHECK(a->w == b->w);
  CHECK(a->delta == b->delta);
  CHECK(a->w == reference_beamformer(4, p.P));
  for (const auto& v : a->phi) CHECK(v == CVector::Ones(8));
  for (int j = 0; j < 2; ++j) {
    const double incident = p.chi * (ch.F[j] * a->w).squaredNorm();
    CHECK(a->delta(j) == doctest::Approx(0.9 * std::sqrt(1.0 - p.mu * 8 / incident)));
    CHECK(p.chi * (1.0 - a->delta(j) * a->delta(j)) * (ch.F[j] * a->w).squaredNorm() >= p.mu * 8);
  }

  p.mu = 0.0;
  for (int d = 0; d < 5; ++d) CHECK(initialize(testutil::desk_channels(51, d), p, cfg).has_value());
}

TEST_CASE("starved energy budget makes the start infeasible") {
  const ChannelSet ch = testutil::desk_channels(51, 1);
  SystemParams p;
  p.P = 1e-12;
  CHECK_FALSE(initialize(ch, p, BcdConfig{}).has_value());
  const RunReport r = run(ch, p);
  CHECK(r.status == RunStatus::InitInfeasible);
  CHECK(r.wsse_trace.empty());
  CHECK(r.wsse() == 0.0);
}

TEST_CASE("desk runs: monotone, converged, feasible, bookkeeping complete") {
  const SystemParams p;
  for (int drop = 0; drop < 3; ++drop) {
    const ChannelSet ch = testutil::desk_channels(52, drop);
    const RunReport r = run(ch, p);
    REQUIRE(r.status == RunStatus::Converged);
    CHECK(r.max_decrease() <= 1e-6);
    CHECK(r.outer_iterations() <= 30);
    CHECK(r.wsse_trace.size() == r.steps.size() + 1);
    for (const auto& s : r.steps) {
      CHECK(s.fp_residual <= 1e-9);
      CHECK(s.refl_inner >= 1);
      CHECK(s.beam_inner >= 1);
      CHECK(s.refl_rank_gap <= 1e-3);
      CHECK(s.beam_rank_gap <= 1e-3);
    }
    CHECK(r.constraints.feasible(1e-6));
    CHECK(r.final_state.w.squaredNorm() <= p.P * (1.0 + 1e-9));
    CHECK(r.final_rates.sum() == doctest::Approx(r.wsse()).epsilon(1e-12));
    CHECK(r.pu_rate >= p.r_th * (1.0 - 1e-6));
    CHECK(r.decoder.order() == decoding_order(ch, p));

    // restarting at the end point stops almost at once
    const RunReport again = run(ch, p, BcdConfig{}, Receiver::Sic, r.final_state);
    CHECK(again.outer_iterations() <= 2);
    CHECK(again.wsse() >= r.wsse() - 1e-6);
  }
}

TEST_CASE("runs are deterministic") {
  const ChannelSet ch = testutil::desk_channels(53, 0);
  const SystemParams p;
  const RunReport a = run(ch, p), b = run(ch, p);
  CHECK(a.wsse_trace == b.wsse_trace);
  CHECK(a.final_state.w == b.final_state.w);
}

TEST_CASE("SUD receiver uses its own decoder") {
  const ChannelSet ch = testutil::desk_channels(54, 0);
  const SystemParams p;
  const RunReport r = run(ch, p, BcdConfig{}, Receiver::Sud);
  CHECK(r.decoder.receiver() == Receiver::Sud);
  CHECK(r.max_decrease() <= 1e-6);
}

TEST_CASE("configuration checks") {
  BcdConfig c;
  c.max_outer = 0;
  CHECK_THROWS(c.validate());
  c = {};
  c.init_delta_fraction = 1.5;
  CHECK_THROWS(c.validate());
  CHECK(to_string(RunStatus::Converged) == "converged");
}
