#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "sdq/tunnelling.hpp"

using namespace sdq;

namespace {

BarrierConfig by_k(double eta, double hbar, double k, double dq) {
  return BarrierConfig::from_wavenumber(1.0, eta, hbar, 1.0, k, dq);
}

}  // namespace

TEST_CASE("barrier config validation and derived wavenumber") {
  BarrierConfig cfg;
  cfg.E = 0.5;
  CHECK(cfg.k() == doctest::Approx(1.0).epsilon(1e-15));

  const BarrierConfig byk = BarrierConfig::from_wavenumber(2.0, 1.0, 3.0, 1.0, 0.7, 1.0);
  CHECK(byk.E == doctest::Approx((3.0 * 0.7) * (3.0 * 0.7) / 4.0).epsilon(1e-15));
  CHECK(byk.k() == doctest::Approx(0.7).epsilon(1e-14));
  CHECK_THROWS_AS(BarrierConfig::from_wavenumber(1.0, 1.0, 1.0, 1.0, -0.5, 1.0), validation_error);

  BarrierConfig bad = cfg;
  bad.E = 0.0;
  CHECK_THROWS_AS(bad.validate(), validation_error);
  bad = cfg;
  bad.eta = -1.0;
  CHECK_THROWS_AS(bad.validate(), validation_error);
  bad = cfg;
  bad.dq = -0.1;
  CHECK_THROWS_AS(bad.validate(), validation_error);
  bad = cfg;
  bad.m = 0.0;
  CHECK_THROWS_AS(bad.validate(), validation_error);
}

TEST_CASE("mode and interior names round-trip") {
  for (TunnelMode m : {TunnelMode::closed_form, TunnelMode::matching, TunnelMode::baseline, TunnelMode::numeric})
    CHECK(parse_tunnel_mode(to_string(m)) == m);
  for (Interior in : {Interior::dissipative_only, Interior::dissipative_plus_vb, Interior::vb_only})
    CHECK(parse_interior(to_string(in)) == in);
  CHECK_THROWS_AS(parse_tunnel_mode("formula"), validation_error);
  CHECK_THROWS_AS(parse_interior("none"), validation_error);
}

TEST_CASE("closed-form transmission values") {
  // zero width: prefactor alone, above 1 and flagged
  const TransmissionResult wide_open = closed_form_transmission(by_k(1.0, 1.0, 1.0, 0.0));
  CHECK(wide_open.T == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(wide_open.nonphysical);
  CHECK(!wide_open.R.has_value());
  CHECK(!wide_open.flux_error.has_value());

  const TransmissionResult slow = closed_form_transmission(by_k(1.0, 1.0, 0.1, 2.0));
  CHECK(slow.T == doctest::Approx(0.10821276216749529).epsilon(1e-12));
  CHECK(!slow.nonphysical);

  CHECK_THROWS_AS(closed_form_transmission(by_k(0.0, 1.0, 1.0, 1.0)), validation_error);
}

TEST_CASE("closed-form variants are distinct transcriptions") {
  BarrierConfig cfg;
  cfg.hbar = 2.0;
  cfg.E = 0.5;  // k = 1/2
  const double k = cfg.k();
  const double damp = std::exp(-(cfg.eta / cfg.hbar) * cfg.dq * cfg.dq) * std::exp(2.0 * k * cfg.dq);
  const double canonical = closed_form_transmission(cfg, ClosedFormVariant::canonical).T;
  const double ratio = closed_form_transmission(cfg, ClosedFormVariant::wavenumber_ratio).T;
  CHECK(canonical == doctest::Approx(4.0 / (1.0 + 4.0 * 0.25) * damp).epsilon(1e-13));
  CHECK(ratio == doctest::Approx(4.0 / (1.0 + 2.0 * 0.25) * damp).epsilon(1e-13));
  CHECK(canonical != ratio);

  BarrierConfig ed;
  ed.E = 0.5;
  ed.V_B = 0.3;
  const double diff = closed_form_transmission(ed, ClosedFormVariant::energy_difference).T;
  const double damp2 = std::exp(-ed.dq * ed.dq) * std::exp(2.0 * ed.k() * ed.dq);
  CHECK(diff == doctest::Approx(4.0 / 1.4 * damp2).epsilon(1e-13));

  // printed denominator goes nonpositive below the barrier
  BarrierConfig deep;
  deep.E = 0.1;
  deep.V_B = 1.0;
  CHECK_THROWS_AS(closed_form_transmission(deep, ClosedFormVariant::energy_difference), numerical_error);
}

TEST_CASE("matched amplitudes solve their defining relations") {
  std::mt19937 rng(7u);
  std::uniform_real_distribution<double> pos(0.2, 5.0);
  for (int draw = 0; draw < 40; ++draw) {
    BarrierConfig cfg;
    cfg.m = pos(rng);
    cfg.eta = pos(rng);
    cfg.hbar = pos(rng);
    cfg.E = pos(rng);
    cfg.dq = pos(rng);
    const MatchedAmplitudes amp = matched_amplitudes(cfg);
    const double k = cfg.k();
    const std::complex<double> ik(0.0, k);
    const std::complex<double> gauss = std::exp(-0.5 * (cfg.eta / cfg.hbar) * cfg.dq * cfg.dq);
    const std::complex<double> plane = std::exp(std::complex<double>(0.0, k * cfg.dq));

    const double scale = std::abs(amp.b) + 1.0;
    CHECK(std::abs(amp.a_i + amp.a_r - amp.b) <= 1e-12 * scale);
    CHECK(std::abs(ik * amp.a_i - ik * amp.a_r - (-(cfg.eta / cfg.hbar) * amp.b)) <= 1e-12 * k * scale);
    CHECK(std::abs(amp.b * gauss - amp.a_t * plane) <= 1e-12 * scale);

    // amplitude relation between the incident and interior coefficients
    const double hk = cfg.hbar * k;
    CHECK(std::norm(amp.a_i) ==
          doctest::Approx((cfg.eta * cfg.eta + hk * hk) * std::norm(amp.b) / (4.0 * hk * hk)).epsilon(1e-12));

    // the dropped condition would need ik = -eta/hbar, impossible for real k
    CHECK(amp.consistency_residual ==
          doctest::Approx(std::sqrt(cfg.eta * cfg.eta + hk * hk) / hk).epsilon(1e-12));
    CHECK(amp.consistency_residual > 1.0);
  }
}

TEST_CASE("matched amplitude examples") {
  const BarrierConfig cfg = by_k(1.0, 1.0, 1.0, 1.0);
  const MatchedAmplitudes amp = matched_amplitudes(cfg);
  const std::complex<double> ikh(0.0, 1.0);
  const std::complex<double> b_expect = 2.0 * ikh / (ikh - 1.0);
  CHECK(std::abs(amp.b - b_expect) < 1e-14);
  CHECK(amp.consistency_residual == doctest::Approx(1.4142135623730951).epsilon(1e-14));

  CHECK_THROWS_AS(matched_amplitudes(by_k(0.0, 1.0, 1.0, 1.0)), validation_error);
  CHECK_THROWS_AS(matched_amplitudes(cfg, std::complex<double>(0.0, 0.0)), validation_error);

  const TransmissionResult tr = matching_transmission(cfg);
  CHECK(tr.T == doctest::Approx(0.7357588823428847).epsilon(1e-13));
  CHECK(!tr.R.has_value());
}

TEST_CASE("baseline textbook barrier") {
  BarrierConfig cfg;  // m=1, hbar=1, V_B=1, E=0.5, dq=1
  const TransmissionResult tr = baseline_transmission(cfg);
  CHECK(tr.T == doctest::Approx(0.4199743416140261).epsilon(1e-14));
  CHECK(*tr.R == doctest::Approx(1.0 - tr.T).epsilon(1e-14));
  CHECK(*tr.flux_error == 0.0);

  BarrierConfig open = cfg;
  open.V_B = 0.0;
  CHECK(baseline_transmission(open).T == 1.0);

  BarrierConfig thin = cfg;
  thin.dq = 0.0;
  CHECK(baseline_transmission(thin).T == 1.0);

  // E = V_B limit continues the two branches
  BarrierConfig at = cfg;
  at.E = 1.0;
  const double t_at = baseline_transmission(at).T;
  CHECK(t_at == doctest::Approx(1.0 / 1.5).epsilon(1e-14));
  BarrierConfig below = at, above = at;
  below.E = 1.0 - 1e-9;
  above.E = 1.0 + 1e-9;
  CHECK(baseline_transmission(below).T == doctest::Approx(t_at).epsilon(1e-7));
  CHECK(baseline_transmission(above).T == doctest::Approx(t_at).epsilon(1e-7));

  // over-barrier branch oscillates through perfect transmission
  BarrierConfig res = cfg;
  res.E = 2.0;  // kt = sqrt(2), first resonance at dq = pi/kt
  res.dq = M_PI / std::sqrt(2.0);
  CHECK(baseline_transmission(res).T == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("transfer matrix conserves the wronskian") {
  for (double eta : {0.0, 1.0, 2.5}) {
    for (double dq : {0.5, 1.0, 2.0}) {
      BarrierConfig cfg;
      cfg.eta = eta;
      cfg.dq = dq;
      for (Interior in : {Interior::dissipative_only, Interior::dissipative_plus_vb, Interior::vb_only}) {
        const TransferMatrix M = transfer_matrix(cfg, in, 5000);
        CHECK(std::abs(M.det() - 1.0) < 1e-10);
      }
    }
  }
  BarrierConfig cfg;
  CHECK_THROWS_AS(transfer_matrix(cfg, Interior::vb_only, 999), validation_error);
}

TEST_CASE("free propagation is perfectly transmitted") {
  BarrierConfig cfg;
  cfg.eta = 0.0;
  cfg.V_B = 0.0;
  const TransmissionResult tr = numeric_transmission(cfg, Interior::dissipative_plus_vb);
  CHECK(std::abs(tr.T - 1.0) <= 1e-12);
  CHECK(std::abs(*tr.R) <= 1e-12);
  CHECK(*tr.flux_error <= 1e-12);
}

TEST_CASE("numeric solver agrees with the textbook barrier") {
  for (double ratio : {0.2, 0.5, 0.8, 1.2}) {
    for (double dq : {0.5, 1.0, 2.0}) {
      BarrierConfig cfg;
      cfg.E = ratio;
      cfg.dq = dq;
      const double expect = baseline_transmission(cfg).T;
      const TransmissionResult got = numeric_transmission(cfg, Interior::vb_only);
      CHECK(std::abs(got.T - expect) / expect < 1e-8);
      CHECK(*got.flux_error < 1e-10);
    }
  }
}

TEST_CASE("numeric flux identity holds for dissipative interiors") {
  std::mt19937 rng(19u);
  std::uniform_real_distribution<double> pos(0.3, 3.0);
  for (int draw = 0; draw < 10; ++draw) {
    BarrierConfig cfg;
    cfg.eta = pos(rng);
    cfg.E = pos(rng);
    cfg.V_B = pos(rng);
    cfg.dq = pos(rng);
    for (Interior in : {Interior::dissipative_only, Interior::dissipative_plus_vb}) {
      const TransmissionResult tr = numeric_transmission(cfg, in, 4000);
      CHECK(*tr.flux_error < 1e-10);
      CHECK(tr.T >= 0.0);
      CHECK(*tr.R >= 0.0);
    }
  }
}

TEST_CASE("numeric transmission falls as damping grows") {
  double prev = 2.0;
  for (double eta : {0.5, 1.0, 1.5, 2.0, 3.0}) {
    BarrierConfig cfg;
    cfg.eta = eta;
    cfg.E = 0.5;
    cfg.dq = 1.5;
    const double t = numeric_transmission(cfg, Interior::dissipative_only, 4000).T;
    CHECK(t < prev);
    prev = t;
  }
}

TEST_CASE("closed form decays once the quadratic term dominates") {
  // d ln T / d dq = 2k - 2(eta/hbar) dq < 0 for dq > hbar k / eta
  const double k = 0.5;
  double prev = closed_form_transmission(by_k(1.0, 1.0, k, 0.6)).T;
  for (double dq : {0.8, 1.0, 1.5, 2.0, 3.0}) {
    const double t = closed_form_transmission(by_k(1.0, 1.0, k, dq)).T;
    CHECK(t < prev);
    prev = t;
  }
}

TEST_CASE("transfer matrix reports overflow with the position") {
  BarrierConfig cfg;
  cfg.V_B = 1e6;
  cfg.E = 0.5;
  cfg.dq = 1.0;
  CHECK_THROWS_WITH_AS(transfer_matrix(cfg, Interior::vb_only, 2000),
                       doctest::Contains("overflowed"), numerical_error);
}

TEST_CASE("suppression fit recovers -eta/hbar") {
  const std::vector<double> widths{0.5, 1.0, 1.5, 2.0};
  {
    const SuppressionFit fit = suppression_fit(by_k(1.0, 1.0, 0.1, 1.0), widths, TunnelMode::closed_form);
    CHECK(std::abs(fit.slope - (-1.0)) < 1e-9);
    CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(fit.mode == TunnelMode::closed_form);
  }
  {
    const SuppressionFit fit = suppression_fit(by_k(2.0, 1.0, 0.1, 1.0), widths, TunnelMode::closed_form);
    CHECK(std::abs(fit.slope - (-2.0)) < 1e-9);
  }
  {
    const SuppressionFit fit = suppression_fit(by_k(1.0, 2.0, 0.1, 1.0), widths, TunnelMode::closed_form);
    CHECK(std::abs(fit.slope - (-0.5)) < 1e-9);
  }
  {
    // matching mode is exactly quadratic with no linear factor
    const SuppressionFit fit = suppression_fit(by_k(1.5, 1.0, 0.4, 1.0), widths, TunnelMode::matching);
    CHECK(std::abs(fit.slope - (-1.5)) < 1e-9);
  }
}

TEST_CASE("suppression fit input validation") {
  const BarrierConfig cfg = by_k(1.0, 1.0, 0.1, 1.0);
  CHECK_THROWS_AS(suppression_fit(cfg, {0.5, 1.0, 1.5}, TunnelMode::closed_form), validation_error);
  CHECK_THROWS_AS(suppression_fit(cfg, {0.5, 0.5, 1.0, 1.0, 1.5}, TunnelMode::closed_form), validation_error);

  // an overflowing sinh drives the textbook T to exact zero
  BarrierConfig wall;
  wall.V_B = 1e6;
  wall.E = 0.5;
  CHECK_THROWS_AS(suppression_fit(wall, {0.5, 1.0, 1.5, 2.0}, TunnelMode::baseline), numerical_error);
}

TEST_CASE("run_transmission dispatches by mode") {
  BarrierConfig cfg;
  cfg.E = 0.5;
  CHECK(run_transmission(cfg, TunnelMode::baseline).mode == TunnelMode::baseline);
  CHECK(run_transmission(cfg, TunnelMode::closed_form).mode == TunnelMode::closed_form);
  CHECK(run_transmission(cfg, TunnelMode::matching).mode == TunnelMode::matching);
  const TransmissionResult numeric = run_transmission(cfg, TunnelMode::numeric, Interior::vb_only, 2000);
  CHECK(numeric.mode == TunnelMode::numeric);
  CHECK(numeric.T == doctest::Approx(baseline_transmission(cfg).T).epsilon(1e-8));
}
