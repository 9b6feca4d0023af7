#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "sdq/classical.hpp"
#include "sdq/reparam.hpp"

using namespace sdq;

TEST_CASE("velocity field collapses to -(eta/m) q on the homogeneous branch") {
  SDParams p;
  p.q0 = 1.0;
  p.v0 = -1.0;
  const VelocityField h = velocity_field(p);
  CHECK(h.a == doctest::Approx(-1.0));
  CHECK(h.b == doctest::Approx(0.0));
  CHECK(h(0.7) == doctest::Approx(-0.7));
  CHECK(h(0.0) == doctest::Approx(0.0));

  SDParams half;
  half.m = 2.0;
  half.eta = 1.0;
  half.q0 = 4.0;
  half.v0 = -2.0;
  const VelocityField h2 = velocity_field(half);
  CHECK(h2.a == doctest::Approx(-0.5));
  CHECK(h2.b == doctest::Approx(0.0));
  CHECK(h2(3.0) == doctest::Approx(-1.5));
}

TEST_CASE("velocity field carries the rest offset for inhomogeneous states") {
  SDParams p;
  p.q0 = 0.0;
  p.v0 = 1.0;  // q_inf = 1
  const VelocityField h = velocity_field(p);
  // h(q0) must reproduce v0, h(q_inf) must vanish
  CHECK(h(p.q0) == doctest::Approx(p.v0));
  CHECK(h(p.q_limit()) == doctest::Approx(0.0));
}

TEST_CASE("velocity field rejects the rest trajectory") {
  SDParams p;
  p.v0 = 0.0;
  CHECK_THROWS_AS(velocity_field(p), validation_error);
}

TEST_CASE("transformed force values") {
  CHECK(transformed_force(1.0, 1.0, 0.0) == 0.0);
  CHECK(transformed_force(1.0, 1.0, 1.0) == doctest::Approx(1.0));
  CHECK(transformed_force(3.0, 2.0, -1.0) == doctest::Approx(-4.5));
  CHECK_THROWS_AS(transformed_force(1.0, 0.0, 1.0), validation_error);
}

TEST_CASE("source function values and conventions") {
  CHECK(source_function(1.0, 1.0, 0.0) == 0.0);
  CHECK(source_function(1.0, 1.0, 1.0) == doctest::Approx(0.5));
  CHECK(source_function(2.0, 4.0, 3.0) == doctest::Approx(4.5));
  CHECK(source_function(1.0, 1.0, 1.0, SourceConvention::doubled) == doctest::Approx(1.0));
}

TEST_CASE("source endpoint difference equals the dissipated work") {
  SDParams p;
  p.q0 = 1.0;
  p.v0 = -1.0;
  const auto traj = analytic_trajectory(p, make_time_grid(20.0, 1e-4));
  const double endpoint_diff =
      source_function(p.eta, p.m, traj.q.front()) - source_function(p.eta, p.m, traj.q.back());
  CHECK(dissipated_work(traj, p.eta) == doctest::Approx(endpoint_diff).epsilon(1e-6));
}

TEST_CASE("force is minus eta times the field on the homogeneous branch") {
  SDParams p;
  p.m = 2.5;
  p.eta = 0.8;
  p.q0 = 3.0;
  p.v0 = -p.eta / p.m * p.q0;  // q_inf = 0
  const VelocityField h = velocity_field(p);
  for (double q : {-2.0, -0.5, 0.0, 1.0, 4.0})
    CHECK(-p.eta * h(q) == doctest::Approx(transformed_force(p.eta, p.m, q)).epsilon(1e-14));
}

TEST_CASE("source derivative recovers the transformed force") {
  const double eta = 1.7, m = 0.9;
  for (double q : {-3.0, -1.0, 0.0, 0.5, 2.0}) {
    const double d = 1e-5;
    const double grad = (source_function(eta, m, q + d) - source_function(eta, m, q - d)) / (2.0 * d);
    CHECK(grad == doctest::Approx(transformed_force(eta, m, q)).epsilon(1e-8));
  }
}

TEST_CASE("characteristic roots of both forms") {
  const RootPair orig = characteristic_roots(1.0, 1.0, EomForm::original);
  CHECK(orig.r1 == doctest::Approx(-1.0));
  CHECK(orig.r2 == doctest::Approx(0.0));
  CHECK(orig.admissible == doctest::Approx(-1.0));

  const RootPair trans = characteristic_roots(2.0, 1.0, EomForm::transformed);
  CHECK(trans.r1 == doctest::Approx(0.5));
  CHECK(trans.r2 == doctest::Approx(-0.5));
  CHECK(trans.admissible == doctest::Approx(-0.5));

  // the admissible exponents of the two forms coincide for any parameters
  std::mt19937 rng(11u);
  std::uniform_real_distribution<double> coef(0.1, 10.0);
  for (int i = 0; i < 50; ++i) {
    const double m = coef(rng), eta = coef(rng);
    CHECK(characteristic_roots(m, eta, EomForm::original).admissible ==
          doctest::Approx(characteristic_roots(m, eta, EomForm::transformed).admissible).epsilon(1e-15));
  }
}

TEST_CASE("hamiltonian stiffness") {
  SDParams p;
  CHECK(build_hamiltonian(p).stiffness == doctest::Approx(0.5));
  p.m = 2.0;
  p.eta = 2.0;
  CHECK(build_hamiltonian(p).stiffness == doctest::Approx(1.0));
  CHECK(build_hamiltonian(p).potential(2.0) == doctest::Approx(4.0));
}

TEST_CASE("variational residual vanishes on the decaying trajectory") {
  SDParams p;
  p.q0 = 1.0;
  p.v0 = -1.0;
  const HamiltonianSpec spec = build_hamiltonian(p);
  const auto traj = analytic_trajectory(p, make_time_grid(5.0, 1e-3));
  const double resid =
      eom_residual(p.m, [&](double q) { return spec.potential(q); }, traj);
  CHECK(resid < 1e-6);

  // a non-solving path leaves an O(1) residual
  Trajectory line;
  line.t = make_time_grid(1.0, 0.01);
  line.dt = 0.01;
  for (double t : line.t) {
    line.q.push_back(1.0 + t);
    line.v.push_back(1.0);
  }
  CHECK(eom_residual(p.m, [&](double q) { return spec.potential(q); }, line) > 0.5);
}

TEST_CASE("work equivalence on the unit SD system") {
  SDParams p;
  p.q0 = 1.0;
  p.v0 = -1.0;
  const WorkEquivalence we = work_equivalence(p, 0.0, 10.0, 1000000);
  const double closed = 0.4999999989694232;  // (1 - exp(-20))/2
  CHECK(std::abs(we.w_time - closed) < 1e-8);
  CHECK(std::abs(we.w_position - closed) < 1e-8);
  CHECK(we.gap < 1e-8);
}

TEST_CASE("work equivalence degenerate and invalid intervals") {
  SDParams p;
  p.q0 = 1.0;
  p.v0 = -1.0;
  const WorkEquivalence we = work_equivalence(p, 3.0, 3.0, 100);
  CHECK(we.w_time == 0.0);
  CHECK(we.w_position == 0.0);
  CHECK(we.gap == 0.0);
  CHECK_THROWS_AS(work_equivalence(p, 2.0, 1.0, 100), validation_error);
  CHECK_THROWS_AS(work_equivalence(p, 0.0, 1.0, 1), validation_error);
  CHECK_THROWS_AS(work_equivalence(p, -1.0, 1.0, 100), validation_error);
  p.v0 = 0.0;
  CHECK_THROWS_AS(work_equivalence(p, 0.0, 1.0, 100), validation_error);
}

TEST_CASE("midpoint gap shrinks at second order") {
  std::mt19937 rng(33u);
  std::uniform_real_distribution<double> coef(0.2, 5.0);
  std::uniform_real_distribution<double> state(-4.0, 4.0);
  for (int draw = 0; draw < 10; ++draw) {
    SDParams p;
    p.m = coef(rng);
    p.eta = coef(rng);
    p.q0 = state(rng);
    do {
      p.v0 = state(rng);
    } while (std::abs(p.v0) < 0.1);
    const double horizon = 3.0 * p.m / p.eta;
    const double g1 = work_equivalence(p, 0.0, horizon, 1000).gap;
    const double g2 = work_equivalence(p, 0.0, horizon, 2000).gap;
    if (g1 < 1e-13) continue;  // below roundoff, order unmeasurable
    CHECK(g1 / g2 >= 3.9);
  }
}

TEST_CASE("riemann tag variants converge to the same limit") {
  SDParams p;
  p.q0 = 1.0;
  p.v0 = -1.0;
  const double closed = 0.4999999989694232;
  const double left = work_equivalence(p, 0.0, 10.0, 200000, RiemannTag::left).w_time;
  const double right = work_equivalence(p, 0.0, 10.0, 200000, RiemannTag::right).w_time;
  const double mid = work_equivalence(p, 0.0, 10.0, 200000, RiemannTag::midpoint).w_time;
  CHECK(std::abs(left - closed) < 1e-4);
  CHECK(std::abs(right - closed) < 1e-4);
  CHECK(std::abs(mid - closed) < 1e-9);
  // first-order tags straddle the limit, midpoint sits between
  CHECK(std::abs(mid - closed) < std::abs(left - closed));
  CHECK(std::abs(mid - closed) < std::abs(right - closed));

  // halving the cell width halves the left-tag error (first order)
  const double e1 = std::abs(work_equivalence(p, 0.0, 10.0, 50000, RiemannTag::left).w_time - closed);
  const double e2 = std::abs(work_equivalence(p, 0.0, 10.0, 100000, RiemannTag::left).w_time - closed);
  CHECK(e1 / e2 == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("work equivalence on a sampled trajectory") {
  SDParams p;
  p.m = 1.3;
  p.eta = 0.9;
  p.q0 = -2.0;
  p.v0 = 1.7;
  const auto traj = analytic_trajectory(p, make_time_grid(12.0, 1e-4));
  const WorkEquivalence we = work_equivalence(traj, p.eta);
  CHECK(we.gap < 1e-7);
  const double drop = 0.5 * p.m * (traj.v.front() * traj.v.front() - traj.v.back() * traj.v.back());
  CHECK(we.w_time == doctest::Approx(drop).epsilon(1e-5));

  // a non-monotone path is refused
  Trajectory wobble;
  wobble.t = make_time_grid(10.0, 1e-2);
  wobble.dt = 1e-2;
  for (double t : wobble.t) {
    wobble.q.push_back(std::exp(-t / 4.0) * std::cos(2.0 * t));
    wobble.v.push_back(std::exp(-t / 4.0) * (-0.25 * std::cos(2.0 * t) - 2.0 * std::sin(2.0 * t)));
  }
  CHECK_THROWS_AS(work_equivalence(wobble, 1.0), validation_error);
}

TEST_CASE("trajectory identity between original and transformed forms") {
  SDParams p;
  p.m = 2.0;
  p.eta = 3.0;
  p.q0 = 1.5;
  p.v0 = -p.eta / p.m * p.q0;
  const auto grid = make_time_grid(4.0, 1e-3);
  const auto orig = integrate_eom(p, EomForm::original, grid);
  const auto trans = integrate_eom(p, EomForm::transformed, grid);
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    worst = std::max(worst, std::abs(orig.q[i] - trans.q[i]));
  CHECK(worst < 1e-8);
}
