// Copyright 2026 The refarm Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "refarm/allocator.hpp"
#include "refarm/config.hpp"
#include "refarm/errors.hpp"
#include "refarm/rng.hpp"

using namespace refarm;

namespace {

// Rayleigh-like gains: |CN(0,1)|^2.
Eigen::MatrixXd random_gains(std::size_t K, std::size_t N, RngStream& rng) {
  Eigen::MatrixXd g(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(N));
  for (auto& v : g.reshaped()) v = std::norm(rng.complex_normal(1.0));
  return g;
}

AllocationProblem problem(Eigen::MatrixXd gains, double floor, double margin, double cap) {
  AllocationProblem p;
  p.power_caps.assign(static_cast<std::size_t>(gains.rows()), cap);
  p.gains = std::move(gains);
  p.noise_floor = floor;
  p.margin = margin;
  return p;
}

void check_feasible(const PowerAllocation& a, const AllocationProblem& p) {
  CHECK(a.is_exclusive());
  CHECK((a.powers.array() >= 0.0).all());
  for (std::size_t k = 0; k < p.num_users(); ++k) CHECK(a.user_power(k) <= p.power_caps[k] + 1e-9);
  CHECK(a.mean_interference(p.gains) <= p.margin + 1e-9);
}

}  // namespace

TEST_CASE("power_candidate: examples") {
  CHECK(power_candidate(1.0, 0.0, 0.1, 1.0) == doctest::Approx(1.0 / (0.1 * std::numbers::ln2) - 1.0).epsilon(1e-14));
  CHECK(power_candidate(1.0, 0.0, 0.1, 1.0) == doctest::Approx(13.4270).epsilon(1e-5));
  CHECK(power_candidate(0.01, 0.0, 1.0, 1.0) == 0.0);
  CHECK(power_candidate(0.0, 0.0, 0.0, 1.0) == 0.0);
  CHECK_THROWS_AS(power_candidate(1.0, 0.0, 0.0, 1.0), InvalidParameter);
  // lambda = 0: p g is the same on every subcarrier.
  const double level = power_candidate(0.5, 0.1, 0.0, 1.0) * 0.5;
  for (double g : {0.7, 1.3, 4.0}) CHECK(power_candidate(g, 0.1, 0.0, 1.0) * g == doctest::Approx(level).epsilon(1e-12));
}

TEST_CASE("assign_subcarrier: single user, gain order and ties") {
  const std::vector<double> lam1{0.1};
  CHECK(assign_subcarrier(std::vector<double>{2.0}, std::vector<double>{1.0}, 0.0, lam1, 1.0) == 0u);
  CHECK_FALSE(assign_subcarrier(std::vector<double>{0.0}, std::vector<double>{0.01}, 0.0, lam1, 1.0).has_value());

  const std::vector<double> lam{0.1, 0.1};
  const std::vector<double> g{2.0, 1.0};
  std::vector<double> cand{power_candidate(2.0, 0.01, 0.1, 1.0), power_candidate(1.0, 0.01, 0.1, 1.0)};
  CHECK(assign_subcarrier(cand, g, 0.01, lam, 1.0) == 0u);
  const std::vector<double> g_swap{1.0, 2.0};
  std::vector<double> cand_swap{cand[1], cand[0]};
  CHECK(assign_subcarrier(cand_swap, g_swap, 0.01, lam, 1.0) == 1u);

  const std::vector<double> tie_g{1.5, 1.5};
  const double c = power_candidate(1.5, 0.01, 0.1, 1.0);
  CHECK(assign_subcarrier(std::vector<double>{c, c}, tie_g, 0.01, lam, 1.0) == 0u);
}

TEST_CASE("subgradient_step: signs and projection") {
  RngStream rng(1);
  const AllocationProblem p = problem(random_gains(2, 16, rng), 21.0, 40.0, 100.0);
  DualState s = DualState::initial(p, SolverOptions{});

  // Nothing transmitted: both constraints slack, all duals shrink toward 0.
  const DualState down = subgradient_step(s, PowerAllocation::zeros(2, 16), p);
  CHECK(down.delta < s.delta);
  CHECK(down.lambdas[0] < s.lambdas[0]);
  CHECK(down.delta >= 0.0);
  DualState low = s;
  low.delta = 1e-12;
  CHECK(subgradient_step(low, PowerAllocation::zeros(2, 16), p).delta == 0.0);

  // User 0 over its cap: its price rises.
  PowerAllocation over = PowerAllocation::zeros(2, 16);
  over.powers(0, 0) = 150.0;
  over.refresh_owner();
  const DualState up = subgradient_step(s, over, p);
  CHECK(up.lambdas[0] > s.lambdas[0]);
  CHECK(up.lambdas[1] < s.lambdas[1]);
}

TEST_CASE("subgradient_step: converged duals are nearly stationary") {
  RngStream rng(2);
  const AllocationProblem p = problem(random_gains(2, 64, rng), 61.0, 2.0, 1000.0);
  const P1Result r = solve_p1(p);
  REQUIRE(r.converged);
  const DualState next = subgradient_step(r.state, r.allocation, p);
  const double step = r.state.step_scale / std::sqrt(static_cast<double>(r.state.iteration + 1));
  CHECK(std::abs(next.delta - r.state.delta) <= step * r.state.delta_scale * 1e-3 + 1e-12);
}

TEST_CASE("solve_p1: light load spends every cap") {
  RngStream rng(3);
  const AllocationProblem p = problem(random_gains(2, 256, rng), 11.0, 60.0, 1000.0);
  const P1Result r = solve_p1(p);
  CHECK(r.converged);
  CHECK(r.relative_gap < 1e-3);
  for (std::size_t k = 0; k < 2; ++k) CHECK(r.allocation.user_power(k) == doctest::Approx(1000.0).epsilon(1e-6));
  CHECK(r.allocation.mean_interference(p.gains) < p.margin);
  check_feasible(r.allocation, p);
}

TEST_CASE("solve_p1: heavy load binds the margin") {
  RngStream rng(4);
  const AllocationProblem p = problem(random_gains(2, 256, rng), 61.0, 2.0, 1000.0);
  const P1Result r = solve_p1(p);
  CHECK(r.converged);
  CHECK(r.relative_gap < 1e-3);
  CHECK(r.allocation.mean_interference(p.gains) == doctest::Approx(2.0).epsilon(1e-4));
  for (std::size_t k = 0; k < 2; ++k) CHECK(r.allocation.user_power(k) < 1000.0);
  CHECK(r.state.delta > 0.0);
  check_feasible(r.allocation, p);
}

TEST_CASE("solve_p1: trivial problem returns a flagged zero allocation") {
  RngStream rng(5);
  const P1Result r = solve_p1(problem(random_gains(2, 8, rng), 1.0, 0.0, 0.0));
  CHECK(r.trivial);
  CHECK(r.throughput == 0.0);
  CHECK(r.allocation.powers.isZero());
  const P1Result no_margin = solve_p1(problem(random_gains(2, 8, rng), 1.0, 0.0, 50.0));
  CHECK(no_margin.throughput == 0.0);
}

TEST_CASE("solve_p1: invalid problems are rejected") {
  RngStream rng(6);
  AllocationProblem p = problem(random_gains(2, 8, rng), 1.0, 1.0, 1.0);
  p.gains(0, 0) = -1.0;
  CHECK_THROWS_AS(solve_p1(p), InvalidParameter);
  p = problem(random_gains(2, 8, rng), 0.0, 1.0, 1.0);
  CHECK_THROWS_AS(solve_p1(p), InvalidParameter);
  p = problem(random_gains(2, 8, rng), 1.0, -1.0, 1.0);
  CHECK_THROWS_AS(solve_p1(p), InvalidParameter);
  p = problem(random_gains(2, 8, rng), 1.0, 1.0, 1.0);
  p.power_caps.pop_back();
  CHECK_THROWS_AS(solve_p1(p), InvalidParameter);
}

TEST_CASE("solve_p1: matches the brute-force oracle on tiny instances") {
  RngStream rng(7);
  for (int i = 0; i < 20; ++i) {
    const AllocationProblem p =
        problem(random_gains(2, 4, rng), rng.uniform(1.0, 30.0), rng.uniform(0.5, 20.0), rng.uniform(1.0, 50.0));
    const P1Result r = solve_p1(p);
    const OracleResult o = brute_force_oracle(p);
    CHECK(o.assignments == 16u);
    CHECK(r.throughput >= o.throughput * 0.99);
    CHECK(r.throughput <= o.throughput * (1.0 + 1e-6));
    check_feasible(r.allocation, p);
  }
}

TEST_CASE("property: feasibility, exclusivity and gap on randomized instances") {
  RngStream rng(8);
  for (int i = 0; i < 12; ++i) {
    const double floor = rng.uniform(2.0, 100.0);
    const AllocationProblem p = problem(random_gains(2, 256, rng), floor, rng.uniform(0.2, 80.0),
                                        db_to_linear(rng.uniform(10.0, 35.0)));
    const P1Result r = solve_p1(p);
    check_feasible(r.allocation, p);
    CHECK(r.relative_gap < 1e-3);
    CHECK(r.state.iteration <= 5000u);
    CHECK(r.state.delta >= 0.0);
    for (double l : r.state.lambdas) CHECK(l >= 0.0);
    for (std::size_t t = 1; t < r.state.gap_trace.size(); ++t)
      CHECK(r.state.gap_trace[t] <= r.state.gap_trace[t - 1]);

    // Complementary slackness: the margin binds, or every cap does.
    const bool margin_binds = std::abs(r.allocation.mean_interference(p.gains) - p.margin) <= 1e-4 * p.margin;
    bool caps_bind = true;
    for (std::size_t k = 0; k < 2; ++k)
      caps_bind = caps_bind && std::abs(r.allocation.user_power(k) - p.power_caps[k]) <= 1e-4 * p.power_caps[k];
    CHECK((margin_binds || caps_bind));
  }
}

TEST_CASE("property: throughput does not decrease when constraints are relaxed") {
  RngStream rng(9);
  const Eigen::MatrixXd g = random_gains(2, 128, rng);
  double prev = 0.0;
  for (double T : {0.5, 1.0, 2.0, 5.0, 10.0, 30.0}) {
    const double thr = solve_p1(problem(g, 21.0, T, 300.0)).throughput;
    CHECK(thr >= prev * (1.0 - 1e-9));
    prev = thr;
  }
  prev = 0.0;
  for (double cap : {10.0, 30.0, 100.0, 300.0, 1000.0}) {
    AllocationProblem p = problem(g, 21.0, 20.0, 300.0);
    p.power_caps = {cap, 300.0};
    const double thr = solve_p1(p).throughput;
    CHECK(thr >= prev * (1.0 - 1e-9));
    prev = thr;
  }
}

TEST_CASE("solve_p1: single user with a loose margin is water-filling") {
  RngStream rng(10);
  const AllocationProblem p = problem(random_gains(1, 64, rng), 5.0, 1e6, 200.0);
  const P1Result r = solve_p1(p);
  const WaterfillResult w = solve_p2_waterfill(p.gains.row(0).transpose(), 200.0, 5.0);
  for (Eigen::Index n = 0; n < 64; ++n) CHECK(r.allocation.powers(0, n) == doctest::Approx(w.powers[n]).epsilon(1e-9).scale(1.0));
}

TEST_CASE("solve_p2_waterfill: examples") {
  const WaterfillResult flat = solve_p2_waterfill(Eigen::VectorXd::Ones(8), 40.0, 1.0);
  for (double p : flat.powers) CHECK(p == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(solve_p2_waterfill(Eigen::VectorXd::Ones(8), 0.0, 1.0).powers.isZero());
  Eigen::VectorXd two(2);
  two << 1.0, 0.1;
  const WaterfillResult w = solve_p2_waterfill(two, 2.0, 1.0);
  CHECK(w.powers[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(w.powers[1] == 0.0);
  const WaterfillResult dead = solve_p2_waterfill(Eigen::VectorXd::Zero(4), 3.0, 1.0);
  CHECK(dead.infeasible_spend);
  CHECK(dead.powers.isZero());
  CHECK_THROWS_AS(solve_p2_waterfill(Eigen::VectorXd::Ones(2), -1.0, 1.0), InvalidParameter);
}

TEST_CASE("solve_p2_waterfill: KKT conditions") {
  RngStream rng(11);
  const Eigen::VectorXd g = random_gains(1, 100, rng).row(0).transpose();
  const WaterfillResult w = solve_p2_waterfill(g, 50.0, 3.0);
  CHECK(std::abs(w.powers.sum() - 50.0) < 1e-9);
  for (Eigen::Index n = 0; n < 100; ++n) {
    if (w.powers[n] > 0.0)
      CHECK(std::abs(w.powers[n] + 3.0 / g[n] - w.water_level) < 1e-9);
    else
      CHECK(3.0 / g[n] >= w.water_level - 1e-9);
  }
}

TEST_CASE("solve_p3_channel_inverse: closed form and gain independence") {
  RngStream rng(12);
  const double T = 42.096, floor = 21.0;
  const double closed = 256.0 * std::log2(1.0 + T / floor);
  CHECK(closed == doctest::Approx(406.3).epsilon(1e-4));
  for (int i = 0; i < 2; ++i) {
    const AllocationProblem p = problem(random_gains(2, 256, rng), floor, T, 1e9);
    const ChannelInverseResult r = solve_p3_channel_inverse(p);
    CHECK(r.throughput == doctest::Approx(closed).epsilon(1e-9));
    CHECK_FALSE(r.reduced);
    CHECK(r.allocation.mean_interference(p.gains) == doctest::Approx(T).epsilon(1e-12));
    const Eigen::VectorXd recv = r.allocation.interference(p.gains);
    CHECK((recv.array() - T).abs().maxCoeff() < 1e-9 * T);
    for (std::size_t n = 0; n < 256; ++n) {
      const auto in = static_cast<Eigen::Index>(n);
      CHECK(*r.allocation.owner[n] == (p.gains(0, in) >= p.gains(1, in) ? 0u : 1u));
    }
  }
}

TEST_CASE("solve_p3_channel_inverse: zero margin and dead subcarriers") {
  RngStream rng(13);
  const ChannelInverseResult zero = solve_p3_channel_inverse(problem(random_gains(2, 16, rng), 21.0, 0.0, 10.0));
  CHECK(zero.throughput == 0.0);
  CHECK(zero.allocation.powers.isZero());

  Eigen::MatrixXd g = random_gains(2, 16, rng);
  g.col(5).setZero();
  const ChannelInverseResult r = solve_p3_channel_inverse(problem(g, 21.0, 4.0, 10.0));
  CHECK(r.reduced);
  CHECK(r.active_subcarriers == 15u);
  CHECK_FALSE(r.allocation.owner[5].has_value());
  CHECK(r.throughput == doctest::Approx(15.0 * std::log2(1.0 + 4.0 * 16.0 / 15.0 / 21.0)).epsilon(1e-12));
}

TEST_CASE("brute_force_oracle: single variable with a binding margin") {
  Eigen::MatrixXd g(1, 1);
  g << 1.0;
  const OracleResult o = brute_force_oracle(problem(g, 3.0, 2.0, 1e6));
  CHECK(o.allocation.powers(0, 0) == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(o.throughput == doctest::Approx(std::log2(1.0 + 2.0 / 3.0)).epsilon(1e-8));
}

TEST_CASE("brute_force_oracle: symmetric instance") {
  Eigen::MatrixXd g(2, 2);
  g << 1.0, 1.0, 1.0, 1.0;
  const OracleResult o = brute_force_oracle(problem(g, 1.0, 100.0, 4.0));
  // Each user puts its whole cap on one subcarrier.
  CHECK(o.throughput == doctest::Approx(2.0 * std::log2(5.0)).epsilon(1e-8));
  CHECK(o.assignments == 4u);
}

TEST_CASE("brute_force_oracle: refuses large instances") {
  RngStream rng(14);
  CHECK_THROWS_AS(brute_force_oracle(problem(random_gains(2, 7, rng), 1.0, 1.0, 1.0)), InvalidParameter);
  CHECK_THROWS_AS(brute_force_oracle(problem(random_gains(3, 4, rng), 1.0, 1.0, 1.0)), InvalidParameter);
}

TEST_CASE("project_feasible: caps first, then the margin") {
  Eigen::MatrixXd g(2, 2);
  g << 1.0, 2.0, 1.0, 1.0;
  AllocationProblem p = problem(g, 1.0, 1.0, 3.0);
  PowerAllocation a = PowerAllocation::zeros(2, 2);
  a.powers(0, 0) = 6.0;  // over cap 3 -> 3
  a.powers(1, 1) = 1.0;
  a.refresh_owner();
  project_feasible(a, p);
  check_feasible(a, p);
  // After capping, mean interference (3 + 1) / 2 = 2 is halved to the margin.
  CHECK(a.powers(0, 0) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(a.powers(1, 1) == doctest::Approx(0.5).epsilon(1e-12));
}
