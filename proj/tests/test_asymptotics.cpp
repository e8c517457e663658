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

#include "doctest.h"
#include "refarm/asymptotics.hpp"
#include "refarm/cdma_rx.hpp"
#include "refarm/channel.hpp"
#include "refarm/errors.hpp"
#include "refarm/rng.hpp"

using namespace refarm;

namespace {

const double kBeta = db_to_linear(2.0);
const double kRootZeroProfile = (79.0 + std::sqrt(6641.0)) / 2.0;

SystemConfig config(std::size_t N, std::size_t U, std::size_t L) {
  SystemConfig c = SystemConfig::defaults();
  c.N = N;
  c.U = U;
  c.K = 0;
  c.L = L;
  c.G = L - 1;
  c.power_caps.clear();
  return c;
}

InterferenceProfile random_profile(std::size_t N, double scale, RngStream& rng) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(N));
  for (auto& x : v) x = rng.coin() ? 0.0 : scale * rng.uniform() * rng.uniform();
  return InterferenceProfile::from_levels(v);
}

// Flat channels with the given per-user gain.
ChannelSet flat_channels(std::size_t N, const std::vector<double>& amplitude) {
  RngStream rng(0);
  ChannelSet ch = gen_channel_set(config(N, amplitude.size(), 1), ChannelModel::kAwgn, rng);
  for (std::size_t u = 0; u < amplitude.size(); ++u) {
    ch.cdma[u].values.setConstant(amplitude[u]);
    ch.cdma[u].gains.setConstant(amplitude[u] * amplitude[u]);
  }
  return ch;
}

}  // namespace

TEST_CASE("mf_asymptotic_selective: unit channels reduce to the awgn form") {
  const ChannelSet ch = flat_channels(64, std::vector<double>(10, 1.0));
  const auto zero = mf_asymptotic_selective(ch, 100.0, InterferenceProfile::zero(64), 1.0);
  const auto colored = mf_asymptotic_selective(ch, 100.0, InterferenceProfile::uniform(64, 3.0), 1.0);
  for (std::size_t u = 0; u < 10; ++u) {
    CHECK(zero[u] == doctest::Approx(100.0 / (9.0 / 64.0 * 100.0 + 1.0)).epsilon(1e-12));
    CHECK(colored[u] == doctest::Approx(100.0 / (9.0 / 64.0 * 100.0 + 3.0 + 1.0)).epsilon(1e-12));
  }
}

TEST_CASE("mf_asymptotic_selective: matches exact Monte Carlo at N=256, L=32") {
  RngStream rng(1);
  const SystemConfig cfg = config(256, 51, 32);
  double emp = 0.0, th = 0.0;
  for (int t = 0; t < 100; ++t) {
    const ChannelSet ch = gen_channel_set(cfg, ChannelModel::kSelective, rng);
    const EffectiveSignatures s = effective_signatures(gen_spreading_codes(51, 256, rng), ch);
    emp += mf_sinr_exact(s, 100.0, InterferenceProfile::zero(256), 1.0).mean;
    const auto a = mf_asymptotic_selective(ch, 100.0, InterferenceProfile::zero(256), 1.0);
    double m = 0.0;
    for (double v : a) m += v / 51.0;
    th += m;
  }
  CHECK(std::abs(emp - th) / th < 0.05);
}

TEST_CASE("mf_asymptotic_uniform: examples") {
  CHECK(mf_asymptotic_uniform(0.2, 100.0, 0.0, 1.0) == doctest::Approx(100.0 / 21.0).epsilon(1e-14));
  CHECK(mf_asymptotic_uniform(0.0, 100.0, 0.0, 1.0) == doctest::Approx(100.0).epsilon(1e-14));
  const MarginResult m = interference_margin(0.2, 100.0, 1.0, kBeta, Receiver::kMf);
  CHECK(mf_asymptotic_uniform(0.2, 100.0, m.margin, 1.0) == doctest::Approx(kBeta).epsilon(1e-8));
  CHECK(mf_asymptotic_uniform(0.2, 100.0, 42.0957, 1.0) == doctest::Approx(1.5849).epsilon(1e-4));
}

TEST_CASE("mf_asymptotic_uniform: strictly decreasing in load, interference and noise") {
  const double base = mf_asymptotic_uniform(0.3, 50.0, 2.0, 1.0);
  CHECK(mf_asymptotic_uniform(0.31, 50.0, 2.0, 1.0) < base);
  CHECK(mf_asymptotic_uniform(0.3, 50.0, 2.1, 1.0) < base);
  CHECK(mf_asymptotic_uniform(0.3, 50.0, 2.0, 1.1) < base);
}

TEST_CASE("mmse_fixed_point_selective: flat unit channels give the scalar root") {
  const ChannelSet ch = flat_channels(255, std::vector<double>(51, 1.0));
  // Coupled equations average over the full load U/N, including the user itself.
  const FixedPointSolution s = mmse_fixed_point_selective(ch, 100.0, InterferenceProfile::zero(255), 1.0);
  for (double x : s.values) CHECK(x == doctest::Approx(kRootZeroProfile).epsilon(1e-8));
  CHECK(s.residual <= 1e-10);
}

TEST_CASE("mmse_fixed_point_selective: flat channels collapse to the uniform solution") {
  RngStream rng(2);
  std::vector<double> amp(20, 1.0);
  const ChannelSet ch = flat_channels(100, amp);
  const InterferenceProfile p = random_profile(100, 8.0, rng);
  const FixedPointSolution coupled = mmse_fixed_point_selective(ch, 30.0, p, 1.0);
  const double scalar = mmse_fixed_point_uniform(0.2, 30.0, p, 1.0).value();
  for (double x : coupled.values) CHECK(x == doctest::Approx(scalar).epsilon(1e-10));
}

TEST_CASE("mmse_fixed_point_selective: single-user limit") {
  RngStream rng(3);
  const ChannelSet ch = gen_channel_set(config(256, 1, 32), ChannelModel::kSelective, rng);
  const FixedPointSolution s = mmse_fixed_point_selective(ch, 100.0, InterferenceProfile::zero(256), 1.0);
  const double interference_free = 100.0 * ch.cdma[0].mean_gain();
  CHECK(std::abs(s.value() - interference_free) / interference_free < 2.0 / 256.0);
}

TEST_CASE("mmse_fixed_point_selective: iterates from zero are nondecreasing") {
  RngStream rng(4);
  const ChannelSet ch = gen_channel_set(config(64, 20, 8), ChannelModel::kSelective, rng);
  FixedPointOptions opt;
  opt.start = 0.0;
  opt.record_history = true;
  const FixedPointSolution s = mmse_fixed_point_selective(ch, 50.0, random_profile(64, 5.0, rng), 1.0, opt);
  REQUIRE(s.history.size() >= 2);
  for (std::size_t i = 1; i < s.history.size(); ++i)
    for (std::size_t u = 0; u < 20; ++u) CHECK(s.history[i][u] >= s.history[i - 1][u] - 1e-12);
}

TEST_CASE("mmse_fixed_point_selective: iteration cap reports a numerical failure") {
  RngStream rng(5);
  const ChannelSet ch = gen_channel_set(config(64, 20, 8), ChannelModel::kSelective, rng);
  FixedPointOptions opt;
  opt.max_iterations = 2;
  CHECK_THROWS_AS(mmse_fixed_point_selective(ch, 50.0, InterferenceProfile::zero(64), 1.0, opt), NumericalFailure);
}

TEST_CASE("mmse_fixed_point_uniform: examples") {
  CHECK(mmse_fixed_point_uniform(0.0, 100.0, InterferenceProfile::zero(8), 1.0).value() ==
        doctest::Approx(100.0).epsilon(1e-12));
  CHECK(mmse_fixed_point_uniform(0.2, 100.0, InterferenceProfile::zero(256), 1.0).value() ==
        doctest::Approx(kRootZeroProfile).epsilon(1e-8));
  const MarginResult m = interference_margin(0.2, 100.0, 1.0, kBeta, Receiver::kMmse);
  CHECK(mmse_fixed_point_uniform(0.2, 100.0, InterferenceProfile::uniform(256, m.margin), 1.0).value() ==
        doctest::Approx(kBeta).epsilon(1e-8));
  CHECK(mmse_fixed_point_uniform(0.2, 100.0, InterferenceProfile::uniform(256, 54.358), 1.0).value() ==
        doctest::Approx(1.5849).epsilon(1e-4));
}

TEST_CASE("mmse_fixed_point_uniform: constant profile solves the closed-form quadratic") {
  // x = q / (a q / (1 + x) + c + s2)  <=>  (c + s2) x^2 + (a q + c + s2 - q) x - q = 0
  for (double c : {0.0, 0.5, 7.0, 40.0}) {
    const double q = 60.0, a = 0.7, b = c + 1.0;
    const double B = a * q + b - q;
    const double root = (-B + std::sqrt(B * B + 4.0 * b * q)) / (2.0 * b);
    CHECK(mmse_fixed_point_uniform(a, q, InterferenceProfile::uniform(32, c), 1.0).value() ==
          doctest::Approx(root).epsilon(1e-9));
  }
}

TEST_CASE("mmse_fixed_point_uniform: non-convergence is reported") {
  FixedPointOptions opt;
  opt.max_iterations = 1;
  CHECK_THROWS_AS(mmse_fixed_point_uniform(0.5, 100.0, InterferenceProfile::zero(8), 1.0, opt), NumericalFailure);
}

TEST_CASE("supportable_load: examples") {
  CHECK(supportable_load(100.0, 1.0, kBeta, Receiver::kMf) == doctest::Approx(0.62096).epsilon(1e-5));
  CHECK(supportable_load(100.0, 1.0, kBeta, Receiver::kMmse) == doctest::Approx(1.60511).epsilon(1e-5));
  CHECK(supportable_load(1e12, 1.0, kBeta, Receiver::kMf) == doctest::Approx(1.0 / kBeta).epsilon(1e-6));
  CHECK(supportable_load(100.0, 1.0, kBeta, Receiver::kMmse) ==
        doctest::Approx(supportable_load(100.0, 1.0, kBeta, Receiver::kMf) * (1.0 + kBeta)).epsilon(1e-15));
  CHECK(supportable_load(0.5, 1.0, kBeta, Receiver::kMf) <= 0.0);
}

TEST_CASE("interference_margin: examples and boundary") {
  const MarginResult mf = interference_margin(0.2, 100.0, 1.0, kBeta, Receiver::kMf);
  const MarginResult mmse = interference_margin(0.2, 100.0, 1.0, kBeta, Receiver::kMmse);
  CHECK(mf.feasible);
  CHECK(mf.margin == doctest::Approx(42.096).epsilon(1e-4));
  CHECK(mmse.margin == doctest::Approx(54.358).epsilon(1e-4));
  CHECK(mf.receiver == Receiver::kMf);
  const MarginResult edge = interference_margin(mf.alpha_star, 100.0, 1.0, kBeta, Receiver::kMf);
  CHECK_FALSE(edge.feasible);
  CHECK(edge.margin == 0.0);
  const MarginResult beyond = interference_margin(0.9, 100.0, 1.0, kBeta, Receiver::kMf);
  CHECK_FALSE(beyond.feasible);
  CHECK(beyond.margin == 0.0);
}

TEST_CASE("property: margin feasibility, ordering and linearity in q") {
  RngStream rng(6);
  for (int i = 0; i < 500; ++i) {
    const double q = db_to_linear(rng.uniform(0.0, 30.0));
    const double beta = db_to_linear(rng.uniform(-5.0, 10.0));
    const double alpha = rng.uniform(0.0, 2.0);
    const MarginResult mf = interference_margin(alpha, q, 1.0, beta, Receiver::kMf);
    const MarginResult mmse = interference_margin(alpha, q, 1.0, beta, Receiver::kMmse);
    CHECK(mf.feasible == (alpha < mf.alpha_star));
    CHECK(mf.feasible == (mf.margin > 0.0));
    CHECK(mmse.feasible == (mmse.margin > 0.0));
    if (mf.feasible) CHECK(mmse.margin >= mf.margin);
  }
  // With sigma2 -> 0 the loads no longer depend on q and T scales with q.
  const double t1 = interference_margin(0.2, 10.0, 1e-300, kBeta, Receiver::kMmse).margin;
  const double t2 = interference_margin(0.2, 30.0, 1e-300, kBeta, Receiver::kMmse).margin;
  CHECK(t2 == doctest::Approx(3.0 * t1).epsilon(1e-12));
}

TEST_CASE("proposition1_check: examples") {
  const MarginResult m = interference_margin(0.2, 100.0, 1.0, kBeta, Receiver::kMmse);
  CHECK(proposition1_check(kBeta, 0.2, 100.0, 1.0, InterferenceProfile::uniform(64, m.margin)));
  CHECK(proposition1_check(kBeta, 0.2, 100.0, 1.0, InterferenceProfile::zero(64)));
  CHECK_FALSE(proposition1_check(kBeta, 0.2, 100.0, 1.0, InterferenceProfile::uniform(64, 10.0 * m.margin)));
}

TEST_CASE("jensen_reinforcement_gap: examples") {
  const JensenGap u = jensen_reinforcement_gap(kBeta, 0.2, 100.0, 1.0, InterferenceProfile::uniform(16, 5.0));
  CHECK(u.lhs == doctest::Approx(u.rhs).epsilon(1e-12));
  Eigen::VectorXd alt(16);
  for (Eigen::Index n = 0; n < 16; ++n) alt[n] = n % 2 ? 10.0 : 0.0;
  const JensenGap a = jensen_reinforcement_gap(kBeta, 0.2, 100.0, 1.0, InterferenceProfile::from_levels(alt));
  CHECK(a.lhs > a.rhs);
  CHECK(a.rhs == doctest::Approx(u.rhs).epsilon(1e-12));
}

TEST_CASE("ofdma_asymptotic_sinr: examples") {
  CHECK(ofdma_asymptotic_sinr(0.0, 3.0, 0.2, 100.0, 1.0) == 0.0);
  CHECK(ofdma_asymptotic_sinr(21.0, 1.0, 0.2, 100.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(ofdma_asymptotic_sinr(42.0, 0.5, 0.2, 100.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(ofdma_asymptotic_sinr(84.0, 0.5, 0.2, 100.0, 1.0) ==
        doctest::Approx(2.0 * ofdma_asymptotic_sinr(42.0, 0.5, 0.2, 100.0, 1.0)).epsilon(1e-15));
}

TEST_CASE("property: uniform fixed point is unique across start points") {
  RngStream rng(7);
  for (int i = 0; i < 100; ++i) {
    const double alpha = rng.uniform(0.0, 2.0), q = db_to_linear(rng.uniform(0.0, 30.0));
    const InterferenceProfile p = random_profile(32, 20.0, rng);
    FixedPointOptions low;
    low.start = 1.0;
    const double a = mmse_fixed_point_uniform(alpha, q, p, 1.0).value();
    const double b = mmse_fixed_point_uniform(alpha, q, p, 1.0, low).value();
    CHECK(a == doctest::Approx(b).epsilon(1e-8));
    CHECK(a > 0.0);
    // f(x)/x is strictly decreasing, so the map crosses the diagonal once.
    auto f = [&](double x) {
      return (q / (alpha * q / (1.0 + x) + p.per_subcarrier.array() + 1.0)).mean();
    };
    CHECK(f(0.5 * a) / (0.5 * a) > 1.0);
    CHECK(f(2.0 * a) / (2.0 * a) < 1.0);
  }
}

TEST_CASE("property: Jensen reinforcement over random profiles") {
  RngStream rng(8);
  for (int i = 0; i < 1000; ++i) {
    const InterferenceProfile p = random_profile(256, rng.uniform(0.1, 100.0), rng);
    const double beta = db_to_linear(rng.uniform(-3.0, 8.0));
    const JensenGap g = jensen_reinforcement_gap(beta, rng.uniform(0.0, 1.5), db_to_linear(rng.uniform(0.0, 30.0)),
                                                 1.0, p);
    CHECK(g.lhs >= g.rhs * (1.0 - 1e-14));
  }
  for (int i = 0; i < 100; ++i) {
    const JensenGap g = jensen_reinforcement_gap(kBeta, 0.3, 50.0, 1.0, InterferenceProfile::uniform(256, rng.uniform(0.0, 50.0)));
    CHECK(g.lhs == doctest::Approx(g.rhs).epsilon(1e-12));
  }
}

TEST_CASE("property: proposition 1 agrees with the fixed point") {
  RngStream rng(9);
  int positives = 0;
  for (int i = 0; i < 1000; ++i) {
    const double alpha = rng.uniform(0.0, 2.0), q = db_to_linear(rng.uniform(0.0, 30.0));
    const double beta = db_to_linear(rng.uniform(-5.0, 8.0));
    const InterferenceProfile p = random_profile(32, rng.uniform(0.0, 60.0), rng);
    const double x = mmse_fixed_point_uniform(alpha, q, p, 1.0).value();
    // Skip the measure-zero boundary where rounding decides.
    if (std::abs(x - beta) < 1e-9 * beta) continue;
    CHECK(proposition1_check(beta, alpha, q, 1.0, p) == (x >= beta));
    positives += x >= beta;
  }
  CHECK(positives > 100);
  CHECK(positives < 900);
}

TEST_CASE("property: reduction chain selective -> flat -> awgn") {
  RngStream rng(10);
  const std::vector<double> amp = {0.3, 1.7, 0.9, 1.1};
  const ChannelSet flat = flat_channels(40, amp);
  const InterferenceProfile p = random_profile(40, 4.0, rng);
  const auto mf = mf_asymptotic_selective(flat, 20.0, p, 1.0);
  double others = 0.0;
  for (double a : amp) others += a * a;
  for (std::size_t u = 0; u < amp.size(); ++u) {
    const double g = amp[u] * amp[u];
    const double flat_form = 20.0 * g / ((others - g) * 20.0 / 40.0 + p.mean + 1.0);
    CHECK(mf[u] == doctest::Approx(flat_form).epsilon(1e-10));
  }
  const ChannelSet unit = flat_channels(40, std::vector<double>(4, 1.0));
  const auto awgn = mf_asymptotic_selective(unit, 20.0, p, 1.0);
  for (double v : awgn) CHECK(v == doctest::Approx(20.0 / (3.0 / 40.0 * 20.0 + p.mean + 1.0)).epsilon(1e-10));
}
