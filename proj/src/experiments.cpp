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

#include "refarm/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "refarm/cdma_rx.hpp"
#include "refarm/channel.hpp"
#include "refarm/errors.hpp"
#include "refarm/rng.hpp"

namespace refarm {
namespace {

// Stream tags. OFDMA draws and CDMA trials are keyed by index only, so every
// grid point sees the same random draws (common random numbers).
constexpr std::uint64_t kOfdmaDraw = 1;
constexpr std::uint64_t kCdmaTrial = 2;
constexpr std::uint64_t kTraceDraw = 3;
constexpr std::uint64_t kValidation = 4;

Eigen::MatrixXd draw_ofdma_gains(const SystemConfig& cfg, RngStream& rng) {
  SystemConfig only_ofdma = cfg;
  only_ofdma.U = 0;
  return gen_channel_set(only_ofdma, cfg.cdma_channel, cfg.ofdma_channel, rng).ofdma_gains();
}

struct Moments {
  double sum = 0.0, sum_sq = 0.0;
  std::size_t n = 0;
  void add(double x) {
    sum += x;
    sum_sq += x * x;
    ++n;
  }
  double mean() const { return n ? sum / static_cast<double>(n) : 0.0; }
  double stddev() const {
    if (n < 2) return 0.0;
    const double m = mean();
    return std::sqrt(std::max(0.0, (sum_sq - static_cast<double>(n) * m * m) / static_cast<double>(n - 1)));
  }
};

SystemConfig regime_config(const SweepSpec& spec, LoadRegime regime) {
  SystemConfig cfg = spec.fixed;
  cfg.set_alpha(regime == LoadRegime::kLight ? spec.light_alpha : spec.heavy_alpha);
  return cfg;
}

}  // namespace

std::string_view to_string(SweepParameter p) { return p == SweepParameter::kAlpha ? "alpha" : "receive_snr_db"; }

SweepParameter parse_sweep_parameter(std::string_view s) {
  if (s == "alpha") return SweepParameter::kAlpha;
  if (s == "receive_snr_db") return SweepParameter::kReceiveSnrDb;
  throw InvalidParameter("unknown swept parameter '" + std::string(s) + "'");
}

std::string_view to_string(LoadRegime r) { return r == LoadRegime::kLight ? "light" : "heavy"; }

void SweepSpec::validate() const {
  fixed.validate();
  if (grid.empty()) throw InvalidParameter("invariant violated: sweep grid nonempty");
  if (!std::is_sorted(grid.begin(), grid.end())) throw InvalidParameter("invariant violated: sweep grid sorted");
  if (trials < 1) throw InvalidParameter("invariant violated: trials >= 1");
  if (ofdma_draws < 1) throw InvalidParameter("invariant violated: ofdma_draws >= 1");
  if (swept_parameter == SweepParameter::kAlpha)
    for (double a : grid)
      if (!(a > 0.0) || std::llround(a * static_cast<double>(fixed.N)) < 1)
        throw InvalidParameter("invariant violated: every swept load gives at least one CDMA user");
}

AllocationProblem make_allocation_problem(const SystemConfig& cfg, const Eigen::MatrixXd& ofdma_gains,
                                          Receiver receiver) {
  const MarginResult m = interference_margin(cfg.alpha(), cfg.q, cfg.sigma2, cfg.beta_star, receiver);
  AllocationProblem p;
  p.gains = ofdma_gains;
  p.noise_floor = cfg.noise_floor_ofdma();
  p.margin = m.margin;
  p.power_caps = cfg.power_caps;
  return p;
}

SweepRecord evaluate_point(const SweepSpec& spec, const SystemConfig& cfg, double grid_value) {
  SweepRecord rec;
  rec.value = grid_value;
  rec.alpha = cfg.alpha();
  rec.receive_snr_db = linear_to_db(cfg.q / cfg.sigma2);
  const MarginResult margin = interference_margin(cfg.alpha(), cfg.q, cfg.sigma2, cfg.beta_star, spec.receiver);
  rec.feasible = margin.feasible;
  rec.margin = margin.margin;

  std::vector<InterferenceProfile> profiles;
  Moments throughput, theory, interference, iterations;
  for (std::size_t d = 0; d < spec.ofdma_draws; ++d) {
    RngStream rng = RngStream::derive(spec.seed, {kOfdmaDraw, d});
    const Eigen::MatrixXd gains = draw_ofdma_gains(cfg, rng);
    InterferenceProfile profile = InterferenceProfile::zero(cfg.N);
    if (margin.feasible) {
      const AllocationProblem problem = make_allocation_problem(cfg, gains, spec.receiver);
      const P1Result sol = solve_p1(problem, spec.solver);
      throughput.add(sol.throughput);
      iterations.add(static_cast<double>(sol.state.iteration));
      profile = InterferenceProfile::from_allocation(sol.allocation, gains);
    } else {
      throughput.add(0.0);
      iterations.add(0.0);
    }
    interference.add(profile.mean);
    theory.add(spec.receiver == Receiver::kMf
                   ? mf_asymptotic_uniform(cfg.alpha(), cfg.q, profile.mean, cfg.sigma2)
                   : mmse_fixed_point_uniform(cfg.alpha(), cfg.q, profile, cfg.sigma2).value());
    profiles.push_back(std::move(profile));
  }
  rec.ofdma_throughput = throughput.mean();
  rec.cdma_sinr_theory = theory.mean();
  rec.mean_interference = interference.mean();
  rec.solver_iterations = iterations.mean();

  Moments empirical;
  for (std::size_t t = 0; t < spec.trials; ++t) {
    RngStream rng = RngStream::derive(spec.seed, {kCdmaTrial, t});
    SystemConfig cdma_only = cfg;
    cdma_only.K = 0;
    const ChannelSet channels = gen_channel_set(cdma_only, cfg.cdma_channel, cfg.ofdma_channel, rng);
    const SpreadingCodeSet codes = gen_spreading_codes(cfg.U, cfg.N, rng);
    const EffectiveSignatures sigs = effective_signatures(codes, channels);
    const SinrReport rep = sinr_exact(spec.receiver, sigs, cfg.q, profiles[t % profiles.size()], cfg.sigma2);
    empirical.add(rep.mean);
  }
  rec.cdma_sinr_empirical_mean = empirical.mean();
  rec.cdma_sinr_empirical_std = empirical.stddev();
  return rec;
}

SweepResult run_load_sweep(const SweepSpec& spec) {
  spec.validate();
  SweepResult res;
  res.spec = spec;
  for (double alpha : spec.grid) {
    SystemConfig cfg = spec.fixed;
    cfg.set_alpha(alpha);
    res.records.push_back(evaluate_point(spec, cfg, alpha));
  }
  return res;
}

SweepResult run_snr_sweep(const SweepSpec& spec) {
  SweepSpec checked = spec;
  checked.validate();
  if (spec.fixed.U < 1) throw InvalidParameter("invariant violated: SNR sweep needs at least one CDMA user");
  SweepResult res;
  res.spec = spec;
  for (double snr_db : spec.grid) {
    SystemConfig cfg = spec.fixed;
    cfg.q = cfg.sigma2 * db_to_linear(snr_db);
    res.records.push_back(evaluate_point(spec, cfg, snr_db));
  }
  return res;
}

namespace {

ConvergenceTrace trace_at(const SweepSpec& spec, const SystemConfig& cfg) {
  cfg.validate();
  RngStream rng = RngStream::derive(spec.seed, {kTraceDraw});
  ConvergenceTrace out;
  out.problem = make_allocation_problem(cfg, draw_ofdma_gains(cfg, rng), spec.receiver);
  SolverOptions opts = spec.solver;
  opts.record_trace = true;
  out.result = solve_p1(out.problem, opts);
  return out;
}

}  // namespace

ConvergenceTrace run_convergence_trace(const SweepSpec& spec, LoadRegime regime) {
  ConvergenceTrace out = trace_at(spec, regime_config(spec, regime));
  out.regime = regime;
  return out;
}

ConvergenceTrace run_allocation(const SweepSpec& spec) { return trace_at(spec, spec.fixed); }

AllocationSnapshot snapshot_of(const ConvergenceTrace& trace) {
  AllocationSnapshot snap;
  snap.regime = trace.regime;
  snap.problem = trace.problem;
  snap.result = trace.result;
  const auto& alloc = snap.result.allocation;
  for (std::size_t n = 0; n < snap.problem.num_subcarriers(); ++n) {
    const auto in = static_cast<Eigen::Index>(n);
    SnapshotRow row;
    row.subcarrier = n;
    for (std::size_t k = 0; k < snap.problem.num_users(); ++k)
      row.gains.push_back(snap.problem.gains(static_cast<Eigen::Index>(k), in));
    if (const auto k = alloc.owner[n]) {
      row.owner = static_cast<int>(*k);
      row.power = alloc.powers(static_cast<Eigen::Index>(*k), in);
      row.owner_gain = row.gains[*k];
    }
    snap.rows.push_back(std::move(row));
  }
  return snap;
}

AllocationSnapshot run_allocation_snapshot(const SweepSpec& spec, LoadRegime regime) {
  return snapshot_of(run_convergence_trace(spec, regime));
}

std::vector<ValidationRow> run_sinr_validation(const SweepSpec& spec, std::size_t trials) {
  if (trials < 100) throw InvalidParameter("invariant violated: validation trials >= 100");
  const SystemConfig& base = spec.fixed;
  base.validate();
  if (base.U < 1) throw InvalidParameter("invariant violated: validation needs at least one CDMA user");
  const InterferenceProfile none = InterferenceProfile::zero(base.N);
  std::vector<ValidationRow> rows;
  for (Receiver rx : {Receiver::kMf, Receiver::kMmse}) {
    for (ChannelModel model : {ChannelModel::kAwgn, ChannelModel::kFlat, ChannelModel::kSelective}) {
      SystemConfig cfg = base;
      cfg.K = 0;
      cfg.power_caps.clear();
      ValidationRow row;
      row.receiver = rx;
      row.model = model;
      row.N = cfg.N;
      row.U = cfg.U;
      row.trials = trials;
      row.theory_uniform = rx == Receiver::kMf ? mf_asymptotic_uniform(cfg.alpha(), cfg.q, 0.0, cfg.sigma2)
                                               : mmse_fixed_point_uniform(cfg.alpha(), cfg.q, none, cfg.sigma2).value();
      Moments empirical, channel_theory, cv;
      for (std::size_t t = 0; t < trials; ++t) {
        RngStream rng = RngStream::derive(spec.seed, {kValidation, t});
        const ChannelSet channels = gen_channel_set(cfg, model, rng);
        const SpreadingCodeSet codes = gen_spreading_codes(cfg.U, cfg.N, rng);
        const SinrReport rep = sinr_exact(rx, effective_signatures(codes, channels), cfg.q, none, cfg.sigma2);
        empirical.add(rep.mean);
        cv.add(std::sqrt(rep.variance) / rep.mean);
        std::vector<double> limit =
            rx == Receiver::kMf ? mf_asymptotic_selective(channels, cfg.q, none, cfg.sigma2)
                                : mmse_fixed_point_selective(channels, cfg.q, none, cfg.sigma2).values;
        double s = 0.0;
        for (double v : limit) s += v;
        channel_theory.add(s / static_cast<double>(limit.size()));
      }
      row.empirical_mean = empirical.mean();
      row.empirical_std = empirical.stddev();
      row.per_user_cv = cv.mean();
      row.theory_channel = channel_theory.mean();
      row.rel_error_channel = std::abs(row.empirical_mean - row.theory_channel) / row.theory_channel;
      row.rel_error_uniform = std::abs(row.empirical_mean - row.theory_uniform) / row.theory_uniform;
      row.std_over_mean = row.empirical_std / row.empirical_mean;
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace refarm
