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

#include "refarm/allocator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <set>
#include <string>

#include "refarm/errors.hpp"

namespace refarm {
namespace {

constexpr double kLn2 = std::numbers::ln2;
constexpr double kInf = std::numeric_limits<double>::infinity();

using Owner = std::vector<std::optional<std::size_t>>;

// Bisects a nonincreasing f on [lo, hi] for f(x) = target and returns the
// upper end, where f <= target.
template <typename F>
double bisect_upper(F&& f, double lo, double hi, double target) {
  for (int i = 0; i < 400 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) > target)
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

bool is_trivial(const AllocationProblem& problem) {
  if (!(problem.margin > 0.0)) return true;
  return std::all_of(problem.power_caps.begin(), problem.power_caps.end(), [](double c) { return !(c > 0.0); });
}

// Powers of one user's subcarriers at fixed (delta, lambda).
double user_powers(const AllocationProblem& problem, std::size_t k, const std::vector<Eigen::Index>& carriers,
                   double delta, double lambda, Eigen::MatrixXd* out) {
  double total = 0.0;
  for (Eigen::Index n : carriers) {
    const double p = power_candidate(problem.gains(static_cast<Eigen::Index>(k), n), delta, lambda, problem.noise_floor);
    if (out) (*out)(static_cast<Eigen::Index>(k), n) = p;
    total += p;
  }
  return total;
}

}  // namespace

void AllocationProblem::validate() const {
  if (gains.rows() < 1 || gains.cols() < 1) throw InvalidParameter("allocation problem needs K >= 1 and N >= 1");
  if (power_caps.size() != num_users()) throw InvalidParameter("one power cap per OFDMA user required");
  if ((gains.array() < 0.0).any() || !gains.allFinite()) throw InvalidParameter("gains must be finite and >= 0");
  if (!(noise_floor > 0.0)) throw InvalidParameter("noise floor must be > 0");
  if (!(margin >= 0.0)) throw InvalidParameter("interference margin must be >= 0");
  for (double c : power_caps)
    if (!(c >= 0.0)) throw InvalidParameter("power caps must be >= 0");
}

DualState DualState::initial(const AllocationProblem& problem, const SolverOptions& options) {
  const std::size_t K = problem.num_users();
  const auto N = static_cast<double>(problem.num_subcarriers());
  DualState s;
  s.delta = options.initial_delta;
  s.lambdas.assign(K, options.initial_lambda);
  s.step_scale = options.step_scale;
  const double F = problem.noise_floor;
  s.delta_scale = 1.0 / (kLn2 * (F + problem.margin));
  s.lambda_scales.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    const double mean_gain = problem.gains.row(static_cast<Eigen::Index>(k)).mean();
    const double share = problem.power_caps[k] * static_cast<double>(K) / N;
    s.lambda_scales[k] = mean_gain > 0.0 ? 1.0 / (kLn2 * (share + F / mean_gain)) : 1.0;
  }
  return s;
}

double power_candidate(double gain, double delta, double lambda, double noise_floor) {
  if (!(gain > 0.0)) return 0.0;
  const double price = lambda + delta * gain;
  if (!(price > 0.0)) throw InvalidParameter("unbounded power candidate: lambda and delta are both zero");
  return std::max(0.0, 1.0 / (price * kLn2) - noise_floor / gain);
}

double subcarrier_score(double power, double gain, double delta, double lambda, double noise_floor) {
  if (!(power > 0.0)) return 0.0;
  return std::log2(1.0 + power * gain / noise_floor) - (lambda + delta * gain) * power;
}

std::optional<std::size_t> assign_subcarrier(std::span<const double> candidates, std::span<const double> gains,
                                             double delta, std::span<const double> lambdas, double noise_floor) {
  std::optional<std::size_t> best;
  double best_score = 0.0;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    if (!(candidates[k] > 0.0)) continue;
    const double s = subcarrier_score(candidates[k], gains[k], delta, lambdas[k], noise_floor);
    if (!best || s > best_score) {
      best = k;
      best_score = s;
    }
  }
  return best;
}

LagrangianMaximizer maximize_lagrangian(const AllocationProblem& problem, double delta,
                                        std::span<const double> lambdas) {
  const std::size_t K = problem.num_users();
  const std::size_t N = problem.num_subcarriers();
  LagrangianMaximizer out;
  out.allocation = PowerAllocation::zeros(K, N);
  std::vector<double> cand(K), g(K);
  double value = 0.0;
  for (std::size_t n = 0; n < N; ++n) {
    const auto in = static_cast<Eigen::Index>(n);
    for (std::size_t k = 0; k < K; ++k) {
      g[k] = problem.gains(static_cast<Eigen::Index>(k), in);
      // A user with zero cap can never transmit.
      if (!(problem.power_caps[k] > 0.0)) {
        cand[k] = 0.0;
        continue;
      }
      if (g[k] > 0.0 && !(lambdas[k] + delta * g[k] > 0.0)) {
        cand[k] = 0.0;
        value = kInf;
        continue;
      }
      cand[k] = power_candidate(g[k], delta, lambdas[k], problem.noise_floor);
    }
    const auto owner = assign_subcarrier(cand, g, delta, lambdas, problem.noise_floor);
    if (owner) {
      out.allocation.powers(static_cast<Eigen::Index>(*owner), in) = cand[*owner];
      out.allocation.owner[n] = owner;
      value += subcarrier_score(cand[*owner], g[*owner], delta, lambdas[*owner], problem.noise_floor);
    }
  }
  for (std::size_t k = 0; k < K; ++k) value += lambdas[k] * problem.power_caps[k];
  value += delta * static_cast<double>(N) * problem.margin;
  out.dual_value = value;
  return out;
}

DualState subgradient_step(const DualState& state, const PowerAllocation& alloc, const AllocationProblem& problem) {
  DualState next = state;
  next.iteration = state.iteration + 1;
  const double step = state.step_scale / std::sqrt(static_cast<double>(next.iteration));
  const double slack_t = problem.margin - alloc.mean_interference(problem.gains);
  const double t_norm = std::max(problem.margin, 1e-12);
  next.delta = std::max(0.0, state.delta - step * state.delta_scale * slack_t / t_norm);
  for (std::size_t k = 0; k < next.lambdas.size(); ++k) {
    const double cap = problem.power_caps[k];
    const double slack = cap - alloc.user_power(k);
    next.lambdas[k] = std::max(0.0, state.lambdas[k] - step * state.lambda_scales[k] * slack / std::max(cap, 1e-12));
  }
  return next;
}

AssignmentSolution optimize_assignment(const AllocationProblem& problem, const Owner& owner) {
  const std::size_t K = problem.num_users();
  const std::size_t N = problem.num_subcarriers();
  const double F = problem.noise_floor;
  std::vector<std::vector<Eigen::Index>> carriers(K);
  for (std::size_t n = 0; n < N; ++n)
    if (owner[n] && problem.gains(static_cast<Eigen::Index>(*owner[n]), static_cast<Eigen::Index>(n)) > 0.0 &&
        problem.power_caps[*owner[n]] > 0.0)
      carriers[*owner[n]].push_back(static_cast<Eigen::Index>(n));

  AssignmentSolution sol;
  sol.allocation = PowerAllocation::zeros(K, N);
  sol.lambdas.assign(K, 0.0);
  if (!(problem.margin > 0.0)) return sol;

  // lambda_k(delta): zero if the cap is slack at lambda = 0, else the price
  // that spends exactly the cap.
  auto lambda_for = [&](std::size_t k, double delta) {
    if (carriers[k].empty()) return 0.0;
    double gmax = 0.0;
    for (Eigen::Index n : carriers[k]) gmax = std::max(gmax, problem.gains(static_cast<Eigen::Index>(k), n));
    const double hi = gmax / (F * kLn2);
    if (delta > 0.0 && user_powers(problem, k, carriers[k], delta, 0.0, nullptr) <= problem.power_caps[k]) return 0.0;
    return bisect_upper([&](double lam) { return user_powers(problem, k, carriers[k], delta, lam, nullptr); }, 0.0,
                        hi, problem.power_caps[k]);
  };
  auto fill = [&](double delta, Eigen::MatrixXd* out) {
    double interference = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      const double lam = lambda_for(k, delta);
      sol.lambdas[k] = lam;
      for (Eigen::Index n : carriers[k]) {
        const double g = problem.gains(static_cast<Eigen::Index>(k), n);
        const double p = power_candidate(g, delta, lam, F);
        if (out) (*out)(static_cast<Eigen::Index>(k), n) = p;
        interference += p * g;
      }
    }
    return interference / static_cast<double>(N);
  };

  double delta = 0.0;
  if (fill(0.0, nullptr) > problem.margin)
    delta = bisect_upper([&](double d) { return fill(d, nullptr); }, 0.0, 1.0 / (F * kLn2), problem.margin);
  sol.delta = delta;
  fill(delta, &sol.allocation.powers);
  sol.allocation.refresh_owner();
  sol.throughput = sol.allocation.throughput(problem.gains, F);
  return sol;
}

void project_feasible(PowerAllocation& alloc, const AllocationProblem& problem) {
  for (std::size_t k = 0; k < alloc.num_users(); ++k) {
    const double total = alloc.user_power(k);
    if (total > problem.power_caps[k] && total > 0.0)
      alloc.powers.row(static_cast<Eigen::Index>(k)) *= problem.power_caps[k] / total;
  }
  const double s = alloc.mean_interference(problem.gains);
  if (s > problem.margin && s > 0.0) alloc.powers *= problem.margin / s;
  alloc.refresh_owner();
}

namespace {

// Greedy single-subcarrier reassignment starting from a polished solution.
AssignmentSolution local_search(const AllocationProblem& problem, AssignmentSolution current) {
  const std::size_t K = problem.num_users();
  const std::size_t N = problem.num_subcarriers();
  constexpr int kMaxPasses = 8;
  for (int pass = 0; pass < kMaxPasses; ++pass) {
    bool improved = false;
    for (std::size_t n = 0; n < N; ++n) {
      for (std::size_t k = 0; k < K; ++k) {
        Owner trial = current.allocation.owner;
        if (trial[n] == k) continue;
        trial[n] = k;
        AssignmentSolution s = optimize_assignment(problem, trial);
        if (s.throughput > current.throughput * (1.0 + 1e-12)) {
          current = std::move(s);
          improved = true;
        }
      }
    }
    if (!improved) break;
  }
  return current;
}

}  // namespace

P1Result solve_p1(const AllocationProblem& problem, const SolverOptions& options) {
  problem.validate();
  const std::size_t K = problem.num_users();
  const std::size_t N = problem.num_subcarriers();
  P1Result res;
  res.state = DualState::initial(problem, options);
  if (is_trivial(problem)) {
    res.allocation = PowerAllocation::zeros(K, N);
    res.trivial = true;
    res.converged = true;
    return res;
  }

  double best_dual = kInf;
  double best_primal = -kInf;
  PowerAllocation best_alloc = PowerAllocation::zeros(K, N);
  std::vector<std::vector<double>> dual_history;  // (delta, lambdas...) per iteration
  std::set<Owner> polished;
  // KKT multipliers of the best polished solution not yet adopted.
  std::optional<std::pair<double, std::vector<double>>> adopt;

  auto consider = [&](const AssignmentSolution& s) {
    if (s.throughput > best_primal) {
      best_primal = s.throughput;
      best_alloc = s.allocation;
      adopt.emplace(s.delta, s.lambdas);
    }
  };
  auto relative_gap = [&] { return best_primal > 0.0 ? (best_dual - best_primal) / best_primal : kInf; };

  // Polishes the assignment induced by the given duals, then follows the
  // multipliers of each polished solution until the assignment repeats.
  auto recover = [&](double delta, std::vector<double> lambdas) {
    for (int round = 0; round < 4; ++round) {
      const auto lag = maximize_lagrangian(problem, delta, lambdas);
      best_dual = std::min(best_dual, lag.dual_value);
      if (!polished.insert(lag.allocation.owner).second) return;
      const AssignmentSolution s = optimize_assignment(problem, lag.allocation.owner);
      consider(s);
      delta = s.delta;
      lambdas = s.lambdas;
    }
    best_dual = std::min(best_dual, maximize_lagrangian(problem, delta, lambdas).dual_value);
  };

  DualState& state = res.state;
  std::size_t last = 0;
  for (std::size_t t = 1; t <= options.max_iterations; ++t) {
    last = t;
    state.iteration = t - 1;
    const auto lag = maximize_lagrangian(problem, state.delta, state.lambdas);
    best_dual = std::min(best_dual, lag.dual_value);
    std::vector<double> duals{state.delta};
    duals.insert(duals.end(), state.lambdas.begin(), state.lambdas.end());
    dual_history.push_back(std::move(duals));

    PowerAllocation feasible = lag.allocation;
    project_feasible(feasible, problem);
    const double thr = feasible.throughput(problem.gains, problem.noise_floor);
    if (thr > best_primal) {
      best_primal = thr;
      best_alloc = feasible;
    }

    bool jumped = false;
    if (t % options.check_every == 0 || t == options.max_iterations) {
      // Average of the most recent 10% of dual iterates.
      const std::size_t window = std::max<std::size_t>(1, dual_history.size() / 10);
      std::vector<double> avg(K + 1, 0.0);
      for (std::size_t i = dual_history.size() - window; i < dual_history.size(); ++i)
        for (std::size_t j = 0; j <= K; ++j) avg[j] += dual_history[i][j] / static_cast<double>(window);
      recover(avg[0], std::vector<double>(avg.begin() + 1, avg.end()));
      recover(state.delta, state.lambdas);
      // Restart the dual iterate from the multipliers of an improved primal.
      if (adopt) {
        state.delta = adopt->first;
        state.lambdas = adopt->second;
        adopt.reset();
        jumped = true;
      }
    }

    state.gap_trace.push_back(relative_gap());
    if (options.record_trace) {
      TraceRow row;
      row.iteration = t;
      row.gap = state.gap_trace.back();
      row.delta = state.delta;
      row.lambdas = state.lambdas;
      row.throughput = best_primal;
      row.mean_interference = best_alloc.mean_interference(problem.gains);
      for (std::size_t k = 0; k < K; ++k) row.user_powers.push_back(best_alloc.user_power(k));
      res.trace.push_back(std::move(row));
    }
    if (state.gap_trace.back() <= options.gap_tolerance) {
      res.converged = true;
      break;
    }
    if (!jumped) state = subgradient_step(state, lag.allocation, problem);
  }

  state.iteration = last;
  // Exact powers and multipliers for the final assignment.
  AssignmentSolution final_polish = optimize_assignment(problem, best_alloc.owner);
  if (!res.converged) final_polish = local_search(problem, std::move(final_polish));
  if (final_polish.throughput >= best_primal) {
    best_primal = final_polish.throughput;
    best_alloc = final_polish.allocation;
    state.delta = final_polish.delta;
    state.lambdas = final_polish.lambdas;
    if (options.record_trace && !res.trace.empty()) {
      TraceRow& row = res.trace.back();
      row.delta = state.delta;
      row.lambdas = state.lambdas;
      row.throughput = best_primal;
      row.mean_interference = best_alloc.mean_interference(problem.gains);
      for (std::size_t k = 0; k < K; ++k) row.user_powers[k] = best_alloc.user_power(k);
      row.gap = relative_gap();
      state.gap_trace.back() = row.gap;
    }
  }
  project_feasible(best_alloc, problem);
  res.allocation = std::move(best_alloc);
  res.throughput = res.allocation.throughput(problem.gains, problem.noise_floor);
  res.dual_bound = best_dual;
  res.relative_gap = relative_gap();
  return res;
}

WaterfillResult solve_p2_waterfill(const Eigen::VectorXd& gains, double cap, double noise_floor) {
  if (!(cap >= 0.0)) throw InvalidParameter("power cap must be >= 0");
  if (!(noise_floor > 0.0)) throw InvalidParameter("noise floor must be > 0");
  WaterfillResult r;
  r.powers = Eigen::VectorXd::Zero(gains.size());
  if (cap == 0.0) return r;
  double max_inverse = 0.0;
  bool usable = false;
  for (double g : gains)
    if (g > 0.0) {
      usable = true;
      max_inverse = std::max(max_inverse, noise_floor / g);
    }
  if (!usable) {
    r.infeasible_spend = true;
    return r;
  }
  auto spend = [&](double w) {
    double s = 0.0;
    for (double g : gains)
      if (g > 0.0) s += std::max(0.0, w - noise_floor / g);
    return s;
  };
  // spend() is increasing; bisect on its negation.
  r.water_level = bisect_upper([&](double w) { return -spend(w); }, 0.0, cap + max_inverse, -cap);
  for (Eigen::Index n = 0; n < gains.size(); ++n)
    if (gains[n] > 0.0) r.powers[n] = std::max(0.0, r.water_level - noise_floor / gains[n]);
  return r;
}

ChannelInverseResult solve_p3_channel_inverse(const AllocationProblem& problem) {
  const std::size_t K = problem.num_users();
  const std::size_t N = problem.num_subcarriers();
  if (!(problem.margin >= 0.0)) throw InvalidParameter("interference margin must be >= 0");
  ChannelInverseResult r;
  r.allocation = PowerAllocation::zeros(K, N);
  for (std::size_t n = 0; n < N; ++n) {
    std::optional<std::size_t> best;
    for (std::size_t k = 0; k < K; ++k) {
      const double g = problem.gains(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(n));
      if (g > 0.0 && (!best || g > problem.gains(static_cast<Eigen::Index>(*best), static_cast<Eigen::Index>(n))))
        best = k;
    }
    r.allocation.owner[n] = best;
    if (best) ++r.active_subcarriers;
  }
  r.reduced = r.active_subcarriers < N;
  if (!(problem.margin > 0.0) || r.active_subcarriers == 0) {
    r.allocation.owner.assign(N, std::nullopt);
    return r;
  }
  const double level = problem.margin * static_cast<double>(N) / static_cast<double>(r.active_subcarriers);
  for (std::size_t n = 0; n < N; ++n)
    if (const auto k = r.allocation.owner[n]) {
      const auto ik = static_cast<Eigen::Index>(*k), in = static_cast<Eigen::Index>(n);
      r.allocation.powers(ik, in) = level / problem.gains(ik, in);
    }
  r.throughput = r.allocation.throughput(problem.gains, problem.noise_floor);
  return r;
}

}  // namespace refarm
