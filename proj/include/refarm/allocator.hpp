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

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "refarm/power_allocation.hpp"

namespace refarm {

// OFDMA uplink resource allocation under the CDMA interference margin:
//
//   max  sum_{k,n} log2(1 + p_{k,n} g_{k,n} / F)
//   s.t. (1/N) sum_{k,n} p_{k,n} g_{k,n} <= T,   sum_n p_{k,n} <= Pbar_k,
//        at most one k with p_{k,n} > 0 per subcarrier,
//
// with F = alpha q + sigma2 the CDMA-plus-noise floor. The interference
// constraint is priced per subcarrier by delta (price on p g), the power caps
// by lambda_k, and the dual is minimized by projected subgradient steps.
struct AllocationProblem {
  Eigen::MatrixXd gains;           // K x N
  double noise_floor = 1.0;        // alpha q + sigma2
  double margin = 0.0;             // T
  std::vector<double> power_caps;  // Pbar_k

  std::size_t num_users() const { return static_cast<std::size_t>(gains.rows()); }
  std::size_t num_subcarriers() const { return static_cast<std::size_t>(gains.cols()); }
  void validate() const;
};

struct SolverOptions {
  std::size_t max_iterations = 5000;
  double gap_tolerance = 1e-4;     // relative duality gap for early exit
  double step_scale = 0.1;         // c in c / sqrt(t)
  double initial_lambda = 0.1;
  double initial_delta = 0.01;
  std::size_t check_every = 100;   // primal recovery cadence
  bool record_trace = false;

  bool operator==(const SolverOptions&) const = default;
};

struct DualState {
  double delta = 0.0;
  std::vector<double> lambdas;
  std::size_t iteration = 0;
  std::vector<double> gap_trace;   // best-bound relative gap per iteration
  double step_scale = 0.1;
  // Natural magnitudes used to normalize the subgradient steps.
  double delta_scale = 1.0;
  std::vector<double> lambda_scales;

  static DualState initial(const AllocationProblem& problem, const SolverOptions& options);
};

// p = [1 / ((lambda + delta g) ln 2) - F / g]^+, and 0 when g = 0.
double power_candidate(double gain, double delta, double lambda, double noise_floor);

// Per-subcarrier score r - lambda_k p - delta p g.
double subcarrier_score(double power, double gain, double delta, double lambda, double noise_floor);

// User with the highest score on one subcarrier; ties go to the lowest index,
// and no user when every candidate is zero.
std::optional<std::size_t> assign_subcarrier(std::span<const double> candidates, std::span<const double> gains,
                                             double delta, std::span<const double> lambdas, double noise_floor);

// Maximizer of the Lagrangian at the given duals and the dual function value
// sum_n f_n + sum_k lambda_k Pbar_k + delta N T.
struct LagrangianMaximizer {
  PowerAllocation allocation;
  double dual_value = 0.0;
};
LagrangianMaximizer maximize_lagrangian(const AllocationProblem& problem, double delta,
                                        std::span<const double> lambdas);

// One projected subgradient step with d = [T - sigma_bar; Pbar_k - sum_n p_k].
DualState subgradient_step(const DualState& state, const PowerAllocation& alloc, const AllocationProblem& problem);

// Optimal powers for a fixed subcarrier assignment, with the KKT multipliers.
struct AssignmentSolution {
  PowerAllocation allocation;
  double delta = 0.0;
  std::vector<double> lambdas;
  double throughput = 0.0;
};
AssignmentSolution optimize_assignment(const AllocationProblem& problem,
                                       const std::vector<std::optional<std::size_t>>& owner);

// Scales each user to its cap, then everyone to the margin.
void project_feasible(PowerAllocation& alloc, const AllocationProblem& problem);

struct TraceRow {
  std::size_t iteration = 0;
  double gap = 0.0;
  double delta = 0.0;
  std::vector<double> lambdas;
  double throughput = 0.0;     // best feasible allocation so far
  double mean_interference = 0.0;
  std::vector<double> user_powers;
};

struct P1Result {
  PowerAllocation allocation;
  DualState state;
  double throughput = 0.0;
  double dual_bound = 0.0;
  double relative_gap = 0.0;
  bool converged = false;
  bool trivial = false;        // zero margin and caps: nothing to allocate
  std::vector<TraceRow> trace;
};

P1Result solve_p1(const AllocationProblem& problem, const SolverOptions& options = {});

struct WaterfillResult {
  Eigen::VectorXd powers;
  double water_level = 0.0;
  bool infeasible_spend = false;  // cap > 0 but no usable subcarrier
};

// Single-user water-filling, p_n = [w - F/g_n]^+ with sum p = cap.
WaterfillResult solve_p2_waterfill(const Eigen::VectorXd& gains, double cap, double noise_floor);

struct ChannelInverseResult {
  PowerAllocation allocation;
  double throughput = 0.0;
  std::size_t active_subcarriers = 0;
  bool reduced = false;  // some subcarrier had no usable gain
};

// Interference-limited special case: each subcarrier goes to its strongest
// user and p g = N T / N_active everywhere, so the throughput depends only on
// (N_active, T, F).
ChannelInverseResult solve_p3_channel_inverse(const AllocationProblem& problem);

struct OracleResult {
  PowerAllocation allocation;
  double throughput = 0.0;
  std::size_t assignments = 0;
};

// Exhaustive search over all K^N assignments for N <= 6, K <= 2, with the
// powers of each assignment found by an interior-point method.
OracleResult brute_force_oracle(const AllocationProblem& problem);

}  // namespace refarm
