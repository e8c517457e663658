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
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "refarm/allocator.hpp"
#include "refarm/asymptotics.hpp"
#include "refarm/config.hpp"

namespace refarm {

enum class SweepParameter { kAlpha, kReceiveSnrDb };
enum class LoadRegime { kLight, kHeavy };

std::string_view to_string(SweepParameter p);
SweepParameter parse_sweep_parameter(std::string_view s);
std::string_view to_string(LoadRegime r);

inline constexpr std::uint64_t kDefaultSeed = 20141208;

struct SweepSpec {
  SweepParameter swept_parameter = SweepParameter::kAlpha;
  std::vector<double> grid;
  Receiver receiver = Receiver::kMf;
  SystemConfig fixed = SystemConfig::defaults();
  std::size_t trials = 200;        // CDMA code/channel draws per point
  std::size_t ofdma_draws = 20;    // OFDMA channel draws (P.1 solves) per point
  std::uint64_t seed = kDefaultSeed;
  SolverOptions solver;
  double light_alpha = 0.05;
  double heavy_alpha = 0.6;

  void validate() const;

  bool operator==(const SweepSpec&) const = default;
};

// The OFDMA side only learns (alpha, q/sigma2, beta*) from the CDMA side and
// turns them into a margin.
AllocationProblem make_allocation_problem(const SystemConfig& cfg, const Eigen::MatrixXd& ofdma_gains,
                                          Receiver receiver);

struct SweepRecord {
  double value = 0.0;              // grid value (alpha or q/sigma2 in dB)
  double alpha = 0.0;
  double receive_snr_db = 0.0;
  double ofdma_throughput = 0.0;   // bits per OFDMA symbol, mean over draws
  double cdma_sinr_theory = 0.0;
  double cdma_sinr_empirical_mean = 0.0;
  double cdma_sinr_empirical_std = 0.0;  // across trials of the per-trial user mean
  double margin = 0.0;
  double mean_interference = 0.0;
  bool feasible = false;
  double solver_iterations = 0.0;
};

struct SweepResult {
  SweepSpec spec;
  std::vector<SweepRecord> records;
};

// Per grid point: margin, P.1 on independent OFDMA draws, the resulting
// interference profiles injected into exact CDMA SINR evaluation over random
// codes and channels, and the large-system prediction for comparison.
SweepResult run_load_sweep(const SweepSpec& spec);
SweepResult run_snr_sweep(const SweepSpec& spec);
SweepRecord evaluate_point(const SweepSpec& spec, const SystemConfig& cfg, double grid_value);

struct ConvergenceTrace {
  std::optional<LoadRegime> regime;  // empty: the configured load
  AllocationProblem problem;
  P1Result result;
};
ConvergenceTrace run_convergence_trace(const SweepSpec& spec, LoadRegime regime);

struct SnapshotRow {
  std::size_t subcarrier = 0;
  int owner = -1;
  double power = 0.0;
  double owner_gain = 0.0;
  std::vector<double> gains;
};
struct AllocationSnapshot {
  std::optional<LoadRegime> regime;
  AllocationProblem problem;
  P1Result result;
  std::vector<SnapshotRow> rows;
};
AllocationSnapshot run_allocation_snapshot(const SweepSpec& spec, LoadRegime regime);
// Same at the load of spec.fixed.
ConvergenceTrace run_allocation(const SweepSpec& spec);
AllocationSnapshot snapshot_of(const ConvergenceTrace& trace);

struct ValidationRow {
  Receiver receiver = Receiver::kMf;
  ChannelModel model = ChannelModel::kAwgn;
  std::size_t N = 0;
  std::size_t U = 0;
  std::size_t trials = 0;
  double empirical_mean = 0.0;
  double empirical_std = 0.0;      // across trials of the per-trial user mean
  double per_user_cv = 0.0;        // mean over trials of user std / user mean
  double theory_channel = 0.0;     // channel-aware limit, mean over trials
  double theory_uniform = 0.0;     // channel-independent limit
  double rel_error_channel = 0.0;
  double rel_error_uniform = 0.0;
  double std_over_mean = 0.0;
};

// Exact finite-N SINR over random codes and channels against the large-system
// predictions, for both receivers and all three channel models, with no
// OFDMA interference.
std::vector<ValidationRow> run_sinr_validation(const SweepSpec& spec, std::size_t trials);

}  // namespace refarm
