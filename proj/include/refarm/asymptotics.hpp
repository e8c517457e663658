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
#include <vector>

#include "refarm/cdma_rx.hpp"
#include "refarm/channel.hpp"
#include "refarm/config.hpp"

namespace refarm {

// Large-system CDMA predictions: deterministic SINR limits for the MF and
// MMSE receivers under colored OFDMA interference, the supportable load and
// the interference margin that the OFDMA side may spend.

struct MarginResult {
  double alpha_star = 0.0;  // supportable load
  double margin = 0.0;      // tolerable mean interference T (0 when infeasible)
  Receiver receiver = Receiver::kMf;
  bool feasible = false;
};

struct FixedPointOptions {
  double tolerance = 1e-10;       // relative change between sweeps
  std::size_t max_iterations = 10000;
  std::optional<double> start;    // defaults to q / sigma2
  bool record_history = false;
};

struct FixedPointSolution {
  std::vector<double> values;   // per user, or a single entry for the uniform map
  std::size_t iterations = 0;
  double residual = 0.0;
  std::vector<std::vector<double>> history;  // iterates, when requested

  double value() const { return values.front(); }
};

// Per-user MF limit from channel moments (no codes involved):
//   q P_u^2 / ( N^-2 sum_n |l_un|^2 sum_{i!=u} q |l_in|^2 + N^-1 sum_n |l_un|^2 s_n^2 + P_u sigma2 )
// with P_u = N^-1 sum_n |l_un|^2.
std::vector<double> mf_asymptotic_selective(const ChannelSet& channels, double q,
                                            const InterferenceProfile& profile, double sigma2);

// q / (alpha q + mean_interference + sigma2)
double mf_asymptotic_uniform(double alpha, double q, double mean_interference, double sigma2);

// Coupled fixed point over all CDMA users,
//   x_u = N^-1 sum_n q|l_un|^2 / ( N^-1 sum_i q|l_in|^2 / (1 + x_i) + s_n^2 + sigma2 ),
// solved by simultaneous (Jacobi) substitution.
FixedPointSolution mmse_fixed_point_selective(const ChannelSet& channels, double q,
                                              const InterferenceProfile& profile, double sigma2,
                                              const FixedPointOptions& options = {});

// Scalar fixed point x = mean_n[ q / (alpha q / (1 + x) + s_n^2 + sigma2) ].
FixedPointSolution mmse_fixed_point_uniform(double alpha, double q, const InterferenceProfile& profile,
                                            double sigma2, const FixedPointOptions& options = {});

// MF: 1/beta - sigma2/q.  MMSE: the MF value times (1 + beta).
double supportable_load(double q, double sigma2, double beta_star, Receiver receiver);

// MF: T = (alpha* - alpha) q.  MMSE: T = (alpha* - alpha) q / (1 + beta).
// alpha >= alpha* yields feasible = false and margin = 0.
MarginResult interference_margin(double alpha, double q, double sigma2, double beta_star, Receiver receiver);

// mean_n[ q / (alpha q / (1 + beta) + s_n^2 + sigma2) ] >= beta, which holds
// exactly when the scalar MMSE fixed point reaches beta.
bool proposition1_check(double beta_star, double alpha, double q, double sigma2,
                        const InterferenceProfile& profile);

struct JensenGap {
  double lhs = 0.0;  // mean over subcarriers of the concave term
  double rhs = 0.0;  // the term at the mean interference
};
JensenGap jensen_reinforcement_gap(double beta, double alpha, double q, double sigma2,
                                   const InterferenceProfile& profile);

// p g / (alpha q + sigma2)
double ofdma_asymptotic_sinr(double p, double g, double alpha, double q, double sigma2);

}  // namespace refarm
