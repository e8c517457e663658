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

#include <Eigen/Dense>

namespace refarm {

// K x N OFDMA transmit powers with at most one active user per subcarrier.
struct PowerAllocation {
  Eigen::MatrixXd powers;                            // K x N, >= 0
  std::vector<std::optional<std::size_t>> owner;     // per subcarrier

  static PowerAllocation zeros(std::size_t K, std::size_t N);

  std::size_t num_users() const { return static_cast<std::size_t>(powers.rows()); }
  std::size_t num_subcarriers() const { return static_cast<std::size_t>(powers.cols()); }

  double user_power(std::size_t k) const { return powers.row(static_cast<Eigen::Index>(k)).sum(); }

  // sigma_n^2 = sum_k p_{k,n} g_{k,n}
  Eigen::VectorXd interference(const Eigen::MatrixXd& gains) const;
  // (1/N) sum_{k,n} p_{k,n} g_{k,n}
  double mean_interference(const Eigen::MatrixXd& gains) const;

  // sum_{k,n} log2(1 + p g / floor)
  double throughput(const Eigen::MatrixXd& gains, double noise_floor) const;

  bool is_exclusive() const;

  // Rebuilds `owner` from the nonzero pattern of `powers`.
  void refresh_owner();
};

}  // namespace refarm
