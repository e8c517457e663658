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

#include "refarm/power_allocation.hpp"

#include <cmath>

namespace refarm {

PowerAllocation PowerAllocation::zeros(std::size_t K, std::size_t N) {
  PowerAllocation a;
  a.powers = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(N));
  a.owner.assign(N, std::nullopt);
  return a;
}

Eigen::VectorXd PowerAllocation::interference(const Eigen::MatrixXd& gains) const {
  return powers.cwiseProduct(gains).colwise().sum().transpose();
}

double PowerAllocation::mean_interference(const Eigen::MatrixXd& gains) const {
  if (powers.cols() == 0) return 0.0;
  return powers.cwiseProduct(gains).sum() / static_cast<double>(powers.cols());
}

double PowerAllocation::throughput(const Eigen::MatrixXd& gains, double noise_floor) const {
  double c = 0.0;
  for (Eigen::Index k = 0; k < powers.rows(); ++k)
    for (Eigen::Index n = 0; n < powers.cols(); ++n)
      if (powers(k, n) > 0.0) c += std::log2(1.0 + powers(k, n) * gains(k, n) / noise_floor);
  return c;
}

bool PowerAllocation::is_exclusive() const {
  for (Eigen::Index n = 0; n < powers.cols(); ++n) {
    int active = 0;
    for (Eigen::Index k = 0; k < powers.rows(); ++k) active += powers(k, n) > 0.0 ? 1 : 0;
    if (active > 1) return false;
  }
  return true;
}

void PowerAllocation::refresh_owner() {
  owner.assign(num_subcarriers(), std::nullopt);
  for (Eigen::Index n = 0; n < powers.cols(); ++n)
    for (Eigen::Index k = 0; k < powers.rows(); ++k)
      if (powers(k, n) > 0.0) {
        owner[static_cast<std::size_t>(n)] = static_cast<std::size_t>(k);
        break;
      }
}

}  // namespace refarm
