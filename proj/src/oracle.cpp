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

// Exhaustive reference solver for tiny allocation instances. Shares nothing
// with the dual method beyond the problem definition: powers of each
// assignment come from a log-barrier interior-point method.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "refarm/allocator.hpp"
#include "refarm/errors.hpp"

namespace refarm {
namespace {

struct TinyInstance {
  std::vector<double> gain;          // per subcarrier, owner's gain
  std::vector<std::size_t> owner;    // per subcarrier
  std::vector<double> caps;
  double budget;                     // N T
  double floor;
};

double objective(const TinyInstance& inst, const std::vector<double>& p) {
  double c = 0.0;
  for (std::size_t n = 0; n < p.size(); ++n) c += std::log2(1.0 + p[n] * inst.gain[n] / inst.floor);
  return c;
}

// Slacks of every inequality: p_n >= 0, per-user caps, interference budget.
Eigen::VectorXd slacks(const TinyInstance& inst, const Eigen::VectorXd& p) {
  const auto N = p.size();
  const auto K = static_cast<Eigen::Index>(inst.caps.size());
  Eigen::VectorXd s(N + K + 1);
  s.head(N) = p;
  for (Eigen::Index k = 0; k < K; ++k) s(N + k) = inst.caps[static_cast<std::size_t>(k)];
  double used = 0.0;
  for (Eigen::Index n = 0; n < N; ++n) {
    s(N + static_cast<Eigen::Index>(inst.owner[static_cast<std::size_t>(n)])) -= p(n);
    used += inst.gain[static_cast<std::size_t>(n)] * p(n);
  }
  s(N + K) = inst.budget - used;
  return s;
}

// Rows a_i of the constraint matrix written as s_i = b_i - a_i p.
Eigen::MatrixXd constraint_rows(const TinyInstance& inst) {
  const auto N = static_cast<Eigen::Index>(inst.gain.size());
  const auto K = static_cast<Eigen::Index>(inst.caps.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N + K + 1, N);
  for (Eigen::Index n = 0; n < N; ++n) {
    A(n, n) = -1.0;
    A(N + static_cast<Eigen::Index>(inst.owner[static_cast<std::size_t>(n)]), n) = 1.0;
    A(N + K, n) = inst.gain[static_cast<std::size_t>(n)];
  }
  return A;
}

double barrier_value(const TinyInstance& inst, const Eigen::VectorXd& p, double t) {
  const Eigen::VectorXd s = slacks(inst, p);
  if ((s.array() <= 0.0).any()) return -HUGE_VAL;
  double f = 0.0;
  for (Eigen::Index n = 0; n < p.size(); ++n)
    f += std::log1p(p(n) * inst.gain[static_cast<std::size_t>(n)] / inst.floor);
  return t * f + s.array().log().sum();
}

std::vector<double> interior_point(const TinyInstance& inst) {
  const auto N = static_cast<Eigen::Index>(inst.gain.size());
  if (inst.budget <= 0.0) return std::vector<double>(inst.gain.size(), 0.0);
  const Eigen::MatrixXd A = constraint_rows(inst);
  const double m = static_cast<double>(A.rows());

  // Strictly feasible start.
  double gsum = 0.0, cap_min = HUGE_VAL;
  for (double g : inst.gain) gsum += g;
  for (double c : inst.caps) cap_min = std::min(cap_min, c);
  const double start = 0.5 * std::min(cap_min / static_cast<double>(N),
                                      gsum > 0.0 ? inst.budget / gsum : HUGE_VAL);
  Eigen::VectorXd p = Eigen::VectorXd::Constant(N, start);

  for (double t = 1.0; m / t > 1e-11; t *= 8.0) {
    for (int it = 0; it < 200; ++it) {
      const Eigen::VectorXd s = slacks(inst, p);
      const Eigen::VectorXd inv = s.cwiseInverse();
      Eigen::VectorXd grad = -A.transpose() * inv;
      Eigen::MatrixXd hess = -A.transpose() * inv.cwiseAbs2().asDiagonal() * A;
      for (Eigen::Index n = 0; n < N; ++n) {
        const double g = inst.gain[static_cast<std::size_t>(n)];
        const double d = inst.floor + g * p(n);
        grad(n) += t * g / d;
        hess(n, n) -= t * g * g / (d * d);
      }
      const Eigen::VectorXd step = (-hess).ldlt().solve(grad);
      const double decrement = grad.dot(step);
      if (decrement <= 1e-14) break;
      const double f0 = barrier_value(inst, p, t);
      double a = 1.0;
      while (barrier_value(inst, p + a * step, t) < f0 + 0.25 * a * decrement && a > 1e-16) a *= 0.5;
      p += a * step;
    }
  }
  std::vector<double> out(inst.gain.size());
  for (Eigen::Index n = 0; n < N; ++n) out[static_cast<std::size_t>(n)] = std::max(p(n), 0.0);
  return out;
}

}  // namespace

OracleResult brute_force_oracle(const AllocationProblem& problem) {
  problem.validate();
  const std::size_t K = problem.num_users();
  const std::size_t N = problem.num_subcarriers();
  if (N > 6 || K > 2) throw InvalidParameter("brute-force oracle limited to N <= 6 and K <= 2");

  OracleResult best;
  best.allocation = PowerAllocation::zeros(K, N);
  best.throughput = 0.0;
  std::size_t combos = 1;
  for (std::size_t n = 0; n < N; ++n) combos *= K;

  TinyInstance inst;
  inst.caps = problem.power_caps;
  inst.budget = static_cast<double>(N) * problem.margin;
  inst.floor = problem.noise_floor;
  inst.gain.resize(N);
  inst.owner.resize(N);
  for (std::size_t code = 0; code < combos; ++code) {
    std::size_t c = code;
    for (std::size_t n = 0; n < N; ++n) {
      inst.owner[n] = c % K;
      c /= K;
      inst.gain[n] = problem.gains(static_cast<Eigen::Index>(inst.owner[n]), static_cast<Eigen::Index>(n));
    }
    const std::vector<double> p = interior_point(inst);
    const double value = objective(inst, p);
    ++best.assignments;
    if (value > best.throughput) {
      best.throughput = value;
      best.allocation = PowerAllocation::zeros(K, N);
      for (std::size_t n = 0; n < N; ++n)
        best.allocation.powers(static_cast<Eigen::Index>(inst.owner[n]), static_cast<Eigen::Index>(n)) = p[n];
      best.allocation.refresh_owner();
    }
  }
  return best;
}

}  // namespace refarm
