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

#include "refarm/asymptotics.hpp"

#include <algorithm>
#include <cmath>

#include "refarm/errors.hpp"

namespace refarm {
namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0)) throw InvalidParameter(std::string(name) + " must be > 0");
}

Eigen::MatrixXd gain_matrix(const ChannelSet& channels) {
  const std::size_t U = channels.num_cdma();
  const std::size_t N = channels.num_subcarriers();
  Eigen::MatrixXd g(static_cast<Eigen::Index>(U), static_cast<Eigen::Index>(N));
  for (std::size_t u = 0; u < U; ++u) g.row(static_cast<Eigen::Index>(u)) = channels.cdma[u].gains.transpose();
  return g;
}

}  // namespace

std::vector<double> mf_asymptotic_selective(const ChannelSet& channels, double q,
                                            const InterferenceProfile& profile, double sigma2) {
  const std::size_t U = channels.num_cdma();
  if (U == 0) throw InvalidParameter("MF asymptotics need at least one CDMA user");
  const Eigen::MatrixXd g = gain_matrix(channels);
  const auto N = static_cast<double>(g.cols());
  if (profile.size() != static_cast<std::size_t>(g.cols()))
    throw InvalidParameter("interference profile length does not match subcarrier count");

  const Eigen::VectorXd load = q * g.colwise().sum().transpose();  // sum_i q |l_in|^2
  std::vector<double> out(U);
  for (std::size_t u = 0; u < U; ++u) {
    const Eigen::VectorXd gu = g.row(static_cast<Eigen::Index>(u)).transpose();
    const double power = gu.sum() / N;
    const double mai = gu.dot(load - q * gu) / (N * N);
    const double colored = gu.dot(profile.per_subcarrier) / N;
    out[u] = q * power * power / (mai + colored + power * sigma2);
  }
  return out;
}

double mf_asymptotic_uniform(double alpha, double q, double mean_interference, double sigma2) {
  return q / (alpha * q + mean_interference + sigma2);
}

FixedPointSolution mmse_fixed_point_selective(const ChannelSet& channels, double q,
                                              const InterferenceProfile& profile, double sigma2,
                                              const FixedPointOptions& options) {
  require_positive(sigma2, "sigma2");
  require_positive(q, "q");
  const std::size_t U = channels.num_cdma();
  if (U == 0) throw InvalidParameter("MMSE fixed point needs at least one CDMA user");
  const Eigen::MatrixXd g = q * gain_matrix(channels);  // q |l_un|^2, U x N
  const auto N = static_cast<double>(g.cols());
  if (profile.size() != static_cast<std::size_t>(g.cols()))
    throw InvalidParameter("interference profile length does not match subcarrier count");
  const Eigen::ArrayXd floor = profile.per_subcarrier.array() + sigma2;

  Eigen::VectorXd x = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(U), options.start.value_or(q / sigma2));
  FixedPointSolution sol;
  if (options.record_history) sol.history.emplace_back(x.data(), x.data() + x.size());
  for (std::size_t it = 1; it <= options.max_iterations; ++it) {
    const Eigen::VectorXd w = (1.0 + x.array()).inverse();
    const Eigen::ArrayXd denom = (g.transpose() * w).array() / N + floor;
    const Eigen::VectorXd next = (g * denom.inverse().matrix()) / N;
    double change = 0.0;
    for (Eigen::Index u = 0; u < next.size(); ++u)
      change = std::max(change, std::abs(next[u] - x[u]) / std::max(std::abs(next[u]), 1e-300));
    x = next;
    if (options.record_history) sol.history.emplace_back(x.data(), x.data() + x.size());
    sol.iterations = it;
    sol.residual = change;
    if (change <= options.tolerance) {
      sol.values.assign(x.data(), x.data() + x.size());
      return sol;
    }
  }
  throw NumericalFailure("coupled MMSE fixed point did not converge", sol.residual);
}

FixedPointSolution mmse_fixed_point_uniform(double alpha, double q, const InterferenceProfile& profile,
                                            double sigma2, const FixedPointOptions& options) {
  require_positive(sigma2, "sigma2");
  require_positive(q, "q");
  if (!(alpha >= 0.0)) throw InvalidParameter("alpha must be >= 0");
  if (profile.size() == 0) throw InvalidParameter("interference profile is empty");
  const Eigen::ArrayXd floor = profile.per_subcarrier.array() + sigma2;

  double x = options.start.value_or(q / sigma2);
  FixedPointSolution sol;
  if (options.record_history) sol.history.push_back({x});
  for (std::size_t it = 1; it <= options.max_iterations; ++it) {
    const double next = (q / (alpha * q / (1.0 + x) + floor)).mean();
    const double change = std::abs(next - x) / std::max(std::abs(next), 1e-300);
    x = next;
    if (options.record_history) sol.history.push_back({x});
    sol.iterations = it;
    sol.residual = change;
    if (change <= options.tolerance) {
      sol.values = {x};
      return sol;
    }
  }
  throw NumericalFailure("scalar MMSE fixed point did not converge", sol.residual);
}

double supportable_load(double q, double sigma2, double beta_star, Receiver receiver) {
  require_positive(q, "q");
  require_positive(sigma2, "sigma2");
  require_positive(beta_star, "beta_star");
  const double mf = 1.0 / beta_star - sigma2 / q;
  return receiver == Receiver::kMf ? mf : mf * (1.0 + beta_star);
}

MarginResult interference_margin(double alpha, double q, double sigma2, double beta_star, Receiver receiver) {
  MarginResult r;
  r.receiver = receiver;
  r.alpha_star = supportable_load(q, sigma2, beta_star, receiver);
  r.feasible = alpha < r.alpha_star;
  if (r.feasible) {
    r.margin = (r.alpha_star - alpha) * q;
    if (receiver == Receiver::kMmse) r.margin /= 1.0 + beta_star;
  }
  return r;
}

JensenGap jensen_reinforcement_gap(double beta, double alpha, double q, double sigma2,
                                   const InterferenceProfile& profile) {
  if (profile.size() == 0) throw InvalidParameter("interference profile is empty");
  const double base = alpha * q / (1.0 + beta) + sigma2;
  JensenGap j;
  j.lhs = (q / (base + profile.per_subcarrier.array())).mean();
  j.rhs = q / (base + profile.mean);
  return j;
}

bool proposition1_check(double beta_star, double alpha, double q, double sigma2,
                        const InterferenceProfile& profile) {
  require_positive(beta_star, "beta_star");
  const double lhs = jensen_reinforcement_gap(beta_star, alpha, q, sigma2, profile).lhs;
  // Equality is the margin boundary; allow for rounding in the mean.
  return lhs >= beta_star * (1.0 - 1e-12);
}

double ofdma_asymptotic_sinr(double p, double g, double alpha, double q, double sigma2) {
  return p * g / (alpha * q + sigma2);
}

}  // namespace refarm
