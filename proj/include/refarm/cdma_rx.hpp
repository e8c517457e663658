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
#include <vector>

#include <Eigen/Dense>

#include "refarm/channel.hpp"
#include "refarm/config.hpp"
#include "refarm/power_allocation.hpp"
#include "refarm/rng.hpp"

namespace refarm {

// U chip-domain signatures (columns), entries +-1/sqrt(N).
struct SpreadingCodeSet {
  Eigen::MatrixXd codes;  // N x U
  std::size_t num_users() const { return static_cast<std::size_t>(codes.cols()); }
  std::size_t length() const { return static_cast<std::size_t>(codes.rows()); }
};

// Columns e_u = Lambda_u W s_u.
struct EffectiveSignatures {
  Eigen::MatrixXcd e;  // N x U
  std::size_t num_users() const { return static_cast<std::size_t>(e.cols()); }
  std::size_t length() const { return static_cast<std::size_t>(e.rows()); }
};

// OFDMA interference seen by the CDMA receiver on each subcarrier.
struct InterferenceProfile {
  Eigen::VectorXd per_subcarrier;
  double mean = 0.0;

  static InterferenceProfile zero(std::size_t N);
  static InterferenceProfile uniform(std::size_t N, double level);
  static InterferenceProfile from_levels(Eigen::VectorXd levels);
  static InterferenceProfile from_allocation(const PowerAllocation& alloc, const Eigen::MatrixXd& gains);

  std::size_t size() const { return static_cast<std::size_t>(per_subcarrier.size()); }
};

enum class SinrSource { kExactFormula, kSymbolLevel, kAsymptotic };

struct SinrReport {
  std::vector<double> per_user;      // linear
  std::vector<double> std_error;     // symbol-level estimates only
  double mean = 0.0;
  double variance = 0.0;
  Receiver receiver = Receiver::kMf;
  SinrSource source = SinrSource::kExactFormula;

  static SinrReport make(std::vector<double> values, Receiver rx, SinrSource src);
};

SpreadingCodeSet gen_spreading_codes(std::size_t U, std::size_t N, RngStream& rng);

EffectiveSignatures effective_signatures(const SpreadingCodeSet& codes, const ChannelSet& channels);

// gamma_u = q |e_u^H e_u|^2 / e_u^H (sum_{i!=u} q e_i e_i^H + Sigma + sigma2 I) e_u
SinrReport mf_sinr_exact(const EffectiveSignatures& sigs, double q, const InterferenceProfile& profile,
                         double sigma2);

// Linear MMSE output SINR, q e_u^H (R_{-u} + Sigma + sigma2 I)^{-1} e_u with
// R_{-u} the covariance of all other CDMA users. Evaluated from one Cholesky
// factorization of the full covariance R and the rank-one identity
// gamma_exclude = gamma_include / (1 - gamma_include).
SinrReport mmse_sinr_exact(const EffectiveSignatures& sigs, double q, const InterferenceProfile& profile,
                           double sigma2);

inline SinrReport sinr_exact(Receiver rx, const EffectiveSignatures& sigs, double q,
                             const InterferenceProfile& profile, double sigma2) {
  return rx == Receiver::kMf ? mf_sinr_exact(sigs, q, profile, sigma2)
                             : mmse_sinr_exact(sigs, q, profile, sigma2);
}

struct FrameOptions {
  Receiver receiver = Receiver::kMf;
  std::size_t slots = 1000;
  bool noiseless = false;
};

// Symbol-level time-domain simulation of `slots` uplink symbol periods: chips
// with cyclic prefix pass through the multipath taps, OFDMA symbols are
// IFFT-modulated on their assigned subcarriers, noise is added, and the BS
// applies the unitary DFT and the MF or MMSE filter. The SINR is measured by
// splitting each filter output into the known desired contribution and the
// residual. std_error carries a delta-method standard error per user.
SinrReport simulate_uplink_frame(const SystemConfig& cfg, const SpreadingCodeSet& codes,
                                 const ChannelSet& channels, const PowerAllocation& ofdma_alloc,
                                 const FrameOptions& options, RngStream& rng);

}  // namespace refarm
