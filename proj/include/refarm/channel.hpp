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

#include "refarm/config.hpp"
#include "refarm/rng.hpp"

namespace refarm {

// Time-domain multipath taps of one user, h_l ~ CN(0, 1/L) i.i.d.
struct ChannelTaps {
  Eigen::VectorXcd taps;
  std::size_t length() const { return static_cast<std::size_t>(taps.size()); }
  double total_power() const { return taps.squaredNorm(); }
};

// Per-subcarrier response lambda_n and its power |lambda_n|^2.
struct FrequencyResponse {
  Eigen::VectorXcd values;
  Eigen::VectorXd gains;
  std::size_t size() const { return static_cast<std::size_t>(values.size()); }
  // (1/N) sum_n |lambda_n|^2
  double mean_gain() const { return gains.mean(); }
};

// Channels of all CDMA and OFDMA users. Taps are kept so that a time-domain
// simulation can reproduce the same links.
struct ChannelSet {
  ChannelModel model = ChannelModel::kSelective;
  std::vector<ChannelTaps> cdma_taps;
  std::vector<ChannelTaps> ofdma_taps;
  std::vector<FrequencyResponse> cdma;
  std::vector<FrequencyResponse> ofdma;

  std::size_t num_cdma() const { return cdma.size(); }
  std::size_t num_ofdma() const { return ofdma.size(); }
  std::size_t num_subcarriers() const;

  // K x N matrix of OFDMA gains g_{k,n}.
  Eigen::MatrixXd ofdma_gains() const;
};

ChannelTaps gen_multipath_taps(std::size_t L, RngStream& rng);

// lambda_n = sum_l h_l exp(-2 pi i n l / N), the eigenvalues of the circulant
// channel matrix under the unitary DFT W. Parseval: mean |lambda|^2 = sum |h|^2.
FrequencyResponse freq_response(const ChannelTaps& taps, std::size_t N);

// Unitary N-point DFT, (W x)_a = N^{-1/2} sum_b x_b exp(-2 pi i a b / N).
Eigen::VectorXcd unitary_dft(const Eigen::VectorXcd& x);
Eigen::VectorXcd unitary_idft(const Eigen::VectorXcd& x);

// Draws one channel per CDMA user (cfg.U) and OFDMA user (cfg.K). The given
// stream only seeds per-user substreams, so user u's channel does not depend
// on how many other users are drawn.
ChannelSet gen_channel_set(const SystemConfig& cfg, ChannelModel cdma_model, ChannelModel ofdma_model,
                           RngStream& rng);
inline ChannelSet gen_channel_set(const SystemConfig& cfg, ChannelModel model, RngStream& rng) {
  return gen_channel_set(cfg, model, model, rng);
}

}  // namespace refarm
