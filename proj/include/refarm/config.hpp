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

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace refarm {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

enum class ChannelModel { kSelective, kFlat, kAwgn };
enum class Receiver { kMf, kMmse };

std::string_view to_string(ChannelModel m);
std::string_view to_string(Receiver r);
ChannelModel parse_channel_model(std::string_view s);
Receiver parse_receiver(std::string_view s);

// Scalar parameters of the shared uplink. Powers are linear; q, the noise
// and the caps share one unit (the noise power is normally 1).
struct SystemConfig {
  std::size_t N = 256;       // subcarriers == spreading gain
  std::size_t U = 51;        // CDMA users
  std::size_t K = 2;         // OFDMA users
  std::size_t L = 32;        // multipath taps
  std::size_t G = 31;        // cyclic prefix, chips
  double q = 100.0;          // CDMA receive power per user
  double sigma2 = 1.0;       // noise power
  double beta_star = 0.0;    // CDMA target SINR (linear); set by defaults()
  std::vector<double> power_caps;  // per OFDMA user, linear
  ChannelModel cdma_channel = ChannelModel::kSelective;
  ChannelModel ofdma_channel = ChannelModel::kSelective;

  // Informational only.
  double bandwidth_hz = 3.84e6;
  double chip_time() const { return 1.0 / bandwidth_hz; }
  double symbol_time() const { return static_cast<double>(N) / bandwidth_hz; }

  double alpha() const { return static_cast<double>(U) / static_cast<double>(N); }
  double noise_floor_ofdma() const { return alpha() * q + sigma2; }

  // Parameter set of the reference study: N=256, L=N/8, 2 dB target,
  // two OFDMA users with 30 dB caps, 20 dB CDMA receive SNR, load 0.2.
  static SystemConfig defaults();

  // U = round(alpha * N).
  void set_alpha(double alpha);

  // Throws InvalidParameter naming the first violated invariant.
  void validate() const;

  bool operator==(const SystemConfig&) const = default;
};

}  // namespace refarm
