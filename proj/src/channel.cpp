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

#include "refarm/channel.hpp"

#include <cmath>
#include <complex>
#include <string>

#include <unsupported/Eigen/FFT>

#include "refarm/errors.hpp"

namespace refarm {
namespace {

constexpr std::uint64_t kCdmaTag = 0xCD;
constexpr std::uint64_t kOfdmaTag = 0x0F;

ChannelTaps draw_taps(ChannelModel model, std::size_t L, RngStream& rng) {
  switch (model) {
    case ChannelModel::kSelective:
      return gen_multipath_taps(L, rng);
    case ChannelModel::kFlat:
      return gen_multipath_taps(1, rng);
    case ChannelModel::kAwgn: {
      ChannelTaps t;
      t.taps = Eigen::VectorXcd::Ones(1);
      return t;
    }
  }
  throw InvalidParameter("unhandled channel model");
}

// Exact ones, independent of FFT rounding.
void set_unit_response(FrequencyResponse& r) {
  r.values.setOnes();
  r.gains.setOnes();
}

}  // namespace

std::size_t ChannelSet::num_subcarriers() const {
  if (!cdma.empty()) return cdma.front().size();
  if (!ofdma.empty()) return ofdma.front().size();
  return 0;
}

Eigen::MatrixXd ChannelSet::ofdma_gains() const {
  const std::size_t N = num_subcarriers();
  Eigen::MatrixXd g(ofdma.size(), N);
  for (std::size_t k = 0; k < ofdma.size(); ++k) g.row(k) = ofdma[k].gains.transpose();
  return g;
}

ChannelTaps gen_multipath_taps(std::size_t L, RngStream& rng) {
  if (L == 0) throw InvalidParameter("multipath count L must be >= 1");
  ChannelTaps t;
  t.taps.resize(static_cast<Eigen::Index>(L));
  const double var = 1.0 / static_cast<double>(L);
  for (auto& h : t.taps) h = rng.complex_normal(var);
  return t;
}

FrequencyResponse freq_response(const ChannelTaps& taps, std::size_t N) {
  if (N == 0) throw InvalidParameter("transform size N must be >= 1");
  if (taps.length() > N)
    throw InvalidParameter("tap count " + std::to_string(taps.length()) + " exceeds N = " + std::to_string(N));
  std::vector<std::complex<double>> padded(N, {0.0, 0.0});
  for (std::size_t l = 0; l < taps.length(); ++l) padded[l] = taps.taps[static_cast<Eigen::Index>(l)];
  std::vector<std::complex<double>> spectrum;
  Eigen::FFT<double> fft;
  fft.fwd(spectrum, padded);

  FrequencyResponse r;
  r.values = Eigen::Map<Eigen::VectorXcd>(spectrum.data(), static_cast<Eigen::Index>(N));
  r.gains = r.values.cwiseAbs2();
  return r;
}

Eigen::VectorXcd unitary_dft(const Eigen::VectorXcd& x) {
  std::vector<std::complex<double>> in(x.data(), x.data() + x.size()), out;
  Eigen::FFT<double> fft;
  fft.fwd(out, in);
  Eigen::VectorXcd y = Eigen::Map<Eigen::VectorXcd>(out.data(), x.size());
  return y / std::sqrt(static_cast<double>(x.size()));
}

Eigen::VectorXcd unitary_idft(const Eigen::VectorXcd& x) {
  std::vector<std::complex<double>> in(x.data(), x.data() + x.size()), out;
  Eigen::FFT<double> fft;
  fft.inv(out, in);  // includes 1/N
  Eigen::VectorXcd y = Eigen::Map<Eigen::VectorXcd>(out.data(), x.size());
  return y * std::sqrt(static_cast<double>(x.size()));
}

ChannelSet gen_channel_set(const SystemConfig& cfg, ChannelModel cdma_model, ChannelModel ofdma_model,
                           RngStream& rng) {
  if (cfg.N < 1) throw InvalidParameter("invariant violated: N >= 1");
  if (cfg.L < 1 || cfg.L > cfg.N) throw InvalidParameter("invariant violated: 1 <= L <= N");
  const std::uint64_t base = rng.engine()();

  ChannelSet set;
  set.model = cdma_model;
  set.cdma_taps.reserve(cfg.U);
  set.cdma.reserve(cfg.U);
  for (std::size_t u = 0; u < cfg.U; ++u) {
    RngStream s = RngStream::derive(base, {kCdmaTag, u});
    set.cdma_taps.push_back(draw_taps(cdma_model, cfg.L, s));
    set.cdma.push_back(freq_response(set.cdma_taps.back(), cfg.N));
    if (cdma_model == ChannelModel::kAwgn) set_unit_response(set.cdma.back());
  }
  set.ofdma_taps.reserve(cfg.K);
  set.ofdma.reserve(cfg.K);
  for (std::size_t k = 0; k < cfg.K; ++k) {
    RngStream s = RngStream::derive(base, {kOfdmaTag, k});
    set.ofdma_taps.push_back(draw_taps(ofdma_model, cfg.L, s));
    set.ofdma.push_back(freq_response(set.ofdma_taps.back(), cfg.N));
    if (ofdma_model == ChannelModel::kAwgn) set_unit_response(set.ofdma.back());
  }
  return set;
}

}  // namespace refarm
