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

#include "refarm/cdma_rx.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "refarm/errors.hpp"

namespace refarm {
namespace {

using cd = std::complex<double>;

void check_profile(const InterferenceProfile& profile, std::size_t N) {
  if (profile.size() != N)
    throw InvalidParameter("interference profile has " + std::to_string(profile.size()) +
                           " entries, expected " + std::to_string(N));
}

// Transmit with a G-chip cyclic prefix through `taps`, then strip the prefix.
Eigen::VectorXcd through_multipath(const Eigen::VectorXcd& symbol, const ChannelTaps& taps, std::size_t G) {
  const auto N = static_cast<std::size_t>(symbol.size());
  const std::size_t L = taps.length();
  if (L > G + 1)
    throw InvalidParameter("cyclic prefix G = " + std::to_string(G) + " shorter than channel memory " +
                           std::to_string(L - 1));
  std::vector<cd> tx(N + G);
  for (std::size_t j = 0; j < N + G; ++j) tx[j] = symbol[static_cast<Eigen::Index>((j + N - G % N) % N)];
  Eigen::VectorXcd rx(static_cast<Eigen::Index>(N));
  for (std::size_t t = 0; t < N; ++t) {
    cd acc{0.0, 0.0};
    for (std::size_t l = 0; l < L; ++l) acc += taps.taps[static_cast<Eigen::Index>(l)] * tx[G + t - l];
    rx[static_cast<Eigen::Index>(t)] = acc;
  }
  return rx;
}

// Running moments for the ratio of mean desired power to mean residual power.
struct RatioMoments {
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  void add(double x, double y) {
    sx += x;
    sy += y;
    sxx += x * x;
    syy += y * y;
    sxy += x * y;
  }
  // Ratio estimate and delta-method standard error over m samples.
  std::pair<double, double> estimate(std::size_t m) const {
    const double M = static_cast<double>(m);
    const double mx = sx / M, my = sy / M;
    const double vx = sxx / M - mx * mx, vy = syy / M - my * my, cxy = sxy / M - mx * my;
    const double r = mx / my;
    const double var = (vx / (my * my) - 2.0 * mx * cxy / (my * my * my) + mx * mx * vy / (my * my * my * my)) / M;
    return {r, std::sqrt(std::max(var, 0.0))};
  }
};

}  // namespace

InterferenceProfile InterferenceProfile::zero(std::size_t N) { return uniform(N, 0.0); }

InterferenceProfile InterferenceProfile::uniform(std::size_t N, double level) {
  return from_levels(Eigen::VectorXd::Constant(static_cast<Eigen::Index>(N), level));
}

InterferenceProfile InterferenceProfile::from_levels(Eigen::VectorXd levels) {
  for (Eigen::Index n = 0; n < levels.size(); ++n)
    if (!(levels[n] >= 0.0)) throw InvalidParameter("interference levels must be >= 0");
  InterferenceProfile p;
  p.mean = levels.size() > 0 ? levels.mean() : 0.0;
  p.per_subcarrier = std::move(levels);
  return p;
}

InterferenceProfile InterferenceProfile::from_allocation(const PowerAllocation& alloc,
                                                         const Eigen::MatrixXd& gains) {
  if (gains.rows() != alloc.powers.rows() || gains.cols() != alloc.powers.cols())
    throw InvalidParameter("gain matrix does not match allocation dimensions");
  return from_levels(alloc.interference(gains));
}

SinrReport SinrReport::make(std::vector<double> values, Receiver rx, SinrSource src) {
  SinrReport r;
  r.receiver = rx;
  r.source = src;
  if (!values.empty()) {
    double s = 0.0;
    for (double v : values) s += v;
    r.mean = s / static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - r.mean) * (v - r.mean);
    r.variance = values.size() > 1 ? ss / static_cast<double>(values.size() - 1) : 0.0;
  }
  r.per_user = std::move(values);
  return r;
}

SpreadingCodeSet gen_spreading_codes(std::size_t U, std::size_t N, RngStream& rng) {
  if (N < 1) throw InvalidParameter("spreading gain N must be >= 1");
  SpreadingCodeSet set;
  set.codes.resize(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(U));
  const double chip = 1.0 / std::sqrt(static_cast<double>(N));
  for (Eigen::Index u = 0; u < set.codes.cols(); ++u)
    for (Eigen::Index n = 0; n < set.codes.rows(); ++n) set.codes(n, u) = rng.coin() ? chip : -chip;
  return set;
}

EffectiveSignatures effective_signatures(const SpreadingCodeSet& codes, const ChannelSet& channels) {
  const std::size_t U = codes.num_users();
  const std::size_t N = codes.length();
  if (channels.num_cdma() != U)
    throw InvalidParameter("channel set has " + std::to_string(channels.num_cdma()) + " CDMA users, codes have " +
                           std::to_string(U));
  EffectiveSignatures sigs;
  sigs.e.resize(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(U));
  for (std::size_t u = 0; u < U; ++u) {
    const auto& resp = channels.cdma[u];
    if (resp.size() != N) throw InvalidParameter("channel response length does not match spreading gain");
    const Eigen::VectorXcd s = codes.codes.col(static_cast<Eigen::Index>(u)).cast<cd>();
    sigs.e.col(static_cast<Eigen::Index>(u)) = resp.values.cwiseProduct(unitary_dft(s));
  }
  return sigs;
}

SinrReport mf_sinr_exact(const EffectiveSignatures& sigs, double q, const InterferenceProfile& profile,
                         double sigma2) {
  const std::size_t U = sigs.num_users();
  if (U == 0) throw InvalidParameter("MF SINR needs at least one user");
  check_profile(profile, sigs.length());
  Eigen::MatrixXcd gram = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(U), static_cast<Eigen::Index>(U));
  gram.selfadjointView<Eigen::Lower>().rankUpdate(sigs.e.adjoint());
  gram = gram.selfadjointView<Eigen::Lower>();
  const Eigen::VectorXd colored = (profile.per_subcarrier.array() + sigma2).matrix();
  std::vector<double> out(U);
  for (std::size_t u = 0; u < U; ++u) {
    const auto iu = static_cast<Eigen::Index>(u);
    const double energy = gram(iu, iu).real();
    if (!(energy > 0.0)) throw DegenerateUser(u);
    const double mai = q * (gram.col(iu).squaredNorm() - energy * energy);
    const double noise = sigs.e.col(iu).cwiseAbs2().dot(colored);
    out[u] = q * energy * energy / (mai + noise);
  }
  return SinrReport::make(std::move(out), Receiver::kMf, SinrSource::kExactFormula);
}

SinrReport mmse_sinr_exact(const EffectiveSignatures& sigs, double q, const InterferenceProfile& profile,
                           double sigma2) {
  const std::size_t U = sigs.num_users();
  if (U == 0) throw InvalidParameter("MMSE SINR needs at least one user");
  if (!(sigma2 > 0.0)) throw InvalidParameter("noise power sigma2 must be > 0");
  check_profile(profile, sigs.length());

  const auto N = static_cast<Eigen::Index>(sigs.length());
  Eigen::MatrixXcd R = Eigen::MatrixXcd::Zero(N, N);
  R.selfadjointView<Eigen::Lower>().rankUpdate(sigs.e, q);
  R.diagonal().array() += (profile.per_subcarrier.array() + sigma2).cast<cd>();
  const Eigen::LLT<Eigen::MatrixXcd, Eigen::Lower> llt(R);
  if (llt.info() != Eigen::Success) throw NumericalFailure("MMSE covariance is not positive definite", 0.0);

  // Spot-check the factorization on the first and last users.
  const Eigen::MatrixXcd full = R.selfadjointView<Eigen::Lower>();
  for (Eigen::Index u : {Eigen::Index{0}, static_cast<Eigen::Index>(U) - 1}) {
    const Eigen::VectorXcd x = llt.solve(sigs.e.col(u));
    const double residual = (full * x - sigs.e.col(u)).norm() / std::max(sigs.e.col(u).norm(), 1e-300);
    if (!(residual <= 1e-10)) throw NumericalFailure("MMSE linear solve inaccurate", residual);
  }

  // e^H R^{-1} e = |L^{-1} e|^2
  const Eigen::MatrixXcd whitened = llt.matrixL().solve(sigs.e);
  std::vector<double> out(U);
  for (std::size_t u = 0; u < U; ++u) {
    const auto iu = static_cast<Eigen::Index>(u);
    if (!(sigs.e.col(iu).squaredNorm() > 0.0)) throw DegenerateUser(u);
    const double inc = q * whitened.col(iu).squaredNorm();  // in (0, 1)
    out[u] = inc / (1.0 - inc);
  }
  return SinrReport::make(std::move(out), Receiver::kMmse, SinrSource::kExactFormula);
}

SinrReport simulate_uplink_frame(const SystemConfig& cfg, const SpreadingCodeSet& codes,
                                 const ChannelSet& channels, const PowerAllocation& alloc,
                                 const FrameOptions& options, RngStream& rng) {
  const std::size_t N = codes.length();
  const std::size_t U = codes.num_users();
  const std::size_t K = channels.num_ofdma();
  if (U == 0) throw InvalidParameter("frame simulation needs at least one CDMA user");
  if (options.slots < 2) throw InvalidParameter("frame simulation needs at least two slots");
  if (alloc.num_users() != K || alloc.num_subcarriers() != N)
    throw InvalidParameter("OFDMA allocation does not match channel set dimensions");
  if (!alloc.is_exclusive()) throw InvalidParameter("OFDMA allocation violates subcarrier exclusivity");
  if ((alloc.powers.array() < 0.0).any()) throw InvalidParameter("OFDMA allocation has negative power");

  const EffectiveSignatures sigs = effective_signatures(codes, channels);
  const Eigen::MatrixXd gains = channels.ofdma_gains();
  const InterferenceProfile profile =
      K > 0 ? InterferenceProfile::from_allocation(alloc, gains) : InterferenceProfile::zero(N);

  // Receive filters, one column per user.
  Eigen::MatrixXcd filters;
  if (options.receiver == Receiver::kMf) {
    filters = sigs.e;
  } else {
    Eigen::MatrixXcd R = cfg.q * sigs.e * sigs.e.adjoint();
    R.diagonal().array() += (profile.per_subcarrier.array() + cfg.sigma2).cast<cd>();
    filters = R.llt().solve(sigs.e);
  }
  // Desired-signal coefficient f_u^H e_u.
  Eigen::VectorXcd desired_gain(static_cast<Eigen::Index>(U));
  for (Eigen::Index u = 0; u < static_cast<Eigen::Index>(U); ++u)
    desired_gain[u] = filters.col(u).dot(sigs.e.col(u));

  // Chip waveforms after cyclic prefix, multipath and prefix removal; fixed
  // across slots because only the data symbol changes.
  Eigen::MatrixXcd cdma_rx_chips(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(U));
  for (std::size_t u = 0; u < U; ++u)
    cdma_rx_chips.col(static_cast<Eigen::Index>(u)) = through_multipath(
        codes.codes.col(static_cast<Eigen::Index>(u)).cast<cd>(), channels.cdma_taps[u], cfg.G);

  std::vector<RatioMoments> moments(U);
  Eigen::VectorXcd a(static_cast<Eigen::Index>(U));
  const double noise_var = options.noiseless ? 0.0 : cfg.sigma2;
  for (std::size_t m = 0; m < options.slots; ++m) {
    for (auto& x : a) x = rng.complex_normal(cfg.q);
    Eigen::VectorXcd r = cdma_rx_chips * a;
    for (std::size_t k = 0; k < K; ++k) {
      Eigen::VectorXcd b = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(N));
      bool active = false;
      for (std::size_t n = 0; n < N; ++n) {
        const double p = alloc.powers(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(n));
        if (p > 0.0) {
          b[static_cast<Eigen::Index>(n)] = rng.complex_normal(p);
          active = true;
        }
      }
      if (active) r += through_multipath(unitary_idft(b), channels.ofdma_taps[k], cfg.G);
    }
    if (noise_var > 0.0)
      for (auto& x : r) x += rng.complex_normal(noise_var);

    const Eigen::VectorXcd r_freq = unitary_dft(r);
    const Eigen::VectorXcd y = filters.adjoint() * r_freq;
    for (Eigen::Index u = 0; u < static_cast<Eigen::Index>(U); ++u) {
      const cd desired = desired_gain[u] * a[u];
      moments[static_cast<std::size_t>(u)].add(std::norm(desired), std::norm(y[u] - desired));
    }
  }

  std::vector<double> sinr(U), se(U);
  for (std::size_t u = 0; u < U; ++u) std::tie(sinr[u], se[u]) = moments[u].estimate(options.slots);
  SinrReport rep = SinrReport::make(std::move(sinr), options.receiver, SinrSource::kSymbolLevel);
  rep.std_error = std::move(se);
  return rep;
}

}  // namespace refarm
