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

#include "refarm/config.hpp"

#include <string>

#include "refarm/errors.hpp"

namespace refarm {

std::string_view to_string(ChannelModel m) {
  switch (m) {
    case ChannelModel::kSelective: return "selective";
    case ChannelModel::kFlat: return "flat";
    case ChannelModel::kAwgn: return "awgn";
  }
  return "?";
}

std::string_view to_string(Receiver r) { return r == Receiver::kMf ? "mf" : "mmse"; }

ChannelModel parse_channel_model(std::string_view s) {
  if (s == "selective") return ChannelModel::kSelective;
  if (s == "flat") return ChannelModel::kFlat;
  if (s == "awgn") return ChannelModel::kAwgn;
  throw InvalidParameter("unknown channel model '" + std::string(s) + "'");
}

Receiver parse_receiver(std::string_view s) {
  if (s == "mf") return Receiver::kMf;
  if (s == "mmse") return Receiver::kMmse;
  throw InvalidParameter("unknown receiver '" + std::string(s) + "'");
}

SystemConfig SystemConfig::defaults() {
  SystemConfig c;
  c.N = 256;
  c.L = c.N / 8;
  c.G = c.L - 1;
  c.K = 2;
  c.sigma2 = 1.0;
  c.q = c.sigma2 * db_to_linear(20.0);
  c.beta_star = db_to_linear(2.0);
  c.power_caps.assign(c.K, c.sigma2 * db_to_linear(30.0));
  c.set_alpha(0.2);
  return c;
}

void SystemConfig::set_alpha(double alpha) {
  if (!(alpha >= 0.0)) throw InvalidParameter("invariant violated: alpha >= 0");
  U = static_cast<std::size_t>(std::llround(alpha * static_cast<double>(N)));
}

void SystemConfig::validate() const {
  auto fail = [](const char* what) { throw InvalidParameter(std::string("invariant violated: ") + what); };
  if (N < 1) fail("N >= 1");
  if (L < 1 || L > N) fail("1 <= L <= N");
  if (G + 1 < L) fail("G >= L - 1");
  if (!(q > 0.0)) fail("q > 0");
  if (!(sigma2 > 0.0)) fail("sigma2 > 0");
  if (!(beta_star > 0.0)) fail("beta_star > 0");
  if (power_caps.size() != K) fail("one power cap per OFDMA user");
  for (double c : power_caps)
    if (!(c >= 0.0)) fail("power caps >= 0");
}

}  // namespace refarm
