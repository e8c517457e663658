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

#include "refarm/config_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <string_view>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "refarm/errors.hpp"

namespace refarm {
namespace {

struct KeySpec {
  std::string_view section;
  std::string_view name;
};

constexpr KeySpec kKeys[] = {
    {"system", "N"},           {"system", "L"},
    {"system", "G"},           {"system", "K"},
    {"system", "U"},           {"system", "alpha"},
    {"system", "sigma2"},      {"system", "q"},
    {"system", "q_db"},        {"system", "beta_star"},
    {"system", "beta_star_db"}, {"system", "caps"},
    {"system", "cap_db"},      {"system", "cdma_channel"},
    {"system", "ofdma_channel"}, {"system", "bandwidth_hz"},
    {"sweep", "receiver"},     {"sweep", "trials"},
    {"sweep", "ofdma_draws"},  {"sweep", "seed"},
    {"sweep", "light_alpha"},  {"sweep", "heavy_alpha"},
    {"sweep", "alpha_grid"},   {"sweep", "snr_grid_db"},
    {"solver", "max_iterations"}, {"solver", "gap_tolerance"},
    {"solver", "step_scale"},  {"solver", "initial_lambda"},
    {"solver", "initial_delta"}, {"solver", "check_every"},
};

// Keys that set the same quantity in different units.
constexpr std::pair<std::string_view, std::string_view> kAliases[] = {
    {"system.q", "system.q_db"},
    {"system.beta_star", "system.beta_star_db"},
    {"system.caps", "system.cap_db"},
    {"system.U", "system.alpha"},
};

using RawMap = std::map<std::string, std::string>;

bool is_known(const std::string& full) {
  return std::any_of(std::begin(kKeys), std::end(kKeys), [&](const KeySpec& k) {
    return full.size() == k.section.size() + 1 + k.name.size() && full.starts_with(k.section) &&
           full[k.section.size()] == '.' && full.ends_with(k.name);
  });
}

std::string qualify(const std::string& key) {
  if (key.find('.') != std::string::npos) {
    if (!is_known(key)) throw UnknownKey(key);
    return key;
  }
  for (const auto& k : kKeys)
    if (k.name == key) return std::string(k.section) + "." + key;
  throw UnknownKey(key);
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw InvalidParameter("key '" + key + "': expected a number, got '" + text + "'");
  return v;
}

std::uint64_t to_u64(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw InvalidParameter("key '" + key + "': expected a nonnegative integer, got '" + text + "'");
  return v;
}

std::size_t to_size(const std::string& key, const std::string& text) {
  return static_cast<std::size_t>(to_u64(key, text));
}

std::vector<double> to_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!trim(item).empty()) out.push_back(to_double(key, item));
  return out;
}

RawMap read_ini_text(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw InvalidParameter(std::string("malformed configuration: ") + e.message() + " at line " +
                           std::to_string(e.line()));
  }
  RawMap raw;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw UnknownKey(section);
    for (const auto& [name, value] : body) {
      const std::string full = section + "." + name;
      if (!is_known(full)) throw UnknownKey(full);
      raw[full] = value.data();
    }
  }
  for (const auto& [a, b] : kAliases)
    if (a != "system.U" && raw.contains(std::string(a)) && raw.contains(std::string(b)))
      throw InvalidParameter("conflicting keys '" + std::string(a) + "' and '" + std::string(b) + "'");
  return raw;
}

void apply_override(RawMap& raw, const std::string& item) {
  const auto eq = item.find('=');
  if (eq == std::string::npos) throw InvalidParameter("override '" + item + "' is not key=value");
  const std::string key = qualify(trim(std::string_view(item).substr(0, eq)));
  for (const auto& [a, b] : kAliases)
    if (key == a || key == b) {
      raw.erase(std::string(a));
      raw.erase(std::string(b));
    }
  raw[key] = trim(std::string_view(item).substr(eq + 1));
}

std::vector<double> default_alpha_grid() {
  std::vector<double> g;
  for (int i = 1; i <= 32; ++i) g.push_back(i / 20.0);
  return g;
}

std::vector<double> default_snr_grid() {
  std::vector<double> g;
  for (int db = 0; db <= 30; db += 2) g.push_back(db);
  return g;
}

ParsedConfig resolve(const RawMap& raw) {
  auto has = [&](const char* k) { return raw.contains(k); };
  auto get = [&](const char* k) -> const std::string& { return raw.at(k); };

  ParsedConfig out = default_config();
  SystemConfig& s = out.system;
  if (has("system.N")) s.N = to_size("system.N", get("system.N"));
  if (has("system.L")) s.L = to_size("system.L", get("system.L"));
  else s.L = std::max<std::size_t>(1, s.N / 8);
  if (has("system.G")) s.G = to_size("system.G", get("system.G"));
  else s.G = s.L - 1;
  if (has("system.K")) s.K = to_size("system.K", get("system.K"));
  if (has("system.sigma2")) s.sigma2 = to_double("system.sigma2", get("system.sigma2"));

  if (has("system.q")) s.q = to_double("system.q", get("system.q"));
  else s.q = s.sigma2 * db_to_linear(has("system.q_db") ? to_double("system.q_db", get("system.q_db")) : 20.0);

  if (has("system.beta_star")) s.beta_star = to_double("system.beta_star", get("system.beta_star"));
  else if (has("system.beta_star_db"))
    s.beta_star = db_to_linear(to_double("system.beta_star_db", get("system.beta_star_db")));

  if (has("system.caps")) {
    s.power_caps = to_list("system.caps", get("system.caps"));
  } else {
    const double db = has("system.cap_db") ? to_double("system.cap_db", get("system.cap_db")) : 30.0;
    s.power_caps.assign(s.K, s.sigma2 * db_to_linear(db));
  }
  if (has("system.cdma_channel")) s.cdma_channel = parse_channel_model(trim(get("system.cdma_channel")));
  if (has("system.ofdma_channel")) s.ofdma_channel = parse_channel_model(trim(get("system.ofdma_channel")));
  if (has("system.bandwidth_hz")) s.bandwidth_hz = to_double("system.bandwidth_hz", get("system.bandwidth_hz"));

  out.nominal_alpha = has("system.alpha") ? to_double("system.alpha", get("system.alpha")) : 0.2;
  s.set_alpha(out.nominal_alpha);
  if (has("system.U")) {
    const std::size_t U = to_size("system.U", get("system.U"));
    if (has("system.alpha") && U != s.U)
      throw InvalidParameter("conflicting keys 'system.U' and 'system.alpha'");
    s.U = U;
    if (!has("system.alpha")) out.nominal_alpha = s.alpha();
  }
  s.validate();

  SweepSpec& w = out.sweep;
  if (has("sweep.receiver")) w.receiver = parse_receiver(trim(get("sweep.receiver")));
  if (has("sweep.trials")) w.trials = to_size("sweep.trials", get("sweep.trials"));
  if (has("sweep.ofdma_draws")) w.ofdma_draws = to_size("sweep.ofdma_draws", get("sweep.ofdma_draws"));
  if (has("sweep.seed")) w.seed = to_u64("sweep.seed", get("sweep.seed"));
  if (has("sweep.light_alpha")) w.light_alpha = to_double("sweep.light_alpha", get("sweep.light_alpha"));
  if (has("sweep.heavy_alpha")) w.heavy_alpha = to_double("sweep.heavy_alpha", get("sweep.heavy_alpha"));
  if (has("sweep.alpha_grid")) out.alpha_grid = to_list("sweep.alpha_grid", get("sweep.alpha_grid"));
  if (has("sweep.snr_grid_db")) out.snr_grid_db = to_list("sweep.snr_grid_db", get("sweep.snr_grid_db"));

  SolverOptions& o = w.solver;
  if (has("solver.max_iterations")) o.max_iterations = to_size("solver.max_iterations", get("solver.max_iterations"));
  if (has("solver.gap_tolerance")) o.gap_tolerance = to_double("solver.gap_tolerance", get("solver.gap_tolerance"));
  if (has("solver.step_scale")) o.step_scale = to_double("solver.step_scale", get("solver.step_scale"));
  if (has("solver.initial_lambda")) o.initial_lambda = to_double("solver.initial_lambda", get("solver.initial_lambda"));
  if (has("solver.initial_delta")) o.initial_delta = to_double("solver.initial_delta", get("solver.initial_delta"));
  if (has("solver.check_every")) o.check_every = to_size("solver.check_every", get("solver.check_every"));
  if (o.max_iterations < 1) throw InvalidParameter("invariant violated: max_iterations >= 1");
  if (!(o.gap_tolerance > 0.0)) throw InvalidParameter("invariant violated: gap_tolerance > 0");
  if (!(o.step_scale > 0.0)) throw InvalidParameter("invariant violated: step_scale > 0");
  if (!(o.initial_lambda >= 0.0) || !(o.initial_delta >= 0.0))
    throw InvalidParameter("invariant violated: initial multipliers >= 0");
  if (o.check_every < 1) throw InvalidParameter("invariant violated: check_every >= 1");
  if (!(w.light_alpha > 0.0) || !(w.heavy_alpha > 0.0))
    throw InvalidParameter("invariant violated: regime loads > 0");

  w.fixed = s;
  w.grid = out.alpha_grid;
  out.load_sweep().validate();
  out.snr_sweep().validate();
  return out;
}

// Shortest text that parses back to the same double.
std::string fmt(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fmt_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
  return s;
}

}  // namespace

SweepSpec ParsedConfig::load_sweep() const {
  SweepSpec s = sweep;
  s.fixed = system;
  s.swept_parameter = SweepParameter::kAlpha;
  s.grid = alpha_grid;
  return s;
}

SweepSpec ParsedConfig::snr_sweep() const {
  SweepSpec s = sweep;
  s.fixed = system;
  s.swept_parameter = SweepParameter::kReceiveSnrDb;
  s.grid = snr_grid_db;
  return s;
}

ParsedConfig default_config() {
  ParsedConfig c;
  c.system = SystemConfig::defaults();
  c.sweep.fixed = c.system;
  c.alpha_grid = default_alpha_grid();
  c.snr_grid_db = default_snr_grid();
  c.sweep.grid = c.alpha_grid;
  return c;
}

ParsedConfig parse_config_text(const std::string& text, const std::vector<std::string>& overrides) {
  RawMap raw = read_ini_text(text);
  for (const auto& o : overrides) apply_override(raw, o);
  return resolve(raw);
}

ParsedConfig parse_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::string text;
  if (!path.empty()) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read configuration file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  return parse_config_text(text, overrides);
}

std::string format_resolved_config(const ParsedConfig& cfg) {
  const SystemConfig& s = cfg.system;
  const SweepSpec& w = cfg.sweep;
  const SolverOptions& o = w.solver;
  std::ostringstream out;
  out << "[system]\n"
      << "N = " << s.N << "\nL = " << s.L << "\nG = " << s.G << "\nK = " << s.K << "\nU = " << s.U
      << "\nalpha = " << fmt(cfg.nominal_alpha)
      << "\nsigma2 = " << fmt(s.sigma2) << "\nq = " << fmt(s.q) << "\nbeta_star = " << fmt(s.beta_star)
      << "\ncaps = " << fmt_list(s.power_caps) << "\ncdma_channel = " << to_string(s.cdma_channel)
      << "\nofdma_channel = " << to_string(s.ofdma_channel) << "\nbandwidth_hz = " << fmt(s.bandwidth_hz)
      << "\n\n[sweep]\n"
      << "receiver = " << to_string(w.receiver) << "\ntrials = " << w.trials << "\nofdma_draws = " << w.ofdma_draws
      << "\nseed = " << w.seed << "\nlight_alpha = " << fmt(w.light_alpha) << "\nheavy_alpha = " << fmt(w.heavy_alpha)
      << "\nalpha_grid = " << fmt_list(cfg.alpha_grid) << "\nsnr_grid_db = " << fmt_list(cfg.snr_grid_db)
      << "\n\n[solver]\n"
      << "max_iterations = " << o.max_iterations << "\ngap_tolerance = " << fmt(o.gap_tolerance)
      << "\nstep_scale = " << fmt(o.step_scale) << "\ninitial_lambda = " << fmt(o.initial_lambda)
      << "\ninitial_delta = " << fmt(o.initial_delta) << "\ncheck_every = " << o.check_every << "\n";
  return out.str();
}

void write_resolved_config(const ParsedConfig& cfg, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << format_resolved_config(cfg);
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace refarm
