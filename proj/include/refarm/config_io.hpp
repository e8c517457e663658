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

#include <filesystem>
#include <string>
#include <vector>

#include "refarm/config.hpp"
#include "refarm/experiments.hpp"

namespace refarm {

// Resolved run configuration. `sweep.fixed` mirrors `system`; the two grids
// are kept apart so one file can drive both sweep commands.
struct ParsedConfig {
  SystemConfig system = SystemConfig::defaults();
  SweepSpec sweep;
  std::vector<double> alpha_grid;
  std::vector<double> snr_grid_db;
  // Load as configured; system.U is its rounding to whole users.
  double nominal_alpha = 0.2;

  SweepSpec load_sweep() const;
  SweepSpec snr_sweep() const;

  bool operator==(const ParsedConfig&) const = default;
};

ParsedConfig default_config();

// INI text with sections [system], [sweep] and [solver]. Overrides are
// "key=value" or "section.key=value" and take precedence over the file; an
// override of q_db replaces q from the file and vice versa (likewise for
// beta_star/beta_star_db, caps/cap_db and U/alpha). U and alpha may
// appear together only if U = round(alpha N).
// Throws UnknownKey for unrecognized keys and InvalidParameter for malformed
// values or violated invariants.
ParsedConfig parse_config_text(const std::string& text, const std::vector<std::string>& overrides = {});
// An empty path means "no file". Throws IoError if the file cannot be read.
ParsedConfig parse_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

// Linear-unit INI that parses back to the identical configuration.
std::string format_resolved_config(const ParsedConfig& cfg);
void write_resolved_config(const ParsedConfig& cfg, const std::filesystem::path& path);

}  // namespace refarm
