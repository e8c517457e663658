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

#include "refarm/asymptotics.hpp"
#include "refarm/experiments.hpp"

namespace refarm {

// Header plus rows of preformatted cells.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string str() const;
};

// 12 significant digits, shortest form.
std::string format_value(double v);
std::string format_value(bool v);

// Throws IoError when the file cannot be written.
void write_csv(const CsvTable& table, const std::filesystem::path& path);

struct MarginRow {
  double alpha = 0.0;
  double receive_snr_db = 0.0;
  double beta_star_db = 0.0;
  MarginResult result;
};

CsvTable margin_table(const std::vector<MarginRow>& rows);
CsvTable sweep_table(const SweepResult& result);
CsvTable trace_table(const ConvergenceTrace& trace);
CsvTable snapshot_table(const AllocationSnapshot& snapshot);
CsvTable allocation_summary_table(const AllocationProblem& problem, const P1Result& result);
CsvTable validation_table(const std::vector<ValidationRow>& rows);

}  // namespace refarm
