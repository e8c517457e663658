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

#include "refarm/csv.hpp"

#include <cstdio>
#include <fstream>

#include "refarm/errors.hpp"

namespace refarm {
namespace {

std::string fmt(double v) { return format_value(v); }
std::string fmt(std::size_t v) { return std::to_string(v); }

std::string db(double linear) { return linear > 0.0 ? fmt(linear_to_db(linear)) : "-inf"; }

void append_indexed(std::vector<std::string>& header, const std::string& prefix, std::size_t count) {
  for (std::size_t k = 0; k < count; ++k) header.push_back(prefix + std::to_string(k));
}

std::string regime_label(const std::optional<LoadRegime>& r) {
  return r ? std::string(to_string(*r)) : "configured";
}

}  // namespace

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string format_value(bool v) { return v ? "true" : "false"; }

std::string CsvTable::str() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out;
}

void write_csv(const CsvTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << table.str();
  out.flush();
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

CsvTable margin_table(const std::vector<MarginRow>& rows) {
  CsvTable t;
  t.header = {"receiver", "alpha", "receive_snr_db", "beta_star_db", "alpha_star", "margin", "feasible"};
  for (const auto& r : rows)
    t.rows.push_back({std::string(to_string(r.result.receiver)), fmt(r.alpha), fmt(r.receive_snr_db),
                      fmt(r.beta_star_db), fmt(r.result.alpha_star), fmt(r.result.margin),
                      format_value(r.result.feasible)});
  return t;
}

CsvTable sweep_table(const SweepResult& result) {
  CsvTable t;
  t.header = {"swept_parameter", "value", "receiver", "alpha", "receive_snr_db", "feasible", "margin",
              "ofdma_throughput", "mean_interference", "cdma_sinr_theory", "cdma_sinr_empirical_mean",
              "cdma_sinr_empirical_std", "cdma_sinr_theory_db", "cdma_sinr_empirical_db", "solver_iterations"};
  const std::string param(to_string(result.spec.swept_parameter));
  const std::string rx(to_string(result.spec.receiver));
  for (const auto& r : result.records)
    t.rows.push_back({param, fmt(r.value), rx, fmt(r.alpha), fmt(r.receive_snr_db), format_value(r.feasible),
                      fmt(r.margin), fmt(r.ofdma_throughput), fmt(r.mean_interference), fmt(r.cdma_sinr_theory),
                      fmt(r.cdma_sinr_empirical_mean), fmt(r.cdma_sinr_empirical_std), db(r.cdma_sinr_theory),
                      db(r.cdma_sinr_empirical_mean), fmt(r.solver_iterations)});
  return t;
}

CsvTable trace_table(const ConvergenceTrace& trace) {
  const std::size_t K = trace.problem.num_users();
  CsvTable t;
  t.header = {"regime", "iteration", "relative_gap", "delta"};
  append_indexed(t.header, "lambda_", K);
  t.header.insert(t.header.end(), {"throughput", "mean_interference", "margin"});
  append_indexed(t.header, "power_", K);
  append_indexed(t.header, "cap_", K);
  const std::string regime = regime_label(trace.regime);
  for (const auto& r : trace.result.trace) {
    std::vector<std::string> row = {regime, fmt(r.iteration), fmt(r.gap), fmt(r.delta)};
    for (double l : r.lambdas) row.push_back(fmt(l));
    row.insert(row.end(), {fmt(r.throughput), fmt(r.mean_interference), fmt(trace.problem.margin)});
    for (double p : r.user_powers) row.push_back(fmt(p));
    for (double c : trace.problem.power_caps) row.push_back(fmt(c));
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable snapshot_table(const AllocationSnapshot& snapshot) {
  const std::size_t K = snapshot.problem.num_users();
  CsvTable t;
  t.header = {"regime", "subcarrier", "owner", "power", "owner_gain", "received_power"};
  append_indexed(t.header, "gain_", K);
  const std::string regime = regime_label(snapshot.regime);
  for (const auto& r : snapshot.rows) {
    std::vector<std::string> row = {regime, fmt(r.subcarrier), std::to_string(r.owner), fmt(r.power),
                                    fmt(r.owner_gain), fmt(r.power * r.owner_gain)};
    for (double g : r.gains) row.push_back(fmt(g));
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable allocation_summary_table(const AllocationProblem& problem, const P1Result& result) {
  const std::size_t K = problem.num_users();
  CsvTable t;
  t.header = {"throughput", "dual_bound", "relative_gap", "converged", "iterations", "delta"};
  append_indexed(t.header, "lambda_", K);
  t.header.insert(t.header.end(), {"mean_interference", "margin"});
  append_indexed(t.header, "power_", K);
  append_indexed(t.header, "cap_", K);
  std::vector<std::string> row = {fmt(result.throughput),   fmt(result.dual_bound),
                                  fmt(result.relative_gap), format_value(result.converged),
                                  fmt(result.state.iteration), fmt(result.state.delta)};
  for (double l : result.state.lambdas) row.push_back(fmt(l));
  row.insert(row.end(), {fmt(result.allocation.mean_interference(problem.gains)), fmt(problem.margin)});
  for (std::size_t k = 0; k < K; ++k) row.push_back(fmt(result.allocation.user_power(k)));
  for (double c : problem.power_caps) row.push_back(fmt(c));
  t.rows.push_back(std::move(row));
  return t;
}

CsvTable validation_table(const std::vector<ValidationRow>& rows) {
  CsvTable t;
  t.header = {"receiver",      "channel_model",     "N",
              "U",             "trials",            "empirical_mean",
              "empirical_std", "per_user_cv",       "theory_channel",
              "theory_uniform", "rel_error_channel", "rel_error_uniform",
              "std_over_mean"};
  for (const auto& r : rows)
    t.rows.push_back({std::string(to_string(r.receiver)), std::string(to_string(r.model)), fmt(r.N), fmt(r.U),
                      fmt(r.trials), fmt(r.empirical_mean), fmt(r.empirical_std), fmt(r.per_user_cv),
                      fmt(r.theory_channel), fmt(r.theory_uniform), fmt(r.rel_error_channel),
                      fmt(r.rel_error_uniform), fmt(r.std_over_mean)});
  return t;
}

}  // namespace refarm
