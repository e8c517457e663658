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

// Command-line front end: parses the configuration, runs one experiment and
// writes its CSV tables plus the resolved configuration to --out.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "refarm/config_io.hpp"
#include "refarm/csv.hpp"
#include "refarm/errors.hpp"
#include "refarm/experiments.hpp"

namespace fs = std::filesystem;
using namespace refarm;

namespace {

enum ExitCode { kOk = 0, kOther = 1, kConfigError = 2, kNumericalFailure = 3, kIoError = 4 };

struct Options {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::vector<std::string> overrides;
  bool quiet = false;
};

class Runner {
 public:
  Runner(const Options& opts, ParsedConfig cfg) : opts_(opts), cfg_(std::move(cfg)) {}

  void emit(const CsvTable& table, const std::string& name) {
    const fs::path path = fs::path(opts_.out_dir) / name;
    write_csv(table, path);
    if (!opts_.quiet) std::cout << "wrote " << path.string() << " (" << table.rows.size() << " rows)\n";
  }

  void margin() {
    const SystemConfig& s = cfg_.system;
    const double alpha = cfg_.nominal_alpha;
    MarginRow row{alpha, linear_to_db(s.q / s.sigma2), linear_to_db(s.beta_star),
                  interference_margin(alpha, s.q, s.sigma2, s.beta_star, cfg_.sweep.receiver)};
    emit(margin_table({row}), "margin.csv");
  }

  void allocate() {
    const ConvergenceTrace run = run_allocation(spec());
    emit(snapshot_table(snapshot_of(run)), "allocation.csv");
    emit(allocation_summary_table(run.problem, run.result), "allocation_summary.csv");
  }

  void sweep_load() {
    emit(sweep_table(run_load_sweep(cfg_.load_sweep())),
         "sweep_load_" + std::string(to_string(cfg_.sweep.receiver)) + ".csv");
  }

  void sweep_snr() {
    emit(sweep_table(run_snr_sweep(cfg_.snr_sweep())),
         "sweep_snr_" + std::string(to_string(cfg_.sweep.receiver)) + ".csv");
  }

  void trace() {
    for (LoadRegime r : {LoadRegime::kLight, LoadRegime::kHeavy})
      emit(trace_table(run_convergence_trace(spec(), r)), "trace_" + std::string(to_string(r)) + ".csv");
  }

  void snapshot() {
    for (LoadRegime r : {LoadRegime::kLight, LoadRegime::kHeavy})
      emit(snapshot_table(run_allocation_snapshot(spec(), r)), "snapshot_" + std::string(to_string(r)) + ".csv");
  }

  void validate() { emit(validation_table(run_sinr_validation(spec(), cfg_.sweep.trials)), "validation.csv"); }

 private:
  SweepSpec spec() const {
    SweepSpec s = cfg_.sweep;
    s.fixed = cfg_.system;
    return s;
  }

  const Options& opts_;
  ParsedConfig cfg_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Underlay OFDMA/CDMA spectrum refarming experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  Options opts;
  app.add_option("--config", opts.config_path, "INI configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", opts.out_dir, "Output directory")->capture_default_str();
  app.add_option("--seed", opts.seed, "Master seed (default " + std::to_string(kDefaultSeed) + ")");
  app.add_option("--set", opts.overrides, "Override KEY=VALUE, repeatable")->take_all();
  app.add_option("--trials", opts.trials, "Monte Carlo trials per point");
  app.add_flag("--quiet", opts.quiet, "Suppress progress output");

  struct Command {
    const char* name;
    const char* help;
    void (Runner::*run)();
  };
  const Command commands[] = {
      {"margin", "Supportable load and interference margin", &Runner::margin},
      {"allocate", "Solve the allocation problem on one channel draw", &Runner::allocate},
      {"sweep-load", "Throughput and CDMA SINR versus CDMA load", &Runner::sweep_load},
      {"sweep-snr", "Throughput and CDMA SINR versus CDMA receive SNR", &Runner::sweep_snr},
      {"trace", "Dual solver convergence in the light and heavy regimes", &Runner::trace},
      {"snapshot", "Per-subcarrier allocation in the light and heavy regimes", &Runner::snapshot},
      {"validate", "Large-system SINR against finite-size simulation", &Runner::validate},
  };
  for (const auto& c : commands) app.add_subcommand(c.name, c.help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    std::vector<std::string> overrides = opts.overrides;
    if (opts.seed) overrides.push_back("sweep.seed=" + std::to_string(*opts.seed));
    if (opts.trials) overrides.push_back("sweep.trials=" + std::to_string(*opts.trials));
    ParsedConfig cfg = parse_config(opts.config_path, overrides);

    std::error_code ec;
    fs::create_directories(opts.out_dir, ec);
    if (ec) throw IoError("cannot create output directory '" + opts.out_dir + "': " + ec.message());
    write_resolved_config(cfg, fs::path(opts.out_dir) / "resolved_config.ini");

    Runner runner(opts, std::move(cfg));
    for (const auto& c : commands)
      if (app.got_subcommand(c.name)) (runner.*c.run)();
    return kOk;
  } catch (const InvalidParameter& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const DegenerateUser& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIoError;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kOther;
  }
}
