// Copyright 2026 The entspec Authors
//
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

// Command-line front end: heat-cool, spectrum, unfold, replay, report.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <unistd.h>

#include "entspec/runner.hpp"
#include "entspec/version.hpp"

namespace fs = std::filesystem;
using namespace entspec;

namespace {

// Config assembled from an optional file plus flag overrides.
struct ConfigArgs {
  std::string file;
  std::vector<std::string> sets;
  std::vector<std::pair<std::string, std::string>> flags;  // key, value
  std::string out;

  ExperimentConfig build(const ExperimentConfig& defaults) const {
    ExperimentConfig c = file.empty() ? defaults : ExperimentConfig::load(file);
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) {
        throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
      }
      c.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    for (const auto& [k, v] : flags) c.set(k, v);
    c.validate();
    return c;
  }
};

void add_config_options(CLI::App* app, ConfigArgs& args, bool with_out = true) {
  app->add_option("-c,--config", args.file, "key = value config file")->check(CLI::ExistingFile);
  app->add_option("--set", args.sets, "override one config key (key=value), repeatable");
  if (with_out) {
    app->add_option("-o,--out", args.out,
                    "output root (default $ENTSPEC_OUTPUT_ROOT or ./runs)");
  }
  // Shorthand flags for the common keys; each maps onto ExperimentConfig::set.
  const std::pair<const char*, const char*> shorthand[] = {
      {"--campaign", "campaign"},       {"--n", "n"},
      {"--gates", "heating_gates"},     {"--gate-set", "gate_set"},
      {"--variant", "variant"},         {"--initial-state", "initial_state"},
      {"--realizations", "realizations"}, {"--seed", "seed"},
      {"--workers", "workers"},         {"--max-attempts", "max_attempts"},
      {"--q", "q_objective"},           {"--unfold", "unfold"},
      {"--mp-p1", "mp_p1"},             {"--mp-scaling", "mp_scaling"},
  };
  for (const auto& [flag, key] : shorthand) {
    const std::string k = key;
    app->add_option_function<std::string>(
        flag, [&args, k](const std::string& v) { args.flags.emplace_back(k, v); },
        "config key " + k);
  }
}

void progress_line(std::size_t done, std::size_t total) {
  static const bool tty = isatty(fileno(stderr)) != 0;
  if (!tty) return;
  std::fprintf(stderr, "\r  %zu/%zu realizations", done, total);
  if (done == total) std::fputc('\n', stderr);
  std::fflush(stderr);
}

fs::path campaign_dir(const ConfigArgs& args, const ExperimentConfig& c) {
  const fs::path root = args.out.empty() ? default_output_root() : fs::path(args.out);
  return root / c.campaign;
}

int cmd_heat_cool(const ConfigArgs& args) {
  const ExperimentConfig c = args.build(ExperimentConfig{});
  std::cerr << "heat-cool " << c.campaign << ": " << c.realizations << " x n=" << c.n << ' '
            << to_string(c.gate_set) << " M_h=" << c.heating_gates << '\n';
  const RunRecord rec = run_heat_cool(c, progress_line);
  const fs::path record = write_record(rec, campaign_dir(args, c));
  if (c.cool) {
    const auto& s = rec.heat_cool;
    std::cout << "success " << s.successes << '/' << rec.outcomes.size() << "  verified "
              << s.verified << "  mean attempts (successful) " << s.mean_attempts << " +- "
              << s.ci95_attempts << "  mean final S1(mid) " << s.mean_final_s1 << '\n';
  }
  if (!rec.heating.mean.empty()) {
    std::cout << "heating: final mean S1(mid) " << rec.heating.mean.back() << '\n';
  }
  std::cout << "record " << record.string() << '\n';
  return 0;
}

int cmd_spectrum(const ConfigArgs& args) {
  ExperimentConfig defaults;
  defaults.realizations = 5000;
  const ExperimentConfig c = args.build(defaults);
  std::cerr << "spectrum " << c.campaign << ": " << c.realizations << " x n=" << c.n << ' '
            << to_string(c.gate_set) << ' ' << to_string(c.initial_state) << " unfold "
            << to_string(c.unfold) << '\n';
  const RunRecord rec = run_spectrum_campaign(c, progress_line);
  const fs::path record = write_record(rec, campaign_dir(args, c));
  const auto& s = rec.spectrum;
  for (Family f : kFamilies) {
    std::cout << to_string(f) << ": ks " << s.fits.at(f).ks << "  l2 " << s.fits.at(f).l2
              << "  rigidity " << s.rigidity_distances.at(f) << '\n';
  }
  std::cout << "closest: spacing " << to_string(closest_family(s.histogram)) << ", rigidity "
            << to_string(closest_rigidity_family(s.rigidity)) << '\n';
  std::cout << "record " << record.string() << '\n';
  return 0;
}

int cmd_unfold(const ConfigArgs& args, const std::string& input) {
  const ExperimentConfig c = args.build(ExperimentConfig{});
  const fs::path out = args.out.empty() ? fs::path(".") : fs::path(args.out);
  for (const auto& p : analyze_spectrum_file(input, c, out, c.campaign + "-")) {
    std::cout << p.string() << '\n';
  }
  return 0;
}

int cmd_replay(const std::string& record) {
  const ReplayReport rep = replay(record, progress_line);
  for (const auto& f : rep.matched) std::cout << "identical  " << f << '\n';
  for (const auto& f : rep.mismatched) std::cout << "MISMATCH   " << f << '\n';
  std::cout << (rep.ok() ? "replay ok\n" : "replay differs\n");
  return rep.ok() ? 0 : 2;
}

int cmd_report(const ConfigArgs& args, const std::string& record, std::size_t stride) {
  const fs::path out = args.out.empty() ? fs::path(record).parent_path() : fs::path(args.out);
  std::optional<ExperimentConfig> analysis;
  if (!args.file.empty() || !args.sets.empty() || !args.flags.empty()) {
    analysis = args.build(read_manifest(record).config);
  }
  for (const auto& p : report(record, out, stride, analysis ? &*analysis : nullptr)) {
    std::cout << p.string() << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entanglement heating, cooling and spectrum statistics of reversible circuits"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  ConfigArgs hc_args, sp_args, un_args, rp_args;
  auto* hc = app.add_subcommand("heat-cool", "heat random states, then try to cool them back");
  add_config_options(hc, hc_args);

  auto* sp = app.add_subcommand("spectrum", "entanglement spectrum statistics after heating");
  add_config_options(sp, sp_args);

  std::string unfold_in;
  auto* un = app.add_subcommand("unfold", "unfold a spectrum table and compute its statistics");
  un->add_option("input", unfold_in, "spectrum CSV (realization_id,n_A,k,p_k)")
      ->required()
      ->check(CLI::ExistingFile);
  add_config_options(un, un_args);

  std::string replay_record;
  auto* re = app.add_subcommand("replay", "re-run a stored record and compare its tables");
  re->add_option("record", replay_record, "record file (*-record.txt)")
      ->required()
      ->check(CLI::ExistingFile);

  std::string report_record;
  std::size_t stride = 1;
  auto* rp = app.add_subcommand("report", "regenerate plot tables from a stored record");
  rp->add_option("record", report_record, "record file (*-record.txt)")
      ->required()
      ->check(CLI::ExistingFile);
  rp->add_option("--stride", stride, "keep every stride-th trajectory point")
      ->check(CLI::PositiveNumber);
  add_config_options(rp, rp_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*hc) return cmd_heat_cool(hc_args);
    if (*sp) return cmd_spectrum(sp_args);
    if (*un) return cmd_unfold(un_args, unfold_in);
    if (*re) return cmd_replay(replay_record);
    if (*rp) return cmd_report(rp_args, report_record, stride);
  } catch (const VersionMismatch& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
