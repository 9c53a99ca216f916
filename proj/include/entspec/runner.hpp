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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "entspec/circuits.hpp"
#include "entspec/cooling.hpp"
#include "entspec/entangle.hpp"
#include "entspec/spectra.hpp"

namespace entspec {

enum class InitialState { RandomProduct, Chi1, Chi2 };

std::string_view to_string(InitialState s);
InitialState parse_initial_state(std::string_view text);

/// Default for the unfolding p1: the fraction of basis amplitudes equal to
/// the nonzero value. chi1 has half of them zero, chi2 has mean zero.
double default_mp_p1(InitialState s);

/**
 * Everything that determines a campaign's numbers.
 *
 * Text form is one `key = value` per line, '#' starting a comment. Keys are
 * the ones listed by keys(); unknown keys are an error.
 */
struct ExperimentConfig {
  std::string campaign = "campaign";
  unsigned n = 16;
  std::size_t heating_gates = 512;
  GateSet gate_set = GateSet::I3;
  VariantMode variant = VariantMode::Negated;
  InitialState initial_state = InitialState::RandomProduct;
  std::size_t realizations = 128;
  std::uint64_t seed = 1;
  unsigned workers = 0;  // 0: one per hardware thread

  // heat-cool
  bool cool = true;
  AnnealSchedule anneal;
  std::size_t cooling_sample = 100;  // S1 trajectory point every this many attempts
  bool record_heating = true;        // S1 at the middle cut after every gate
  bool keep_traces = false;          // per-realization cooling trace CSVs
  bool save_circuits = true;

  // spectrum
  UnfoldMethod unfold = UnfoldMethod::Segmented;
  SegmentedParams segmented;
  double mp_p1 = -1.0;  // negative: default_mp_p1(initial_state)
  MpScaling mp_scaling = MpScaling::Bulk;
  std::size_t bins = 50;
  double hist_range = 4.0;
  std::vector<double> rigidity_L = {5, 7.5, 10, 12.5, 15, 17.5, 20};
  double window_step = 0.5;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
  /// Sets one field from text; throws std::invalid_argument on unknown keys
  /// or malformed values.
  void set(std::string_view key, std::string_view value);
  static const std::vector<std::string>& keys();

  MpParams mp_params() const;
  unsigned effective_workers() const;

  /// Canonical text. `with_workers` = false leaves out the worker count, which
  /// never affects results.
  std::string to_text(bool with_workers = true) const;
  static ExperimentConfig parse(std::istream& in);
  static ExperimentConfig load(const std::filesystem::path& path);
};

/// Seed of realization `index`: derive_seed(master, index). Within a
/// realization, split(0) draws the initial state, split(1) the heating
/// circuit and split(2) drives cooling.
std::uint64_t realization_seed(const ExperimentConfig& config, std::size_t index);

StateVector make_initial_state(const ExperimentConfig& config, Rng& rng);

struct RealizationOutcome {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  Circuit heating;
  std::vector<double> heating_s1;  // after 0..M_h gates; empty unless recorded
  bool cooled = false;
  CoolingResult cooling;           // trace cleared unless keep_traces
  std::vector<double> cooling_s1;  // every cooling_sample attempts, held after the end
  bool verified = false;           // verify_reversal on successful runs
  EntanglementSpectrum spectrum;   // middle cut after heating (spectrum runs)
  UnfoldedSpectrum unfolded;
  double mp_r2 = 0.0;              // MP unfolding only
};

struct Trajectory {
  std::vector<std::size_t> x;
  std::vector<double> mean;
  std::vector<double> stderr_;
};

struct HeatCoolSummary {
  std::size_t successes = 0;
  std::size_t verified = 0;
  double mean_attempts = 0.0;   // over successful runs
  double ci95_attempts = 0.0;   // half-width
  double mean_final_s1 = 0.0;   // over all runs
  double min_final_s1 = 0.0;
};

struct SpectrumSummary {
  SpacingHistogram histogram;
  RigidityCurve rigidity;
  std::map<Family, FitDistance> fits;
  std::map<Family, double> rigidity_distances;
  double mean_mp_r2 = 0.0;
  std::size_t mp_out_of_range = 0;
  std::size_t flagged = 0;
};

struct RunRecord {
  std::string kind;  // "heat-cool" or "spectrum"
  ExperimentConfig config;
  std::vector<RealizationOutcome> outcomes;
  Trajectory heating;
  Trajectory cooling;
  HeatCoolSummary heat_cool;
  SpectrumSummary spectrum;
};

/// Called after each finished realization (from a worker thread, serialized).
using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

/// Heating with a per-gate S1 record, then cooling, for every realization.
RunRecord run_heat_cool(const ExperimentConfig& config, const ProgressFn& progress = {});

/// Heating, middle-cut spectrum, unfolding, pooled spacings and rigidity.
RunRecord run_spectrum_campaign(const ExperimentConfig& config, const ProgressFn& progress = {});

/// Runs `work(i)` for i in [0, count) on `workers` threads. Exceptions are
/// rethrown on the calling thread (the one with the lowest index wins).
void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(std::size_t)>& work,
                  const ProgressFn& progress = {});

Trajectory mean_trajectory(const std::vector<std::vector<double>>& rows, std::size_t stride = 1);

/// Spectrum analysis of already unfolded spectra; shared by the campaign and
/// the unfold/report commands.
SpectrumSummary summarize_spectra(std::span<const UnfoldedSpectrum> spectra,
                                  const ExperimentConfig& config);

UnfoldedSpectrum unfold_with(const RawSpectrum& raw, const ExperimentConfig& config);

/// Unfolds every spectrum of a spectrum table and writes <prefix>unfolded.csv,
/// histogram.csv, rigidity.csv and fit.csv into out_dir.
std::vector<std::filesystem::path> analyze_spectrum_file(const std::filesystem::path& spectra_csv,
                                                         const ExperimentConfig& analysis,
                                                         const std::filesystem::path& out_dir,
                                                         std::string_view prefix = {});

// Persistence -------------------------------------------------------------

/// Default parent directory for campaigns: $ENTSPEC_OUTPUT_ROOT, else "runs".
std::filesystem::path default_output_root();

/// Files are named <campaign>-v<version>-<name>.
std::string artifact_name(const ExperimentConfig& config, std::string_view name);

/// Writes the campaign directory and returns the path of its record file.
std::filesystem::path write_record(const RunRecord& record, const std::filesystem::path& dir);

/// Aggregate CSVs of a record, by artifact name, exactly as written to disk.
std::map<std::string, std::string> aggregate_files(const RunRecord& record);

struct RecordManifest {
  std::string kind;
  std::string version;
  std::string rng;
  ExperimentConfig config;
  std::vector<std::string> aggregates;
};

class VersionMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

RecordManifest read_manifest(const std::filesystem::path& record_path);

struct ReplayReport {
  RunRecord record;
  std::vector<std::string> matched;
  std::vector<std::string> mismatched;  // differing or missing on disk
  bool ok() const { return mismatched.empty(); }
};

/// Re-runs the stored configuration and byte-compares every aggregate CSV.
/// Throws VersionMismatch if the record was written by another version or
/// random stream algorithm.
ReplayReport replay(const std::filesystem::path& record_path, const ProgressFn& progress = {});

/// Rewrites plot tables from a stored record: trajectories subsampled by
/// `stride`; for spectrum records, histogram, rigidity and fit tables
/// recomputed from the stored spectra with `config`'s analysis settings.
std::vector<std::filesystem::path> report(const std::filesystem::path& record_path,
                                          const std::filesystem::path& out_dir,
                                          std::size_t stride,
                                          const ExperimentConfig* analysis = nullptr);

}  // namespace entspec
