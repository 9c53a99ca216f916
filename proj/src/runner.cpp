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

#include "entspec/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <istream>
#include <limits>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include "entspec/csv.hpp"
#include "entspec/version.hpp"

namespace entspec {

namespace fs = std::filesystem;

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw std::invalid_argument("config: bad value '" + std::string(value) + "' for " +
                              std::string(key));
}

template <class T>
T parse_number(std::string_view key, std::string_view text) {
  T v{};
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{} || res.ptr != last) bad_value(key, text);
  return v;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  bad_value(key, text);
}

std::vector<double> parse_list(std::string_view key, std::string_view text) {
  std::vector<double> out;
  for (const auto& part : split_csv_line(std::string(text))) {
    const auto t = trim(part);
    if (t.empty()) bad_value(key, text);
    out.push_back(parse_number<double>(key, t));
  }
  return out;
}

std::string join_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += format_double(v[i]);
  }
  return s;
}

std::string bool_text(bool b) { return b ? "true" : "false"; }

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CsvMeta base_meta(const std::string& kind, const ExperimentConfig& c) {
  CsvMeta m;
  m.set("kind", kind)
      .set("campaign", c.campaign)
      .set("n", c.n)
      .set("heating_gates", c.heating_gates)
      .set("gate_set", std::string(to_string(c.gate_set)))
      .set("variant", std::string(to_string(c.variant)))
      .set("initial_state", std::string(to_string(c.initial_state)))
      .set("realizations", c.realizations)
      .set("seed", static_cast<unsigned long long>(c.seed))
      .set("rng", std::string(kRngAlgorithm));
  return m;
}

CsvMeta spectrum_meta(const ExperimentConfig& c, CsvMeta m) {
  m.set("unfolded_quantity", std::string("singular value lambda = sqrt(p)"))
      .set("unfold", std::string(to_string(c.unfold)));
  if (c.unfold == UnfoldMethod::Segmented) {
    m.set("jump_factor", c.segmented.jump_factor)
        .set("min_segment", c.segmented.min_segment)
        .set("degree", c.segmented.degree)
        .set("edge_trim", c.segmented.edge_trim);
  } else {
    m.set("mp_p1", c.mp_params().p1).set("mp_scaling", std::string(to_string(c.mp_scaling)));
  }
  m.set("bins", c.bins)
      .set("hist_range", c.hist_range)
      .set("rigidity_L", join_list(c.rigidity_L))
      .set("window_step", c.window_step);
  return m;
}

void write_trajectory(std::ostream& out, const Trajectory& t, std::string_view xname,
                      const CsvMeta& meta) {
  meta.write(out);
  out << xname << ",mean_S1,stderr_S1\n";
  for (std::size_t i = 0; i < t.x.size(); ++i) {
    out << t.x[i] << ',' << format_double(t.mean[i]) << ',' << format_double(t.stderr_[i])
        << '\n';
  }
}

std::string fit_table(const SpectrumSummary& s, const CsvMeta& meta) {
  std::ostringstream out;
  meta.write(out);
  out << "family,ks,l2,rigidity_distance\n";
  for (Family f : kFamilies) {
    const auto& d = s.fits.at(f);
    out << to_string(f) << ',' << format_double(d.ks) << ',' << format_double(d.l2) << ','
        << format_double(s.rigidity_distances.at(f)) << '\n';
  }
  return out.str();
}

std::string summary_table(const std::vector<std::pair<std::string, std::string>>& rows,
                          const CsvMeta& meta) {
  std::ostringstream out;
  meta.write(out);
  out << "metric,value\n";
  for (const auto& [k, v] : rows) out << k << ',' << v << '\n';
  return out.str();
}

std::string realization_id(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "r%05zu", index);
  return buf;
}

Circuit heat(StateVector& state, const ExperimentConfig& config, Rng& rng,
             std::vector<double>* s1) {
  Circuit c = sample_circuit(config.gate_set, config.n, config.heating_gates, config.variant, rng);
  if (!s1) {
    apply_circuit(state, c);
    return c;
  }
  const unsigned mid = config.n / 2;
  s1->reserve(c.size() + 1);
  double cur = cut_entropy(state, mid, 1);
  s1->push_back(cur);
  for (const auto& g : c.ops) {
    apply_gate(state, g);
    // Only a gate straddling the middle cut can change its spectrum.
    if (g.min_qubit() < mid && mid <= g.max_qubit()) cur = cut_entropy(state, mid, 1);
    s1->push_back(cur);
  }
  return c;
}

}  // namespace

std::string_view to_string(InitialState s) {
  switch (s) {
    case InitialState::RandomProduct:
      return "random-product";
    case InitialState::Chi1:
      return "chi1";
    case InitialState::Chi2:
      return "chi2";
  }
  return "?";
}

InitialState parse_initial_state(std::string_view text) {
  if (text == "random-product" || text == "random") return InitialState::RandomProduct;
  if (text == "chi1") return InitialState::Chi1;
  if (text == "chi2") return InitialState::Chi2;
  throw std::invalid_argument("unknown initial state '" + std::string(text) + "'");
}

double default_mp_p1(InitialState s) { return s == InitialState::Chi1 ? 0.5 : 0.0; }

const std::vector<std::string>& ExperimentConfig::keys() {
  static const std::vector<std::string> k = {
      "campaign",     "n",           "heating_gates",  "gate_set",      "variant",
      "initial_state", "realizations", "seed",         "workers",       "cool",
      "t0",           "alpha",       "max_attempts",   "q_objective",   "cooling_sample",
      "record_heating", "keep_traces", "save_circuits", "unfold",       "jump_factor",
      "min_segment",  "degree",      "edge_trim",      "mp_p1",         "mp_scaling",
      "bins",         "hist_range",  "rigidity_L",     "window_step"};
  return k;
}

void ExperimentConfig::set(std::string_view key, std::string_view raw) {
  const std::string value = trim(raw);
  const std::string_view v = value;
  auto enum_value = [&](auto parse) {
    try {
      return parse(v);
    } catch (const std::invalid_argument&) {
      bad_value(key, v);
    }
  };
  if (key == "campaign") {
    campaign = value;
  } else if (key == "n") {
    n = parse_number<unsigned>(key, v);
  } else if (key == "heating_gates") {
    heating_gates = parse_number<std::size_t>(key, v);
  } else if (key == "gate_set") {
    gate_set = enum_value(parse_gate_set);
  } else if (key == "variant") {
    variant = enum_value(parse_variant_mode);
  } else if (key == "initial_state") {
    initial_state = enum_value(parse_initial_state);
  } else if (key == "realizations") {
    realizations = parse_number<std::size_t>(key, v);
  } else if (key == "seed") {
    seed = parse_number<std::uint64_t>(key, v);
  } else if (key == "workers") {
    workers = parse_number<unsigned>(key, v);
  } else if (key == "cool") {
    cool = parse_bool(key, v);
  } else if (key == "t0") {
    anneal.t0 = parse_number<double>(key, v);
  } else if (key == "alpha") {
    anneal.alpha = parse_number<double>(key, v);
  } else if (key == "max_attempts") {
    anneal.max_attempts = parse_number<std::size_t>(key, v);
  } else if (key == "q_objective") {
    anneal.q_objective = parse_number<int>(key, v);
  } else if (key == "cooling_sample") {
    cooling_sample = parse_number<std::size_t>(key, v);
  } else if (key == "record_heating") {
    record_heating = parse_bool(key, v);
  } else if (key == "keep_traces") {
    keep_traces = parse_bool(key, v);
  } else if (key == "save_circuits") {
    save_circuits = parse_bool(key, v);
  } else if (key == "unfold") {
    unfold = enum_value(parse_unfold_method);
  } else if (key == "jump_factor") {
    segmented.jump_factor = parse_number<double>(key, v);
  } else if (key == "min_segment") {
    segmented.min_segment = parse_number<std::size_t>(key, v);
  } else if (key == "degree") {
    segmented.degree = parse_number<int>(key, v);
  } else if (key == "edge_trim") {
    segmented.edge_trim = parse_number<std::size_t>(key, v);
  } else if (key == "mp_p1") {
    mp_p1 = v == "auto" ? -1.0 : parse_number<double>(key, v);
  } else if (key == "mp_scaling") {
    mp_scaling = enum_value(parse_mp_scaling);
  } else if (key == "bins") {
    bins = parse_number<std::size_t>(key, v);
  } else if (key == "hist_range") {
    hist_range = parse_number<double>(key, v);
  } else if (key == "rigidity_L") {
    rigidity_L = parse_list(key, v);
  } else if (key == "window_step") {
    window_step = parse_number<double>(key, v);
  } else {
    throw std::invalid_argument("config: unknown key '" + std::string(key) + "'");
  }
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("config: " + what); };
  if (campaign.empty()) fail("campaign name is empty");
  for (char c : campaign) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_' && c != '.') {
      fail("campaign name may only hold letters, digits, '-', '_' and '.'");
    }
  }
  if (n < 2 || n > kMaxQubits) fail("n must lie in [2, " + std::to_string(kMaxQubits) + "]");
  if (n < max_arity(gate_set)) fail("n too small for gate set " + std::string(to_string(gate_set)));
  if (realizations < 1) fail("realizations must be >= 1");
  try {
    anneal.validate();
    segmented.validate();
    mp_params().validate();
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  if (cooling_sample < 1) fail("cooling_sample must be >= 1");
  if (bins < 1) fail("bins must be >= 1");
  if (!(hist_range > 0.0)) fail("hist_range must be positive");
  if (rigidity_L.empty()) fail("rigidity_L is empty");
  for (double L : rigidity_L) {
    if (!(L > 0.0)) fail("rigidity_L entries must be positive");
  }
  if (!(window_step > 0.0)) fail("window_step must be positive");
}

MpParams ExperimentConfig::mp_params() const {
  MpParams p;
  p.p1 = mp_p1 < 0.0 ? default_mp_p1(initial_state) : mp_p1;
  p.scaling = mp_scaling;
  return p;
}

unsigned ExperimentConfig::effective_workers() const {
  if (workers > 0) return workers;
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string ExperimentConfig::to_text(bool with_workers) const {
  std::ostringstream out;
  auto kv = [&](std::string_view k, const std::string& v) { out << k << " = " << v << '\n'; };
  kv("campaign", campaign);
  kv("n", std::to_string(n));
  kv("heating_gates", std::to_string(heating_gates));
  kv("gate_set", std::string(to_string(gate_set)));
  kv("variant", std::string(to_string(variant)));
  kv("initial_state", std::string(to_string(initial_state)));
  kv("realizations", std::to_string(realizations));
  kv("seed", std::to_string(seed));
  if (with_workers) kv("workers", std::to_string(workers));
  kv("cool", bool_text(cool));
  kv("t0", format_double(anneal.t0));
  kv("alpha", format_double(anneal.alpha));
  kv("max_attempts", std::to_string(anneal.max_attempts));
  kv("q_objective", std::to_string(anneal.q_objective));
  kv("cooling_sample", std::to_string(cooling_sample));
  kv("record_heating", bool_text(record_heating));
  kv("keep_traces", bool_text(keep_traces));
  kv("save_circuits", bool_text(save_circuits));
  kv("unfold", std::string(to_string(unfold)));
  kv("jump_factor", format_double(segmented.jump_factor));
  kv("min_segment", std::to_string(segmented.min_segment));
  kv("degree", std::to_string(segmented.degree));
  kv("edge_trim", std::to_string(segmented.edge_trim));
  kv("mp_p1", mp_p1 < 0.0 ? std::string("auto") : format_double(mp_p1));
  kv("mp_scaling", std::string(to_string(mp_scaling)));
  kv("bins", std::to_string(bins));
  kv("hist_range", format_double(hist_range));
  kv("rigidity_L", join_list(rigidity_L));
  kv("window_step", format_double(window_step));
  return out.str();
}

ExperimentConfig ExperimentConfig::parse(std::istream& in) {
  ExperimentConfig c;
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    const auto hash = line.find('#');
    const std::string body = trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key = value");
    }
    try {
      c.set(trim(std::string_view(body).substr(0, eq)), std::string_view(body).substr(eq + 1));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return c;
}

ExperimentConfig ExperimentConfig::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config " + path.string());
  return parse(in);
}

std::uint64_t realization_seed(const ExperimentConfig& config, std::size_t index) {
  return derive_seed(config.seed, index);
}

StateVector make_initial_state(const ExperimentConfig& config, Rng& rng) {
  switch (config.initial_state) {
    case InitialState::RandomProduct:
      return init_product(sample_random_product(config.n, rng));
    case InitialState::Chi1:
      return make_chi_state(1, config.n);
    case InitialState::Chi2:
      return make_chi_state(2, config.n);
  }
  throw std::invalid_argument("unknown initial state");
}

void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(std::size_t)>& work, const ProgressFn& progress) {
  std::mutex mu;
  std::size_t done = 0;
  auto finished = [&] {
    if (!progress) return;
    std::lock_guard lock(mu);
    progress(++done, count);
  };
  const auto threads = static_cast<std::size_t>(std::max(1u, workers));
  if (threads == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) {
      work(i);
      finished();
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::size_t error_index = std::numeric_limits<std::size_t>::max();
  auto loop = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        work(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
        continue;
      }
      finished();
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < std::min(threads, count); ++t) pool.emplace_back(loop);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

Trajectory mean_trajectory(const std::vector<std::vector<double>>& rows, std::size_t stride) {
  Trajectory t;
  if (rows.empty()) return t;
  const std::size_t len = rows.front().size();
  for (const auto& r : rows) {
    if (r.size() != len) throw std::invalid_argument("trajectories differ in length");
  }
  const double k = static_cast<double>(rows.size());
  for (std::size_t i = 0; i < len; ++i) {
    double sum = 0.0;
    for (const auto& r : rows) sum += r[i];
    const double mean = sum / k;
    double ss = 0.0;
    for (const auto& r : rows) ss += (r[i] - mean) * (r[i] - mean);
    t.x.push_back(i * stride);
    t.mean.push_back(mean);
    t.stderr_.push_back(rows.size() > 1 ? std::sqrt(ss / (k - 1.0) / k) : 0.0);
  }
  return t;
}

UnfoldedSpectrum unfold_with(const RawSpectrum& raw, const ExperimentConfig& config) {
  if (config.unfold == UnfoldMethod::Segmented) return unfold_segmented(raw, config.segmented);
  return unfold_mp(raw, config.mp_params());
}

SpectrumSummary summarize_spectra(std::span<const UnfoldedSpectrum> spectra,
                                  const ExperimentConfig& config) {
  SpectrumSummary s;
  for (const auto& u : spectra) {
    if (u.flagged) ++s.flagged;
    s.mp_out_of_range += u.out_of_range;
  }
  s.histogram = spacing_distribution(spectra, config.bins, config.hist_range);
  s.rigidity = rigidity(spectra, config.rigidity_L, config.window_step);
  for (Family f : kFamilies) {
    s.fits[f] = fit_distance(s.histogram, f);
    s.rigidity_distances[f] = rigidity_distance(s.rigidity, f);
  }
  return s;
}

RunRecord run_heat_cool(const ExperimentConfig& config, const ProgressFn& progress) {
  config.validate();
  RunRecord rec;
  rec.kind = "heat-cool";
  rec.config = config;
  rec.outcomes.resize(config.realizations);
  const std::size_t stride = config.cooling_sample;
  const std::size_t samples = (config.anneal.max_attempts + stride - 1) / stride;

  parallel_for(
      config.realizations, config.effective_workers(),
      [&](std::size_t r) {
        RealizationOutcome& o = rec.outcomes[r];
        o.index = r;
        o.seed = realization_seed(config, r);
        const Rng base(o.seed);
        Rng init_rng = base.split(0);
        Rng heat_rng = base.split(1);
        Rng cool_rng = base.split(2);
        StateVector state = make_initial_state(config, init_rng);
        const StateVector initial = state;
        o.heating = heat(state, config, heat_rng, config.record_heating ? &o.heating_s1 : nullptr);
        if (!config.cool) return;
        CoolingOptions opts;
        opts.variant = config.variant;
        opts.s1_stride = stride;
        opts.keep_trace = true;
        o.cooled = true;
        const double s1_start = cut_entropy(state, config.n / 2, 1);
        o.cooling = cool(state, config.gate_set, config.anneal, cool_rng, opts);
        o.cooling_s1.assign(samples + 1, o.cooling.final_s1_mid);
        o.cooling_s1[0] = s1_start;
        for (const auto& e : o.cooling.trace) {
          if ((e.attempt + 1) % stride == 0 && !std::isnan(e.s1_mid)) {
            o.cooling_s1[(e.attempt + 1) / stride] = e.s1_mid;
          }
        }
        if (o.cooling.success) o.verified = verify_reversal(initial, o.heating, o.cooling);
        if (!config.keep_traces) {
          o.cooling.trace.clear();
          o.cooling.trace.shrink_to_fit();
        }
      },
      progress);

  if (config.record_heating) {
    std::vector<std::vector<double>> rows;
    for (const auto& o : rec.outcomes) rows.push_back(o.heating_s1);
    rec.heating = mean_trajectory(rows);
  }
  if (config.cool) {
    std::vector<std::vector<double>> rows;
    for (const auto& o : rec.outcomes) rows.push_back(o.cooling_s1);
    rec.cooling = mean_trajectory(rows, stride);
    auto& s = rec.heat_cool;
    std::vector<double> attempts;
    s.min_final_s1 = std::numeric_limits<double>::infinity();
    for (const auto& o : rec.outcomes) {
      if (o.cooling.success) {
        ++s.successes;
        attempts.push_back(static_cast<double>(o.cooling.attempts_used));
      }
      if (o.verified) ++s.verified;
      s.mean_final_s1 += o.cooling.final_s1_mid;
      s.min_final_s1 = std::min(s.min_final_s1, o.cooling.final_s1_mid);
    }
    s.mean_final_s1 /= static_cast<double>(rec.outcomes.size());
    if (!attempts.empty()) {
      const double k = static_cast<double>(attempts.size());
      s.mean_attempts = std::accumulate(attempts.begin(), attempts.end(), 0.0) / k;
      double ss = 0.0;
      for (double a : attempts) ss += (a - s.mean_attempts) * (a - s.mean_attempts);
      s.ci95_attempts = attempts.size() > 1 ? 1.96 * std::sqrt(ss / (k - 1.0) / k) : 0.0;
    }
  }
  return rec;
}

RunRecord run_spectrum_campaign(const ExperimentConfig& config, const ProgressFn& progress) {
  config.validate();
  RunRecord rec;
  rec.kind = "spectrum";
  rec.config = config;
  rec.outcomes.resize(config.realizations);
  const bool mp = config.unfold == UnfoldMethod::MarchenkoPastur;
  parallel_for(
      config.realizations, config.effective_workers(),
      [&](std::size_t r) {
        RealizationOutcome& o = rec.outcomes[r];
        o.index = r;
        o.seed = realization_seed(config, r);
        const Rng base(o.seed);
        Rng init_rng = base.split(0);
        Rng heat_rng = base.split(1);
        StateVector state = make_initial_state(config, init_rng);
        o.heating = heat(state, config, heat_rng, nullptr);
        o.spectrum = schmidt_spectrum(state, Bipartition::middle(config.n));
        const auto raw = RawSpectrum::from_probs(o.spectrum.probs, realization_id(r));
        o.unfolded = unfold_with(raw, config);
        if (mp) o.mp_r2 = mp_staircase_r2(raw, config.mp_params());
      },
      progress);

  std::vector<UnfoldedSpectrum> unfolded;
  unfolded.reserve(rec.outcomes.size());
  double r2 = 0.0;
  for (const auto& o : rec.outcomes) {
    unfolded.push_back(o.unfolded);
    r2 += o.mp_r2;
  }
  rec.spectrum = summarize_spectra(unfolded, config);
  if (mp) rec.spectrum.mean_mp_r2 = r2 / static_cast<double>(rec.outcomes.size());
  return rec;
}

fs::path default_output_root() {
  if (const char* env = std::getenv("ENTSPEC_OUTPUT_ROOT"); env && *env) return fs::path(env);
  return fs::path("runs");
}

std::string artifact_name(const ExperimentConfig& config, std::string_view name) {
  return config.campaign + "-v" + std::string(kVersion) + "-" + std::string(name);
}

std::map<std::string, std::string> aggregate_files(const RunRecord& rec) {
  const auto& c = rec.config;
  const CsvMeta meta = base_meta(rec.kind, c);
  std::map<std::string, std::string> files;
  if (rec.kind == "heat-cool") {
    CsvMeta cm = meta;
    cm.set("t0", c.anneal.t0)
        .set("alpha", c.anneal.alpha)
        .set("max_attempts", c.anneal.max_attempts)
        .set("q_objective", c.anneal.q_objective)
        .set("cooling_sample", c.cooling_sample);
    if (c.record_heating) {
      std::ostringstream out;
      write_trajectory(out, rec.heating, "gate", meta);
      files[artifact_name(c, "heating_s1.csv")] = out.str();
    }
    if (c.cool) {
      std::ostringstream traj;
      write_trajectory(traj, rec.cooling, "attempt", cm);
      files[artifact_name(c, "cooling_s1.csv")] = traj.str();

      std::ostringstream out;
      cm.write(out);
      out << "index,seed,success,attempts_used,accepted_ops,initial_objective,final_objective,"
             "final_S1_mid,verified\n";
      for (const auto& o : rec.outcomes) {
        out << o.index << ',' << o.seed << ',' << (o.cooling.success ? 1 : 0) << ','
            << o.cooling.attempts_used << ',' << o.cooling.accepted_ops.size() << ','
            << format_double(o.cooling.initial_objective) << ','
            << format_double(o.cooling.final_objective) << ','
            << format_double(o.cooling.final_s1_mid) << ',' << (o.verified ? 1 : 0) << '\n';
      }
      files[artifact_name(c, "realizations.csv")] = out.str();

      const auto& s = rec.heat_cool;
      files[artifact_name(c, "summary.csv")] = summary_table(
          {{"realizations", std::to_string(rec.outcomes.size())},
           {"successes", std::to_string(s.successes)},
           {"verified", std::to_string(s.verified)},
           {"mean_attempts_successful", format_double(s.mean_attempts)},
           {"ci95_attempts_successful", format_double(s.ci95_attempts)},
           {"mean_final_S1_mid", format_double(s.mean_final_s1)},
           {"min_final_S1_mid", format_double(s.min_final_s1)}},
          cm);
    }
  } else {
    const CsvMeta sm = spectrum_meta(c, meta);
    {
      std::ostringstream out;
      meta.write(out);
      write_spectrum_header(out);
      for (const auto& o : rec.outcomes) {
        write_spectrum_rows(out, realization_id(o.index), c.n / 2, o.spectrum);
      }
      files[artifact_name(c, "spectra.csv")] = out.str();
    }
    std::ostringstream hist;
    write_histogram_csv(hist, rec.spectrum.histogram, sm);
    files[artifact_name(c, "histogram.csv")] = hist.str();
    std::ostringstream rig;
    write_rigidity_csv(rig, rec.spectrum.rigidity, sm);
    files[artifact_name(c, "rigidity.csv")] = rig.str();
    files[artifact_name(c, "fit.csv")] = fit_table(rec.spectrum, sm);
    const auto& s = rec.spectrum;
    std::vector<std::pair<std::string, std::string>> rows = {
        {"realizations", std::to_string(rec.outcomes.size())},
        {"spacings", std::to_string(s.histogram.count)},
        {"mean_spacing", format_double(s.histogram.delta)},
        {"flagged", std::to_string(s.flagged)},
        {"closest_spacing_family", std::string(to_string(closest_family(s.histogram)))},
        {"closest_rigidity_family", std::string(to_string(closest_rigidity_family(s.rigidity)))}};
    if (c.unfold == UnfoldMethod::MarchenkoPastur) {
      rows.emplace_back("mean_mp_r2", format_double(s.mean_mp_r2));
      rows.emplace_back("mp_out_of_range", std::to_string(s.mp_out_of_range));
    }
    files[artifact_name(c, "summary.csv")] = summary_table(rows, sm);
  }
  return files;
}

fs::path write_record(const RunRecord& rec, const fs::path& dir) {
  const auto& c = rec.config;
  fs::create_directories(dir);
  const auto files = aggregate_files(rec);
  for (const auto& [name, content] : files) write_file(dir / name, content);
  write_file(dir / artifact_name(c, "config.txt"), c.to_text());

  if (c.save_circuits || c.keep_traces) {
    const fs::path rdir = dir / "realizations";
    fs::create_directories(rdir);
    for (const auto& o : rec.outcomes) {
      const std::string id = realization_id(o.index);
      if (c.save_circuits) {
        std::ostringstream h;
        write_circuit(h, o.heating);
        write_file(rdir / (id + "-heating.circuit"), h.str());
        if (o.cooled) {
          std::ostringstream a;
          write_circuit(a, o.cooling.accepted_ops);
          write_file(rdir / (id + "-cooling.circuit"), a.str());
        }
      }
      if (c.keep_traces && o.cooled) {
        std::ostringstream t;
        write_trace_csv(t, o.cooling);
        write_file(rdir / (id + "-trace.csv"), t.str());
      }
    }
  }

  std::ostringstream m;
  m << "kind = " << rec.kind << '\n'
    << "version = " << kVersion << '\n'
    << "rng = " << kRngAlgorithm << '\n';
  for (const auto& [name, content] : files) m << "aggregate = " << name << '\n';
  m << "[config]\n" << c.to_text();
  const fs::path record_path = dir / artifact_name(c, "record.txt");
  write_file(record_path, m.str());
  return record_path;
}

RecordManifest read_manifest(const fs::path& record_path) {
  std::istringstream in(read_file(record_path));
  RecordManifest m;
  std::string line;
  bool config_seen = false;
  while (std::getline(in, line)) {
    if (trim(line) == "[config]") {
      config_seen = true;
      break;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key == "kind") m.kind = value;
    else if (key == "version") m.version = value;
    else if (key == "rng") m.rng = value;
    else if (key == "aggregate") m.aggregates.push_back(value);
  }
  if (!config_seen || m.kind.empty() || m.version.empty()) {
    throw std::runtime_error("not a run record: " + record_path.string());
  }
  if (m.version != kVersion) {
    throw VersionMismatch("record " + record_path.string() + " was written by version " +
                          m.version + ", this is version " + std::string(kVersion));
  }
  if (m.rng != kRngAlgorithm) {
    throw VersionMismatch("record " + record_path.string() + " uses random streams '" + m.rng +
                          "', this build provides '" + std::string(kRngAlgorithm) + "'");
  }
  m.config = ExperimentConfig::parse(in);
  return m;
}

ReplayReport replay(const fs::path& record_path, const ProgressFn& progress) {
  const RecordManifest m = read_manifest(record_path);
  ReplayReport rep;
  if (m.kind == "heat-cool") {
    rep.record = run_heat_cool(m.config, progress);
  } else if (m.kind == "spectrum") {
    rep.record = run_spectrum_campaign(m.config, progress);
  } else {
    throw std::runtime_error("unknown record kind '" + m.kind + "'");
  }
  const auto files = aggregate_files(rep.record);
  const fs::path dir = record_path.parent_path();
  std::vector<std::string> names = m.aggregates;
  for (const auto& [name, content] : files) {
    if (std::find(names.begin(), names.end(), name) == names.end()) names.push_back(name);
  }
  for (const auto& name : names) {
    const auto it = files.find(name);
    const fs::path stored = dir / name;
    if (it == files.end() || !fs::exists(stored) || read_file(stored) != it->second) {
      rep.mismatched.push_back(name);
    } else {
      rep.matched.push_back(name);
    }
  }
  return rep;
}

namespace {

// Rows of a '#'-headed CSV table, header included as the first row.
std::vector<std::vector<std::string>> read_table(const fs::path& path, CsvMeta* meta) {
  std::istringstream in(read_file(path));
  const CsvMeta m = CsvMeta::read(in);
  if (meta) *meta = m;
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) rows.push_back(split_csv_line(line));
  }
  if (rows.empty()) throw std::runtime_error("empty table " + path.string());
  return rows;
}

fs::path subsample_table(const fs::path& in_path, const fs::path& out_path, std::size_t stride) {
  CsvMeta meta;
  const auto rows = read_table(in_path, &meta);
  meta.set("report_stride", stride);
  std::ostringstream out;
  meta.write(out);
  auto emit = [&](const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
    out << '\n';
  };
  emit(rows[0]);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if ((i - 1) % stride == 0 || i + 1 == rows.size()) emit(rows[i]);
  }
  write_file(out_path, out.str());
  return out_path;
}

}  // namespace

std::vector<fs::path> analyze_spectrum_file(const fs::path& spectra_csv,
                                            const ExperimentConfig& analysis,
                                            const fs::path& out_dir, std::string_view prefix) {
  std::ifstream in(spectra_csv);
  if (!in) throw std::runtime_error("cannot read " + spectra_csv.string());
  CsvMeta source_meta;
  const auto spectra = read_spectrum_csv(in, &source_meta);
  if (spectra.empty()) throw std::runtime_error("no spectra in " + spectra_csv.string());
  std::vector<UnfoldedSpectrum> unfolded;
  std::vector<std::string> ids;
  double r2 = 0.0;
  for (const auto& s : spectra) {
    unfolded.push_back(unfold_with(s.raw, analysis));
    ids.push_back(s.realization_id);
    if (analysis.unfold == UnfoldMethod::MarchenkoPastur) {
      r2 += mp_staircase_r2(s.raw, analysis.mp_params());
    }
  }
  const auto summary = summarize_spectra(unfolded, analysis);
  CsvMeta meta = spectrum_meta(analysis, CsvMeta{});
  meta.set("source", spectra_csv.filename().string()).set("spectra", spectra.size());
  if (analysis.unfold == UnfoldMethod::MarchenkoPastur) {
    meta.set("mean_mp_r2", r2 / static_cast<double>(spectra.size()));
  }
  fs::create_directories(out_dir);
  const std::string pre(prefix);
  std::vector<fs::path> written;
  auto emit = [&](const std::string& name, const std::string& content) {
    const fs::path p = out_dir / (pre + name);
    write_file(p, content);
    written.push_back(p);
  };
  std::ostringstream u, h, r;
  write_unfolded_csv(u, unfolded, ids, meta);
  emit("unfolded.csv", u.str());
  write_histogram_csv(h, summary.histogram, meta);
  emit("histogram.csv", h.str());
  write_rigidity_csv(r, summary.rigidity, meta);
  emit("rigidity.csv", r.str());
  emit("fit.csv", fit_table(summary, meta));
  return written;
}

std::vector<fs::path> report(const fs::path& record_path, const fs::path& out_dir,
                             std::size_t stride, const ExperimentConfig* analysis) {
  if (stride < 1) throw std::invalid_argument("report stride must be >= 1");
  const RecordManifest m = read_manifest(record_path);
  const fs::path dir = record_path.parent_path();
  fs::create_directories(out_dir);
  std::vector<fs::path> written;
  if (m.kind == "heat-cool") {
    for (const char* name : {"heating_s1.csv", "cooling_s1.csv"}) {
      const fs::path src = dir / artifact_name(m.config, name);
      if (!fs::exists(src)) continue;
      written.push_back(subsample_table(
          src, out_dir / artifact_name(m.config, std::string("report-") + name), stride));
    }
    return written;
  }
  ExperimentConfig a = analysis ? *analysis : m.config;
  a.campaign = m.config.campaign;
  a.initial_state = m.config.initial_state;
  return analyze_spectrum_file(dir / artifact_name(m.config, "spectra.csv"), a, out_dir,
                               artifact_name(m.config, "report-"));
}

}  // namespace entspec
