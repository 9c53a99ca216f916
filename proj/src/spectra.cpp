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

#include "entspec/spectra.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>

namespace entspec {

namespace {

constexpr double kPi = std::numbers::pi;

double median_of(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

void require_delta(double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw std::invalid_argument("mean spacing must be positive and finite");
  }
}

// Least-squares polynomial fit of y against x, evaluated at x. The abscissa is
// mapped onto [-1, 1] to keep the Vandermonde matrix well conditioned.
std::vector<double> polyfit_eval(std::span<const double> x, std::span<const double> y,
                                 int degree) {
  const auto n = static_cast<Eigen::Index>(x.size());
  const double lo = x.front();
  const double hi = x.back();
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  Eigen::MatrixXd a(n, degree + 1);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = (x[static_cast<std::size_t>(i)] - mid) / half;
    double p = 1.0;
    for (int j = 0; j <= degree; ++j) {
      a(i, j) = p;
      p *= t;
    }
    b(i) = y[static_cast<std::size_t>(i)];
  }
  const Eigen::VectorXd coef = a.colPivHouseholderQr().solve(b);
  const Eigen::VectorXd fit = a * coef;
  return {fit.data(), fit.data() + n};
}

void fill_dropped(UnfoldedSpectrum& out, std::size_t d) {
  std::vector<char> used(d, 0);
  for (std::size_t k : out.kept) used[k] = 1;
  out.dropped.clear();
  for (std::size_t k = 0; k < d; ++k) {
    if (!used[k]) out.dropped.push_back(k);
  }
}

}  // namespace

RawSpectrum RawSpectrum::from_probs(std::span<const double> probs, std::string source) {
  RawSpectrum r;
  r.values.reserve(probs.size());
  for (double p : probs) r.values.push_back(std::sqrt(std::max(p, 0.0)));
  std::sort(r.values.begin(), r.values.end());
  r.source = std::move(source);
  return r;
}

void RawSpectrum::validate() const {
  if (values.empty()) throw std::invalid_argument("empty spectrum");
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!std::isfinite(values[k]) || values[k] < 0.0) {
      throw std::invalid_argument("spectrum values must be finite and nonnegative");
    }
    if (k && values[k] < values[k - 1]) {
      throw std::invalid_argument("spectrum values must be ascending");
    }
  }
}

std::string_view to_string(UnfoldMethod m) {
  return m == UnfoldMethod::Segmented ? "segmented" : "marchenko-pastur";
}

UnfoldMethod parse_unfold_method(std::string_view text) {
  if (text == "segmented") return UnfoldMethod::Segmented;
  if (text == "marchenko-pastur" || text == "mp") return UnfoldMethod::MarchenkoPastur;
  throw std::invalid_argument("unknown unfolding method '" + std::string(text) + "'");
}

std::size_t UnfoldedSpectrum::spacing_count() const {
  std::size_t n = 0;
  for (const auto& seg : segments) n += seg.size() > 0 ? seg.size() - 1 : 0;
  return n;
}

void SegmentedParams::validate() const {
  if (!(jump_factor > 1.0)) throw std::invalid_argument("jump factor must exceed 1");
  if (degree < 1) throw std::invalid_argument("polynomial degree must be >= 1");
  if (min_segment <= static_cast<std::size_t>(degree)) {
    throw std::invalid_argument("minimum segment length must exceed the polynomial degree");
  }
}

UnfoldedSpectrum unfold_segmented(const RawSpectrum& raw, const SegmentedParams& params) {
  params.validate();
  raw.validate();
  const auto& v = raw.values;
  const std::size_t d = v.size();
  if (d < params.min_segment) {
    throw std::invalid_argument("spectrum of " + std::to_string(d) +
                                " levels is shorter than the minimum segment");
  }

  UnfoldedSpectrum out;
  out.method = UnfoldMethod::Segmented;

  std::vector<double> positive;
  for (std::size_t k = 0; k + 1 < d; ++k) {
    const double g = v[k + 1] - v[k];
    if (g > 0.0) positive.push_back(g);
  }
  if (positive.empty()) {
    out.flagged = true;
    fill_dropped(out, d);
    return out;
  }
  const double threshold = params.jump_factor * median_of(positive);

  std::vector<double> index(d);
  std::iota(index.begin(), index.end(), 0.0);
  std::size_t begin = 0;
  for (std::size_t k = 1; k <= d; ++k) {
    if (k < d && v[k] - v[k - 1] <= threshold) continue;
    const std::size_t len = k - begin;
    if (len >= params.min_segment && v[k - 1] > v[begin]) {
      auto fit = polyfit_eval(std::span(v).subspan(begin, len),
                              std::span<const double>(index).subspan(begin, len), params.degree);
      // A fitted staircase is monotone in practice; sorting guards the rare
      // wiggle at a segment end.
      std::sort(fit.begin(), fit.end());
      const std::size_t at = out.s.size();
      out.s.insert(out.s.end(), fit.begin(), fit.end());
      for (std::size_t i = begin; i < k; ++i) out.kept.push_back(i);
      out.segments.push_back(Segment{at, at + len});
    }
    begin = k;
  }

  // Trim the extreme levels of the surviving spectrum.
  const std::size_t trim = std::min(params.edge_trim, out.s.size() / 2);
  if (trim > 0) {
    const std::size_t new_end = out.s.size() - trim;
    std::vector<Segment> segs;
    for (Segment seg : out.segments) {
      seg.begin = std::clamp(seg.begin, trim, new_end) - trim;
      seg.end = std::clamp(seg.end, trim, new_end) - trim;
      if (seg.size() > 0) segs.push_back(seg);
    }
    out.segments = std::move(segs);
    out.s = std::vector<double>(out.s.begin() + static_cast<std::ptrdiff_t>(trim),
                                out.s.begin() + static_cast<std::ptrdiff_t>(new_end));
    out.kept = std::vector<std::size_t>(out.kept.begin() + static_cast<std::ptrdiff_t>(trim),
                                        out.kept.begin() + static_cast<std::ptrdiff_t>(new_end));
  }
  out.flagged = out.s.empty();
  fill_dropped(out, d);
  return out;
}

std::string_view to_string(MpScaling v) { return v == MpScaling::Bulk ? "bulk" : "direct"; }

MpScaling parse_mp_scaling(std::string_view text) {
  if (text == "bulk") return MpScaling::Bulk;
  if (text == "direct") return MpScaling::Direct;
  throw std::invalid_argument("unknown MP scaling '" + std::string(text) + "'");
}

void MpParams::validate() const {
  if (!(p1 >= 0.0 && p1 < 1.0)) throw std::invalid_argument("p1 must lie in [0, 1)");
}

double mp_tail_fraction(double x) {
  if (!(x > 0.0)) return 1.0;
  if (x >= 1.0) return 0.0;
  return std::max(0.0, 1.0 - (2.0 / kPi) * (x * std::sqrt(1.0 - x * x) + std::asin(x)));
}

std::vector<double> mp_scaled(const RawSpectrum& raw, const MpParams& params) {
  params.validate();
  raw.validate();
  double z = 0.0;
  for (double l : raw.values) z += l * l;
  if (!(z > 0.0)) throw std::invalid_argument("spectrum has zero weight");
  const double d = static_cast<double>(raw.values.size());
  std::vector<double> x;
  x.reserve(raw.values.size());
  for (double l : raw.values) {
    if (params.scaling == MpScaling::Bulk) {
      x.push_back(std::sqrt(l * l * d / (4.0 * z * (1.0 - params.p1))));
    } else {
      x.push_back(l * l / z);
    }
  }
  return x;
}

UnfoldedSpectrum unfold_mp(const RawSpectrum& raw, const MpParams& params) {
  const auto x = mp_scaled(raw, params);
  const std::size_t d = x.size();
  UnfoldedSpectrum out;
  out.method = UnfoldMethod::MarchenkoPastur;
  std::vector<std::pair<double, std::size_t>> levels;
  levels.reserve(d);
  for (std::size_t k = 0; k < d; ++k) {
    if (x[k] * x[k] > 1.0 + 1e-9) ++out.out_of_range;
    levels.emplace_back(static_cast<double>(d) * mp_tail_fraction(x[k]), k);
  }
  std::sort(levels.begin(), levels.end());
  for (const auto& [s, k] : levels) {
    out.s.push_back(s);
    out.kept.push_back(k);
  }
  out.segments.push_back(Segment{0, d});
  return out;
}

double mp_staircase_r2(const RawSpectrum& raw, const MpParams& params) {
  const auto x = mp_scaled(raw, params);
  const std::size_t d = x.size();
  std::vector<double> emp(d);
  for (std::size_t k = 0; k < d; ++k) {
    emp[k] = (static_cast<double>(d - k) - 0.5) / static_cast<double>(d);
  }
  const double mean = std::accumulate(emp.begin(), emp.end(), 0.0) / static_cast<double>(d);
  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    const double r = emp[k] - mp_tail_fraction(x[k]);
    ss_res += r * r;
    ss_tot += (emp[k] - mean) * (emp[k] - mean);
  }
  if (!(ss_tot > 0.0)) throw std::invalid_argument("staircase needs at least two levels");
  return 1.0 - ss_res / ss_tot;
}

std::vector<double> pooled_spacings(std::span<const UnfoldedSpectrum> spectra) {
  std::vector<double> out;
  for (const auto& u : spectra) {
    for (const auto& seg : u.segments) {
      for (std::size_t j = seg.begin + 1; j < seg.end; ++j) out.push_back(u.s[j] - u.s[j - 1]);
    }
  }
  return out;
}

double SpacingHistogram::total_mass() const {
  double m = overflow;
  for (std::size_t i = 0; i < bins(); ++i) m += density[i] * width(i);
  return m;
}

SpacingHistogram histogram_spacings(std::span<const double> spacings, std::size_t bins,
                                    double range) {
  if (spacings.empty()) throw std::invalid_argument("no spacings to histogram");
  if (bins == 0) throw std::invalid_argument("histogram needs at least one bin");
  if (!(range > 0.0)) throw std::invalid_argument("histogram range must be positive");
  SpacingHistogram h;
  h.count = spacings.size();
  h.delta = std::accumulate(spacings.begin(), spacings.end(), 0.0) / static_cast<double>(h.count);
  require_delta(h.delta);
  const double top = range * h.delta;
  const double w = top / static_cast<double>(bins);
  h.edges.resize(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) h.edges[i] = w * static_cast<double>(i);
  h.edges[bins] = top;
  std::vector<std::size_t> counts(bins, 0);
  std::size_t over = 0;
  for (double s : spacings) {
    if (s < 0.0) throw std::invalid_argument("negative spacing");
    if (s >= top) {
      ++over;
      continue;
    }
    counts[std::min(bins - 1, static_cast<std::size_t>(s / w))]++;
  }
  const double total = static_cast<double>(h.count);
  h.density.resize(bins);
  for (std::size_t i = 0; i < bins; ++i) {
    h.density[i] = static_cast<double>(counts[i]) / (total * h.width(i));
  }
  h.overflow = static_cast<double>(over) / total;
  return h;
}

SpacingHistogram spacing_distribution(std::span<const UnfoldedSpectrum> spectra,
                                      std::size_t bins, double range) {
  const auto pool = pooled_spacings(spectra);
  return histogram_spacings(pool, bins, range);
}

std::string_view to_string(Family f) {
  switch (f) {
    case Family::Poisson:
      return "poisson";
    case Family::Goe:
      return "goe";
    case Family::SemiPoisson:
      return "semi_poisson";
  }
  return "?";
}

Family parse_family(std::string_view text) {
  if (text == "poisson") return Family::Poisson;
  if (text == "goe") return Family::Goe;
  if (text == "semi_poisson" || text == "semi-poisson") return Family::SemiPoisson;
  throw std::invalid_argument("unknown reference family '" + std::string(text) + "'");
}

double reference_pdf(Family f, double s, double delta) {
  require_delta(delta);
  if (s < 0.0) return 0.0;
  const double u = s / delta;
  switch (f) {
    case Family::Poisson:
      return std::exp(-u) / delta;
    case Family::Goe:
      return 0.5 * kPi * u * std::exp(-0.25 * kPi * u * u) / delta;
    case Family::SemiPoisson:
      return 4.0 * u * std::exp(-2.0 * u) / delta;
  }
  throw std::invalid_argument("unknown reference family");
}

double reference_cdf(Family f, double s, double delta) {
  require_delta(delta);
  if (s <= 0.0) return 0.0;
  const double u = s / delta;
  switch (f) {
    case Family::Poisson:
      return -std::expm1(-u);
    case Family::Goe:
      return -std::expm1(-0.25 * kPi * u * u);
    case Family::SemiPoisson:
      return 1.0 - (1.0 + 2.0 * u) * std::exp(-2.0 * u);
  }
  throw std::invalid_argument("unknown reference family");
}

std::vector<double> reference_curve(Family f, std::span<const double> grid, double delta) {
  std::vector<double> out;
  out.reserve(grid.size());
  for (double s : grid) out.push_back(reference_pdf(f, s, delta));
  return out;
}

FitDistance fit_distance(const SpacingHistogram& hist, Family f) {
  FitDistance d;
  double cdf = 0.0;
  double l2 = 0.0;
  for (std::size_t i = 0; i < hist.bins(); ++i) {
    const double w = hist.width(i);
    const double r = hist.density[i] - reference_pdf(f, hist.center(i), hist.delta);
    l2 += r * r * w;
    cdf += hist.density[i] * w;
    d.ks = std::max(d.ks, std::abs(cdf - reference_cdf(f, hist.edges[i + 1], hist.delta)));
  }
  d.l2 = std::sqrt(l2);
  return d;
}

Family closest_family(const SpacingHistogram& hist) {
  Family best = Family::Poisson;
  double best_ks = fit_distance(hist, best).ks;
  for (Family f : kFamilies) {
    const double ks = fit_distance(hist, f).ks;
    if (ks < best_ks) {
      best = f;
      best_ks = ks;
    }
  }
  return best;
}

double delta3_window(std::span<const double> levels, double lo, double hi) {
  const double len = hi - lo;
  if (!(len > 0.0)) throw std::invalid_argument("rigidity window must have positive length");
  const double c = 0.5 * (lo + hi);
  // N(S) counts levels <= S; the constant offset below the window is absorbed
  // by the fitted intercept.
  auto it = std::upper_bound(levels.begin(), levels.end(), lo);
  double prev = lo;
  double count = 0.0;
  double i0 = 0.0, i1 = 0.0, i2 = 0.0;
  auto step_to = [&](double next) {
    const double w = next - prev;
    const double a = prev - c;
    const double b = next - c;
    i0 += count * w;
    i1 += count * 0.5 * (b * b - a * a);
    i2 += count * count * w;
    prev = next;
  };
  for (; it != levels.end() && *it <= hi; ++it) {
    step_to(*it);
    count += 1.0;
  }
  step_to(hi);
  const double v = (i2 - i0 * i0 / len - 12.0 * i1 * i1 / (len * len * len)) / len;
  return std::max(v, 0.0);
}

RigidityCurve rigidity(std::span<const UnfoldedSpectrum> spectra, std::span<const double> L_grid,
                       double window_step) {
  if (!(window_step > 0.0)) throw std::invalid_argument("window step must be positive");
  const auto pool = pooled_spacings(spectra);
  if (pool.empty()) throw std::invalid_argument("no spacings for rigidity");
  RigidityCurve curve;
  curve.delta = std::accumulate(pool.begin(), pool.end(), 0.0) / static_cast<double>(pool.size());
  require_delta(curve.delta);
  const double step = window_step * curve.delta;
  for (double L : L_grid) {
    if (!(L > 0.0)) throw std::invalid_argument("rigidity window length must be positive");
    const double width = L * curve.delta;
    RigidityPoint pt;
    pt.L = L;
    double total = 0.0;
    for (const auto& u : spectra) {
      bool used = false;
      for (const auto& seg : u.segments) {
        if (seg.size() < 2) continue;
        const std::span<const double> lv(u.s.data() + seg.begin, seg.size());
        const double first = lv.front();
        const double last = lv.back();
        const double slack = 1e-9 * std::max(1.0, std::abs(last));
        for (double lo = first; lo + width <= last + slack; lo += step) {
          total += delta3_window(lv, lo, lo + width);
          ++pt.windows;
          used = true;
        }
      }
      if (used) ++pt.realizations;
    }
    if (pt.windows == 0) {
      throw std::invalid_argument("rigidity window L=" + format_double(L) +
                                  " is longer than every segment");
    }
    pt.delta3 = total / static_cast<double>(pt.windows);
    curve.points.push_back(pt);
  }
  return curve;
}

double reference_delta3(Family f, double L) {
  switch (f) {
    case Family::Poisson:
      return L / 15.0;
    case Family::Goe:
      return std::log(L) / (kPi * kPi) - 0.00696;
    case Family::SemiPoisson:
      return L / 30.0 + 1.0 / 16.0;
  }
  throw std::invalid_argument("unknown reference family");
}

double rigidity_distance(const RigidityCurve& curve, Family f) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& p : curve.points) {
    const double ref = reference_delta3(f, p.L);
    if (!(ref > 0.0)) continue;
    const double r = (p.delta3 - ref) / ref;
    sum += r * r;
    ++n;
  }
  if (n == 0) throw std::invalid_argument("no rigidity points with a positive reference");
  return std::sqrt(sum / static_cast<double>(n));
}

Family closest_rigidity_family(const RigidityCurve& curve) {
  Family best = Family::Poisson;
  double best_d = rigidity_distance(curve, best);
  for (Family f : kFamilies) {
    const double d = rigidity_distance(curve, f);
    if (d < best_d) {
      best = f;
      best_d = d;
    }
  }
  return best;
}

void write_histogram_csv(std::ostream& out, const SpacingHistogram& hist, const CsvMeta& meta) {
  CsvMeta m = meta;
  m.set("mean_spacing", hist.delta).set("spacings", hist.count).set("overflow", hist.overflow);
  m.write(out);
  out << "bin_center,density,reference_poisson,reference_goe,reference_semipoisson\n";
  for (std::size_t i = 0; i < hist.bins(); ++i) {
    const double c = hist.center(i);
    out << format_double(c) << ',' << format_double(hist.density[i]) << ','
        << format_double(reference_pdf(Family::Poisson, c, hist.delta)) << ','
        << format_double(reference_pdf(Family::Goe, c, hist.delta)) << ','
        << format_double(reference_pdf(Family::SemiPoisson, c, hist.delta)) << '\n';
  }
}

void write_rigidity_csv(std::ostream& out, const RigidityCurve& curve, const CsvMeta& meta) {
  CsvMeta m = meta;
  m.set("mean_spacing", curve.delta);
  m.write(out);
  out << "L,delta3,n_windows,reference_poisson,reference_goe\n";
  for (const auto& p : curve.points) {
    out << format_double(p.L) << ',' << format_double(p.delta3) << ',' << p.windows << ','
        << format_double(reference_delta3(Family::Poisson, p.L)) << ','
        << format_double(reference_delta3(Family::Goe, p.L)) << '\n';
  }
}

std::vector<LabelledSpectrum> read_spectrum_csv(std::istream& in, CsvMeta* meta) {
  CsvMeta m = CsvMeta::read(in);
  if (meta) *meta = m;
  std::string line;
  if (!std::getline(in, line) || line != "realization_id,n_A,k,p_k") {
    throw std::runtime_error("spectrum table: expected header realization_id,n_A,k,p_k");
  }
  std::vector<LabelledSpectrum> out;
  std::vector<double> probs;
  auto flush = [&] {
    if (out.empty() || probs.empty()) return;
    out.back().raw = RawSpectrum::from_probs(probs, out.back().realization_id);
    probs.clear();
  };
  std::size_t line_no = m.entries().size() + 2;
  for (; std::getline(in, line); ++line_no) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 4) {
      throw std::runtime_error("spectrum table line " + std::to_string(line_no) +
                               ": expected 4 fields");
    }
    unsigned n_a = 0;
    double p = 0.0;
    try {
      n_a = static_cast<unsigned>(std::stoul(f[1]));
      p = std::stod(f[3]);
    } catch (const std::exception&) {
      throw std::runtime_error("spectrum table line " + std::to_string(line_no) +
                               ": malformed number");
    }
    if (out.empty() || out.back().realization_id != f[0] || out.back().n_a != n_a) {
      flush();
      out.push_back(LabelledSpectrum{f[0], n_a, {}});
    }
    probs.push_back(p);
  }
  flush();
  return out;
}

void write_unfolded_csv(std::ostream& out, std::span<const UnfoldedSpectrum> spectra,
                        std::span<const std::string> ids, const CsvMeta& meta) {
  if (ids.size() != spectra.size()) throw std::invalid_argument("one id per spectrum required");
  meta.write(out);
  out << "realization_id,segment,k,s\n";
  for (std::size_t r = 0; r < spectra.size(); ++r) {
    const auto& u = spectra[r];
    for (std::size_t g = 0; g < u.segments.size(); ++g) {
      for (std::size_t j = u.segments[g].begin; j < u.segments[g].end; ++j) {
        out << ids[r] << ',' << g << ',' << u.kept[j] << ',' << format_double(u.s[j]) << '\n';
      }
    }
  }
}

}  // namespace entspec
