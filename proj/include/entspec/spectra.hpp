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
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "entspec/csv.hpp"

namespace entspec {

/// Ascending Schmidt singular values lambda_k = sqrt(p_k) of one cut.
struct RawSpectrum {
  std::vector<double> values;
  std::string source;  // free-form tag: realization, gate set, initial state

  /// Takes Schmidt probabilities in any order.
  static RawSpectrum from_probs(std::span<const double> probs, std::string source = {});
  void validate() const;
};

enum class UnfoldMethod { Segmented, MarchenkoPastur };

std::string_view to_string(UnfoldMethod m);
UnfoldMethod parse_unfold_method(std::string_view text);

/// Half-open range [begin, end) of UnfoldedSpectrum::s. Spacings are only
/// taken between levels of the same segment.
struct Segment {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
  bool operator==(const Segment&) const = default;
};

struct UnfoldedSpectrum {
  std::vector<double> s;              // ascending within each segment
  UnfoldMethod method = UnfoldMethod::Segmented;
  std::vector<std::size_t> kept;      // raw index of each entry of s
  std::vector<std::size_t> dropped;   // raw indices not in s, ascending
  std::vector<Segment> segments;
  bool flagged = false;               // nothing survived the segment rules
  std::size_t out_of_range = 0;       // MP only: levels clamped at x = 1

  std::size_t spacing_count() const;
};

struct SegmentedParams {
  double jump_factor = 10.0;   // split where a gap exceeds this x median gap
  std::size_t min_segment = 10;
  int degree = 3;
  std::size_t edge_trim = 5;   // levels dropped at each end of the spectrum

  void validate() const;
};

/**
 * Polynomial unfolding by segments.
 *
 * The spectrum is split at gaps larger than jump_factor times the median
 * nonzero gap. Each segment of at least min_segment levels gets its own
 * least-squares polynomial fit of the staircase index k against lambda_k and
 * s_k is the fitted value; shorter segments are dropped, and edge_trim levels
 * are removed from both ends of what remains. Throws if the spectrum has fewer
 * than min_segment levels.
 */
UnfoldedSpectrum unfold_segmented(const RawSpectrum& raw, const SegmentedParams& params = {});

/// How x_k is formed from lambda_k for the quarter-circle unfolding.
enum class MpScaling {
  Bulk,     // x^2 = lambda^2 d / (4 Z (1 - p1))
  Direct,   // x = lambda^2 / Z
};

std::string_view to_string(MpScaling v);
MpScaling parse_mp_scaling(std::string_view text);

struct MpParams {
  /// Fraction of amplitudes equal to the nonzero value W = 1. Zero for
  /// amplitude distributions with zero mean.
  double p1 = 0.5;
  MpScaling scaling = MpScaling::Bulk;

  void validate() const;
};

/// Fraction of quarter-circle singular values above x:
/// 1 - (2/pi) [x sqrt(1 - x^2) + asin x], with x clamped to [0, 1].
double mp_tail_fraction(double x);

/// x_k for every level of raw, unclamped, in the order of raw.values.
std::vector<double> mp_scaled(const RawSpectrum& raw, const MpParams& params);

/**
 * Unfolding with the analytic quarter-circle counting function, the same for
 * every realization. s = d * mp_tail_fraction(x_k), sorted ascending, so the
 * mean spacing is close to one. Levels with x^2 > 1 + 1e-9 are kept (clamped)
 * and counted in out_of_range.
 */
UnfoldedSpectrum unfold_mp(const RawSpectrum& raw, const MpParams& params);

/// Coefficient of determination of the empirical tail fraction (levels above
/// lambda_k) against mp_tail_fraction(x_k).
double mp_staircase_r2(const RawSpectrum& raw, const MpParams& params);

/// Spacings of consecutive levels inside segments, pooled in input order.
std::vector<double> pooled_spacings(std::span<const UnfoldedSpectrum> spectra);

struct SpacingHistogram {
  std::vector<double> edges;    // bins + 1 ascending edges starting at 0
  std::vector<double> density;  // count / (total * width)
  double overflow = 0.0;        // fraction of spacings at or beyond the last edge
  double delta = 0.0;           // mean spacing
  std::size_t count = 0;

  std::size_t bins() const { return density.size(); }
  double width(std::size_t i) const { return edges[i + 1] - edges[i]; }
  double center(std::size_t i) const { return 0.5 * (edges[i] + edges[i + 1]); }
  /// Area under the bars plus overflow; one by construction.
  double total_mass() const;
};

/// Histogram of spacings on [0, range * delta] with `bins` equal bins.
SpacingHistogram histogram_spacings(std::span<const double> spacings, std::size_t bins = 50,
                                    double range = 4.0);

SpacingHistogram spacing_distribution(std::span<const UnfoldedSpectrum> spectra,
                                      std::size_t bins = 50, double range = 4.0);

enum class Family { Poisson, Goe, SemiPoisson };

inline constexpr Family kFamilies[] = {Family::Poisson, Family::Goe, Family::SemiPoisson};

std::string_view to_string(Family f);
Family parse_family(std::string_view text);

/// Spacing densities with mean spacing delta:
///   Poisson       exp(-s/delta) / delta
///   GOE           (pi/2) (s/delta^2) exp(-pi s^2 / (4 delta^2))
///   semi-Poisson  (4 s/delta^2) exp(-2 s/delta)
double reference_pdf(Family f, double s, double delta);
double reference_cdf(Family f, double s, double delta);
std::vector<double> reference_curve(Family f, std::span<const double> grid, double delta);

struct FitDistance {
  double ks = 0.0;  // sup |F_hist - F_ref| over the bin edges
  double l2 = 0.0;  // sqrt(sum_i (density_i - pdf(center_i))^2 width_i)
};

FitDistance fit_distance(const SpacingHistogram& hist, Family f);

/// Family with the smallest KS distance.
Family closest_family(const SpacingHistogram& hist);

/// Delta_3 of one window [lo, hi] of the staircase of ascending `levels`:
/// min over a, b of (1/L) int (N(S) - a - b S)^2 dS, evaluated exactly.
double delta3_window(std::span<const double> levels, double lo, double hi);

struct RigidityPoint {
  double L = 0.0;       // in units of the mean spacing
  double delta3 = 0.0;  // mean over windows
  std::size_t windows = 0;
  std::size_t realizations = 0;  // spectra contributing at least one window
};

struct RigidityCurve {
  std::vector<RigidityPoint> points;
  double delta = 0.0;  // pooled mean spacing used to scale L
};

/**
 * Spectral rigidity averaged over window positions and spectra. Windows of
 * width L * delta are centred at steps of window_step * delta from the start
 * of each segment and must lie inside it. Throws if some L fits in no
 * segment.
 */
RigidityCurve rigidity(std::span<const UnfoldedSpectrum> spectra, std::span<const double> L_grid,
                       double window_step = 0.5);

/// Reference Delta_3(L), L in units of the mean spacing: L/15 (Poisson),
/// ln(L)/pi^2 - 0.00696 (GOE), L/30 + 1/16 (semi-Poisson).
double reference_delta3(Family f, double L);

/// Root mean square of (delta3 - ref) / ref over the curve points.
double rigidity_distance(const RigidityCurve& curve, Family f);
Family closest_rigidity_family(const RigidityCurve& curve);

/// Columns: bin_center,density,reference_poisson,reference_goe,reference_semipoisson
void write_histogram_csv(std::ostream& out, const SpacingHistogram& hist, const CsvMeta& meta);
/// Columns: L,delta3,n_windows,reference_poisson,reference_goe
void write_rigidity_csv(std::ostream& out, const RigidityCurve& curve, const CsvMeta& meta);

struct LabelledSpectrum {
  std::string realization_id;
  unsigned n_a = 0;
  RawSpectrum raw;
};

/// Reads the (realization_id, n_A, k, p_k) table written by
/// write_spectrum_rows, grouping consecutive rows with the same id and cut.
std::vector<LabelledSpectrum> read_spectrum_csv(std::istream& in, CsvMeta* meta = nullptr);

/// Columns: realization_id,segment,k,s (one row per kept level; `k` is the raw
/// index).
void write_unfolded_csv(std::ostream& out, std::span<const UnfoldedSpectrum> spectra,
                        std::span<const std::string> ids, const CsvMeta& meta);

}  // namespace entspec
