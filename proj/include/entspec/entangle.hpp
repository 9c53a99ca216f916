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
#include <string_view>
#include <vector>

#include "entspec/qstate.hpp"

namespace entspec {

/// Schmidt weights at or below this value do not count towards the rank.
inline constexpr double kRankCutoff = 1e-12;

/// Qubits [0, n_a) form block A, the remaining n_b qubits block B.
struct Bipartition {
  unsigned n_a = 1;
  unsigned n_b = 1;

  static Bipartition at(unsigned n, unsigned n_a);
  static Bipartition middle(unsigned n) { return at(n, n / 2); }
  unsigned n() const { return n_a + n_b; }
};

/// Which reduced density matrix to diagonalize. Both share their nonzero
/// spectrum; Smaller picks the cheaper one.
enum class GramSide { Smaller, A, B };

struct EntanglementSpectrum {
  std::vector<double> probs;  // descending, clamped at 0
  std::size_t rank = 0;       // count of probs above kRankCutoff
  std::size_t dim = 0;        // min(2^n_a, 2^n_b)

  /// Sorts, clamps and counts; `probs` need not be ordered.
  static EntanglementSpectrum from_probs(std::vector<double> probs);
};

/// Squared singular values of the 2^n_a x 2^n_b amplitude matrix, from an
/// eigendecomposition of the Gram matrix on `side`.
EntanglementSpectrum schmidt_spectrum(const StateVector& state, Bipartition part,
                                      GramSide side = GramSide::Smaller);

/// Renyi entropy in bits; q must be 0, 1 or 2.
double renyi_entropy(const EntanglementSpectrum& spectrum, int q);

/// S_q across one cut. For q = 0 and q = 2 this avoids the full
/// eigendecomposition: rank is certified with a shifted Cholesky factorization
/// when the cut is full rank, and S_2 only needs the Gram matrix.
double cut_entropy(const StateVector& state, unsigned n_a, int q);

/// Rank across one cut under kRankCutoff.
std::size_t cut_rank(const StateVector& state, unsigned n_a);

/// Sum of S_q over the n - 1 contiguous cuts.
double total_entropy(const StateVector& state, int q);

/// Per-cut entropies, index i holding the cut n_a = i + 1.
std::vector<double> cut_entropies(const StateVector& state, int q);

/// Header of the spectrum table: realization_id,n_A,k,p_k
void write_spectrum_header(std::ostream& out);

/// One row per Schmidt probability, k = 1..dim in descending order of p_k.
void write_spectrum_rows(std::ostream& out, std::string_view realization_id, unsigned n_a,
                         const EntanglementSpectrum& spectrum);

}  // namespace entspec
