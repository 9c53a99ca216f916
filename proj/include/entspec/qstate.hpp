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
#include <iosfwd>
#include <span>
#include <vector>

#include "entspec/gate.hpp"
#include "entspec/rng.hpp"

namespace entspec {

inline constexpr unsigned kMaxQubits = 24;

/**
 * Real-amplitude pure state of n qubits.
 *
 * amps[x] is the amplitude of basis label x, where bit j of x holds the value
 * of qubit j. Gates only permute amplitudes, so the norm set at construction
 * is preserved exactly.
 */
class StateVector {
 public:
  /// |0...0>.
  explicit StateVector(unsigned n);
  /// Takes ownership of `amps`; its length must be 2^n for some n in
  /// [1, kMaxQubits]. The amplitudes are not renormalized.
  explicit StateVector(std::vector<double> amps);

  unsigned n() const { return n_; }
  std::size_t dim() const { return amps_.size(); }

  std::span<const double> amps() const { return amps_; }
  std::span<double> amps() { return amps_; }
  double operator[](std::size_t x) const { return amps_[x]; }

  double norm_squared() const;

  friend bool operator==(const StateVector&, const StateVector&) = default;

 private:
  unsigned n_;
  std::vector<double> amps_;
};

/// Per-qubit angles and signs of a real product state
/// cos(theta/2)|0> + sign * sin(theta/2)|1>.
struct ProductStateSpec {
  std::vector<double> thetas;
  std::vector<int> signs;  // +1 or -1

  unsigned n() const { return static_cast<unsigned>(thetas.size()); }
  void validate() const;
};

StateVector init_product(const ProductStateSpec& spec);

/// Same, but fails unless `spec` describes exactly `n` qubits.
StateVector init_product(const ProductStateSpec& spec, unsigned n);

/// theta uniform on [0, pi], sign uniform on {+1, -1}, per qubit.
ProductStateSpec sample_random_product(unsigned n, Rng& rng);

/// Discrete-amplitude product states. Variant 1: qubit 0 in |0>, the rest in
/// |+>. Variant 2: every qubit in |->.
StateVector make_chi_state(int variant, unsigned n);

/// Permutes amplitudes by the gate's truth table. Applying the same gate twice
/// restores the array bit for bit.
void apply_gate(StateVector& state, const GateOp& gate);

// Binary snapshot: "ESSV", version byte, n byte, u64 amplitude count, then the
// amplitudes; all integers and doubles little endian.
inline constexpr std::uint8_t kStateDumpVersion = 1;
void write_state(std::ostream& out, const StateVector& state);
StateVector read_state(std::istream& in);

}  // namespace entspec
