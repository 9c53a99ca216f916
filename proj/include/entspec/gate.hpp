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

#include <array>
#include <cstdint>
#include <string_view>

namespace entspec {

enum class GateKind : std::uint8_t { Swap, Cnot, Toffoli };

std::string_view to_string(GateKind kind);
GateKind parse_gate_kind(std::string_view text);

constexpr unsigned arity(GateKind kind) {
  return kind == GateKind::Toffoli ? 3U : 2U;
}

/**
 * One reversible permutation gate.
 *
 * Qubit indices are zero based; qubit j is bit j of a basis label. The tuple
 * is ordered (controls..., target) for CNOT and Toffoli. SWAP keeps its pair
 * sorted ascending. Bit k of `negated` marks control k as active on 0 instead
 * of 1; SWAP has no controls and always carries 0.
 */
struct GateOp {
  GateKind kind = GateKind::Swap;
  std::array<std::uint8_t, 3> qubits{0, 1, 0};
  std::uint8_t negated = 0;

  unsigned size() const { return arity(kind); }
  unsigned target() const { return qubits[size() - 1]; }
  unsigned min_qubit() const;
  unsigned max_qubit() const;

  /// Throws std::out_of_range / std::invalid_argument on a malformed gate.
  void validate(unsigned n) const;

  friend bool operator==(const GateOp&, const GateOp&) = default;

  static GateOp swap(unsigned a, unsigned b);
  static GateOp cnot(unsigned control, unsigned target, bool negated = false);
  static GateOp toffoli(unsigned c1, unsigned c2, unsigned target,
                        std::uint8_t negated = 0);
};

}  // namespace entspec
