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
#include <string_view>
#include <vector>

#include "entspec/gate.hpp"
#include "entspec/qstate.hpp"
#include "entspec/rng.hpp"

namespace entspec {

/// I2 = {SWAP, CNOT}; I3 = {SWAP, CNOT, TOFFOLI}.
enum class GateSet { I2, I3 };

/// Plain: every control active on 1. Negated: each control polarity drawn
/// uniformly, which covers the CNOT/Toffoli variations.
enum class VariantMode { Plain, Negated };

std::string_view to_string(GateSet set);
GateSet parse_gate_set(std::string_view text);
std::string_view to_string(VariantMode mode);
VariantMode parse_variant_mode(std::string_view text);

bool contains(GateSet set, GateKind kind);
unsigned max_arity(GateSet set);

struct Circuit {
  unsigned n = 0;
  GateSet gate_set = GateSet::I3;
  std::vector<GateOp> ops;

  std::size_t size() const { return ops.size(); }
  bool empty() const { return ops.empty(); }
  /// Every op is valid on n qubits and belongs to gate_set.
  void validate() const;

  friend bool operator==(const Circuit&, const Circuit&) = default;
};

/// One gate: kind uniform over the set, qubits a uniform ordered selection of
/// distinct qubits, polarities per `mode`.
GateOp sample_gate(GateSet set, unsigned n, VariantMode mode, Rng& rng);

Circuit sample_circuit(GateSet set, unsigned n, std::size_t m, VariantMode mode,
                       Rng& rng);

/// Every gate is an involution, so the inverse is the reversed op list.
Circuit invert(const Circuit& circuit);

void apply_circuit(StateVector& state, const Circuit& circuit);

// Text form: a header "CIRCUIT n=<n> gate_set=<I2|I3>" followed by one op per
// line "KIND q1 q2 [q3] mask". Blank lines and '#' comments are ignored.
void write_circuit(std::ostream& out, const Circuit& circuit);
Circuit read_circuit(std::istream& in);

}  // namespace entspec
