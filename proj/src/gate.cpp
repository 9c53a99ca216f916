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

#include "entspec/gate.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>

namespace entspec {

std::string_view to_string(GateKind kind) {
  switch (kind) {
    case GateKind::Swap:
      return "SWAP";
    case GateKind::Cnot:
      return "CNOT";
    case GateKind::Toffoli:
      return "TOFFOLI";
  }
  return "?";
}

GateKind parse_gate_kind(std::string_view text) {
  if (text == "SWAP") return GateKind::Swap;
  if (text == "CNOT") return GateKind::Cnot;
  if (text == "TOFFOLI") return GateKind::Toffoli;
  throw std::invalid_argument("unknown gate kind '" + std::string(text) + "'");
}

unsigned GateOp::min_qubit() const {
  return *std::min_element(qubits.begin(), qubits.begin() + size());
}

unsigned GateOp::max_qubit() const {
  return *std::max_element(qubits.begin(), qubits.begin() + size());
}

void GateOp::validate(unsigned n) const {
  const unsigned k = size();
  for (unsigned i = 0; i < k; ++i) {
    if (qubits[i] >= n) {
      throw std::out_of_range("gate qubit " + std::to_string(qubits[i]) +
                              " out of range for " + std::to_string(n) +
                              " qubits");
    }
    for (unsigned j = 0; j < i; ++j) {
      if (qubits[i] == qubits[j]) {
        throw std::invalid_argument("gate repeats qubit " +
                                    std::to_string(qubits[i]));
      }
    }
  }
  const unsigned controls = k - 1;
  if (kind == GateKind::Swap ? negated != 0 : (negated >> controls) != 0) {
    throw std::invalid_argument("polarity mask has bits beyond the controls");
  }
}

GateOp GateOp::swap(unsigned a, unsigned b) {
  if (a > b) std::swap(a, b);
  return GateOp{GateKind::Swap,
                {static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b), 0},
                0};
}

GateOp GateOp::cnot(unsigned control, unsigned target, bool negated) {
  return GateOp{GateKind::Cnot,
                {static_cast<std::uint8_t>(control),
                 static_cast<std::uint8_t>(target), 0},
                static_cast<std::uint8_t>(negated ? 1 : 0)};
}

GateOp GateOp::toffoli(unsigned c1, unsigned c2, unsigned target,
                       std::uint8_t negated) {
  return GateOp{GateKind::Toffoli,
                {static_cast<std::uint8_t>(c1), static_cast<std::uint8_t>(c2),
                 static_cast<std::uint8_t>(target)},
                negated};
}

}  // namespace entspec
