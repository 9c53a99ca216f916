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

#include "entspec/circuits.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace entspec {

std::string_view to_string(GateSet set) {
  return set == GateSet::I2 ? "I2" : "I3";
}

GateSet parse_gate_set(std::string_view text) {
  if (text == "I2" || text == "i2") return GateSet::I2;
  if (text == "I3" || text == "i3") return GateSet::I3;
  throw std::invalid_argument("unknown gate set '" + std::string(text) + "'");
}

std::string_view to_string(VariantMode mode) {
  return mode == VariantMode::Plain ? "plain" : "negated";
}

VariantMode parse_variant_mode(std::string_view text) {
  if (text == "plain") return VariantMode::Plain;
  if (text == "negated") return VariantMode::Negated;
  throw std::invalid_argument("unknown variant mode '" + std::string(text) +
                              "'");
}

bool contains(GateSet set, GateKind kind) {
  return kind != GateKind::Toffoli || set == GateSet::I3;
}

unsigned max_arity(GateSet set) { return set == GateSet::I3 ? 3U : 2U; }

void Circuit::validate() const {
  for (const auto& op : ops) {
    op.validate(n);
    if (!contains(gate_set, op.kind)) {
      throw std::invalid_argument(std::string(to_string(op.kind)) +
                                  " is not in gate set " +
                                  std::string(to_string(gate_set)));
    }
  }
}

GateOp sample_gate(GateSet set, unsigned n, VariantMode mode, Rng& rng) {
  if (n < max_arity(set)) {
    throw std::invalid_argument("gate set " + std::string(to_string(set)) +
                                " needs at least " +
                                std::to_string(max_arity(set)) + " qubits");
  }
  const auto kind = static_cast<GateKind>(rng.below(max_arity(set) == 3 ? 3 : 2));
  const unsigned k = arity(kind);

  // Ordered selection without replacement: draw from the remaining qubits and
  // shift past the ones already taken.
  std::array<unsigned, 3> q{};
  for (unsigned i = 0; i < k; ++i) {
    unsigned v = static_cast<unsigned>(rng.below(n - i));
    std::array<unsigned, 3> taken = q;
    std::sort(taken.begin(), taken.begin() + i);
    for (unsigned j = 0; j < i; ++j) {
      if (v >= taken[j]) ++v;
    }
    q[i] = v;
  }

  switch (kind) {
    case GateKind::Swap:
      return GateOp::swap(q[0], q[1]);
    case GateKind::Cnot: {
      const bool neg = mode == VariantMode::Negated && rng.coin();
      return GateOp::cnot(q[0], q[1], neg);
    }
    case GateKind::Toffoli: {
      const auto neg = mode == VariantMode::Negated
                           ? static_cast<std::uint8_t>(rng.below(4))
                           : std::uint8_t{0};
      return GateOp::toffoli(q[0], q[1], q[2], neg);
    }
  }
  throw std::logic_error("unreachable");
}

Circuit sample_circuit(GateSet set, unsigned n, std::size_t m, VariantMode mode,
                       Rng& rng) {
  if (n < max_arity(set)) {
    throw std::invalid_argument("gate set " + std::string(to_string(set)) +
                                " needs at least " +
                                std::to_string(max_arity(set)) + " qubits");
  }
  Circuit c{n, set, {}};
  c.ops.reserve(m);
  for (std::size_t i = 0; i < m; ++i) c.ops.push_back(sample_gate(set, n, mode, rng));
  return c;
}

Circuit invert(const Circuit& circuit) {
  Circuit inv = circuit;
  std::reverse(inv.ops.begin(), inv.ops.end());
  return inv;
}

void apply_circuit(StateVector& state, const Circuit& circuit) {
  if (circuit.n != state.n()) {
    throw std::invalid_argument("circuit is for " + std::to_string(circuit.n) +
                                " qubits, state has " +
                                std::to_string(state.n()));
  }
  for (const auto& op : circuit.ops) apply_gate(state, op);
}

void write_circuit(std::ostream& out, const Circuit& circuit) {
  out << "CIRCUIT n=" << circuit.n << " gate_set=" << to_string(circuit.gate_set)
      << '\n';
  for (const auto& op : circuit.ops) {
    out << to_string(op.kind);
    for (unsigned i = 0; i < op.size(); ++i) out << ' ' << unsigned{op.qubits[i]};
    out << ' ' << unsigned{op.negated} << '\n';
  }
}

Circuit read_circuit(std::istream& in) {
  std::string line;
  Circuit c;
  bool have_header = false;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& what) {
    throw std::runtime_error("circuit line " + std::to_string(lineno) + ": " +
                             what);
  };
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string word;
    if (!(ls >> word)) continue;

    if (!have_header) {
      if (word != "CIRCUIT") fail("expected CIRCUIT header");
      std::string field;
      bool have_n = false, have_set = false;
      while (ls >> field) {
        const auto eq = field.find('=');
        if (eq == std::string::npos) fail("malformed header field " + field);
        const auto key = field.substr(0, eq);
        const auto value = field.substr(eq + 1);
        if (key == "n") {
          c.n = static_cast<unsigned>(std::stoul(value));
          have_n = true;
        } else if (key == "gate_set") {
          c.gate_set = parse_gate_set(value);
          have_set = true;
        } else {
          fail("unknown header field " + key);
        }
      }
      if (!have_n || !have_set) fail("header needs n and gate_set");
      have_header = true;
      continue;
    }

    GateOp op;
    op.kind = parse_gate_kind(word);
    unsigned values[4];
    const unsigned k = op.size();
    for (unsigned i = 0; i <= k; ++i) {
      if (!(ls >> values[i])) fail("expected " + std::to_string(k + 1) + " integers");
      if (values[i] > 255) fail("value out of range");
    }
    if (ls >> word) fail("trailing text");
    for (unsigned i = 0; i < k; ++i) op.qubits[i] = static_cast<std::uint8_t>(values[i]);
    op.negated = static_cast<std::uint8_t>(values[k]);
    if (op.kind == GateKind::Swap && op.qubits[0] > op.qubits[1]) {
      std::swap(op.qubits[0], op.qubits[1]);
    }
    c.ops.push_back(op);
  }
  if (!have_header) throw std::runtime_error("empty circuit file");
  c.validate();
  return c;
}

}  // namespace entspec
