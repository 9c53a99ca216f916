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

#include <doctest.h>

#include <map>
#include <sstream>
#include <tuple>

#include "entspec/circuits.hpp"

using namespace entspec;

namespace {

double chi_square(const std::map<std::tuple<int, int, int>, int>& counts, std::size_t cells,
                  int total) {
  const double e = static_cast<double>(total) / static_cast<double>(cells);
  double chi2 = 0.0;
  for (const auto& [key, c] : counts) chi2 += (c - e) * (c - e) / e;
  chi2 += static_cast<double>(cells - counts.size()) * e;  // empty cells
  return chi2;
}

// Upper 1e-3 quantiles of the chi-square distribution.
constexpr double kChi2Df3 = 16.266;
constexpr double kChi2Df5 = 20.515;
constexpr double kChi2Df11 = 31.264;
constexpr double kChi2Df23 = 49.728;

}  // namespace

TEST_CASE("gate set names and membership") {
  CHECK(to_string(GateSet::I2) == "I2");
  CHECK(parse_gate_set("I3") == GateSet::I3);
  CHECK_THROWS_AS(parse_gate_set("I4"), std::invalid_argument);
  CHECK(parse_variant_mode("plain") == VariantMode::Plain);
  CHECK(parse_variant_mode("negated") == VariantMode::Negated);
  CHECK_THROWS_AS(parse_variant_mode("other"), std::invalid_argument);
  CHECK(contains(GateSet::I2, GateKind::Cnot));
  CHECK_FALSE(contains(GateSet::I2, GateKind::Toffoli));
  CHECK(contains(GateSet::I3, GateKind::Toffoli));
  CHECK(max_arity(GateSet::I2) == 2);
  CHECK(max_arity(GateSet::I3) == 3);
  CHECK(parse_gate_kind("TOFFOLI") == GateKind::Toffoli);
  CHECK_THROWS_AS(parse_gate_kind("CZ"), std::invalid_argument);
}

TEST_CASE("sample_circuit basics") {
  Rng rng(1);
  CHECK(sample_circuit(GateSet::I3, 16, 0, VariantMode::Negated, rng).empty());
  Rng a(42), b(42);
  CHECK(sample_circuit(GateSet::I3, 16, 500, VariantMode::Negated, a) ==
        sample_circuit(GateSet::I3, 16, 500, VariantMode::Negated, b));
  CHECK_THROWS_AS(sample_circuit(GateSet::I3, 2, 5, VariantMode::Plain, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(sample_circuit(GateSet::I2, 1, 5, VariantMode::Plain, rng),
                  std::invalid_argument);
  CHECK_NOTHROW(sample_circuit(GateSet::I2, 2, 5, VariantMode::Plain, rng));
}

TEST_CASE("I3 kind frequencies are 1/3 each") {
  Rng rng(2);
  const auto c = sample_circuit(GateSet::I3, 16, 30000, VariantMode::Negated, rng);
  std::map<GateKind, int> counts;
  for (const auto& g : c.ops) counts[g.kind]++;
  for (GateKind k : {GateKind::Swap, GateKind::Cnot, GateKind::Toffoli}) {
    CHECK(std::abs(counts[k] / 30000.0 - 1.0 / 3.0) < 0.01);
  }
  Rng rng2(3);
  const auto c2 = sample_circuit(GateSet::I2, 16, 30000, VariantMode::Negated, rng2);
  std::map<GateKind, int> counts2;
  for (const auto& g : c2.ops) counts2[g.kind]++;
  CHECK(counts2[GateKind::Toffoli] == 0);
  CHECK(std::abs(counts2[GateKind::Swap] / 30000.0 - 0.5) < 0.01);
}

TEST_CASE("property: sampled marginals pass chi-square at 1e-3") {
  const unsigned n = 4;
  Rng rng(31337);
  std::map<std::tuple<int, int, int>, int> swaps, cnots, toffolis, cnot_pol, tof_pol;
  int ns = 0, nc = 0, nt = 0;
  for (int i = 0; i < 60000; ++i) {
    const GateOp g = sample_gate(GateSet::I3, n, VariantMode::Negated, rng);
    REQUIRE_NOTHROW(g.validate(n));
    switch (g.kind) {
      case GateKind::Swap:
        swaps[{g.qubits[0], g.qubits[1], 0}]++;
        ++ns;
        break;
      case GateKind::Cnot:
        cnots[{g.qubits[0], g.qubits[1], 0}]++;
        cnot_pol[{g.negated, 0, 0}]++;
        ++nc;
        break;
      case GateKind::Toffoli:
        toffolis[{g.qubits[0], g.qubits[1], g.qubits[2]}]++;
        tof_pol[{g.negated, 0, 0}]++;
        ++nt;
        break;
    }
  }
  CHECK(swaps.size() == 6);  // unordered pairs
  CHECK(chi_square(swaps, 6, ns) < kChi2Df5);
  CHECK(chi_square(cnots, 12, nc) < kChi2Df11);
  CHECK(chi_square(toffolis, 24, nt) < kChi2Df23);
  CHECK(chi_square(cnot_pol, 2, nc) < 10.828);
  CHECK(chi_square(tof_pol, 4, nt) < kChi2Df3);
}

TEST_CASE("plain mode never negates") {
  Rng rng(4);
  const auto c = sample_circuit(GateSet::I3, 8, 2000, VariantMode::Plain, rng);
  for (const auto& g : c.ops) CHECK(g.negated == 0);
}

TEST_CASE("property: every sampled circuit validates its gate set") {
  Rng rng(6);
  for (int rep = 0; rep < 50; ++rep) {
    const GateSet set = rep % 2 ? GateSet::I2 : GateSet::I3;
    const auto c = sample_circuit(set, 3 + rep % 10, 200, VariantMode::Negated, rng);
    CHECK_NOTHROW(c.validate());
    for (const auto& g : c.ops) CHECK(contains(set, g.kind));
  }
  Circuit bad{4, GateSet::I2, {GateOp::toffoli(0, 1, 2)}};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  Circuit out{3, GateSet::I2, {GateOp::cnot(0, 3)}};
  CHECK_THROWS(out.validate());
}

TEST_CASE("invert") {
  CHECK(invert(Circuit{4, GateSet::I3, {}}).empty());
  const Circuit c{4, GateSet::I3,
                  {GateOp::swap(0, 1), GateOp::cnot(1, 2), GateOp::toffoli(0, 1, 3)}};
  const Circuit inv = invert(c);
  REQUIRE(inv.size() == 3);
  CHECK(inv.ops[0] == c.ops[2]);
  CHECK(inv.ops[1] == c.ops[1]);
  CHECK(inv.ops[2] == c.ops[0]);

  Rng rng(12);
  StateVector s = init_product(sample_random_product(10, rng));
  const StateVector before = s;
  const auto big = sample_circuit(GateSet::I3, 10, 512, VariantMode::Negated, rng);
  apply_circuit(s, big);
  CHECK_FALSE(s == before);
  apply_circuit(s, invert(big));
  CHECK(s == before);

  StateVector wrong(5);
  CHECK_THROWS_AS(apply_circuit(wrong, big), std::invalid_argument);
}

TEST_CASE("circuit text round trip") {
  Rng rng(13);
  for (GateSet set : {GateSet::I2, GateSet::I3}) {
    const auto c = sample_circuit(set, 9, 300, VariantMode::Negated, rng);
    std::stringstream buf;
    write_circuit(buf, c);
    const std::string text = buf.str();
    CHECK(text.rfind("CIRCUIT n=9 gate_set=" + std::string(to_string(set)) + "\n", 0) == 0);
    std::stringstream in(text);
    CHECK(read_circuit(in) == c);
  }
  std::stringstream empty_in("CIRCUIT n=3 gate_set=I3\n");
  CHECK(read_circuit(empty_in).empty());
  std::stringstream commented("# heating\nCIRCUIT n=3 gate_set=I3\nTOFFOLI 0 1 2 3\n# end\nSWAP 1 2 0\n");
  const auto c = read_circuit(commented);
  REQUIRE(c.size() == 2);
  CHECK(c.ops[0] == GateOp::toffoli(0, 1, 2, 3));
  CHECK(c.ops[1] == GateOp::swap(1, 2));
}

TEST_CASE("circuit text errors") {
  auto fails = [](const std::string& text) {
    std::stringstream in(text);
    CHECK_THROWS(read_circuit(in));
  };
  fails("");
  fails("CIRCUIT n=3\n");
  fails("CIRCUIT n=3 gate_set=I9\n");
  fails("CIRCUIT n=3 gate_set=I3\nCNOT 0 1\n");
  fails("CIRCUIT n=3 gate_set=I3\nCNOT 0 5 0\n");
  fails("CIRCUIT n=3 gate_set=I3\nFOO 0 1 0\n");
  fails("CIRCUIT n=3 gate_set=I2\nTOFFOLI 0 1 2 0\n");
  fails("CIRCUIT n=3 gate_set=I3\nCNOT 0 1 0 extra\n");
  fails("CIRCUIT n=3 gate_set=I3\nCNOT 0 0 0\n");
  std::stringstream in("CIRCUIT n=3 gate_set=I3\nSWAP 0 1 0\nCNOT x 1 0\n");
  try {
    read_circuit(in);
    FAIL("expected an error");
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}
