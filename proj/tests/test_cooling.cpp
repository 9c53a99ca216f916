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

#include <cmath>
#include <sstream>

#include "entspec/cooling.hpp"
#include "entspec/entangle.hpp"

using namespace entspec;

namespace {

struct Heated {
  StateVector initial;
  Circuit heating;
  StateVector state;
};

Heated heat(unsigned n, GateSet set, std::size_t gates, std::uint64_t seed) {
  Rng rng(seed);
  Heated h{init_product(sample_random_product(n, rng)), {}, StateVector(n)};
  h.heating = sample_circuit(set, n, gates, VariantMode::Negated, rng);
  h.state = h.initial;
  apply_circuit(h.state, h.heating);
  return h;
}

}  // namespace

TEST_CASE("schedule validation and temperature") {
  AnnealSchedule s;
  CHECK_NOTHROW(s.validate());
  CHECK(s.temperature(0) == 1.0);
  for (std::size_t t = 0; t < 5000; ++t) REQUIRE(s.temperature(t + 1) < s.temperature(t));
  CHECK(s.temperature(100000) < 1e-40);
  auto bad = [](auto mutate) {
    AnnealSchedule x;
    mutate(x);
    CHECK_THROWS_AS(x.validate(), std::invalid_argument);
  };
  bad([](AnnealSchedule& x) { x.t0 = 0; });
  bad([](AnnealSchedule& x) { x.alpha = 1.0; });
  bad([](AnnealSchedule& x) { x.alpha = 0.0; });
  bad([](AnnealSchedule& x) { x.max_attempts = 0; });
  bad([](AnnealSchedule& x) { x.q_objective = 1; });
}

TEST_CASE("cooling an already factorized state succeeds immediately") {
  Rng rng(1);
  StateVector s = init_product(sample_random_product(8, rng));
  const auto r = cool(s, GateSet::I3, AnnealSchedule{}, rng);
  CHECK(r.success);
  CHECK(r.accepted_ops.empty());
  CHECK(r.attempts_used == 0);
  CHECK(r.trace.empty());
  CHECK(r.final_objective == 0.0);
}

TEST_CASE("cool argument errors") {
  Rng rng(1);
  StateVector two(2);
  CHECK_THROWS_AS(cool(two, GateSet::I3, AnnealSchedule{}, rng), std::invalid_argument);
  StateVector s(4);
  CoolingOptions o;
  o.s1_stride = 0;
  CHECK_THROWS_AS(cool(s, GateSet::I2, AnnealSchedule{}, rng, o), std::invalid_argument);
  AnnealSchedule bad;
  bad.q_objective = 1;
  CHECK_THROWS_AS(cool(s, GateSet::I2, bad, rng), std::invalid_argument);
}

TEST_CASE("I2 cooling reverses a heated state and the trace is consistent") {
  auto h = heat(8, GateSet::I2, 128, 7);
  StateVector s = h.state;
  Rng rng(70);
  AnnealSchedule sched;
  sched.max_attempts = 50000;
  const auto r = cool(s, GateSet::I2, sched, rng);
  REQUIRE(r.success);
  CHECK(r.final_objective == 0.0);
  CHECK(total_entropy(s, 0) == 0.0);
  CHECK(r.attempts_used == r.trace.size());
  CHECK(r.initial_objective == doctest::Approx(total_entropy(h.state, 0)));
  CHECK(std::abs(r.final_s1_mid) < 1e-9);
  CHECK(verify_reversal(h.initial, h.heating, r));

  SUBCASE("monotone acceptance: downhill and flat moves are always taken") {
    for (const auto& e : r.trace) {
      if (e.delta <= 0.0) REQUIRE(e.accepted);
    }
  }
  SUBCASE("trace replay reproduces every accepted objective") {
    StateVector replay = h.state;
    std::size_t k = 0;
    for (const auto& e : r.trace) {
      if (!e.accepted) continue;
      REQUIRE(r.accepted_ops.ops[k] == e.gate);
      apply_gate(replay, r.accepted_ops.ops[k++]);
      REQUIRE(std::abs(total_entropy(replay, 0) - e.objective) < 1e-10);
    }
    CHECK(k == r.accepted_ops.size());
  }
  SUBCASE("temperatures follow the schedule") {
    for (const auto& e : r.trace) REQUIRE(e.temperature == sched.temperature(e.attempt));
  }
  SUBCASE("S1 is recorded on every attempt with stride 1") {
    for (const auto& e : r.trace) REQUIRE_FALSE(std::isnan(e.s1_mid));
  }
}

TEST_CASE("cooling is deterministic given the seed") {
  auto h = heat(8, GateSet::I2, 64, 3);
  StateVector a = h.state, b = h.state;
  Rng ra(5), rb(5);
  AnnealSchedule sched;
  sched.max_attempts = 3000;
  const auto x = cool(a, GateSet::I2, sched, ra);
  const auto y = cool(b, GateSet::I2, sched, rb);
  CHECK(x.accepted_ops == y.accepted_ops);
  CHECK(x.attempts_used == y.attempts_used);
  CHECK(a == b);
}

TEST_CASE("S2 objective") {
  auto h = heat(8, GateSet::I2, 128, 11);
  StateVector s = h.state;
  Rng rng(12);
  AnnealSchedule sched;
  sched.q_objective = 2;
  sched.max_attempts = 50000;
  const auto r = cool(s, GateSet::I2, sched, rng);
  CHECK(r.success);
  CHECK(r.final_objective < kPurityObjectiveZero);
  CHECK(verify_reversal(h.initial, h.heating, r));
}

TEST_CASE("budget exhaustion is a normal result") {
  auto h = heat(8, GateSet::I3, 256, 21);
  StateVector s = h.state;
  Rng rng(22);
  AnnealSchedule sched;
  sched.max_attempts = 200;
  CoolingOptions o;
  o.s1_stride = 50;
  const auto r = cool(s, GateSet::I3, sched, rng, o);
  CHECK_FALSE(r.success);
  CHECK(r.attempts_used == 200);
  CHECK(r.final_objective > 0.0);
  // Strided S1 samples after every 50th attempt and the last one.
  for (const auto& e : r.trace) {
    const bool sampled = (e.attempt + 1) % 50 == 0 || e.attempt + 1 == 200;
    REQUIRE(std::isnan(e.s1_mid) != sampled);
  }
  CHECK(r.final_s1_mid == doctest::Approx(cut_entropy(s, 4, 1)).epsilon(1e-12));
  CHECK_THROWS_AS(verify_reversal(h.initial, h.heating, r), std::invalid_argument);
}

TEST_CASE("verify_reversal") {
  SUBCASE("empty heating, empty cooling") {
    Rng rng(4);
    const StateVector init = init_product(sample_random_product(6, rng));
    StateVector s = init;
    const auto r = cool(s, GateSet::I2, AnnealSchedule{}, rng);
    CHECK(verify_reversal(init, Circuit{6, GateSet::I2, {}}, r));
  }
  SUBCASE("tampered move lists are caught") {
    int caught_last = 0;
    int caught_random = 0;
    Rng pick(5);
    for (std::uint64_t seed = 100; seed < 110; ++seed) {
      auto h = heat(8, GateSet::I2, 128, seed);
      StateVector s = h.state;
      Rng rng(seed + 1000);
      AnnealSchedule sched;
      sched.max_attempts = 50000;
      const auto r = cool(s, GateSet::I2, sched, rng);
      REQUIRE(r.success);
      REQUIRE(r.accepted_ops.size() > 2);
      // The last accepted move is the one that reached zero: dropping it must
      // always be detected.
      auto last = r;
      last.accepted_ops.ops.pop_back();
      if (!verify_reversal(h.initial, h.heating, last)) ++caught_last;
      auto any = r;
      const auto victim = static_cast<std::ptrdiff_t>(pick.below(any.accepted_ops.size()));
      any.accepted_ops.ops.erase(any.accepted_ops.ops.begin() + victim);
      if (!verify_reversal(h.initial, h.heating, any)) ++caught_random;
    }
    CHECK(caught_last == 10);
    CHECK(caught_random >= 7);
  }
}

TEST_CASE("trace CSV") {
  auto h = heat(6, GateSet::I3, 40, 9);
  StateVector s = h.state;
  Rng rng(10);
  AnnealSchedule sched;
  sched.max_attempts = 5;
  CoolingOptions o;
  o.s1_stride = 2;
  const auto r = cool(s, GateSet::I3, sched, rng, o);
  std::ostringstream out;
  write_trace_csv(out, r);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "attempt,kind,qubits,polarity,delta_S,temperature,accepted,S_obj,S1_mid");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 8);
    if (rows == 1) CHECK(line.back() == ',');  // attempt 0 is not an S1 sample
    if (rows == 2) CHECK(line.back() != ',');
  }
  CHECK(rows == 5);
}
