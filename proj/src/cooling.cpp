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

#include "entspec/cooling.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

#include "entspec/entangle.hpp"

namespace entspec {

namespace {

double sum(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0);
}

bool objective_is_zero(double objective, int q) {
  return q == 0 ? objective == 0.0 : objective < kPurityObjectiveZero;
}

double middle_s1(const StateVector& state) {
  return cut_entropy(state, state.n() / 2, 1);
}

}  // namespace

void AnnealSchedule::validate() const {
  if (!(t0 > 0.0)) throw std::invalid_argument("T0 must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("alpha must lie in (0, 1)");
  }
  if (max_attempts < 1) throw std::invalid_argument("attempt budget must be >= 1");
  if (q_objective != 0 && q_objective != 2) {
    throw std::invalid_argument("cooling objective must be S_0 or S_2");
  }
}

double AnnealSchedule::temperature(std::size_t attempt) const {
  return t0 * std::pow(alpha, static_cast<double>(attempt));
}

CoolingResult cool(StateVector& state, GateSet set, const AnnealSchedule& schedule,
                   Rng& rng, const CoolingOptions& options) {
  schedule.validate();
  if (options.s1_stride < 1) throw std::invalid_argument("S1 stride must be >= 1");
  const unsigned n = state.n();
  if (n < max_arity(set)) {
    throw std::invalid_argument("too few qubits for gate set " +
                                std::string(to_string(set)));
  }
  const int q = schedule.q_objective;
  const unsigned mid = n / 2;

  CoolingResult result;
  result.accepted_ops = Circuit{n, set, {}};

  std::vector<double> cuts = cut_entropies(state, q);
  double objective = sum(cuts);
  double s1 = middle_s1(state);
  bool s1_stale = false;
  result.initial_objective = objective;

  std::vector<double> fresh(cuts.size());
  std::size_t t = 0;
  bool done = objective_is_zero(objective, q);
  for (; !done && t < schedule.max_attempts; ++t) {
    const GateOp gate = sample_gate(set, n, options.variant, rng);
    apply_gate(state, gate);

    // Cut n_a separates the gate's qubits iff min < n_a <= max.
    const unsigned first = gate.min_qubit() + 1;
    const unsigned last = gate.max_qubit();
    fresh = cuts;
    for (unsigned n_a = first; n_a <= last; ++n_a) {
      fresh[n_a - 1] = cut_entropy(state, n_a, q);
    }
    const double proposed = sum(fresh);
    double delta = proposed - objective;
    if (std::abs(delta) < kDeltaTolerance) delta = 0.0;

    const double temp = schedule.temperature(t);
    const bool accepted = delta <= 0.0 || rng.uniform() < std::exp(-delta / temp);
    if (accepted) {
      cuts.swap(fresh);
      objective = proposed;
      result.accepted_ops.ops.push_back(gate);
      if (first <= mid && mid <= last) s1_stale = true;
    } else {
      apply_gate(state, gate);
    }

    done = objective_is_zero(objective, q);
    const bool last_attempt = done || t + 1 == schedule.max_attempts;
    double s1_row = std::numeric_limits<double>::quiet_NaN();
    if ((t + 1) % options.s1_stride == 0 || last_attempt) {
      if (s1_stale) {
        s1 = middle_s1(state);
        s1_stale = false;
      }
      s1_row = s1;
    }
    if (options.keep_trace) {
      result.trace.push_back(
          TraceEntry{t, gate, delta, temp, accepted, objective, s1_row});
    }
  }
  if (s1_stale) s1 = middle_s1(state);

  result.success = done;
  result.attempts_used = t;
  result.final_objective = objective;
  result.final_s1_mid = s1;
  return result;
}

bool verify_reversal(const StateVector& initial, const Circuit& heating,
                     const CoolingResult& result) {
  if (!result.success) {
    throw std::invalid_argument("verify_reversal needs a successful cooling run");
  }
  StateVector s = initial;
  apply_circuit(s, heating);
  apply_circuit(s, result.accepted_ops);
  for (unsigned n_a = 1; n_a < s.n(); ++n_a) {
    if (cut_rank(s, n_a) != 1) return false;
  }
  return true;
}

void write_trace_csv(std::ostream& out, const CoolingResult& result) {
  out << "attempt,kind,qubits,polarity,delta_S,temperature,accepted,S_obj,S1_mid\n";
  const auto old_precision = out.precision(17);
  for (const auto& e : result.trace) {
    out << e.attempt << ',' << to_string(e.gate.kind) << ',';
    for (unsigned i = 0; i < e.gate.size(); ++i) {
      if (i) out << '-';
      out << unsigned{e.gate.qubits[i]};
    }
    out << ',' << unsigned{e.gate.negated} << ',' << e.delta << ',' << e.temperature
        << ',' << (e.accepted ? 1 : 0) << ',' << e.objective << ',';
    if (!std::isnan(e.s1_mid)) out << e.s1_mid;
    out << '\n';
  }
  out.precision(old_precision);
}

}  // namespace entspec
