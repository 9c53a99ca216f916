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
#include <vector>

#include "entspec/circuits.hpp"
#include "entspec/qstate.hpp"
#include "entspec/rng.hpp"

namespace entspec {

/// Metropolis schedule T(t) = t0 * alpha^t over attempt index t.
struct AnnealSchedule {
  double t0 = 1.0;
  double alpha = 0.999;
  std::size_t max_attempts = 100000;
  int q_objective = 0;  // 0 or 2

  void validate() const;
  double temperature(std::size_t attempt) const;
};

struct CoolingOptions {
  VariantMode variant = VariantMode::Negated;
  /// S1 at the middle cut is recorded after every s1_stride-th attempt (and
  /// after the last one); other trace rows carry NaN.
  std::size_t s1_stride = 1;
  bool keep_trace = true;
};

/// Changes in the objective smaller than this many bits count as zero.
inline constexpr double kDeltaTolerance = 1e-12;
/// Success threshold for the q = 2 objective.
inline constexpr double kPurityObjectiveZero = 1e-9;

struct TraceEntry {
  std::size_t attempt = 0;
  GateOp gate;
  double delta = 0.0;
  double temperature = 0.0;
  bool accepted = false;
  double objective = 0.0;  // after the decision
  double s1_mid = 0.0;     // NaN when not sampled
};

struct CoolingResult {
  bool success = false;
  Circuit accepted_ops;
  std::vector<TraceEntry> trace;
  std::size_t attempts_used = 0;
  double initial_objective = 0.0;
  double final_objective = 0.0;
  double final_s1_mid = 0.0;
};

/**
 * Entanglement cooling.
 *
 * Proposes random gates from `set` and keeps them by the Metropolis rule on the
 * all-cut objective S_q (q from the schedule): downhill or flat moves are
 * always taken, uphill ones with probability exp(-delta / T). Only the cuts a
 * proposal straddles are re-evaluated. Stops as soon as the objective reaches
 * zero or the attempt budget runs out. `state` is left in the final state.
 */
CoolingResult cool(StateVector& state, GateSet set, const AnnealSchedule& schedule,
                   Rng& rng, const CoolingOptions& options = {});

/// True when heating followed by the accepted moves turns `initial` into a
/// state with zero rank entropy on every cut. Throws std::invalid_argument if
/// `result` is not a successful run.
bool verify_reversal(const StateVector& initial, const Circuit& heating,
                     const CoolingResult& result);

/// Columns: attempt,kind,qubits,polarity,delta_S,temperature,accepted,S_obj,S1_mid
void write_trace_csv(std::ostream& out, const CoolingResult& result);

}  // namespace entspec
