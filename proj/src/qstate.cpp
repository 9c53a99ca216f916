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

#include "entspec/qstate.hpp"

#include <bit>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>

namespace entspec {

namespace {

void check_qubit_count(unsigned n) {
  if (n < 1 || n > kMaxQubits) {
    throw std::invalid_argument("qubit count " + std::to_string(n) +
                                " outside [1, " + std::to_string(kMaxQubits) +
                                "]");
  }
}

template <class T>
void put_le(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  auto bits = std::bit_cast<std::array<unsigned char, sizeof(T)>>(value);
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bits.begin(), bits.end());
  }
  out.write(reinterpret_cast<const char*>(bits.data()), bits.size());
}

template <class T>
T get_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bits{};
  if (!in.read(reinterpret_cast<char*>(bits.data()), bits.size())) {
    throw std::runtime_error("truncated state dump");
  }
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bits.begin(), bits.end());
  }
  return std::bit_cast<T>(bits);
}

}  // namespace

StateVector::StateVector(unsigned n) : n_(n) {
  check_qubit_count(n);
  amps_.assign(std::size_t{1} << n, 0.0);
  amps_[0] = 1.0;
}

StateVector::StateVector(std::vector<double> amps) : amps_(std::move(amps)) {
  if (!std::has_single_bit(amps_.size())) {
    throw std::invalid_argument("amplitude count is not a power of two");
  }
  n_ = static_cast<unsigned>(std::countr_zero(amps_.size()));
  check_qubit_count(n_);
}

double StateVector::norm_squared() const {
  double sum = 0.0;
  for (double a : amps_) sum += a * a;
  return sum;
}

void ProductStateSpec::validate() const {
  if (signs.size() != thetas.size()) {
    throw std::invalid_argument("product spec has " +
                                std::to_string(thetas.size()) + " angles but " +
                                std::to_string(signs.size()) + " signs");
  }
  check_qubit_count(n());
  for (double t : thetas) {
    if (!(t >= 0.0 && t <= std::numbers::pi)) {
      throw std::invalid_argument("theta outside [0, pi]");
    }
  }
  for (int s : signs) {
    if (s != 1 && s != -1) throw std::invalid_argument("sign must be +1 or -1");
  }
}

StateVector init_product(const ProductStateSpec& spec) {
  spec.validate();
  const unsigned n = spec.n();
  std::vector<double> amps(std::size_t{1} << n);
  amps[0] = 1.0;
  // Build the tensor product one qubit at a time: after step j the first 2^(j+1)
  // entries hold the product state of qubits 0..j.
  for (unsigned j = 0; j < n; ++j) {
    const double c0 = std::cos(spec.thetas[j] / 2);
    const double c1 = spec.signs[j] * std::sin(spec.thetas[j] / 2);
    const std::size_t half = std::size_t{1} << j;
    for (std::size_t x = 0; x < half; ++x) {
      amps[x + half] = amps[x] * c1;
      amps[x] *= c0;
    }
  }
  return StateVector(std::move(amps));
}

StateVector init_product(const ProductStateSpec& spec, unsigned n) {
  if (spec.thetas.size() != n || spec.signs.size() != n) {
    throw std::invalid_argument("product spec describes " +
                                std::to_string(spec.thetas.size()) +
                                " qubits, expected " + std::to_string(n));
  }
  return init_product(spec);
}

ProductStateSpec sample_random_product(unsigned n, Rng& rng) {
  check_qubit_count(n);
  ProductStateSpec spec;
  spec.thetas.reserve(n);
  spec.signs.reserve(n);
  for (unsigned j = 0; j < n; ++j) {
    spec.thetas.push_back(std::numbers::pi * rng.uniform());
    spec.signs.push_back(rng.coin() ? -1 : 1);
  }
  return spec;
}

StateVector make_chi_state(int variant, unsigned n) {
  check_qubit_count(n);
  std::vector<double> amps(std::size_t{1} << n);
  if (variant == 1) {
    const double c = std::pow(2.0, -0.5 * (n - 1));
    for (std::size_t x = 0; x < amps.size(); ++x) {
      amps[x] = (x & 1U) == 0 ? c : 0.0;
    }
  } else if (variant == 2) {
    const double c = std::pow(2.0, -0.5 * n);
    for (std::size_t x = 0; x < amps.size(); ++x) {
      amps[x] = (std::popcount(x) & 1) == 0 ? c : -c;
    }
  } else {
    throw std::invalid_argument("chi state variant must be 1 or 2, got " +
                                std::to_string(variant));
  }
  return StateVector(std::move(amps));
}

void apply_gate(StateVector& state, const GateOp& gate) {
  gate.validate(state.n());
  auto amps = state.amps();
  const std::size_t dim = amps.size();

  if (gate.kind == GateKind::Swap) {
    const std::size_t lo = std::size_t{1} << gate.qubits[0];
    const std::size_t hi = std::size_t{1} << gate.qubits[1];
    for (std::size_t x = 0; x < dim; ++x) {
      if ((x & lo) != 0 && (x & hi) == 0) std::swap(amps[x], amps[x ^ lo ^ hi]);
    }
    return;
  }

  // Flip the target bit wherever every control sits at its active value.
  const unsigned controls = gate.size() - 1;
  std::size_t ctrl_mask = 0;
  std::size_t ctrl_value = 0;
  for (unsigned k = 0; k < controls; ++k) {
    const std::size_t bit = std::size_t{1} << gate.qubits[k];
    ctrl_mask |= bit;
    if (((gate.negated >> k) & 1U) == 0) ctrl_value |= bit;
  }
  const std::size_t tbit = std::size_t{1} << gate.target();
  for (std::size_t x = 0; x < dim; ++x) {
    if ((x & tbit) == 0 && (x & ctrl_mask) == ctrl_value) {
      std::swap(amps[x], amps[x | tbit]);
    }
  }
}

void write_state(std::ostream& out, const StateVector& state) {
  out.write("ESSV", 4);
  put_le<std::uint8_t>(out, kStateDumpVersion);
  put_le<std::uint8_t>(out, static_cast<std::uint8_t>(state.n()));
  put_le<std::uint64_t>(out, state.dim());
  for (double a : state.amps()) put_le<double>(out, a);
  if (!out) throw std::runtime_error("failed writing state dump");
}

StateVector read_state(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::string(magic, 4) != "ESSV") {
    throw std::runtime_error("not a state dump");
  }
  const auto version = get_le<std::uint8_t>(in);
  if (version != kStateDumpVersion) {
    throw std::runtime_error("unsupported state dump version " +
                             std::to_string(version));
  }
  const auto n = get_le<std::uint8_t>(in);
  check_qubit_count(n);
  const auto count = get_le<std::uint64_t>(in);
  if (count != (std::uint64_t{1} << n)) {
    throw std::runtime_error("state dump length does not match qubit count");
  }
  std::vector<double> amps(count);
  for (auto& a : amps) a = get_le<double>(in);
  return StateVector(std::move(amps));
}

}  // namespace entspec
