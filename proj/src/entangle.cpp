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

#include "entspec/entangle.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "entspec/csv.hpp"

namespace entspec {

namespace {

using ConstMatrixMap = Eigen::Map<const Eigen::MatrixXd>;

// Column-major view: rows are A labels (low bits), columns B labels.
ConstMatrixMap amplitude_matrix(const StateVector& state, unsigned n_a) {
  const Eigen::Index rows = Eigen::Index{1} << n_a;
  const Eigen::Index cols = static_cast<Eigen::Index>(state.dim()) / rows;
  return ConstMatrixMap(state.amps().data(), rows, cols);
}

// Lower triangle of the Gram matrix of m (m^T m when by_columns, else m m^T),
// split recursively so the off-diagonal blocks run as plain products and the
// mirrored half is never computed.
void lower_gram(const Eigen::Ref<const Eigen::MatrixXd>& m, bool by_columns,
                Eigen::Ref<Eigen::MatrixXd> g) {
  const Eigen::Index d = by_columns ? m.cols() : m.rows();
  if (d <= 32) {
    if (by_columns) {
      g.noalias() = m.transpose() * m;
    } else {
      g.noalias() = m * m.transpose();
    }
    return;
  }
  const Eigen::Index h = d / 2;
  const Eigen::Index rest = d - h;
  if (by_columns) {
    lower_gram(m.leftCols(h), true, g.topLeftCorner(h, h));
    lower_gram(m.rightCols(rest), true, g.bottomRightCorner(rest, rest));
    g.bottomLeftCorner(rest, h).noalias() = m.rightCols(rest).transpose() * m.leftCols(h);
  } else {
    lower_gram(m.topRows(h), false, g.topLeftCorner(h, h));
    lower_gram(m.bottomRows(rest), false, g.bottomRightCorner(rest, rest));
    g.bottomLeftCorner(rest, h).noalias() = m.bottomRows(rest) * m.topRows(h).transpose();
  }
}

// Gram matrix of the amplitude matrix on one side; only the lower triangle is
// filled.
void gram(const ConstMatrixMap& m, bool a_side, Eigen::MatrixXd& g) {
  const Eigen::Index d = a_side ? m.rows() : m.cols();
  g.resize(d, d);
  lower_gram(m, !a_side, g);
}

bool use_a_side(const ConstMatrixMap& m, GramSide side) {
  return side == GramSide::A || (side == GramSide::Smaller && m.rows() <= m.cols());
}

// Workspace reused across calls on the same thread; cooling evaluates
// thousands of cuts per second.
struct RankWorkspace {
  Eigen::MatrixXd gram;
  Eigen::MatrixXd shifted;
  Eigen::MatrixXd factor;
  Eigen::MatrixXd small;
  std::vector<Eigen::Index> perm;
  std::vector<double> diag;
};

RankWorkspace& workspace() {
  thread_local RankWorkspace ws;
  return ws;
}

// True iff every eigenvalue of g exceeds the rank cutoff.
bool exceeds_cutoff(const Eigen::Ref<const Eigen::MatrixXd>& g, Eigen::MatrixXd& scratch) {
  scratch = g;
  scratch.diagonal().array() -= kRankCutoff;
  Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>> llt(scratch);
  return llt.info() == Eigen::Success;
}

// Pivoted Cholesky stopped once the trace of the remaining Schur complement
// drops to `stop_trace`. Returns the number of steps k; with L the d x k
// factor stored transposed in ws.factor, g - L L^T is PSD with trace <=
// stop_trace (up to rounding).
Eigen::Index pivoted_cholesky(const Eigen::MatrixXd& g, double stop_trace,
                              RankWorkspace& ws) {
  const Eigen::Index d = g.rows();
  auto& perm = ws.perm;
  auto& diag = ws.diag;
  perm.resize(static_cast<std::size_t>(d));
  diag.resize(static_cast<std::size_t>(d));
  for (Eigen::Index i = 0; i < d; ++i) {
    perm[i] = i;
    diag[i] = g(i, i);
  }
  // Column i of `lt` holds row i of the factor, in the pivot order of `perm`.
  Eigen::MatrixXd& lt = ws.factor;
  lt.setZero(d, d);
  Eigen::Index k = 0;
  for (; k < d; ++k) {
    double remaining = 0.0;
    Eigen::Index best = k;
    for (Eigen::Index i = k; i < d; ++i) {
      remaining += std::max(diag[i], 0.0);
      if (diag[i] > diag[best]) best = i;
    }
    if (remaining <= stop_trace || diag[best] <= 0.0) break;
    std::swap(perm[k], perm[best]);
    std::swap(diag[k], diag[best]);
    lt.col(k).swap(lt.col(best));
    const double pivot = std::sqrt(diag[k]);
    lt(k, k) = pivot;
    for (Eigen::Index i = k + 1; i < d; ++i) {
      const double dot = lt.col(i).head(k).dot(lt.col(k).head(k));
      const Eigen::Index r = std::max(perm[i], perm[k]);
      const Eigen::Index c = std::min(perm[i], perm[k]);
      const double v = (g(r, c) - dot) / pivot;
      lt(k, i) = v;
      diag[i] -= v * v;
    }
  }
  return k;
}

// Count of eigenvalues of g above kRankCutoff. Two certificates avoid the
// eigendecomposition in the common cases: a shifted Cholesky for full rank,
// and a truncated pivoted Cholesky g = l l^T + s (trace(s) tiny) whose k x k
// core l^T l is shifted-Cholesky certified above the cutoff.
std::size_t rank_of_gram(const Eigen::MatrixXd& g, RankWorkspace& ws) {
  const Eigen::Index d = g.rows();
  if (d == 1) return g(0, 0) > kRankCutoff ? 1 : 0;
  if (exceeds_cutoff(g, ws.shifted)) return static_cast<std::size_t>(d);

  constexpr double kStopTrace = 0.1 * kRankCutoff;
  const Eigen::Index k = pivoted_cholesky(g, kStopTrace, ws);
  if (k < d) {
    if (k == 0) return 0;
    const auto lt = ws.factor.topRows(k);
    ws.small.noalias() = lt * lt.transpose();
    if (exceeds_cutoff(ws.small, ws.shifted)) return static_cast<std::size_t>(k);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
  return static_cast<std::size_t>((es.eigenvalues().array() > kRankCutoff).count());
}

void check_cut(const StateVector& state, unsigned n_a) {
  if (n_a < 1 || n_a >= state.n()) {
    throw std::invalid_argument("cut n_a=" + std::to_string(n_a) +
                                " invalid for " + std::to_string(state.n()) +
                                " qubits");
  }
}

}  // namespace

Bipartition Bipartition::at(unsigned n, unsigned n_a) {
  if (n_a < 1 || n_a + 1 > n) {
    throw std::invalid_argument("bipartition n_a=" + std::to_string(n_a) +
                                " invalid for " + std::to_string(n) + " qubits");
  }
  return Bipartition{n_a, n - n_a};
}

EntanglementSpectrum EntanglementSpectrum::from_probs(std::vector<double> probs) {
  EntanglementSpectrum s;
  for (auto& p : probs) p = std::max(p, 0.0);
  std::sort(probs.begin(), probs.end(), std::greater<>());
  s.rank = static_cast<std::size_t>(
      std::count_if(probs.begin(), probs.end(), [](double p) { return p > kRankCutoff; }));
  s.dim = probs.size();
  s.probs = std::move(probs);
  return s;
}

EntanglementSpectrum schmidt_spectrum(const StateVector& state, Bipartition part,
                                      GramSide side) {
  if (part.n() != state.n()) {
    throw std::invalid_argument("bipartition does not match state size");
  }
  check_cut(state, part.n_a);
  const auto m = amplitude_matrix(state, part.n_a);
  Eigen::MatrixXd g;
  gram(m, use_a_side(m, side), g);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
  const auto& w = es.eigenvalues();
  std::vector<double> probs(w.data(), w.data() + w.size());
  // The larger Gram matrix carries extra zero eigenvalues; keep min-side many.
  const std::size_t dim = std::size_t{1} << std::min(part.n_a, part.n_b);
  std::sort(probs.begin(), probs.end(), std::greater<>());
  probs.resize(dim);
  return EntanglementSpectrum::from_probs(std::move(probs));
}

double renyi_entropy(const EntanglementSpectrum& spectrum, int q) {
  switch (q) {
    case 0:
      return spectrum.rank == 0 ? 0.0 : std::log2(static_cast<double>(spectrum.rank));
    case 1: {
      double s = 0.0;
      for (double p : spectrum.probs) {
        if (p > 0.0) s -= p * std::log2(p);
      }
      return s;
    }
    case 2: {
      double sum = 0.0;
      for (double p : spectrum.probs) sum += p * p;
      return -std::log2(sum);
    }
    default:
      throw std::invalid_argument("unsupported Renyi order " + std::to_string(q));
  }
}

std::size_t cut_rank(const StateVector& state, unsigned n_a) {
  check_cut(state, n_a);
  auto& ws = workspace();
  const auto m = amplitude_matrix(state, n_a);
  const bool a_side = m.rows() <= m.cols();
  const Eigen::Index d = a_side ? m.rows() : m.cols();
  const Eigen::Index wide = a_side ? m.cols() : m.rows();
  // rho >= (Gram over any subset of the long side), so a subset that already
  // clears the cutoff certifies full rank at a fraction of the cost.
  if (wide >= 4 * d) {
    ws.gram.resize(d, d);
    if (a_side) {
      lower_gram(m.leftCols(2 * d), false, ws.gram);
    } else {
      lower_gram(m.topRows(2 * d), true, ws.gram);
    }
    if (exceeds_cutoff(ws.gram, ws.shifted)) return static_cast<std::size_t>(d);
  }
  gram(m, a_side, ws.gram);
  return rank_of_gram(ws.gram, ws);
}

double cut_entropy(const StateVector& state, unsigned n_a, int q) {
  check_cut(state, n_a);
  switch (q) {
    case 0: {
      const auto r = cut_rank(state, n_a);
      return r == 0 ? 0.0 : std::log2(static_cast<double>(r));
    }
    case 1:
      return renyi_entropy(schmidt_spectrum(state, Bipartition::at(state.n(), n_a)), 1);
    case 2: {
      // tr(rho^2) is the squared Frobenius norm of the Gram matrix.
      const auto m = amplitude_matrix(state, n_a);
      auto& g = workspace().gram;
      gram(m, use_a_side(m, GramSide::Smaller), g);
      double purity = 0.0;
      for (Eigen::Index j = 0; j < g.cols(); ++j) {
        purity += g(j, j) * g(j, j) + 2.0 * g.col(j).tail(g.rows() - j - 1).squaredNorm();
      }
      return -std::log2(purity);
    }
    default:
      throw std::invalid_argument("unsupported Renyi order " + std::to_string(q));
  }
}

std::vector<double> cut_entropies(const StateVector& state, int q) {
  std::vector<double> out;
  out.reserve(state.n() - 1);
  for (unsigned n_a = 1; n_a < state.n(); ++n_a) out.push_back(cut_entropy(state, n_a, q));
  return out;
}

double total_entropy(const StateVector& state, int q) {
  double total = 0.0;
  for (double s : cut_entropies(state, q)) total += s;
  return total;
}

void write_spectrum_header(std::ostream& out) { out << "realization_id,n_A,k,p_k\n"; }

void write_spectrum_rows(std::ostream& out, std::string_view realization_id, unsigned n_a,
                         const EntanglementSpectrum& spectrum) {
  for (std::size_t k = 0; k < spectrum.probs.size(); ++k) {
    out << realization_id << ',' << n_a << ',' << k + 1 << ','
        << format_double(spectrum.probs[k]) << '\n';
  }
}

}  // namespace entspec
