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
#include <set>
#include <vector>

#include "entspec/rng.hpp"

using namespace entspec;

TEST_CASE("engine output is the standard mt19937_64 sequence") {
  // The standard fixes the 10000th output for the default seed.
  Rng r(5489u);
  std::uint64_t v = 0;
  for (int i = 0; i < 10000; ++i) v = r.next();
  CHECK(v == 9981545732273789042ULL);
}

TEST_CASE("frozen stream values") {
  // Changing any of these breaks replay of stored records; bump the stream
  // algorithm id if that is intended.
  CHECK(derive_seed(1, 0) == 4526406653003451538ULL);
  CHECK(derive_seed(1, 1) == 17797511264756998531ULL);
  CHECK(derive_seed(12345, 7) == 17890590683651173764ULL);
  Rng r(42);
  CHECK(r.next() == 13930160852258120406ULL);
  CHECK(r.uniform() == 0.63903139385469743);
  CHECK(r.below(10) == 0);
}

TEST_CASE("uniform stays in [0, 1) and below in range") {
  Rng r(3);
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    REQUIRE(r.below(7) < 7);
  }
  CHECK(r.below(0) == 0);
  CHECK(r.below(1) == 0);
}

TEST_CASE("below is unbiased") {
  Rng r(11);
  const int k = 6;
  const int n = 60000;
  std::vector<int> counts(k, 0);
  for (int i = 0; i < n; ++i) counts[r.below(k)]++;
  double chi2 = 0.0;
  const double e = static_cast<double>(n) / k;
  for (int c : counts) chi2 += (c - e) * (c - e) / e;
  CHECK(chi2 < 20.515);  // df 5, significance 1e-3
}

TEST_CASE("derived seeds are distinct and split does not advance the parent") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 10000; ++i) seen.insert(derive_seed(99, i));
  CHECK(seen.size() == 10000);
  Rng a(5);
  Rng b(5);
  Rng child = a.split(3);
  Rng child2 = b.split(3);
  CHECK(a.next() == b.next());
  CHECK(child.next() == child2.next());
  CHECK(a.split(1).next() != a.split(2).next());
}
