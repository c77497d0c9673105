#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "uda/rng.hpp"

using uda::RngStream;

TEST_CASE("equal seed and tag replay the same sequence") {
  RngStream a(42, "test/stream");
  RngStream b(42, "test/stream");
  for (int i = 0; i < 100; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
  RngStream c(42, "test/stream");
  RngStream d(42, "test/stream");
  for (int i = 0; i < 100; ++i) {
    CHECK(c.normal() == d.normal());
  }
}

TEST_CASE("distinct tags give distinct streams") {
  RngStream a(42, "test/one");
  RngStream b(42, "test/two");
  int equal = 0;
  for (int i = 0; i < 64; ++i) {
    if (a.next_u64() == b.next_u64()) ++equal;
  }
  CHECK(equal == 0);
}

TEST_CASE("uniform stays in the half-open unit interval") {
  RngStream rng(7, "test/uniform");
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("normal draws have roughly standard moments") {
  RngStream rng(3, "test/normal");
  const int n = 100000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  CHECK(std::abs(mean) < 0.02);
  CHECK(std::abs(var - 1.0) < 0.03);
}

TEST_CASE("below covers the range without escaping it") {
  RngStream rng(11, "test/below");
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t v = rng.below(7);
    CHECK(v < 7);
    seen.insert(v);
  }
  CHECK(seen.size() == 7);
}

TEST_CASE("shuffle is a deterministic permutation") {
  std::vector<int> v(50);
  std::iota(v.begin(), v.end(), 0);
  std::vector<int> w = v;
  RngStream a(5, "test/shuffle");
  RngStream b(5, "test/shuffle");
  a.shuffle(v);
  b.shuffle(w);
  CHECK(v == w);
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 50; ++i) CHECK(sorted[static_cast<std::size_t>(i)] == i);
}
