#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>
#include <vector>

#include "automl/rng.hpp"

using namespace automl;

TEST_CASE("same seed reproduces the stream") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) {
    CHECK(a.next_u64() == b.next_u64());
    CHECK(a.uniform() == b.uniform());
  }
}

TEST_CASE("uniform stays in [0, 1)") {
  Rng rng(7);
  for (int i = 0; i < 10000; ++i) {
    double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("uniform(lo, hi) respects the bounds") {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    double v = rng.uniform(-2.0, 5.0);
    CHECK(v >= -2.0);
    CHECK(v < 5.0);
  }
}

TEST_CASE("log_uniform covers both decades") {
  Rng rng(11);
  bool low = false, high = false;
  for (int i = 0; i < 1000; ++i) {
    double v = rng.log_uniform(0.01, 1.0);
    CHECK(v >= 0.01);
    CHECK(v <= 1.0);
    if (v < 0.1) low = true;
    if (v > 0.1) high = true;
  }
  CHECK(low);
  CHECK(high);
}

TEST_CASE("uniform_index covers the range and handles n <= 1") {
  Rng rng(5);
  CHECK(rng.uniform_index(0) == 0);
  CHECK(rng.uniform_index(1) == 0);
  std::set<size_t> seen;
  for (int i = 0; i < 1000; ++i) {
    size_t v = rng.uniform_index(5);
    CHECK(v < 5);
    seen.insert(v);
  }
  CHECK(seen.size() == 5);
}

TEST_CASE("bernoulli frequency is near p") {
  Rng rng(13);
  int hits = 0;
  for (int i = 0; i < 10000; ++i) hits += rng.bernoulli(0.3) ? 1 : 0;
  CHECK(hits > 2700);
  CHECK(hits < 3300);
}

TEST_CASE("normal moments are near (0, 1)") {
  Rng rng(17);
  double sum = 0, sum_sq = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    double v = rng.normal();
    sum += v;
    sum_sq += v * v;
  }
  double mean = sum / n;
  double var = sum_sq / n - mean * mean;
  CHECK(std::abs(mean) < 0.05);
  CHECK(std::abs(var - 1.0) < 0.1);
}

TEST_CASE("shuffle permutes without losing elements") {
  Rng rng(19);
  std::vector<int> v(50);
  for (int i = 0; i < 50; ++i) v[i] = i;
  std::vector<int> shuffled = v;
  rng.shuffle(shuffled);
  CHECK(shuffled != v);
  std::sort(shuffled.begin(), shuffled.end());
  CHECK(shuffled == v);
}

TEST_CASE("substreams with different tags are distinct") {
  uint64_t root = 12345;
  CHECK(substream(root, "a") != substream(root, "b"));
  CHECK(substream(root, "a", 0) != substream(root, "a", 1));
  CHECK(substream(root, "a", 3) == substream(root, "a", 3));
  CHECK(substream(1, "a") != substream(2, "a"));
}

TEST_CASE("substream indices do not collide over a small sweep") {
  std::set<uint64_t> seen;
  for (uint64_t i = 0; i < 1000; ++i) seen.insert(substream(7, "sweep", i));
  CHECK(seen.size() == 1000);
}
