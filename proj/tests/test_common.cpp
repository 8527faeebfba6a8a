#include <doctest.h>

#include <atomic>
#include <cmath>
#include <numeric>
#include <set>

#include "subsetforge/common.hpp"

using namespace subsetforge;

TEST_CASE("rng streams are reproducible and distinct") {
  Rng a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  bool differs = false;
  Rng a2(42);
  for (int i = 0; i < 100; ++i) differs |= a2.next_u64() != c.next_u64();
  CHECK(differs);
}

TEST_CASE("uniform stays in [0,1) with a sane mean") {
  Rng rng(7);
  double sum = 0.0;
  for (int i = 0; i < 20000; ++i) {
    double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(std::fabs(sum / 20000 - 0.5) < 0.01);
}

TEST_CASE("normal has ~zero mean and unit variance") {
  Rng rng(11);
  double sum = 0.0, sq = 0.0;
  const int n = 40000;
  for (int i = 0; i < n; ++i) {
    double z = rng.normal();
    sum += z;
    sq += z * z;
  }
  double mean = sum / n;
  CHECK(std::fabs(mean) < 0.02);
  CHECK(std::fabs(sq / n - mean * mean - 1.0) < 0.03);
}

TEST_CASE("uniform_int covers the whole range without bias toward ends") {
  Rng rng(3);
  std::vector<int> counts(6, 0);
  for (int i = 0; i < 60000; ++i) {
    long long v = rng.uniform_int(10, 15);
    REQUIRE(v >= 10);
    REQUIRE(v <= 15);
    ++counts[static_cast<std::size_t>(v - 10)];
  }
  for (int c : counts) CHECK(std::abs(c - 10000) < 500);
  CHECK(rng.uniform_int(4, 4) == 4);
}

TEST_CASE("log_uniform respects bounds and median") {
  Rng rng(5);
  int below = 0;
  for (int i = 0; i < 20000; ++i) {
    double v = rng.log_uniform(1e-3, 1e3);
    REQUIRE(v >= 1e-3);
    REQUIRE(v <= 1e3);
    if (v < 1.0) ++below;  // geometric midpoint of the range
  }
  CHECK(std::abs(below - 10000) < 400);
}

TEST_CASE("shuffle permutes and is seed-stable") {
  std::vector<int> v(20);
  std::iota(v.begin(), v.end(), 0);
  std::vector<int> w = v;
  Rng(99).shuffle(v);
  CHECK(std::set<int>(v.begin(), v.end()).size() == 20);
  CHECK(v != w);  // 1/20! odds of spurious failure
  std::vector<int> v2 = w;
  Rng(99).shuffle(v2);
  CHECK(v == v2);
}

TEST_CASE("derive_seed separates streams and indices") {
  std::uint64_t base = derive_seed(1, "alpha");
  CHECK(base == derive_seed(1, "alpha"));
  CHECK(base != derive_seed(1, "beta"));
  CHECK(base != derive_seed(2, "alpha"));
  CHECK(derive_seed(1, "alpha", 0) != derive_seed(1, "alpha", 1));
}

TEST_CASE("matrix column and selection helpers") {
  Matrix m(3, 2);
  // rows: (1,2), (3,4), (5,6)
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 2; ++c) m.at(r, c) = static_cast<double>(r * 2 + c + 1);
  CHECK(m.column(1) == std::vector<double>{2, 4, 6});
  Matrix rows = m.select_rows({2, 0});
  CHECK(rows.rows == 2);
  CHECK(rows.at(0, 0) == 5);
  CHECK(rows.at(1, 1) == 2);
  Matrix cols = m.select_columns({1});
  CHECK(cols.cols == 1);
  CHECK(cols.at(2, 0) == 6);
}

TEST_CASE("parallel_for output does not depend on the worker count") {
  const std::size_t n = 5000;
  auto run = [&] {
    std::vector<double> out(n);
    parallel_for(n, [&](std::size_t i) { out[i] = std::sqrt(static_cast<double>(i)); });
    return out;
  };
  set_max_threads(1);
  std::vector<double> seq = run();
  set_max_threads(8);
  std::vector<double> par = run();
  set_max_threads(0);
  CHECK(seq == par);
}

TEST_CASE("nested parallel_for degrades to sequential and still covers all work") {
  set_max_threads(4);
  std::atomic<long long> total{0};
  parallel_for(10, [&](std::size_t) {
    parallel_for(10, [&](std::size_t j) { total += static_cast<long long>(j); });
  });
  set_max_threads(0);
  CHECK(total == 10 * 45);
}
