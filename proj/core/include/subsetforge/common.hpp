#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace subsetforge {

// ---------------------------------------------------------------------------
// Error taxonomy. Everything thrown by the library derives from Error so
// callers can catch one base type; subclasses signal which contract failed.
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class CalibrationError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Dense row-major matrix of doubles. Deliberately minimal: the learners only
// need contiguous row access and row/column selection.
// ---------------------------------------------------------------------------

struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;  // row-major, rows*cols

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  double* row_ptr(std::size_t r) { return data.data() + r * cols; }
  const double* row_ptr(std::size_t r) const { return data.data() + r * cols; }

  std::vector<double> column(std::size_t c) const;
  Matrix select_rows(const std::vector<int>& idx) const;
  Matrix select_columns(const std::vector<int>& idx) const;

  bool operator==(const Matrix& other) const = default;
};

// ---------------------------------------------------------------------------
// Deterministic RNG. splitmix64 core with hand-rolled distributions so that
// streams are identical across platforms and standard-library versions
// (std::uniform_* distributions are not bit-stable across implementations).
// ---------------------------------------------------------------------------

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform on a log scale; lo and hi must be positive.
  double log_uniform(double lo, double hi);

  // Standard normal via Box-Muller; spare value cached.
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Uniform integer in [lo, hi] inclusive, via rejection (no modulo bias).
  long long uniform_int(long long lo, long long hi);

  // Index drawn from an unnormalized weight vector.
  std::size_t categorical(const std::vector<double>& weights);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_int(0, static_cast<long long>(i) - 1));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Stable seed derivation: every component that needs randomness derives its
// own stream from (master seed, stream tag[, index]) so adding or reordering
// consumers never perturbs unrelated streams.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);
std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream);
std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream, std::uint64_t index);

// ---------------------------------------------------------------------------
// Parallel loop with deterministic semantics: fn(i) must write only to state
// owned by index i; callers aggregate results in index order afterwards, so
// outputs are independent of the worker count. Nested calls degrade to
// sequential execution.
// ---------------------------------------------------------------------------

void set_max_threads(int n);  // n < 1 resets to the hardware/env default
int max_threads();

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace subsetforge
