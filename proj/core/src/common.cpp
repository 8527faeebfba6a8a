#include "subsetforge/common.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

namespace subsetforge {

std::vector<double> Matrix::column(std::size_t c) const {
  std::vector<double> out(rows);
  for (std::size_t r = 0; r < rows; ++r) out[r] = data[r * cols + c];
  return out;
}

Matrix Matrix::select_rows(const std::vector<int>& idx) const {
  Matrix out(idx.size(), cols);
  for (std::size_t r = 0; r < idx.size(); ++r) {
    const double* src = row_ptr(static_cast<std::size_t>(idx[r]));
    double* dst = out.row_ptr(r);
    for (std::size_t c = 0; c < cols; ++c) dst[c] = src[c];
  }
  return out;
}

Matrix Matrix::select_columns(const std::vector<int>& idx) const {
  Matrix out(rows, idx.size());
  for (std::size_t r = 0; r < rows; ++r) {
    const double* src = row_ptr(r);
    double* dst = out.row_ptr(r);
    for (std::size_t c = 0; c < idx.size(); ++c) dst[c] = src[static_cast<std::size_t>(idx[c])];
  }
  return out;
}

double Rng::log_uniform(double lo, double hi) {
  if (!(lo > 0.0) || !(hi >= lo)) throw InvalidArgument("log_uniform requires 0 < lo <= hi");
  return std::exp(uniform(std::log(lo), std::log(hi)));
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // u1 in (0, 1] so the log is finite.
  double u1 = 1.0 - uniform();
  double u2 = uniform();
  double radius = std::sqrt(-2.0 * std::log(u1));
  double angle = 6.283185307179586476925286766559 * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

long long Rng::uniform_int(long long lo, long long hi) {
  if (lo > hi) throw InvalidArgument("uniform_int requires lo <= hi");
  std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<long long>(next_u64());  // full 64-bit range
  std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % span;
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return lo + static_cast<long long>(x % span);
}

std::size_t Rng::categorical(const std::vector<double>& weights) {
  if (weights.empty()) throw InvalidArgument("categorical requires at least one weight");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw InvalidArgument("categorical weights must be nonnegative");
    total += w;
  }
  if (!(total > 0.0)) throw InvalidArgument("categorical weights must not all be zero");
  double u = uniform() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc) return i;
  }
  return weights.size() - 1;
}

namespace {

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix64(seed ^ mix64(stream + 0x9e3779b97f4a7c15ULL));
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return derive_seed(derive_seed(seed, stream), index);
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream) {
  return derive_seed(seed, fnv1a(stream));
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream, std::uint64_t index) {
  return derive_seed(derive_seed(seed, fnv1a(stream)), index);
}

namespace {

int env_default_threads() {
  if (const char* env = std::getenv("SUBSETFORGE_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) return static_cast<int>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::atomic<int> g_max_threads{0};  // 0 = not yet resolved

thread_local bool tl_inside_parallel = false;

}  // namespace

void set_max_threads(int n) { g_max_threads.store(n < 1 ? env_default_threads() : n); }

int max_threads() {
  int v = g_max_threads.load();
  if (v == 0) {
    v = env_default_threads();
    g_max_threads.store(v);
  }
  return v;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  std::size_t workers = static_cast<std::size_t>(max_threads());
  if (workers > n) workers = n;
  if (workers <= 1 || tl_inside_parallel) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }

  std::mutex err_mutex;
  std::exception_ptr first_error;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    std::size_t begin = n * w / workers;
    std::size_t end = n * (w + 1) / workers;
    pool.emplace_back([&, begin, end] {
      tl_inside_parallel = true;
      try {
        for (std::size_t i = begin; i < end; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace subsetforge
