/**
 * @file common.cpp
 */
#include "cfiot/common.hpp"

#include <cstdlib>
#include <thread>
#include <vector>

namespace cfiot {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng make_stream(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream) {
  const std::uint64_t s = mix64(mix64(mix64(seed) ^ stream) ^ substream);
  return Rng(s);
}

arma::vec randn_vec(std::size_t n, Rng& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  arma::vec v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = dist(rng);
  return v;
}

arma::cx_vec randcn_vec(std::size_t n, Rng& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  arma::cx_vec v(n);
  const double s = 1.0 / std::sqrt(2.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double re = dist(rng);
    const double im = dist(rng);
    v[i] = std::complex<double>(re * s, im * s);
  }
  return v;
}

arma::cx_mat randcn_mat(std::size_t rows, std::size_t cols, Rng& rng) {
  arma::cx_mat m(rows, cols);
  std::normal_distribution<double> dist(0.0, 1.0);
  const double s = 1.0 / std::sqrt(2.0);
  // column-major fill keeps the draw order independent of vectorization
  for (std::size_t c = 0; c < cols; ++c) {
    for (std::size_t r = 0; r < rows; ++r) {
      const double re = dist(rng);
      const double im = dist(rng);
      m(r, c) = std::complex<double>(re * s, im * s);
    }
  }
  return m;
}

unsigned worker_count() {
  if (const char* env = std::getenv("CFIOT_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const unsigned workers = std::min<std::size_t>(worker_count(), n == 0 ? 1 : n);
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      // static block partition: worker w owns [lo, hi)
      const std::size_t lo = n * w / workers;
      const std::size_t hi = n * (w + 1) / workers;
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }
}

}  // namespace cfiot
