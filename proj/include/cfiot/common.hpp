/**
 * @file common.hpp
 * @brief Shared utilities: deterministic RNG streams, dB helpers, and a
 * static-chunked parallel for loop.
 */
#pragma once

#include <armadillo>
#include <cstdint>
#include <functional>
#include <random>

namespace cfiot {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; used to hash (seed, stream, substream) tuples into
/// independent engine seeds.
std::uint64_t mix64(std::uint64_t x);

/// Derive a deterministic child engine from a master seed and stream ids.
Rng make_stream(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream = 0);

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

/// Standard normal vector drawn from an explicit engine.
arma::vec randn_vec(std::size_t n, Rng& rng);

/// Circularly symmetric complex Gaussian CN(0,1) entries.
arma::cx_vec randcn_vec(std::size_t n, Rng& rng);
arma::cx_mat randcn_mat(std::size_t rows, std::size_t cols, Rng& rng);

/// Number of worker threads (CFIOT_THREADS env override, else hardware).
unsigned worker_count();

/// Runs fn(i) for i in [0, n) on a fixed static partition of index blocks so
/// that per-index results are placement-deterministic.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace cfiot
