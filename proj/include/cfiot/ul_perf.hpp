/**
 * @file ul_perf.hpp
 * @brief Uplink MMSE-receiver SINR, its large-dimension deterministic
 * equivalent, and rate/throughput metrics.
 */
#pragma once

#include <utility>
#include <vector>

#include "cfiot/estimation.hpp"

namespace cfiot {

/// Uplink transmit controls. eta are power-control coefficients in [0,1];
/// u weights rates across things, nu rescales per-thing max power so the
/// effective per-symbol SNR of thing k is rho_u * nu_k * eta_k.
struct UlPowerAllocation {
  arma::vec eta;
  arma::vec u;
  arma::vec nu;

  static UlPowerAllocation full_power(std::size_t K);
  void validate() const;

  /// Effective power coefficients nu % eta.
  arma::vec effective() const { return nu % eta; }
};

/// Converged state of the deterministic-equivalent fixed point. T is
/// diagonal and stored as its diagonal.
struct RmState {
  arma::vec e;       ///< K
  arma::vec T_diag;  ///< M
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> residuals;  ///< max-abs e change per iteration
};

/// Diagonal of the noise-plus-estimation-error matrix:
/// D_mm = rho_u * sum_k nu_k eta_k (beta_mk - gamma_mk) + 1.
arma::vec noise_plus_error_diag(const EstimationStats& stats, const UlPowerAllocation& alloc,
                                double rho_u);

/// Per-thing SINR of the optimal linear receiver for one channel draw.
/// Uses one Hermitian factorization shared by all K things.
arma::vec exact_mmse_sinr(const ChannelDraw& draw, const EstimationStats& stats,
                          const UlPowerAllocation& alloc, double rho_u);

/// Fixed point of the deterministic-equivalent auxiliary variables, started
/// from e = M. tol is relative on the e vector.
RmState rm_fixed_point(const EstimationStats& stats, const UlPowerAllocation& alloc, double rho_u,
                       double tol = 1e-8, std::size_t max_iter = 500);

/// Deterministic-equivalent SINR: rho_u nu_k eta_k tr(Gamma_k T) / M.
/// Throws if the state did not converge.
arma::vec rm_sinr(const RmState& state, const EstimationStats& stats,
                  const UlPowerAllocation& alloc, double rho_u);

/// Half-duplex throughput scale: B * (tau_c - tau) / (2 tau_c), in Hz.
double throughput_prefactor(const RadioConfig& cfg);

/// Spectral rates log2(1+SINR) and throughputs (bits/s) for a SINR vector.
std::pair<arma::vec, arma::vec> rate_and_throughput(const arma::vec& sinr, const RadioConfig& cfg);

}  // namespace cfiot
