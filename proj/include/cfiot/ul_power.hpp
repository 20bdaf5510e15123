/**
 * @file ul_power.hpp
 * @brief Uplink power control: max-min under the exact MMSE SINR, max-min
 * under the deterministic-equivalent SINR, target-rate control, and the
 * uplink energy-efficiency metric.
 */
#pragma once

#include <vector>

#include "cfiot/ul_perf.hpp"

namespace cfiot {

struct MaxminExactResult {
  arma::vec eta;  ///< K, in (0,1], at least one entry equals 1
  arma::vec d;    ///< K, final auxiliary values
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> residuals;  ///< max-abs d change per iteration
};

/// Max-min power control against the exact per-draw MMSE SINR. Equalizes the
/// u-weighted receiver quadratic forms; the min-weighted thing gets eta = 1.
MaxminExactResult maxmin_power_exact(const ChannelDraw& draw, const EstimationStats& stats,
                                     const arma::vec& u, const arma::vec& nu, double rho_u,
                                     double eps = 1e-6, std::size_t max_iter = 1000);

struct MaxminRmResult {
  arma::vec eta;
  arma::vec T_diag;  ///< M, converged diagonal
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> residuals;  ///< max-abs T_diag change per iteration
};

/// Max-min power control using only large-scale statistics. At the fixed
/// point the deterministic-equivalent SINRs are proportional to u.
MaxminRmResult maxmin_power_rm(const EstimationStats& stats, const arma::vec& u,
                               const arma::vec& nu, double rho_u, double eps = 1e-6,
                               std::size_t max_iter = 1000);

struct TargetRateResult {
  arma::vec eta;
  arma::uvec good_mask;     ///< 1 = full-power rate reaches the target
  arma::uvec clamped_mask;  ///< 1 = eta was clamped to 1 (target unmet)
  bool reweighted = false;  ///< second phase (good/poor weighting) engaged
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> residuals;
};

/// Target-SINR power control on the deterministic-equivalent model. Phase 1
/// drives every thing to target_sinr; if that needs eta > 1 somewhere, poor
/// things (full-power SINR below target) are down-weighted to u_poor and the
/// fixed point is re-run.
TargetRateResult target_rate_power_rm(const EstimationStats& stats, const arma::vec& nu,
                                      double rho_u, double target_sinr, double u_good = 1.0,
                                      double u_poor = 0.1, double eps = 1e-6,
                                      std::size_t max_iter = 1000);

/// Sum rate divided by total radiated power, in rate units per (P_u unit).
double ul_energy_efficiency(const arma::vec& rates, const arma::vec& eta, double P_u);

}  // namespace cfiot
