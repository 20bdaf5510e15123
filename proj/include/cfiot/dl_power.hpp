/**
 * @file dl_power.hpp
 * @brief Downlink power control under maximum-ratio precoding: closed-form
 * SINR evaluation, full max-min bisection, the reduced convex problem for
 * known per-AP powers, and the scalable uniform rule.
 */
#pragma once

#include <vector>

#include "cfiot/estimation.hpp"

namespace cfiot {

/// Downlink coefficients. p_m = sum_k eta_mk gamma_mk is each AP's
/// normalized transmit power and must stay within [0,1].
struct DlPowerAllocation {
  arma::mat eta;  ///< M x K, >= 0
  arma::vec p;    ///< M
};

/// p_m = sum_k eta_mk gamma_mk.
arma::vec per_ap_power(const arma::mat& eta, const EstimationStats& stats);

/// Closed-form downlink SINR including the pilot-contamination terms. Uses
/// the stored estimator vectors when stats carries them, otherwise streams
/// per-AP recomputation (suitable for very large scenarios).
arma::vec dl_sinr_closed_form(const Scenario& scn, const EstimationStats& stats,
                              const DlPowerAllocation& alloc);

/// Evaluates several uniform-rule allocations (one per p vector) in a single
/// streaming pass; returns the closed-form SINR vector for each.
std::vector<arma::vec> dl_sinr_uniform_streaming(const Scenario& scn,
                                                 const std::vector<arma::vec>& p_list);

/// Reduced-model SINR when per-AP powers are fixed:
/// rho_d (sum_m sqrt(eta_mk) gamma_mk)^2 / (1 + rho_d sum_m p_m beta_mk).
arma::vec dl_sinr_given_p_model(const EstimationStats& stats, const arma::vec& p,
                                const arma::mat& eta, double rho_d);

struct DlSolveStats {
  std::size_t bisection_steps = 0;
  std::size_t feasibility_iterations = 0;  ///< summed inner iterations
  bool ok = true;
};

struct DlMaxminResult {
  DlPowerAllocation alloc;
  double min_sinr = 0.0;  ///< closed-form min SINR at the returned point
  DlSolveStats stats;
};

/// Full quasi-concave max-min power control: bisection over the target SINR
/// with a convex (second-order-cone representable) feasibility subproblem
/// solved by a projected accelerated gradient scheme.
DlMaxminResult maxmin_dl_full(const Scenario& scn, const EstimationStats& stats, double rho_d,
                              double tol = 1e-3);

struct DlGivenPResult {
  DlPowerAllocation alloc;
  double min_sinr = 0.0;         ///< reduced-model min SINR
  arma::uvec slack_aps;          ///< APs left below their power budget
  DlSolveStats stats;
};

/// Reduced convex max-min for known per-AP powers. The per-AP equality
/// constraint is relaxed to an inequality during the search and restored by
/// scaling each AP's row up when that cannot lower any SINR.
DlGivenPResult maxmin_dl_given_p(const Scenario& scn, const EstimationStats& stats,
                                 const arma::vec& p, double rho_d, double tol = 1e-3);

/// Uniform rule: eta_mk = p_m / sum_k' gamma_mk' for every k. APs with an
/// all-zero gamma row are switched off.
DlPowerAllocation uniform_power(const EstimationStats& stats, const arma::vec& p);

struct DlRateResult {
  arma::vec spectral;    ///< bits/s/Hz
  arma::vec throughput;  ///< bits/s
  double energy_efficiency = 0.0;  ///< sum throughput / sum radiated power
};

/// Rates with the half-duplex prefactor plus downlink energy efficiency for
/// per-AP powers p_m * P_d.
DlRateResult dl_rate_and_ee(const arma::vec& sinr, const arma::vec& p, double P_d,
                            const RadioConfig& cfg);

}  // namespace cfiot
