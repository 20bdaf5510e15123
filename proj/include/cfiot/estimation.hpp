/**
 * @file estimation.hpp
 * @brief LMMSE channel estimation second-order statistics and small-scale
 * channel draws.
 */
#pragma once

#include <string>

#include "cfiot/netgen.hpp"

namespace cfiot {

enum class StatsStorage {
  full,        ///< keep the per-(m,k) estimator vectors (needed for draws)
  gamma_only,  ///< keep only beta/gamma; for large scenarios
};

/// Second-order statistics of the LMMSE channel estimates. gamma(m,k) is the
/// variance of the estimate of channel (m,k); a.slice(m).col(k) is the
/// estimator vector applied to AP m's pilot observation.
struct EstimationStats {
  arma::mat beta;   ///< M x K (copied from the scenario)
  arma::mat gamma;  ///< M x K
  arma::cx_cube a;  ///< tau x K x M; empty under gamma_only storage
  double rho_p = 0.0;
  std::size_t tau = 0;

  std::size_t n_aps() const { return beta.n_rows; }
  std::size_t n_things() const { return beta.n_cols; }
  bool has_vectors() const { return !a.is_empty(); }
};

/// One small-scale realization: true channels, pilot observations, and the
/// LMMSE estimates derived from them.
struct ChannelDraw {
  arma::cx_mat G;      ///< M x K
  arma::cx_mat G_hat;  ///< M x K
  arma::cx_mat Y;      ///< tau x M
};

/// Per-AP estimator vectors for one AP: solves the pilot normal equations
/// once and scales the K right-hand sides. Shared by compute_stats and the
/// streaming downlink evaluator.
arma::cx_mat estimator_vectors_for_ap(const Scenario& scn, std::size_t m);

EstimationStats compute_stats(const Scenario& scn, StatsStorage storage = StatsStorage::full);

ChannelDraw draw_channel(const Scenario& scn, const EstimationStats& stats, Rng& rng);

/// Empirical K x K covariance of the estimates across things, averaged over
/// APs; diagnostic for the pilot-decorrelation trend.
arma::cx_mat estimate_cross_cov(const Scenario& scn, const EstimationStats& stats,
                                std::size_t n_draws, Rng& rng);

/// Debug dump of the gamma matrix in dB as JSON.
void dump_stats(const EstimationStats& stats, const std::string& path);

}  // namespace cfiot
