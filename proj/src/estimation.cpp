/**
 * @file estimation.cpp
 */
#include "cfiot/estimation.hpp"

#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace cfiot {

arma::cx_mat estimator_vectors_for_ap(const Scenario& scn, std::size_t m) {
  const std::size_t tau = scn.cfg.pilot_len;
  const double tp = tau * scn.rho_p;
  const double sq_tp = std::sqrt(tp);

  // Normal matrix of the pilot observation at AP m; Hermitian and >= I.
  arma::cx_mat c_m(tau, tau, arma::fill::eye);
  // tau*rho_p * Psi B_m Psi^H accumulated as a scaled Gram product.
  arma::cx_mat scaled = scn.pilots;
  for (std::size_t k = 0; k < scn.K; ++k) scaled.col(k) *= std::sqrt(tp * scn.beta(m, k));
  c_m += scaled * scaled.t();

  arma::cx_mat chol_u;
  if (!arma::chol(chol_u, c_m)) {
    throw std::runtime_error("compute_stats: pilot normal matrix factorization failed");
  }
  // One factorization reused for all K right-hand sides.
  arma::cx_mat sol = arma::solve(arma::trimatu(chol_u),
                                 arma::solve(arma::trimatl(chol_u.t()), scn.pilots));
  for (std::size_t k = 0; k < scn.K; ++k) sol.col(k) *= sq_tp * scn.beta(m, k);
  return sol;  // tau x K, column k = a_mk
}

EstimationStats compute_stats(const Scenario& scn, StatsStorage storage) {
  scn.validate();
  const std::size_t M = scn.M;
  const std::size_t K = scn.K;
  const std::size_t tau = scn.cfg.pilot_len;

  EstimationStats stats;
  stats.beta = scn.beta;
  stats.gamma.set_size(M, K);
  stats.rho_p = scn.rho_p;
  stats.tau = tau;
  if (storage == StatsStorage::full) stats.a.set_size(tau, K, M);

  const double sq_tp = std::sqrt(static_cast<double>(tau) * scn.rho_p);

  parallel_for(M, [&](std::size_t m) {
    const arma::cx_mat a_m = estimator_vectors_for_ap(scn, m);
    for (std::size_t k = 0; k < K; ++k) {
      const std::complex<double> inner =
          sq_tp * scn.beta(m, k) * arma::cdot(scn.pilots.col(k), a_m.col(k));
      // gamma is real by construction; the imaginary residue flags bugs.
      if (std::abs(inner.imag()) > 1e-9) {
        throw std::runtime_error("compute_stats: non-real estimate variance");
      }
      stats.gamma(m, k) = inner.real();
    }
    if (storage == StatsStorage::full) stats.a.slice(m) = a_m;
  });
  return stats;
}

ChannelDraw draw_channel(const Scenario& scn, const EstimationStats& stats, Rng& rng) {
  if (!stats.has_vectors()) {
    throw std::invalid_argument("draw_channel requires full stats storage");
  }
  const std::size_t M = scn.M;
  const std::size_t K = scn.K;
  const std::size_t tau = stats.tau;
  const double sq_tp = std::sqrt(static_cast<double>(tau) * scn.rho_p);

  ChannelDraw draw;
  draw.G = randcn_mat(M, K, rng) % arma::conv_to<arma::cx_mat>::from(arma::sqrt(scn.beta));
  draw.Y.set_size(tau, M);
  draw.G_hat.set_size(M, K);
  const arma::cx_mat noise = randcn_mat(tau, M, rng);
  for (std::size_t m = 0; m < M; ++m) {
    draw.Y.col(m) = sq_tp * (scn.pilots * draw.G.row(m).st()) + noise.col(m);
    draw.G_hat.row(m) = (stats.a.slice(m).t() * draw.Y.col(m)).st();
  }
  return draw;
}

arma::cx_mat estimate_cross_cov(const Scenario& scn, const EstimationStats& stats,
                                std::size_t n_draws, Rng& rng) {
  if (n_draws < 100) throw std::invalid_argument("estimate_cross_cov: need n_draws >= 100");
  const std::size_t M = scn.M;
  const std::size_t K = scn.K;

  arma::cx_cube prod(K, K, M, arma::fill::zeros);  // sum over draws of ghat ghat^H per AP
  arma::cx_mat mean(M, K, arma::fill::zeros);
  for (std::size_t n = 0; n < n_draws; ++n) {
    const ChannelDraw draw = draw_channel(scn, stats, rng);
    mean += draw.G_hat;
    for (std::size_t m = 0; m < M; ++m) {
      const arma::cx_vec row = draw.G_hat.row(m).st();
      prod.slice(m) += row * row.t();
    }
  }
  mean /= static_cast<double>(n_draws);

  arma::cx_mat cov(K, K, arma::fill::zeros);
  for (std::size_t m = 0; m < M; ++m) {
    const arma::cx_vec mu = mean.row(m).st();
    cov += prod.slice(m) / static_cast<double>(n_draws) - mu * mu.t();
  }
  return cov / static_cast<double>(M);
}

void dump_stats(const EstimationStats& stats, const std::string& path) {
  nlohmann::json j;
  nlohmann::json gamma_db = nlohmann::json::array();
  for (std::size_t m = 0; m < stats.n_aps(); ++m) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t k = 0; k < stats.n_things(); ++k) row.push_back(linear_to_db(stats.gamma(m, k)));
    gamma_db.push_back(std::move(row));
  }
  j["gamma_db"] = std::move(gamma_db);
  j["tau"] = stats.tau;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("dump_stats: cannot open " + path);
  out << j.dump(2) << "\n";
}

}  // namespace cfiot
