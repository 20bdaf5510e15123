/**
 * @file ul_power.cpp
 */
#include "cfiot/ul_power.hpp"

#include <stdexcept>

namespace cfiot {

namespace {

void check_weights(const arma::vec& u, const arma::vec& nu, std::size_t K) {
  if (u.n_elem != K || nu.n_elem != K) throw std::invalid_argument("weight vector length mismatch");
  if (u.min() <= 0) throw std::invalid_argument("rate weights must be positive");
  if (nu.min() <= 0) throw std::invalid_argument("power weights must be positive");
}

/// d_k = rho'_k ghat_k^H inv(sum_k' c_k' J_k' + I) ghat_k for all k, where
/// J_k = ghat_k ghat_k^H + diag(beta_k - gamma_k).
arma::vec quadratic_forms(const arma::cx_mat& g_hat, const EstimationStats& stats,
                          const arma::vec& rho_eff, const arma::vec& coeff) {
  const std::size_t K = stats.n_things();
  arma::cx_mat scaled = g_hat;
  for (std::size_t k = 0; k < K; ++k) scaled.col(k) *= std::sqrt(coeff[k]);
  arma::cx_mat lhs = scaled * scaled.t();
  lhs.diag() += arma::conv_to<arma::cx_vec>::from((stats.beta - stats.gamma) * coeff + 1.0);

  arma::cx_mat chol_u;
  if (!arma::chol(chol_u, lhs)) {
    throw std::runtime_error("maxmin_power_exact: matrix factorization failed");
  }
  const arma::cx_mat half = arma::solve(arma::trimatl(chol_u.t()), g_hat);
  arma::vec d(K);
  for (std::size_t k = 0; k < K; ++k) {
    d[k] = rho_eff[k] * std::real(arma::cdot(half.col(k), half.col(k)));
  }
  return d;
}

}  // namespace

MaxminExactResult maxmin_power_exact(const ChannelDraw& draw, const EstimationStats& stats,
                                     const arma::vec& u, const arma::vec& nu, double rho_u,
                                     double eps, std::size_t max_iter) {
  const std::size_t K = stats.n_things();
  check_weights(u, nu, K);
  if (eps <= 0) throw std::invalid_argument("eps must be positive");

  const arma::vec rho_eff = rho_u * nu;

  MaxminExactResult res;
  res.d = quadratic_forms(draw.G_hat, stats, rho_eff, rho_eff);  // eta^(0) = 1
  for (std::size_t it = 1; it <= max_iter; ++it) {
    const double alpha = (res.d / u).min();
    const arma::vec coeff = alpha * (rho_eff % u / res.d);  // implied eta in (0,1]
    const arma::vec d_next = quadratic_forms(draw.G_hat, stats, rho_eff, coeff);
    const double diff = arma::abs(d_next - res.d).max();
    res.d = d_next;
    res.iterations = it;
    res.residuals.push_back(diff);
    if (diff <= eps) {
      res.converged = true;
      break;
    }
  }
  const arma::vec weighted = res.d / u;
  res.eta = weighted.min() / weighted;  // the argmin thing gets exactly 1
  return res;
}

MaxminRmResult maxmin_power_rm(const EstimationStats& stats, const arma::vec& u,
                               const arma::vec& nu, double rho_u, double eps,
                               std::size_t max_iter) {
  const std::size_t K = stats.n_things();
  const std::size_t M = stats.n_aps();
  check_weights(u, nu, K);
  if (eps <= 0) throw std::invalid_argument("eps must be positive");
  const double m_d = static_cast<double>(M);

  // Start from the full-power deterministic-equivalent state.
  UlPowerAllocation full;
  full.eta = arma::vec(K, arma::fill::ones);
  full.u = u;
  full.nu = nu;
  const RmState init = rm_fixed_point(stats, full, rho_u);
  if (!init.converged) throw std::runtime_error("maxmin_power_rm: initial fixed point failed");

  MaxminRmResult res;
  res.T_diag = init.T_diag;
  for (std::size_t it = 1; it <= max_iter; ++it) {
    const arma::vec s = stats.gamma.t() * res.T_diag;      // tr(Gamma_k T)
    const double alpha = ((nu % s) / u).min();
    const arma::vec xi = (rho_u * alpha / m_d) * u;
    // T_mm <- 1 / (alpha/M sum_k rho_u u_k / s_k * (beta_mk - xi_k gamma_mk/(1+xi_k)) + 1/M)
    const arma::vec c = (alpha / m_d) * (rho_u * u / s);
    const arma::vec shrink = xi / (1.0 + xi);
    const arma::vec denom = stats.beta * c - stats.gamma * (c % shrink) + 1.0 / m_d;
    const arma::vec t_next = 1.0 / denom;
    const double diff = arma::abs(t_next - res.T_diag).max();
    res.T_diag = t_next;
    res.iterations = it;
    res.residuals.push_back(diff);
    if (diff <= eps) {
      res.converged = true;
      break;
    }
  }
  const arma::vec s = stats.gamma.t() * res.T_diag;
  const arma::vec weighted = (nu % s) / u;
  res.eta = weighted.min() / weighted;
  return res;
}

TargetRateResult target_rate_power_rm(const EstimationStats& stats, const arma::vec& nu,
                                      double rho_u, double target_sinr, double u_good,
                                      double u_poor, double eps, std::size_t max_iter) {
  const std::size_t K = stats.n_things();
  const std::size_t M = stats.n_aps();
  if (nu.n_elem != K || nu.min() <= 0) throw std::invalid_argument("bad power weights");
  if (target_sinr <= 0) throw std::invalid_argument("target SINR must be positive");
  if (!(u_poor > 0 && u_poor <= u_good)) throw std::invalid_argument("need 0 < u_poor <= u_good");
  const double m_d = static_cast<double>(M);

  UlPowerAllocation full;
  full.eta = arma::vec(K, arma::fill::ones);
  full.u = arma::vec(K, arma::fill::ones);
  full.nu = nu;
  const RmState init = rm_fixed_point(stats, full, rho_u);
  if (!init.converged) throw std::runtime_error("target_rate_power_rm: initial fixed point failed");

  TargetRateResult res;
  const double alpha0 = target_sinr * m_d / rho_u;

  // Runs the diagonal fixed point with per-thing equalization targets xi and
  // rate weights uw; returns the converged diagonal.
  auto iterate = [&](const arma::vec& uw, const arma::vec& xi, double alpha,
                     arma::vec t_diag) -> arma::vec {
    res.converged = false;
    const arma::vec shrink = xi / (1.0 + xi);
    for (std::size_t it = 1; it <= max_iter; ++it) {
      const arma::vec s = stats.gamma.t() * t_diag;
      const arma::vec c = (alpha / m_d) * (rho_u * uw / s);
      const arma::vec denom = stats.beta * c - stats.gamma * (c % shrink) + 1.0 / m_d;
      arma::vec t_next = 1.0 / denom;
      const double diff = arma::abs(t_next - t_diag).max();
      t_diag = std::move(t_next);
      res.iterations = it;
      res.residuals.push_back(diff);
      if (diff <= eps) {
        res.converged = true;
        break;
      }
    }
    return t_diag;
  };

  // Phase 1: every thing targets target_sinr with unit rate weights.
  arma::vec ones_k(K, arma::fill::ones);
  arma::vec t_diag = iterate(ones_k, arma::vec(K, arma::fill::value(target_sinr)), alpha0,
                             init.T_diag);
  arma::vec s = stats.gamma.t() * t_diag;
  res.eta = alpha0 / (nu % s);
  res.good_mask = arma::uvec(K, arma::fill::ones);
  res.clamped_mask = arma::uvec(K, arma::fill::zeros);
  if (res.converged && res.eta.max() <= 1.0) {
    return res;
  }

  // Phase 2: classify by full-power deterministic-equivalent SINR and
  // down-weight the poor things.
  res.reweighted = true;
  const arma::vec full_sinr = rm_sinr(init, stats, full, rho_u);
  arma::vec uw(K);
  for (std::size_t k = 0; k < K; ++k) {
    const bool good = full_sinr[k] >= target_sinr;
    res.good_mask[k] = good ? 1 : 0;
    uw[k] = good ? u_good : u_poor;
  }
  const double alpha2 = alpha0 / u_good;
  t_diag = iterate(uw, (target_sinr / u_good) * uw, alpha2, init.T_diag);
  s = stats.gamma.t() * t_diag;
  res.eta = alpha2 * uw / (nu % s);
  for (std::size_t k = 0; k < K; ++k) {
    if (res.eta[k] > 1.0) {
      res.eta[k] = 1.0;
      res.clamped_mask[k] = 1;
    }
  }
  return res;
}

double ul_energy_efficiency(const arma::vec& rates, const arma::vec& eta, double P_u) {
  if (rates.n_elem != eta.n_elem) throw std::invalid_argument("length mismatch");
  const double spent = arma::sum(eta);
  if (spent <= 0) throw std::invalid_argument("ul_energy_efficiency: all-zero eta");
  return arma::sum(rates) / (P_u * spent);
}

}  // namespace cfiot
