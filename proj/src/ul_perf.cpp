/**
 * @file ul_perf.cpp
 */
#include "cfiot/ul_perf.hpp"

#include <stdexcept>

namespace cfiot {

UlPowerAllocation UlPowerAllocation::full_power(std::size_t K) {
  UlPowerAllocation alloc;
  alloc.eta = arma::vec(K, arma::fill::ones);
  alloc.u = arma::vec(K, arma::fill::value(1.0 / std::sqrt(static_cast<double>(K))));
  alloc.nu = arma::vec(K, arma::fill::ones);
  return alloc;
}

void UlPowerAllocation::validate() const {
  if (eta.n_elem != u.n_elem || eta.n_elem != nu.n_elem) {
    throw std::invalid_argument("allocation vectors must share length");
  }
  if (eta.min() < 0 || eta.max() > 1) throw std::invalid_argument("eta must lie in [0,1]");
  if (u.min() < 0 || nu.min() < 0) throw std::invalid_argument("weights must be nonnegative");
}

arma::vec noise_plus_error_diag(const EstimationStats& stats, const UlPowerAllocation& alloc,
                                double rho_u) {
  const arma::vec w = alloc.effective();
  return rho_u * ((stats.beta - stats.gamma) * w) + 1.0;
}

arma::vec exact_mmse_sinr(const ChannelDraw& draw, const EstimationStats& stats,
                          const UlPowerAllocation& alloc, double rho_u) {
  const std::size_t M = stats.n_aps();
  const std::size_t K = stats.n_things();
  const arma::vec w = alloc.effective();
  const arma::vec d = noise_plus_error_diag(stats, alloc, rho_u);

  // Lambda = rho_u sum_k w_k ghat_k ghat_k^H + diag(d)
  arma::cx_mat scaled = draw.G_hat;
  for (std::size_t k = 0; k < K; ++k) scaled.col(k) *= std::sqrt(rho_u * w[k]);
  arma::cx_mat lambda = scaled * scaled.t();
  lambda.diag() += arma::conv_to<arma::cx_vec>::from(d);

  arma::cx_mat chol_u;
  if (!arma::chol(chol_u, lambda)) {
    throw std::runtime_error("exact_mmse_sinr: receiver matrix factorization failed");
  }
  // One factorization, K right-hand sides: q_k = rho_u w_k ghat_k^H inv(Lambda) ghat_k.
  const arma::cx_mat half = arma::solve(arma::trimatl(chol_u.t()), draw.G_hat);
  arma::vec sinr(K);
  for (std::size_t k = 0; k < K; ++k) {
    const double q = rho_u * w[k] * std::real(arma::cdot(half.col(k), half.col(k)));
    if (!(q >= 0.0 && q < 1.0)) {
      throw std::runtime_error("exact_mmse_sinr: quadratic form out of [0,1)");
    }
    sinr[k] = q / (1.0 - q);
  }
  (void)M;
  return sinr;
}

RmState rm_fixed_point(const EstimationStats& stats, const UlPowerAllocation& alloc, double rho_u,
                       double tol, std::size_t max_iter) {
  if (tol <= 0) throw std::invalid_argument("rm_fixed_point: tol must be > 0");
  const std::size_t M = stats.n_aps();
  const std::size_t K = stats.n_things();
  const arma::vec w = alloc.effective();
  const arma::vec d = noise_plus_error_diag(stats, alloc, rho_u);
  const double m_d = static_cast<double>(M);

  RmState state;
  state.e = arma::vec(K, arma::fill::value(m_d));
  arma::vec denom(M);
  for (std::size_t it = 1; it <= max_iter; ++it) {
    // denom_m = rho_u/M sum_j w_j gamma_mj / (1+e_j) + D_mm / M
    const arma::vec damped = (rho_u / m_d) * (w / (1.0 + state.e));
    denom = stats.gamma * damped + d / m_d;
    const arma::vec e_next = (rho_u / m_d) * (w % (stats.gamma.t() * (1.0 / denom)));
    const double diff = arma::abs(e_next - state.e).max();
    const double scale = std::max(1.0, arma::abs(e_next).max());
    state.e = e_next;
    state.iterations = it;
    state.residuals.push_back(diff);
    if (diff <= tol * scale) {
      state.converged = true;
      break;
    }
  }
  // T diagonal at the final iterate.
  const arma::vec damped = (rho_u / m_d) * (w / (1.0 + state.e));
  state.T_diag = 1.0 / (stats.gamma * damped + d / m_d);
  return state;
}

arma::vec rm_sinr(const RmState& state, const EstimationStats& stats,
                  const UlPowerAllocation& alloc, double rho_u) {
  if (!state.converged) throw std::runtime_error("rm_sinr: fixed point did not converge");
  const double m_d = static_cast<double>(stats.n_aps());
  const arma::vec w = alloc.effective();
  return (rho_u / m_d) * (w % (stats.gamma.t() * state.T_diag));
}

double throughput_prefactor(const RadioConfig& cfg) {
  const double tau = static_cast<double>(cfg.pilot_len);
  const double tau_c = static_cast<double>(cfg.coherence_len);
  return cfg.bandwidth * (tau_c - tau) / (2.0 * tau_c);
}

std::pair<arma::vec, arma::vec> rate_and_throughput(const arma::vec& sinr, const RadioConfig& cfg) {
  if (sinr.n_elem > 0 && sinr.min() < 0) {
    throw std::invalid_argument("rate_and_throughput: SINRs must be >= 0");
  }
  arma::vec rates = arma::log2(1.0 + sinr);
  arma::vec tp = throughput_prefactor(cfg) * rates;
  return {std::move(rates), std::move(tp)};
}

}  // namespace cfiot
