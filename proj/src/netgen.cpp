/**
 * @file netgen.cpp
 */
#include "cfiot/netgen.hpp"

#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace cfiot {

namespace {

constexpr double kMinDistM = 1.0;       // path-loss floor distance
constexpr double kShadowJitter = 1e-10;  // diagonal jitter before factorization

// Cholesky factor of an exponential-decay covariance over wrapped positions.
arma::mat field_factor(const arma::mat& pos, double side, double decorr) {
  const std::size_t n = pos.n_rows;
  arma::mat cov(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    cov(i, i) = 1.0 + kShadowJitter;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = wrap_distance(pos(i, 0), pos(i, 1), pos(j, 0), pos(j, 1), side);
      const double c = std::exp(-d / decorr);
      cov(i, j) = c;
      cov(j, i) = c;
    }
  }
  arma::mat L;
  if (!arma::chol(L, cov, "lower")) {
    throw std::runtime_error("shadow_field: covariance not positive definite after jitter");
  }
  return L;
}

arma::cx_mat make_pilots(std::size_t tau, std::size_t K, PilotMode mode, Rng& rng) {
  if (mode == PilotMode::orthogonal) {
    if (K > tau) {
      throw std::invalid_argument("orthogonal pilots require K <= pilot_len");
    }
    arma::cx_mat q, r;
    if (!arma::qr(q, r, randcn_mat(tau, tau, rng))) {
      throw std::runtime_error("pilot generation: QR failed");
    }
    return q.head_cols(K);
  }
  arma::cx_mat psi = randcn_mat(tau, K, rng);
  for (std::size_t k = 0; k < K; ++k) {
    psi.col(k) /= arma::norm(psi.col(k));
  }
  return psi;
}

}  // namespace

void RadioConfig::validate() const {
  if (carrier_freq <= 0) throw std::invalid_argument("carrier_freq must be > 0");
  if (bandwidth <= 0) throw std::invalid_argument("bandwidth must be > 0");
  if (pilot_len < 1) throw std::invalid_argument("pilot_len must be >= 1");
  if (coherence_len <= pilot_len) throw std::invalid_argument("coherence_len must exceed pilot_len");
  if (P_u <= 0 || P_p <= 0 || P_d <= 0) throw std::invalid_argument("powers must be > 0");
  if (sigma_sh < 0) throw std::invalid_argument("sigma_sh must be >= 0");
  if (shadow_split < 0 || shadow_split > 1) throw std::invalid_argument("shadow_split must be in [0,1]");
  if (shadow_mode == ShadowMode::correlated && shadow_decorr_dist <= 0) {
    throw std::invalid_argument("shadow_decorr_dist must be > 0 in correlated mode");
  }
  if (!(d0 > 0 && d1 > d0)) throw std::invalid_argument("breakpoints must satisfy 0 < d0 < d1");
  if (ap_height <= 0 || thing_height <= 0) throw std::invalid_argument("antenna heights must be > 0");
}

double RadioConfig::noise_power_mw() const {
  const double dbm = -174.0 + 10.0 * std::log10(bandwidth) + noise_figure;
  return std::pow(10.0, dbm / 10.0);
}

double RadioConfig::cost231_offset_db() const {
  const double f_mhz = carrier_freq * 1000.0;
  const double lf = std::log10(f_mhz);
  return 46.3 + 33.9 * lf - 13.82 * std::log10(ap_height) -
         (1.1 * lf - 0.7) * thing_height + (1.56 * lf - 0.8);
}

void Scenario::validate() const {
  if (beta.n_rows != M || beta.n_cols != K) throw std::invalid_argument("beta shape mismatch");
  if (!(beta.min() > 0)) throw std::invalid_argument("beta entries must be positive");
  for (std::size_t k = 0; k < K; ++k) {
    if (std::abs(arma::norm(pilots.col(k)) - 1.0) > 1e-12) {
      throw std::invalid_argument("pilot columns must have unit norm");
    }
  }
  if (ap_pos.min() < 0 || ap_pos.max() >= side || thing_pos.min() < 0 || thing_pos.max() >= side) {
    throw std::invalid_argument("positions must lie in [0, side)^2");
  }
}

double wrap_distance(double px, double py, double qx, double qy, double side) {
  double best = std::numeric_limits<double>::infinity();
  for (int ix = -1; ix <= 1; ++ix) {
    for (int iy = -1; iy <= 1; ++iy) {
      const double dx = px - (qx + ix * side);
      const double dy = py - (qy + iy * side);
      best = std::min(best, dx * dx + dy * dy);
    }
  }
  return std::sqrt(best);
}

double path_loss(double dist_m, const RadioConfig& cfg) {
  const double d_km = std::max(dist_m, kMinDistM) / 1000.0;
  const double d0_km = cfg.d0 / 1000.0;
  const double d1_km = cfg.d1 / 1000.0;
  const double L = cfg.cost231_offset_db();
  double pl_db;
  if (d_km > d1_km) {
    pl_db = -L - 35.0 * std::log10(d_km);
  } else if (d_km > d0_km) {
    pl_db = -L - 15.0 * std::log10(d1_km) - 20.0 * std::log10(d_km);
  } else {
    pl_db = -L - 15.0 * std::log10(d1_km) - 20.0 * std::log10(d0_km);
  }
  return db_to_linear(pl_db);
}

arma::mat shadow_field(const arma::mat& ap_pos, const arma::mat& thing_pos, double side,
                       const RadioConfig& cfg, Rng& rng) {
  const std::size_t m = ap_pos.n_rows;
  const std::size_t k = thing_pos.n_rows;
  if (cfg.shadow_mode == ShadowMode::iid) {
    arma::mat z(m, k);
    std::normal_distribution<double> dist(0.0, 1.0);
    for (std::size_t j = 0; j < k; ++j) {
      for (std::size_t i = 0; i < m; ++i) z(i, j) = dist(rng);
    }
    return z;
  }
  const arma::mat la = field_factor(ap_pos, side, cfg.shadow_decorr_dist);
  const arma::mat lb = field_factor(thing_pos, side, cfg.shadow_decorr_dist);
  const arma::vec a = la * randn_vec(m, rng);
  const arma::vec b = lb * randn_vec(k, rng);
  const double wa = std::sqrt(cfg.shadow_split);
  const double wb = std::sqrt(1.0 - cfg.shadow_split);
  arma::mat z(m, k);
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t i = 0; i < m; ++i) z(i, j) = wa * a[i] + wb * b[j];
  }
  return z;
}

Scenario generate_scenario(std::size_t M, std::size_t K, double side, const RadioConfig& cfg,
                           std::uint64_t seed) {
  cfg.validate();
  if (M < 1 || K < 1) throw std::invalid_argument("generate_scenario: M and K must be >= 1");
  if (side <= 0) throw std::invalid_argument("generate_scenario: side must be > 0");

  Scenario scn;
  scn.M = M;
  scn.K = K;
  scn.side = side;
  scn.seed = seed;
  scn.cfg = cfg;

  // Separate streams keep positions/shadowing stable when only the pilot
  // settings change (e.g. sweeping tau over one geometry).
  Rng pos_rng = make_stream(seed, 0x706f73);     // "pos"
  Rng shadow_rng = make_stream(seed, 0x736864);  // "shd"
  Rng pilot_rng = make_stream(seed, 0x70696c);   // "pil"

  std::uniform_real_distribution<double> unif(0.0, side);
  scn.ap_pos.set_size(M, 2);
  for (std::size_t i = 0; i < M; ++i) {
    scn.ap_pos(i, 0) = unif(pos_rng);
    scn.ap_pos(i, 1) = unif(pos_rng);
  }
  scn.thing_pos.set_size(K, 2);
  for (std::size_t i = 0; i < K; ++i) {
    scn.thing_pos(i, 0) = unif(pos_rng);
    scn.thing_pos(i, 1) = unif(pos_rng);
  }

  const arma::mat z = shadow_field(scn.ap_pos, scn.thing_pos, side, cfg, shadow_rng);
  scn.beta.set_size(M, K);
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t m = 0; m < M; ++m) {
      const double d = wrap_distance(scn.ap_pos(m, 0), scn.ap_pos(m, 1), scn.thing_pos(k, 0),
                                     scn.thing_pos(k, 1), side);
      scn.beta(m, k) = path_loss(d, cfg) * db_to_linear(cfg.sigma_sh * z(m, k));
    }
  }

  scn.pilots = make_pilots(cfg.pilot_len, K, cfg.pilot_mode, pilot_rng);

  const double n0 = cfg.noise_power_mw();
  scn.rho_p = cfg.P_p / n0;
  scn.rho_u = cfg.P_u / n0;
  scn.rho_d = cfg.P_d / n0;
  return scn;
}

void dump_scenario(const Scenario& scn, const std::string& path) {
  nlohmann::json j;
  j["M"] = scn.M;
  j["K"] = scn.K;
  j["side"] = scn.side;
  j["seed"] = scn.seed;
  auto pos_to_json = [](const arma::mat& p) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < p.n_rows; ++i) rows.push_back({p(i, 0), p(i, 1)});
    return rows;
  };
  j["ap_pos"] = pos_to_json(scn.ap_pos);
  j["thing_pos"] = pos_to_json(scn.thing_pos);
  nlohmann::json beta_db = nlohmann::json::array();
  for (std::size_t m = 0; m < scn.M; ++m) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t k = 0; k < scn.K; ++k) row.push_back(linear_to_db(scn.beta(m, k)));
    beta_db.push_back(std::move(row));
  }
  j["beta_db"] = std::move(beta_db);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("dump_scenario: cannot open " + path);
  out << j.dump(2) << "\n";
}

}  // namespace cfiot
