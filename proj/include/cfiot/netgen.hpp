/**
 * @file netgen.hpp
 * @brief Network scenario generation: AP/thing placement on a wrap-around
 * square, three-slope path loss, shadow fading, and pilot books.
 */
#pragma once

#include <cstdint>
#include <string>

#include "cfiot/common.hpp"

namespace cfiot {

enum class ShadowMode { iid, correlated };
enum class PilotMode { random_unit, orthogonal };

/// Radio-layer constants shared by every experiment. Distances in meters,
/// powers in mW, frequencies as annotated.
struct RadioConfig {
  double carrier_freq = 1.9;         ///< GHz
  double bandwidth = 20e6;           ///< Hz
  std::size_t pilot_len = 32;        ///< tau, symbols
  std::size_t coherence_len = 1000;  ///< tau_c, symbols
  double P_u = 20.0;                 ///< per-thing uplink data power, mW
  double P_p = 20.0;                 ///< per-thing pilot power, mW
  double P_d = 200.0;                ///< per-AP downlink power, mW
  double noise_figure = 9.0;         ///< dB
  double sigma_sh = 8.0;             ///< shadow fading std dev, dB
  ShadowMode shadow_mode = ShadowMode::iid;
  double shadow_decorr_dist = 100.0;  ///< m, correlated mode only
  double shadow_split = 0.5;          ///< delta in [0,1]: AP vs thing share
  double ap_height = 15.0;            ///< m
  double thing_height = 1.65;         ///< m
  double d0 = 10.0;                   ///< inner breakpoint, m
  double d1 = 50.0;                   ///< outer breakpoint, m
  PilotMode pilot_mode = PilotMode::random_unit;

  void validate() const;  // throws std::invalid_argument on a bad field

  /// Thermal noise power in mW: -174 dBm/Hz + 10log10(B) + noise figure.
  double noise_power_mw() const;

  /// Fixed attenuation (dB) of the Hata-COST231 urban model at 1 km for the
  /// configured carrier frequency and antenna heights.
  double cost231_offset_db() const;
};

/// One network realization. beta is the large-scale power gain matrix,
/// pilots hold unit-norm columns, rho_* are per-symbol SNRs normalized to
/// unit noise power.
struct Scenario {
  std::size_t M = 0;
  std::size_t K = 0;
  double side = 0.0;    ///< D, m
  arma::mat ap_pos;     ///< M x 2
  arma::mat thing_pos;  ///< K x 2
  arma::mat beta;       ///< M x K, linear
  arma::cx_mat pilots;  ///< tau x K
  double rho_p = 0.0;
  double rho_u = 0.0;
  double rho_d = 0.0;
  std::uint64_t seed = 0;
  RadioConfig cfg;

  void validate() const;
};

/// Shortest distance between p and q on the D x D torus (9-image minimum).
double wrap_distance(double px, double py, double qx, double qy, double side);

/// Three-slope path loss as a linear power gain. Distances below 1 m are
/// floored to keep the model finite.
double path_loss(double dist_m, const RadioConfig& cfg);

/// M x K field of N(0,1) shadowing variates. In correlated mode each entry is
/// sqrt(delta)*a_m + sqrt(1-delta)*b_k with exp(-dist/decorr) covariances on
/// the AP and thing sides; wrap distance is used for both.
arma::mat shadow_field(const arma::mat& ap_pos, const arma::mat& thing_pos, double side,
                       const RadioConfig& cfg, Rng& rng);

/// Draws a full scenario: uniform positions, beta = PL * 10^(sigma z / 10),
/// pilot book per cfg.pilot_mode, and normalized SNRs from the noise power.
Scenario generate_scenario(std::size_t M, std::size_t K, double side, const RadioConfig& cfg,
                           std::uint64_t seed);

/// Writes positions, beta (dB) and the seed as JSON.
void dump_scenario(const Scenario& scn, const std::string& path);

}  // namespace cfiot
