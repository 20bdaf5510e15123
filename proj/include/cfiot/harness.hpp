/**
 * @file harness.hpp
 * @brief Experiment runner: scenario batches, Monte-Carlo loops, the MR
 * uplink baseline, CDFs, timings, and result persistence.
 */
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cfiot/dl_power.hpp"
#include "cfiot/regressor.hpp"
#include "cfiot/ul_power.hpp"

namespace cfiot {

enum class ExperimentId {
  ul_rm_accuracy,
  ul_maxmin_compare,
  ul_target_ee,
  dl_nn_area_transfer,
  dl_density_transfer,
  dl_ee_large,
};

std::string to_string(ExperimentId id);
ExperimentId experiment_id_from_string(const std::string& name);
std::vector<std::string> experiment_registry();

enum class Preset { desk, paper };

struct ExperimentSpec {
  ExperimentId id = ExperimentId::ul_rm_accuracy;
  Preset preset = Preset::desk;
  std::uint64_t seed = 1;
  std::size_t trials = 0;  ///< scenario count; 0 = preset default
  std::size_t draws = 0;   ///< Monte-Carlo draws per scenario; 0 = preset default
  std::string out_dir;     ///< empty = keep results in memory only
  RadioConfig radio;
  // optional scenario geometry overrides (0 = preset default)
  std::size_t M = 0;
  std::size_t K = 0;
  std::size_t tau = 0;
  double side = 0.0;
};

struct RateRow {
  std::size_t thing_id = 0;
  std::size_t trial = 0;
  double rate_bps = 0.0;
  double rate_se = 0.0;
  std::string algorithm;
};

struct ResultTable {
  std::vector<RateRow> rows;
  std::map<std::string, double> scalars;  ///< EE values, timings, counters
  std::map<std::string, std::vector<std::pair<double, double>>> cdfs;
  std::vector<std::string> notes;

  std::vector<double> rates_for(const std::string& algorithm) const;
};

/// Executes the scripted pipeline for the experiment id; deterministic for a
/// fixed (spec, seed). Writes results.csv, cdf.csv, summary.json and
/// resolved_config.json when out_dir is set.
ResultTable run_experiment(const ExperimentSpec& spec);

/// Maximum-ratio combining baseline: the receiver is the channel estimate
/// itself instead of the optimal combiner.
arma::vec mr_receiver_sinr(const ChannelDraw& draw, const EstimationStats& stats,
                           const UlPowerAllocation& alloc, double rho_u);

/// Right-continuous step CDF over the sorted unique values.
std::vector<std::pair<double, double>> empirical_cdf(std::vector<double> values);

/// Two-sample Kolmogorov-Smirnov distance.
double ks_distance(std::vector<double> a, std::vector<double> b);

/// Build-time version string (git describe when available).
const char* artifact_version();

}  // namespace cfiot
