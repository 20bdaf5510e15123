/**
 * @file harness.cpp
 */
#include "cfiot/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "cfiot/config_io.hpp"

#ifndef CFIOT_VERSION
#define CFIOT_VERSION "0.1.0-unknown"
#endif

namespace cfiot {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::uint64_t child_seed(std::uint64_t seed, std::uint64_t tag, std::uint64_t index) {
  return mix64(mix64(mix64(seed) ^ tag) ^ index);
}

constexpr std::uint64_t kTagScenario = 0x7363656eULL;  // "scen"
constexpr std::uint64_t kTagDraw = 0x64726177ULL;      // "draw"
constexpr std::uint64_t kTagTrain = 0x7472616eULL;     // "tran"
constexpr std::uint64_t kTagEval = 0x6576616cULL;      // "eval"

double percentile(std::vector<double> v, double q) {
  if (v.empty()) throw std::invalid_argument("percentile of empty sample");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] * (1.0 - frac) + v[hi] * frac;
}

double median(std::vector<double> v) { return percentile(std::move(v), 0.5); }

struct Resolved {
  std::size_t M = 0, K = 0, tau = 0;
  double side = 0.0;
  std::size_t scenarios = 0, draws = 0;
  RadioConfig radio;
};

Resolved resolve_geometry(const ExperimentSpec& spec, std::size_t m, std::size_t k,
                          std::size_t tau, double side, std::size_t scen, std::size_t draws) {
  Resolved r;
  r.M = spec.M != 0 ? spec.M : m;
  r.K = spec.K != 0 ? spec.K : k;
  r.tau = spec.tau != 0 ? spec.tau : tau;
  r.side = spec.side > 0.0 ? spec.side : side;
  r.scenarios = spec.trials != 0 ? spec.trials : scen;
  r.draws = spec.draws != 0 ? spec.draws : draws;
  r.radio = spec.radio;
  r.radio.pilot_len = r.tau;
  return r;
}

/// Monte-Carlo per-thing spectral rates (mean and standard error) of a
/// SINR functional, parallel over draws with per-draw derived streams.
struct McRates {
  arma::vec mean;  // K
  arma::vec se;    // K
};

McRates mc_rates(const Scenario& scn, const EstimationStats& stats, std::size_t draws,
                 std::uint64_t seed_base,
                 const std::function<arma::vec(const ChannelDraw&)>& sinr_fn) {
  const std::size_t K = scn.K;
  arma::mat per_draw(draws, K);
  parallel_for(draws, [&](std::size_t d) {
    Rng rng = make_stream(seed_base, kTagDraw, d);
    const ChannelDraw draw = draw_channel(scn, stats, rng);
    per_draw.row(d) = arma::log2(1.0 + sinr_fn(draw)).t();
  });
  McRates out;
  out.mean = arma::mean(per_draw, 0).t();
  if (draws > 1) {
    out.se = arma::stddev(per_draw, 0, 0).t() / std::sqrt(static_cast<double>(draws));
  } else {
    out.se = arma::vec(K, arma::fill::zeros);
  }
  return out;
}

void append_rates(ResultTable& table, const std::string& algorithm, std::size_t trial,
                  const arma::vec& spectral, const arma::vec& se, double prefactor) {
  for (std::size_t k = 0; k < spectral.n_elem; ++k) {
    table.rows.push_back(
        {k, trial, prefactor * spectral[k], prefactor * se[k], algorithm});
  }
}

void write_outputs(const ExperimentSpec& spec, const Resolved& res, const ResultTable& table) {
  if (spec.out_dir.empty()) return;
  namespace fs = std::filesystem;
  fs::create_directories(spec.out_dir);
  const fs::path dir(spec.out_dir);

  {
    std::ofstream csv(dir / "results.csv");
    csv << "thing_id,trial,rate_bps,rate_se,algorithm\n";
    char buf[64];
    for (const RateRow& row : table.rows) {
      csv << row.thing_id << "," << row.trial << ",";
      std::snprintf(buf, sizeof(buf), "%.17g", row.rate_bps);
      csv << buf << ",";
      std::snprintf(buf, sizeof(buf), "%.17g", row.rate_se);
      csv << buf << "," << row.algorithm << "\n";
    }
  }
  {
    const double pref = table.scalars.count("throughput_prefactor_hz")
                            ? table.scalars.at("throughput_prefactor_hz")
                            : 1.0;
    std::ofstream csv(dir / "results_spectral.csv");
    csv << "thing_id,trial,rate_bps_hz,rate_se,algorithm\n";
    char buf[64];
    for (const RateRow& row : table.rows) {
      csv << row.thing_id << "," << row.trial << ",";
      std::snprintf(buf, sizeof(buf), "%.17g", row.rate_bps / pref);
      csv << buf << ",";
      std::snprintf(buf, sizeof(buf), "%.17g", row.rate_se / pref);
      csv << buf << "," << row.algorithm << "\n";
    }
  }
  {
    std::ofstream csv(dir / "cdf.csv");
    csv << "name,x,F\n";
    char buf[64];
    for (const auto& [name, grid] : table.cdfs) {
      for (const auto& [x, f] : grid) {
        std::snprintf(buf, sizeof(buf), "%.17g", x);
        csv << name << "," << buf << ",";
        std::snprintf(buf, sizeof(buf), "%.17g", f);
        csv << buf << "\n";
      }
    }
  }
  {
    nlohmann::json j;
    j["experiment"] = to_string(spec.id);
    j["version"] = artifact_version();
    j["seed"] = spec.seed;
    j["scalars"] = table.scalars;
    j["notes"] = table.notes;
    std::ofstream out(dir / "summary.json");
    out << j.dump(2) << "\n";
  }
  {
    nlohmann::json j = radio_config_to_json(res.radio);
    j["M"] = res.M;
    j["K"] = res.K;
    j["side"] = res.side;
    j["scenarios"] = res.scenarios;
    j["draws"] = res.draws;
    j["preset"] = spec.preset == Preset::desk ? "desk" : "paper";
    std::ofstream out(dir / "resolved_config.json");
    out << j.dump(2) << "\n";
  }
}

// --------------------------------------------------------------------------
// Experiment bodies
// --------------------------------------------------------------------------

ResultTable exp_ul_rm_accuracy(const ExperimentSpec& spec, Resolved& res) {
  const bool paper = spec.preset == Preset::paper;
  res = paper ? resolve_geometry(spec, 1024, 256, 256, 1000.0, 5, 100)
              : resolve_geometry(spec, 256, 32, 32, 500.0, 20, 200);
  const double pref = throughput_prefactor(res.radio);

  ResultTable table;
  table.scalars["throughput_prefactor_hz"] = pref;
  std::vector<double> rel_errors;
  std::vector<double> pooled_mc, pooled_rm;
  const auto t0 = Clock::now();
  for (std::size_t i = 0; i < res.scenarios; ++i) {
    const Scenario scn =
        generate_scenario(res.M, res.K, res.side, res.radio, child_seed(spec.seed, kTagScenario, i));
    const EstimationStats stats = compute_stats(scn);
    const UlPowerAllocation alloc = UlPowerAllocation::full_power(res.K);

    const RmState state = rm_fixed_point(stats, alloc, scn.rho_u);
    const arma::vec rm = rm_sinr(state, stats, alloc, scn.rho_u);
    const arma::vec rm_rates = arma::log2(1.0 + rm);

    const McRates mc = mc_rates(scn, stats, res.draws, child_seed(spec.seed, kTagEval, i),
                                [&](const ChannelDraw& draw) {
                                  return exact_mmse_sinr(draw, stats, alloc, scn.rho_u);
                                });

    append_rates(table, "mmse-exact-mc", i, mc.mean, mc.se, pref);
    append_rates(table, "rm-approx", i, rm_rates, arma::vec(res.K, arma::fill::zeros), pref);
    for (std::size_t k = 0; k < res.K; ++k) {
      rel_errors.push_back(std::abs(rm_rates[k] - mc.mean[k]) / mc.mean[k]);
      pooled_mc.push_back(pref * mc.mean[k]);
      pooled_rm.push_back(pref * rm_rates[k]);
    }
  }
  table.scalars["runtime_ms"] = ms_since(t0);
  table.scalars["median_rel_rate_error"] = median(rel_errors);
  table.scalars["ks_distance"] = ks_distance(pooled_mc, pooled_rm);
  table.cdfs["rate_mmse_exact_mc"] = empirical_cdf(pooled_mc);
  table.cdfs["rate_rm_approx"] = empirical_cdf(pooled_rm);
  return table;
}

ResultTable exp_ul_maxmin_compare(const ExperimentSpec& spec, Resolved& res) {
  const bool paper = spec.preset == Preset::paper;
  res = paper ? resolve_geometry(spec, 128, 40, 60, 100.0, 50, 200)
              : resolve_geometry(spec, 128, 40, 60, 100.0, 10, 100);
  const double pref = throughput_prefactor(res.radio);

  ResultTable table;
  table.scalars["throughput_prefactor_hz"] = pref;
  table.notes.push_back(
      "suboptimal-estimation baseline arm is registered but not implemented "
      "(defined only by citation); MR combining is the implemented baseline");
  std::vector<double> pooled_mmse, pooled_mr;
  const auto t0 = Clock::now();
  std::size_t alg1_nonconverged = 0;
  for (std::size_t i = 0; i < res.scenarios; ++i) {
    const Scenario scn =
        generate_scenario(res.M, res.K, res.side, res.radio, child_seed(spec.seed, kTagScenario, i));
    const EstimationStats stats = compute_stats(scn);
    const UlPowerAllocation full = UlPowerAllocation::full_power(res.K);

    const std::uint64_t mc_seed = child_seed(spec.seed, kTagEval, i);
    const McRates mmse = mc_rates(scn, stats, res.draws, mc_seed, [&](const ChannelDraw& d) {
      return exact_mmse_sinr(d, stats, full, scn.rho_u);
    });
    const McRates mr = mc_rates(scn, stats, res.draws, mc_seed, [&](const ChannelDraw& d) {
      return mr_receiver_sinr(d, stats, full, scn.rho_u);
    });
    append_rates(table, "mmse-full", i, mmse.mean, mmse.se, pref);
    append_rates(table, "mr-full", i, mr.mean, mr.se, pref);
    for (std::size_t k = 0; k < res.K; ++k) {
      pooled_mmse.push_back(pref * mmse.mean[k]);
      pooled_mr.push_back(pref * mr.mean[k]);
    }

    // Large-scale max-min control evaluated under the exact receiver.
    const MaxminRmResult alg2 = maxmin_power_rm(stats, full.u, full.nu, scn.rho_u);
    UlPowerAllocation rm_alloc = full;
    rm_alloc.eta = alg2.eta;
    const McRates mm_rm = mc_rates(scn, stats, res.draws, mc_seed, [&](const ChannelDraw& d) {
      return exact_mmse_sinr(d, stats, rm_alloc, scn.rho_u);
    });
    append_rates(table, "maxmin-rm", i, mm_rm.mean, mm_rm.se, pref);

    // Per-draw max-min on the exact SINR (power follows the small-scale state).
    const std::size_t alg1_draws = std::min<std::size_t>(res.draws, 25);
    arma::mat alg1_rates(alg1_draws, res.K);
    std::vector<std::uint8_t> converged(alg1_draws, 1);
    parallel_for(alg1_draws, [&](std::size_t d) {
      Rng rng = make_stream(mc_seed, kTagDraw, d);
      const ChannelDraw draw = draw_channel(scn, stats, rng);
      const MaxminExactResult alg1 = maxmin_power_exact(draw, stats, full.u, full.nu, scn.rho_u);
      converged[d] = alg1.converged ? 1 : 0;
      UlPowerAllocation a = full;
      a.eta = alg1.eta;
      alg1_rates.row(d) = arma::log2(1.0 + exact_mmse_sinr(draw, stats, a, scn.rho_u)).t();
    });
    for (const std::uint8_t c : converged) {
      if (c == 0) ++alg1_nonconverged;
    }
    const arma::vec m1 = arma::mean(alg1_rates, 0).t();
    const arma::vec s1 = alg1_draws > 1
                             ? arma::vec(arma::stddev(alg1_rates, 0, 0).t() /
                                         std::sqrt(static_cast<double>(alg1_draws)))
                             : arma::vec(res.K, arma::fill::zeros);
    append_rates(table, "maxmin-exact", i, m1, s1, pref);
  }
  table.scalars["runtime_ms"] = ms_since(t0);
  table.scalars["outage5_rate_mmse"] = percentile(pooled_mmse, 0.05);
  table.scalars["outage5_rate_mr"] = percentile(pooled_mr, 0.05);
  table.scalars["outage5_ratio_mmse_over_mr"] =
      table.scalars["outage5_rate_mmse"] / table.scalars["outage5_rate_mr"];
  table.scalars["alg1_nonconverged"] = static_cast<double>(alg1_nonconverged);
  table.cdfs["rate_mmse_full"] = empirical_cdf(pooled_mmse);
  table.cdfs["rate_mr_full"] = empirical_cdf(pooled_mr);
  return table;
}

ResultTable exp_ul_target_ee(const ExperimentSpec& spec, Resolved& res) {
  const bool paper = spec.preset == Preset::paper;
  res = paper ? resolve_geometry(spec, 160, 40, 40, 1000.0, 20, 100)
              : resolve_geometry(spec, 160, 40, 40, 1000.0, 5, 50);
  const double pref = throughput_prefactor(res.radio);

  ResultTable table;
  table.scalars["throughput_prefactor_hz"] = pref;
  std::vector<double> ee_ratios;
  std::size_t poor_total = 0;
  const auto t0 = Clock::now();
  for (std::size_t i = 0; i < res.scenarios; ++i) {
    const Scenario scn =
        generate_scenario(res.M, res.K, res.side, res.radio, child_seed(spec.seed, kTagScenario, i));
    const EstimationStats stats = compute_stats(scn);
    const UlPowerAllocation full = UlPowerAllocation::full_power(res.K);

    const RmState full_state = rm_fixed_point(stats, full, scn.rho_u);
    const arma::vec full_rates = arma::log2(1.0 + rm_sinr(full_state, stats, full, scn.rho_u));
    const double target_rate =
        percentile(std::vector<double>(full_rates.begin(), full_rates.end()), 0.10);
    const double target_sinr = std::pow(2.0, target_rate) - 1.0;

    const TargetRateResult ctl = target_rate_power_rm(stats, full.nu, scn.rho_u, target_sinr);
    UlPowerAllocation tuned = full;
    tuned.eta = ctl.eta;
    const RmState tuned_state = rm_fixed_point(stats, tuned, scn.rho_u);
    const arma::vec tuned_rates = arma::log2(1.0 + rm_sinr(tuned_state, stats, tuned, scn.rho_u));

    const double ee_full = ul_energy_efficiency(full_rates, full.eta, res.radio.P_u);
    const double ee_ctl = ul_energy_efficiency(tuned_rates, ctl.eta, res.radio.P_u);
    ee_ratios.push_back(ee_ctl / ee_full);
    poor_total += res.K - arma::sum(ctl.good_mask);

    append_rates(table, "full-power-rm", i, full_rates, arma::vec(res.K, arma::fill::zeros), pref);
    append_rates(table, "target-rate-rm", i, tuned_rates, arma::vec(res.K, arma::fill::zeros), pref);
    table.scalars["target_rate_bps_scen" + std::to_string(i)] = pref * target_rate;
  }
  table.scalars["runtime_ms"] = ms_since(t0);
  table.scalars["median_ee_ratio_target_over_full"] = median(ee_ratios);
  table.scalars["min_ee_ratio_target_over_full"] =
      *std::min_element(ee_ratios.begin(), ee_ratios.end());
  table.scalars["poor_things_total"] = static_cast<double>(poor_total);
  return table;
}

/// Shared trainer for the downlink NN pipelines.
struct TrainedModel {
  Regressor reg;
  std::size_t records = 0;
  std::size_t failed = 0;
  double train_ms = 0.0;
};

TrainedModel train_dl_model(std::size_t M, std::size_t K, std::size_t tau, double side,
                            const RadioConfig& base, std::size_t n_scen, std::uint64_t seed,
                            const std::vector<double>* area_list_km2 = nullptr) {
  RadioConfig cfg = base;
  cfg.pilot_len = tau;
  const FeatureSpec fspec;
  std::vector<ScenarioSpec> specs;
  if (area_list_km2 != nullptr) {
    std::size_t idx = 0;
    for (const double area : *area_list_km2) {
      for (std::size_t i = 0; i < n_scen; ++i) {
        specs.push_back({M, K, std::sqrt(area) * 1000.0, cfg, child_seed(seed, kTagTrain, idx++)});
      }
    }
  } else {
    for (std::size_t i = 0; i < n_scen; ++i) {
      specs.push_back({M, K, side, cfg, child_seed(seed, kTagTrain, i)});
    }
  }
  const auto t0 = Clock::now();
  Rng shuffle_rng = make_stream(seed, kTagTrain, 0xffff);
  DatasetResult data = build_dataset(specs, fspec, shuffle_rng);
  LmParams lm;
  lm.seed = child_seed(seed, kTagTrain, 0xaaaa);
  TrainedModel out;
  out.reg = train_lm(data.records, NetSpec::default_for(fspec.length()), lm);
  out.reg.feature_spec = fspec;
  out.records = data.records.size();
  out.failed = data.scenarios_failed;
  out.train_ms = ms_since(t0);
  return out;
}

arma::vec predict_p(const Regressor& reg, const Scenario& scn) {
  arma::vec p(scn.M);
  for (std::size_t m = 0; m < scn.M; ++m) {
    p[m] = reg.predict(ap_features(scn.beta.row(m), reg.feature_spec));
  }
  return p;
}

ResultTable exp_dl_nn_area_transfer(const ExperimentSpec& spec, Resolved& res) {
  const bool paper = spec.preset == Preset::paper;
  res = paper ? resolve_geometry(spec, 128, 4, 8, 0.0, 12, 0)
              : resolve_geometry(spec, 128, 4, 8, 0.0, 5, 0);
  ResultTable table;
  const double pref = throughput_prefactor(res.radio);
  table.scalars["throughput_prefactor_hz"] = pref;

  const std::vector<double> train_areas = {0.016, 0.063, 0.25, 0.56, 1.0, 4.0};
  const std::vector<double> eval_areas = {0.72, 2.25};
  RadioConfig cfg = res.radio;
  cfg.pilot_len = res.tau;

  const TrainedModel model = train_dl_model(res.M, res.K, res.tau, 0.0, res.radio, res.scenarios,
                                            spec.seed, &train_areas);
  table.scalars["training_records"] = static_cast<double>(model.records);
  table.scalars["training_scenarios_failed"] = static_cast<double>(model.failed);
  table.scalars["training_ms"] = model.train_ms;

  const std::size_t eval_per_area = paper ? 5 : 3;
  std::size_t trial = 0;
  std::vector<double> p_err;
  const auto t0 = Clock::now();
  for (const double area : eval_areas) {
    for (std::size_t i = 0; i < eval_per_area; ++i, ++trial) {
      const Scenario scn = generate_scenario(res.M, res.K, std::sqrt(area) * 1000.0, cfg,
                                             child_seed(spec.seed, kTagEval, trial));
      const EstimationStats stats = compute_stats(scn);
      const DlMaxminResult full = maxmin_dl_full(scn, stats, scn.rho_d);
      const arma::vec p_nn = predict_p(model.reg, scn);
      const DlGivenPResult via_opt = maxmin_dl_given_p(scn, stats, full.alloc.p, scn.rho_d);
      const DlGivenPResult via_nn = maxmin_dl_given_p(scn, stats, p_nn, scn.rho_d);

      const arma::vec r_full = arma::log2(1.0 + dl_sinr_closed_form(scn, stats, full.alloc));
      const arma::vec r_opt = arma::log2(1.0 + dl_sinr_closed_form(scn, stats, via_opt.alloc));
      const arma::vec r_nn = arma::log2(1.0 + dl_sinr_closed_form(scn, stats, via_nn.alloc));
      const arma::vec zero(res.K, arma::fill::zeros);
      append_rates(table, "dl-maxmin-full", trial, r_full, zero, pref);
      append_rates(table, "dl-eq30-popt", trial, r_opt, zero, pref);
      append_rates(table, "dl-eq30-pnn", trial, r_nn, zero, pref);
      for (std::size_t m = 0; m < res.M; ++m) p_err.push_back(std::abs(p_nn[m] - full.alloc.p[m]));
    }
  }
  table.scalars["runtime_ms"] = ms_since(t0);
  table.scalars["mean_abs_p_error"] =
      std::accumulate(p_err.begin(), p_err.end(), 0.0) / p_err.size();
  table.scalars["median_rate_full"] = median(table.rates_for("dl-maxmin-full"));
  table.scalars["median_rate_eq30_popt"] = median(table.rates_for("dl-eq30-popt"));
  table.scalars["median_rate_eq30_pnn"] = median(table.rates_for("dl-eq30-pnn"));
  return table;
}

ResultTable exp_dl_density_transfer(const ExperimentSpec& spec, Resolved& res) {
  const bool paper = spec.preset == Preset::paper;
  // Fixed density regime: M per area matches the downlink fixed-density figure.
  res = paper ? resolve_geometry(spec, 64, 16, 16, std::sqrt(0.03) * 1000.0, 120, 0)
              : resolve_geometry(spec, 64, 16, 16, std::sqrt(0.03) * 1000.0, 90, 0);
  ResultTable table;
  const double pref = throughput_prefactor(res.radio);
  table.scalars["throughput_prefactor_hz"] = pref;
  RadioConfig cfg = res.radio;
  cfg.pilot_len = res.tau;

  const TrainedModel model =
      train_dl_model(res.M, res.K, res.tau, res.side, res.radio, res.scenarios, spec.seed);
  table.scalars["training_records"] = static_cast<double>(model.records);
  table.scalars["training_scenarios_failed"] = static_cast<double>(model.failed);
  table.scalars["training_ms"] = model.train_ms;

  const std::size_t n_eval = paper ? 20 : 12;
  std::vector<double> p_err;
  double full_ms = 0.0, nn_ms = 0.0;
  const auto t0 = Clock::now();
  for (std::size_t i = 0; i < n_eval; ++i) {
    const Scenario scn = generate_scenario(res.M, res.K, res.side, cfg,
                                           child_seed(spec.seed, kTagEval, i));
    const EstimationStats stats = compute_stats(scn);

    const auto t_full = Clock::now();
    const DlMaxminResult full = maxmin_dl_full(scn, stats, scn.rho_d);
    full_ms += ms_since(t_full);

    const auto t_nn = Clock::now();
    const arma::vec p_nn = predict_p(model.reg, scn);
    const DlGivenPResult via_nn = maxmin_dl_given_p(scn, stats, p_nn, scn.rho_d);
    nn_ms += ms_since(t_nn);

    const DlPowerAllocation uni_full = uniform_power(stats, arma::vec(res.M, arma::fill::ones));
    const DlPowerAllocation uni_opt = uniform_power(stats, full.alloc.p);
    const DlPowerAllocation uni_nn = uniform_power(stats, p_nn);

    const arma::vec zero(res.K, arma::fill::zeros);
    append_rates(table, "dl-maxmin-full", i,
                 arma::log2(1.0 + dl_sinr_closed_form(scn, stats, full.alloc)), zero, pref);
    append_rates(table, "dl-eq30-pnn", i,
                 arma::log2(1.0 + dl_sinr_closed_form(scn, stats, via_nn.alloc)), zero, pref);
    append_rates(table, "uniform-full", i,
                 arma::log2(1.0 + dl_sinr_closed_form(scn, stats, uni_full)), zero, pref);
    append_rates(table, "uniform-opt", i,
                 arma::log2(1.0 + dl_sinr_closed_form(scn, stats, uni_opt)), zero, pref);
    append_rates(table, "uniform-nn", i,
                 arma::log2(1.0 + dl_sinr_closed_form(scn, stats, uni_nn)), zero, pref);
    for (std::size_t m = 0; m < res.M; ++m) p_err.push_back(std::abs(p_nn[m] - full.alloc.p[m]));
  }
  table.scalars["runtime_ms"] = ms_since(t0);
  table.scalars["mean_abs_p_error"] =
      std::accumulate(p_err.begin(), p_err.end(), 0.0) / p_err.size();
  table.scalars["timing_full_solver_ms"] = full_ms;
  table.scalars["timing_nn_pipeline_ms"] = nn_ms;
  table.scalars["speedup_full_over_nn"] = full_ms / nn_ms;
  table.scalars["median_rate_uniform_opt"] = median(table.rates_for("uniform-opt"));
  table.scalars["median_rate_uniform_nn"] = median(table.rates_for("uniform-nn"));
  table.scalars["median_rate_uniform_full"] = median(table.rates_for("uniform-full"));
  table.cdfs["rate_uniform_nn"] = empirical_cdf(table.rates_for("uniform-nn"));
  table.cdfs["rate_uniform_opt"] = empirical_cdf(table.rates_for("uniform-opt"));
  table.cdfs["rate_uniform_full"] = empirical_cdf(table.rates_for("uniform-full"));
  table.cdfs["rate_maxmin_full"] = empirical_cdf(table.rates_for("dl-maxmin-full"));
  return table;
}

ResultTable exp_dl_ee_large(const ExperimentSpec& spec, Resolved& res) {
  const bool paper = spec.preset == Preset::paper;
  // Same AP density as the large-area energy figure; desk preset shrinks M.
  const double density_km2 = 2048.0;
  res = paper ? resolve_geometry(spec, 4096, 1024, 1024, std::sqrt(4096.0 / density_km2) * 1000.0,
                                 1, 0)
              : resolve_geometry(spec, 1024, 256, 256, std::sqrt(1024.0 / density_km2) * 1000.0,
                                 1, 0);
  ResultTable table;
  const double pref = throughput_prefactor(res.radio);
  table.scalars["throughput_prefactor_hz"] = pref;
  RadioConfig cfg = res.radio;
  cfg.pilot_len = res.tau;

  const std::size_t train_m = 64;
  const std::size_t train_k = 16;
  const double train_side = std::sqrt(static_cast<double>(train_m) / density_km2) * 1000.0;
  const std::size_t train_scen = paper ? 60 : 40;
  const TrainedModel model =
      train_dl_model(train_m, train_k, train_k, train_side, res.radio, train_scen, spec.seed);
  table.scalars["training_records"] = static_cast<double>(model.records);
  table.scalars["training_ms"] = model.train_ms;

  const auto t0 = Clock::now();
  for (std::size_t i = 0; i < res.scenarios; ++i) {
    const Scenario scn = generate_scenario(res.M, res.K, res.side, cfg,
                                           child_seed(spec.seed, kTagEval, i));
    const arma::vec p_nn = predict_p(model.reg, scn);
    const arma::vec p_full(res.M, arma::fill::ones);
    const std::vector<arma::vec> sinrs = dl_sinr_uniform_streaming(scn, {p_nn, p_full});

    const DlRateResult nn = dl_rate_and_ee(sinrs[0], p_nn, res.radio.P_d, cfg);
    const DlRateResult fullp = dl_rate_and_ee(sinrs[1], p_full, res.radio.P_d, cfg);
    const arma::vec zero(res.K, arma::fill::zeros);
    append_rates(table, "uniform-nn-large", i, nn.spectral, zero, pref);
    append_rates(table, "uniform-full-large", i, fullp.spectral, zero, pref);
    table.scalars["ee_uniform_nn"] = nn.energy_efficiency;
    table.scalars["ee_uniform_full"] = fullp.energy_efficiency;
    table.scalars["ee_ratio_nn_over_full"] = nn.energy_efficiency / fullp.energy_efficiency;
    table.scalars["mean_p_nn"] = arma::mean(p_nn);
  }
  table.scalars["runtime_ms"] = ms_since(t0);
  return table;
}

}  // namespace

std::string to_string(ExperimentId id) {
  switch (id) {
    case ExperimentId::ul_rm_accuracy: return "ul-rm-accuracy";
    case ExperimentId::ul_maxmin_compare: return "ul-maxmin-compare";
    case ExperimentId::ul_target_ee: return "ul-target-ee";
    case ExperimentId::dl_nn_area_transfer: return "dl-nn-area-transfer";
    case ExperimentId::dl_density_transfer: return "dl-density-transfer";
    case ExperimentId::dl_ee_large: return "dl-ee-large";
  }
  throw std::logic_error("unknown experiment id");
}

ExperimentId experiment_id_from_string(const std::string& name) {
  for (const ExperimentId id :
       {ExperimentId::ul_rm_accuracy, ExperimentId::ul_maxmin_compare, ExperimentId::ul_target_ee,
        ExperimentId::dl_nn_area_transfer, ExperimentId::dl_density_transfer,
        ExperimentId::dl_ee_large}) {
    if (to_string(id) == name) return id;
  }
  throw std::invalid_argument("unknown experiment id: " + name);
}

std::vector<std::string> experiment_registry() {
  return {"ul-rm-accuracy",      "ul-maxmin-compare",   "ul-target-ee",
          "dl-nn-area-transfer", "dl-density-transfer", "dl-ee-large"};
}

std::vector<double> ResultTable::rates_for(const std::string& algorithm) const {
  std::vector<double> out;
  for (const RateRow& row : rows) {
    if (row.algorithm == algorithm) out.push_back(row.rate_bps);
  }
  return out;
}

ResultTable run_experiment(const ExperimentSpec& spec) {
  if (spec.trials == 0 && spec.draws == 0) {
    // defaults resolved per experiment below
  }
  Resolved res;
  ResultTable table;
  try {
    switch (spec.id) {
      case ExperimentId::ul_rm_accuracy: table = exp_ul_rm_accuracy(spec, res); break;
      case ExperimentId::ul_maxmin_compare: table = exp_ul_maxmin_compare(spec, res); break;
      case ExperimentId::ul_target_ee: table = exp_ul_target_ee(spec, res); break;
      case ExperimentId::dl_nn_area_transfer: table = exp_dl_nn_area_transfer(spec, res); break;
      case ExperimentId::dl_density_transfer: table = exp_dl_density_transfer(spec, res); break;
      case ExperimentId::dl_ee_large: table = exp_dl_ee_large(spec, res); break;
    }
  } catch (const std::exception& e) {
    throw std::runtime_error("[stage:" + to_string(spec.id) + "] " + e.what());
  }
  try {
    write_outputs(spec, res, table);
  } catch (const std::exception& e) {
    throw std::runtime_error("[stage:write-outputs] " + std::string(e.what()));
  }
  return table;
}

arma::vec mr_receiver_sinr(const ChannelDraw& draw, const EstimationStats& stats,
                           const UlPowerAllocation& alloc, double rho_u) {
  const std::size_t K = stats.n_things();
  const arma::vec w = alloc.effective();
  const arma::vec d = noise_plus_error_diag(stats, alloc, rho_u);
  const arma::cx_mat inner = draw.G_hat.t() * draw.G_hat;  // (k',k) = ghat_k'^H ghat_k
  arma::vec sinr(K);
  for (std::size_t k = 0; k < K; ++k) {
    double interf = 0.0;
    for (std::size_t kp = 0; kp < K; ++kp) {
      if (kp == k) continue;
      interf += w[kp] * std::norm(inner(kp, k));
    }
    double noise = 0.0;
    for (std::size_t m = 0; m < stats.n_aps(); ++m) {
      noise += d[m] * std::norm(draw.G_hat(m, k));
    }
    const double num = rho_u * w[k] * std::norm(inner(k, k));
    sinr[k] = num / (rho_u * interf + noise);
  }
  return sinr;
}

std::vector<std::pair<double, double>> empirical_cdf(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("empirical_cdf: empty sample");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  std::vector<std::pair<double, double>> grid;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i + 1 < values.size() && values[i + 1] == values[i]) continue;  // keep last duplicate
    grid.emplace_back(values[i], static_cast<double>(i + 1) / n);
  }
  return grid;
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_distance: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t ia = 0, ib = 0;
  double worst = 0.0;
  while (ia < a.size() && ib < b.size()) {
    if (a[ia] <= b[ib]) {
      ++ia;
    } else {
      ++ib;
    }
    const double fa = static_cast<double>(ia) / a.size();
    const double fb = static_cast<double>(ib) / b.size();
    worst = std::max(worst, std::abs(fa - fb));
  }
  return worst;
}

const char* artifact_version() { return CFIOT_VERSION; }

}  // namespace cfiot
