/**
 * @file regressor.hpp
 * @brief Small feed-forward regressor trained with Levenberg-Marquardt to
 * predict per-AP normalized transmit powers from large-scale fading features.
 */
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cfiot/dl_power.hpp"

namespace cfiot {

/// Fixed-length per-AP feature layout: the n_top largest gains of the AP's
/// beta row in dB (descending, padded with floor_db), then the dB sum of the
/// remaining gains. Length is n_top + 1 regardless of K.
struct FeatureSpec {
  std::size_t n_top = 8;
  double floor_db = -250.0;

  std::size_t length() const { return n_top + 1; }
};

arma::vec ap_features(const arma::rowvec& beta_row, const FeatureSpec& spec);

enum class Activation { hyper_tangent, sigmoid, identity };

struct NetSpec {
  std::vector<std::size_t> layer_sizes;     ///< input, hidden..., output(=1)
  std::vector<Activation> activations;      ///< per non-input layer
  static NetSpec default_for(std::size_t n_features);
};

struct LmParams {
  double lambda0 = 1e-3;
  double lambda_inc = 10.0;
  double lambda_dec = 0.1;
  double lambda_max = 1e10;
  std::size_t max_epochs = 200;  ///< accepted steps
  double val_fraction = 0.1;
  std::size_t patience = 10;  ///< accepted steps without validation progress
  std::uint64_t seed = 1;
};

struct TrainRecord {
  arma::vec features;
  double target = 0.0;  ///< normalized per-AP power in [0,1]
};

/// Immutable trained model. predict() clamps to [0,1]; forward() is the raw
/// network output used during training.
struct Regressor {
  std::vector<std::size_t> layer_sizes;
  std::vector<Activation> activations;
  std::vector<arma::mat> weights;  ///< weights[l]: n_{l+1} x n_l
  std::vector<arma::vec> biases;
  arma::vec feat_mean;
  arma::vec feat_scale;
  FeatureSpec feature_spec;

  double forward(const arma::vec& features) const;
  double predict(const arma::vec& features) const;
  std::size_t n_parameters() const;
};

struct TrainDiagnostics {
  std::vector<double> accepted_mse;  ///< training MSE after each accepted step
  double best_val_mse = 0.0;
  std::size_t accepted_steps = 0;
  bool hit_lambda_ceiling = false;
};

/// Scenario recipe for dataset generation.
struct ScenarioSpec {
  std::size_t M = 0;
  std::size_t K = 0;
  double side = 0.0;
  RadioConfig cfg;
  std::uint64_t seed = 0;
};

struct DatasetResult {
  std::vector<TrainRecord> records;
  std::size_t scenarios_failed = 0;
};

/// Solves the full downlink max-min problem per scenario and emits one
/// (features, p_m) record per AP; the record order is shuffled with rng.
DatasetResult build_dataset(const std::vector<ScenarioSpec>& specs, const FeatureSpec& fspec,
                            Rng& rng, double dl_tol = 1e-3);

/// Damped Gauss-Newton least squares on the prediction residuals. A step is
/// accepted only if it lowers the training MSE; returns the weights with the
/// best validation MSE.
Regressor train_lm(const std::vector<TrainRecord>& dataset, const NetSpec& spec,
                   const LmParams& params, TrainDiagnostics* diag = nullptr);

/// Analytic derivative of the prediction residual with respect to every
/// parameter, packed as [W0 row-major, b0, W1, b1, ...].
arma::rowvec residual_jacobian(const Regressor& reg, const arma::vec& features);

/// Max relative disagreement between the analytic residual Jacobian and
/// central finite differences at one sample.
double jacobian_fd_check(const Regressor& reg, const arma::vec& features, double target,
                         double eps);

/// JSON round trip; doubles survive bit-exactly.
void save_model(const Regressor& reg, const std::string& path);
Regressor load_model(const std::string& path);

}  // namespace cfiot
