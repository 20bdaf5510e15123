/**
 * @file regressor.cpp
 */
#include "cfiot/regressor.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace cfiot {

namespace {

double apply_act(Activation act, double z) {
  switch (act) {
    case Activation::hyper_tangent: return std::tanh(z);
    case Activation::sigmoid: return 1.0 / (1.0 + std::exp(-z));
    case Activation::identity: return z;
  }
  throw std::logic_error("unknown activation");
}

double act_derivative(Activation act, double h) {
  // expressed through the activation value h = act(z)
  switch (act) {
    case Activation::hyper_tangent: return 1.0 - h * h;
    case Activation::sigmoid: return h * (1.0 - h);
    case Activation::identity: return 1.0;
  }
  throw std::logic_error("unknown activation");
}

std::string act_name(Activation a) {
  switch (a) {
    case Activation::hyper_tangent: return "tanh";
    case Activation::sigmoid: return "sigmoid";
    case Activation::identity: return "identity";
  }
  return "?";
}

Activation act_from_name(const std::string& s) {
  if (s == "tanh") return Activation::hyper_tangent;
  if (s == "sigmoid") return Activation::sigmoid;
  if (s == "identity") return Activation::identity;
  throw std::invalid_argument("unknown activation name: " + s);
}

struct ForwardTrace {
  std::vector<arma::vec> h;  // h[0] = normalized input, h[l] = layer l output
};

double forward_traced(const Regressor& reg, const arma::vec& features, ForwardTrace* trace) {
  if (features.n_elem != reg.layer_sizes.front()) {
    throw std::invalid_argument("feature length mismatch");
  }
  arma::vec h = (features - reg.feat_mean) / reg.feat_scale;
  if (trace != nullptr) trace->h.push_back(h);
  for (std::size_t l = 0; l < reg.weights.size(); ++l) {
    arma::vec z = reg.weights[l] * h + reg.biases[l];
    h.set_size(z.n_elem);
    for (std::size_t i = 0; i < z.n_elem; ++i) h[i] = apply_act(reg.activations[l], z[i]);
    if (trace != nullptr) trace->h.push_back(h);
  }
  return h[0];
}

/// Row of the residual Jacobian (d out / d theta) in packing order
/// [W0 row-major, b0, W1, b1, ...].
arma::rowvec jacobian_row(const Regressor& reg, const ForwardTrace& trace) {
  const std::size_t n_layers = reg.weights.size();
  std::vector<arma::vec> delta(n_layers);
  delta[n_layers - 1] =
      arma::vec{act_derivative(reg.activations[n_layers - 1], trace.h[n_layers][0])};
  for (std::size_t l = n_layers - 1; l-- > 0;) {
    arma::vec d = reg.weights[l + 1].t() * delta[l + 1];
    for (std::size_t i = 0; i < d.n_elem; ++i) {
      d[i] *= act_derivative(reg.activations[l], trace.h[l + 1][i]);
    }
    delta[l] = std::move(d);
  }
  arma::rowvec row(reg.n_parameters());
  std::size_t pos = 0;
  for (std::size_t l = 0; l < n_layers; ++l) {
    const arma::vec& in = trace.h[l];
    for (std::size_t i = 0; i < delta[l].n_elem; ++i) {
      for (std::size_t j = 0; j < in.n_elem; ++j) row[pos++] = delta[l][i] * in[j];
    }
    for (std::size_t i = 0; i < delta[l].n_elem; ++i) row[pos++] = delta[l][i];
  }
  return row;
}

arma::vec pack_parameters(const Regressor& reg) {
  arma::vec theta(reg.n_parameters());
  std::size_t pos = 0;
  for (std::size_t l = 0; l < reg.weights.size(); ++l) {
    const arma::mat& w = reg.weights[l];
    for (std::size_t i = 0; i < w.n_rows; ++i) {
      for (std::size_t j = 0; j < w.n_cols; ++j) theta[pos++] = w(i, j);
    }
    for (std::size_t i = 0; i < reg.biases[l].n_elem; ++i) theta[pos++] = reg.biases[l][i];
  }
  return theta;
}

void unpack_parameters(Regressor& reg, const arma::vec& theta) {
  std::size_t pos = 0;
  for (std::size_t l = 0; l < reg.weights.size(); ++l) {
    arma::mat& w = reg.weights[l];
    for (std::size_t i = 0; i < w.n_rows; ++i) {
      for (std::size_t j = 0; j < w.n_cols; ++j) w(i, j) = theta[pos++];
    }
    for (std::size_t i = 0; i < reg.biases[l].n_elem; ++i) reg.biases[l][i] = theta[pos++];
  }
}

double mse_over(const Regressor& reg, const std::vector<TrainRecord>& recs,
                const std::vector<std::size_t>& idx) {
  double acc = 0.0;
  for (const std::size_t i : idx) {
    const double r = reg.forward(recs[i].features) - recs[i].target;
    acc += r * r;
  }
  return acc / static_cast<double>(idx.size());
}

}  // namespace

arma::vec ap_features(const arma::rowvec& beta_row, const FeatureSpec& spec) {
  const std::size_t K = beta_row.n_elem;
  arma::rowvec sorted = arma::sort(beta_row, "descend");
  arma::vec f(spec.length());
  for (std::size_t i = 0; i < spec.n_top; ++i) {
    f[i] = i < K ? linear_to_db(sorted[i]) : spec.floor_db;
  }
  double rest = 0.0;
  for (std::size_t i = spec.n_top; i < K; ++i) rest += sorted[i];
  f[spec.n_top] = rest > 0.0 ? linear_to_db(rest) : spec.floor_db;
  return f;
}

NetSpec NetSpec::default_for(std::size_t n_features) {
  NetSpec spec;
  spec.layer_sizes = {n_features, 20, 1};
  spec.activations = {Activation::hyper_tangent, Activation::sigmoid};
  return spec;
}

double Regressor::forward(const arma::vec& features) const {
  return forward_traced(*this, features, nullptr);
}

double Regressor::predict(const arma::vec& features) const {
  return std::clamp(forward(features), 0.0, 1.0);
}

std::size_t Regressor::n_parameters() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) n += weights[l].n_elem + biases[l].n_elem;
  return n;
}

DatasetResult build_dataset(const std::vector<ScenarioSpec>& specs, const FeatureSpec& fspec,
                            Rng& rng, double dl_tol) {
  DatasetResult out;
  for (const ScenarioSpec& sp : specs) {
    try {
      const Scenario scn = generate_scenario(sp.M, sp.K, sp.side, sp.cfg, sp.seed);
      const EstimationStats stats = compute_stats(scn);
      const DlMaxminResult sol = maxmin_dl_full(scn, stats, scn.rho_d, dl_tol);
      for (std::size_t m = 0; m < sp.M; ++m) {
        TrainRecord rec;
        rec.features = ap_features(scn.beta.row(m), fspec);
        rec.target = std::clamp(sol.alloc.p[m], 0.0, 1.0);
        out.records.push_back(std::move(rec));
      }
    } catch (const std::exception&) {
      ++out.scenarios_failed;
    }
  }
  std::shuffle(out.records.begin(), out.records.end(), rng);
  return out;
}

Regressor train_lm(const std::vector<TrainRecord>& dataset, const NetSpec& spec,
                   const LmParams& params, TrainDiagnostics* diag) {
  if (dataset.empty()) throw std::invalid_argument("train_lm: empty dataset");
  if (spec.layer_sizes.size() < 2 || spec.layer_sizes.back() != 1) {
    throw std::invalid_argument("train_lm: need layer sizes [in, ..., 1]");
  }
  if (spec.activations.size() != spec.layer_sizes.size() - 1) {
    throw std::invalid_argument("train_lm: one activation per non-input layer");
  }
  const std::size_t n_feat = spec.layer_sizes.front();
  for (const TrainRecord& r : dataset) {
    if (r.features.n_elem != n_feat) throw std::invalid_argument("train_lm: feature length mismatch");
  }

  Rng rng = make_stream(params.seed, 0x6c6d);  // "lm"
  std::vector<std::size_t> order(dataset.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  std::size_t n_val = static_cast<std::size_t>(std::lround(params.val_fraction * order.size()));
  if (params.val_fraction > 0.0 && n_val == 0 && order.size() > 1) n_val = 1;
  if (n_val >= order.size()) n_val = order.size() - 1;
  const std::vector<std::size_t> val_idx(order.begin(), order.begin() + n_val);
  const std::vector<std::size_t> train_idx(order.begin() + n_val, order.end());

  Regressor reg;
  reg.layer_sizes = spec.layer_sizes;
  reg.activations = spec.activations;
  reg.feat_mean.zeros(n_feat);
  reg.feat_scale.ones(n_feat);
  {
    arma::vec mean(n_feat, arma::fill::zeros);
    arma::vec sq(n_feat, arma::fill::zeros);
    for (const std::size_t i : train_idx) {
      mean += dataset[i].features;
      sq += arma::square(dataset[i].features);
    }
    mean /= static_cast<double>(train_idx.size());
    arma::vec var = sq / static_cast<double>(train_idx.size()) - arma::square(mean);
    reg.feat_mean = mean;
    for (std::size_t j = 0; j < n_feat; ++j) {
      reg.feat_scale[j] = var[j] > 1e-24 ? std::sqrt(var[j]) : 1.0;
    }
  }
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (std::size_t l = 0; l + 1 < spec.layer_sizes.size(); ++l) {
    const std::size_t fan_in = spec.layer_sizes[l];
    const std::size_t fan_out = spec.layer_sizes[l + 1];
    const double r = 1.0 / std::sqrt(static_cast<double>(fan_in));
    arma::mat w(fan_out, fan_in);
    for (std::size_t i = 0; i < fan_out; ++i) {
      for (std::size_t j = 0; j < fan_in; ++j) w(i, j) = r * unif(rng);
    }
    reg.weights.push_back(std::move(w));
    reg.biases.push_back(arma::vec(fan_out, arma::fill::zeros));
  }

  const std::size_t n_params = reg.n_parameters();
  const std::size_t n_train = train_idx.size();
  arma::vec theta = pack_parameters(reg);
  double mse = mse_over(reg, dataset, train_idx);
  double lambda = params.lambda0;

  const auto val_mse = [&]() {
    return val_idx.empty() ? mse : mse_over(reg, dataset, val_idx);
  };
  double best_val = val_mse();
  arma::vec best_theta = theta;
  std::size_t stale = 0;
  bool any_accepted = false;
  TrainDiagnostics local;
  TrainDiagnostics& dg = diag != nullptr ? *diag : local;
  dg = TrainDiagnostics{};

  arma::mat jac(n_train, n_params);
  arma::vec resid(n_train);
  while (dg.accepted_steps < params.max_epochs) {
    for (std::size_t i = 0; i < n_train; ++i) {
      ForwardTrace trace;
      const double out = forward_traced(reg, dataset[train_idx[i]].features, &trace);
      resid[i] = out - dataset[train_idx[i]].target;
      jac.row(i) = jacobian_row(reg, trace);
    }
    const arma::mat jtj = jac.t() * jac;
    const arma::vec jtr = jac.t() * resid;

    bool accepted = false;
    while (!accepted) {
      arma::mat damped = jtj;
      damped.diag() += lambda;
      arma::vec step;
      const bool solved = arma::solve(step, damped, -jtr, arma::solve_opts::likely_sympd);
      if (solved) {
        const arma::vec theta_try = theta + step;
        unpack_parameters(reg, theta_try);
        const double mse_try = mse_over(reg, dataset, train_idx);
        if (mse_try < mse) {
          theta = theta_try;
          mse = mse_try;
          lambda = std::max(lambda * params.lambda_dec, 1e-15);
          accepted = true;
          any_accepted = true;
          break;
        }
      }
      lambda *= params.lambda_inc;
      if (lambda > params.lambda_max) {
        dg.hit_lambda_ceiling = true;
        if (!any_accepted) {
          throw std::runtime_error("train_lm: no step accepted before damping ceiling");
        }
        unpack_parameters(reg, best_theta);
        dg.best_val_mse = best_val;
        reg.feature_spec = FeatureSpec{};
        return reg;
      }
    }

    unpack_parameters(reg, theta);
    dg.accepted_mse.push_back(mse);
    dg.accepted_steps++;
    const double v = val_mse();
    if (v < best_val * (1.0 - 1e-12)) {
      best_val = v;
      best_theta = theta;
      stale = 0;
    } else {
      ++stale;
      if (stale >= params.patience) break;
    }
  }
  unpack_parameters(reg, best_theta);
  dg.best_val_mse = best_val;
  return reg;
}

arma::rowvec residual_jacobian(const Regressor& reg, const arma::vec& features) {
  ForwardTrace trace;
  forward_traced(reg, features, &trace);
  return jacobian_row(reg, trace);
}

double jacobian_fd_check(const Regressor& reg, const arma::vec& features, double target,
                         double eps) {
  if (!(eps >= 1e-7 && eps <= 1e-4)) throw std::invalid_argument("eps must lie in [1e-7, 1e-4]");
  Regressor work = reg;
  ForwardTrace trace;
  forward_traced(work, features, &trace);
  const arma::rowvec analytic = jacobian_row(work, trace);
  arma::vec theta = pack_parameters(work);
  double worst = 0.0;
  for (std::size_t i = 0; i < theta.n_elem; ++i) {
    const double h = eps * std::max(1.0, std::abs(theta[i]));
    const double saved = theta[i];
    theta[i] = saved + h;
    unpack_parameters(work, theta);
    const double rp = work.forward(features) - target;
    theta[i] = saved - h;
    unpack_parameters(work, theta);
    const double rm = work.forward(features) - target;
    theta[i] = saved;
    const double fd = (rp - rm) / (2.0 * h);
    const double mag = std::max(std::abs(fd), std::abs(analytic[i]));
    if (mag < 1e-12) continue;  // both effectively zero
    worst = std::max(worst, std::abs(fd - analytic[i]) / mag);
  }
  unpack_parameters(work, theta);
  return worst;
}

void save_model(const Regressor& reg, const std::string& path) {
  nlohmann::json j;
  j["format_version"] = 1;
  j["layer_sizes"] = reg.layer_sizes;
  std::vector<std::string> acts;
  for (const Activation a : reg.activations) acts.push_back(act_name(a));
  j["activations"] = acts;
  j["feat_mean"] = std::vector<double>(reg.feat_mean.begin(), reg.feat_mean.end());
  j["feat_scale"] = std::vector<double>(reg.feat_scale.begin(), reg.feat_scale.end());
  j["feature_spec"] = {{"n_top", reg.feature_spec.n_top}, {"floor_db", reg.feature_spec.floor_db}};
  nlohmann::json layers = nlohmann::json::array();
  for (std::size_t l = 0; l < reg.weights.size(); ++l) {
    nlohmann::json layer;
    std::vector<double> w;  // row-major
    for (std::size_t i = 0; i < reg.weights[l].n_rows; ++i) {
      for (std::size_t jcol = 0; jcol < reg.weights[l].n_cols; ++jcol) {
        w.push_back(reg.weights[l](i, jcol));
      }
    }
    layer["weights"] = w;
    layer["biases"] = std::vector<double>(reg.biases[l].begin(), reg.biases[l].end());
    layers.push_back(std::move(layer));
  }
  j["layers"] = std::move(layers);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_model: cannot open " + path);
  out << j.dump(2) << "\n";
}

Regressor load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_model: cannot open " + path);
  nlohmann::json j;
  in >> j;
  if (j.at("format_version").get<int>() != 1) {
    throw std::runtime_error("load_model: unsupported format version");
  }
  Regressor reg;
  reg.layer_sizes = j.at("layer_sizes").get<std::vector<std::size_t>>();
  for (const auto& name : j.at("activations")) reg.activations.push_back(act_from_name(name));
  const auto mean = j.at("feat_mean").get<std::vector<double>>();
  const auto scale = j.at("feat_scale").get<std::vector<double>>();
  reg.feat_mean = arma::vec(mean);
  reg.feat_scale = arma::vec(scale);
  reg.feature_spec.n_top = j.at("feature_spec").at("n_top").get<std::size_t>();
  reg.feature_spec.floor_db = j.at("feature_spec").at("floor_db").get<double>();
  const auto& layers = j.at("layers");
  if (layers.size() != reg.layer_sizes.size() - 1 || layers.size() != reg.activations.size()) {
    throw std::runtime_error("load_model: inconsistent layer data");
  }
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const std::size_t rows = reg.layer_sizes[l + 1];
    const std::size_t cols = reg.layer_sizes[l];
    const auto w = layers[l].at("weights").get<std::vector<double>>();
    const auto b = layers[l].at("biases").get<std::vector<double>>();
    if (w.size() != rows * cols || b.size() != rows) {
      throw std::runtime_error("load_model: layer size mismatch");
    }
    arma::mat wm(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t jcol = 0; jcol < cols; ++jcol) wm(i, jcol) = w[i * cols + jcol];
    }
    reg.weights.push_back(std::move(wm));
    reg.biases.push_back(arma::vec(b));
  }
  return reg;
}

}  // namespace cfiot
