/**
 * @file dl_power.cpp
 *
 * The max-min solvers work in the per-AP power-share domain y_mk =
 * sqrt(eta_mk * gamma_mk): the per-AP budgets become Euclidean balls, so the
 * feasibility projections are exact and the variables share one scale.
 */
#include "cfiot/dl_power.hpp"

#include <stdexcept>
#include <thread>

#include "cfiot/ul_perf.hpp"

namespace cfiot {

namespace {

// ---------------------------------------------------------------------------
// Closed-form SINR engine. Accumulates the per-AP terms of the downlink SINR
// for several allocations in one pass over APs; recomputes the estimator
// vectors on the fly when stats does not store them.
// ---------------------------------------------------------------------------

struct SinrAccum {
  arma::vec num;     // K: sum_m sqrt(eta) gamma
  arma::vec own;     // K: sum_m eta gamma beta
  arma::mat a_term;  // K x K: sum_m eta_mk' beta_mk ||a_mk'||^2
  arma::mat c_term;  // K x K: sum_m eta_mk' beta_mk S_mk'
  arma::cx_mat coh;  // K x K: sum_m sqrt(eta_mk') beta_mk psi_k^H a_mk'

  explicit SinrAccum(std::size_t K)
      : num(K, arma::fill::zeros),
        own(K, arma::fill::zeros),
        a_term(K, K, arma::fill::zeros),
        c_term(K, K, arma::fill::zeros),
        coh(K, K, arma::fill::zeros) {}

  void merge(const SinrAccum& o) {
    num += o.num;
    own += o.own;
    a_term += o.a_term;
    c_term += o.c_term;
    coh += o.coh;
  }
};

using EtaRowFiller = std::function<void(std::size_t m, const arma::rowvec& gamma_row,
                                        arma::mat& eta_rows)>;

std::vector<arma::vec> closed_form_engine(const Scenario& scn, const EstimationStats* stats,
                                          std::size_t n_allocs, const EtaRowFiller& fill_eta) {
  const std::size_t M = scn.M;
  const std::size_t K = scn.K;
  const double tau_rho_p = static_cast<double>(scn.cfg.pilot_len) * scn.rho_p;
  const double sq_tp = std::sqrt(tau_rho_p);

  const unsigned workers = std::max(1u, std::min<unsigned>(worker_count(), M));
  std::vector<std::vector<SinrAccum>> partial(workers, std::vector<SinrAccum>(n_allocs, SinrAccum(K)));

  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      try {
        const std::size_t lo = M * w / workers;
        const std::size_t hi = M * (w + 1) / workers;
        arma::mat eta_rows(n_allocs, K);
        for (std::size_t m = lo; m < hi; ++m) {
          const arma::cx_mat a_m =
              (stats != nullptr && stats->has_vectors()) ? arma::cx_mat(stats->a.slice(m))
                                                         : estimator_vectors_for_ap(scn, m);
          const arma::cx_mat p_m = scn.pilots.t() * a_m;  // (j,k') = psi_j^H a_mk'
          const arma::rowvec beta_row = scn.beta.row(m);
          arma::rowvec gamma_row(K);
          if (stats != nullptr) {
            gamma_row = stats->gamma.row(m);
          } else {
            for (std::size_t k = 0; k < K; ++k) {
              gamma_row[k] = sq_tp * beta_row[k] * std::real(p_m(k, k));
            }
          }
          arma::rowvec n_row(K);
          for (std::size_t k = 0; k < K; ++k) {
            n_row[k] = std::real(arma::cdot(a_m.col(k), a_m.col(k)));
          }
          const arma::rowvec s_row = beta_row * arma::square(arma::abs(p_m));

          fill_eta(m, gamma_row, eta_rows);
          for (std::size_t l = 0; l < n_allocs; ++l) {
            SinrAccum& acc = partial[w][l];
            const arma::rowvec eta_row = eta_rows.row(l);
            const arma::rowvec sq_eta = arma::sqrt(eta_row);
            acc.num += (sq_eta % gamma_row).t();
            acc.own += (eta_row % gamma_row % beta_row).t();
            acc.a_term += beta_row.t() * (eta_row % n_row);
            acc.c_term += beta_row.t() * (eta_row % s_row);
            acc.coh += arma::diagmat(beta_row) * p_m * arma::diagmat(sq_eta);
          }
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }

  std::vector<arma::vec> out(n_allocs);
  for (std::size_t l = 0; l < n_allocs; ++l) {
    SinrAccum total(K);
    for (unsigned w = 0; w < workers; ++w) total.merge(partial[w][l]);
    const arma::mat cross = total.a_term + tau_rho_p * (arma::square(arma::abs(total.coh)) + total.c_term);
    arma::vec sinr(K);
    for (std::size_t k = 0; k < K; ++k) {
      const double interference = arma::sum(cross.row(k)) - cross(k, k);
      const double den = 1.0 + scn.rho_d * (total.own[k] + interference);
      sinr[k] = scn.rho_d * total.num[k] * total.num[k] / den;
    }
    out[l] = std::move(sinr);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Feasibility machinery for the bisection solvers (power-share domain).
// ---------------------------------------------------------------------------

struct FeasProblem {
  arma::mat lin;   // M x K: sqrt(gamma); lin coefficient of column k
  arma::vec cap;   // M: per-AP power budgets
  double rho_d = 0.0;
  double tau_rho_p = 0.0;
  // Full model: per-thing quadratic and coherent interference maps.
  std::vector<arma::mat> quad;  // K entries, M x K
  std::vector<arma::mat> coh_re, coh_im;
  // Reduced model: constant denominators (den_k / rho_d). Empty => full.
  arma::vec const_v;

  bool reduced() const { return !const_v.is_empty(); }
  std::size_t n_aps() const { return lin.n_rows; }
  std::size_t n_things() const { return lin.n_cols; }
};

struct FeasParams {
  double rel_slack = 1e-7;   // accepted relative constraint violation
  std::size_t max_iter = 2500;
  std::size_t stall_window = 60;
};

// Project each AP row onto {y >= 0, ||y||^2 <= cap_m}. Exact.
void project_rows(arma::mat& y, const arma::vec& cap) {
  const std::size_t M = y.n_rows;
  for (std::size_t m = 0; m < M; ++m) {
    for (std::size_t k = 0; k < y.n_cols; ++k) {
      if (y(m, k) < 0.0) y(m, k) = 0.0;
    }
    const double norm2 = arma::dot(y.row(m), y.row(m));
    if (norm2 > cap[m]) {
      y.row(m) *= (cap[m] > 0.0) ? std::sqrt(cap[m] / norm2) : 0.0;
    }
  }
}

struct ConstraintEval {
  arma::vec violation;  // K: sqrt(t V_k) - lin_k (positive = violated)
  arma::vec scale;      // K: sqrt(t V_k), for relative tolerance
  double phi = 0.0;     // sum of squared positive violations
};

ConstraintEval eval_constraints(const FeasProblem& pb, double t, const arma::mat& y,
                                arma::mat* grad) {
  const std::size_t K = pb.n_things();
  ConstraintEval ev;
  ev.violation.set_size(K);
  ev.scale.set_size(K);
  if (grad != nullptr) grad->zeros(pb.n_aps(), K);

  arma::mat ysq;
  if (!pb.reduced()) ysq = arma::square(y);

  for (std::size_t k = 0; k < K; ++k) {
    const double lin_k = arma::dot(pb.lin.col(k), y.col(k));
    double v_k;
    arma::rowvec zre, zim;
    if (pb.reduced()) {
      v_k = pb.const_v[k];
    } else {
      zre = arma::sum(pb.coh_re[k] % y, 0);
      zim = arma::sum(pb.coh_im[k] % y, 0);
      v_k = 1.0 / pb.rho_d + arma::accu(pb.quad[k] % ysq) +
            pb.tau_rho_p * (arma::dot(zre, zre) + arma::dot(zim, zim));
    }
    const double rhs = std::sqrt(t * v_k);
    const double viol = rhs - lin_k;
    ev.violation[k] = viol;
    ev.scale[k] = rhs;
    if (viol > 0.0) {
      ev.phi += viol * viol;
      if (grad != nullptr) {
        // d(viol)/dy = sqrt(t)/(2 sqrt(V)) * dV/dy - lin e_k
        grad->col(k) -= 2.0 * viol * pb.lin.col(k);
        if (!pb.reduced()) {
          const double c = viol * std::sqrt(t / v_k);
          *grad += (2.0 * c) * (pb.quad[k] % y);
          *grad += (2.0 * c * pb.tau_rho_p) *
                   (pb.coh_re[k].each_row() % zre + pb.coh_im[k].each_row() % zim);
        }
      }
    }
  }
  return ev;
}

bool is_feasible(const ConstraintEval& ev, double rel_slack) {
  for (std::size_t k = 0; k < ev.violation.n_elem; ++k) {
    if (ev.violation[k] > rel_slack * std::max(ev.scale[k], 1e-300)) return false;
  }
  return true;
}

struct FeasOutcome {
  bool feasible = false;
  std::size_t iterations = 0;
};

// Projected accelerated gradient on the squared constraint violations; the
// objective is convex, so a vanishing value certifies feasibility and a
// stalled positive value is treated as infeasible.
FeasOutcome solve_feasibility(const FeasProblem& pb, double t, arma::mat& y,
                              const FeasParams& prm) {
  FeasOutcome out;
  project_rows(y, pb.cap);
  {
    const ConstraintEval ev0 = eval_constraints(pb, t, y, nullptr);
    if (is_feasible(ev0, prm.rel_slack)) {
      out.feasible = true;
      return out;
    }
  }

  arma::mat x_prev = y;
  arma::mat z = y;  // extrapolated point
  double momentum = 1.0;
  double lip = 1.0;
  double best_phi = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;

  arma::mat grad(pb.n_aps(), pb.n_things());
  for (std::size_t it = 1; it <= prm.max_iter; ++it) {
    out.iterations = it;
    const ConstraintEval ev_z = eval_constraints(pb, t, z, &grad);
    if (is_feasible(ev_z, prm.rel_slack)) {
      y = z;
      out.feasible = true;
      return out;
    }

    // Backtracking on the quadratic model around z.
    arma::mat x_next;
    double phi_next = 0.0;
    for (int bt = 0; bt < 60; ++bt) {
      x_next = z - grad / lip;
      project_rows(x_next, pb.cap);
      const arma::mat dx = x_next - z;
      const double quad_bound =
          ev_z.phi + arma::accu(grad % dx) + 0.5 * lip * arma::accu(dx % dx);
      phi_next = eval_constraints(pb, t, x_next, nullptr).phi;
      if (phi_next <= quad_bound + 1e-18) break;
      lip *= 2.0;
    }

    const ConstraintEval ev_x = eval_constraints(pb, t, x_next, nullptr);
    if (is_feasible(ev_x, prm.rel_slack)) {
      y = x_next;
      out.feasible = true;
      return out;
    }

    if (phi_next < best_phi * (1.0 - 1e-10)) {
      best_phi = phi_next;
      since_best = 0;
    } else {
      ++since_best;
      if (since_best >= prm.stall_window) break;
    }

    const double momentum_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
    z = x_next + ((momentum - 1.0) / momentum_next) * (x_next - x_prev);
    x_prev = x_next;
    momentum = momentum_next;
    lip *= 0.95;
  }
  y = x_prev;
  return out;
}

struct BisectResult {
  double t = 0.0;
  arma::mat y;
  DlSolveStats stats;
};

BisectResult bisect_max_target(const FeasProblem& pb, double t_hi, double rel_tol,
                               const FeasParams& prm) {
  BisectResult res;
  res.y.zeros(pb.n_aps(), pb.n_things());
  if (t_hi <= 0.0) return res;

  double t_lo = 0.0;
  arma::mat y_best = res.y;
  // The analytic upper bound can be pessimistic only in degenerate cases;
  // expand until infeasible so bisection starts from a valid bracket.
  for (int guard = 0; guard < 60; ++guard) {
    arma::mat y_try = y_best;
    const FeasOutcome fo = solve_feasibility(pb, t_hi, y_try, prm);
    res.stats.bisection_steps++;
    res.stats.feasibility_iterations += fo.iterations;
    if (!fo.feasible) break;
    t_lo = t_hi;
    y_best = y_try;
    t_hi *= 2.0;
  }

  while (t_hi - t_lo > rel_tol * t_hi) {
    const double mid = 0.5 * (t_lo + t_hi);
    arma::mat y_try = y_best;
    const FeasOutcome fo = solve_feasibility(pb, mid, y_try, prm);
    res.stats.bisection_steps++;
    res.stats.feasibility_iterations += fo.iterations;
    if (fo.feasible) {
      t_lo = mid;
      y_best = y_try;
    } else {
      t_hi = mid;
    }
  }
  res.t = t_lo;
  res.y = y_best;
  return res;
}

// Scales each thing's column so its constraint holds with equality at target
// t; only ever scales down (up to the per-AP budget), which cannot break
// feasibility of the others. Equalizes the SINRs at the bisection target.
void equalize_columns(const FeasProblem& pb, double t, arma::mat& y, int sweeps) {
  const std::size_t K = pb.n_things();
  const std::size_t M = pb.n_aps();
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    for (std::size_t k = 0; k < K; ++k) {
      const double lin_k = arma::dot(pb.lin.col(k), y.col(k));
      if (lin_k <= 0.0) continue;
      double scale;
      if (pb.reduced()) {
        scale = std::sqrt(t * pb.const_v[k]) / lin_k;
      } else {
        // Split V into own-column and cross terms: V = v_cross + s^2 v_own
        // after scaling column k by s; solve s * lin = sqrt(t(v_cross + s^2 v_own)).
        arma::mat ysq = arma::square(y);
        double v_own = arma::dot(pb.quad[k].col(k), ysq.col(k));
        const arma::rowvec zre = arma::sum(pb.coh_re[k] % y, 0);
        const arma::rowvec zim = arma::sum(pb.coh_im[k] % y, 0);
        double v_all = 1.0 / pb.rho_d + arma::accu(pb.quad[k] % ysq) +
                       pb.tau_rho_p * (arma::dot(zre, zre) + arma::dot(zim, zim));
        // own column never appears in its own coherent term (column k is zero there)
        const double v_cross = v_all - v_own;
        const double denom = lin_k * lin_k - t * v_own;
        if (denom <= 0.0) continue;
        scale = std::sqrt(t * v_cross / denom);
      }
      if (!std::isfinite(scale) || scale <= 0.0) continue;
      if (scale > 1.0) {
        // cap the upscale by the per-AP budgets
        for (std::size_t m = 0; m < M; ++m) {
          const double ymk2 = y(m, k) * y(m, k);
          if (ymk2 <= 0.0) continue;
          const double room = pb.cap[m] - (arma::dot(y.row(m), y.row(m)) - ymk2);
          if (room <= 0.0) {
            scale = std::min(scale, 1.0);
          } else {
            scale = std::min(scale, std::sqrt(room / ymk2));
          }
        }
      }
      y.col(k) *= scale;
    }
  }
}

FeasParams params_for_tol(double tol) {
  FeasParams prm;
  prm.rel_slack = std::clamp(tol * 1e-4, 1e-12, 1e-7);
  prm.max_iter = 2500;
  if (tol < 1e-3) {
    prm.max_iter += static_cast<std::size_t>(1000.0 * std::log10(1e-3 / tol));
  }
  return prm;
}

}  // namespace

arma::vec per_ap_power(const arma::mat& eta, const EstimationStats& stats) {
  if (eta.n_rows != stats.n_aps() || eta.n_cols != stats.n_things()) {
    throw std::invalid_argument("per_ap_power: eta shape mismatch");
  }
  return arma::sum(eta % stats.gamma, 1);
}

arma::vec dl_sinr_closed_form(const Scenario& scn, const EstimationStats& stats,
                              const DlPowerAllocation& alloc) {
  if (alloc.eta.n_rows != scn.M || alloc.eta.n_cols != scn.K) {
    throw std::invalid_argument("dl_sinr_closed_form: eta shape mismatch");
  }
  auto filler = [&](std::size_t m, const arma::rowvec&, arma::mat& rows) {
    rows.row(0) = alloc.eta.row(m);
  };
  return closed_form_engine(scn, &stats, 1, filler).front();
}

std::vector<arma::vec> dl_sinr_uniform_streaming(const Scenario& scn,
                                                 const std::vector<arma::vec>& p_list) {
  for (const auto& p : p_list) {
    if (p.n_elem != scn.M) throw std::invalid_argument("uniform streaming: p length mismatch");
  }
  auto filler = [&](std::size_t m, const arma::rowvec& gamma_row, arma::mat& rows) {
    const double gsum = arma::sum(gamma_row);
    for (std::size_t l = 0; l < p_list.size(); ++l) {
      const double eta_m = gsum > 0.0 ? p_list[l][m] / gsum : 0.0;
      rows.row(l).fill(eta_m);
    }
  };
  return closed_form_engine(scn, nullptr, p_list.size(), filler);
}

arma::vec dl_sinr_given_p_model(const EstimationStats& stats, const arma::vec& p,
                                const arma::mat& eta, double rho_d) {
  const std::size_t K = stats.n_things();
  arma::vec sinr(K);
  const arma::mat amp = arma::sqrt(eta) % stats.gamma;
  for (std::size_t k = 0; k < K; ++k) {
    const double num = arma::sum(amp.col(k));
    const double den = 1.0 + rho_d * arma::dot(p, stats.beta.col(k));
    sinr[k] = rho_d * num * num / den;
  }
  return sinr;
}

DlMaxminResult maxmin_dl_full(const Scenario& scn, const EstimationStats& stats, double rho_d,
                              double tol) {
  if (!stats.has_vectors()) {
    throw std::invalid_argument("maxmin_dl_full requires full stats storage");
  }
  const std::size_t M = scn.M;
  const std::size_t K = scn.K;
  const double tau_rho_p = static_cast<double>(scn.cfg.pilot_len) * scn.rho_p;

  // Interference maps in the power-share domain.
  arma::mat n_mat(M, K), s_mat(M, K);
  std::vector<arma::cx_mat> p_mats(M);
  for (std::size_t m = 0; m < M; ++m) {
    const arma::cx_mat a_m = stats.a.slice(m);
    p_mats[m] = scn.pilots.t() * a_m;
    for (std::size_t k = 0; k < K; ++k) {
      n_mat(m, k) = std::real(arma::cdot(a_m.col(k), a_m.col(k)));
    }
    s_mat.row(m) = scn.beta.row(m) * arma::square(arma::abs(p_mats[m]));
  }

  FeasProblem pb;
  pb.lin = arma::sqrt(stats.gamma);
  pb.cap = arma::vec(M, arma::fill::ones);
  pb.rho_d = rho_d;
  pb.tau_rho_p = tau_rho_p;
  pb.quad.resize(K);
  pb.coh_re.resize(K);
  pb.coh_im.resize(K);
  const arma::mat cross_over_gamma = (n_mat + tau_rho_p * s_mat) / stats.gamma;
  const arma::mat sqrt_gamma = arma::sqrt(stats.gamma);
  for (std::size_t k = 0; k < K; ++k) {
    arma::mat q = cross_over_gamma.each_col() % stats.beta.col(k);
    q.col(k) = stats.beta.col(k);  // own beamforming-uncertainty coefficient
    pb.quad[k] = std::move(q);
    arma::cx_mat c(M, K);
    for (std::size_t m = 0; m < M; ++m) {
      c.row(m) = stats.beta(m, k) * (p_mats[m].row(k) / sqrt_gamma.row(m));
    }
    c.col(k).zeros();
    pb.coh_re[k] = arma::real(c);
    pb.coh_im[k] = arma::imag(c);
  }

  // Single-user upper bound per thing at full per-AP budgets.
  double t_hi = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    const double num = arma::sum(sqrt_gamma.col(k));
    const double den = 1.0 + rho_d * arma::sum(stats.beta.col(k));
    t_hi = std::max(t_hi, rho_d * num * num / den);
  }

  const FeasParams prm = params_for_tol(tol);
  BisectResult bis = bisect_max_target(pb, t_hi, tol, prm);
  equalize_columns(pb, bis.t, bis.y, 3);

  DlMaxminResult res;
  res.alloc.eta = arma::square(bis.y) / stats.gamma;
  res.alloc.p = per_ap_power(res.alloc.eta, stats);
  res.stats = bis.stats;
  res.min_sinr = dl_sinr_closed_form(scn, stats, res.alloc).min();
  return res;
}

DlGivenPResult maxmin_dl_given_p(const Scenario& scn, const EstimationStats& stats,
                                 const arma::vec& p, double rho_d, double tol) {
  const std::size_t M = scn.M;
  const std::size_t K = scn.K;
  if (p.n_elem != M) throw std::invalid_argument("maxmin_dl_given_p: p length mismatch");
  if (p.min() < 0.0 || p.max() > 1.0 + 1e-12) {
    throw std::invalid_argument("maxmin_dl_given_p: p must lie in [0,1]");
  }

  DlGivenPResult res;
  res.alloc.eta.zeros(M, K);
  res.alloc.p.zeros(M);
  if (p.max() <= 0.0) return res;  // all APs silent

  FeasProblem pb;
  pb.lin = arma::sqrt(stats.gamma);
  pb.cap = p;
  pb.rho_d = rho_d;
  pb.const_v.set_size(K);
  double t_hi = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    const double den = 1.0 + rho_d * arma::dot(p, stats.beta.col(k));
    pb.const_v[k] = den / rho_d;
    const double num = arma::dot(arma::sqrt(p), pb.lin.col(k));
    t_hi = std::max(t_hi, rho_d * num * num / den);
  }

  const FeasParams prm = params_for_tol(tol);
  BisectResult bis = bisect_max_target(pb, t_hi, tol, prm);

  // Restore the per-AP equality by scaling rows up; in the reduced model the
  // denominators are fixed so no SINR can decrease. Verified anyway.
  arma::mat eta = arma::square(bis.y) / stats.gamma;
  const arma::vec sinr_before = dl_sinr_given_p_model(stats, p, eta, rho_d);
  arma::mat eta_scaled = eta;
  std::vector<arma::uword> slack;
  for (std::size_t m = 0; m < M; ++m) {
    const double used = arma::dot(eta.row(m), stats.gamma.row(m));
    if (used > 1e-300) {
      eta_scaled.row(m) *= p[m] / used;
    } else if (p[m] > 0.0) {
      slack.push_back(m);
    }
  }
  const arma::vec sinr_after = dl_sinr_given_p_model(stats, p, eta_scaled, rho_d);
  if (arma::all(sinr_after >= sinr_before - 1e-12 * arma::abs(sinr_before))) {
    res.alloc.eta = std::move(eta_scaled);
    res.min_sinr = sinr_after.min();
  } else {
    res.alloc.eta = std::move(eta);
    res.min_sinr = sinr_before.min();
    for (std::size_t m = 0; m < M; ++m) {
      const double used = arma::dot(res.alloc.eta.row(m), stats.gamma.row(m));
      if (used < p[m] - 1e-8) slack.push_back(m);
    }
  }
  res.slack_aps = arma::uvec(slack);
  res.alloc.p = per_ap_power(res.alloc.eta, stats);
  res.stats = bis.stats;
  return res;
}

DlPowerAllocation uniform_power(const EstimationStats& stats, const arma::vec& p) {
  const std::size_t M = stats.n_aps();
  const std::size_t K = stats.n_things();
  if (p.n_elem != M) throw std::invalid_argument("uniform_power: p length mismatch");
  DlPowerAllocation alloc;
  alloc.eta.set_size(M, K);
  for (std::size_t m = 0; m < M; ++m) {
    const double gsum = arma::sum(stats.gamma.row(m));
    alloc.eta.row(m).fill(gsum > 0.0 ? p[m] / gsum : 0.0);
  }
  alloc.p = per_ap_power(alloc.eta, stats);
  return alloc;
}

DlRateResult dl_rate_and_ee(const arma::vec& sinr, const arma::vec& p, double P_d,
                            const RadioConfig& cfg) {
  if (sinr.n_elem > 0 && sinr.min() < 0) throw std::invalid_argument("SINRs must be >= 0");
  const double total_power = P_d * arma::sum(p);
  if (total_power <= 0.0) throw std::invalid_argument("dl_rate_and_ee: zero total power");
  DlRateResult res;
  res.spectral = arma::log2(1.0 + sinr);
  res.throughput = throughput_prefactor(cfg) * res.spectral;
  res.energy_efficiency = arma::sum(res.throughput) / total_power;
  return res;
}

}  // namespace cfiot
