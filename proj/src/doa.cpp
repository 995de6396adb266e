#include "spcs/doa.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "spcs/rng.hpp"

namespace spcs {

using std::numbers::pi;

DoaGrid DoaGrid::uniform(int n) {
  require(n >= 1, "doa grid: n must be positive");
  DoaGrid g;
  g.n = n;
  g.points.resize(n);
  for (int l = 1; l <= n; ++l) g.points(l - 1) = (2.0 * l - 1.0) / n - 1.0;
  return g;
}

Eigen::Index DoaGrid::nearest(double theta) const {
  Eigen::Index best = 0;
  (points.array() - theta).abs().minCoeff(&best);
  return best;
}

VectorXc steering_vector(int m, double theta) {
  require(m >= 1, "steering_vector: m must be positive");
  VectorXc a(m);
  const double c = 0.5 * (m + 1);
  for (int l = 1; l <= m; ++l) a(l - 1) = std::polar(1.0 / std::sqrt(m), pi * (l - c) * theta);
  return a;
}

VectorXc steering_derivative(int m, double theta) {
  VectorXc a = steering_vector(m, theta);
  const double c = 0.5 * (m + 1);
  for (int l = 1; l <= m; ++l) a(l - 1) *= cplx(0.0, pi * (l - c));
  return a;
}

double array_kappa(int m) { return 0.5 * pi * std::sqrt((m * static_cast<double>(m) - 1.0) / 3.0); }

double taylor_remainder_bound(int m, int n) {
  require(m >= 2 && n >= 2, "taylor_remainder_bound: need m >= 2 and n >= 2");
  const double m2 = static_cast<double>(m) * m;
  const double nn = static_cast<double>(n) * n;
  return pi * pi / (8.0 * nn) * std::sqrt((3.0 * m2 * m2 - 10.0 * m2 + 7.0) / 15.0);
}

double model_error_bound(int m, int n, int k, double s_norm) {
  require(k >= 1, "model_error_bound: k must be positive");
  require(s_norm >= 0.0, "model_error_bound: s_norm must be nonnegative");
  return std::sqrt(static_cast<double>(k)) * s_norm * taylor_remainder_bound(m, n);
}

DoaModel build_grid_model(int m, int n, int k, double s_norm) {
  require(m >= 2, "build_grid_model: m must be at least 2");
  require(n >= 2 && n % 2 == 0, "build_grid_model: n must be even and positive");
  DoaModel model;
  model.m = m;
  model.k = k;
  model.grid = DoaGrid::uniform(n);
  model.kappa = array_kappa(m);
  model.r = model.kappa / n;
  model.ens.A.resize(m, n);
  model.ens.B.resize(m, n);
  for (int l = 0; l < n; ++l) {
    model.ens.A.col(l) = steering_vector(m, model.grid.points(l));
    model.ens.B.col(l) = steering_derivative(m, model.grid.points(l)) / model.kappa;
  }
  model.ens.r = model.r;
  model.eps_model = model_error_bound(m, n, k, s_norm);
  return model;
}

VectorXc simulate_scene(const DoaScene& scene, int m) {
  require(scene.theta.size() == scene.s.size(), "simulate_scene: theta and s lengths differ");
  VectorXc y = VectorXc::Zero(m);
  for (Eigen::Index j = 0; j < scene.theta.size(); ++j) y += steering_vector(m, scene.theta(j)) * scene.s(j);
  return y;
}

DoaEstimate estimate_doa(const VectorXc& y, const DoaModel& model, const AaOptions& aopts) {
  require(y.size() == model.m, "estimate_doa: y length must equal m");
  const int n = model.grid.n;
  require(model.k >= 1 && model.k <= n, "estimate_doa: k out of range");
  DoaEstimate est;
  est.recovery = recover_aa_p_bpdn(model.ens, y, model.eps_model, aopts);
  const VectorXc& x = est.recovery.x_hat;
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return std::abs(x(a)) > std::abs(x(b)); });
  est.support.assign(order.begin(), order.begin() + model.k);
  std::sort(est.support.begin(), est.support.end());
  VectorXd beta = VectorXd::Zero(n);
  est.theta_hat.resize(model.k);
  for (int i = 0; i < model.k; ++i) {
    const Eigen::Index j = est.support[static_cast<std::size_t>(i)];
    beta(j) = est.recovery.beta_hat(j);
    est.theta_hat(i) = model.grid.points(j) + beta(j) / model.kappa;
  }
  est.recovery.beta_hat = beta;
  std::sort(est.theta_hat.data(), est.theta_hat.data() + est.theta_hat.size());
  return est;
}

VectorXd standard_cs_spectrum(const VectorXc& y, int m, int n_std, double epsilon,
                              const SolverOptions& opts) {
  const DoaGrid grid = DoaGrid::uniform(n_std);
  MatrixXc A(m, n_std);
  for (int l = 0; l < n_std; ++l) A.col(l) = steering_vector(m, grid.points(l));
  SocL1Problem<cplx> p{A, y, epsilon};
  return solve_socl1(p, opts).x.cwiseAbs();
}

double mse_lower_bound(int n) {
  require(n >= 1, "mse_lower_bound: n must be positive");
  return 1.0 / (3.0 * static_cast<double>(n) * n);
}

DoaScene protocol_scene(int n, std::uint64_t seed) {
  Rng rng(seed);
  DoaScene scene;
  scene.theta.resize(2);
  scene.s.resize(2);
  scene.theta(0) = rng.uniform(2.0 / n, 4.0 / n);
  scene.theta(1) = rng.uniform(12.0 / n, 14.0 / n);
  for (int j = 0; j < 2; ++j) scene.s(j) = std::polar(1.0, rng.uniform(-pi, pi));
  return scene;
}

}  // namespace spcs
