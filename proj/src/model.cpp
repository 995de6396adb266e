#include "spcs/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "spcs/rng.hpp"

namespace spcs {

namespace {

void normalize_columns(MatrixXd& M) {
  for (Eigen::Index j = 0; j < M.cols(); ++j) {
    if (M.rows() > 1) M.col(j).array() -= M.col(j).mean();
    const double nrm = M.col(j).norm();
    // A zero column after centring has probability zero; redraw-free fallback.
    if (nrm == 0.0) {
      M.col(j).setZero();
      M(0, j) = 1.0;
    } else {
      M.col(j) /= nrm;
    }
  }
}

MatrixXd gaussian_matrix(int m, int n, Rng& rng) {
  MatrixXd M(m, n);
  // Column-major fill keeps the draw order independent of Eigen internals.
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < m; ++i) M(i, j) = rng.normal();
  return M;
}

}  // namespace

VectorXd CompressibleSpec::template_magnitudes() const {
  validate();
  VectorXd v(n);
  for (int j = 0; j < n; ++j) v(j) = c_q * std::pow(static_cast<double>(j + 1), -q);
  return v;
}

SensingEnsemble<double> gen_gaussian_ensemble(int m, int n, double r,
                                              std::uint64_t seed) {
  require(m > 0 && n > 0, "gen_gaussian_ensemble: dimensions must be positive");
  require(r >= 0.0, "gen_gaussian_ensemble: r must be nonnegative");
  Rng rng(seed);
  SensingEnsemble<double> ens;
  ens.A = gaussian_matrix(m, n, rng);
  ens.B = gaussian_matrix(m, n, rng);
  normalize_columns(ens.A);
  normalize_columns(ens.B);
  ens.r = r;
  return ens;
}

VectorXd gen_signal(int n, int k, const SignalKind& kind, std::uint64_t seed) {
  require(n > 0, "gen_signal: n must be positive");
  Rng rng(seed);
  VectorXd x = VectorXd::Zero(n);
  if (const auto* spec = std::get_if<CompressibleSpec>(&kind)) {
    CompressibleSpec s = *spec;
    s.n = n;
    const VectorXd mags = s.template_magnitudes();
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng.engine());
    for (int j = 0; j < n; ++j) x(perm[static_cast<std::size_t>(j)]) = rng.sign() * mags(j);
    return x;
  }
  require(k >= 0 && k <= n, "gen_signal: k must lie in [0, n]");
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  // Partial Fisher-Yates: the first k entries form a uniform k-subset.
  for (int i = 0; i < k; ++i) {
    const auto j = static_cast<std::size_t>(rng.integer(i, n - 1));
    std::swap(idx[static_cast<std::size_t>(i)], idx[j]);
  }
  const bool positive = std::holds_alternative<PositiveSpikes>(kind);
  for (int i = 0; i < k; ++i)
    x(idx[static_cast<std::size_t>(i)]) = positive ? 1.0 : rng.sign();
  return x;
}

VectorXd gen_perturbation(int n, double r, std::uint64_t seed) {
  require(n >= 0, "gen_perturbation: n must be nonnegative");
  require(r >= 0.0, "gen_perturbation: r must be nonnegative");
  VectorXd beta = VectorXd::Zero(n);
  if (r == 0.0) return beta;
  Rng rng(seed);
  for (int j = 0; j < n; ++j) beta(j) = rng.uniform(-r, r);
  return beta;
}

VectorXd gen_noise(int m, double epsilon, std::uint64_t seed) {
  require(m >= 0, "gen_noise: m must be nonnegative");
  require(epsilon >= 0.0, "gen_noise: epsilon must be nonnegative");
  VectorXd e = VectorXd::Zero(m);
  if (epsilon == 0.0 || m == 0) return e;
  Rng rng(seed);
  for (int i = 0; i < m; ++i) e(i) = rng.normal();
  return e * (epsilon / e.norm());
}

Instance gen_instance(int m, int n, int k, double r, double epsilon,
                      const SignalKind& kind, std::uint64_t seed) {
  Instance inst;
  inst.ensemble = gen_gaussian_ensemble(m, n, r, derive_seed(seed, Stream::ensemble));
  auto& gt = inst.truth;
  gt.x_o = gen_signal(n, k, kind, derive_seed(seed, Stream::signal));
  gt.beta_o = gen_perturbation(n, r, derive_seed(seed, Stream::perturbation));
  gt.e = gen_noise(m, epsilon, derive_seed(seed, Stream::noise));
  gt.epsilon = epsilon;
  gt.k = k;
  gt.sparse = !std::holds_alternative<CompressibleSpec>(kind);
  inst.data = measure(inst.ensemble, gt);
  return inst;
}

}  // namespace spcs
