#include "spcs/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

#include "spcs/matrix_io.hpp"
#include "spcs/model.hpp"
#include "spcs/parallel.hpp"
#include "spcs/rng.hpp"

namespace spcs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kBlock = 4096;

// Extreme-eigenvalue deviation of a Hermitian Gram matrix.
template <typename Scalar>
double isometry_deviation(const Matrix<Scalar>& G) {
  double lo = 0.0, hi = 0.0;
  if (G.rows() == 1) {
    lo = hi = std::real(G(0, 0));
  } else if (G.rows() == 2) {
    const double a = std::real(G(0, 0)), d = std::real(G(1, 1));
    const double h = std::hypot(0.5 * (a - d), std::abs(G(0, 1)));
    lo = 0.5 * (a + d) - h;
    hi = 0.5 * (a + d) + h;
  } else {
    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(G, Eigen::EigenvaluesOnly);
    lo = es.eigenvalues()(0);
    hi = es.eigenvalues()(G.rows() - 1);
  }
  return std::max(hi - 1.0, 1.0 - lo);
}

// Lexicographic rank -> combination of k elements out of n.
void unrank(std::uint64_t rank, int n, int k, std::vector<int>& c) {
  c.resize(static_cast<std::size_t>(k));
  int start = 0;
  for (int i = 0; i < k; ++i) {
    for (int v = start;; ++v) {
      const std::uint64_t cnt = binomial(n - v - 1, k - i - 1);
      if (rank < cnt) {
        c[static_cast<std::size_t>(i)] = v;
        start = v + 1;
        break;
      }
      rank -= cnt;
    }
  }
}

bool next_combination(std::vector<int>& c, int n) {
  const int k = static_cast<int>(c.size());
  int i = k - 1;
  while (i >= 0 && c[static_cast<std::size_t>(i)] == n - k + i) --i;
  if (i < 0) return false;
  ++c[static_cast<std::size_t>(i)];
  for (int j = i + 1; j < k; ++j) c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
  return true;
}

void random_combination(int n, int k, Rng& rng, std::vector<int>& c) {
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < k; ++i) {
    const auto j = static_cast<std::size_t>(rng.integer(i, n - 1));
    std::swap(idx[static_cast<std::size_t>(i)], idx[j]);
  }
  c.assign(idx.begin(), idx.begin() + k);
  std::sort(c.begin(), c.end());
}

// Shared driver: `columns(c, cols)` expands a k-support into the Gram indices.
template <typename Scalar, typename Expand>
std::pair<double, std::uint64_t> max_deviation(const Matrix<Scalar>& gram, int n, int k,
                                               const EnumerationMode& mode, Expand expand) {
  if (k == 0) return {0.0, 1};
  std::uint64_t total = 0;
  if (mode.sampled) {
    require(mode.trials > 0, "sampled enumeration needs a positive trial count");
    total = mode.trials;
  } else {
    total = binomial(n, k);
    if (total > mode.budget) {
      throw BudgetExceeded("exhaustive enumeration of " + std::to_string(total) +
                           " supports exceeds the budget of " + std::to_string(mode.budget) +
                           "; use sampled mode for a lower bound");
    }
  }
  const std::uint64_t blocks = (total + kBlock - 1) / kBlock;
  std::vector<double> block_max(blocks, 0.0);
  parallel_for(blocks, mode.threads, [&](std::uint64_t b, int) {
    const std::uint64_t lo = b * kBlock;
    const std::uint64_t hi = std::min(total, lo + kBlock);
    std::vector<int> c, cols;
    Matrix<Scalar> sub;
    double best = 0.0;
    if (!mode.sampled) unrank(lo, n, k, c);
    for (std::uint64_t i = lo; i < hi; ++i) {
      if (mode.sampled) {
        Rng rng(derive_seed(mode.seed, i));
        random_combination(n, k, rng, c);
      } else if (i > lo) {
        next_combination(c, n);
      }
      expand(c, cols);
      const auto q = static_cast<Eigen::Index>(cols.size());
      sub.resize(q, q);
      for (Eigen::Index a = 0; a < q; ++a)
        for (Eigen::Index d = 0; d < q; ++d)
          sub(a, d) = gram(cols[static_cast<std::size_t>(a)], cols[static_cast<std::size_t>(d)]);
      best = std::max(best, isometry_deviation(sub));
    }
    block_max[b] = best;
  });
  return {*std::max_element(block_max.begin(), block_max.end()), total};
}

std::string format_bool(bool b) { return b ? "true" : "false"; }

}  // namespace

double BoundReport::at(const std::string& name) const {
  const auto it = constants.find(name);
  require(it != constants.end(), "bound report: no constant named '" + name + "'");
  return it->second;
}

std::uint64_t binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 v = 1;
  for (int i = 1; i <= k; ++i) {
    v = v * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
    if (v > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(v);
}

template <typename Scalar>
RipReport compute_ric(const Matrix<Scalar>& M, int k, const EnumerationMode& mode) {
  const int n = static_cast<int>(M.cols());
  require(k >= 0 && k <= n, "compute_ric: k must lie in [0, n]");
  const Matrix<Scalar> gram = M.adjoint() * M;
  const auto [delta, count] =
      max_deviation<Scalar>(gram, n, k, mode, [](const std::vector<int>& c, std::vector<int>& cols) {
        cols = c;
      });
  return {k, delta, count, mode.sampled};
}

template <typename Scalar>
DRipReport compute_drip(const SensingEnsemble<Scalar>& ens, int k, const EnumerationMode& mode) {
  const int n = static_cast<int>(ens.n());
  require(k >= 0 && k <= n, "compute_drip: k must lie in [0, n]");
  const Matrix<Scalar> psi = ens.psi();
  const Matrix<Scalar> gram = psi.adjoint() * psi;
  const auto [delta, count] = max_deviation<Scalar>(
      gram, n, k, mode, [n](const std::vector<int>& c, std::vector<int>& cols) {
        cols.resize(2 * c.size());
        for (std::size_t i = 0; i < c.size(); ++i) {
          cols[i] = c[i];
          cols[c.size() + i] = c[i] + n;
        }
      });
  return {k, delta, count, mode.sampled};
}

template <typename Scalar>
double spectral_norm(const Matrix<Scalar>& M, double rel_tol, int max_iter) {
  if (M.size() == 0) return 0.0;
  // Deterministic start with full support in the leading singular direction
  // for generic matrices.
  Vector<Scalar> v = Vector<Scalar>::Ones(M.cols()) / std::sqrt(static_cast<double>(M.cols()));
  const Vector<Scalar> row_sum = M.adjoint() * Vector<Scalar>::Ones(M.rows());
  if (row_sum.norm() > 0.0) v = row_sum / row_sum.norm();
  double sigma2 = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Vector<Scalar> w = M.adjoint() * (M * v);
    const double nrm = w.norm();
    if (nrm == 0.0) return 0.0;
    const double prev = sigma2;
    sigma2 = nrm;
    v = w / nrm;
    if (it > 0 && std::abs(sigma2 - prev) <= rel_tol * sigma2) break;
  }
  return std::sqrt(sigma2);
}

double drip_threshold(double r) {
  require(r >= 0.0, "drip_threshold: r must be nonnegative");
  return 1.0 / (std::sqrt(2.0 * (1.0 + r * r)) + 1.0);
}

double max_perturbation_radius(double delta_bar) {
  require(delta_bar > 0.0 && delta_bar < 1.0, "max_perturbation_radius: delta_bar must lie in (0, 1)");
  const double t = 1.0 / delta_bar - 1.0;
  const double radicand = 0.5 * t * t - 1.0;
  return radicand > 0.0 ? std::sqrt(radicand) : 0.0;
}

BoundReport sparse_bound_constants(double delta_bar_4k, double r, double psi_norm) {
  require(delta_bar_4k >= 0.0 && r >= 0.0 && psi_norm >= 0.0,
          "sparse_bound_constants: arguments must be nonnegative");
  BoundReport rep;
  rep.threshold = drip_threshold(r);
  rep.psi_spectral_norm = psi_norm;
  rep.condition_met = delta_bar_4k < rep.threshold;
  if (!rep.condition_met) {
    rep.constants = {{"C", kInf}, {"calC", kInf}};
    return rep;
  }
  const double s = std::sqrt(2.0 * (1.0 + r * r));
  const double C = 4.0 * std::sqrt(1.0 + delta_bar_4k) / (1.0 - (s + 1.0) * delta_bar_4k);
  const double calC = (2.0 + std::sqrt(1.0 + r * r) * psi_norm * C) / std::sqrt(1.0 - delta_bar_4k);
  rep.constants = {{"C", C}, {"calC", calC}};
  return rep;
}

BoundReport compressible_bound_constants(double delta_bar_4k, double r, double psi_norm, int k) {
  require(k >= 1, "compressible_bound_constants: k must be positive");
  BoundReport rep = sparse_bound_constants(delta_bar_4k, r, psi_norm);
  const std::map<std::string, double> sparse = rep.constants;
  rep.constants.clear();
  rep.constants["k"] = k;
  const std::vector<std::string> names = {"a", "b", "C0", "C1", "C2", "calC0", "calC1", "calC2"};
  if (!rep.condition_met) {
    for (const auto& nm : names) rep.constants[nm] = kInf;
    return rep;
  }
  const double d = delta_bar_4k;
  const double s = std::sqrt(2.0 * (1.0 + r * r));
  const double q = std::sqrt(1.0 + r * r);
  const double a = 1.0 - (s + 1.0) * d;
  const double b = std::sqrt(1.0 - d);
  const double C0 = 2.0 * (1.0 + (s - 1.0) * d) / a;
  const double C1 = 2.0 * std::sqrt(2.0) * r * d / a;
  rep.constants["a"] = a;
  rep.constants["b"] = b;
  rep.constants["C0"] = C0;
  rep.constants["C1"] = C1;
  rep.constants["C2"] = sparse.at("C");
  rep.constants["calC0"] = q * psi_norm * C0 / b;
  rep.constants["calC1"] = (q * C1 + 2.0 * r) * psi_norm / b;
  rep.constants["calC2"] = sparse.at("calC");
  return rep;
}

BoundReport baseline_bound_constants(double delta_2k, double eps_ratio_2k) {
  require(delta_2k >= 0.0 && eps_ratio_2k >= 0.0,
          "baseline_bound_constants: arguments must be nonnegative");
  BoundReport rep;
  const double sq2 = std::sqrt(2.0);
  const double e1 = 1.0 + eps_ratio_2k;
  rep.threshold = sq2 / (e1 * e1) - 1.0;
  rep.condition_met = delta_2k < rep.threshold;
  rep.std_condition_met = delta_2k < sq2 - 1.0;
  if (rep.std_condition_met) {
    const double den = 1.0 - (sq2 + 1.0) * delta_2k;
    rep.constants["C0_std"] = 2.0 * (1.0 + (sq2 - 1.0) * delta_2k) / den;
    rep.constants["C1_std"] = 4.0 * std::sqrt(1.0 + delta_2k) / den;
  } else {
    rep.constants["C0_std"] = kInf;
    rep.constants["C1_std"] = kInf;
  }
  if (rep.condition_met) {
    const double den = 1.0 - (sq2 + 1.0) * ((1.0 + delta_2k) * e1 * e1 - 1.0);
    rep.constants["C_ptb"] = 4.0 * std::sqrt(1.0 + delta_2k) * e1 / den;
  } else {
    rep.constants["C_ptb"] = kInf;
  }
  return rep;
}

template <typename Scalar>
ErrorMetrics error_metrics(const GroundTruth<Scalar>& gt, const RecoveryResult<Scalar>& res,
                           int k) {
  require(res.x_hat.size() == gt.x_o.size() && res.beta_hat.size() == gt.beta_o.size(),
          "error_metrics: length mismatch");
  ErrorMetrics m;
  m.signal_err = (res.x_hat - gt.x_o).norm();
  const Vector<Scalar> xk = best_k_term(gt.x_o, k);
  m.beta_err = ((res.beta_hat - gt.beta_o).template cast<Scalar>().cwiseProduct(xk)).norm();
  if (k == 0) {
    m.support_match = 1.0;
    return m;
  }
  const Vector<Scalar> xh = best_k_term(res.x_hat, k);
  int hits = 0;
  for (Eigen::Index j = 0; j < xk.size(); ++j)
    if (xk(j) != Scalar(0) && xh(j) != Scalar(0)) ++hits;
  m.support_match = static_cast<double>(hits) / k;
  return m;
}

std::string to_keyvalue(const BoundReport& report) {
  std::ostringstream os;
  os << "condition_met=" << format_bool(report.condition_met) << '\n';
  os << "threshold=" << format_scalar(report.threshold) << '\n';
  os << "psi_spectral_norm=" << format_scalar(report.psi_spectral_norm) << '\n';
  if (report.constants.count("C_ptb")) {
    os << "std_condition_met=" << format_bool(report.std_condition_met) << '\n';
  }
  for (const auto& [name, value] : report.constants) os << name << '=' << format_scalar(value) << '\n';
  return os.str();
}

std::string to_keyvalue(const RipReport& report) {
  std::ostringstream os;
  os << "k=" << report.k << '\n'
     << "delta=" << format_scalar(report.delta) << '\n'
     << "enumerated_supports=" << report.enumerated_supports << '\n'
     << "lower_bound=" << format_bool(report.lower_bound) << '\n';
  return os.str();
}

std::string to_keyvalue(const DRipReport& report) {
  std::ostringstream os;
  os << "k=" << report.k << '\n'
     << "order=" << 2 * report.k << '\n'
     << "delta_bar=" << format_scalar(report.delta_bar) << '\n'
     << "enumerated_supports=" << report.enumerated_supports << '\n'
     << "lower_bound=" << format_bool(report.lower_bound) << '\n';
  return os.str();
}

#define SPCS_INSTANTIATE_ANALYSIS(S)                                                           \
  template RipReport compute_ric<S>(const Matrix<S>&, int, const EnumerationMode&);            \
  template DRipReport compute_drip<S>(const SensingEnsemble<S>&, int, const EnumerationMode&); \
  template double spectral_norm<S>(const Matrix<S>&, double, int);                             \
  template ErrorMetrics error_metrics<S>(const GroundTruth<S>&, const RecoveryResult<S>&, int);

SPCS_INSTANTIATE_ANALYSIS(double)
SPCS_INSTANTIATE_ANALYSIS(cplx)

#undef SPCS_INSTANTIATE_ANALYSIS

}  // namespace spcs
