#ifndef SPCS_ANALYSIS_HPP_
#define SPCS_ANALYSIS_HPP_

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

#include "spcs/recovery.hpp"
#include "spcs/types.hpp"

namespace spcs {

/// Raised when exhaustive enumeration would exceed the configured budget.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EnumerationMode {
  /// Exact enumeration unless sampled is set; sampled mode draws `trials`
  /// uniformly random supports and yields a lower bound.
  bool sampled = false;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  std::uint64_t budget = 5'000'000;
  int threads = 1;

  static EnumerationMode exact(int threads = 1) {
    EnumerationMode m;
    m.threads = threads;
    return m;
  }
  static EnumerationMode sampling(std::uint64_t trials, std::uint64_t seed, int threads = 1) {
    EnumerationMode m;
    m.sampled = true;
    m.trials = trials;
    m.seed = seed;
    m.threads = threads;
    return m;
  }
};

struct RipReport {
  int k = 0;
  double delta = 0.0;
  std::uint64_t enumerated_supports = 0;
  bool lower_bound = false;
};

struct DRipReport {
  /// Support size; the reported constant is of order 2k.
  int k = 0;
  double delta_bar = 0.0;
  std::uint64_t enumerated_supports = 0;
  bool lower_bound = false;
};

struct BoundReport {
  bool condition_met = false;
  double threshold = 0.0;
  std::map<std::string, double> constants;
  double psi_spectral_norm = 0.0;
  /// Only used by the baseline report: whether the unperturbed RIC condition
  /// (delta < sqrt(2) - 1) holds, which governs C0_std and C1_std.
  bool std_condition_met = false;

  double at(const std::string& name) const;
};

/// C(n, k), saturating at UINT64_MAX.
std::uint64_t binomial(int n, int k);

/// max over k-column supports T of max(lambda_max - 1, 1 - lambda_min) of
/// the Gram of M_T.
template <typename Scalar>
RipReport compute_ric(const Matrix<Scalar>& M, int k, const EnumerationMode& mode = {});

/// As compute_ric over the 2k columns [A_T, B_T] with one shared support T.
template <typename Scalar>
DRipReport compute_drip(const SensingEnsemble<Scalar>& ens, int k,
                        const EnumerationMode& mode = {});

/// Largest singular value by power iteration on M^H M.
template <typename Scalar>
double spectral_norm(const Matrix<Scalar>& M, double rel_tol = 1e-10, int max_iter = 100000);

/// 1 / (sqrt(2 (1 + r^2)) + 1).
double drip_threshold(double r);

/// sqrt(0.5 (1/delta_bar - 1)^2 - 1), or 0 when the radicand is not positive.
double max_perturbation_radius(double delta_bar);

/// Constants C and calC of the sparse-signal error bound.
BoundReport sparse_bound_constants(double delta_bar_4k, double r, double psi_norm);

/// a, b, C0, C1, C2, calC0, calC1, calC2 of the compressible-signal bound.
/// k is recorded in the report; the constants themselves do not depend on it.
BoundReport compressible_bound_constants(double delta_bar_4k, double r, double psi_norm, int k);

/// C0_std, C1_std of the unperturbed bound and C_ptb of the nominal-matrix
/// bound with relative perturbation eps_ratio_2k.
BoundReport baseline_bound_constants(double delta_2k, double eps_ratio_2k);

struct ErrorMetrics {
  double signal_err = 0.0;
  double beta_err = 0.0;
  double support_match = 0.0;
};

/// signal_err = ||x_hat - x_o||, beta_err = ||(beta_hat - beta_o) .* x^k||,
/// support_match = |supp(x_hat^k) & supp(x^k)| / k.
template <typename Scalar>
ErrorMetrics error_metrics(const GroundTruth<Scalar>& gt, const RecoveryResult<Scalar>& res,
                           int k);

std::string to_keyvalue(const BoundReport& report);
std::string to_keyvalue(const RipReport& report);
std::string to_keyvalue(const DRipReport& report);

}  // namespace spcs

#endif  // SPCS_ANALYSIS_HPP_
