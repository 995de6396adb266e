#ifndef SPCS_RECOVERY_HPP_
#define SPCS_RECOVERY_HPP_

#include <string>
#include <vector>

#include "spcs/solvers.hpp"
#include "spcs/types.hpp"

namespace spcs {

template <typename Scalar>
struct RecoveryResult {
  Vector<Scalar> x_hat;
  VectorXd beta_hat;
  /// ||x^(j)||_1 after every accepted x-step (a single entry for one-shot strategies).
  std::vector<double> l1_trace;
  int iterations = 0;
  bool converged = false;
  std::string strategy;
  SolveStatus status = SolveStatus::optimal;
  /// Set by relax_check when the relaxation was not complementary.
  bool fell_back = false;
  double complementarity_defect = 0.0;
};

struct AaOptions {
  double rel_change_tol = 1e-6;
  int max_outer_iter = 200;
  SolverOptions inner;

  void validate() const {
    require(rel_change_tol > 0.0, "aa options: rel_change_tol must be positive");
    require(max_outer_iter > 0, "aa options: max_outer_iter must be positive");
    inner.validate();
  }
};

/// min ||x||_1 s.t. ||y - (A + B diag(beta_o)) x|| <= epsilon.
template <typename Scalar>
RecoveryResult<Scalar> recover_oracle_bpdn(const SensingEnsemble<Scalar>& ens,
                                           const VectorXd& beta_o, const Vector<Scalar>& y,
                                           double epsilon, const SolverOptions& opts = {});

/// BPDN on A alone with the slack epsilon + eps_mult.
template <typename Scalar>
RecoveryResult<Scalar> recover_nominal_bpdn(const SensingEnsemble<Scalar>& ens,
                                            const Vector<Scalar>& y, double epsilon,
                                            double eps_mult, const SolverOptions& opts = {});

/// BPDN over z = [x; p] with matrix [A, B]. beta_hat is the clamped ratio
/// p_j / x_j on the support of x (an extraction this strategy does not
/// itself define).
template <typename Scalar>
RecoveryResult<Scalar> recover_tps_bpdn(const SensingEnsemble<Scalar>& ens,
                                        const Vector<Scalar>& y, double epsilon,
                                        const SolverOptions& opts = {});

/// Alternating minimisation: x-step BPDN with A + B diag(beta), beta-step box
/// least squares, starting from beta = 0.
///
/// An x-step whose l1 norm exceeds the previous one (possible only through
/// solver inexactness, since the previous x stays feasible after the beta-step)
/// is rejected in favour of the previous x.
template <typename Scalar>
RecoveryResult<Scalar> recover_aa_p_bpdn(const SensingEnsemble<Scalar>& ens,
                                         const Vector<Scalar>& y, double epsilon,
                                         const AaOptions& aopts = {});

/// Positive signals: solves min 1'x s.t. the [A, B] residual ball, x >= 0,
/// |p| <= r x, then beta_j = p_j / x_j on the support.
RecoveryResult<double> recover_pp_bpdn(const SensingEnsemble<double>& ens, const VectorXd& y,
                                       double epsilon, const SolverOptions& opts = {});

/// Solves the relaxation over [A, -A, B]; maps back when the split is
/// complementary (defect <= 1e-8), otherwise returns the alternating result.
RecoveryResult<double> recover_relax_check(const SensingEnsemble<double>& ens,
                                           const VectorXd& y, double epsilon,
                                           const AaOptions& aopts = {});

struct Effectiveness {
  bool effective = false;
  /// ||x_hat||_1 - ||x_o||_1.
  double l1_gap = 0.0;
  /// epsilon - ||y - (A + B diag(beta_hat)) x_hat||.
  double feasibility_slack = 0.0;
};

template <typename Scalar>
Effectiveness effectiveness_check(const RecoveryResult<Scalar>& result,
                                  const SensingEnsemble<Scalar>& ens, const Vector<Scalar>& y,
                                  double epsilon, const Vector<Scalar>& x_o);

/// beta_j = clamp(num_j / den_j, -r, r) where |den_j| > tol, else 0.
template <typename Scalar>
VectorXd extract_beta(const Vector<Scalar>& den, const Vector<Scalar>& num, double r, double tol);

}  // namespace spcs

#endif  // SPCS_RECOVERY_HPP_
