#include "spcs/recovery.hpp"

#include <algorithm>
#include <cmath>

namespace spcs {

namespace {

template <typename Scalar>
RecoveryResult<Scalar> from_bpdn(const SolverResult<Scalar>& sol, const std::string& name) {
  RecoveryResult<Scalar> out;
  out.x_hat = sol.x;
  out.l1_trace = {l1_norm(sol.x)};
  out.iterations = 1;
  out.status = sol.status;
  out.converged = sol.status == SolveStatus::optimal;
  out.strategy = name;
  return out;
}

template <typename Scalar>
double support_tol(const Vector<Scalar>& x) {
  return x.size() ? 1e-6 * x.cwiseAbs().maxCoeff() : 0.0;
}

template <typename Scalar>
VectorXd beta_step(const SensingEnsemble<Scalar>& ens, const Vector<Scalar>& y,
                   const Vector<Scalar>& x, const SolverOptions& opts) {
  BoxLsProblem<Scalar> bp;
  bp.G = ens.B * x.asDiagonal();
  bp.c = y - ens.A * x;
  bp.r = ens.r;
  return solve_box_ls(bp, opts);
}

}  // namespace

template <typename Scalar>
VectorXd extract_beta(const Vector<Scalar>& den, const Vector<Scalar>& num, double r, double tol) {
  require(den.size() == num.size(), "extract_beta: length mismatch");
  VectorXd beta = VectorXd::Zero(den.size());
  for (Eigen::Index j = 0; j < den.size(); ++j) {
    if (std::abs(den(j)) > tol) beta(j) = std::clamp(std::real(num(j) / den(j)), -r, r);
  }
  return beta;
}

template <typename Scalar>
RecoveryResult<Scalar> recover_oracle_bpdn(const SensingEnsemble<Scalar>& ens,
                                           const VectorXd& beta_o, const Vector<Scalar>& y,
                                           double epsilon, const SolverOptions& opts) {
  SocL1Problem<Scalar> p{ens.perturbed(beta_o), y, epsilon};
  auto out = from_bpdn(solve_socl1(p, opts), "oracle");
  out.beta_hat = beta_o;
  return out;
}

template <typename Scalar>
RecoveryResult<Scalar> recover_nominal_bpdn(const SensingEnsemble<Scalar>& ens,
                                            const Vector<Scalar>& y, double epsilon,
                                            double eps_mult, const SolverOptions& opts) {
  require(eps_mult >= 0.0, "nominal: eps_mult must be nonnegative");
  SocL1Problem<Scalar> p{ens.A, y, epsilon + eps_mult};
  auto out = from_bpdn(solve_socl1(p, opts), "nominal");
  out.beta_hat = VectorXd::Zero(ens.n());
  return out;
}

template <typename Scalar>
RecoveryResult<Scalar> recover_tps_bpdn(const SensingEnsemble<Scalar>& ens,
                                        const Vector<Scalar>& y, double epsilon,
                                        const SolverOptions& opts) {
  SocL1Problem<Scalar> p{ens.psi(), y, epsilon};
  const auto sol = solve_socl1(p, opts);
  const Eigen::Index n = ens.n();
  RecoveryResult<Scalar> out = from_bpdn(sol, "tps");
  out.x_hat = sol.x.head(n);
  const Vector<Scalar> z2 = sol.x.tail(n);
  out.beta_hat = extract_beta<Scalar>(out.x_hat, z2, ens.r, support_tol(out.x_hat));
  out.l1_trace = {l1_norm(out.x_hat)};
  return out;
}

template <typename Scalar>
RecoveryResult<Scalar> recover_aa_p_bpdn(const SensingEnsemble<Scalar>& ens,
                                         const Vector<Scalar>& y, double epsilon,
                                         const AaOptions& aopts) {
  aopts.validate();
  RecoveryResult<Scalar> out;
  out.strategy = "aa";
  VectorXd beta = VectorXd::Zero(ens.n());
  std::optional<Vector<Scalar>> warm;
  Vector<Scalar> x;
  double prev = 0.0;

  for (int j = 1; j <= aopts.max_outer_iter; ++j) {
    SocL1Problem<Scalar> p{ens.perturbed(beta), y, epsilon};
    const auto sol = solve_socl1(p, aopts.inner, warm);
    out.iterations = j;
    if (j == 1) {
      out.status = sol.status;
      if (sol.status == SolveStatus::infeasible) {
        out.x_hat = Vector<Scalar>::Zero(ens.n());
        out.beta_hat = beta;
        return out;
      }
      x = sol.x;
    } else if (sol.status != SolveStatus::infeasible && l1_norm(sol.x) <= prev) {
      x = sol.x;
    }
    warm = sol.state;
    const double cur = l1_norm(x);
    out.l1_trace.push_back(cur);

    if (ens.r == 0.0) {
      out.converged = true;
      break;
    }
    beta = beta_step(ens, y, x, aopts.inner);
    if (j > 1 && (prev == 0.0 || std::abs(cur - prev) / prev <= aopts.rel_change_tol)) {
      out.converged = true;
      break;
    }
    if (cur == 0.0) {
      out.converged = true;
      break;
    }
    prev = cur;
  }
  out.x_hat = x;
  out.beta_hat = beta;
  return out;
}

RecoveryResult<double> recover_pp_bpdn(const SensingEnsemble<double>& ens, const VectorXd& y,
                                       double epsilon, const SolverOptions& opts) {
  const auto sol = solve_pos_p1(ens, y, epsilon, opts);
  RecoveryResult<double> out;
  out.strategy = "pp";
  out.x_hat = sol.x;
  out.beta_hat = extract_beta<double>(sol.x, sol.p, ens.r, support_tol(sol.x));
  out.l1_trace = {l1_norm(sol.x)};
  out.iterations = 1;
  out.status = sol.status;
  out.converged = sol.status == SolveStatus::optimal;
  return out;
}

RecoveryResult<double> recover_relax_check(const SensingEnsemble<double>& ens,
                                           const VectorXd& y, double epsilon,
                                           const AaOptions& aopts) {
  const auto sol = solve_relaxed(ens, y, epsilon, aopts.inner);
  const double defect = sol.complementarity_defect();
  if (sol.status == SolveStatus::infeasible || defect > 1e-8) {
    auto out = recover_aa_p_bpdn(ens, y, epsilon, aopts);
    out.strategy = "relax";
    out.fell_back = true;
    out.complementarity_defect = defect;
    return out;
  }
  RecoveryResult<double> out;
  out.strategy = "relax";
  out.x_hat = sol.x_plus - sol.x_minus;
  out.beta_hat = extract_beta<double>(out.x_hat, sol.p, ens.r, support_tol(out.x_hat));
  out.l1_trace = {l1_norm(out.x_hat)};
  out.iterations = 1;
  out.status = sol.status;
  out.converged = sol.status == SolveStatus::optimal;
  out.complementarity_defect = defect;
  return out;
}

template <typename Scalar>
Effectiveness effectiveness_check(const RecoveryResult<Scalar>& result,
                                  const SensingEnsemble<Scalar>& ens, const Vector<Scalar>& y,
                                  double epsilon, const Vector<Scalar>& x_o) {
  Effectiveness e;
  const double res = (y - ens.perturbed(result.beta_hat) * result.x_hat).norm();
  e.feasibility_slack = epsilon - res;
  e.l1_gap = l1_norm(result.x_hat) - l1_norm(x_o);
  e.effective = res <= epsilon * (1.0 + 1e-6) + 1e-9 && e.l1_gap <= 1e-9;
  return e;
}

#define SPCS_INSTANTIATE_RECOVERY(S)                                                         \
  template VectorXd extract_beta<S>(const Vector<S>&, const Vector<S>&, double, double);     \
  template RecoveryResult<S> recover_oracle_bpdn<S>(const SensingEnsemble<S>&,               \
                                                    const VectorXd&, const Vector<S>&,       \
                                                    double, const SolverOptions&);           \
  template RecoveryResult<S> recover_nominal_bpdn<S>(const SensingEnsemble<S>&,              \
                                                     const Vector<S>&, double, double,       \
                                                     const SolverOptions&);                  \
  template RecoveryResult<S> recover_tps_bpdn<S>(const SensingEnsemble<S>&, const Vector<S>&, \
                                                 double, const SolverOptions&);              \
  template RecoveryResult<S> recover_aa_p_bpdn<S>(const SensingEnsemble<S>&, const Vector<S>&, \
                                                  double, const AaOptions&);                 \
  template Effectiveness effectiveness_check<S>(const RecoveryResult<S>&,                    \
                                                const SensingEnsemble<S>&, const Vector<S>&, \
                                                double, const Vector<S>&);

SPCS_INSTANTIATE_RECOVERY(double)
SPCS_INSTANTIATE_RECOVERY(cplx)

#undef SPCS_INSTANTIATE_RECOVERY

}  // namespace spcs
