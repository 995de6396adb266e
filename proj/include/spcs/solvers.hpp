#ifndef SPCS_SOLVERS_HPP_
#define SPCS_SOLVERS_HPP_

#include <optional>
#include <string_view>

#include "spcs/types.hpp"

namespace spcs {

struct SolverOptions {
  double abs_tol = 1e-8;
  double rel_tol = 1e-8;
  int max_iter = 20000;

  void validate() const {
    require(abs_tol > 0.0 && rel_tol > 0.0, "solver options: tolerances must be positive");
    require(max_iter > 0, "solver options: max_iter must be positive");
  }
};

enum class SolveStatus { optimal, max_iter, infeasible };

std::string_view to_string(SolveStatus status);

/// min ||x||_1  s.t.  ||y - M x||_2 <= epsilon.
template <typename Scalar>
struct SocL1Problem {
  Matrix<Scalar> M;
  Vector<Scalar> y;
  double epsilon = 0.0;
};

/// min over beta in [-r, r]^n of ||c - G beta||_2 (beta is always real).
template <typename Scalar>
struct BoxLsProblem {
  Matrix<Scalar> G;
  Vector<Scalar> c;
  double r = 0.0;
};

template <typename Scalar>
struct SolverResult {
  Vector<Scalar> x;
  SolveStatus status = SolveStatus::max_iter;
  double objective = 0.0;
  double residual_norm = 0.0;
  /// Primal objective minus the best certified dual lower bound.
  double gap = 0.0;
  int iterations = 0;
  /// Splitting state; pass back as warm_start to resume a nearby problem.
  Vector<Scalar> state;
};

template <typename Scalar>
SolverResult<Scalar> solve_socl1(const SocL1Problem<Scalar>& p, const SolverOptions& opts = {},
                                 const std::optional<Vector<Scalar>>& warm_start = std::nullopt);

/// Active-set box-constrained least squares; returns beta in [-r, r]^n.
/// Coordinates whose column of G is identically zero are returned as 0.
template <typename Scalar>
VectorXd solve_box_ls(const BoxLsProblem<Scalar>& p, const SolverOptions& opts = {});

/// ||beta - clamp(beta - grad)||_inf for the box least-squares objective
/// 0.5 ||c - G beta||^2; zero exactly at a minimiser.
template <typename Scalar>
double box_ls_optimality_residual(const BoxLsProblem<Scalar>& p, const VectorXd& beta);

struct PosP1Result {
  VectorXd x;
  VectorXd p;
  SolveStatus status = SolveStatus::max_iter;
  double objective = 0.0;
  double residual_norm = 0.0;
  double gap = 0.0;
  int iterations = 0;
};

/// min 1'x  s.t.  ||y - [A, B][x; p]|| <= epsilon,  x >= 0,  r x >= p >= -r x.
PosP1Result solve_pos_p1(const SensingEnsemble<double>& ens, const VectorXd& y, double epsilon,
                         const SolverOptions& opts = {});

struct RelaxedResult {
  VectorXd x_plus;
  VectorXd x_minus;
  VectorXd p;
  SolveStatus status = SolveStatus::max_iter;
  double objective = 0.0;
  double residual_norm = 0.0;
  double gap = 0.0;
  int iterations = 0;

  /// max_j min(x+_j, x-_j).
  double complementarity_defect() const;
};

/// min 1'(x+ + x-)  s.t.  ||y - [A, -A, B][x+; x-; p]|| <= epsilon,
/// x+, x- >= 0,  r (x+ + x-) >= p >= -r (x+ + x-).
RelaxedResult solve_relaxed(const SensingEnsemble<double>& ens, const VectorXd& y,
                            double epsilon, const SolverOptions& opts = {});

}  // namespace spcs

#endif  // SPCS_SOLVERS_HPP_
