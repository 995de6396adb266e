#ifndef SPCS_DOA_HPP_
#define SPCS_DOA_HPP_

#include <cstdint>
#include <vector>

#include "spcs/recovery.hpp"
#include "spcs/types.hpp"

namespace spcs {

/// Uniform grid theta_l = (2l - 1)/n - 1, l = 1..n, in the cosine domain.
struct DoaGrid {
  int n = 0;
  VectorXd points;

  static DoaGrid uniform(int n);
  /// Index of the closest grid point.
  Eigen::Index nearest(double theta) const;
};

struct DoaScene {
  VectorXd theta;
  VectorXc s;

  int k() const { return static_cast<int>(theta.size()); }
};

/// A holds steering vectors at the grid points; B holds their derivatives
/// scaled by 1/kappa, so both have unit-norm columns and beta = kappa (theta - grid).
struct DoaModel {
  SensingEnsemble<cplx> ens;
  double kappa = 0.0;
  double r = 0.0;
  double eps_model = 0.0;
  DoaGrid grid;
  int m = 0;
  int k = 1;
};

struct DoaEstimate {
  /// Sorted ascending.
  VectorXd theta_hat;
  std::vector<Eigen::Index> support;
  RecoveryResult<cplx> recovery;
};

/// a_l(theta) = exp(i pi (l - (m+1)/2) theta) / sqrt(m).
VectorXc steering_vector(int m, double theta);

/// d a / d theta.
VectorXc steering_derivative(int m, double theta);

/// (pi/2) sqrt((m^2 - 1)/3), the norm of every derivative column.
double array_kappa(int m);

/// Builds the grid model for k sources of total amplitude norm s_norm; the
/// model-error bound epsilon is evaluated for that (k, s_norm).
DoaModel build_grid_model(int m, int n, int k = 1, double s_norm = 1.0);

/// Per-source bound on ||a(theta) - a(grid) - a'(grid)(theta - grid)|| for
/// |theta - grid| <= 1/n: pi^2/(8 n^2) sqrt((3m^4 - 10m^2 + 7)/15).
double taylor_remainder_bound(int m, int n);

/// sqrt(k) s_norm times the per-source bound.
double model_error_bound(int m, int n, int k, double s_norm);

/// y = sum_j a(theta_j) s_j.
VectorXc simulate_scene(const DoaScene& scene, int m);

/// Runs the complex alternating solver with epsilon = model.eps_model, keeps
/// the model.k largest |x_j| and maps them to grid + beta / kappa.
DoaEstimate estimate_doa(const VectorXc& y, const DoaModel& model, const AaOptions& aopts = {});

/// On-grid estimation with plain BPDN over a grid of n_std points (no
/// perturbation model); returns |x| over the grid.
VectorXd standard_cs_spectrum(const VectorXc& y, int m, int n_std, double epsilon,
                              const SolverOptions& opts = {});

/// 1/(3 n^2), the mean squared error of nearest-grid rounding.
double mse_lower_bound(int n);

/// Two unit-amplitude random-phase sources with theta_1 ~ U[2/n, 4/n] and
/// theta_2 ~ U[12/n, 14/n].
DoaScene protocol_scene(int n, std::uint64_t seed);

}  // namespace spcs

#endif  // SPCS_DOA_HPP_
