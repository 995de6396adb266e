#ifndef SPCS_MODEL_HPP_
#define SPCS_MODEL_HPP_

#include <algorithm>
#include <cstdint>
#include <variant>
#include <vector>

#include "spcs/types.hpp"

namespace spcs {

/// Power-law magnitudes c_q * j^(-q), j = 1..n.
struct CompressibleSpec {
  int n = 0;
  double q = 1.5;
  double c_q = 2.8843;

  void validate() const {
    require(n > 0, "compressible: n must be positive");
    require(q > 1.0, "compressible: q must exceed 1");
    require(c_q > 0.0, "compressible: c_q must be positive");
  }

  /// The unpermuted, nonnegative, sorted template.
  VectorXd template_magnitudes() const;
};

struct UnitSpikes {};
struct PositiveSpikes {};
using SignalKind = std::variant<UnitSpikes, PositiveSpikes, CompressibleSpec>;

/// Gaussian A and B, each column mean-centred (skipped when m == 1) and
/// scaled to unit norm.
SensingEnsemble<double> gen_gaussian_ensemble(int m, int n, double r,
                                              std::uint64_t seed);

/// Unit spikes: k entries of +-1 on a uniformly random support. Positive
/// spikes: k entries of +1. Compressible: the power-law template randomly
/// permuted and sign-flipped (k is ignored).
VectorXd gen_signal(int n, int k, const SignalKind& kind, std::uint64_t seed);

/// i.i.d. uniform on [-r, r].
VectorXd gen_perturbation(int n, double r, std::uint64_t seed);

/// Standard normal draw rescaled to norm epsilon.
VectorXd gen_noise(int m, double epsilon, std::uint64_t seed);

/// y = (A + B diag(beta_o)) x_o + e.
template <typename Scalar>
MeasurementSet<Scalar> measure(const SensingEnsemble<Scalar>& ens,
                               const GroundTruth<Scalar>& gt) {
  require(gt.x_o.size() == ens.n() && gt.beta_o.size() == ens.n(),
          "measure: signal/perturbation length must equal n");
  require(gt.e.size() == ens.m(), "measure: noise length must equal m");
  require(ens.A.rows() == ens.B.rows() && ens.A.cols() == ens.B.cols(),
          "measure: A and B shape mismatch");
  MeasurementSet<Scalar> out;
  const Vector<Scalar> px = gt.beta_o.template cast<Scalar>().cwiseProduct(gt.x_o);
  out.y = ens.A * gt.x_o + ens.B * px + gt.e;
  out.epsilon = gt.epsilon;
  return out;
}

/// Keeps the k largest-modulus entries; ties go to the lowest index.
template <typename Scalar>
Vector<Scalar> best_k_term(const Vector<Scalar>& x, int k) {
  require(k >= 0 && k <= x.size(), "best_k_term: k out of range");
  std::vector<Eigen::Index> order(static_cast<std::size_t>(x.size()));
  for (Eigen::Index i = 0; i < x.size(); ++i) order[static_cast<std::size_t>(i)] = i;
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::abs(x(a)) > std::abs(x(b));
  });
  Vector<Scalar> out = Vector<Scalar>::Zero(x.size());
  for (int i = 0; i < k; ++i) {
    const Eigen::Index j = order[static_cast<std::size_t>(i)];
    out(j) = x(j);
  }
  return out;
}

/// Draws the full ground truth of one trial from a single seed:
/// ensemble, signal, perturbation and noise use independent sub-streams.
struct Instance {
  SensingEnsemble<double> ensemble;
  GroundTruth<double> truth;
  MeasurementSet<double> data;
};

Instance gen_instance(int m, int n, int k, double r, double epsilon,
                      const SignalKind& kind, std::uint64_t seed);

}  // namespace spcs

#endif  // SPCS_MODEL_HPP_
