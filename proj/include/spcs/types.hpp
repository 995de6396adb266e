#ifndef SPCS_TYPES_HPP_
#define SPCS_TYPES_HPP_

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace spcs {

// Dense types are templated on the scalar so every routine works over the
// reals and the complex numbers alike.
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using RealOf = typename Eigen::NumTraits<Scalar>::Real;

using cplx = std::complex<double>;

using VectorXd = Vector<double>;
using MatrixXd = Matrix<double>;
using VectorXc = Vector<cplx>;
using MatrixXc = Matrix<cplx>;

template <typename Scalar>
inline constexpr bool is_complex_v = Eigen::NumTraits<Scalar>::IsComplex;

/// Thrown on malformed inputs (bad dimensions, negative radii, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidArgument(message);
}

/// Sum of moduli.
template <typename Derived>
double l1_norm(const Eigen::MatrixBase<Derived>& v) {
  return v.cwiseAbs().sum();
}

/// Known pair (A, B) and perturbation radius r of the model
/// Phi = A + B diag(beta), beta in [-r, r]^n.
template <typename Scalar>
struct SensingEnsemble {
  Matrix<Scalar> A;
  Matrix<Scalar> B;
  double r = 0.0;

  Eigen::Index m() const { return A.rows(); }
  Eigen::Index n() const { return A.cols(); }

  /// Column-wise concatenation [A, B].
  Matrix<Scalar> psi() const {
    Matrix<Scalar> out(A.rows(), 2 * A.cols());
    out << A, B;
    return out;
  }

  /// A + B diag(beta).
  Matrix<Scalar> perturbed(const VectorXd& beta) const {
    require(beta.size() == n(), "perturbed: beta length must equal n");
    return A + B * beta.cast<Scalar>().asDiagonal();
  }

  /// Throws InvalidArgument unless shapes agree, r >= 0 and every column has
  /// unit norm within tol.
  void validate(double tol = 1e-12) const {
    require(A.rows() > 0 && A.cols() > 0, "ensemble: empty matrix");
    require(A.rows() == B.rows() && A.cols() == B.cols(),
            "ensemble: A and B must have identical shape");
    require(r >= 0.0, "ensemble: r must be nonnegative");
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      require(std::abs(A.col(j).norm() - 1.0) <= tol &&
                  std::abs(B.col(j).norm() - 1.0) <= tol,
              "ensemble: columns must have unit norm");
    }
  }
};

/// What every recovery is scored against.
template <typename Scalar>
struct GroundTruth {
  Vector<Scalar> x_o;
  VectorXd beta_o;
  Vector<Scalar> e;
  double epsilon = 0.0;
  int k = 0;
  bool sparse = true;

  void validate(double r) const {
    require(beta_o.size() == x_o.size(), "ground truth: beta length mismatch");
    require(beta_o.size() == 0 || beta_o.cwiseAbs().maxCoeff() <= r,
            "ground truth: beta outside [-r, r]");
    require(epsilon >= 0.0, "ground truth: epsilon must be nonnegative");
    require(e.norm() <= epsilon + 1e-12, "ground truth: noise exceeds epsilon");
    if (sparse) {
      require((x_o.array() != Scalar(0)).count() <= k,
              "ground truth: signal has more than k nonzeros");
    }
  }
};

template <typename Scalar>
struct MeasurementSet {
  Vector<Scalar> y;
  double epsilon = 0.0;
};

}  // namespace spcs

#endif  // SPCS_TYPES_HPP_
