#include "spcs/solvers.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

namespace spcs {

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::max_iter: return "max-iter";
    case SolveStatus::infeasible: return "infeasible";
  }
  return "unknown";
}

namespace {

// ---------------------------------------------------------------------------
// Exact Euclidean projection onto {z : ||y - M z||_2 <= eps} through a thin
// SVD of M. Only the row-space component of z moves; the multiplier solves a
// one-dimensional secular equation.
template <typename S>
class ResidualBall {
 public:
  ResidualBall(const Matrix<S>& M, const Vector<S>& y, double eps) : y_(y), eps_(eps) {
    Eigen::BDCSVD<Matrix<S>> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const VectorXd& sv = svd.singularValues();
    const double smax = sv.size() ? sv(0) : 0.0;
    const double cut = smax * 1e-11 * static_cast<double>(std::max(M.rows(), M.cols()));
    Eigen::Index rank = 0;
    while (rank < sv.size() && sv(rank) > cut && sv(rank) > 0.0) ++rank;
    sigma_ = sv.head(rank);
    U_ = svd.matrixU().leftCols(rank);
    V_ = svd.matrixV().leftCols(rank);
    Uy_ = U_.adjoint() * y;
    y_perp_ = y - U_ * Uy_;
    perp_ = y_perp_.norm();
  }

  /// dist(y, range(M)).
  double range_distance() const { return perp_; }
  double epsilon() const { return eps_; }

  /// Projects v; remembers the multiplier data of the last call so that the
  /// associated dual vector can be formed on demand.
  void project(const Vector<S>& v, Vector<S>& z) {
    const Vector<S> c = V_.adjoint() * v;
    b_ = Uy_ - sigma_.template cast<S>().cwiseProduct(c);
    const double total2 = b_.squaredNorm() + perp_ * perp_;
    if (total2 <= eps_ * eps_) {
      z = v;
      mode_ = Mode::inside;
      return;
    }
    const double tau = eps_ * eps_ - perp_ * perp_;
    const double b2 = b_.squaredNorm();
    Vector<S> delta(b_.size());
    if (eps_ == 0.0 || tau <= 1e-28 * std::max(1.0, b2)) {
      mode_ = Mode::affine;
      delta = b_.cwiseQuotient(sigma_.template cast<S>());
    } else {
      mode_ = Mode::ball;
      lambda_ = secular_root(tau);
      const VectorXd s2 = sigma_.array().square();
      rho_ = b_.cwiseQuotient((1.0 + lambda_ * s2.array()).matrix().template cast<S>());
      delta = (lambda_ * sigma_).template cast<S>().cwiseProduct(rho_);
    }
    z = v + V_ * delta;
  }

  /// Dual vector omega with M^H omega = (z - v) for the last projection, so
  /// that (z - v)/t = M^H (omega/t) estimates a subgradient of the objective.
  Vector<S> last_dual() const {
    switch (mode_) {
      case Mode::inside: return Vector<S>::Zero(y_.size());
      case Mode::affine: {
        const VectorXd s2 = sigma_.array().square();
        return U_ * b_.cwiseQuotient(s2.template cast<S>());
      }
      case Mode::ball: return lambda_ * (U_ * rho_ + y_perp_);
    }
    return Vector<S>::Zero(y_.size());
  }

 private:
  enum class Mode { inside, affine, ball };

  // Root of sum |b_i|^2/(1 + lambda s_i^2)^2 = tau. Newton on the reciprocal
  // norm, which is concave and increasing, converges monotonically from 0.
  double secular_root(double tau) const {
    const VectorXd w = b_.cwiseAbs2();
    const VectorXd s2 = sigma_.array().square();
    const double target = 1.0 / std::sqrt(tau);
    double lambda = 0.0;
    for (int it = 0; it < 200; ++it) {
      const Eigen::ArrayXd den = 1.0 + lambda * s2.array();
      const double phi = (w.array() / den.square()).sum();
      const double dphi = -2.0 * (w.array() * s2.array() / den.cube()).sum();
      const double psi = 1.0 / std::sqrt(phi) - target;
      const double dpsi = -0.5 * dphi / (phi * std::sqrt(phi));
      if (!(dpsi > 0.0)) break;
      const double step = -psi / dpsi;
      lambda += step;
      if (std::abs(step) <= 1e-15 * std::max(1.0, lambda)) break;
    }
    return std::max(lambda, 0.0);
  }

  Matrix<S> U_, V_;
  VectorXd sigma_;
  Vector<S> y_, Uy_, y_perp_;
  double perp_ = 0.0;
  double eps_ = 0.0;

  Mode mode_ = Mode::inside;
  double lambda_ = 0.0;
  Vector<S> b_, rho_;
};

// Affine parametrisation z = T zeta of a face of the objective's cone.
struct Face {
  MatrixXd T;
  VectorXd cost;
  std::vector<bool> nonneg;

  void add(Eigen::Index d, std::initializer_list<std::pair<Eigen::Index, double>> entries,
           double c, bool positive) {
    T.conservativeResize(d, T.cols() + 1);
    T.col(T.cols() - 1).setZero();
    for (const auto& [row, val] : entries) T(row, T.cols() - 1) = val;
    cost.conservativeResize(cost.size() + 1);
    cost(cost.size() - 1) = c;
    nonneg.push_back(positive);
  }
};

// ---------------------------------------------------------------------------
// Objective terms. Each provides its proximal map, its value, and the dual
// feasibility measure h(g) such that g is dual-feasible iff h(g) <= 1.

template <typename S>
struct L1Term {
  Vector<S> prox(const Vector<S>& v, double t) const {
    Vector<S> out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      const double a = std::abs(v(i));
      out(i) = a > t ? v(i) * ((a - t) / a) : S(0);
    }
    return out;
  }
  double value(const Vector<S>& z) const { return l1_norm(z); }
  double dual_excess(const Vector<S>& g) const { return g.size() ? g.cwiseAbs().maxCoeff() : 0.0; }
  Vector<S> to_feasible(const Vector<S>& z) const { return z; }

  // Sign pattern of the support; complex phases have no finite face structure.
  std::optional<Face> face(const Vector<S>& z, double tol) const {
    if constexpr (is_complex_v<S>) {
      return std::nullopt;
    } else {
      const double zmax = z.size() ? z.cwiseAbs().maxCoeff() : 0.0;
      if (zmax == 0.0) return std::nullopt;
      Face f;
      f.T.resize(z.size(), 0);
      for (Eigen::Index j = 0; j < z.size(); ++j)
        if (std::abs(z(j)) > tol * zmax) f.add(z.size(), {{j, z(j) > 0 ? 1.0 : -1.0}}, 1.0, true);
      return f;
    }
  }
};

// Per-coordinate 2-D cone {(x, p) : |p| <= r x} with objective sum(x);
// variables are stored as [x; p].
struct PositiveConeTerm {
  Eigen::Index n;
  double r;

  static void project2(double& a, double& b, double r) {
    if (std::abs(b) <= r * a) return;
    if (a + r * std::abs(b) <= 0.0) {
      a = 0.0;
      b = 0.0;
      return;
    }
    const double s = b < 0.0 ? -1.0 : 1.0;
    const double t = (a + r * s * b) / (1.0 + r * r);
    a = t;
    b = s * r * t;
  }

  VectorXd prox(const VectorXd& v, double t) const {
    VectorXd out = v;
    for (Eigen::Index j = 0; j < n; ++j) {
      double a = v(j) - t;
      double b = v(n + j);
      project2(a, b, r);
      out(j) = a;
      out(n + j) = b;
    }
    return out;
  }
  VectorXd to_feasible(const VectorXd& z) const { return prox(z, 0.0); }
  double value(const VectorXd& z) const { return z.head(n).sum(); }
  double dual_excess(const VectorXd& g) const {
    double h = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) h = std::max(h, g(j) + r * std::abs(g(n + j)));
    return h;
  }

  std::optional<Face> face(const VectorXd& z, double tol) const {
    const double xmax = z.head(n).maxCoeff();
    if (!(xmax > 0.0)) return std::nullopt;
    Face f;
    const Eigen::Index d = 2 * n;
    f.T.resize(d, 0);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double x = z(j), p = z(n + j);
      if (x <= tol * xmax) continue;
      if (std::abs(p) >= r * x * (1.0 - 10.0 * tol)) {
        const double s = p < 0.0 ? -1.0 : 1.0;
        f.add(d, {{j, 1.0}, {n + j, s * r}}, 1.0, true);
      } else {
        f.add(d, {{j, 1.0}}, 1.0, true);
        f.add(d, {{n + j, 1.0}}, 0.0, false);
      }
    }
    return f;
  }
};

// Per-coordinate 3-D cone {(a, b, p) : a, b >= 0, |p| <= r (a + b)} with
// objective sum(a + b); variables are stored as [x+; x-; p].
struct SplitConeTerm {
  Eigen::Index n;
  double r;

  // Projection onto cone{(1,0,r), (1,0,-r), (0,1,r), (0,1,-r)}: the nearest
  // point among the nonnegative least-squares fits on every generator subset.
  static void project3(std::array<double, 3>& v, double r) {
    const double a = v[0], b = v[1], p = v[2];
    if (a >= 0.0 && b >= 0.0 && std::abs(p) <= r * (a + b)) return;
    const std::array<Eigen::Vector3d, 4> gen = {
        Eigen::Vector3d(1, 0, r), Eigen::Vector3d(1, 0, -r), Eigen::Vector3d(0, 1, r),
        Eigen::Vector3d(0, 1, -r)};
    const Eigen::Vector3d target(a, b, p);
    Eigen::Vector3d best = Eigen::Vector3d::Zero();
    double best_d = target.squaredNorm();
    for (int mask = 1; mask < 16; ++mask) {
      const int cnt = __builtin_popcount(static_cast<unsigned>(mask));
      if (cnt > 3) continue;
      Eigen::Matrix<double, 3, Eigen::Dynamic> Gs(3, cnt);
      int c = 0;
      for (int i = 0; i < 4; ++i)
        if (mask & (1 << i)) Gs.col(c++) = gen[static_cast<std::size_t>(i)];
      const Eigen::MatrixXd H = Gs.transpose() * Gs;
      Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
      if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) continue;
      const Eigen::VectorXd coef = ldlt.solve(Gs.transpose() * target);
      if ((coef.array() < 0.0).any()) continue;
      const Eigen::Vector3d cand = Gs * coef;
      if ((H * coef - Gs.transpose() * target).norm() > 1e-9 * (1.0 + target.norm())) continue;
      const double d = (cand - target).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = cand;
      }
    }
    v = {std::max(best(0), 0.0), std::max(best(1), 0.0), best(2)};
    const double cap = r * (v[0] + v[1]);
    v[2] = std::clamp(v[2], -cap, cap);
  }

  VectorXd prox(const VectorXd& v, double t) const {
    VectorXd out = v;
    for (Eigen::Index j = 0; j < n; ++j) {
      std::array<double, 3> q = {v(j) - t, v(n + j) - t, v(2 * n + j)};
      project3(q, r);
      out(j) = q[0];
      out(n + j) = q[1];
      out(2 * n + j) = q[2];
    }
    return out;
  }
  VectorXd to_feasible(const VectorXd& z) const { return prox(z, 0.0); }
  double value(const VectorXd& z) const { return z.head(2 * n).sum(); }
  double dual_excess(const VectorXd& g) const {
    double h = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double q = r * std::abs(g(2 * n + j));
      h = std::max({h, g(j) + q, g(n + j) + q});
    }
    return h;
  }

  std::optional<Face> face(const VectorXd& z, double tol) const {
    const double zmax = z.head(2 * n).maxCoeff();
    if (!(zmax > 0.0)) return std::nullopt;
    Face f;
    const Eigen::Index d = 3 * n;
    f.T.resize(d, 0);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double a = z(j), b = z(n + j), p = z(2 * n + j);
      const bool act_a = a > tol * zmax, act_b = b > tol * zmax;
      if (!act_a && !act_b) continue;
      if (std::abs(p) >= r * (a + b) * (1.0 - 10.0 * tol)) {
        const double s = p < 0.0 ? -1.0 : 1.0;
        if (act_a) f.add(d, {{j, 1.0}, {2 * n + j, s * r}}, 1.0, true);
        if (act_b) f.add(d, {{n + j, 1.0}, {2 * n + j, s * r}}, 1.0, true);
      } else {
        if (act_a) f.add(d, {{j, 1.0}}, 1.0, true);
        if (act_b) f.add(d, {{n + j, 1.0}}, 1.0, true);
        f.add(d, {{2 * n + j, 1.0}}, 0.0, false);
      }
    }
    return f;
  }
};

template <typename S>
double real_inner(const Vector<S>& a, const Vector<S>& b) {
  return std::real(a.dot(b));
}

// Lower bound on the optimal value from any dual vector omega, after scaling
// it into the dual-feasible set.
template <typename S, typename Term>
double dual_bound(const Term& term, const Matrix<S>& M, const Vector<S>& y, double eps,
                  const Vector<S>& omega) {
  const Vector<S> g = M.adjoint() * omega;
  const double h = term.dual_excess(g);
  const double theta = 1.0 / std::max(1.0, h);
  return theta * (real_inner(omega, y) - eps * omega.norm());
}

template <typename S>
double residual(const Matrix<S>& M, const Vector<S>& y, const Vector<S>& z) {
  return (y - M * z).norm();
}

template <typename S>
bool ball_ok(double res, double eps, const SolverOptions& o) {
  return res <= eps * (1.0 + o.rel_tol) + o.abs_tol;
}

template <typename S>
struct Candidate {
  Vector<S> z;
  double objective = std::numeric_limits<double>::infinity();
  double res = 0.0;
  bool polished = false;
};

// Polishing: on the face of the feasible cone identified by the current
// iterate, z = T zeta with zeta >= 0 where flagged, the objective is linear,
// cost' zeta. Minimising it over the residual ball restricted to the face has
// the closed form zeta = G^{-1}((MT)' y - mu cost) with mu set by
// ||y - MT zeta|| = eps (or plain least squares when eps = 0).
struct PolishResult {
  Candidate<double> cand;
  VectorXd omega;
  std::optional<VectorXd> omega_alt;
};

template <typename Term>
std::optional<PolishResult> polish_face(const Term& term, const Face& face, const MatrixXd& M,
                                        const VectorXd& y, double eps, const SolverOptions& o,
                                        const VectorXd& omega_hint) {
  const Eigen::Index q = face.T.cols();
  if (q == 0 || q > M.rows()) return std::nullopt;
  const MatrixXd MT = M * face.T;
  const MatrixXd G = MT.transpose() * MT;
  Eigen::LDLT<MatrixXd> ldlt(G);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) return std::nullopt;
  if (ldlt.vectorD().minCoeff() <= 1e-12 * ldlt.vectorD().maxCoeff()) return std::nullopt;
  const VectorXd zeta_ls = ldlt.solve(MT.transpose() * y);
  const VectorXd Gc = ldlt.solve(face.cost);
  const VectorXd r0 = y - MT * zeta_ls;
  VectorXd zeta;
  PolishResult out;
  if (eps == 0.0) {
    if (r0.norm() > o.abs_tol) return std::nullopt;
    zeta = zeta_ls;
    // The face fixes the dual only up to the null space of (MT)'; the running
    // dual projected onto {omega : (MT)' omega = cost} usually certifies
    // better than the minimum-norm choice.
    out.omega = MT * Gc;
    out.omega_alt = omega_hint + MT * ldlt.solve(face.cost - MT.transpose() * omega_hint);
  } else {
    const double slack = eps * eps - r0.squaredNorm();
    const double cgc = face.cost.dot(Gc);
    if (slack < 0.0 || cgc <= 0.0) return std::nullopt;
    const double mu = std::sqrt(slack / cgc);
    zeta = zeta_ls - mu * Gc;
    out.omega = (r0 + mu * (MT * Gc)) / mu;
  }
  for (Eigen::Index i = 0; i < q; ++i)
    if (face.nonneg[static_cast<std::size_t>(i)] && zeta(i) < 0.0) return std::nullopt;
  const VectorXd z = face.T * zeta;
  const VectorXd feas = term.to_feasible(z);
  if ((feas - z).norm() > 1e-12 * (1.0 + z.norm())) return std::nullopt;
  out.cand.z = feas;
  out.cand.res = residual<double>(M, y, feas);
  if (!ball_ok<double>(out.cand.res, eps, o)) return std::nullopt;
  out.cand.objective = term.value(feas);
  out.cand.polished = true;
  return out;
}

template <typename S>
struct EngineResult {
  Vector<S> z;
  SolveStatus status = SolveStatus::max_iter;
  double objective = 0.0;
  double res = 0.0;
  double gap = 0.0;
  int iterations = 0;
  Vector<S> state;
};

// Douglas-Rachford splitting between the residual ball and the objective
// term, with residual balancing of the step and periodic support polishing.
template <typename S, typename Term>
EngineResult<S> split_solve(const Term& term, const Matrix<S>& M, const Vector<S>& y, double eps,
                            const SolverOptions& o, bool ball_feasible_output,
                            const std::optional<Vector<S>>& warm) {
  o.validate();
  require(eps >= 0.0, "solver: epsilon must be nonnegative");
  require(M.rows() == y.size(), "solver: matrix rows must equal measurement length");
  const Eigen::Index d = M.cols();
  EngineResult<S> out;

  if (y.norm() <= eps) {
    out.z = Vector<S>::Zero(d);
    out.status = SolveStatus::optimal;
    out.res = y.norm();
    out.state = out.z;
    return out;
  }

  ResidualBall<S> ball(M, y, eps);
  if (ball.range_distance() > eps + 10.0 * o.abs_tol) {
    out.z = M.completeOrthogonalDecomposition().solve(y);
    out.status = SolveStatus::infeasible;
    out.res = ball.range_distance();
    out.objective = term.value(term.to_feasible(out.z));
    out.state = out.z;
    return out;
  }

  // Step scale from the magnitude of the back-projected data.
  const double scale = std::max((M.adjoint() * y).cwiseAbs().maxCoeff(), 1e-12);
  double t = 0.1 * scale;

  Vector<S> v = warm && warm->size() == d ? *warm : Vector<S>(Vector<S>::Zero(d));
  Vector<S> x(d), w(d), w_prev = Vector<S>::Zero(d);

  Candidate<S> best;
  double best_dual = -std::numeric_limits<double>::infinity();
  const int check_every = 10;

  auto certified = [&](double primal, double dual) {
    return primal - dual <= o.abs_tol + o.rel_tol * std::abs(primal);
  };

  // A polished point sits exactly on the identified face, so it wins ties
  // within the certification tolerance.
  auto consider = [&](Candidate<S>&& c) {
    bool better = c.objective < best.objective;
    if (std::isfinite(best.objective) && c.polished != best.polished) {
      const double slack = o.abs_tol + o.rel_tol * std::abs(best.objective);
      better = c.polished ? c.objective <= best.objective + slack
                          : c.objective < best.objective - slack;
    }
    if (better) best = std::move(c);
  };

  int it = 0;
  for (it = 1; it <= o.max_iter; ++it) {
    ball.project(v, x);
    const Vector<S> ref = S(2) * x - v;
    w = term.prox(ref, t);
    v += w - x;

    if (it % check_every != 0 && it != o.max_iter) {
      w_prev = w;
      continue;
    }

    const double primal_res = (x - w).norm();
    const double dual_res = (w - w_prev).norm();
    w_prev = w;

    const Vector<S> omega = ball.last_dual() / t;
    best_dual = std::max(best_dual, dual_bound<S>(term, M, y, eps, omega));

    Candidate<S> cand;
    cand.z = ball_feasible_output ? x : term.to_feasible(w);
    cand.res = residual(M, y, cand.z);
    if (ball_ok<S>(cand.res, eps, o)) {
      cand.objective = term.value(cand.z);
      consider(std::move(cand));
    }

    const double xs = std::max({x.norm(), w.norm(), 1e-300});
    if (primal_res <= 1e-3 * xs && it % (5 * check_every) == 0) {
      if constexpr (std::is_same_v<S, double>) {
        // Slow solves also try coarse thresholds, which can cut a drifting
        // iterate down to the optimal support.
        const bool coarse = it % (50 * check_every) == 0;
        Eigen::Index last_q = -1;
        for (const double tol : {1e-7, 1e-4, 1e-2, 0.1, 0.3, 0.5}) {
          if (tol > 1e-4 && !coarse) break;
          const auto face = term.face(w, tol);
          if (!face) break;
          if (face->T.cols() == last_q) continue;
          last_q = face->T.cols();
          if (auto pol = polish_face(term, *face, M, y, eps, o, omega)) {
            best_dual = std::max(best_dual, dual_bound<S>(term, M, y, eps, pol->omega));
            if (pol->omega_alt)
              best_dual = std::max(best_dual, dual_bound<S>(term, M, y, eps, *pol->omega_alt));
            consider(std::move(pol->cand));
            if (certified(best.objective, best_dual)) break;
            if (!coarse) break;
          }
        }
      }
    }

    if (best.objective < std::numeric_limits<double>::infinity() &&
        certified(best.objective, best_dual)) {
      out.status = SolveStatus::optimal;
      break;
    }

    // Residual balancing: rescale the step, keeping the dual estimate fixed.
    if (it % (10 * check_every) == 0 && dual_res > 0.0) {
      const double ratio = primal_res / dual_res;
      double factor = 1.0;
      if (ratio > 10.0) factor = 0.5;
      if (ratio < 0.1) factor = 2.0;
      if (factor != 1.0) {
        const double t_new = t * factor;
        v = x + (v - x) * (t_new / t);
        t = t_new;
      }
    }
  }

  out.iterations = std::min(it, o.max_iter);
  if (best.objective == std::numeric_limits<double>::infinity()) {
    best.z = ball_feasible_output ? x : term.to_feasible(w);
    best.res = residual(M, y, best.z);
    best.objective = term.value(best.z);
  }
  out.z = std::move(best.z);
  out.objective = best.objective;
  out.res = best.res;
  out.gap = out.objective - best_dual;
  out.state = v;
  return out;
}

}  // namespace

template <typename Scalar>
SolverResult<Scalar> solve_socl1(const SocL1Problem<Scalar>& p, const SolverOptions& opts,
                                 const std::optional<Vector<Scalar>>& warm_start) {
  L1Term<Scalar> term;
  auto er = split_solve<Scalar>(term, p.M, p.y, p.epsilon, opts, true, warm_start);
  SolverResult<Scalar> res;
  res.x = std::move(er.z);
  res.status = er.status;
  res.objective = er.objective;
  res.residual_norm = er.res;
  res.gap = er.gap;
  res.iterations = er.iterations;
  res.state = std::move(er.state);
  return res;
}

template <typename Scalar>
VectorXd solve_box_ls(const BoxLsProblem<Scalar>& p, const SolverOptions& opts) {
  opts.validate();
  require(p.r >= 0.0, "solve_box_ls: r must be nonnegative");
  require(p.G.rows() == p.c.size(), "solve_box_ls: G rows must equal c length");
  const Eigen::Index n = p.G.cols();
  VectorXd beta = VectorXd::Zero(n);
  if (p.r == 0.0 || n == 0) return beta;

  // Beta is real: stack real and imaginary parts for complex data.
  std::vector<Eigen::Index> active;
  for (Eigen::Index j = 0; j < n; ++j)
    if (p.G.col(j).squaredNorm() > 0.0) active.push_back(j);
  const auto k = static_cast<Eigen::Index>(active.size());
  if (k == 0) return beta;
  MatrixXd G;
  VectorXd c;
  if constexpr (is_complex_v<Scalar>) {
    G.resize(2 * p.G.rows(), k);
    for (Eigen::Index i = 0; i < k; ++i) {
      const auto col = p.G.col(active[static_cast<std::size_t>(i)]);
      G.col(i) << col.real(), col.imag();
    }
    c.resize(2 * p.c.size());
    c << p.c.real(), p.c.imag();
  } else {
    G.resize(p.G.rows(), k);
    for (Eigen::Index i = 0; i < k; ++i) G.col(i) = p.G.col(active[static_cast<std::size_t>(i)]);
    c = p.c;
  }
  const MatrixXd H = G.transpose() * G;
  const VectorXd g = G.transpose() * c;
  const double lo = -p.r, hi = p.r;
  const double tol = opts.abs_tol * std::max(1.0, H.diagonal().maxCoeff() * p.r);

  // Primal active set: 0 = free, -1 = at lower bound, +1 = at upper bound.
  std::vector<int> state(static_cast<std::size_t>(k), 0);
  VectorXd b = VectorXd::Zero(k);
  const int max_iter = std::max<int>(opts.max_iter, 50 * static_cast<int>(k) + 100);
  for (int it = 0; it < max_iter; ++it) {
    std::vector<Eigen::Index> F;
    for (Eigen::Index i = 0; i < k; ++i)
      if (state[static_cast<std::size_t>(i)] == 0) F.push_back(i);
    const auto nf = static_cast<Eigen::Index>(F.size());
    VectorXd target = b;
    if (nf > 0) {
      MatrixXd HFF(nf, nf);
      VectorXd rhs(nf);
      for (Eigen::Index a = 0; a < nf; ++a) {
        rhs(a) = g(F[static_cast<std::size_t>(a)]);
        for (Eigen::Index bb = 0; bb < nf; ++bb)
          HFF(a, bb) = H(F[static_cast<std::size_t>(a)], F[static_cast<std::size_t>(bb)]);
        for (Eigen::Index j = 0; j < k; ++j)
          if (state[static_cast<std::size_t>(j)] != 0) rhs(a) -= H(F[static_cast<std::size_t>(a)], j) * b(j);
      }
      const VectorXd sol = HFF.completeOrthogonalDecomposition().solve(rhs);
      for (Eigen::Index a = 0; a < nf; ++a) target(F[static_cast<std::size_t>(a)]) = sol(a);
    }
    // Step towards the subspace minimiser, stopping at the first bound hit.
    double alpha = 1.0;
    Eigen::Index blocking = -1;
    for (Eigen::Index i : F) {
      const double dlt = target(i) - b(i);
      if (target(i) > hi && dlt > 0.0) {
        const double a = (hi - b(i)) / dlt;
        if (a < alpha) { alpha = a; blocking = i; }
      } else if (target(i) < lo && dlt < 0.0) {
        const double a = (lo - b(i)) / dlt;
        if (a < alpha) { alpha = a; blocking = i; }
      }
    }
    for (Eigen::Index i : F) b(i) += alpha * (target(i) - b(i));
    if (blocking >= 0) {
      const bool upper = target(blocking) > hi;
      b(blocking) = upper ? hi : lo;
      state[static_cast<std::size_t>(blocking)] = upper ? 1 : -1;
      continue;
    }
    for (Eigen::Index i : F) b(i) = std::clamp(b(i), lo, hi);
    // Multipliers of the bound constraints.
    const VectorXd grad = H * b - g;
    Eigen::Index worst = -1;
    double worst_v = tol;
    for (Eigen::Index i = 0; i < k; ++i) {
      const int st = state[static_cast<std::size_t>(i)];
      const double viol = st == -1 ? -grad(i) : (st == 1 ? grad(i) : 0.0);
      if (viol > worst_v) { worst_v = viol; worst = i; }
    }
    if (worst < 0) break;
    state[static_cast<std::size_t>(worst)] = 0;
  }
  for (Eigen::Index i = 0; i < k; ++i)
    beta(active[static_cast<std::size_t>(i)]) = std::clamp(b(i), lo, hi);
  return beta;
}

template <typename Scalar>
double box_ls_optimality_residual(const BoxLsProblem<Scalar>& p, const VectorXd& beta) {
  const Vector<Scalar> res = p.G * beta.cast<Scalar>() - p.c;
  const VectorXd grad = (p.G.adjoint() * res).real();
  const VectorXd stepped = (beta - grad).cwiseMax(-p.r).cwiseMin(p.r);
  return beta.size() ? (beta - stepped).cwiseAbs().maxCoeff() : 0.0;
}

PosP1Result solve_pos_p1(const SensingEnsemble<double>& ens, const VectorXd& y, double epsilon,
                         const SolverOptions& opts) {
  require(y.size() == ens.m(), "solve_pos_p1: y length must equal m");
  PositiveConeTerm term{ens.n(), ens.r};
  const MatrixXd psi = ens.psi();
  auto er = split_solve<double>(term, psi, y, epsilon, opts, false, std::nullopt);
  PosP1Result out;
  out.x = er.z.head(ens.n());
  out.p = er.z.tail(ens.n());
  out.status = er.status;
  out.objective = er.objective;
  out.residual_norm = er.res;
  out.gap = er.gap;
  out.iterations = er.iterations;
  return out;
}

double RelaxedResult::complementarity_defect() const {
  if (x_plus.size() == 0) return 0.0;
  return x_plus.cwiseMin(x_minus).maxCoeff();
}

RelaxedResult solve_relaxed(const SensingEnsemble<double>& ens, const VectorXd& y,
                            double epsilon, const SolverOptions& opts) {
  require(y.size() == ens.m(), "solve_relaxed: y length must equal m");
  const Eigen::Index n = ens.n();
  SplitConeTerm term{n, ens.r};
  MatrixXd M(ens.m(), 3 * n);
  M << ens.A, -ens.A, ens.B;
  auto er = split_solve<double>(term, M, y, epsilon, opts, false, std::nullopt);
  RelaxedResult out;
  out.x_plus = er.z.head(n);
  out.x_minus = er.z.segment(n, n);
  out.p = er.z.tail(n);
  out.status = er.status;
  out.objective = er.objective;
  out.residual_norm = er.res;
  out.gap = er.gap;
  out.iterations = er.iterations;
  return out;
}

template SolverResult<double> solve_socl1<double>(const SocL1Problem<double>&,
                                                  const SolverOptions&,
                                                  const std::optional<VectorXd>&);
template SolverResult<cplx> solve_socl1<cplx>(const SocL1Problem<cplx>&, const SolverOptions&,
                                              const std::optional<VectorXc>&);
template VectorXd solve_box_ls<double>(const BoxLsProblem<double>&, const SolverOptions&);
template VectorXd solve_box_ls<cplx>(const BoxLsProblem<cplx>&, const SolverOptions&);
template double box_ls_optimality_residual<double>(const BoxLsProblem<double>&, const VectorXd&);
template double box_ls_optimality_residual<cplx>(const BoxLsProblem<cplx>&, const VectorXd&);

}  // namespace spcs
