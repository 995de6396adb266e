#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "spcs/analysis.hpp"
#include "spcs/model.hpp"
#include "spcs/recovery.hpp"
#include "spcs/rng.hpp"

namespace spcs {
namespace {

void expect_in_box(const VectorXd& beta, double r) {
  if (beta.size() > 0) EXPECT_LE(beta.cwiseAbs().maxCoeff(), r);
}

TEST(Oracle, ExactOnNoiseFreeData) {
  const auto inst = gen_instance(40, 80, 4, 0.1, 0.0, UnitSpikes{}, 3);
  const auto res = recover_oracle_bpdn(inst.ensemble, inst.truth.beta_o, inst.data.y, 0.0);
  EXPECT_LE((res.x_hat - inst.truth.x_o).norm(), 1e-8);
  EXPECT_EQ(res.beta_hat, inst.truth.beta_o);
  EXPECT_TRUE(effectiveness_check(res, inst.ensemble, inst.data.y, 0.0, inst.truth.x_o).effective);
}

TEST(Oracle, ZeroPerturbationIsPlainBpdn) {
  const auto inst = gen_instance(20, 40, 3, 0.1, 0.2, UnitSpikes{}, 4);
  const auto a = recover_oracle_bpdn(inst.ensemble, VectorXd::Zero(40), inst.data.y, 0.2);
  const auto b = solve_socl1<double>({inst.ensemble.A, inst.data.y, 0.2});
  EXPECT_NEAR(l1_norm(a.x_hat), b.objective, 1e-9);
}

TEST(Nominal, ZeroSlackIsPlainBpdn) {
  const auto inst = gen_instance(20, 40, 3, 0.1, 0.2, UnitSpikes{}, 4);
  const auto a = recover_nominal_bpdn(inst.ensemble, inst.data.y, 0.2, 0.0);
  const auto b = solve_socl1<double>({inst.ensemble.A, inst.data.y, 0.2});
  EXPECT_NEAR(l1_norm(a.x_hat), b.objective, 1e-9);
  EXPECT_TRUE(a.beta_hat.isZero(0.0));
  EXPECT_EQ(a.strategy, "nominal");
}

TEST(Nominal, ErrorPersistsWithoutNoise) {
  const auto inst = gen_instance(80, 200, 10, 0.5, 0.0, UnitSpikes{}, 5);
  const auto& g = inst.truth;
  const double eps_mult = (inst.ensemble.B * g.beta_o.cwiseProduct(g.x_o)).norm();
  const auto res = recover_nominal_bpdn(inst.ensemble, inst.data.y, 0.0, eps_mult);
  EXPECT_GT((res.x_hat - g.x_o).norm(), 0.1);
}

TEST(Tps, UnperturbedDataGivesSignalAndZeroPerturbation) {
  const auto inst = gen_instance(30, 40, 2, 0.0, 0.0, UnitSpikes{}, 6);
  const auto res = recover_tps_bpdn(inst.ensemble, inst.data.y, 0.0);
  EXPECT_LE((res.x_hat - inst.truth.x_o).norm(), 1e-8);
  EXPECT_TRUE(res.beta_hat.isZero(1e-8));
}

TEST(Tps, NeverWorseThanSparsestFitOverConcatenation) {
  // m=4, n=6, k=1: z = [x; beta .* x] is 2-sparse over [A, B], so the
  // exhaustive 2-sparse fit is feasible and bounds the l1 optimum.
  int matched = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto inst = gen_instance(4, 6, 1, 0.1, 0.0, UnitSpikes{}, derive_seed(7, s));
    const MatrixXd psi = inst.ensemble.psi();
    const VectorXd ref = oracle::l0_solution(psi, inst.data.y, 2);
    const auto res = recover_tps_bpdn(inst.ensemble, inst.data.y, 0.0);
    expect_in_box(res.beta_hat, 0.1);
    const auto z = solve_socl1<double>({psi, inst.data.y, 0.0});
    EXPECT_LE(z.objective, ref.lpNorm<1>() + 1e-8);
    EXPECT_LE((res.x_hat - z.x.head(6)).norm(), 1e-6);
    if ((z.x - ref).cwiseAbs().maxCoeff() <= 1e-6) ++matched;
  }
  RecordProperty("matched_sparsest", matched);
}

TEST(Aa, NoPerturbationStopsAfterOneStep) {
  const auto inst = gen_instance(20, 40, 3, 0.0, 0.1, UnitSpikes{}, 8);
  const auto res = recover_aa_p_bpdn(inst.ensemble, inst.data.y, 0.1);
  const auto b = solve_socl1<double>({inst.ensemble.A, inst.data.y, 0.1});
  EXPECT_EQ(res.l1_trace.size(), 1u);
  EXPECT_TRUE(res.converged);
  EXPECT_NEAR(l1_norm(res.x_hat), b.objective, 1e-6);
  EXPECT_TRUE(res.beta_hat.isZero(0.0));
}

TEST(Aa, TraceIsMonotoneAndIteratesFeasible) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto inst = gen_instance(40, 80, 4, 0.3, 0.2, UnitSpikes{}, derive_seed(9, s));
    const auto res = recover_aa_p_bpdn(inst.ensemble, inst.data.y, 0.2);
    ASSERT_FALSE(res.l1_trace.empty());
    for (std::size_t i = 1; i < res.l1_trace.size(); ++i)
      EXPECT_LE(res.l1_trace[i], res.l1_trace[i - 1] + 1e-9);
    expect_in_box(res.beta_hat, 0.3);
    const double resid = (inst.data.y - inst.ensemble.perturbed(res.beta_hat) * res.x_hat).norm();
    EXPECT_LE(resid, 0.2 * (1.0 + 1e-6) + 1e-9);
    EXPECT_EQ(res.l1_trace.back(), l1_norm(res.x_hat));
  }
}

TEST(Aa, EffectiveOnModerateInstance) {
  const auto inst = gen_instance(80, 200, 10, 0.1, 0.5, UnitSpikes{}, 10);
  const auto res = recover_aa_p_bpdn(inst.ensemble, inst.data.y, 0.5);
  const auto eff = effectiveness_check(res, inst.ensemble, inst.data.y, 0.5, inst.truth.x_o);
  EXPECT_TRUE(eff.effective);
  EXPECT_LE(eff.l1_gap, 1e-9);
  EXPECT_GE(eff.feasibility_slack, -1e-6);
}

TEST(Aa, ReturnedPointIsStationary) {
  const AaOptions ao;
  const auto inst = gen_instance(40, 80, 4, 0.2, 0.3, UnitSpikes{}, 11);
  const auto& ens = inst.ensemble;
  const auto res = recover_aa_p_bpdn(ens, inst.data.y, 0.3, ao);
  ASSERT_TRUE(res.converged);
  const auto x_step = solve_socl1<double>({ens.perturbed(res.beta_hat), inst.data.y, 0.3}, ao.inner);
  const VectorXd beta = solve_box_ls<double>(
      {ens.B * x_step.x.asDiagonal(), inst.data.y - ens.A * x_step.x, ens.r}, ao.inner);
  const auto again = solve_socl1<double>({ens.perturbed(beta), inst.data.y, 0.3}, ao.inner);
  const double l1 = l1_norm(res.x_hat);
  EXPECT_LE(std::abs(x_step.objective - l1), 10.0 * ao.rel_change_tol * l1);
  EXPECT_LE(std::abs(again.objective - l1), 10.0 * ao.rel_change_tol * l1);
}

TEST(Aa, EffectiveOutputObeysErrorBound) {
  // Tall enough for the duplicated RIC condition to be certified exhaustively.
  const auto inst = gen_instance(200, 8, 1, 0.1, 0.2, UnitSpikes{}, 5);
  const auto& ens = inst.ensemble;
  const auto drip = compute_drip(ens, 2);
  const auto bound = sparse_bound_constants(drip.delta_bar, 0.1, spectral_norm<double>(ens.psi()));
  ASSERT_TRUE(bound.condition_met);
  const auto res = recover_aa_p_bpdn(ens, inst.data.y, 0.2);
  ASSERT_TRUE(effectiveness_check(res, ens, inst.data.y, 0.2, inst.truth.x_o).effective);
  EXPECT_LE((res.x_hat - inst.truth.x_o).norm(), bound.at("C") * 0.2);
}

TEST(Aa, InfeasibleFirstStepPropagates) {
  // More rows than columns and no noise slack: y is off the range of A.
  const auto inst = gen_instance(40, 8, 2, 0.1, 0.0, UnitSpikes{}, 6);
  const auto res = recover_aa_p_bpdn(inst.ensemble, inst.data.y, 0.0);
  EXPECT_EQ(res.status, SolveStatus::infeasible);
  EXPECT_FALSE(res.converged);
}

TEST(Aa, ComplexRun) {
  SensingEnsemble<cplx> ens{MatrixXc::Random(12, 24).colwise().normalized(),
                            MatrixXc::Random(12, 24).colwise().normalized(), 0.2};
  VectorXc x = VectorXc::Zero(24);
  x(2) = cplx(1, 0);
  x(17) = cplx(0, 1);
  VectorXd beta = VectorXd::Zero(24);
  beta(2) = 0.1;
  beta(17) = -0.15;
  const VectorXc y = ens.perturbed(beta) * x;
  const auto res = recover_aa_p_bpdn(ens, y, 0.01);
  for (std::size_t i = 1; i < res.l1_trace.size(); ++i)
    EXPECT_LE(res.l1_trace[i], res.l1_trace[i - 1] + 1e-9);
  EXPECT_TRUE(effectiveness_check(res, ens, y, 0.01, x).effective);
}

TEST(Aa, ZeroDataIsImmediate) {
  const auto ens = gen_gaussian_ensemble(10, 20, 0.1, 2);
  const auto res = recover_aa_p_bpdn(ens, VectorXd(VectorXd::Zero(10)), 0.0);
  EXPECT_TRUE(res.x_hat.isZero(1e-12));
  EXPECT_TRUE(res.converged);
}

TEST(Aa, OptionsValidated) {
  AaOptions bad;
  bad.max_outer_iter = 0;
  EXPECT_THROW(bad.validate(), InvalidArgument);
  bad = AaOptions{};
  bad.rel_change_tol = 0.0;
  EXPECT_THROW(bad.validate(), InvalidArgument);
}

TEST(Effectiveness, TruncatedRunReportsConsistentGap) {
  const auto inst = gen_instance(40, 80, 6, 1.0, 0.05, UnitSpikes{}, 13);
  AaOptions ao;
  ao.max_outer_iter = 1;
  const auto res = recover_aa_p_bpdn(inst.ensemble, inst.data.y, 0.05, ao);
  const auto eff = effectiveness_check(res, inst.ensemble, inst.data.y, 0.05, inst.truth.x_o);
  EXPECT_NEAR(eff.l1_gap, l1_norm(res.x_hat) - l1_norm(inst.truth.x_o), 1e-12);
  EXPECT_EQ(eff.effective, eff.l1_gap <= 1e-9 && eff.feasibility_slack >= -(0.05e-6 + 1e-9));
}

TEST(Effectiveness, InfeasiblePointIsNotEffective) {
  const auto inst = gen_instance(10, 20, 2, 0.1, 0.0, UnitSpikes{}, 14);
  RecoveryResult<double> r;
  r.x_hat = VectorXd::Zero(20);
  r.beta_hat = VectorXd::Zero(20);
  const auto eff = effectiveness_check(r, inst.ensemble, inst.data.y, 0.0, inst.truth.x_o);
  EXPECT_FALSE(eff.effective);
  EXPECT_LT(eff.l1_gap, 0.0);
  EXPECT_LT(eff.feasibility_slack, 0.0);
}

TEST(Pp, ZeroSignal) {
  const auto ens = gen_gaussian_ensemble(10, 20, 0.1, 2);
  const auto res = recover_pp_bpdn(ens, VectorXd::Zero(10), 0.0);
  EXPECT_TRUE(res.x_hat.isZero(1e-12));
  EXPECT_TRUE(res.beta_hat.isZero(0.0));
}

TEST(Pp, ExactPositiveRecovery) {
  const auto inst = gen_instance(30, 60, 3, 0.1, 0.0, PositiveSpikes{}, 15);
  const auto res = recover_pp_bpdn(inst.ensemble, inst.data.y, 0.0);
  const auto& g = inst.truth;
  EXPECT_LE((res.x_hat - g.x_o).norm(), 1e-8);
  EXPECT_LE((res.beta_hat - g.beta_o).cwiseProduct(g.x_o).norm(), 1e-8);
}

// Optimal value of the positive problem at a fixed beta: a cone problem with
// no perturbation freedom.
double fixed_beta_value(const SensingEnsemble<double>& ens, const VectorXd& y, double eps,
                        const VectorXd& beta) {
  const auto res = solve_pos_p1({ens.perturbed(beta), ens.B, 0.0}, y, eps);
  return res.status == SolveStatus::optimal ? res.objective : std::numeric_limits<double>::infinity();
}

TEST(Pp, AgreesWithMultiStartPatternSearch) {
  // Direct minimisation of the positive problem over beta: compass search on
  // the fixed-beta value from many random starts, with step halving.
  for (std::uint64_t s = 0; s < 3; ++s) {
    const auto inst = gen_instance(6, 10, 2, 0.2, 0.05, PositiveSpikes{}, derive_seed(16, s));
    const auto& ens = inst.ensemble;
    const auto& y = inst.data.y;
    double best = std::numeric_limits<double>::infinity();
    Rng rng(derive_seed(17, s));
    for (int start = 0; start < 4; ++start) {
      VectorXd beta(10);
      for (int j = 0; j < 10; ++j) beta(j) = start == 0 ? 0.0 : rng.uniform(-0.2, 0.2);
      double val = fixed_beta_value(ens, y, 0.05, beta);
      for (double h = 0.1; h > 1e-7; h *= 0.25) {
        for (bool improved = true; improved;) {
          improved = false;
          for (int j = 0; j < 10; ++j)
            for (double dir : {1.0, -1.0}) {
              VectorXd trial = beta;
              trial(j) = std::clamp(trial(j) + dir * h, -0.2, 0.2);
              const double v = fixed_beta_value(ens, y, 0.05, trial);
              if (v < val - 1e-12) {
                val = v;
                beta = trial;
                improved = true;
              }
            }
        }
      }
      best = std::min(best, val);
    }
    const auto pp = recover_pp_bpdn(ens, y, 0.05);
    EXPECT_LE(l1_norm(pp.x_hat), best + 1e-5) << "seed " << s;
    EXPECT_NEAR(l1_norm(pp.x_hat), best, 1e-5) << "seed " << s;
  }
}

TEST(Relax, ReducesToBpdnWithoutPerturbation) {
  const auto inst = gen_instance(20, 40, 3, 0.0, 0.1, UnitSpikes{}, 18);
  const auto res = recover_relax_check(inst.ensemble, inst.data.y, 0.1);
  const auto b = solve_socl1<double>({inst.ensemble.A, inst.data.y, 0.1});
  EXPECT_NEAR(l1_norm(res.x_hat), b.objective, 1e-6);
}

TEST(Relax, NoWorseThanAlternating) {
  int complementary = 0;
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto inst = gen_instance(20, 40, 3, 0.1, 0.1, UnitSpikes{}, derive_seed(19, s));
    const auto res = recover_relax_check(inst.ensemble, inst.data.y, 0.1);
    expect_in_box(res.beta_hat, 0.1);
    if (res.fell_back) continue;
    ++complementary;
    EXPECT_LE(res.complementarity_defect, 1e-8);
    const auto aa = recover_aa_p_bpdn(inst.ensemble, inst.data.y, 0.1);
    EXPECT_LE(l1_norm(res.x_hat), l1_norm(aa.x_hat) + 1e-6);
    const double resid = (inst.data.y - inst.ensemble.perturbed(res.beta_hat) * res.x_hat).norm();
    EXPECT_LE(resid, 0.1 * (1.0 + 1e-6) + 1e-8);
  }
  RecordProperty("complementary", complementary);
}

TEST(ExtractBeta, ClampsAndSkipsSmallDenominators) {
  VectorXd den(4), num(4);
  den << 1.0, 2.0, 1e-9, -1.0;
  num << 0.05, 1.0, 1.0, 0.02;
  const VectorXd b = extract_beta(den, num, 0.1, 1e-6);
  EXPECT_DOUBLE_EQ(b(0), 0.05);
  EXPECT_DOUBLE_EQ(b(1), 0.1);
  EXPECT_EQ(b(2), 0.0);
  EXPECT_DOUBLE_EQ(b(3), -0.02);
}

}  // namespace
}  // namespace spcs
