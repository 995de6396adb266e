#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "oracles.hpp"
#include "spcs/analysis.hpp"
#include "spcs/doa.hpp"
#include "spcs/harness.hpp"
#include "spcs/model.hpp"
#include "spcs/rng.hpp"
#include "spcs/solvers.hpp"

namespace {

using namespace spcs;
using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = false;
  std::string detail;
};

double elapsed_ms(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string fmt(double v, int prec = 6) {
  std::ostringstream os;
  os.precision(prec);
  os << v;
  return os.str();
}

int hardware_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

// Sweeps shared by the effectiveness and trace criteria; each runs once per process.
struct Runs {
  std::optional<SweepResult> fig2, fig3;
  double fig2_ms = 0.0, fig3_ms = 0.0;

  const SweepResult& get(std::optional<SweepResult>& slot, double& ms, const std::string& name) {
    if (!slot) {
      auto cfg = preset(name);
      cfg.threads = hardware_threads();
      const auto t0 = Clock::now();
      slot = run_sweep(cfg);
      ms = elapsed_ms(t0);
    }
    return *slot;
  }
  const SweepResult& stability() { return get(fig2, fig2_ms, "fig2-desk"); }
  const SweepResult& ordering() { return get(fig3, fig3_ms, "fig3-desk"); }
};

Runs runs;

std::size_t strategy_index(const SweepResult& res, const std::string& name) {
  const auto it = std::find(res.strategies.begin(), res.strategies.end(), name);
  require(it != res.strategies.end(), "acceptance: strategy missing from sweep: " + name);
  return static_cast<std::size_t>(it - res.strategies.begin());
}

Verdict criterion1() {
  const auto t0 = Clock::now();
  const double want[] = {8.48, 8.50, 11.0};
  const double rs[] = {0.01, 0.1, 1.0};
  bool ok = true;
  std::string detail;
  for (int i = 0; i < 3; ++i) {
    const double c = sparse_bound_constants(0.2, rs[i], 1.0).at("C");
    ok = ok && std::abs(c - want[i]) <= 0.01;
    detail += "C(r=" + fmt(rs[i]) + ")=" + fmt(c, 5) + " want " + fmt(want[i]) + "; ";
  }
  const double ms = elapsed_ms(t0) / 3.0;
  ok = ok && ms < 1.0;
  return {ok, detail + "per call " + fmt(ms, 3) + " ms"};
}

Verdict criterion2() {
  const auto t0 = Clock::now();
  const double want[] = {0.414, 0.413, 0.409};
  const double rs[] = {0.0, 0.1, 0.2};
  bool ok = true;
  std::string detail;
  for (int i = 0; i < 3; ++i) {
    const double t = drip_threshold(rs[i]);
    ok = ok && std::abs(t - want[i]) <= 5e-4;
    detail += "threshold(" + fmt(rs[i]) + ")=" + fmt(t, 6) + "; ";
  }
  const double radius = max_perturbation_radius(0.2);
  ok = ok && std::abs(radius - std::sqrt(7.0)) <= 1e-12;
  const double ms = elapsed_ms(t0) / 4.0;
  ok = ok && ms < 1.0;
  return {ok, detail + "radius(0.2)=" + fmt(radius, 15) + "; per call " + fmt(ms, 3) + " ms"};
}

Verdict criterion3() {
  const auto t0 = Clock::now();
  const DoaModel model = build_grid_model(30, 90);
  const double lb = mse_lower_bound(90);
  const double ms = elapsed_ms(t0);
  const bool ok = std::abs(model.r - 0.302) <= 1e-3 && lb == 1.0 / (3.0 * 90 * 90) && ms < 10.0;
  return {ok, "r=" + fmt(model.r, 8) + " LB=" + fmt(lb, 10) + " in " + fmt(ms, 3) + " ms"};
}

Verdict criterion4() {
  const auto t0 = Clock::now();
  const auto cfg = preset("fig5");
  int exact = 0;
  for (int t = 0; t < cfg.trials; ++t) {
    const auto inst = gen_instance(cfg.m, cfg.n, cfg.k, cfg.r, cfg.epsilon, PositiveSpikes{},
                                   derive_seed(cfg.master_seed, static_cast<std::uint64_t>(t)));
    const auto res = recover_pp_bpdn(inst.ensemble, inst.data.y, cfg.epsilon);
    double beta_err = 0.0;
    for (Eigen::Index j = 0; j < cfg.n; ++j)
      if (inst.truth.x_o(j) != 0.0)
        beta_err = std::max(beta_err, std::abs(res.beta_hat(j) - inst.truth.beta_o(j)));
    const double sig_err = (res.x_hat - inst.truth.x_o).norm();
    if (sig_err <= 1e-5 && beta_err <= 1e-4) ++exact;
  }
  const double s = elapsed_ms(t0) / 1000.0;
  const bool ok = exact >= static_cast<int>(std::ceil(0.95 * cfg.trials)) && s <= 300.0;
  return {ok, std::to_string(exact) + "/" + std::to_string(cfg.trials) + " exact in " + fmt(s, 3) + " s"};
}

Verdict criterion5() {
  const SweepResult& res = runs.stability();
  const std::size_t aa = strategy_index(res, "aa");
  const auto n = static_cast<Eigen::Index>(res.values.size());
  Eigen::MatrixXd X(n, 2);
  Eigen::VectorXd e(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    X(i, 0) = res.values[static_cast<std::size_t>(i)];
    X(i, 1) = 1.0;
    e(i) = res.at(static_cast<std::size_t>(i), aa).mean_signal_err;
  }
  const Eigen::Vector2d fit = X.colPivHouseholderQr().solve(e);
  const double ss_res = (e - X * fit).squaredNorm();
  const double ss_tot = (e.array() - e.mean()).matrix().squaredNorm();
  const double r2 = 1.0 - ss_res / ss_tot;
  const double min = runs.fig2_ms / 60000.0;
  const bool ok = std::abs(fit(1)) <= 0.05 && r2 >= 0.9 && min <= 20.0;
  return {ok, "slope=" + fmt(fit(0)) + " intercept=" + fmt(fit(1)) + " R2=" + fmt(r2) + " in " +
                  fmt(min * 60.0, 3) + " s"};
}

Verdict criterion6() {
  const SweepResult& res = runs.ordering();
  const std::size_t o = strategy_index(res, "oracle"), nom = strategy_index(res, "nominal"),
                    aa = strategy_index(res, "aa");
  bool ok = true;
  std::string detail;
  for (std::size_t i = 0; i < res.values.size(); ++i) {
    const double eo = res.at(i, o).mean_signal_err, ea = res.at(i, aa).mean_signal_err,
                 en = res.at(i, nom).mean_signal_err;
    ok = ok && eo <= ea && ea < en;
    detail += "r=" + fmt(res.values[i]) + ": " + fmt(eo, 4) + "/" + fmt(ea, 4) + "/" + fmt(en, 4) + "; ";
  }
  const double first = res.at(0, nom).mean_signal_err;
  const double last = res.at(res.values.size() - 1, nom).mean_signal_err;
  ok = ok && last >= 2.0 * first && runs.fig3_ms / 60000.0 <= 15.0;
  return {ok, detail + "nominal ratio " + fmt(last / first, 4) + " in " + fmt(runs.fig3_ms / 1000.0, 3) + " s"};
}

template <typename Pred>
std::pair<int, int> count_aa(Pred pred) {
  int good = 0, total = 0;
  for (const SweepResult* res : {&runs.stability(), &runs.ordering()}) {
    const std::size_t aa = strategy_index(*res, "aa");
    for (const auto& rec : res->records) {
      ++total;
      if (pred(rec.outcomes[aa])) ++good;
    }
  }
  return {good, total};
}

Verdict criterion7() {
  const auto [good, total] = count_aa([](const StrategyOutcome& o) { return !o.failed && o.effective; });
  return {good == total, std::to_string(good) + "/" + std::to_string(total) +
                             " alternating outputs effective (positive-signal run has no alternating output)"};
}

Verdict criterion8() {
  const auto [good, total] = count_aa([](const StrategyOutcome& o) { return o.monotone; });
  return {good == total, std::to_string(good) + "/" + std::to_string(total) + " traces non-increasing"};
}

Verdict criterion9() {
  const auto t0 = Clock::now();
  int socl1 = 0, smaller_l1 = 0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto ens = gen_gaussian_ensemble(6, 8, 0.0, derive_seed(9, s));
    const VectorXd x_o = gen_signal(8, 2, UnitSpikes{}, derive_seed(19, s));
    const VectorXd y = ens.A * x_o;
    const VectorXd ref = oracle::l0_solution(ens.A, y, 2);
    const auto res = solve_socl1<double>({ens.A, y, 0.0});
    bool same_support = true;
    for (Eigen::Index j = 0; j < 8; ++j)
      same_support = same_support && ((std::abs(res.x(j)) > 1e-6) == (ref(j) != 0.0));
    if (same_support && (res.x - ref).cwiseAbs().maxCoeff() <= 1e-6) ++socl1;
    else if (res.status == SolveStatus::optimal && res.objective < ref.lpNorm<1>() - 1e-6) ++smaller_l1;
  }
  std::mt19937_64 eng(99);
  std::normal_distribution<double> nd;
  int box = 0;
  for (int t = 0; t < 50; ++t) {
    VectorXd g(4), c(4);
    for (int i = 0; i < 4; ++i) g(i) = nd(eng), c(i) = nd(eng);
    const double r = 0.05 + t * 0.02;
    const VectorXd beta = solve_box_ls<double>({g, c, r});
    if (std::abs(beta(0) - oracle::grid_box_ls(g, c, r, 20001)) <= 1e-4) ++box;
  }
  const double s = elapsed_ms(t0) / 1000.0;
  const bool ok = socl1 == 50 && box == 50 && s <= 60.0;
  return {ok, "l1 vs l0 " + std::to_string(socl1) + "/50 (" + std::to_string(smaller_l1) +
                  " misses have a certified l1 optimum below the sparsest fit), box vs grid " + std::to_string(box) +
                  "/50 in " + fmt(s, 3) + " s"};
}

Verdict criterion10() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  bool monotone = true;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto ens = gen_gaussian_ensemble(7, 9, 0.2, derive_seed(10, s));
    double prev_ric = 0.0, prev_drip = 0.0;
    for (int k = 1; k <= 3; ++k) {
      const double ric = compute_ric<double>(ens.A, k).delta;
      const double drip = compute_drip(ens, k).delta_bar;
      worst = std::max({worst, std::abs(ric - oracle::ric_svd(ens.A, k)),
                        std::abs(drip - oracle::drip_svd(ens.A, ens.B, k))});
      monotone = monotone && ric >= prev_ric - 1e-15 && drip >= prev_drip - 1e-15;
      prev_ric = ric;
      prev_drip = drip;
    }
  }
  const double s = elapsed_ms(t0) / 1000.0;
  const bool ok = worst <= 1e-12 && monotone && s <= 60.0;
  return {ok, "max deviation " + fmt(worst, 3) + (monotone ? ", monotone" : ", not monotone") +
                  " in " + fmt(s, 3) + " s"};
}

Verdict criterion11() {
  auto cfg = preset("fig6-desk");
  cfg.threads = hardware_threads();
  const auto t0 = Clock::now();
  const DoaResult res = run_doa(cfg);
  const double min = elapsed_ms(t0) / 60000.0;
  std::vector<double> abs_err;
  int inside = 0;
  for (const auto& row : res.rows) {
    abs_err.push_back(std::abs(row.error));
    if (std::abs(row.error) <= 1.0 / res.n) ++inside;
  }
  require(!abs_err.empty(), "acceptance: no DOA estimates");
  std::sort(abs_err.begin(), abs_err.end());
  const std::size_t h = abs_err.size() / 2;
  const double median = abs_err.size() % 2 ? abs_err[h] : 0.5 * (abs_err[h - 1] + abs_err[h]);
  const double frac = static_cast<double>(inside) / static_cast<double>(abs_err.size());
  const bool ok = frac >= 0.95 && median <= 0.5 / res.n && min <= 30.0;
  return {ok, fmt(frac * 100.0, 4) + "% within 1/n, median |error| n=" + fmt(median * res.n, 4) +
                  " in " + fmt(min * 60.0, 3) + " s"};
}

Verdict criterion12() {
  const auto t0 = Clock::now();
  const int m = 30, n = 90;
  const DoaGrid g = DoaGrid::uniform(n);
  const double bound = taylor_remainder_bound(m, n);
  Rng rng(12);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double theta = rng.uniform(-1.0, 1.0);
    const double grid = g.points(g.nearest(theta));
    const VectorXc rem = steering_vector(m, theta) - steering_vector(m, grid) -
                         steering_derivative(m, grid) * (theta - grid);
    worst = std::max(worst, rem.norm());
  }
  const double s = elapsed_ms(t0) / 1000.0;
  return {worst <= bound && s <= 60.0,
          "worst remainder " + fmt(worst) + " vs bound " + fmt(bound) + " in " + fmt(s, 3) + " s"};
}

Verdict criterion13() {
  const auto t0 = Clock::now();
  EnumerationMode mode = EnumerationMode::exact(hardware_threads());
  mode.budget = 10'000'000;
  std::optional<int> smallest;
  std::string detail;
  for (int m = 135; m <= 155; ++m) {
    const DoaModel model = build_grid_model(m, 90);
    const double d = compute_drip(model.ens, 4, mode).delta_bar;
    const double thr = drip_threshold(model.r);
    detail += std::to_string(m) + ":" + fmt(d, 4) + "/" + fmt(thr, 4) + " ";
    if (d < thr) {
      smallest = m;
      break;
    }
  }
  const double min = elapsed_ms(t0) / 60000.0;
  const bool ok = smallest && std::abs(*smallest - 145) <= 2 && min <= 60.0;
  return {ok, "smallest m " + (smallest ? std::to_string(*smallest) : std::string("none")) + " (" +
                  detail + ") in " + fmt(min, 3) + " min"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, std::function<Verdict()>> criteria = {
      {1, criterion1},   {2, criterion2},   {3, criterion3},   {4, criterion4},  {5, criterion5},
      {6, criterion6},   {7, criterion7},   {8, criterion8},   {9, criterion9},  {10, criterion10},
      {11, criterion11}, {12, criterion12}, {13, criterion13}};
  bool optional = false;
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--optional") {
      optional = true;
    } else {
      try {
        selected.push_back(std::stoi(arg));
      } catch (const std::exception&) {
        std::cerr << "usage: acceptance [--optional] [criterion...]\n";
        return 64;
      }
      if (!criteria.count(selected.back())) {
        std::cerr << "unknown criterion " << arg << '\n';
        return 64;
      }
    }
  }
  if (selected.empty())
    for (const auto& [id, fn] : criteria)
      if (id != 13 || optional) selected.push_back(id);

  bool all = true;
  for (const int id : selected) {
    Verdict v;
    try {
      v = criteria.at(id)();
    } catch (const std::exception& err) {
      v = {false, std::string("error: ") + err.what()};
    }
    all = all && v.pass;
    std::cout << "criterion " << id << ": " << (v.pass ? "PASS" : "FAIL") << ' ' << v.detail << std::endl;
  }
  return all ? 0 : 1;
}
