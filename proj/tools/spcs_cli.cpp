// Command-line front end: data generation, single solves, RIC/D-RIC
// certification, bound constants, DOA runs and Monte Carlo sweeps.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "spcs/analysis.hpp"
#include "spcs/doa.hpp"
#include "spcs/harness.hpp"
#include "spcs/matrix_io.hpp"
#include "spcs/model.hpp"
#include "spcs/recovery.hpp"

namespace fs = std::filesystem;
using namespace spcs;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitSolver = 2;

struct Globals {
  std::uint64_t seed = 1;
  std::string config;
  int threads = 1;
  std::string out = ".";
};

fs::path out_dir(const Globals& g) {
  fs::path dir(g.out);
  fs::create_directories(dir);
  return dir;
}

VectorXd load_vector(const std::string& path) {
  const MatrixXd M = load_matrix<double>(path);
  if (M.cols() == 1) return M.col(0);
  if (M.rows() == 1) return M.row(0).transpose();
  throw InvalidArgument(path + ": expected a vector");
}

std::string status_line(const RecoveryResult<double>& res) {
  std::ostringstream os;
  os << "strategy=" << res.strategy << '\n'
     << "status=" << to_string(res.status) << '\n'
     << "converged=" << (res.converged ? "true" : "false") << '\n'
     << "iterations=" << res.iterations << '\n'
     << "l1_norm=" << format_scalar(l1_norm(res.x_hat)) << '\n';
  if (res.strategy == "relax") {
    os << "fell_back=" << (res.fell_back ? "true" : "false") << '\n'
       << "complementarity_defect=" << format_scalar(res.complementarity_defect) << '\n';
  }
  return os.str();
}

ExperimentConfig resolve_config(const Globals& g, const std::string& preset_name) {
  ExperimentConfig cfg;
  if (!g.config.empty()) {
    cfg = load_config(g.config);
  } else if (!preset_name.empty()) {
    cfg = preset(preset_name);
  } else {
    throw ConfigError("no configuration: pass --config <file> or --preset <name>");
  }
  cfg.master_seed = g.seed;
  cfg.threads = g.threads;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse recovery under structured sensing-matrix perturbation"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Master seed")->capture_default_str();
  app.add_option("--config", g.config, "Experiment configuration file (key = value)");
  app.add_option("--threads", g.threads, "Worker threads (0 = all cores)")->capture_default_str();
  app.add_option("--out", g.out, "Output directory")->capture_default_str();

  // gen
  auto* gen = app.add_subcommand("gen", "Generate one perturbed instance and write it to --out");
  int gm = 80, gn = 200, gk = 10;
  double gr = 0.1, geps = 0.5;
  std::string gsignal = "spikes", gext = "csv";
  gen->add_option("-m", gm)->capture_default_str();
  gen->add_option("-n", gn)->capture_default_str();
  gen->add_option("-k", gk)->capture_default_str();
  gen->add_option("-r", gr)->capture_default_str();
  gen->add_option("--epsilon", geps)->capture_default_str();
  gen->add_option("--signal", gsignal)->check(CLI::IsMember({"spikes", "positive", "compressible"}));
  gen->add_option("--format", gext)->check(CLI::IsMember({"csv", "pcsm"}));

  // solve
  auto* solve = app.add_subcommand("solve", "Recover (x, beta) from stored A, B, y");
  std::string sa, sb, sy, sstrategy = "aa", sbeta;
  double sr = 0.1, seps = 0.0, smult = 0.0;
  solve->add_option("--A", sa)->required();
  solve->add_option("--B", sb)->required();
  solve->add_option("--y", sy)->required();
  solve->add_option("-r", sr)->capture_default_str();
  solve->add_option("--epsilon", seps)->capture_default_str();
  solve->add_option("--strategy", sstrategy)
      ->check(CLI::IsMember({"oracle", "nominal", "tps", "aa", "pp", "relax"}))
      ->capture_default_str();
  solve->add_option("--beta", sbeta, "Known perturbation (oracle)");
  solve->add_option("--eps-mult", smult, "Extra slack (nominal)");

  // ric
  auto* ric = app.add_subcommand("ric", "Restricted isometry constant of a stored matrix");
  std::string rmatrix;
  int rk = 2;
  std::uint64_t rsamples = 0, rbudget = 5'000'000;
  ric->add_option("--matrix", rmatrix)->required();
  ric->add_option("-k", rk)->capture_default_str();
  ric->add_option("--sampled", rsamples, "Random supports (lower bound) instead of enumeration");
  ric->add_option("--budget", rbudget)->capture_default_str();

  // drip
  auto* drip = app.add_subcommand("drip", "Duplicate RIC of [A, B] (stored or a DOA grid model)");
  std::string da, db;
  int dk = 2, dm = 0, dn = 90;
  std::uint64_t dsamples = 0, dbudget = 5'000'000;
  double dr = 0.0;
  drip->add_option("--A", da);
  drip->add_option("--B", db);
  drip->add_option("-r", dr, "Perturbation radius for the threshold check");
  drip->add_option("-k", dk, "Support size (constant of order 2k)")->capture_default_str();
  drip->add_option("--doa-m", dm, "Use the DOA grid model with this many sensors");
  drip->add_option("--doa-n", dn)->capture_default_str();
  drip->add_option("--sampled", dsamples);
  drip->add_option("--budget", dbudget)->capture_default_str();

  // bounds
  auto* bounds = app.add_subcommand("bounds", "Error-bound constants");
  std::string bkind = "sparse";
  double bdelta = 0.2, br = 0.1, bpsi = 1.0, bratio = 0.0;
  int bk = 1;
  bounds->add_option("--kind", bkind)
      ->check(CLI::IsMember({"sparse", "compressible", "baseline", "radius"}))
      ->capture_default_str();
  bounds->add_option("--delta", bdelta, "D-RIC (or RIC for baseline)")->capture_default_str();
  bounds->add_option("-r", br)->capture_default_str();
  bounds->add_option("--psi-norm", bpsi)->capture_default_str();
  bounds->add_option("--eps-ratio", bratio)->capture_default_str();
  bounds->add_option("-k", bk)->capture_default_str();

  // doa
  auto* doa = app.add_subcommand("doa", "Off-grid DOA experiment (fig6 histogram or fig7 comparison)");
  std::string dpreset = "fig6-desk";
  int dtrials = 0;
  doa->add_option("--preset", dpreset)->capture_default_str();
  doa->add_option("--trials", dtrials, "Override the trial count");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Monte Carlo sweep; writes CSV and SVG to --out");
  std::string wpreset;
  int wtrials = 0;
  sweep->add_option("--preset", wpreset)->check(CLI::IsMember(preset_names()));
  sweep->add_option("--trials", wtrials, "Override the trial count");

  // plot
  auto* plot = app.add_subcommand("plot", "Render a sweep CSV as SVG");
  std::string pinput, poutput;
  plot->add_option("--input", pinput)->required();
  plot->add_option("--output", poutput);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      SignalKind kind = UnitSpikes{};
      if (gsignal == "positive") kind = PositiveSpikes{};
      if (gsignal == "compressible") kind = CompressibleSpec{gn};
      const Instance inst = gen_instance(gm, gn, gk, gr, geps, kind, g.seed);
      const fs::path dir = out_dir(g);
      const std::string ext = "." + gext;
      save_matrix<double>(dir / ("A" + ext), inst.ensemble.A);
      save_matrix<double>(dir / ("B" + ext), inst.ensemble.B);
      save_matrix<double>(dir / ("x_o" + ext), inst.truth.x_o);
      save_matrix<double>(dir / ("beta_o" + ext), inst.truth.beta_o);
      save_matrix<double>(dir / ("y" + ext), inst.data.y);
      std::cout << "m=" << gm << "\nn=" << gn << "\nk=" << gk << "\nr=" << format_scalar(gr)
                << "\nepsilon=" << format_scalar(geps) << "\nseed=" << g.seed << '\n';
      return kExitOk;
    }

    if (solve->parsed()) {
      SensingEnsemble<double> ens{load_matrix<double>(sa), load_matrix<double>(sb), sr};
      ens.validate(1e-9);
      const VectorXd y = load_vector(sy);
      RecoveryResult<double> res;
      AaOptions aopts;
      if (sstrategy == "oracle") {
        if (sbeta.empty()) throw ConfigError("oracle strategy needs --beta");
        res = recover_oracle_bpdn(ens, load_vector(sbeta), y, seps);
      } else if (sstrategy == "nominal") {
        res = recover_nominal_bpdn(ens, y, seps, smult);
      } else if (sstrategy == "tps") {
        res = recover_tps_bpdn(ens, y, seps);
      } else if (sstrategy == "aa") {
        res = recover_aa_p_bpdn(ens, y, seps, aopts);
      } else if (sstrategy == "pp") {
        res = recover_pp_bpdn(ens, y, seps);
      } else {
        res = recover_relax_check(ens, y, seps, aopts);
      }
      const fs::path dir = out_dir(g);
      save_matrix<double>(dir / "x_hat.csv", res.x_hat);
      save_matrix<double>(dir / "beta_hat.csv", res.beta_hat);
      std::cout << status_line(res);
      return res.status == SolveStatus::infeasible ? kExitSolver : kExitOk;
    }

    if (ric->parsed()) {
      EnumerationMode mode = rsamples ? EnumerationMode::sampling(rsamples, g.seed, g.threads)
                                      : EnumerationMode::exact(g.threads);
      mode.budget = rbudget;
      MatrixXc M;
      try {
        M = load_matrix<cplx>(rmatrix);
      } catch (const IoError&) {
        M = load_matrix<double>(rmatrix).cast<cplx>();
      }
      if (M.imag().isZero(0.0)) {
        std::cout << to_keyvalue(compute_ric<double>(M.real(), rk, mode));
      } else {
        std::cout << to_keyvalue(compute_ric(M, rk, mode));
      }
      return kExitOk;
    }

    if (drip->parsed()) {
      EnumerationMode mode = dsamples ? EnumerationMode::sampling(dsamples, g.seed, g.threads)
                                      : EnumerationMode::exact(g.threads);
      mode.budget = dbudget;
      DRipReport rep;
      double r = dr;
      if (dm > 0) {
        const DoaModel model = build_grid_model(dm, dn);
        rep = compute_drip(model.ens, dk, mode);
        r = model.r;
      } else {
        if (da.empty() || db.empty()) throw ConfigError("drip needs --A and --B, or --doa-m");
        SensingEnsemble<double> ens{load_matrix<double>(da), load_matrix<double>(db), dr};
        rep = compute_drip(ens, dk, mode);
      }
      std::cout << to_keyvalue(rep) << "r=" << format_scalar(r)
                << "\nthreshold=" << format_scalar(drip_threshold(r)) << "\ncondition_met="
                << (rep.delta_bar < drip_threshold(r) ? "true" : "false") << '\n';
      return kExitOk;
    }

    if (bounds->parsed()) {
      if (bkind == "sparse") {
        std::cout << to_keyvalue(sparse_bound_constants(bdelta, br, bpsi));
      } else if (bkind == "compressible") {
        std::cout << to_keyvalue(compressible_bound_constants(bdelta, br, bpsi, bk));
      } else if (bkind == "baseline") {
        std::cout << to_keyvalue(baseline_bound_constants(bdelta, bratio));
      } else {
        std::cout << "delta_bar=" << format_scalar(bdelta)
                  << "\nmax_r=" << format_scalar(max_perturbation_radius(bdelta)) << '\n';
      }
      return kExitOk;
    }

    if (doa->parsed()) {
      ExperimentConfig cfg = resolve_config(g, dpreset);
      if (dtrials > 0) cfg.trials = dtrials;
      const fs::path dir = out_dir(g);
      if (cfg.kind == ExperimentKind::doa_compare) {
        const DoaComparison cmp = run_doa_compare(cfg);
        export_doa_compare(cmp, dir / (cfg.name + ".csv"));
        emit_spectrum(cmp, dir / (cfg.name + ".svg"));
        std::cout << "theta=" << format_scalar(cmp.theta(0)) << ',' << format_scalar(cmp.theta(1))
                  << "\ntheta_hat=" << format_scalar(cmp.theta_hat(0)) << ','
                  << format_scalar(cmp.theta_hat(1)) << '\n';
        return kExitOk;
      }
      if (cfg.kind != ExperimentKind::doa) throw ConfigError("configuration is not a doa experiment");
      const DoaResult res = run_doa(cfg);
      export_doa(res, dir / (cfg.name + ".csv"));
      emit_histogram(res, dir / (cfg.name + ".svg"));
      std::size_t inside = 0;
      for (const auto& row : res.rows) inside += std::abs(row.error) <= 1.0 / res.n ? 1 : 0;
      std::cout << "trials=" << cfg.trials << "\nerrors_within_grid_step="
                << format_scalar(static_cast<double>(inside) / res.rows.size())
                << "\nfailures=" << res.failures << '\n';
      return static_cast<double>(res.failures) / cfg.trials > cfg.failure_threshold ? kExitSolver
                                                                                   : kExitOk;
    }

    if (sweep->parsed()) {
      ExperimentConfig cfg = resolve_config(g, wpreset);
      if (wtrials > 0) cfg.trials = wtrials;
      if (cfg.kind != ExperimentKind::cs) throw ConfigError("use the doa subcommand for doa presets");
      const SweepResult res = run_sweep(cfg);
      const fs::path dir = out_dir(g);
      export_results(res, dir / (cfg.name + ".csv"));
      export_trials(res, dir / (cfg.name + "_trials.csv"));
      emit_plot(res, dir / (cfg.name + ".svg"));
      std::cout << "points=" << res.values.size() << "\nstrategies=" << res.strategies.size()
                << "\nfailure_rate=" << format_scalar(res.failure_rate()) << '\n';
      return res.failure_rate() > cfg.failure_threshold ? kExitSolver : kExitOk;
    }

    if (plot->parsed()) {
      const SweepResult res = import_results(pinput);
      fs::path target = poutput.empty() ? fs::path(pinput).replace_extension(".svg") : fs::path(poutput);
      emit_plot(res, target);
      std::cout << "wrote " << target.string() << '\n';
      return kExitOk;
    }
  } catch (const ConfigError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitConfig;
  }
  return kExitOk;
}
