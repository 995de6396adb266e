#include "spcs/harness.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "spcs/analysis.hpp"
#include "spcs/doa.hpp"
#include "spcs/matrix_io.hpp"
#include "spcs/parallel.hpp"
#include "spcs/rng.hpp"

namespace spcs {

namespace {

SignalKind signal_kind(SignalType t, int n) {
  switch (t) {
    case SignalType::positive: return PositiveSpikes{};
    case SignalType::compressible: return CompressibleSpec{n};
    case SignalType::spikes: break;
  }
  return UnitSpikes{};
}

bool monotone(const std::vector<double>& trace) {
  for (std::size_t i = 1; i < trace.size(); ++i)
    if (trace[i] > trace[i - 1] + 1e-9) return false;
  return true;
}

RecoveryResult<double> run_strategy(const std::string& name, const Instance& inst,
                                    const ExperimentConfig& cfg) {
  const auto& ens = inst.ensemble;
  const auto& y = inst.data.y;
  const double eps = inst.data.epsilon;
  const auto& opts = cfg.aa.inner;
  if (name == "oracle") return recover_oracle_bpdn(ens, inst.truth.beta_o, y, eps, opts);
  if (name == "nominal") {
    const double eps_mult =
        (ens.B * inst.truth.beta_o.cwiseProduct(inst.truth.x_o)).norm();
    return recover_nominal_bpdn(ens, y, eps, eps_mult, opts);
  }
  if (name == "tps") return recover_tps_bpdn(ens, y, eps, opts);
  if (name == "aa") return recover_aa_p_bpdn(ens, y, eps, cfg.aa);
  if (name == "pp") return recover_pp_bpdn(ens, y, eps, opts);
  if (name == "relax") return recover_relax_check(ens, y, eps, cfg.aa);
  throw InvalidArgument("unknown strategy '" + name + "'");
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  return os;
}

void check_written(std::ostream& os, const std::filesystem::path& path) {
  os.flush();
  if (!os) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace

TrialRecord run_trial(const ExperimentConfig& cfg, double value, int index) {
  require(index >= 0, "run_trial: index must be nonnegative");
  int m = cfg.m;
  double r = cfg.r, eps = cfg.epsilon;
  switch (cfg.sweep) {
    case SweepParam::epsilon: eps = value; break;
    case SweepParam::r: r = value; break;
    case SweepParam::m: m = static_cast<int>(value); break;
    case SweepParam::none: break;
  }
  TrialRecord rec;
  rec.index = index;
  rec.value = cfg.sweep == SweepParam::none ? 0.0 : value;
  rec.seed = derive_seed(cfg.master_seed, static_cast<std::uint64_t>(index));
  const Instance inst =
      gen_instance(m, cfg.n, cfg.k, r, eps, signal_kind(cfg.signal, cfg.n), rec.seed);
  for (const auto& name : cfg.strategies) {
    StrategyOutcome out;
    out.strategy = name;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const auto res = run_strategy(name, inst, cfg);
      const auto metrics = error_metrics(inst.truth, res, cfg.k);
      const auto eff = effectiveness_check(res, inst.ensemble, inst.data.y, eps, inst.truth.x_o);
      out.signal_err = metrics.signal_err;
      out.beta_err = metrics.beta_err;
      out.iterations = res.iterations;
      out.effective = eff.effective;
      out.l1_gap = eff.l1_gap;
      out.monotone = monotone(res.l1_trace);
      out.failed = res.status == SolveStatus::infeasible;
      out.message = std::string(to_string(res.status));
    } catch (const std::exception& err) {
      out.failed = true;
      out.message = err.what();
      out.signal_err = out.beta_err = std::numeric_limits<double>::quiet_NaN();
    }
    out.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    rec.outcomes.push_back(std::move(out));
  }
  return rec;
}

TrialRecord run_trial(const ExperimentConfig& cfg, int index) {
  return run_trial(cfg, cfg.points().front(), index);
}

const SweepPoint& SweepResult::at(std::size_t value_index, std::size_t strategy_index) const {
  require(value_index < values.size() && strategy_index < strategies.size(),
          "sweep result: index out of range");
  return points[value_index * strategies.size() + strategy_index];
}

double SweepResult::failure_rate() const {
  std::size_t total = 0, failed = 0;
  for (const auto& rec : records)
    for (const auto& o : rec.outcomes) {
      ++total;
      failed += o.failed ? 1 : 0;
    }
  return total ? static_cast<double>(failed) / static_cast<double>(total) : 0.0;
}

SweepResult run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  require(cfg.kind == ExperimentKind::cs, "run_sweep: configuration is not a sweep experiment");
  SweepResult res;
  res.param = to_string(cfg.sweep);
  res.values = cfg.points();
  res.strategies = cfg.strategies;
  const auto nv = res.values.size();
  const auto nt = static_cast<std::size_t>(cfg.trials);
  res.records.resize(nv * nt);
  parallel_for(nv * nt, cfg.threads, [&](std::uint64_t i, int) {
    res.records[i] = run_trial(cfg, res.values[i / nt], static_cast<int>(i % nt));
  });
  // Means are accumulated in trial-index order so the result does not depend
  // on scheduling.
  for (std::size_t v = 0; v < nv; ++v) {
    for (std::size_t s = 0; s < res.strategies.size(); ++s) {
      SweepPoint p;
      p.value = res.values[v];
      p.strategy = res.strategies[s];
      double se = 0.0, be = 0.0, eff = 0.0;
      int count = 0;
      for (std::size_t t = 0; t < nt; ++t) {
        const auto& o = res.records[v * nt + t].outcomes[s];
        if (o.failed) continue;
        se += o.signal_err;
        be += o.beta_err;
        eff += o.effective ? 1.0 : 0.0;
        ++count;
      }
      p.trials = count;
      if (count > 0) {
        p.mean_signal_err = se / count;
        p.mean_beta_err = be / count;
        p.effective_rate = eff / count;
      }
      res.points.push_back(p);
    }
  }
  return res;
}

void export_results(const SweepResult& result, const std::filesystem::path& path,
                    ExportFormat format) {
  auto os = open_out(path);
  if (format == ExportFormat::csv) {
    os << "sweep_param,value,strategy,mean_signal_err,mean_beta_err,trials,effective_rate\n";
    for (const auto& p : result.points) {
      os << result.param << ',' << format_scalar(p.value) << ',' << p.strategy << ','
         << format_scalar(p.mean_signal_err) << ',' << format_scalar(p.mean_beta_err) << ','
         << p.trials << ',' << format_scalar(p.effective_rate) << '\n';
    }
  } else {
    os << "sweep_param=" << result.param << '\n';
    for (const auto& p : result.points) {
      const std::string prefix = p.strategy + "[" + format_scalar(p.value) + "].";
      os << prefix << "mean_signal_err=" << format_scalar(p.mean_signal_err) << '\n'
         << prefix << "mean_beta_err=" << format_scalar(p.mean_beta_err) << '\n'
         << prefix << "trials=" << p.trials << '\n'
         << prefix << "effective_rate=" << format_scalar(p.effective_rate) << '\n';
    }
  }
  check_written(os, path);
}

SweepResult import_results(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open '" + path.string() + "' for reading");
  std::string line;
  if (!std::getline(is, line) ||
      line != "sweep_param,value,strategy,mean_signal_err,mean_beta_err,trials,effective_rate")
    throw IoError(path.string() + ": missing or unexpected header");
  SweepResult res;
  std::map<std::string, std::size_t> strategy_index;
  int lineno = 1;
  try {
    while (std::getline(is, line)) {
      ++lineno;
      if (line.empty()) continue;
      std::vector<std::string> cells;
      std::stringstream ss(line);
      std::string cell;
      while (std::getline(ss, cell, ',')) cells.push_back(cell);
      if (cells.size() != 7) throw IoError("expected 7 columns");
      res.param = cells[0];
      SweepPoint p;
      p.value = parse_complex(cells[1]).real();
      p.strategy = cells[2];
      p.mean_signal_err = parse_complex(cells[3]).real();
      p.mean_beta_err = parse_complex(cells[4]).real();
      p.trials = std::stoi(cells[5]);
      p.effective_rate = parse_complex(cells[6]).real();
      if (res.values.empty() || res.values.back() != p.value) res.values.push_back(p.value);
      if (!strategy_index.count(p.strategy)) {
        strategy_index[p.strategy] = res.strategies.size();
        res.strategies.push_back(p.strategy);
      }
      res.points.push_back(p);
    }
  } catch (const std::exception& err) {
    throw IoError(path.string() + ":" + std::to_string(lineno) + ": " + err.what());
  }
  if (res.points.size() != res.values.size() * res.strategies.size())
    throw IoError(path.string() + ": rows do not form a value x strategy table");
  return res;
}

void export_trials(const SweepResult& result, const std::filesystem::path& path) {
  auto os = open_out(path);
  os << "sweep_param,value,trial,seed,strategy,signal_err,beta_err,iterations,effective,monotone,"
        "failed,status\n";
  for (const auto& rec : result.records)
    for (const auto& o : rec.outcomes) {
      os << result.param << ',' << format_scalar(rec.value) << ',' << rec.index << ',' << rec.seed
         << ',' << o.strategy << ',' << format_scalar(o.signal_err) << ','
         << format_scalar(o.beta_err) << ',' << o.iterations << ',' << o.effective << ','
         << o.monotone << ',' << o.failed << ',' << '"' << o.message << '"' << '\n';
    }
  check_written(os, path);
}

DoaResult run_doa(const ExperimentConfig& cfg) {
  cfg.validate();
  require(cfg.kind == ExperimentKind::doa, "run_doa: configuration is not a doa experiment");
  const DoaModel model = build_grid_model(cfg.m, cfg.n, 2, std::sqrt(2.0));
  DoaResult res;
  res.n = cfg.n;
  res.m = cfg.m;
  std::vector<std::vector<DoaRow>> per_trial(static_cast<std::size_t>(cfg.trials));
  std::vector<char> failed(static_cast<std::size_t>(cfg.trials), 0);
  parallel_for(static_cast<std::uint64_t>(cfg.trials), cfg.threads, [&](std::uint64_t t, int) {
    const DoaScene scene =
        protocol_scene(cfg.n, derive_seed(derive_seed(cfg.master_seed, t), Stream::scene));
    const VectorXc y = simulate_scene(scene, cfg.m);
    const DoaEstimate est = estimate_doa(y, model, cfg.aa);
    if (est.recovery.status == SolveStatus::infeasible) failed[t] = 1;
    for (int j = 0; j < scene.k(); ++j) {
      DoaRow row;
      row.trial = static_cast<int>(t);
      row.source = j;
      row.theta = scene.theta(j);
      row.theta_hat = est.theta_hat(j);
      row.error = row.theta_hat - row.theta;
      per_trial[t].push_back(row);
    }
  });
  for (std::size_t t = 0; t < per_trial.size(); ++t) {
    res.failures += failed[t];
    res.rows.insert(res.rows.end(), per_trial[t].begin(), per_trial[t].end());
  }
  return res;
}

void export_doa(const DoaResult& result, const std::filesystem::path& path) {
  auto os = open_out(path);
  os << "trial,source,theta,theta_hat,error\n";
  for (const auto& r : result.rows)
    os << r.trial << ',' << r.source << ',' << format_scalar(r.theta) << ','
       << format_scalar(r.theta_hat) << ',' << format_scalar(r.error) << '\n';
  check_written(os, path);
}

DoaComparison run_doa_compare(const ExperimentConfig& cfg) {
  cfg.validate();
  const DoaModel model = build_grid_model(cfg.m, cfg.n, 2, std::sqrt(2.0));
  const DoaScene scene =
      protocol_scene(cfg.n, derive_seed(derive_seed(cfg.master_seed, 0), Stream::scene));
  const VectorXc y = simulate_scene(scene, cfg.m);
  const DoaEstimate est = estimate_doa(y, model, cfg.aa);
  DoaComparison out;
  out.theta = scene.theta;
  out.theta_hat = est.theta_hat;
  out.grid = model.grid.points;
  out.spcs_magnitude = est.recovery.x_hat.cwiseAbs();
  // The on-grid model error is at most kappa |theta - grid| <= kappa / n_std per source.
  const double eps_std = scene.s.norm() * std::sqrt(2.0) * array_kappa(cfg.m) / cfg.n_std;
  out.std_grid = DoaGrid::uniform(cfg.n_std).points;
  out.std_magnitude = standard_cs_spectrum(y, cfg.m, cfg.n_std, eps_std, cfg.aa.inner);
  return out;
}

void export_doa_compare(const DoaComparison& result, const std::filesystem::path& path) {
  auto os = open_out(path);
  os << "method,theta,magnitude\n";
  for (Eigen::Index i = 0; i < result.theta.size(); ++i)
    os << "truth," << format_scalar(result.theta(i)) << ",1\n";
  for (Eigen::Index i = 0; i < result.theta_hat.size(); ++i)
    os << "spcs_estimate," << format_scalar(result.theta_hat(i)) << ",1\n";
  for (Eigen::Index i = 0; i < result.grid.size(); ++i)
    os << "spcs," << format_scalar(result.grid(i)) << ',' << format_scalar(result.spcs_magnitude(i)) << '\n';
  for (Eigen::Index i = 0; i < result.std_grid.size(); ++i)
    os << "standard," << format_scalar(result.std_grid(i)) << ','
       << format_scalar(result.std_magnitude(i)) << '\n';
  check_written(os, path);
}

}  // namespace spcs
