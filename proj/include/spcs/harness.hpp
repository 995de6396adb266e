#ifndef SPCS_HARNESS_HPP_
#define SPCS_HARNESS_HPP_

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "spcs/model.hpp"
#include "spcs/recovery.hpp"

namespace spcs {

/// Malformed or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind { cs, doa, doa_compare };
enum class SweepParam { none, epsilon, r, m };
enum class SignalType { spikes, positive, compressible };

struct ExperimentConfig {
  std::string name = "custom";
  ExperimentKind kind = ExperimentKind::cs;
  int n = 200;
  int m = 80;
  int k = 10;
  double r = 0.1;
  double epsilon = 0.5;
  SweepParam sweep = SweepParam::none;
  std::vector<double> values;
  int trials = 10;
  std::uint64_t master_seed = 1;
  /// Subset of oracle, nominal, tps, aa, pp, relax, in output order.
  std::vector<std::string> strategies = {"oracle", "nominal", "tps", "aa"};
  SignalType signal = SignalType::spikes;
  int threads = 1;
  AaOptions aa;
  /// Exit status 2 when the fraction of failed solves exceeds this.
  double failure_threshold = 0.1;
  /// Grid size of the on-grid comparison (doa_compare only).
  int n_std = 360;

  /// Throws ConfigError.
  void validate() const;
  /// Values of the swept parameter; a single base value when not sweeping.
  std::vector<double> points() const;
};

/// Parses `key = value` lines ('#' starts a comment). A `preset` key, if
/// present, must come first and seeds every other field.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// fig2..fig7 with the published settings, and reduced `-desk` variants.
ExperimentConfig preset(const std::string& name);
std::vector<std::string> preset_names();

std::string to_string(SweepParam p);
std::string to_string(SignalType s);

struct StrategyOutcome {
  std::string strategy;
  double signal_err = 0.0;
  double beta_err = 0.0;
  int iterations = 0;
  bool effective = false;
  double l1_gap = 0.0;
  /// l1 trace never rose by more than 1e-9.
  bool monotone = true;
  bool failed = false;
  std::string message;
  double wall_time_ms = 0.0;
};

struct TrialRecord {
  std::uint64_t seed = 0;
  int index = 0;
  double value = 0.0;
  std::vector<StrategyOutcome> outcomes;
};

/// Trial `index` at sweep value `value`: data drawn from
/// derive_seed(master_seed, index), so each sweep point reuses the same
/// random streams, and every strategy sees the same data.
TrialRecord run_trial(const ExperimentConfig& cfg, double value, int index);
TrialRecord run_trial(const ExperimentConfig& cfg, int index);

struct SweepPoint {
  double value = 0.0;
  std::string strategy;
  double mean_signal_err = 0.0;
  double mean_beta_err = 0.0;
  int trials = 0;
  double effective_rate = 0.0;
};

struct SweepResult {
  std::string param;
  std::vector<double> values;
  std::vector<std::string> strategies;
  /// values.size() x strategies.size(), value-major.
  std::vector<SweepPoint> points;
  std::vector<TrialRecord> records;

  const SweepPoint& at(std::size_t value_index, std::size_t strategy_index) const;
  double failure_rate() const;
};

SweepResult run_sweep(const ExperimentConfig& cfg);

enum class ExportFormat { csv, keyvalue };

void export_results(const SweepResult& result, const std::filesystem::path& path,
                    ExportFormat format = ExportFormat::csv);
/// Reads the CSV written by export_results (means only, no trial records).
SweepResult import_results(const std::filesystem::path& path);
/// One row per (trial, strategy).
void export_trials(const SweepResult& result, const std::filesystem::path& path);

struct DoaRow {
  int trial = 0;
  int source = 0;
  double theta = 0.0;
  double theta_hat = 0.0;
  double error = 0.0;
};

struct DoaResult {
  int n = 0;
  int m = 0;
  std::vector<DoaRow> rows;
  int failures = 0;
};

DoaResult run_doa(const ExperimentConfig& cfg);
void export_doa(const DoaResult& result, const std::filesystem::path& path);

struct DoaComparison {
  VectorXd theta;
  VectorXd theta_hat;
  VectorXd grid;
  VectorXd spcs_magnitude;
  VectorXd std_grid;
  VectorXd std_magnitude;
};

/// One scene solved by the perturbed model on the n-point grid and by plain
/// BPDN on the n_std-point grid.
DoaComparison run_doa_compare(const ExperimentConfig& cfg);
void export_doa_compare(const DoaComparison& result, const std::filesystem::path& path);

/// Line chart of mean signal error against the swept value, one series per strategy.
void emit_plot(const SweepResult& result, const std::filesystem::path& path);
/// Histogram of theta errors on [-1/n, 1/n] (values outside are clipped into
/// the edge bins).
void emit_histogram(const DoaResult& result, const std::filesystem::path& path, int bins = 20);
/// Magnitude spectra of both estimators over the theta axis.
void emit_spectrum(const DoaComparison& result, const std::filesystem::path& path);

}  // namespace spcs

#endif  // SPCS_HARNESS_HPP_
