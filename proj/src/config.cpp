#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "spcs/harness.hpp"

namespace spcs {

namespace {

const std::set<std::string> kStrategies = {"oracle", "nominal", "tps", "aa", "pp", "relax"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const char* first = v.data();
  if (!v.empty() && v.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out))
    throw ConfigError("config: '" + key + "' expects a number, got '" + v + "'");
  return out;
}

template <typename Int>
Int to_int(const std::string& key, const std::string& v) {
  Int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError("config: '" + key + "' expects an integer, got '" + v + "'");
  return out;
}

// "a:b:step" (inclusive, rounded to the step) or a comma list.
std::vector<double> parse_values(const std::string& v) {
  if (v.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(v);
    std::string p;
    while (std::getline(ss, p, ':')) parts.push_back(trim(p));
    if (parts.size() != 3) throw ConfigError("config: range must be 'start:stop:step'");
    const double a = to_double("values", parts[0]);
    const double b = to_double("values", parts[1]);
    const double h = to_double("values", parts[2]);
    if (h <= 0.0 || b < a) throw ConfigError("config: range needs step > 0 and stop >= start");
    const auto count = static_cast<int>(std::floor((b - a) / h + 1e-9)) + 1;
    std::vector<double> out;
    for (int i = 0; i < count; ++i) out.push_back(std::round((a + i * h) * 1e12) / 1e12);
    return out;
  }
  std::vector<double> out;
  for (const auto& item : split_list(v)) out.push_back(to_double("values", item));
  return out;
}

std::vector<double> range(double a, double b, double h) {
  return parse_values(std::to_string(a) + ":" + std::to_string(b) + ":" + std::to_string(h));
}

}  // namespace

std::string to_string(SweepParam p) {
  switch (p) {
    case SweepParam::none: return "none";
    case SweepParam::epsilon: return "epsilon";
    case SweepParam::r: return "r";
    case SweepParam::m: return "m";
  }
  return "none";
}

std::string to_string(SignalType s) {
  switch (s) {
    case SignalType::spikes: return "spikes";
    case SignalType::positive: return "positive";
    case SignalType::compressible: return "compressible";
  }
  return "spikes";
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError("config: " + msg); };
  if (trials < 1) fail("trials must be at least 1");
  if (n < 1 || m < 1) fail("n and m must be positive");
  if (k < 0 || k > n) fail("k must lie in [0, n]");
  if (r < 0.0) fail("r must be nonnegative");
  if (epsilon < 0.0) fail("epsilon must be nonnegative");
  if (threads < 0) fail("threads must be nonnegative");
  if (aa.rel_change_tol <= 0.0 || aa.max_outer_iter < 1) fail("invalid alternating-solver options");
  if (failure_threshold < 0.0 || failure_threshold > 1.0) fail("failure_threshold must lie in [0, 1]");
  if (sweep == SweepParam::none && !values.empty()) fail("values given without a sweep parameter");
  if (sweep != SweepParam::none && values.empty()) fail("sweep '" + to_string(sweep) + "' has no values");
  for (double v : values) {
    if (v < 0.0) fail("sweep values must be nonnegative");
    if (sweep == SweepParam::m && (v < 1.0 || v != std::floor(v))) fail("m values must be positive integers");
  }
  for (const auto& s : strategies)
    if (!kStrategies.count(s)) fail("unknown strategy '" + s + "'");
  if (std::set<std::string>(strategies.begin(), strategies.end()).size() != strategies.size())
    fail("duplicate strategy");
  if (kind != ExperimentKind::cs) {
    if (m < 2) fail("doa needs m >= 2");
    if (n < 2 || n % 2 != 0) fail("doa grid size n must be even");
    if (n_std < 2 || n_std % 2 != 0) fail("n_std must be even");
    if (sweep != SweepParam::none) fail("doa experiments do not sweep");
  }
}

std::vector<double> ExperimentConfig::points() const {
  if (sweep == SweepParam::none) return {epsilon};
  return values;
}

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig c;
  c.name = name;
  const std::vector<std::string> four = {"oracle", "nominal", "tps", "aa"};
  if (name == "fig2" || name == "fig2-desk") {
    c.n = 200, c.m = 80, c.k = 10, c.r = 0.1;
    c.sweep = SweepParam::epsilon;
    c.strategies = four;
    c.trials = name == "fig2" ? 50 : 10;
    c.values = name == "fig2" ? range(0.05, 2.0, 0.05) : std::vector<double>{0.1, 0.5, 1.0, 1.5, 2.0};
  } else if (name == "fig3" || name == "fig3-desk") {
    c.n = 200, c.m = 80, c.k = 10, c.epsilon = 0.5;
    c.sweep = SweepParam::r;
    c.strategies = four;
    c.trials = name == "fig3" ? 50 : 10;
    c.values = name == "fig3" ? range(0.05, 1.0, 0.05) : std::vector<double>{0.1, 0.5, 1.0};
  } else if (name == "fig4" || name == "fig4-desk") {
    c.n = 200, c.k = 10, c.r = 0.1, c.epsilon = 0.2;
    c.sweep = SweepParam::m;
    c.strategies = four;
    c.trials = name == "fig4" ? 50 : 10;
    c.values = name == "fig4" ? range(30, 100, 5) : std::vector<double>{40, 55, 70, 85, 100};
  } else if (name == "fig5" || name == "fig5-desk") {
    c.n = 200, c.m = 50, c.k = 10, c.r = 0.1, c.epsilon = 0.0;
    c.signal = SignalType::positive;
    c.strategies = {"pp"};
    c.trials = name == "fig5" ? 20 : 5;
  } else if (name == "fig6" || name == "fig6-desk") {
    c.kind = ExperimentKind::doa;
    c.m = 30, c.n = 90, c.k = 2;
    c.strategies = {"aa"};
    c.trials = name == "fig6" ? 1000 : 100;
  } else if (name == "fig7") {
    c.kind = ExperimentKind::doa_compare;
    c.m = 30, c.n = 90, c.k = 2, c.n_std = 360;
    c.strategies = {"aa"};
    c.trials = 1;
  } else {
    throw ConfigError("config: unknown preset '" + name + "'");
  }
  return c;
}

std::vector<std::string> preset_names() {
  return {"fig2", "fig2-desk", "fig3", "fig3-desk", "fig4", "fig4-desk",
          "fig5", "fig5-desk", "fig6", "fig6-desk", "fig7"};
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  bool seen_other = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (val.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty value for '" + key + "'");
    if (key == "preset") {
      if (seen_other) throw ConfigError("config: 'preset' must precede every other key");
      c = preset(val);
      continue;
    }
    seen_other = true;
    if (key == "name") {
      c.name = val;
    } else if (key == "experiment") {
      if (val == "cs") c.kind = ExperimentKind::cs;
      else if (val == "doa") c.kind = ExperimentKind::doa;
      else if (val == "doa-compare") c.kind = ExperimentKind::doa_compare;
      else throw ConfigError("config: unknown experiment '" + val + "'");
    } else if (key == "n") {
      c.n = to_int<int>(key, val);
    } else if (key == "m") {
      c.m = to_int<int>(key, val);
    } else if (key == "k") {
      c.k = to_int<int>(key, val);
    } else if (key == "r") {
      c.r = to_double(key, val);
    } else if (key == "epsilon") {
      c.epsilon = to_double(key, val);
    } else if (key == "sweep") {
      if (val == "none") c.sweep = SweepParam::none;
      else if (val == "epsilon") c.sweep = SweepParam::epsilon;
      else if (val == "r") c.sweep = SweepParam::r;
      else if (val == "m") c.sweep = SweepParam::m;
      else throw ConfigError("config: unknown sweep parameter '" + val + "'");
    } else if (key == "values") {
      c.values = parse_values(val);
    } else if (key == "trials") {
      c.trials = to_int<int>(key, val);
    } else if (key == "seed") {
      c.master_seed = to_int<std::uint64_t>(key, val);
    } else if (key == "strategies") {
      c.strategies = split_list(val);
    } else if (key == "signal") {
      if (val == "spikes") c.signal = SignalType::spikes;
      else if (val == "positive") c.signal = SignalType::positive;
      else if (val == "compressible") c.signal = SignalType::compressible;
      else throw ConfigError("config: unknown signal kind '" + val + "'");
    } else if (key == "threads") {
      c.threads = to_int<int>(key, val);
    } else if (key == "max_outer_iter") {
      c.aa.max_outer_iter = to_int<int>(key, val);
    } else if (key == "rel_change_tol") {
      c.aa.rel_change_tol = to_double(key, val);
    } else if (key == "abs_tol") {
      c.aa.inner.abs_tol = to_double(key, val);
    } else if (key == "rel_tol") {
      c.aa.inner.rel_tol = to_double(key, val);
    } else if (key == "max_iter") {
      c.aa.inner.max_iter = to_int<int>(key, val);
    } else if (key == "failure_threshold") {
      c.failure_threshold = to_double(key, val);
    } else if (key == "n_std") {
      c.n_std = to_int<int>(key, val);
    } else {
      throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config '" + path.string() + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ConfigError& err) {
    throw ConfigError(path.string() + ": " + err.what());
  }
}

}  // namespace spcs
