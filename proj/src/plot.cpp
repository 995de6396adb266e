#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "spcs/harness.hpp"
#include "spcs/matrix_io.hpp"

namespace spcs {

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 70, kRight = 150, kTop = 30, kBottom = 50;
const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

struct Axes {
  double x0, x1, y0, y1;

  double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
  double py(double y) const { return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom); }
};

std::string num(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

void header(std::ostream& os, const std::string& title) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << kWidth / 2 << "\" y=\"18\" text-anchor=\"middle\">" << title << "</text>\n";
}

void frame(std::ostream& os, const Axes& ax, const std::string& xlabel, const std::string& ylabel) {
  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << kWidth - kLeft - kRight
     << "\" height=\"" << kHeight - kTop - kBottom << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = ax.x0 + (ax.x1 - ax.x0) * i / 4.0;
    const double yv = ax.y0 + (ax.y1 - ax.y0) * i / 4.0;
    os << "<text x=\"" << ax.px(xv) << "\" y=\"" << kHeight - kBottom + 16
       << "\" text-anchor=\"middle\">" << num(xv) << "</text>\n";
    os << "<text x=\"" << kLeft - 6 << "\" y=\"" << ax.py(yv) + 4 << "\" text-anchor=\"end\">"
       << num(yv) << "</text>\n";
  }
  os << "<text x=\"" << (kLeft + kWidth - kRight) / 2 << "\" y=\"" << kHeight - 12
     << "\" text-anchor=\"middle\">" << xlabel << "</text>\n";
  os << "<text transform=\"translate(16," << (kTop + kHeight - kBottom) / 2
     << ") rotate(-90)\" text-anchor=\"middle\">" << ylabel << "</text>\n";
}

void legend(std::ostream& os, std::size_t i, const std::string& label) {
  const double y = kTop + 14 + 18 * static_cast<double>(i);
  const double x = kWidth - kRight + 12;
  os << "<line x1=\"" << x << "\" y1=\"" << y - 4 << "\" x2=\"" << x + 20 << "\" y2=\"" << y - 4
     << "\" stroke=\"" << kColors[i % 6] << "\" stroke-width=\"2\"/>\n"
     << "<text x=\"" << x + 26 << "\" y=\"" << y << "\">" << label << "</text>\n";
}

void finish(std::ofstream& os, const std::filesystem::path& path) {
  os << "</svg>\n";
  os.flush();
  if (!os) throw IoError("write to '" + path.string() + "' failed");
}

std::ofstream open_svg(const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  return os;
}

}  // namespace

void emit_plot(const SweepResult& result, const std::filesystem::path& path) {
  require(!result.points.empty() && !result.values.empty(), "emit_plot: empty result");
  Axes ax{*std::min_element(result.values.begin(), result.values.end()),
          *std::max_element(result.values.begin(), result.values.end()), 0.0, 0.0};
  if (ax.x1 == ax.x0) {
    ax.x0 -= 0.5;
    ax.x1 += 0.5;
  }
  for (const auto& p : result.points)
    if (std::isfinite(p.mean_signal_err)) ax.y1 = std::max(ax.y1, p.mean_signal_err);
  ax.y1 = ax.y1 > 0.0 ? 1.05 * ax.y1 : 1.0;
  auto os = open_svg(path);
  header(os, "mean signal recovery error");
  frame(os, ax, result.param, "mean ||x - x_o||");
  for (std::size_t s = 0; s < result.strategies.size(); ++s) {
    os << "<polyline fill=\"none\" stroke=\"" << kColors[s % 6] << "\" stroke-width=\"2\" points=\"";
    for (std::size_t v = 0; v < result.values.size(); ++v) {
      const auto& p = result.at(v, s);
      os << ax.px(p.value) << ',' << ax.py(p.mean_signal_err) << ' ';
    }
    os << "\"/>\n";
    for (std::size_t v = 0; v < result.values.size(); ++v) {
      const auto& p = result.at(v, s);
      os << "<circle cx=\"" << ax.px(p.value) << "\" cy=\"" << ax.py(p.mean_signal_err)
         << "\" r=\"3\" fill=\"" << kColors[s % 6] << "\"/>\n";
    }
    legend(os, s, result.strategies[s]);
  }
  finish(os, path);
}

void emit_histogram(const DoaResult& result, const std::filesystem::path& path, int bins) {
  require(!result.rows.empty(), "emit_histogram: empty result");
  require(bins > 0 && result.n > 0, "emit_histogram: need positive bins and grid size");
  const double half = 1.0 / result.n;
  std::vector<int> counts(static_cast<std::size_t>(bins), 0);
  for (const auto& r : result.rows) {
    const double u = (r.error + half) / (2.0 * half);
    const int b = std::clamp(static_cast<int>(std::floor(u * bins)), 0, bins - 1);
    ++counts[static_cast<std::size_t>(b)];
  }
  const int peak = *std::max_element(counts.begin(), counts.end());
  const Axes ax{-1.0, 1.0, 0.0, static_cast<double>(std::max(peak, 1))};
  auto os = open_svg(path);
  header(os, "theta estimation error");
  frame(os, ax, "error x n", "count");
  for (int b = 0; b < bins; ++b) {
    const double lo = -1.0 + 2.0 * b / bins;
    const double hi = lo + 2.0 / bins;
    const double top = ax.py(counts[static_cast<std::size_t>(b)]);
    os << "<rect x=\"" << ax.px(lo) << "\" y=\"" << top << "\" width=\"" << ax.px(hi) - ax.px(lo)
       << "\" height=\"" << ax.py(0.0) - top << "\" fill=\"" << kColors[0]
       << "\" stroke=\"white\"/>\n";
  }
  finish(os, path);
}

void emit_spectrum(const DoaComparison& result, const std::filesystem::path& path) {
  require(result.grid.size() > 0 && result.std_grid.size() > 0, "emit_spectrum: empty result");
  const double lo = std::min(result.theta.minCoeff(), result.theta_hat.minCoeff()) - 0.08;
  const double hi = std::max(result.theta.maxCoeff(), result.theta_hat.maxCoeff()) + 0.08;
  const double top = std::max({result.spcs_magnitude.maxCoeff(), result.std_magnitude.maxCoeff(), 1.0});
  const Axes ax{lo, hi, 0.0, 1.05 * top};
  auto os = open_svg(path);
  header(os, "recovered magnitude");
  frame(os, ax, "theta", "|x|");
  auto stems = [&](const VectorXd& at, const VectorXd& mag, std::size_t color, double shift) {
    for (Eigen::Index i = 0; i < at.size(); ++i) {
      if (at(i) < lo || at(i) > hi || mag(i) < 1e-3 * top) continue;
      os << "<line x1=\"" << ax.px(at(i)) + shift << "\" y1=\"" << ax.py(0.0) << "\" x2=\""
         << ax.px(at(i)) + shift << "\" y2=\"" << ax.py(mag(i)) << "\" stroke=\""
         << kColors[color] << "\" stroke-width=\"2\"/>\n";
    }
  };
  stems(result.grid, result.spcs_magnitude, 0, -1.5);
  stems(result.std_grid, result.std_magnitude, 1, 1.5);
  for (Eigen::Index i = 0; i < result.theta.size(); ++i)
    os << "<line x1=\"" << ax.px(result.theta(i)) << "\" y1=\"" << kTop << "\" x2=\""
       << ax.px(result.theta(i)) << "\" y2=\"" << ax.py(0.0)
       << "\" stroke=\"black\" stroke-dasharray=\"4 3\"/>\n";
  legend(os, 0, "perturbed grid");
  legend(os, 1, "standard grid");
  finish(os, path);
}

}  // namespace spcs
