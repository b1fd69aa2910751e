#include "modelscale/harness/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>

namespace modelscale::harness {

namespace {

constexpr double kWidth = 760.0;
constexpr double kHeight = 460.0;
constexpr double kLeft = 84.0;
constexpr double kRight = 190.0;
constexpr double kTop = 44.0;
constexpr double kBottom = 62.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

struct Axis {
  double lo = 0.0, hi = 1.0;
  bool log = false;
  std::vector<double> ticks;

  double t(double v) const { return log ? std::log10(v) : v; }
};

double nice_step(double span) {
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double f = raw / mag;
  const double nice = f < 1.5 ? 1.0 : f < 3.0 ? 2.0 : f < 7.0 ? 5.0 : 10.0;
  return nice * mag;
}

Axis make_axis(double lo, double hi, bool log) {
  Axis a;
  a.log = log;
  if (log) {
    lo = std::log10(lo);
    hi = std::log10(hi);
  }
  if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
    const double pad = std::max(1e-3, 0.1 * std::abs(hi));
    lo -= pad;
    hi += pad;
  }
  if (log) {
    a.lo = std::floor(lo);
    a.hi = std::ceil(hi);
    if (a.hi == a.lo) a.hi += 1.0;
    const double stride = std::max(1.0, std::ceil((a.hi - a.lo) / 8.0));
    for (double e = a.lo; e <= a.hi + 1e-9; e += stride) a.ticks.push_back(std::pow(10.0, e));
    return a;
  }
  const double step = nice_step(hi - lo);
  a.lo = std::floor(lo / step) * step;
  a.hi = std::ceil(hi / step) * step;
  for (double v = a.lo; v <= a.hi + 0.5 * step; v += step) {
    a.ticks.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
  }
  return a;
}

}  // namespace

std::string render_plot(const CsvTable& table, const PlotSpec& spec) {
  if (spec.y_columns.empty()) throw PlotError("plot: no y column given");
  if (table.size() == 0) throw PlotError("plot: csv has no data rows");
  const int xc = table.column(spec.x_column);
  if (xc < 0) throw PlotError("plot: missing column '" + spec.x_column + "'");
  std::vector<int> ycs;
  for (const auto& y : spec.y_columns) {
    const int c = table.column(y);
    if (c < 0) throw PlotError("plot: missing column '" + y + "'");
    ycs.push_back(c);
  }
  int gc = -1;
  if (!spec.group_column.empty()) {
    gc = table.column(spec.group_column);
    if (gc < 0) throw PlotError("plot: missing column '" + spec.group_column + "'");
    if (ycs.size() != 1) throw PlotError("plot: grouping needs exactly one y column");
  }

  std::vector<Series> series;
  auto value = [&](std::size_t r, int c) {
    try {
      return table.number(r, c);
    } catch (const Error& e) {
      throw PlotError(std::string("plot: ") + e.what());
    }
  };
  if (gc >= 0) {
    std::map<std::string, std::size_t> index;
    for (std::size_t r = 0; r < table.size(); ++r) {
      const std::string& g = table.rows()[r][gc];
      auto [it, fresh] = index.emplace(g, series.size());
      if (fresh) series.push_back({spec.group_column + " " + g, {}});
      series[it->second].points.emplace_back(value(r, xc), value(r, ycs[0]));
    }
  } else {
    for (std::size_t i = 0; i < ycs.size(); ++i) {
      Series s{spec.y_columns[i], {}};
      for (std::size_t r = 0; r < table.size(); ++r) s.points.emplace_back(value(r, xc), value(r, ycs[i]));
      series.push_back(std::move(s));
    }
  }

  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
  double ylo = xlo, yhi = -xlo;
  auto usable = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!spec.log_x || x > 0.0) && (!spec.log_y || y > 0.0);
  };
  for (const auto& s : series) {
    for (auto [x, y] : s.points) {
      if (!usable(x, y)) continue;
      xlo = std::min(xlo, x);
      xhi = std::max(xhi, x);
      ylo = std::min(ylo, y);
      yhi = std::max(yhi, y);
    }
  }
  for (const auto& m : spec.markers) {
    if (!usable(m.x, m.y)) continue;
    xlo = std::min(xlo, m.x);
    xhi = std::max(xhi, m.x);
    ylo = std::min(ylo, m.y);
    yhi = std::max(yhi, m.y);
  }
  if (!std::isfinite(xlo) || !std::isfinite(ylo)) throw PlotError("plot: no finite data points");

  const Axis ax = make_axis(xlo, xhi, spec.log_x);
  const Axis ay = make_axis(ylo, yhi, spec.log_y);
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (ax.t(x) - ax.lo) / (ax.hi - ax.lo) * pw; };
  auto py = [&](double y) { return kTop + ph - (ay.t(y) - ay.lo) / (ay.hi - ay.lo) * ph; };

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + num(kWidth) +
         "\" height=\"" + num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) +
         "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
         "\" fill=\"white\"/>\n";
  if (!spec.title.empty()) {
    svg += "<text x=\"" + coord(kLeft + pw / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" +
           escape(spec.title) + "</text>\n";
  }

  // Grid and tick labels.
  for (double t : ax.ticks) {
    const double x = px(t);
    svg += "<line x1=\"" + coord(x) + "\" y1=\"" + coord(kTop) + "\" x2=\"" + coord(x) + "\" y2=\"" +
           coord(kTop + ph) + "\" stroke=\"#e0e0e0\"/>\n";
    svg += "<text x=\"" + coord(x) + "\" y=\"" + coord(kTop + ph + 18) +
           "\" text-anchor=\"middle\">" + num(t) + "</text>\n";
  }
  for (double t : ay.ticks) {
    const double y = py(t);
    svg += "<line x1=\"" + coord(kLeft) + "\" y1=\"" + coord(y) + "\" x2=\"" + coord(kLeft + pw) +
           "\" y2=\"" + coord(y) + "\" stroke=\"#e0e0e0\"/>\n";
    svg += "<text x=\"" + coord(kLeft - 8) + "\" y=\"" + coord(y + 4) + "\" text-anchor=\"end\">" +
           num(t) + "</text>\n";
  }
  svg += "<rect x=\"" + coord(kLeft) + "\" y=\"" + coord(kTop) + "\" width=\"" + coord(pw) +
         "\" height=\"" + coord(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";

  const std::string xl = spec.x_label.empty() ? spec.x_column : spec.x_label;
  std::string yl = spec.y_label;
  if (yl.empty()) {
    for (std::size_t i = 0; i < spec.y_columns.size(); ++i) yl += (i ? ", " : "") + spec.y_columns[i];
  }
  svg += "<text x=\"" + coord(kLeft + pw / 2) + "\" y=\"" + coord(kHeight - 16) +
         "\" text-anchor=\"middle\">" + escape(xl + (spec.log_x ? " (log)" : "")) + "</text>\n";
  svg += "<text x=\"20\" y=\"" + coord(kTop + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 20 " +
         coord(kTop + ph / 2) + ")\">" + escape(yl + (spec.log_y ? " (log)" : "")) + "</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kPalette[i % (sizeof kPalette / sizeof kPalette[0])];
    auto pts = series[i].points;
    std::stable_sort(pts.begin(), pts.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    std::string d;
    bool pen = false;
    for (auto [x, y] : pts) {
      if (!usable(x, y)) {
        pen = false;
        continue;
      }
      if (!pen) {
        d += "M" + coord(px(x)) + " " + coord(py(y));
        pen = true;
      } else if (spec.step) {
        d += " H" + coord(px(x)) + " V" + coord(py(y));
      } else {
        d += " L" + coord(px(x)) + " " + coord(py(y));
      }
    }
    if (!d.empty()) {
      svg += "<path d=\"" + d + "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.8\"/>\n";
    }
    if (pts.size() <= 24) {
      for (auto [x, y] : pts) {
        if (!usable(x, y)) continue;
        svg += "<circle cx=\"" + coord(px(x)) + "\" cy=\"" + coord(py(y)) + "\" r=\"2.5\" fill=\"" +
               color + "\"/>\n";
      }
    }
    const double ly = kTop + 12 + 20.0 * static_cast<double>(i);
    const double lx = kLeft + pw + 14;
    svg += "<line x1=\"" + coord(lx) + "\" y1=\"" + coord(ly) + "\" x2=\"" + coord(lx + 22) + "\" y2=\"" +
           coord(ly) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + coord(lx + 28) + "\" y=\"" + coord(ly + 4) + "\">" + escape(series[i].name) +
           "</text>\n";
  }

  for (const auto& m : spec.markers) {
    if (!usable(m.x, m.y)) continue;
    svg += "<circle cx=\"" + coord(px(m.x)) + "\" cy=\"" + coord(py(m.y)) +
           "\" r=\"5\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
    if (!m.label.empty()) {
      svg += "<text x=\"" + coord(px(m.x) + 8) + "\" y=\"" + coord(py(m.y) - 8) + "\">" + escape(m.label) +
             "</text>\n";
    }
  }
  svg += "</svg>\n";
  return svg;
}

void emit_plot(const std::filesystem::path& csv_path, const PlotSpec& spec,
               const std::filesystem::path& svg_path) {
  CsvTable table;
  try {
    table = read_csv(csv_path);
  } catch (const PlotError&) {
    throw;
  } catch (const Error& e) {
    throw PlotError(std::string("plot: ") + e.what());
  }
  const std::string svg = render_plot(table, spec);
  std::ofstream out(svg_path, std::ios::binary);
  if (!out) throw PlotError("plot: cannot write " + svg_path.string());
  out << svg;
}

}  // namespace modelscale::harness
