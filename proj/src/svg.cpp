#include "pressura/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace pressura {

namespace {

constexpr double kWidth = 900.0;
constexpr double kHeight = 560.0;
constexpr double kMarginLeft = 80.0;
constexpr double kMarginRight = 30.0;
constexpr double kMarginTop = 30.0;
constexpr double kMarginBottom = 60.0;

constexpr const char* kPalette[] = {
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
    "#8c564b", "#17becf", "#7f7f7f", "#bcbd22", "#e377c2",
};

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string px(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace

std::string render_svg_chart(const std::vector<Series>& series,
                             const std::string& x_label,
                             const std::string& y_label) {
  bool any_points = false;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const Series& s : series) {
    for (const auto& p : s.points) {
      any_points = true;
      xmin = std::min(xmin, p[0]);
      xmax = std::max(xmax, p[0]);
      ymin = std::min(ymin, p[1]);
      ymax = std::max(ymax, p[1]);
    }
  }
  if (!any_points) throw std::invalid_argument("no data points to plot");
  if (xmin == xmax) {
    xmin -= 1.0;
    xmax += 1.0;
  }
  if (ymin == ymax) {
    ymin -= 1.0;
    ymax += 1.0;
  }

  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  const auto to_x = [&](double v) {
    return kMarginLeft + (v - xmin) / (xmax - xmin) * plot_w;
  };
  const auto to_y = [&](double v) {
    return kMarginTop + (1.0 - (v - ymin) / (ymax - ymin)) * plot_h;
  };

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + px(kWidth) +
         "\" height=\"" + px(kHeight) + "\" viewBox=\"0 0 " + px(kWidth) + " " +
         px(kHeight) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // Grid and tick labels.
  constexpr int kTicks = 5;
  svg += "<g stroke=\"#cccccc\" stroke-width=\"1\">\n";
  for (int i = 0; i <= kTicks; ++i) {
    const double fx = xmin + (xmax - xmin) * i / kTicks;
    const double fy = ymin + (ymax - ymin) * i / kTicks;
    svg += "<line x1=\"" + px(to_x(fx)) + "\" y1=\"" + px(kMarginTop) + "\" x2=\"" +
           px(to_x(fx)) + "\" y2=\"" + px(kMarginTop + plot_h) + "\"/>\n";
    svg += "<line x1=\"" + px(kMarginLeft) + "\" y1=\"" + px(to_y(fy)) + "\" x2=\"" +
           px(kMarginLeft + plot_w) + "\" y2=\"" + px(to_y(fy)) + "\"/>\n";
  }
  svg += "</g>\n";
  svg += "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#333333\">\n";
  for (int i = 0; i <= kTicks; ++i) {
    const double fx = xmin + (xmax - xmin) * i / kTicks;
    const double fy = ymin + (ymax - ymin) * i / kTicks;
    svg += "<text x=\"" + px(to_x(fx)) + "\" y=\"" + px(kMarginTop + plot_h + 18) +
           "\" text-anchor=\"middle\">" + num(fx) + "</text>\n";
    svg += "<text x=\"" + px(kMarginLeft - 8) + "\" y=\"" + px(to_y(fy) + 4) +
           "\" text-anchor=\"end\">" + num(fy) + "</text>\n";
  }
  svg += "<text x=\"" + px(kMarginLeft + plot_w / 2) + "\" y=\"" +
         px(kHeight - 14) + "\" text-anchor=\"middle\">" + escape_xml(x_label) +
         "</text>\n";
  svg += "<text x=\"18\" y=\"" + px(kMarginTop + plot_h / 2) +
         "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
         px(kMarginTop + plot_h / 2) + ")\">" + escape_xml(y_label) + "</text>\n";
  svg += "</g>\n";

  // Axes.
  svg += "<g stroke=\"#000000\" stroke-width=\"1.5\" fill=\"none\">\n";
  svg += "<line x1=\"" + px(kMarginLeft) + "\" y1=\"" + px(kMarginTop) + "\" x2=\"" +
         px(kMarginLeft) + "\" y2=\"" + px(kMarginTop + plot_h) + "\"/>\n";
  svg += "<line x1=\"" + px(kMarginLeft) + "\" y1=\"" + px(kMarginTop + plot_h) +
         "\" x2=\"" + px(kMarginLeft + plot_w) + "\" y2=\"" + px(kMarginTop + plot_h) +
         "\"/>\n";
  svg += "</g>\n";

  // Data polylines.
  for (std::size_t si = 0; si < series.size(); ++si) {
    if (series[si].points.empty()) continue;
    const char* color = kPalette[si % (sizeof kPalette / sizeof kPalette[0])];
    svg += "<polyline fill=\"none\" stroke=\"";
    svg += color;
    svg += "\" stroke-width=\"1.8\" points=\"";
    for (const auto& p : series[si].points) {
      svg += px(to_x(p[0])) + "," + px(to_y(p[1])) + " ";
    }
    svg += "\"/>\n";
  }

  // Legend.
  svg += "<g font-family=\"sans-serif\" font-size=\"12\">\n";
  double ly = kMarginTop + 14;
  for (std::size_t si = 0; si < series.size(); ++si) {
    const char* color = kPalette[si % (sizeof kPalette / sizeof kPalette[0])];
    const double lx = kMarginLeft + plot_w - 180;
    svg += "<line x1=\"" + px(lx) + "\" y1=\"" + px(ly - 4) + "\" x2=\"" +
           px(lx + 24) + "\" y2=\"" + px(ly - 4) + "\" stroke=\"";
    svg += color;
    svg += "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + px(lx + 30) + "\" y=\"" + px(ly) + "\">" +
           escape_xml(series[si].label) + "</text>\n";
    ly += 18;
  }
  svg += "</g>\n</svg>\n";
  return svg;
}

std::string render_timeseries(const std::vector<CsvTable>& tables,
                              const std::vector<std::string>& table_names,
                              const std::vector<std::string>& columns) {
  if (tables.empty()) throw std::invalid_argument("no input tables");
  if (columns.empty()) throw std::invalid_argument("no columns requested");
  std::vector<Series> series;
  for (std::size_t ti = 0; ti < tables.size(); ++ti) {
    const CsvTable& table = tables[ti];
    for (const std::string& column : columns) {
      const auto ci = table.column_index(column);
      if (!ci) throw std::invalid_argument("unknown column \"" + column + "\"");
      Series s;
      s.label = tables.size() > 1 && ti < table_names.size()
                    ? table_names[ti] + ":" + column
                    : column;
      for (const auto& row : table.rows) {
        if (!row.empty() && row[0] && (*ci < row.size()) && row[*ci]) {
          s.points.push_back({*row[0], *row[*ci]});
        }
      }
      series.push_back(std::move(s));
    }
  }
  const std::string x_label = tables.front().columns.empty()
                                  ? std::string("x")
                                  : tables.front().columns.front();
  const std::string y_label =
      columns.size() == 1 ? columns.front() : std::string("value");
  return render_svg_chart(series, x_label, y_label);
}

}  // namespace pressura
