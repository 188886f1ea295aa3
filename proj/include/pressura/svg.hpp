#pragma once

#include <array>
#include <string>
#include <vector>

#include "pressura/stats.hpp"

namespace pressura {

struct Series {
  std::string label;
  std::vector<std::array<double, 2>> points;  // (x, y)
};

// Self-contained SVG line chart: linear axes with tick labels, one polyline
// per series, legend. Vertex coordinates are an affine image of the data.
std::string render_svg_chart(const std::vector<Series>& series,
                             const std::string& x_label,
                             const std::string& y_label);

// One series per (table, column) pair; x is each table's first column and
// rows with an empty cell are skipped. Labels carry the table name when
// more than one table is plotted.
std::string render_timeseries(const std::vector<CsvTable>& tables,
                              const std::vector<std::string>& table_names,
                              const std::vector<std::string>& columns);

}  // namespace pressura
