#include "pressura/stats.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <stdexcept>

#include "pressura/isa.hpp"

namespace pressura {

std::string format_g6(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

std::string format_stats_csv(const std::vector<StatsRow>& rows) {
  std::string out(kStatsColumns);
  out.push_back('\n');
  const auto opt = [](const std::optional<double>& v) {
    return v ? format_g6(*v) : std::string();
  };
  for (const StatsRow& r : rows) {
    out += std::to_string(r.update);
    out += ',' + std::to_string(r.occupied);
    out += ',' + format_g6(r.mean_length);
    out += ',' + format_g6(r.mean_fitness);
    out += ',' + std::to_string(r.births);
    out += ',' + std::to_string(r.dominant_abundance);
    out += ',' + std::to_string(r.dominant_length);
    out += ',' + format_g6(r.dominant_fitness);
    out += ',' + opt(r.nu);
    out += ',' + opt(r.neutral_fidelity);
    out += ',' + opt(r.effective_fitness);
    out += ',' + opt(r.equilibrium_gap);
    out.push_back('\n');
  }
  return out;
}

std::optional<std::size_t> CsvTable::column_index(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  return std::nullopt;
}

std::vector<double> CsvTable::column_values(std::size_t index) const {
  std::vector<double> values;
  for (const auto& row : rows) {
    if (index < row.size() && row[index]) values.push_back(*row[index]);
  }
  return values;
}

namespace {

std::vector<std::string_view> split_line(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (start <= line.size()) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(comma == std::string_view::npos
                         ? line.substr(start)
                         : line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

}  // namespace

CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line = eol == std::string_view::npos ? text.substr(pos)
                                                          : text.substr(pos, eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (table.columns.empty()) {
      for (std::string_view field : split_line(line)) {
        table.columns.emplace_back(field);
      }
      continue;
    }
    const auto fields = split_line(line);
    if (fields.size() != table.columns.size()) {
      throw ParseError(line_no, "expected " + std::to_string(table.columns.size()) +
                                    " fields, found " + std::to_string(fields.size()));
    }
    std::vector<std::optional<double>> row;
    row.reserve(fields.size());
    for (std::string_view field : fields) {
      if (field.empty()) {
        row.push_back(std::nullopt);
        continue;
      }
      const std::string cell(field);
      char* end = nullptr;
      const double value = std::strtod(cell.c_str(), &end);
      if (end != cell.c_str() + cell.size()) {
        throw ParseError(line_no, "bad number \"" + cell + "\"");
      }
      row.push_back(value);
    }
    table.rows.push_back(std::move(row));
  }
  if (table.columns.empty()) throw ParseError(1, "missing CSV header");
  return table;
}

std::string format_csv(const CsvTable& table) {
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out.push_back(',');
    out += table.columns[i];
  }
  out.push_back('\n');
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out.push_back(',');
      if (row[i]) out += format_g6(*row[i]);
    }
    out.push_back('\n');
  }
  return out;
}

CsvTable aggregate_mean(const std::vector<CsvTable>& tables) {
  if (tables.empty()) throw std::invalid_argument("nothing to aggregate");
  for (const CsvTable& t : tables) {
    if (t.columns != tables.front().columns) {
      throw std::invalid_argument("aggregate inputs have mismatched columns");
    }
  }
  const std::size_t width = tables.front().columns.size();
  if (width == 0) throw std::invalid_argument("aggregate inputs have no columns");

  std::map<double, std::pair<std::vector<double>, std::vector<std::size_t>>> keyed;
  for (const CsvTable& t : tables) {
    for (const auto& row : t.rows) {
      if (row.empty() || !row[0]) continue;
      auto& [sums, counts] = keyed[*row[0]];
      if (sums.empty()) {
        sums.assign(width, 0.0);
        counts.assign(width, 0);
      }
      for (std::size_t i = 1; i < width; ++i) {
        if (row[i]) {
          sums[i] += *row[i];
          counts[i] += 1;
        }
      }
    }
  }

  CsvTable out;
  out.columns = tables.front().columns;
  for (const auto& [key, entry] : keyed) {
    std::vector<std::optional<double>> row(width);
    row[0] = key;
    for (std::size_t i = 1; i < width; ++i) {
      if (entry.second[i] > 0) {
        row[i] = entry.first[i] / static_cast<double>(entry.second[i]);
      }
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

}  // namespace pressura
