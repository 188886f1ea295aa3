#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pressura {

// One sampled line of a run's time series.
struct StatsRow {
  std::uint64_t update = 0;
  std::size_t occupied = 0;
  double mean_length = 0.0;
  double mean_fitness = 0.0;
  std::uint64_t births = 0;
  std::size_t dominant_abundance = 0;
  std::size_t dominant_length = 0;
  double dominant_fitness = 0.0;  // test-CPU w0 of the dominant genotype
  std::optional<double> nu;       // set on neutrality measurements only
  std::optional<double> neutral_fidelity;
  std::optional<double> effective_fitness;
  std::optional<double> equilibrium_gap;
};

inline constexpr std::string_view kStatsColumns =
    "update,occupied,mean_length,mean_fitness,births,dominant_abundance,"
    "dominant_length,dominant_fitness,nu,neutral_fidelity,effective_fitness,"
    "equilibrium_gap";

// Doubles at 6 significant digits.
std::string format_g6(double value);

std::string format_stats_csv(const std::vector<StatsRow>& rows);

// A parsed CSV with numeric cells; empty fields become nullopt.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::optional<double>>> rows;

  std::optional<std::size_t> column_index(std::string_view name) const;
  // Values of one column with empty cells skipped.
  std::vector<double> column_values(std::size_t index) const;
};

CsvTable parse_csv(std::string_view text);
std::string format_csv(const CsvTable& table);

// Across-table mean per key (the first column). Tables must share the same
// header; a cell contributes when present, and a key row appears if any
// input has it.
CsvTable aggregate_mean(const std::vector<CsvTable>& tables);

}  // namespace pressura
