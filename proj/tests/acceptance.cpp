// Acceptance suite: exercises the delivered behaviors end to end and prints
// one PASS/FAIL line per criterion. Exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracle_vm.hpp"
#include "pressura/analysis.hpp"
#include "pressura/ancestor.hpp"
#include "pressura/environment.hpp"
#include "pressura/experiment.hpp"
#include "pressura/stats.hpp"

using namespace pressura;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Criterion {
  int number;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

std::vector<Criterion> g_results;

template <typename Fn>
void run_criterion(int number, const std::string& name, Fn&& body) {
  Criterion c{number, name};
  const auto start = Clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.pass = false;
    c.detail = std::string("exception: ") + e.what();
  }
  c.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  std::printf("[%s] criterion %d (%s): %s (%.1f s)\n", c.pass ? "PASS" : "FAIL",
              c.number, c.name.c_str(), c.detail.c_str(), c.seconds);
  std::fflush(stdout);
  g_results.push_back(std::move(c));
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::runtime_error("median of nothing");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double last_value(const CsvTable& table, const std::string& column) {
  const auto ci = table.column_index(column);
  if (!ci) throw std::runtime_error("missing column " + column);
  for (auto it = table.rows.rbegin(); it != table.rows.rend(); ++it) {
    if ((*ci) < it->size() && (*it)[*ci]) return *(*it)[*ci];
  }
  throw std::runtime_error("column " + column + " has no values");
}

// Mean of a column over rows with update > threshold.
double tail_mean(const CsvTable& table, const std::string& column, double after) {
  const auto ci = table.column_index(column);
  if (!ci) throw std::runtime_error("missing column " + column);
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& row : table.rows) {
    if (!row[0] || *row[0] <= after) continue;
    if ((*ci) < row.size() && row[*ci]) {
      sum += *row[*ci];
      ++n;
    }
  }
  if (n == 0) throw std::runtime_error("no tail values for " + column);
  return sum / static_cast<double>(n);
}

std::vector<double> tail_abs_values(const CsvTable& table, const std::string& column,
                                    double after) {
  const auto ci = table.column_index(column);
  if (!ci) throw std::runtime_error("missing column " + column);
  std::vector<double> out;
  for (const auto& row : table.rows) {
    if (!row[0] || *row[0] <= after) continue;
    if ((*ci) < row.size() && row[*ci]) out.push_back(std::abs(*row[*ci]));
  }
  return out;
}

const char* kOutRoot = "acceptance_out";

ExperimentConfig batch_config(const std::string& preset, const std::string& out_name,
                              std::uint64_t seed) {
  ExperimentConfig cfg = preset_config(preset);
  cfg.seed = seed;
  cfg.out_dir = (fs::path(kOutRoot) / out_name).string();
  return cfg;
}

std::string g6(double v) { return format_g6(v); }

}  // namespace

int main() {
  fs::remove_all(kOutRoot);
  fs::create_directories(kOutRoot);

  const TaskChecker simple_checker{build_environment(Complexity::kSimple)};

  // ---------------------------------------------------------------- 1
  run_criterion(1, "self-replication", [&](Criterion& c) {
    const Genome ancestor = reference_ancestor();
    const FitnessResult r = test_fitness(ancestor, simple_checker);
    const bool ok = ancestor.length() == 20 && r.viable && r.child_identical &&
                    r.gestation <= 2000;
    c.pass = ok;
    c.detail = "length=" + std::to_string(ancestor.length()) +
               " viable=" + (r.viable ? "true" : "false") +
               " child_identical=" + (r.child_identical ? "true" : "false") +
               " gestation=" + std::to_string(r.gestation);
  });
  if (!g_results.back().pass || g_results.back().seconds >= 1.0) {
    g_results.back().pass = false;
  }

  // ---------------------------------------------------------------- 2
  run_criterion(2, "task enumeration", [&](Criterion& c) {
    const auto tasks = enumerate_logic_tasks();
    const int burnside = (256 + 3 * 64 + 2 * 16) / 6 - 2;
    const TaskTable medium = build_environment(Complexity::kMedium);
    const TaskTable complex = build_environment(Complexity::kComplex);
    std::set<TruthTable> complex_tables;
    for (const auto& t : complex.tasks) complex_tables.insert(t.truth_table);
    bool inclusion = medium.size() == 10;
    for (const auto& t : medium.tasks) inclusion &= complex_tables.count(t.truth_table) == 1;
    c.pass = tasks.size() == 78 && burnside == 78 && complex.size() == 78 && inclusion;
    c.detail = "enumerated=" + std::to_string(tasks.size()) +
               " burnside=" + std::to_string(burnside) +
               " medium_subset=" + (inclusion ? "true" : "false");
  });
  if (g_results.back().seconds >= 1.0) g_results.back().pass = false;

  // ---------------------------------------------------------------- 3
  run_criterion(3, "formula suite", [&](Criterion& c) {
    double worst_rel = 0.0;
    double worst_gap = 0.0;
    bool ordering = true;
    int points = 0;
    for (int ri = 0; ri < 10; ++ri) {
      for (int li = 0; li < 10; ++li) {
        for (int ni = 0; ni < 10; ++ni) {
          const double rate = 0.015 * ri / 9.0;
          const std::size_t length =
              1 + static_cast<std::size_t>(199.0 * li / 9.0 + 0.5);
          const double nu = ni / 9.0;
          ++points;

          const double f_nu = neutral_fidelity(rate, nu, length);
          const long double ref = expl(static_cast<long double>(length) *
                                       logl(1.0L - static_cast<long double>(rate) *
                                                       (1.0L - static_cast<long double>(nu))));
          const double denom = std::max(1e-300, std::abs(static_cast<double>(ref)));
          worst_rel = std::max(worst_rel,
                               std::abs(f_nu - static_cast<double>(ref)) / denom);

          const double w = 0.5;
          const double w_nu = effective_fitness(w, f_nu);
          const long double w_ref = static_cast<long double>(w) * ref;
          worst_rel = std::max(
              worst_rel, std::abs(w_nu - static_cast<double>(w_ref)) /
                             std::max(1e-300, std::abs(static_cast<double>(w_ref))));

          const auto [exact, approx] = mutational_load(rate, length, nu);
          const long double exact_ref = 1.0L - ref;
          const double scale = std::max(1.0, std::abs(static_cast<double>(exact_ref)));
          worst_rel = std::max(
              worst_rel, std::abs(exact - static_cast<double>(exact_ref)) / scale);
          worst_gap = std::max(worst_gap, std::abs(exact - approx));

          const double fidelity = std::pow(1.0 - rate, static_cast<double>(length));
          ordering &= fidelity <= f_nu + 1e-15 && f_nu <= 1.0 + 1e-15;
        }
      }
    }
    c.pass = points == 1000 && worst_rel <= 1e-12 && ordering && worst_gap <= 0.01;
    c.detail = "points=" + std::to_string(points) + " worst_rel=" + g6(worst_rel) +
               " worst_eq4_eq5_gap=" + g6(worst_gap) +
               " ordering=" + (ordering ? "true" : "false");
  });

  // ---------------------------------------------------------------- 4
  run_criterion(4, "neutrality oracle", [&](Criterion& c) {
    const TaskChecker complex_checker{build_environment(Complexity::kComplex)};
    Rng rng(424242);

    // Viable wild-types: random substitutions on (possibly stretched)
    // reference ancestors, kept when still viable.
    std::vector<Genome> subjects;
    std::set<std::string> seen;
    while (subjects.size() < 20) {
      const std::size_t len = 15 + rng.below(16);  // 15..30
      std::vector<Instruction> code = reference_ancestor(len).code();
      const int edits = 1 + static_cast<int>(rng.below(3));
      for (int e = 0; e < edits; ++e) {
        code[rng.below(static_cast<std::uint32_t>(code.size()))] =
            instruction_from_code(static_cast<std::uint8_t>(rng.below(26)));
      }
      Genome candidate(code);
      if (!test_fitness(candidate, complex_checker).viable) continue;
      if (!seen.insert(serialize_genome(candidate)).second) continue;
      subjects.push_back(std::move(candidate));
    }

    std::size_t mismatches = 0;
    std::size_t mutants_checked = 0;
    for (const Genome& wild : subjects) {
      const NeutralitySpectrum mine = classify_mutations(wild, complex_checker, 3600);

      std::vector<int> codes;
      for (Instruction inst : wild) codes.push_back(code_of(inst));
      const oracle::RunResult base = oracle::run_genome(codes);
      if (!base.viable) {
        ++mismatches;
        continue;
      }
      // Mutant-for-mutant comparison, same enumeration order.
      std::size_t del = 0, neu = 0, ben = 0;
      std::size_t index = 0;
      const auto mutants = one_point_mutants(wild);
      for (std::size_t pos = 0; pos < codes.size(); ++pos) {
        const int original = codes[pos];
        for (int code = 0; code < 26; ++code) {
          if (code == original) continue;
          codes[pos] = code;
          const oracle::RunResult m = oracle::run_genome(codes);
          const int cls = oracle::classify_one(m.w, m.viable, base.w, 3600);
          del += cls == 0;
          neu += cls == 1;
          ben += cls == 2;

          const FitnessResult mine_one =
              test_fitness(mutants[index], complex_checker);
          const int my_cls =
              !mine_one.viable
                  ? 0
                  : (std::abs(mine_one.w - base.w) < base.w / 3600.0
                         ? 1
                         : (mine_one.w >= base.w + base.w / 3600.0 ? 2 : 0));
          if (my_cls != cls) ++mismatches;
          ++mutants_checked;
          ++index;
        }
        codes[pos] = original;
      }
      if (del != mine.n_deleterious || neu != mine.n_neutral ||
          ben != mine.n_beneficial) {
        ++mismatches;
      }
    }
    c.pass = mismatches == 0;
    c.detail = "genomes=20 mutants=" + std::to_string(mutants_checked) +
               " mismatches=" + std::to_string(mismatches);
  });
  if (g_results.back().seconds >= 120.0) g_results.back().pass = false;

  // ---------------------------------------------------------------- 6 runs
  // first: its set-iv batch also supplies the evolved ancestor for 5.
  std::string set_iv_dominant_path;
  run_criterion(6, "transmission trend", [&](Criterion& c) {
    std::vector<double> fit_ii, fit_iii, fit_iv, len_ii, len_iv;
    const char* presets[3] = {"set-ii", "set-iii", "set-iv"};
    for (const char* preset : presets) {
      const ExperimentConfig cfg = batch_config(preset, preset, 2025);
      const BatchResult batch = run_batch(cfg, 1);
      for (const auto& rep : batch.replicates) {
        if (!rep.ok) throw std::runtime_error(std::string(preset) + " replicate failed: " + rep.error);
        const CsvTable stats = parse_csv(slurp(rep.artifacts.stats_path));
        const double fitness = last_value(stats, "mean_fitness");
        const double length = last_value(stats, "mean_length");
        if (preset == std::string("set-ii")) {
          fit_ii.push_back(fitness);
          len_ii.push_back(length);
        } else if (preset == std::string("set-iii")) {
          fit_iii.push_back(fitness);
        } else {
          fit_iv.push_back(fitness);
          len_iv.push_back(length);
        }
      }
    }
    set_iv_dominant_path =
        (fs::path(kOutRoot) / "set-iv" / "rep0" / "dominant.org").string();
    const double f2 = median(fit_ii), f3 = median(fit_iii), f4 = median(fit_iv);
    const double l2 = median(len_ii), l4 = median(len_iv);
    c.pass = f4 > f3 && f3 > f2 && l4 > l2;
    c.detail = "median_fitness ii=" + g6(f2) + " iii=" + g6(f3) + " iv=" + g6(f4) +
               "; median_length ii=" + g6(l2) + " iv=" + g6(l4);
  });

  // ---------------------------------------------------------------- 5
  run_criterion(5, "compression trend", [&](Criterion& c) {
    if (set_iv_dominant_path.empty() || !fs::exists(set_iv_dominant_path)) {
      throw std::runtime_error("set-iv dominant genome unavailable");
    }
    const Genome evolved = parse_genome(slurp(set_iv_dominant_path));
    const FitnessResult evolved_fit = test_fitness(evolved, simple_checker);
    if (!evolved_fit.viable) throw std::runtime_error("evolved ancestor non-viable");

    ExperimentConfig cfg = batch_config("set-i", "set-i", 2025);
    cfg.ancestor_path = set_iv_dominant_path;
    cfg.updates = 5000;
    const BatchResult batch = run_batch(cfg, 1);

    std::vector<double> final_lengths, final_gestations;
    for (const auto& rep : batch.replicates) {
      if (!rep.ok) throw std::runtime_error("set-i replicate failed: " + rep.error);
      const CsvTable stats = parse_csv(slurp(rep.artifacts.stats_path));
      final_lengths.push_back(last_value(stats, "mean_length"));
      const Genome dominant = parse_genome(slurp(rep.artifacts.dominant_path));
      const FitnessResult fr = test_fitness(dominant, simple_checker);
      if (!fr.viable) throw std::runtime_error("final dominant non-viable");
      final_gestations.push_back(static_cast<double>(fr.gestation));
    }
    const double len_median = median(final_lengths);
    const double gest_median = median(final_gestations);
    const double initial_length = static_cast<double>(evolved.length());
    const double initial_gestation = static_cast<double>(evolved_fit.gestation);
    c.pass = len_median <= 0.75 * initial_length && gest_median < initial_gestation;
    c.detail = "initial_length=" + g6(initial_length) +
               " median_final_mean_length=" + g6(len_median) +
               "; initial_gestation=" + g6(initial_gestation) +
               " median_final_gestation=" + g6(gest_median);
  });

  // ---------------------------------------------------------------- 7
  std::string set_vi_rep0_stats;
  run_criterion(7, "neutrality trend", [&](Criterion& c) {
    std::vector<double> nu_v, nu_vi, nu_vii;
    for (const char* preset : {"set-v", "set-vi", "set-vii"}) {
      const ExperimentConfig cfg = batch_config(preset, preset, 2025);
      const BatchResult batch = run_batch(cfg, 1);
      for (const auto& rep : batch.replicates) {
        if (!rep.ok) throw std::runtime_error(std::string(preset) + " replicate failed: " + rep.error);
        const CsvTable stats = parse_csv(slurp(rep.artifacts.stats_path));
        const double nu_tail =
            tail_mean(stats, "nu", static_cast<double>(cfg.updates) / 2.0);
        if (preset == std::string("set-v")) nu_v.push_back(nu_tail);
        else if (preset == std::string("set-vi")) nu_vi.push_back(nu_tail);
        else nu_vii.push_back(nu_tail);
      }
    }
    set_vi_rep0_stats = (fs::path(kOutRoot) / "set-vi" / "rep0" / "stats.csv").string();
    const double m5 = median(nu_v), m6 = median(nu_vi), m7 = median(nu_vii);
    c.pass = m7 > m6 && m6 > m5;
    c.detail = "median_tail_nu v=" + g6(m5) + " vi=" + g6(m6) + " vii=" + g6(m7);
  });

  // ---------------------------------------------------------------- 8
  run_criterion(8, "equilibrium check", [&](Criterion& c) {
    if (set_vi_rep0_stats.empty() || !fs::exists(set_vi_rep0_stats)) {
      throw std::runtime_error("set-vi stats unavailable");
    }
    const CsvTable stats = parse_csv(slurp(set_vi_rep0_stats));
    const std::vector<double> gaps =
        tail_abs_values(stats, "equilibrium_gap", 5000.0);
    if (gaps.empty()) throw std::runtime_error("no equilibrium measurements after update 5000");
    const double med = median(gaps);
    c.pass = med <= 0.05;
    c.detail = "measurements=" + std::to_string(gaps.size()) +
               " median_abs_gap=" + g6(med);
  });

  // ---------------------------------------------------------------- 9
  run_criterion(9, "determinism", [&](Criterion& c) {
    ExperimentConfig serial_cfg = batch_config("set-iii", "det_serial", 7);
    ExperimentConfig parallel_cfg = batch_config("set-iii", "det_parallel", 7);
    const BatchResult serial = run_batch(serial_cfg, 1);
    const BatchResult parallel = run_batch(parallel_cfg, 2);
    bool identical = serial.replicates.size() == parallel.replicates.size();
    for (std::size_t r = 0; identical && r < serial.replicates.size(); ++r) {
      identical &= serial.replicates[r].ok && parallel.replicates[r].ok;
      if (!identical) break;
      identical &= slurp(serial.replicates[r].artifacts.stats_path) ==
                   slurp(parallel.replicates[r].artifacts.stats_path);
      identical &= slurp(serial.replicates[r].artifacts.snapshot_path) ==
                   slurp(parallel.replicates[r].artifacts.snapshot_path);
    }
    identical &= slurp(serial.aggregate_path) == slurp(parallel.aggregate_path);
    c.pass = identical;
    c.detail = identical ? "serial and parallel trees byte-identical"
                         : "output trees differ";
  });

  // Summary, in criterion order.
  std::sort(g_results.begin(), g_results.end(),
            [](const Criterion& a, const Criterion& b) { return a.number < b.number; });
  std::printf("\n=== acceptance summary ===\n");
  int failures = 0;
  for (const Criterion& c : g_results) {
    std::printf("[%s] %d %s\n", c.pass ? "PASS" : "FAIL", c.number, c.name.c_str());
    failures += c.pass ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(g_results.size()) - failures,
              g_results.size());
  return failures;
}
