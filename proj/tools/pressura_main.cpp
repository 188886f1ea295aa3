#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pressura/analysis.hpp"
#include "pressura/ancestor.hpp"
#include "pressura/experiment.hpp"
#include "pressura/stats.hpp"
#include "pressura/svg.hpp"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitExtinct = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

pressura::Complexity complexity_from_name(const std::string& name) {
  if (name == "simple") return pressura::Complexity::kSimple;
  if (name == "medium") return pressura::Complexity::kMedium;
  if (name == "complex") return pressura::Complexity::kComplex;
  throw std::runtime_error("unknown complexity \"" + name + "\"");
}

int cmd_run(const std::string& target, std::uint64_t seed, bool seed_set,
            const std::string& out_dir, std::size_t replicates,
            std::uint64_t updates, std::size_t capacity, std::size_t jobs) {
  pressura::ExperimentConfig cfg;
  if (std::filesystem::is_regular_file(target)) {
    cfg = pressura::load_config(read_file(target));
  } else if (pressura::is_preset_name(target)) {
    cfg = pressura::preset_config(target);
  } else {
    throw std::runtime_error("\"" + target + "\" is neither a preset nor a config file");
  }
  if (seed_set) cfg.seed = seed;
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  if (replicates != 0) cfg.replicates = replicates;
  if (updates != 0) cfg.updates = updates;
  if (capacity != 0) cfg.capacity = capacity;
  cfg.validate();

  const pressura::BatchResult result = pressura::run_batch(cfg, jobs);
  for (const auto& rep : result.replicates) {
    std::cout << "rep" << rep.index << ": "
              << (rep.ok ? (rep.artifacts.extinct ? "extinct" : "ok")
                         : "failed: " + rep.error)
              << "\n";
  }
  if (!result.aggregate_path.empty()) {
    std::cout << "aggregate: " << result.aggregate_path << "\n";
  }
  if (result.all_ok) return 0;
  return result.any_extinct ? kExitExtinct : kExitFailure;
}

int cmd_analyze(const std::string& genome_path, const std::string& env_name,
                std::size_t popsize, double rate, const std::string& out_path) {
  const pressura::Genome genome = pressura::parse_genome(read_file(genome_path));
  const pressura::TaskTable table =
      pressura::build_environment(complexity_from_name(env_name));
  const pressura::TaskChecker checker(table);
  const pressura::FitnessResult fitness = pressura::test_fitness(genome, checker);
  if (!fitness.viable) {
    throw std::runtime_error(genome_path + " is non-viable; neutrality undefined");
  }
  const pressura::NeutralitySpectrum spectrum =
      pressura::classify_mutations(genome, checker, popsize);
  const pressura::GenotypeStats stats =
      pressura::make_genotype_stats(genome.length(), fitness.w, spectrum.nu, rate);
  const std::string report = pressura::format_neutrality_report(
      genome_path, stats, spectrum, rate, popsize);
  if (out_path.empty()) {
    std::cout << report;
  } else {
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    out << report;
  }
  return 0;
}

int cmd_ancestor(std::size_t length) {
  std::cout << pressura::serialize_genome(pressura::reference_ancestor(length));
  return 0;
}

int cmd_tasks(const std::string& complexity) {
  const pressura::TaskTable table =
      pressura::build_environment(complexity_from_name(complexity));
  char hex[8];
  for (const auto& task : table.tasks) {
    std::snprintf(hex, sizeof hex, "%02x", task.truth_table);
    std::cout << task.id << ' ' << task.arity << ' ' << hex << ' '
              << pressura::format_g6(task.bonus_factor) << "\n";
  }
  return 0;
}

int cmd_plot(const std::vector<std::string>& files, const std::string& columns_arg,
             const std::string& out_path) {
  std::vector<std::string> columns;
  std::stringstream ss(columns_arg);
  std::string col;
  while (std::getline(ss, col, ',')) {
    if (!col.empty()) columns.push_back(col);
  }
  if (columns.empty()) throw std::runtime_error("--columns must name at least one column");

  std::vector<pressura::CsvTable> tables;
  std::vector<std::string> names;
  for (const std::string& file : files) {
    tables.push_back(pressura::parse_csv(read_file(file)));
    names.push_back(std::filesystem::path(file).stem().string());
  }
  const std::string svg = pressura::render_timeseries(tables, names, columns);
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  out << svg;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pressura: digital evolution experiments and genome analysis"};
  app.require_subcommand(1);

  // run
  std::string run_target;
  std::uint64_t run_seed = 0;
  std::string run_out;
  std::size_t run_replicates = 0;
  std::uint64_t run_updates = 0;
  std::size_t run_capacity = 0;
  std::size_t run_jobs = 0;
  auto* run = app.add_subcommand("run", "run an experiment preset or config file");
  run->add_option("target", run_target, "preset name (set-i .. set-vii) or config file")
      ->required();
  auto* seed_opt = run->add_option("--seed", run_seed, "master seed");
  run->add_option("--out", run_out, "output directory");
  run->add_option("--replicates", run_replicates, "replicate count");
  run->add_option("--updates", run_updates, "updates per replicate");
  run->add_option("--capacity", run_capacity, "population capacity");
  run->add_option("--jobs", run_jobs, "parallel replicate workers (0 = auto)");

  // analyze
  std::string an_genome;
  std::string an_env = "complex";
  std::size_t an_popsize = 3600;
  double an_rate = 0.0075;
  std::string an_out;
  auto* analyze = app.add_subcommand("analyze", "one-point-mutant neutrality report");
  analyze->add_option("genome", an_genome, "genome file")->required();
  analyze->add_option("--env", an_env, "simple|medium|complex");
  analyze->add_option("--popsize", an_popsize, "population size N for the 1/N band");
  analyze->add_option("--rate", an_rate, "per-copy mutation rate R");
  analyze->add_option("--out", an_out, "write the report here instead of stdout");

  // ancestor
  std::size_t anc_length = pressura::kAncestorLength;
  auto* ancestor = app.add_subcommand("ancestor", "emit the reference ancestor");
  ancestor->add_option("--length", anc_length, "stretch to this length (>= 15)");

  // tasks
  std::string tasks_complexity;
  auto* tasks = app.add_subcommand("tasks", "list an environment's task table");
  tasks->add_option("complexity", tasks_complexity, "simple|medium|complex")->required();

  // plot
  std::vector<std::string> plot_files;
  std::string plot_columns;
  std::string plot_out;
  auto* plot = app.add_subcommand("plot", "render stats columns as an SVG chart");
  plot->add_option("stats", plot_files, "stats or aggregate CSV file(s)")->required();
  plot->add_option("--columns", plot_columns, "comma-separated column names")->required();
  plot->add_option("--out", plot_out, "output SVG path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return cmd_run(run_target, run_seed, seed_opt->count() > 0, run_out,
                     run_replicates, run_updates, run_capacity, run_jobs);
    }
    if (analyze->parsed()) {
      return cmd_analyze(an_genome, an_env, an_popsize, an_rate, an_out);
    }
    if (ancestor->parsed()) return cmd_ancestor(anc_length);
    if (tasks->parsed()) return cmd_tasks(tasks_complexity);
    if (plot->parsed()) return cmd_plot(plot_files, plot_columns, plot_out);
  } catch (const std::exception& e) {
    std::cerr << "pressura: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}
