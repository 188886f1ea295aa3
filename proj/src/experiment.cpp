#include "pressura/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "pressura/ancestor.hpp"
#include "pressura/stats.hpp"
#include "pressura/svg.hpp"

namespace pressura {

namespace fs = std::filesystem;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("write failed for " + path);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

double parse_double(std::string_view value, std::size_t line, const std::string& key) {
  const std::string s(value);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || s.empty()) {
    throw ParseError(line, "bad value for " + key + ": \"" + s + "\"");
  }
  return v;
}

std::uint64_t parse_u64(std::string_view value, std::size_t line, const std::string& key) {
  const double v = parse_double(value, line, key);
  if (v < 0 || v != static_cast<double>(static_cast<std::uint64_t>(v))) {
    throw ParseError(line, key + " must be a nonnegative integer");
  }
  return static_cast<std::uint64_t>(v);
}

bool parse_bool(std::string_view value, std::size_t line, const std::string& key) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ParseError(line, "bad boolean for " + key + ": \"" + std::string(value) + "\"");
}

Complexity parse_complexity(std::string_view value) {
  if (value == "simple") return Complexity::kSimple;
  if (value == "medium") return Complexity::kMedium;
  if (value == "complex") return Complexity::kComplex;
  throw std::invalid_argument("unknown environment \"" + std::string(value) + "\"");
}

}  // namespace

void ExperimentConfig::validate() const {
  if (capacity < 2) throw std::invalid_argument("capacity must be at least 2");
  if (!(rate >= 0.0 && rate <= 1.0)) throw std::invalid_argument("rate must lie in [0, 1]");
  if (!(ins_rate >= 0.0 && ins_rate <= 1.0) || !(del_rate >= 0.0 && del_rate <= 1.0)) {
    throw std::invalid_argument("indel rates must lie in [0, 1]");
  }
  if (replicates < 1) throw std::invalid_argument("replicates must be at least 1");
  if (updates < 1) throw std::invalid_argument("updates must be at least 1");
  if (stats_interval < 1) throw std::invalid_argument("stats_interval must be at least 1");
  if (fixed_length && genome_length < kMinAncestorLength) {
    throw std::invalid_argument("fixed-length runs need length >= 15");
  }
  if (fixed_length && genome_length > kDefaultMaxGenomeLength) {
    throw std::invalid_argument("length exceeds the genome maximum");
  }
  if (out_dir.empty()) throw std::invalid_argument("out_dir must not be empty");
}

bool is_preset_name(std::string_view name) {
  static constexpr std::string_view kNames[] = {
      "set-i", "set-ii", "set-iii", "set-iv", "set-v", "set-vi", "set-vii"};
  return std::find(std::begin(kNames), std::end(kNames), name) != std::end(kNames);
}

ExperimentConfig preset_config(std::string_view name) {
  ExperimentConfig cfg;
  cfg.preset = std::string(name);
  if (name == "set-i") {
    cfg.complexity = Complexity::kSimple;
    cfg.scheduler = SchedulerMode::kEqualShare;
    cfg.rate = 0.0075;
    // Seeded with an evolved genome; the config must name an ancestor file.
  } else if (name == "set-ii" || name == "set-iii" || name == "set-iv") {
    cfg.complexity = name == "set-ii"    ? Complexity::kSimple
                     : name == "set-iii" ? Complexity::kMedium
                                         : Complexity::kComplex;
    cfg.scheduler = SchedulerMode::kMeritScaled;
    cfg.rate = 0.0075;
  } else if (name == "set-v" || name == "set-vi" || name == "set-vii") {
    cfg.complexity = Complexity::kComplex;
    cfg.scheduler = SchedulerMode::kMeritScaled;
    cfg.fixed_length = true;
    cfg.genome_length = 100;
    cfg.ins_rate = 0.0;
    cfg.del_rate = 0.0;
    cfg.rate = name == "set-v" ? 0.005 : name == "set-vi" ? 0.010 : 0.015;
  } else {
    throw std::invalid_argument("unknown preset \"" + std::string(name) + "\"");
  }
  return cfg;
}

ExperimentConfig load_config(std::string_view text_or_preset) {
  const std::string_view trimmed = trim(text_or_preset);
  if (is_preset_name(trimmed)) return preset_config(trimmed);

  // Collect key/value pairs first so a preset key applies before overrides.
  struct Pair {
    std::string key, value;
    std::size_t line;
  };
  std::vector<Pair> pairs;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  const std::string_view text = text_or_preset;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line = eol == std::string_view::npos ? text.substr(pos)
                                                          : text.substr(pos, eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError(line_no, "expected \"key = value\"");
    }
    std::string key(trim(line.substr(0, eq)));
    std::string value(trim(line.substr(eq + 1)));
    if (key == "R") key = "rate";        // shorthand
    if (key == "N") key = "capacity";    // shorthand
    if (key.empty()) throw ParseError(line_no, "missing key");
    pairs.push_back(Pair{std::move(key), std::move(value), line_no});
  }

  ExperimentConfig cfg;
  bool have_preset = false;
  for (const Pair& p : pairs) {
    if (p.key == "preset") {
      cfg = preset_config(p.value);
      have_preset = true;
    }
  }

  // Fields that define a preset's identity and may not be changed under one.
  const auto defining_conflict = [&](const std::string& key) {
    if (!have_preset) return false;
    static constexpr std::string_view kDefining[] = {
        "environment", "scheduler", "fixed_length", "length",
        "rate",        "ins_rate",  "del_rate"};
    return std::find(std::begin(kDefining), std::end(kDefining), key) !=
           std::end(kDefining);
  };

  for (const Pair& p : pairs) {
    const std::string& k = p.key;
    const std::string& v = p.value;
    if (k == "preset") continue;
    if (defining_conflict(k)) {
      throw ParseError(p.line, "key \"" + k + "\" conflicts with preset " + cfg.preset);
    }
    if (k == "environment") {
      if (v == "simple" || v == "medium" || v == "complex") {
        cfg.complexity = parse_complexity(v);
        cfg.environment_file.clear();
      } else {
        cfg.environment_file = v;
      }
    } else if (k == "scheduler") {
      if (v == "equal_share") cfg.scheduler = SchedulerMode::kEqualShare;
      else if (v == "merit_scaled") cfg.scheduler = SchedulerMode::kMeritScaled;
      else throw ParseError(p.line, "unknown scheduler \"" + v + "\"");
    } else if (k == "fixed_length") {
      cfg.fixed_length = parse_bool(v, p.line, k);
    } else if (k == "length") {
      cfg.genome_length = parse_u64(v, p.line, k);
    } else if (k == "ancestor") {
      cfg.ancestor_path = v == "builtin" ? std::string() : v;
    } else if (k == "rate") {
      cfg.rate = parse_double(v, p.line, k);
    } else if (k == "ins_rate") {
      cfg.ins_rate = parse_double(v, p.line, k);
    } else if (k == "del_rate") {
      cfg.del_rate = parse_double(v, p.line, k);
    } else if (k == "capacity") {
      cfg.capacity = parse_u64(v, p.line, k);
    } else if (k == "updates") {
      cfg.updates = parse_u64(v, p.line, k);
    } else if (k == "replicates") {
      cfg.replicates = parse_u64(v, p.line, k);
    } else if (k == "seed") {
      cfg.seed = parse_u64(v, p.line, k);
    } else if (k == "stats_interval") {
      cfg.stats_interval = parse_u64(v, p.line, k);
    } else if (k == "neutrality_interval") {
      cfg.neutrality_interval = parse_u64(v, p.line, k);
    } else if (k == "out_dir") {
      cfg.out_dir = v;
    } else {
      throw ParseError(p.line, "unknown key \"" + k + "\"");
    }
  }
  cfg.validate();
  return cfg;
}

Genome resolve_ancestor(const ExperimentConfig& config) {
  if (config.ancestor_path.empty()) {
    if (config.preset == "set-i") {
      throw std::invalid_argument(
          "set-i starts from an evolved genome; set ancestor = <file>");
    }
    return config.fixed_length ? reference_ancestor(config.genome_length)
                               : reference_ancestor();
  }
  const Genome genome = parse_genome(read_file(config.ancestor_path));
  if (config.fixed_length && genome.length() != config.genome_length) {
    throw std::invalid_argument("ancestor length " + std::to_string(genome.length()) +
                                " does not match fixed length " +
                                std::to_string(config.genome_length));
  }
  return genome;
}

TaskTable resolve_environment(const ExperimentConfig& config) {
  if (!config.environment_file.empty()) {
    return load_environment_file(read_file(config.environment_file));
  }
  return build_environment(config.complexity);
}

RunArtifacts run_experiment(const ExperimentConfig& config,
                            std::size_t replicate_index) {
  config.validate();
  const Genome ancestor = resolve_ancestor(config);
  const TaskTable environment = resolve_environment(config);

  PopulationConfig pop_cfg;
  pop_cfg.capacity = config.capacity;
  pop_cfg.scheduler_mode = config.scheduler;
  pop_cfg.environment = environment;
  pop_cfg.mutation.copy_sub_rate = config.rate;
  pop_cfg.mutation.divide_ins_rate = config.ins_rate;
  pop_cfg.mutation.divide_del_rate = config.del_rate;
  pop_cfg.mutation.fixed_length = config.fixed_length;

  const std::uint64_t seed = config.seed ^ static_cast<std::uint64_t>(replicate_index);
  Population population(pop_cfg, ancestor, seed);

  const fs::path rep_dir = fs::path(config.out_dir) / ("rep" + std::to_string(replicate_index));
  fs::create_directories(rep_dir);

  RunArtifacts artifacts;
  std::vector<StatsRow> rows;
  std::unordered_map<Genome, FitnessResult, GenomeHash> fitness_cache;
  const auto cached_fitness = [&](const Genome& g) -> const FitnessResult& {
    auto it = fitness_cache.find(g);
    if (it == fitness_cache.end()) {
      it = fitness_cache.emplace(g, test_fitness(g, population.checker())).first;
    }
    return it->second;
  };

  for (std::uint64_t u = 1; u <= config.updates; ++u) {
    const UpdateStats us = population.run_update();
    if (us.extinct) {
      artifacts.extinct = true;
      artifacts.final_update = u;
      break;
    }
    artifacts.final_update = u;
    const bool stats_due = u % config.stats_interval == 0;
    const bool nu_due = config.neutrality_interval > 0 &&
                        u % config.neutrality_interval == 0;
    if (!stats_due && !nu_due) continue;

    const auto [dominant, abundance] = population.dominant_genotype();
    const FitnessResult& fr = cached_fitness(dominant);
    StatsRow row;
    row.update = u;
    row.occupied = us.occupied;
    row.mean_length = us.mean_length;
    row.mean_fitness = us.mean_fitness;
    row.births = us.births;
    row.dominant_abundance = abundance;
    row.dominant_length = dominant.length();
    row.dominant_fitness = fr.w;
    if (nu_due && fr.viable) {
      const NeutralitySpectrum spectrum =
          classify_mutations(dominant, population.checker(), config.capacity);
      const GenotypeStats stats =
          make_genotype_stats(dominant.length(), fr.w, spectrum.nu, config.rate);
      row.nu = spectrum.nu;
      row.neutral_fidelity = stats.neutral_fidelity;
      row.effective_fitness = stats.w_nu;
      row.equilibrium_gap = equilibrium_gap(us.mean_fitness, fr.w, stats.neutral_fidelity);
      const fs::path report_path = rep_dir / ("neutrality_u" + std::to_string(u) + ".txt");
      write_file(report_path.string(),
                 format_neutrality_report("dominant@u" + std::to_string(u), stats,
                                          spectrum, config.rate, config.capacity));
      artifacts.neutrality_paths.push_back(report_path.string());
    }
    rows.push_back(row);
  }

  const fs::path stats_path = rep_dir / "stats.csv";
  write_file(stats_path.string(), format_stats_csv(rows));
  artifacts.stats_path = stats_path.string();

  if (!artifacts.extinct && population.occupied_count() > 0) {
    const fs::path snapshot_path = rep_dir / "snapshot.pop";
    std::ofstream snap(snapshot_path, std::ios::binary | std::ios::trunc);
    population.write_snapshot(snap);
    snap.close();
    artifacts.snapshot_path = snapshot_path.string();

    const fs::path dominant_path = rep_dir / "dominant.org";
    write_file(dominant_path.string(),
               serialize_genome(population.dominant_genotype().first));
    artifacts.dominant_path = dominant_path.string();
  }

  if (!rows.empty()) {
    const fs::path plot_path = rep_dir / "timeseries.svg";
    const CsvTable table = parse_csv(format_stats_csv(rows));
    write_file(plot_path.string(),
               render_timeseries({table}, {"stats"}, {"mean_length", "mean_fitness"}));
    artifacts.plot_paths.push_back(plot_path.string());
  }
  return artifacts;
}

BatchResult run_batch(const ExperimentConfig& config, std::size_t jobs) {
  config.validate();
  fs::create_directories(config.out_dir);
  if (jobs == 0) {
    const unsigned hw = std::thread::hardware_concurrency();
    jobs = std::max<std::size_t>(1, std::min<std::size_t>(config.replicates,
                                                          hw == 0 ? 1 : hw));
  }

  BatchResult batch;
  batch.replicates.resize(config.replicates);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= config.replicates) return;
      ReplicateOutcome& outcome = batch.replicates[i];
      outcome.index = i;
      try {
        outcome.artifacts = run_experiment(config, i);
        outcome.ok = true;
      } catch (const std::exception& e) {
        outcome.ok = false;
        outcome.error = e.what();
      }
    }
  };
  if (jobs <= 1 || config.replicates == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < jobs; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }

  batch.all_ok = true;
  for (const ReplicateOutcome& r : batch.replicates) {
    batch.all_ok &= r.ok && !r.artifacts.extinct;
    batch.any_extinct |= r.artifacts.extinct;
  }

  // Aggregate straight from the files so recomputation reproduces it.
  std::vector<CsvTable> tables;
  for (const ReplicateOutcome& r : batch.replicates) {
    if (!r.artifacts.stats_path.empty()) {
      const CsvTable t = parse_csv(read_file(r.artifacts.stats_path));
      if (!t.rows.empty()) tables.push_back(t);
    }
  }
  if (!tables.empty()) {
    const CsvTable agg = aggregate_mean(tables);
    const fs::path agg_path = fs::path(config.out_dir) / "aggregate.csv";
    write_file(agg_path.string(), format_csv(agg));
    batch.aggregate_path = agg_path.string();

    const fs::path plot_path = fs::path(config.out_dir) / "aggregate.svg";
    write_file(plot_path.string(),
               render_timeseries({agg}, {"aggregate"}, {"mean_length", "mean_fitness"}));
    batch.plot_paths.push_back(plot_path.string());
  }

  std::string summary;
  for (const ReplicateOutcome& r : batch.replicates) {
    summary += "rep" + std::to_string(r.index) + ": ";
    if (!r.ok) {
      summary += "failed: " + r.error;
    } else if (r.artifacts.extinct) {
      summary += "extinct at update " + std::to_string(r.artifacts.final_update);
    } else {
      summary += "ok (" + std::to_string(r.artifacts.final_update) + " updates)";
    }
    summary += "\n";
  }
  const fs::path summary_path = fs::path(config.out_dir) / "summary.txt";
  write_file(summary_path.string(), summary);
  batch.summary_path = summary_path.string();
  return batch;
}

}  // namespace pressura
