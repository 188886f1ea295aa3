#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pressura/analysis.hpp"
#include "pressura/environment.hpp"
#include "pressura/isa.hpp"
#include "pressura/population.hpp"

namespace pressura {

struct ExperimentConfig {
  std::string preset;  // empty for a custom configuration
  Complexity complexity = Complexity::kSimple;
  std::string environment_file;  // when set, overrides `complexity`
  SchedulerMode scheduler = SchedulerMode::kMeritScaled;
  bool fixed_length = false;
  std::size_t genome_length = 0;  // fixed-length target; 0 in variable mode
  std::string ancestor_path;      // empty -> built-in reference ancestor
  double rate = 0.0075;           // copy substitutions per instruction copied
  double ins_rate = 0.05;         // per divide, variable mode only
  double del_rate = 0.05;
  std::size_t capacity = 400;
  std::uint64_t updates = 10000;
  std::size_t replicates = 5;
  std::uint64_t seed = 1;
  std::uint64_t stats_interval = 10;
  std::uint64_t neutrality_interval = 500;
  std::string out_dir = "out";

  void validate() const;
};

bool is_preset_name(std::string_view name);

// Expands set-i .. set-vii to their desk-scale configurations.
ExperimentConfig preset_config(std::string_view name);

// Accepts a preset name or flat "key = value" text. Unknown keys are
// rejected; a preset key may be combined with non-defining overrides only.
ExperimentConfig load_config(std::string_view text_or_preset);

// Built-in (optionally stretched) ancestor or genome file, checked against
// the fixed-length constraint.
Genome resolve_ancestor(const ExperimentConfig& config);

TaskTable resolve_environment(const ExperimentConfig& config);

struct RunArtifacts {
  std::string stats_path;
  std::string snapshot_path;
  std::string dominant_path;
  std::vector<std::string> neutrality_paths;
  std::vector<std::string> plot_paths;
  bool extinct = false;
  std::uint64_t final_update = 0;
};

// One replicate, seeded with seed XOR replicate_index; writes its artifact
// tree under <out_dir>/rep<k>/.
RunArtifacts run_experiment(const ExperimentConfig& config,
                            std::size_t replicate_index);

struct ReplicateOutcome {
  std::size_t index = 0;
  bool ok = false;
  std::string error;
  RunArtifacts artifacts;
};

struct BatchResult {
  std::vector<ReplicateOutcome> replicates;
  std::string aggregate_path;
  std::string summary_path;
  std::vector<std::string> plot_paths;
  bool all_ok = false;
  bool any_extinct = false;
};

// Runs every replicate (on up to `jobs` threads; 0 picks a default), then
// aggregates the per-replicate stats files. Outputs are independent of the
// thread schedule. Replicate failures are recorded, not propagated.
BatchResult run_batch(const ExperimentConfig& config, std::size_t jobs = 0);

}  // namespace pressura
