#pragma once

#include <bit>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "pressura/cpu.hpp"
#include "pressura/environment.hpp"
#include "pressura/isa.hpp"
#include "pressura/rng.hpp"

namespace pressura {

enum class SchedulerMode { kEqualShare, kMeritScaled };

std::string_view scheduler_mode_name(SchedulerMode mode);

// equal_share: everyone gets merit 1. merit_scaled: genome length times the
// product of the bonus factors of the credited tasks.
double merit_of(std::size_t length, const TaskMask& credited,
                const TaskTable& table, SchedulerMode mode);

struct PopulationConfig {
  std::size_t capacity = 400;
  std::uint32_t cycles_per_individual_per_update = 30;
  SchedulerMode scheduler_mode = SchedulerMode::kMeritScaled;
  std::size_t min_child_length = 10;
  std::size_t max_genome_length = kDefaultMaxGenomeLength;
  std::uint32_t steps_limit_factor = 100;
  MutationConfig mutation;
  TaskTable environment;

  void validate() const;
};

struct Organism {
  CpuState cpu;
  Genome genome;  // genotype at birth; the memory image may diverge
  double merit = 1.0;
  std::uint64_t births = 0;
  std::optional<std::uint64_t> last_gestation;
};

struct BirthEvent {
  std::size_t parent_cell = 0;
  std::size_t child_cell = 0;
  Genome child_genome;
  double child_merit = 0.0;
  std::uint64_t parent_gestation = 0;
  std::uint64_t update = 0;
};

struct UpdateStats {
  std::uint64_t update = 0;
  std::size_t occupied = 0;
  double mean_length = 0.0;
  // merit / last_gestation, averaged over organisms with at least one birth.
  double mean_fitness = 0.0;
  std::uint64_t births = 0;
  std::size_t dominant_abundance = 0;
  bool extinct = false;
};

// Proportional-share stride scheduler over cell indices. Each organism
// advances a pass value by scale/merit on selection; the minimum pass
// (ties to the lowest index) runs next, so selection counts track merit
// shares to within one stride. Tournament tree over fixed cell slots:
// select() replays one leaf-to-root path, the hottest non-VM operation in
// a run.
class StrideScheduler {
 public:
  static constexpr double kStrideScale = 1e7;

  void reset(std::size_t capacity);
  void add(std::size_t index, double merit, double initial_pass);
  void set_merit(std::size_t index, double merit);
  void remove(std::size_t index);
  bool contains(std::size_t index) const {
    return pass(index) != std::numeric_limits<double>::infinity();
  }
  bool empty() const { return size_ == 0; }
  std::size_t size() const { return size_; }
  double min_pass() const;
  double pass(std::size_t index) const { return key_pass(tree_[leaf_base_ + index]); }
  // Returns the minimum-pass index and advances its pass by its stride.
  std::size_t select();

 private:
  // Keys order by (pass, index). Passes are nonnegative finite doubles, so
  // their IEEE bit pattern preserves order; packing lets each tournament
  // level be one integer compare.
  using Key = unsigned __int128;

  static Key make_key(double pass, std::uint32_t index) {
    return (static_cast<Key>(std::bit_cast<std::uint64_t>(pass)) << 32) | index;
  }
  static double key_pass(Key key) {
    return std::bit_cast<double>(static_cast<std::uint64_t>(key >> 32));
  }
  static std::uint32_t key_index(Key key) {
    return static_cast<std::uint32_t>(key & 0xFFFFFFFFu);
  }

  void replay_path(std::size_t index);

  std::vector<Key> tree_;  // 1-based; leaves at [leaf_base_, leaf_base_ + capacity)
  std::size_t leaf_base_ = 1;
  std::size_t size_ = 0;
  std::vector<double> stride_;
};

// Fixed-capacity well-mixed population advancing in updates of
// occupied * cycles_per_individual_per_update instruction steps.
class Population {
 public:
  Population(PopulationConfig config, const Genome& ancestor, std::uint64_t seed);

  UpdateStats run_update();

  // One scheduler decision; exposed so the proportional-share contract can
  // be exercised directly.
  std::size_t scheduler_select() { return scheduler_.select(); }

  // Places a child in a uniformly random cell other than the parent's,
  // replacing any occupant.
  BirthEvent place_offspring(std::size_t parent_cell, const Genome& child_genome,
                             double child_merit, std::uint64_t parent_gestation);

  // Most abundant genotype; ties resolve to the lexicographically smallest
  // code sequence. Requires at least one occupied cell.
  std::pair<Genome, std::size_t> dominant_genotype() const;

  std::size_t occupied_count() const { return occupied_; }
  std::uint64_t update_counter() const { return update_counter_; }
  std::uint64_t birth_counter() const { return birth_counter_; }
  std::size_t capacity() const { return cells_.size(); }
  const std::optional<Organism>& cell(std::size_t index) const { return cells_[index]; }
  const PopulationConfig& config() const { return config_; }
  const TaskChecker& checker() const { return checker_; }
  const StrideScheduler& scheduler() const { return scheduler_; }

  void write_snapshot(std::ostream& out) const;

 private:
  PopulationConfig config_;
  TaskChecker checker_;
  MutationConfig mutation_;
  DivideLimits limits_;
  std::vector<std::optional<Organism>> cells_;
  StrideScheduler scheduler_;
  Rng rng_;
  std::size_t occupied_ = 0;
  std::uint64_t update_counter_ = 0;
  std::uint64_t birth_counter_ = 0;
};

inline constexpr std::string_view kSnapshotHeader = "#pressura-pop v1";

struct SnapshotRecord {
  std::size_t cell = 0;
  double merit = 0.0;
  std::uint64_t births = 0;
  Genome genome;
};

std::vector<SnapshotRecord> parse_snapshot(std::string_view text);

}  // namespace pressura
