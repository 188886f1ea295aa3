#include "pressura/population.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

namespace pressura {

std::string_view scheduler_mode_name(SchedulerMode mode) {
  return mode == SchedulerMode::kEqualShare ? "equal_share" : "merit_scaled";
}

double merit_of(std::size_t length, const TaskMask& credited,
                const TaskTable& table, SchedulerMode mode) {
  if (length == 0) throw std::invalid_argument("merit_of: length must be positive");
  if (mode == SchedulerMode::kEqualShare) return 1.0;
  double merit = static_cast<double>(length);
  for (std::size_t i = 0; i < table.tasks.size(); ++i) {
    if (credited.test(i)) merit *= table.tasks[i].bonus_factor;
  }
  return merit;
}

void PopulationConfig::validate() const {
  if (capacity < 2) throw std::invalid_argument("capacity must be at least 2");
  if (cycles_per_individual_per_update < 1) {
    throw std::invalid_argument("cycles_per_individual_per_update must be at least 1");
  }
  if (min_child_length < 1 || max_genome_length < min_child_length) {
    throw std::invalid_argument("inconsistent genome length bounds");
  }
  (void)mutation.normalized();  // range check
}

// --- StrideScheduler ---------------------------------------------------

void StrideScheduler::reset(std::size_t capacity) {
  leaf_base_ = std::bit_ceil(std::max<std::size_t>(capacity, 2));
  constexpr double kInf = std::numeric_limits<double>::infinity();
  tree_.assign(2 * leaf_base_, make_key(kInf, 0));
  for (std::size_t i = 0; i < leaf_base_; ++i) {
    tree_[leaf_base_ + i] = make_key(kInf, static_cast<std::uint32_t>(i));
  }
  stride_.assign(capacity, 0.0);
  size_ = 0;
}

void StrideScheduler::replay_path(std::size_t index) {
  std::size_t node = (leaf_base_ + index) >> 1;
  while (node >= 1) {
    const Key left = tree_[2 * node];
    const Key right = tree_[2 * node + 1];
    tree_[node] = left < right ? left : right;
    node >>= 1;
  }
}

void StrideScheduler::add(std::size_t index, double merit, double initial_pass) {
  if (!(merit > 0.0)) throw std::invalid_argument("merit must be positive");
  if (!(initial_pass >= 0.0)) throw std::invalid_argument("pass must be nonnegative");
  stride_[index] = kStrideScale / merit;
  if (!contains(index)) ++size_;
  tree_[leaf_base_ + index] = make_key(initial_pass, static_cast<std::uint32_t>(index));
  replay_path(index);
}

void StrideScheduler::set_merit(std::size_t index, double merit) {
  if (!(merit > 0.0)) throw std::invalid_argument("merit must be positive");
  stride_[index] = kStrideScale / merit;
}

void StrideScheduler::remove(std::size_t index) {
  if (!contains(index)) return;
  tree_[leaf_base_ + index] = make_key(std::numeric_limits<double>::infinity(),
                                       static_cast<std::uint32_t>(index));
  --size_;
  replay_path(index);
}

double StrideScheduler::min_pass() const {
  if (size_ == 0) throw std::logic_error("scheduler is empty");
  return key_pass(tree_[1]);
}

std::size_t StrideScheduler::select() {
  if (size_ == 0) throw std::logic_error("scheduler is empty");
  const Key top = tree_[1];
  const std::uint32_t index = key_index(top);
  tree_[leaf_base_ + index] =
      make_key(key_pass(top) + stride_[index], index);
  replay_path(index);
  return index;
}

// --- Population ---------------------------------------------------------

Population::Population(PopulationConfig config, const Genome& ancestor,
                       std::uint64_t seed)
    : config_(std::move(config)),
      checker_(config_.environment),
      mutation_(config_.mutation.normalized()),
      limits_{config_.min_child_length, config_.max_genome_length},
      cells_(config_.capacity),
      rng_(seed) {
  config_.validate();
  if (ancestor.empty() || ancestor.length() > config_.max_genome_length) {
    throw std::invalid_argument("ancestor length out of bounds");
  }
  scheduler_.reset(config_.capacity);
  const double merit =
      merit_of(ancestor.length(), TaskMask{}, config_.environment, config_.scheduler_mode);
  cells_[0].emplace(Organism{CpuState(ancestor), ancestor, merit, 0, std::nullopt});
  scheduler_.add(0, merit, 0.0);
  occupied_ = 1;
}

BirthEvent Population::place_offspring(std::size_t parent_cell,
                                       const Genome& child_genome,
                                       double child_merit,
                                       std::uint64_t parent_gestation) {
  const std::size_t n = cells_.size();
  const std::uint32_t r = rng_.below(static_cast<std::uint32_t>(n - 1));
  const std::size_t target = r >= parent_cell ? r + 1 : r;

  if (cells_[target]) {
    scheduler_.remove(target);
  } else {
    ++occupied_;
  }
  // Newborns join at the current virtual time so they neither monopolize
  // nor starve.
  const double initial_pass = scheduler_.empty() ? 0.0 : scheduler_.min_pass();
  cells_[target].emplace(
      Organism{CpuState(child_genome), child_genome, child_merit, 0, std::nullopt});
  scheduler_.add(target, child_merit, initial_pass);
  ++birth_counter_;
  return BirthEvent{parent_cell, target, child_genome, child_merit,
                    parent_gestation, update_counter_};
}

UpdateStats Population::run_update() {
  UpdateStats stats;
  stats.update = update_counter_ + 1;
  if (occupied_ == 0) {
    stats.extinct = true;
    ++update_counter_;
    return stats;
  }

  const std::uint64_t total_steps =
      static_cast<std::uint64_t>(occupied_) * config_.cycles_per_individual_per_update;
  for (std::uint64_t t = 0; t < total_steps && occupied_ > 0; ++t) {
    const std::size_t index = scheduler_.select();
    Organism& org = *cells_[index];
    StepEffect effect = org.cpu.step(checker_, mutation_, rng_, limits_);
    if (effect.divide) {
      DivideOutcome& d = *effect.divide;
      const double child_merit = merit_of(d.child.length(), d.parent_tasks,
                                          config_.environment, config_.scheduler_mode);
      const double parent_merit =
          merit_of(org.cpu.parent_length(), d.parent_tasks, config_.environment,
                   config_.scheduler_mode);
      org.merit = parent_merit;
      org.births += 1;
      org.last_gestation = d.parent_gestation;
      scheduler_.set_merit(index, parent_merit);
      place_offspring(index, d.child, child_merit, d.parent_gestation);
      ++stats.births;
    } else if (org.cpu.gestation_steps() >
               static_cast<std::uint64_t>(config_.steps_limit_factor) *
                   org.cpu.parent_length()) {
      // Stagnant; free the cell.
      scheduler_.remove(index);
      cells_[index].reset();
      --occupied_;
    }
  }

  ++update_counter_;
  stats.occupied = occupied_;
  stats.extinct = occupied_ == 0;
  if (occupied_ > 0) {
    double length_sum = 0.0;
    double fitness_sum = 0.0;
    std::size_t parents = 0;
    for (const auto& cell : cells_) {
      if (!cell) continue;
      length_sum += static_cast<double>(cell->genome.length());
      if (cell->births > 0 && cell->last_gestation) {
        fitness_sum += cell->merit / static_cast<double>(*cell->last_gestation);
        ++parents;
      }
    }
    stats.mean_length = length_sum / static_cast<double>(occupied_);
    stats.mean_fitness = parents > 0 ? fitness_sum / static_cast<double>(parents) : 0.0;
    stats.dominant_abundance = dominant_genotype().second;
  }
  return stats;
}

std::pair<Genome, std::size_t> Population::dominant_genotype() const {
  if (occupied_ == 0) throw std::logic_error("population is extinct");
  std::unordered_map<Genome, std::size_t, GenomeHash> counts;
  counts.reserve(occupied_);
  for (const auto& cell : cells_) {
    if (cell) ++counts[cell->genome];
  }
  const Genome* best = nullptr;
  std::size_t best_count = 0;
  for (const auto& [genome, count] : counts) {
    if (best == nullptr || count > best_count ||
        (count == best_count && genome.lexicographically_before(*best))) {
      best = &genome;
      best_count = count;
    }
  }
  return {*best, best_count};
}

void Population::write_snapshot(std::ostream& out) const {
  out << kSnapshotHeader << '\n';
  char buf[32];
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    if (!cells_[i]) continue;
    std::snprintf(buf, sizeof buf, "%.6g", cells_[i]->merit);
    out << i << ',' << buf << ',' << cells_[i]->births;
    for (Instruction inst : cells_[i]->genome) {
      out << ',' << mnemonic(inst);
    }
    out << '\n';
  }
}

std::vector<SnapshotRecord> parse_snapshot(std::string_view text) {
  std::vector<SnapshotRecord> records;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool saw_header = false;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line = eol == std::string_view::npos ? text.substr(pos)
                                                          : text.substr(pos, eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!saw_header) {
      if (line != kSnapshotHeader) throw ParseError(line_no, "bad snapshot header");
      saw_header = true;
      continue;
    }
    if (line.empty()) continue;
    SnapshotRecord rec;
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
    if (fields.size() < 4) throw ParseError(line_no, "truncated snapshot record");
    auto parse_u64 = [&](std::string_view s, std::uint64_t& out) {
      const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
      if (ec != std::errc() || p != s.data() + s.size()) {
        throw ParseError(line_no, "bad number \"" + std::string(s) + "\"");
      }
    };
    std::uint64_t cell = 0, births = 0;
    parse_u64(fields[0], cell);
    parse_u64(fields[2], births);
    rec.cell = cell;
    rec.births = births;
    const std::string merit_str(fields[1]);
    char* end = nullptr;
    rec.merit = std::strtod(merit_str.c_str(), &end);
    if (end != merit_str.c_str() + merit_str.size()) {
      throw ParseError(line_no, "bad merit \"" + merit_str + "\"");
    }
    std::vector<Instruction> code;
    for (std::size_t f = 3; f < fields.size(); ++f) {
      const auto inst = instruction_from_mnemonic(fields[f]);
      if (!inst) throw ParseError(line_no, "unknown instruction \"" + std::string(fields[f]) + "\"");
      code.push_back(*inst);
    }
    rec.genome = Genome(std::move(code));
    records.push_back(std::move(rec));
  }
  if (!saw_header) throw ParseError(1, "empty snapshot");
  return records;
}

}  // namespace pressura
