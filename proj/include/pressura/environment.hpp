#pragma once

#include <array>
#include <bitset>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "pressura/isa.hpp"

namespace pressura {

// f(a,b,c) packed as bit (a + 2b + 4c).
using TruthTable = std::uint8_t;

inline constexpr std::size_t kMaxTasks = 128;

// Bit i refers to tasks[i] of the active TaskTable.
using TaskMask = std::bitset<kMaxTasks>;

// Applies one of the 6 input permutations: result(a,b,c) = t(x_p0, x_p1, x_p2).
TruthTable permute_table_inputs(TruthTable table, const std::array<int, 3>& perm);

// Lexicographically smallest table in the orbit under input permutation.
TruthTable canonical_table(TruthTable table);

// Number of inputs the function actually depends on (0 for constants).
int table_arity(TruthTable table);

// The slots (0..2) the table depends on, in increasing order.
std::vector<int> essential_slots(TruthTable table);

// Bitwise application to `args`, one value per essential slot in slot order.
std::uint32_t apply_table(TruthTable table, std::span<const std::uint32_t> args);

struct TaskDef {
  std::string id;
  int arity = 0;
  TruthTable truth_table = 0;
  double bonus_factor = 2.0;
};

enum class Complexity { kSimple, kMedium, kComplex, kCustom };

std::string_view complexity_name(Complexity c);

struct TaskTable {
  std::vector<TaskDef> tasks;
  Complexity complexity_label = Complexity::kSimple;

  std::size_t size() const { return tasks.size(); }
};

// All 78 non-constant 3-input functions modulo input permutation, in
// ascending canonical-table order. The ten classic logic tasks keep their
// usual names; the rest are named op-<hex table>.
std::vector<TaskDef> enumerate_logic_tasks();

// simple: no tasks. medium: echo, not, nand, and, or-not, or, and-not,
// nor, xor, equ. complex: all 78.
TaskTable build_environment(Complexity complexity);

// Flat override format, one task per line:
//   <name> <arity> <two-hex-digit-table> <bonus>
// Tables are canonicalized; duplicates and constants are rejected.
TaskTable load_environment_file(std::string_view text);

// The fixed input triple served cyclically to `io`. The 32 bit-columns of
// (A, B, C) cover all 8 boolean combinations, so distinct canonical tables
// produce distinct outputs.
std::array<std::int32_t, 3> canonical_inputs();

// Newly completed tasks: value must equal a task's function applied bitwise
// to some ordered tuple of distinct history entries. Tasks in `already` are
// not re-credited.
TaskMask check_output(std::int32_t value, std::span<const std::int32_t> history,
                      const TaskTable& table, const TaskMask& already);

// Immutable after construction; safe for concurrent readers. Precomputes
// the value->tasks maps for the histories reachable from the canonical
// input stream, which is what the execution hot path sees.
class TaskChecker {
 public:
  explicit TaskChecker(TaskTable table);

  const TaskTable& table() const { return table_; }

  TaskMask check(std::int32_t value, std::span<const std::int32_t> history,
                 const TaskMask& already) const;

 private:
  struct HistoryState {
    std::size_t len = 0;
    std::array<std::int32_t, 3> entries{};
    std::unordered_map<std::uint32_t, TaskMask> credits_by_value;
  };

  TaskTable table_;
  std::vector<HistoryState> states_;
};

}  // namespace pressura
