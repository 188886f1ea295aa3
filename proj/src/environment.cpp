#include "pressura/environment.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <set>
#include <sstream>

namespace pressura {

namespace {

constexpr std::array<std::array<int, 3>, 6> kInputPermutations = {{
    {0, 1, 2},
    {0, 2, 1},
    {1, 0, 2},
    {1, 2, 0},
    {2, 0, 1},
    {2, 1, 0},
}};

std::string hex_name(TruthTable table) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "op-%02x", table);
  return buf;
}

TruthTable table_from_unary(bool (*f)(bool)) {
  TruthTable t = 0;
  for (int idx = 0; idx < 8; ++idx) {
    if (f((idx & 1) != 0)) t |= static_cast<TruthTable>(1u << idx);
  }
  return t;
}

TruthTable table_from_binary(bool (*f)(bool, bool)) {
  TruthTable t = 0;
  for (int idx = 0; idx < 8; ++idx) {
    if (f((idx & 1) != 0, (idx & 2) != 0)) t |= static_cast<TruthTable>(1u << idx);
  }
  return t;
}

// The classic task names keyed by canonical table.
const std::vector<std::pair<TruthTable, std::string>>& classic_names() {
  static const std::vector<std::pair<TruthTable, std::string>> names = [] {
    std::vector<std::pair<TruthTable, std::string>> out;
    auto add_unary = [&](const char* name, bool (*f)(bool)) {
      out.emplace_back(canonical_table(table_from_unary(f)), name);
    };
    auto add_binary = [&](const char* name, bool (*f)(bool, bool)) {
      out.emplace_back(canonical_table(table_from_binary(f)), name);
    };
    add_unary("echo", [](bool x) { return x; });
    add_unary("not", [](bool x) { return !x; });
    add_binary("nand", [](bool x, bool y) { return !(x && y); });
    add_binary("and", [](bool x, bool y) { return x && y; });
    add_binary("or-not", [](bool x, bool y) { return x || !y; });
    add_binary("or", [](bool x, bool y) { return x || y; });
    add_binary("and-not", [](bool x, bool y) { return x && !y; });
    add_binary("nor", [](bool x, bool y) { return !(x || y); });
    add_binary("xor", [](bool x, bool y) { return x != y; });
    add_binary("equ", [](bool x, bool y) { return x == y; });
    return out;
  }();
  return names;
}

std::string task_name(TruthTable canonical) {
  for (const auto& [table, name] : classic_names()) {
    if (table == canonical) return name;
  }
  return hex_name(canonical);
}

// Emits (task index, output value) for every ordered arity-tuple of
// distinct history entries.
template <typename Visitor>
void for_each_task_output(const TaskTable& table,
                          std::span<const std::int32_t> history,
                          Visitor&& visit) {
  const std::size_t n = history.size();
  std::array<std::uint32_t, 3> args{};
  for (std::size_t ti = 0; ti < table.tasks.size(); ++ti) {
    const TaskDef& task = table.tasks[ti];
    const std::size_t k = static_cast<std::size_t>(task.arity);
    if (k > n) continue;
    std::array<std::size_t, 3> pick{};
    auto recurse = [&](auto&& self, std::size_t depth) -> void {
      if (depth == k) {
        for (std::size_t m = 0; m < k; ++m) {
          args[m] = static_cast<std::uint32_t>(history[pick[m]]);
        }
        visit(ti, apply_table(task.truth_table, std::span(args.data(), k)));
        return;
      }
      for (std::size_t i = 0; i < n; ++i) {
        bool used = false;
        for (std::size_t d = 0; d < depth; ++d) used |= pick[d] == i;
        if (used) continue;
        pick[depth] = i;
        self(self, depth + 1);
      }
    };
    recurse(recurse, 0);
  }
}

}  // namespace

TruthTable permute_table_inputs(TruthTable table, const std::array<int, 3>& perm) {
  TruthTable out = 0;
  for (int idx = 0; idx < 8; ++idx) {
    const int x[3] = {idx & 1, (idx >> 1) & 1, (idx >> 2) & 1};
    const int src = x[perm[0]] + 2 * x[perm[1]] + 4 * x[perm[2]];
    if (table & (1u << src)) out |= static_cast<TruthTable>(1u << idx);
  }
  return out;
}

TruthTable canonical_table(TruthTable table) {
  TruthTable best = 0xFF;
  for (const auto& perm : kInputPermutations) {
    best = std::min(best, permute_table_inputs(table, perm));
  }
  return best;
}

int table_arity(TruthTable table) {
  int arity = 0;
  for (int slot = 0; slot < 3; ++slot) {
    for (int idx = 0; idx < 8; ++idx) {
      const bool a = (table & (1u << idx)) != 0;
      const bool b = (table & (1u << (idx ^ (1 << slot)))) != 0;
      if (a != b) {
        ++arity;
        break;
      }
    }
  }
  return arity;
}

std::vector<int> essential_slots(TruthTable table) {
  std::vector<int> slots;
  for (int slot = 0; slot < 3; ++slot) {
    for (int idx = 0; idx < 8; ++idx) {
      const bool a = (table & (1u << idx)) != 0;
      const bool b = (table & (1u << (idx ^ (1 << slot)))) != 0;
      if (a != b) {
        slots.push_back(slot);
        break;
      }
    }
  }
  return slots;
}

std::uint32_t apply_table(TruthTable table, std::span<const std::uint32_t> args) {
  const std::vector<int> slots = essential_slots(table);
  std::uint32_t out = 0;
  for (int j = 0; j < 32; ++j) {
    int idx = 0;
    for (std::size_t m = 0; m < args.size() && m < slots.size(); ++m) {
      if (args[m] & (1u << j)) idx |= 1 << slots[m];
    }
    if (table & (1u << idx)) out |= 1u << j;
  }
  return out;
}

std::string_view complexity_name(Complexity c) {
  switch (c) {
    case Complexity::kSimple: return "simple";
    case Complexity::kMedium: return "medium";
    case Complexity::kComplex: return "complex";
    case Complexity::kCustom: return "custom";
  }
  return "?";
}

std::vector<TaskDef> enumerate_logic_tasks() {
  std::set<TruthTable> canon;
  for (int t = 0; t < 256; ++t) {
    const TruthTable c = canonical_table(static_cast<TruthTable>(t));
    if (c == 0x00 || c == 0xFF) continue;
    canon.insert(c);
  }
  std::vector<TaskDef> tasks;
  tasks.reserve(canon.size());
  for (TruthTable c : canon) {
    tasks.push_back(TaskDef{task_name(c), table_arity(c), c, 2.0});
  }
  return tasks;
}

TaskTable build_environment(Complexity complexity) {
  TaskTable table;
  table.complexity_label = complexity;
  switch (complexity) {
    case Complexity::kSimple:
      break;
    case Complexity::kMedium: {
      for (const auto& [canon, name] : classic_names()) {
        table.tasks.push_back(TaskDef{name, table_arity(canon), canon, 2.0});
      }
      std::sort(table.tasks.begin(), table.tasks.end(),
                [](const TaskDef& a, const TaskDef& b) {
                  return a.truth_table < b.truth_table;
                });
      break;
    }
    case Complexity::kComplex:
      table.tasks = enumerate_logic_tasks();
      break;
    case Complexity::kCustom:
      break;
  }
  return table;
}

TaskTable load_environment_file(std::string_view text) {
  TaskTable table;
  table.complexity_label = Complexity::kCustom;
  std::set<TruthTable> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string line(eol == std::string_view::npos ? text.substr(pos)
                                                   : text.substr(pos, eol - pos));
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream in(line);
    std::string name, hex;
    int arity = 0;
    double bonus = 0;
    if (!(in >> name)) continue;  // blank line
    if (name.front() == '#') continue;
    if (!(in >> arity >> hex >> bonus)) {
      throw ParseError(line_no, "expected \"<name> <arity> <table-hex> <bonus>\"");
    }
    std::string extra;
    if (in >> extra) throw ParseError(line_no, "trailing garbage \"" + extra + "\"");
    unsigned raw = 0;
    const auto [ptr, ec] = std::from_chars(hex.data(), hex.data() + hex.size(), raw, 16);
    if (ec != std::errc() || ptr != hex.data() + hex.size() || hex.size() != 2) {
      throw ParseError(line_no, "bad truth table \"" + hex + "\"");
    }
    const TruthTable canon = canonical_table(static_cast<TruthTable>(raw));
    if (canon == 0x00 || canon == 0xFF) {
      throw ParseError(line_no, "constant function is not a task");
    }
    if (!seen.insert(canon).second) {
      throw ParseError(line_no, "duplicate task (canonical table " + hex_name(canon) + ")");
    }
    if (arity != table_arity(canon)) {
      throw ParseError(line_no, "arity " + std::to_string(arity) + " does not match table");
    }
    if (!(bonus > 0)) throw ParseError(line_no, "bonus must be positive");
    if (table.tasks.size() == kMaxTasks) throw ParseError(line_no, "too many tasks");
    table.tasks.push_back(TaskDef{name, arity, canon, bonus});
  }
  return table;
}

std::array<std::int32_t, 3> canonical_inputs() {
  return {static_cast<std::int32_t>(0xAAAAAAAAu),
          static_cast<std::int32_t>(0xCCCCCCCCu),
          static_cast<std::int32_t>(0xF0F0F0F0u)};
}

TaskMask check_output(std::int32_t value, std::span<const std::int32_t> history,
                      const TaskTable& table, const TaskMask& already) {
  TaskMask credited;
  const auto target = static_cast<std::uint32_t>(value);
  for_each_task_output(table, history, [&](std::size_t ti, std::uint32_t out) {
    if (out == target) credited.set(ti);
  });
  return credited & ~already;
}

TaskChecker::TaskChecker(TaskTable table) : table_(std::move(table)) {
  // Histories reachable from the canonical stream: the growing prefix and
  // the three rotations of the full window.
  const auto inputs = canonical_inputs();
  std::vector<std::vector<std::int32_t>> histories = {
      {},
      {inputs[0]},
      {inputs[0], inputs[1]},
      {inputs[0], inputs[1], inputs[2]},
      {inputs[1], inputs[2], inputs[0]},
      {inputs[2], inputs[0], inputs[1]},
  };
  for (const auto& h : histories) {
    HistoryState state;
    state.len = h.size();
    std::copy(h.begin(), h.end(), state.entries.begin());
    for_each_task_output(table_, h, [&](std::size_t ti, std::uint32_t out) {
      state.credits_by_value[out].set(ti);
    });
    states_.push_back(std::move(state));
  }
}

TaskMask TaskChecker::check(std::int32_t value,
                            std::span<const std::int32_t> history,
                            const TaskMask& already) const {
  for (const HistoryState& state : states_) {
    if (state.len != history.size()) continue;
    bool same = true;
    for (std::size_t i = 0; i < state.len; ++i) same &= state.entries[i] == history[i];
    if (!same) continue;
    const auto it = state.credits_by_value.find(static_cast<std::uint32_t>(value));
    if (it == state.credits_by_value.end()) return TaskMask{};
    return it->second & ~already;
  }
  return check_output(value, history, table_, already);
}

}  // namespace pressura
