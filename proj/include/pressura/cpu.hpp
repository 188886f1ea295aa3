#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "pressura/environment.hpp"
#include "pressura/isa.hpp"
#include "pressura/rng.hpp"

namespace pressura {

// Per-organism mutation channels. Copy substitutions are attempt-rate: the
// replacement is drawn uniformly from the whole alphabet, so the effective
// substitution rate is R * 25/26.
struct MutationConfig {
  double copy_sub_rate = 0.0;  // R, per instruction copied
  double divide_ins_rate = 0.0;
  double divide_del_rate = 0.0;
  bool fixed_length = false;

  // Checks ranges and returns a copy with indel rates forced to zero in
  // fixed-length mode.
  MutationConfig normalized() const;
};

struct DivideLimits {
  std::size_t min_child_length = 10;
  std::size_t max_length = kDefaultMaxGenomeLength;
};

enum class DivideFailure : std::uint8_t {
  kNotAllocated,
  kUnderCopied,
  kTooShort,
  kLengthConstraint,
};

std::string_view divide_failure_name(DivideFailure f);

struct DivideOutcome {
  Genome child;
  std::uint64_t parent_gestation = 0;
  TaskMask parent_tasks;
};

struct StepEffect {
  Instruction executed = Instruction::kNopA;
  bool has_io = false;
  std::int32_t io_output = 0;
  TaskMask tasks_credited;
  std::optional<DivideOutcome> divide;
};

enum Register : int { kRegAX = 0, kRegBX = 1, kRegCX = 2 };
enum HeadKind : int { kHeadIp = 0, kHeadRead = 1, kHeadWrite = 2, kHeadFlow = 3 };

// Depth-10 stack; pushing onto a full stack discards the oldest entry and
// popping an empty stack yields 0.
class OperandStack {
 public:
  static constexpr std::size_t kDepth = 10;

  void push(std::int32_t value) {
    if (count_ == kDepth) {
      base_ = (base_ + 1) % kDepth;
      --count_;
    }
    data_[(base_ + count_) % kDepth] = value;
    ++count_;
  }

  std::int32_t pop() {
    if (count_ == 0) return 0;
    --count_;
    return data_[(base_ + count_) % kDepth];
  }

  std::size_t size() const { return count_; }
  void clear() { base_ = count_ = 0; }

 private:
  std::array<std::int32_t, kDepth> data_{};
  std::size_t base_ = 0;
  std::size_t count_ = 0;
};

// The trailing window of nops written by h-copy (at most 10).
class CopyLabelBuffer {
 public:
  static constexpr std::size_t kDepth = 10;

  void push(Instruction nop) {
    data_[next_] = nop;
    next_ = (next_ + 1) % kDepth;
    if (count_ < kDepth) ++count_;
  }

  void clear() { next_ = count_ = 0; }
  std::size_t size() const { return count_; }

  bool ends_with(std::span<const Instruction> suffix) const {
    if (suffix.size() > count_) return false;
    for (std::size_t j = 0; j < suffix.size(); ++j) {
      const std::size_t from_end = suffix.size() - 1 - j;
      const std::size_t slot = (next_ + 2 * kDepth - 1 - from_end) % kDepth;
      if (data_[slot] != suffix[j]) return false;
    }
    return true;
  }

 private:
  std::array<Instruction, kDepth> data_{};
  std::size_t next_ = 0;
  std::size_t count_ = 0;
};

// One organism's execution context: registers, two stacks, four heads over
// an extendable memory image, copy bookkeeping, and io state. All heads
// stay inside [0, memory length); movement wraps.
class CpuState {
 public:
  explicit CpuState(const Genome& genome);

  // Rebirth with a new genome; every field returns to its initial state.
  void reset(const Genome& genome);

  // Executes the instruction at IP, consuming modifier nops, and advances
  // IP (or redirects it, for IP-targeted head moves). On a successful
  // h-divide the parent is reset for its next gestation and the child is
  // returned in the effect.
  StepEffect step(const TaskChecker& env, const MutationConfig& mut, Rng& rng,
                  const DivideLimits& limits = {});

  // Splits off memory beyond the parent image as a child genome. Fails when
  // nothing was allocated, under half of the child cells were written by
  // h-copy, the child is too short, or a fixed-length constraint is broken.
  std::variant<DivideOutcome, DivideFailure> attempt_divide(
      const MutationConfig& mut, Rng& rng, const DivideLimits& limits = {});

  const std::vector<Instruction>& memory() const { return memory_; }
  std::span<const std::uint8_t> copied_flags() const { return copied_; }
  std::size_t parent_length() const { return parent_len_; }
  bool allocated() const { return allocated_; }

  std::int32_t reg(Register r) const { return regs_[r]; }
  void set_reg(Register r, std::int32_t v) { regs_[r] = v; }
  std::uint32_t head(HeadKind h) const { return heads_[h]; }
  void set_head(HeadKind h, std::uint32_t pos) { heads_[h] = pos % memory_.size(); }

  std::uint64_t gestation_steps() const { return gestation_steps_; }
  const TaskMask& credited_tasks() const { return credited_; }
  std::uint64_t failed_divides() const { return failed_divides_; }
  std::span<const std::int32_t> input_history() const {
    return {history_.data(), history_len_};
  }
  std::uint32_t inputs_received() const { return input_cursor_; }
  const CopyLabelBuffer& copy_label_buffer() const { return label_buf_; }
  OperandStack& stack(int which) { return stacks_[which]; }
  int active_stack() const { return active_stack_; }

 private:
  std::uint32_t wrap(std::uint32_t pos) const {
    const auto len = static_cast<std::uint32_t>(memory_.size());
    return pos >= len ? pos % len : pos;
  }

  std::uint32_t advance(std::uint32_t pos) const {
    return pos + 1 < memory_.size() ? pos + 1 : 0;
  }

  std::uint32_t mod_len(std::int64_t value) const {
    const auto len = static_cast<std::int64_t>(memory_.size());
    return static_cast<std::uint32_t>(((value % len) + len) % len);
  }

  void push_history(std::int32_t value) {
    if (history_len_ < history_.size()) {
      history_[history_len_++] = value;
    } else {
      history_[0] = history_[1];
      history_[1] = history_[2];
      history_[2] = value;
    }
  }

  void reset_for_next_gestation();

  std::vector<Instruction> memory_;
  std::vector<std::uint8_t> copied_;
  std::size_t parent_len_ = 0;
  std::array<std::int32_t, 3> regs_{};
  std::array<OperandStack, 2> stacks_;
  int active_stack_ = 0;
  std::array<std::uint32_t, 4> heads_{};
  CopyLabelBuffer label_buf_;
  std::array<std::int32_t, 3> history_{};
  std::size_t history_len_ = 0;
  std::uint32_t input_cursor_ = 0;
  std::uint64_t gestation_steps_ = 0;
  TaskMask credited_;
  bool allocated_ = false;
  std::uint64_t failed_divides_ = 0;
  std::vector<Instruction> scratch_label_;
};

}  // namespace pressura
