#include "pressura/cpu.hpp"

#include <stdexcept>
#include <utility>

namespace pressura {

namespace {

bool rate_ok(double r) { return r >= 0.0 && r <= 1.0; }

constexpr int complement_reg(int r) { return (r + 1) % 3; }

}  // namespace

MutationConfig MutationConfig::normalized() const {
  if (!rate_ok(copy_sub_rate) || !rate_ok(divide_ins_rate) || !rate_ok(divide_del_rate)) {
    throw std::invalid_argument("mutation rates must lie in [0, 1]");
  }
  MutationConfig out = *this;
  if (out.fixed_length) {
    out.divide_ins_rate = 0.0;
    out.divide_del_rate = 0.0;
  }
  return out;
}

std::string_view divide_failure_name(DivideFailure f) {
  switch (f) {
    case DivideFailure::kNotAllocated: return "not-allocated";
    case DivideFailure::kUnderCopied: return "under-copied";
    case DivideFailure::kTooShort: return "too-short";
    case DivideFailure::kLengthConstraint: return "length-constraint";
  }
  return "?";
}

CpuState::CpuState(const Genome& genome) { reset(genome); }

void CpuState::reset(const Genome& genome) {
  if (genome.empty()) throw std::invalid_argument("genome must not be empty");
  memory_ = genome.code();
  parent_len_ = memory_.size();
  copied_.assign(parent_len_, 0);
  regs_ = {0, 0, 0};
  stacks_[0].clear();
  stacks_[1].clear();
  active_stack_ = 0;
  heads_ = {0, 0, 0, 0};
  label_buf_.clear();
  history_len_ = 0;
  input_cursor_ = 0;
  gestation_steps_ = 0;
  credited_.reset();
  allocated_ = false;
  failed_divides_ = 0;
}

void CpuState::reset_for_next_gestation() {
  memory_.resize(parent_len_);
  copied_.assign(parent_len_, 0);
  regs_ = {0, 0, 0};
  stacks_[0].clear();
  stacks_[1].clear();
  active_stack_ = 0;
  heads_ = {0, 0, 0, 0};
  label_buf_.clear();
  history_len_ = 0;
  input_cursor_ = 0;
  gestation_steps_ = 0;
  credited_.reset();
  allocated_ = false;
}

StepEffect CpuState::step(const TaskChecker& env, const MutationConfig& mut,
                          Rng& rng, const DivideLimits& limits) {
  ++gestation_steps_;
  const std::uint32_t ip = heads_[kHeadIp];
  const Instruction op = memory_[ip];

  StepEffect effect;
  effect.executed = op;

  // Decode cursor: walks past the instruction and any modifier nops it
  // consumes. The executing instruction is never a consumable nop, so label
  // scans terminate even on heavily nop-laden memory.
  std::uint32_t cursor = advance(ip);

  const auto take_reg = [&](int fallback) {
    const Instruction in = memory_[cursor];
    if (is_nop(in)) {
      cursor = advance(cursor);
      return static_cast<int>(code_of(in));
    }
    return fallback;
  };
  const auto take_head = [&](int fallback) {
    const Instruction in = memory_[cursor];
    if (is_nop(in)) {
      cursor = advance(cursor);
      return static_cast<int>(code_of(in));  // nop-a..c -> IP, READ, WRITE
    }
    return fallback;
  };
  const auto take_label = [&] {
    scratch_label_.clear();
    while (is_nop(memory_[cursor])) {
      scratch_label_.push_back(memory_[cursor]);
      cursor = advance(cursor);
    }
  };

  bool skip_next = false;
  std::optional<std::uint32_t> redirected_ip;

  switch (op) {
    case Instruction::kNopA:
    case Instruction::kNopB:
    case Instruction::kNopC:
      break;

    case Instruction::kIfNEqu: {
      const int r = take_reg(kRegBX);
      if (regs_[r] == regs_[complement_reg(r)]) skip_next = true;
      break;
    }
    case Instruction::kIfLess: {
      const int r = take_reg(kRegBX);
      if (!(regs_[r] < regs_[complement_reg(r)])) skip_next = true;
      break;
    }
    case Instruction::kPop: {
      const int r = take_reg(kRegBX);
      regs_[r] = stacks_[active_stack_].pop();
      break;
    }
    case Instruction::kPush: {
      const int r = take_reg(kRegBX);
      stacks_[active_stack_].push(regs_[r]);
      break;
    }
    case Instruction::kSwapStk:
      active_stack_ ^= 1;
      break;
    case Instruction::kSwap: {
      const int r = take_reg(kRegBX);
      std::swap(regs_[r], regs_[complement_reg(r)]);
      break;
    }
    case Instruction::kShiftR: {
      const int r = take_reg(kRegBX);
      regs_[r] = static_cast<std::int32_t>(static_cast<std::uint32_t>(regs_[r]) >> 1);
      break;
    }
    case Instruction::kShiftL: {
      const int r = take_reg(kRegBX);
      regs_[r] = static_cast<std::int32_t>(static_cast<std::uint32_t>(regs_[r]) << 1);
      break;
    }
    case Instruction::kInc: {
      const int r = take_reg(kRegBX);
      regs_[r] = static_cast<std::int32_t>(static_cast<std::uint32_t>(regs_[r]) + 1);
      break;
    }
    case Instruction::kDec: {
      const int r = take_reg(kRegBX);
      regs_[r] = static_cast<std::int32_t>(static_cast<std::uint32_t>(regs_[r]) - 1);
      break;
    }
    case Instruction::kAdd: {
      const int r = take_reg(kRegBX);
      regs_[r] = static_cast<std::int32_t>(static_cast<std::uint32_t>(regs_[kRegBX]) +
                                           static_cast<std::uint32_t>(regs_[kRegCX]));
      break;
    }
    case Instruction::kSub: {
      const int r = take_reg(kRegBX);
      regs_[r] = static_cast<std::int32_t>(static_cast<std::uint32_t>(regs_[kRegBX]) -
                                           static_cast<std::uint32_t>(regs_[kRegCX]));
      break;
    }
    case Instruction::kNand: {
      const int r = take_reg(kRegBX);
      regs_[r] = ~(regs_[kRegBX] & regs_[kRegCX]);
      break;
    }
    case Instruction::kIo: {
      const int r = take_reg(kRegBX);
      effect.has_io = true;
      effect.io_output = regs_[r];
      effect.tasks_credited = env.check(regs_[r], input_history(), credited_);
      credited_ |= effect.tasks_credited;
      const auto inputs = canonical_inputs();
      const std::int32_t in = inputs[input_cursor_ % 3];
      ++input_cursor_;
      push_history(in);
      regs_[r] = in;
      break;
    }
    case Instruction::kHAlloc:
      if (!allocated_) {
        memory_.resize(2 * parent_len_, Instruction::kNopA);
        copied_.resize(2 * parent_len_, 0);
        allocated_ = true;
      }
      break;
    case Instruction::kHCopy: {
      Instruction inst = memory_[heads_[kHeadRead]];
      if (mut.copy_sub_rate > 0.0 && rng.bernoulli(mut.copy_sub_rate)) {
        inst = instruction_from_code(
            static_cast<std::uint8_t>(rng.below(kAlphabetSize)));
      }
      memory_[heads_[kHeadWrite]] = inst;
      copied_[heads_[kHeadWrite]] = 1;
      if (is_nop(inst)) {
        label_buf_.push(inst);
      } else {
        label_buf_.clear();
      }
      heads_[kHeadRead] = advance(heads_[kHeadRead]);
      heads_[kHeadWrite] = advance(heads_[kHeadWrite]);
      break;
    }
    case Instruction::kHSearch: {
      take_label();
      if (scratch_label_.empty()) {
        regs_[kRegBX] = 0;
        regs_[kRegCX] = 0;
        heads_[kHeadFlow] = advance(ip);
        break;
      }
      for (auto& nop : scratch_label_) nop = complement_nop(nop);
      const auto len = static_cast<std::uint32_t>(memory_.size());
      const auto k = static_cast<std::uint32_t>(scratch_label_.size());
      bool found = false;
      for (std::uint32_t off = 0; off < len; ++off) {
        const std::uint32_t start = wrap(cursor + off);
        bool match = true;
        for (std::uint32_t m = 0; m < k && match; ++m) {
          match = memory_[wrap(start + m)] == scratch_label_[m];
        }
        if (match) {
          regs_[kRegBX] = static_cast<std::int32_t>(wrap(start + len - ip));
          regs_[kRegCX] = static_cast<std::int32_t>(k);
          heads_[kHeadFlow] = wrap(start + k);
          found = true;
          break;
        }
      }
      if (!found) {
        regs_[kRegBX] = 0;
        regs_[kRegCX] = 0;
        heads_[kHeadFlow] = cursor;
      }
      break;
    }
    case Instruction::kMovHead: {
      const int h = take_head(kHeadIp);
      if (h == kHeadIp) {
        redirected_ip = heads_[kHeadFlow];
      } else {
        heads_[h] = heads_[kHeadFlow];
      }
      break;
    }
    case Instruction::kJmpHead: {
      const int h = take_head(kHeadIp);
      const auto delta = static_cast<std::int64_t>(regs_[kRegCX]);
      if (h == kHeadIp) {
        redirected_ip = mod_len(static_cast<std::int64_t>(cursor) + delta);
      } else {
        heads_[h] = mod_len(static_cast<std::int64_t>(heads_[h]) + delta);
      }
      break;
    }
    case Instruction::kGetHead: {
      const int h = take_head(kHeadIp);
      regs_[kRegCX] = static_cast<std::int32_t>(h == kHeadIp ? ip : heads_[h]);
      break;
    }
    case Instruction::kIfLabel: {
      take_label();
      for (auto& nop : scratch_label_) nop = complement_nop(nop);
      if (!label_buf_.ends_with(scratch_label_)) skip_next = true;
      break;
    }
    case Instruction::kSetFlow: {
      const int r = take_reg(kRegCX);
      heads_[kHeadFlow] = mod_len(regs_[r]);
      break;
    }
    case Instruction::kHDivide: {
      auto result = attempt_divide(mut, rng, limits);
      if (auto* outcome = std::get_if<DivideOutcome>(&result)) {
        effect.divide = std::move(*outcome);
        return effect;  // parent already reset; IP is back at 0
      }
      break;
    }
  }

  heads_[kHeadIp] = redirected_ip ? *redirected_ip
                                  : (skip_next ? advance(cursor) : cursor);
  return effect;
}

std::variant<DivideOutcome, DivideFailure> CpuState::attempt_divide(
    const MutationConfig& mut, Rng& rng, const DivideLimits& limits) {
  if (!allocated_) {
    ++failed_divides_;
    return DivideFailure::kNotAllocated;
  }
  const std::size_t child_len = memory_.size() - parent_len_;
  std::size_t written = 0;
  for (std::size_t i = parent_len_; i < memory_.size(); ++i) written += copied_[i];
  if (written * 2 < child_len) {
    ++failed_divides_;
    return DivideFailure::kUnderCopied;
  }
  if (child_len < limits.min_child_length) {
    ++failed_divides_;
    return DivideFailure::kTooShort;
  }
  if (mut.fixed_length && child_len != parent_len_) {
    ++failed_divides_;
    return DivideFailure::kLengthConstraint;
  }

  std::vector<Instruction> child(memory_.begin() + static_cast<std::ptrdiff_t>(parent_len_),
                                 memory_.end());
  if (!mut.fixed_length) {
    if (mut.divide_ins_rate > 0.0 && rng.bernoulli(mut.divide_ins_rate) &&
        child.size() < limits.max_length) {
      const std::uint32_t pos = rng.below(static_cast<std::uint32_t>(child.size()) + 1);
      child.insert(child.begin() + pos,
                   instruction_from_code(static_cast<std::uint8_t>(rng.below(kAlphabetSize))));
    }
    if (mut.divide_del_rate > 0.0 && rng.bernoulli(mut.divide_del_rate) &&
        child.size() > limits.min_child_length) {
      child.erase(child.begin() + rng.below(static_cast<std::uint32_t>(child.size())));
    }
  }

  DivideOutcome outcome{Genome(std::move(child)), gestation_steps_, credited_};
  reset_for_next_gestation();
  return outcome;
}

}  // namespace pressura
