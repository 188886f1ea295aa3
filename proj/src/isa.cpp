#include "pressura/isa.hpp"

#include <algorithm>
#include <cctype>

namespace pressura {

namespace {

constexpr std::array<std::string_view, kAlphabetSize> kMnemonics = {
    "nop-a",    "nop-b",    "nop-c",    "if-n-equ", "if-less",  "pop",
    "push",     "swap-stk", "swap",     "shift-r",  "shift-l",  "inc",
    "dec",      "add",      "sub",      "nand",     "io",       "h-alloc",
    "h-copy",   "h-search", "mov-head", "jmp-head", "get-head", "if-label",
    "set-flow", "h-divide",
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) {
    s.remove_suffix(1);
  }
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  return s;
}

}  // namespace

std::string_view mnemonic(Instruction inst) { return kMnemonics[code_of(inst)]; }

std::optional<Instruction> instruction_from_mnemonic(std::string_view name) {
  for (std::size_t i = 0; i < kMnemonics.size(); ++i) {
    if (kMnemonics[i] == name) return instruction_from_code(static_cast<std::uint8_t>(i));
  }
  return std::nullopt;
}

std::vector<Instruction> complement_label(std::span<const Instruction> label) {
  std::vector<Instruction> out;
  out.reserve(label.size());
  for (Instruction inst : label) out.push_back(complement_nop(inst));
  return out;
}

Genome parse_genome(std::string_view text, std::size_t max_length) {
  std::vector<Instruction> code;
  std::size_t line_no = 0;
  bool saw_header = false;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view raw = eol == std::string_view::npos
                               ? text.substr(pos)
                               : text.substr(pos, eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    const std::string_view line = trim(raw);
    if (!saw_header) {
      if (line != kGenomeFileHeader) {
        throw ParseError(line_no, "expected header \"" +
                                      std::string(kGenomeFileHeader) + "\"");
      }
      saw_header = true;
      continue;
    }
    if (line.empty()) continue;
    if (line.front() == '#') continue;  // comment
    const auto inst = instruction_from_mnemonic(line);
    if (!inst) {
      throw ParseError(line_no, "unknown instruction \"" + std::string(line) + "\"");
    }
    code.push_back(*inst);
    if (code.size() > max_length) {
      throw ParseError(line_no, "genome exceeds maximum length " +
                                    std::to_string(max_length));
    }
  }
  if (!saw_header) throw ParseError(1, "empty file");
  if (code.empty()) throw ParseError(line_no, "genome has no instructions");
  return Genome(std::move(code));
}

std::string serialize_genome(const Genome& genome) {
  std::string out(kGenomeFileHeader);
  out.push_back('\n');
  for (Instruction inst : genome) {
    out.append(mnemonic(inst));
    out.push_back('\n');
  }
  return out;
}

}  // namespace pressura
