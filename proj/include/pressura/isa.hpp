#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pressura {

// The 26-symbol instruction alphabet. Codes are stable: the enum value is
// the instruction's integer code and the index into mnemonic tables.
enum class Instruction : std::uint8_t {
  kNopA = 0,
  kNopB,
  kNopC,
  kIfNEqu,
  kIfLess,
  kPop,
  kPush,
  kSwapStk,
  kSwap,
  kShiftR,
  kShiftL,
  kInc,
  kDec,
  kAdd,
  kSub,
  kNand,
  kIo,
  kHAlloc,
  kHCopy,
  kHSearch,
  kMovHead,
  kJmpHead,
  kGetHead,
  kIfLabel,
  kSetFlow,
  kHDivide,
};

inline constexpr std::size_t kAlphabetSize = 26;
inline constexpr std::size_t kDefaultMaxGenomeLength = 1024;
inline constexpr std::size_t kMinGenomeLength = 1;

constexpr std::uint8_t code_of(Instruction inst) {
  return static_cast<std::uint8_t>(inst);
}

constexpr Instruction instruction_from_code(std::uint8_t code) {
  return static_cast<Instruction>(code);
}

constexpr bool is_nop(Instruction inst) { return code_of(inst) <= 2; }

// nop-a -> nop-b -> nop-c -> nop-a
constexpr Instruction complement_nop(Instruction nop) {
  return instruction_from_code(static_cast<std::uint8_t>((code_of(nop) + 1) % 3));
}

std::string_view mnemonic(Instruction inst);
std::optional<Instruction> instruction_from_mnemonic(std::string_view name);

std::vector<Instruction> complement_label(std::span<const Instruction> label);

// An instruction sequence; the unit of heredity. Equality and hashing are
// content-based, so two organisms with the same sequence share a genotype.
class Genome {
 public:
  Genome() = default;
  explicit Genome(std::vector<Instruction> code) : code_(std::move(code)) {}

  std::size_t length() const { return code_.size(); }
  bool empty() const { return code_.empty(); }
  Instruction operator[](std::size_t i) const { return code_[i]; }

  const std::vector<Instruction>& code() const { return code_; }

  auto begin() const { return code_.begin(); }
  auto end() const { return code_.end(); }

  bool operator==(const Genome& other) const = default;

  // Lexicographic order on instruction codes; used for tie-breaking.
  bool lexicographically_before(const Genome& other) const {
    return code_ < other.code_;
  }

 private:
  std::vector<Instruction> code_;
};

struct GenomeHash {
  std::size_t operator()(const Genome& g) const {
    // FNV-1a over the code bytes.
    std::size_t h = 1469598103934665603ULL;
    for (Instruction inst : g) {
      h ^= code_of(inst);
      h *= 1099511628211ULL;
    }
    return h;
  }
};

// Parse failure with the 1-based line the problem was found on.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

inline constexpr std::string_view kGenomeFileHeader = "#pressura-genome v1";

// Reads the genome file format: header line, optional '#' comment lines,
// one lowercase mnemonic per line. Rejects unknown symbols, trailing
// garbage, empty bodies, and sequences over max_length.
Genome parse_genome(std::string_view text,
                    std::size_t max_length = kDefaultMaxGenomeLength);

// Canonical text form; parse_genome(serialize_genome(g)) == g.
std::string serialize_genome(const Genome& genome);

}  // namespace pressura
