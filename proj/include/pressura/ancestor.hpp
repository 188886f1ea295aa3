#pragma once

#include <cstddef>

#include "pressura/isa.hpp"

namespace pressura {

inline constexpr std::size_t kAncestorLength = 20;
inline constexpr std::size_t kMinAncestorLength = 16;

// The hand-written self-replicator used to seed experiments. It allocates
// child space, locates the end-of-genome template to park the write head,
// then runs a three-step copy loop that divides once the template has been
// copied. The nop-c cells between the loop jump and the end template are
// dead padding (copied, never executed); reference_ancestor(n) stretches
// that padding to reach n instructions (n >= 16), so gestation stays
// near 3n even for long genomes.
Genome reference_ancestor(std::size_t length = kAncestorLength);

}  // namespace pressura
