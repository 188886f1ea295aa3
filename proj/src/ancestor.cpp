#include "pressura/ancestor.hpp"

#include <stdexcept>

namespace pressura {

Genome reference_ancestor(std::size_t length) {
  if (length < kMinAncestorLength || length > kDefaultMaxGenomeLength) {
    throw std::invalid_argument("ancestor length must lie in [16, 1024]");
  }
  using I = Instruction;
  std::vector<Instruction> code = {
      I::kHAlloc,   // give the child its memory
      I::kHSearch,  // label [c a]: complement [a b] marks the genome end
      I::kNopC,
      I::kNopA,
      I::kMovHead,  // write head -> flow (first child cell)
      I::kNopC,
      I::kHSearch,  // empty label: flow -> loop start
      I::kHCopy,
      I::kIfLabel,  // fires once the end template [a b] has been copied
      I::kNopC,
      I::kNopA,
      I::kHDivide,
      I::kMovHead,  // loop jump back to the h-copy
      I::kNopA,
  };
  // Dead padding: copied into children but never executed.
  while (code.size() + 2 < length) code.push_back(I::kNopC);
  code.push_back(I::kNopA);  // end template
  code.push_back(I::kNopB);
  return Genome(std::move(code));
}

}  // namespace pressura
