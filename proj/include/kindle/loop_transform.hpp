#pragma once

#include <vector>

#include "kindle/cfa.hpp"

namespace kindle {

class UnsupportedProgram : public Error {
 public:
  using Error::Error;
};

/// A CFA in which every cycle passes through `loop_head`.
struct NormalizedCfa {
  Cfa cfa;
  Loc loop_head = 0;
  /// False for loop-free programs; `loop_head` is then an isolated location.
  bool has_loop = false;
  /// Number of loops before normalization.
  std::size_t num_loops = 0;
  /// Dispatch variable, always present in `cfa.vars`; only assigned when num_loops >= 2.
  VarId pc_var = 0;
  /// Locations of the strongly connected component containing the loop head.
  std::vector<bool> in_loop;
  /// Sorted by id.
  std::vector<VarId> loop_modified;
  std::vector<VarId> termination_vars;
};

/// Fuses all loops into one. Each edge entering an original loop head h_j is
/// redirected through `pc := j` into a fresh head, which dispatches on
/// `assume(pc == j)`. Throws UnsupportedProgram on irreducible control flow.
NormalizedCfa to_single_loop(const Cfa& cfa);

const std::vector<VarId>& loop_modified_vars(const NormalizedCfa& ncfa);
const std::vector<VarId>& termination_condition_vars(const NormalizedCfa& ncfa);

/// Reverse postorder from the entry; unreachable locations get numbers after all reachable ones.
std::vector<std::size_t> reverse_postorder(const Cfa& cfa);

}  // namespace kindle
