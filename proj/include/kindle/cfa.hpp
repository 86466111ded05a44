#pragma once

#include <string>
#include <vector>

#include "kindle/expr.hpp"
#include "kindle/parser.hpp"

namespace kindle {

struct Op {
  enum class Kind { Assume, Assign, Havoc };

  Kind kind = Kind::Assume;
  VarId var = 0;  // Assign, Havoc
  ExprPtr expr;   // Assume condition or Assign value

  static Op assume(ExprPtr cond);
  static Op assign(VarId v, ExprPtr value);
  static Op havoc(VarId v);
};

struct Edge {
  Loc src = 0;
  Op op;
  Loc dst = 0;
};

/// Control-flow automaton: locations are dense ids [0, num_locations).
class Cfa {
 public:
  std::vector<std::string> vars;
  std::size_t num_locations = 0;
  Loc entry = 0;
  Loc error = 0;
  /// Normal program termination; equal to `entry` for an empty program.
  Loc exit = 0;
  std::vector<Edge> edges;

  Loc add_location() { return static_cast<Loc>(num_locations++); }
  std::size_t add_edge(Loc src, Op op, Loc dst);

  /// Indices into `edges`, in insertion order.
  const std::vector<std::size_t>& out_edges(Loc l) const;
  const std::vector<std::size_t>& in_edges(Loc l) const;

  /// Rebuilds adjacency after direct manipulation of `edges`.
  void reindex();

 private:
  std::vector<std::vector<std::size_t>> out_;
  std::vector<std::vector<std::size_t>> in_;
};

/// Lowers structured statements to assume/assign/havoc edges.
/// `assert(e)` becomes assume(!e) into the error location plus assume(e).
Cfa build_cfa(const Ast& ast);

/// Targets of DFS back edges from the entry, in ascending order.
std::vector<Loc> loop_heads(const Cfa& cfa);

std::string to_string(const Op& op, const std::vector<std::string>& names);

/// One edge per line: `src --op--> dst`.
std::string dump(const Cfa& cfa);

}  // namespace kindle
