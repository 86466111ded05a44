#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "kindle/expr.hpp"
#include "kindle/interval_set.hpp"

namespace kindle {

struct SymExpr;
using SymPtr = std::shared_ptr<const SymExpr>;

/// Abstract-domain expression: operators over variables and interval sets.
struct SymExpr {
  enum class Kind { Intervals, Var, Unary, Binary };

  Kind kind = Kind::Intervals;
  IntervalSet set;
  VarId var = 0;
  UnOp unop = UnOp::Neg;
  BinOp binop = BinOp::Add;
  SymPtr lhs;
  SymPtr rhs;
  /// Nesting depth; leaves count 1.
  unsigned depth = 1;

  bool is_intervals() const { return kind == Kind::Intervals; }
  bool is_var() const { return kind == Kind::Var; }
};

SymPtr sym_intervals(IntervalSet s);
SymPtr sym_top();
SymPtr sym_var(VarId v);
SymPtr sym_unary(UnOp op, SymPtr a);
SymPtr sym_binary(BinOp op, SymPtr a, SymPtr b);

/// Program expression with constants as singleton sets.
SymPtr to_sym(const Expr& e);

bool equal(const SymExpr& a, const SymExpr& b);
inline bool equal(const SymPtr& a, const SymPtr& b) { return a == b || equal(*a, *b); }

bool references(const SymExpr& e, VarId v);
void collect_vars(const SymExpr& e, std::vector<VarId>& out);

/// Replaces every occurrence of var(v) by `by`.
SymPtr substitute(const SymPtr& e, VarId v, const SymPtr& by);

/// Evaluates with `lookup` supplying the value set of each variable.
IntervalSet evaluate(const SymExpr& e, const std::function<IntervalSet(VarId)>& lookup);

/// Cuts `e` to at most `depth` levels; subtrees at the cut are replaced by their evaluation.
SymPtr truncate(const SymPtr& e, unsigned depth, const std::function<IntervalSet(VarId)>& lookup);

std::string to_string(const SymExpr& e, const std::vector<std::string>& names);

}  // namespace kindle
