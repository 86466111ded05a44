#include "kindle/sym_expr.hpp"

#include <algorithm>

namespace kindle {

SymPtr sym_intervals(IntervalSet s) {
  auto e = std::make_shared<SymExpr>();
  e->kind = SymExpr::Kind::Intervals;
  e->set = std::move(s);
  return e;
}

SymPtr sym_top() {
  static const SymPtr top = sym_intervals(IntervalSet::top());
  return top;
}

SymPtr sym_var(VarId v) {
  auto e = std::make_shared<SymExpr>();
  e->kind = SymExpr::Kind::Var;
  e->var = v;
  return e;
}

// Variable-free subtrees are folded so that structural equality is canonical.
SymPtr sym_unary(UnOp op, SymPtr a) {
  if (a->is_intervals()) return sym_intervals(IntervalSet::apply(op, a->set));
  auto e = std::make_shared<SymExpr>();
  e->kind = SymExpr::Kind::Unary;
  e->unop = op;
  e->depth = a->depth + 1;
  e->lhs = std::move(a);
  return e;
}

SymPtr sym_binary(BinOp op, SymPtr a, SymPtr b) {
  if (a->is_intervals() && b->is_intervals()) return sym_intervals(IntervalSet::apply(op, a->set, b->set));
  auto e = std::make_shared<SymExpr>();
  e->kind = SymExpr::Kind::Binary;
  e->binop = op;
  e->depth = std::max(a->depth, b->depth) + 1;
  e->lhs = std::move(a);
  e->rhs = std::move(b);
  return e;
}

SymPtr to_sym(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Const: return sym_intervals(IntervalSet::singleton(e.value));
    case Expr::Kind::Var: return sym_var(e.var);
    case Expr::Kind::Unary: return sym_unary(e.unop, to_sym(*e.lhs));
    case Expr::Kind::Binary: return sym_binary(e.binop, to_sym(*e.lhs), to_sym(*e.rhs));
  }
  return sym_top();
}

bool equal(const SymExpr& a, const SymExpr& b) {
  if (&a == &b) return true;
  if (a.kind != b.kind || a.depth != b.depth) return false;
  switch (a.kind) {
    case SymExpr::Kind::Intervals: return a.set == b.set;
    case SymExpr::Kind::Var: return a.var == b.var;
    case SymExpr::Kind::Unary: return a.unop == b.unop && equal(a.lhs, b.lhs);
    case SymExpr::Kind::Binary: return a.binop == b.binop && equal(a.lhs, b.lhs) && equal(a.rhs, b.rhs);
  }
  return false;
}

bool references(const SymExpr& e, VarId v) {
  switch (e.kind) {
    case SymExpr::Kind::Intervals: return false;
    case SymExpr::Kind::Var: return e.var == v;
    case SymExpr::Kind::Unary: return references(*e.lhs, v);
    case SymExpr::Kind::Binary: return references(*e.lhs, v) || references(*e.rhs, v);
  }
  return false;
}

void collect_vars(const SymExpr& e, std::vector<VarId>& out) {
  switch (e.kind) {
    case SymExpr::Kind::Intervals: return;
    case SymExpr::Kind::Var:
      if (std::find(out.begin(), out.end(), e.var) == out.end()) out.push_back(e.var);
      return;
    case SymExpr::Kind::Unary: collect_vars(*e.lhs, out); return;
    case SymExpr::Kind::Binary:
      collect_vars(*e.lhs, out);
      collect_vars(*e.rhs, out);
      return;
  }
}

SymPtr substitute(const SymPtr& e, VarId v, const SymPtr& by) {
  if (!references(*e, v)) return e;
  switch (e->kind) {
    case SymExpr::Kind::Var: return by;
    case SymExpr::Kind::Unary: return sym_unary(e->unop, substitute(e->lhs, v, by));
    case SymExpr::Kind::Binary: return sym_binary(e->binop, substitute(e->lhs, v, by), substitute(e->rhs, v, by));
    default: return e;
  }
}

IntervalSet evaluate(const SymExpr& e, const std::function<IntervalSet(VarId)>& lookup) {
  switch (e.kind) {
    case SymExpr::Kind::Intervals: return e.set;
    case SymExpr::Kind::Var: return lookup(e.var);
    case SymExpr::Kind::Unary: return IntervalSet::apply(e.unop, evaluate(*e.lhs, lookup));
    case SymExpr::Kind::Binary:
      return IntervalSet::apply(e.binop, evaluate(*e.lhs, lookup), evaluate(*e.rhs, lookup));
  }
  return IntervalSet::top();
}

SymPtr truncate(const SymPtr& e, unsigned depth, const std::function<IntervalSet(VarId)>& lookup) {
  if (e->depth <= depth) return e;
  if (depth <= 1) return sym_intervals(evaluate(*e, lookup));
  if (e->kind == SymExpr::Kind::Unary) return sym_unary(e->unop, truncate(e->lhs, depth - 1, lookup));
  return sym_binary(e->binop, truncate(e->lhs, depth - 1, lookup), truncate(e->rhs, depth - 1, lookup));
}

std::string to_string(const SymExpr& e, const std::vector<std::string>& names) {
  switch (e.kind) {
    case SymExpr::Kind::Intervals: return to_string(e.set);
    case SymExpr::Kind::Var: return e.var < names.size() ? names[e.var] : "v" + std::to_string(e.var);
    case SymExpr::Kind::Unary: return std::string(op_symbol(e.unop)) + "(" + to_string(*e.lhs, names) + ")";
    case SymExpr::Kind::Binary:
      return "(" + to_string(*e.lhs, names) + " " + std::string(op_symbol(e.binop)) + " " +
             to_string(*e.rhs, names) + ")";
  }
  return "?";
}

}  // namespace kindle
