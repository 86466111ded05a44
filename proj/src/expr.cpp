#include "kindle/expr.hpp"

#include <algorithm>

namespace kindle {

std::string_view op_symbol(BinOp op) {
  switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Mul: return "*";
    case BinOp::Div: return "/";
    case BinOp::Mod: return "%";
    case BinOp::Eq: return "==";
    case BinOp::Lt: return "<";
    case BinOp::BitXor: return "^";
    case BinOp::BitOr: return "|";
    case BinOp::LogOr: return "||";
    case BinOp::BitAnd: return "&";
    case BinOp::LogAnd: return "&&";
    case BinOp::Shr: return ">>";
    case BinOp::Shl: return "<<";
    case BinOp::Union: return "U";
  }
  return "?";
}

std::string_view op_symbol(UnOp op) {
  switch (op) {
    case UnOp::LogNot: return "!";
    case UnOp::BitNot: return "~";
    case UnOp::Neg: return "-";
  }
  return "?";
}

bool is_boolean_op(BinOp op) {
  return op == BinOp::Eq || op == BinOp::Lt || op == BinOp::LogAnd || op == BinOp::LogOr;
}

bool Expr::is_boolean() const {
  if (kind == Kind::Binary) return is_boolean_op(binop);
  if (kind == Kind::Unary) return unop == UnOp::LogNot;
  return false;
}

ExprPtr make_const(Value v) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Const;
  e->value = v;
  return e;
}

ExprPtr make_var(VarId v) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Var;
  e->var = v;
  return e;
}

ExprPtr make_unary(UnOp op, ExprPtr operand) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Unary;
  e->unop = op;
  e->lhs = std::move(operand);
  return e;
}

ExprPtr make_binary(BinOp op, ExprPtr l, ExprPtr r) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Binary;
  e->binop = op;
  e->lhs = std::move(l);
  e->rhs = std::move(r);
  return e;
}

ExprPtr make_not(ExprPtr e) { return make_unary(UnOp::LogNot, std::move(e)); }

void collect_vars(const Expr& e, std::vector<VarId>& out) {
  switch (e.kind) {
    case Expr::Kind::Const:
      return;
    case Expr::Kind::Var:
      if (std::find(out.begin(), out.end(), e.var) == out.end()) out.push_back(e.var);
      return;
    case Expr::Kind::Unary:
      collect_vars(*e.lhs, out);
      return;
    case Expr::Kind::Binary:
      collect_vars(*e.lhs, out);
      collect_vars(*e.rhs, out);
      return;
  }
}

std::vector<VarId> collect_vars(const Expr& e) {
  std::vector<VarId> out;
  collect_vars(e, out);
  return out;
}

bool references(const Expr& e, VarId v) {
  switch (e.kind) {
    case Expr::Kind::Const: return false;
    case Expr::Kind::Var: return e.var == v;
    case Expr::Kind::Unary: return references(*e.lhs, v);
    case Expr::Kind::Binary: return references(*e.lhs, v) || references(*e.rhs, v);
  }
  return false;
}

std::string to_string(const Expr& e, const std::vector<std::string>& names) {
  switch (e.kind) {
    case Expr::Kind::Const:
      return std::to_string(e.value);
    case Expr::Kind::Var:
      return e.var < names.size() ? names[e.var] : "v" + std::to_string(e.var);
    case Expr::Kind::Unary:
      return std::string(op_symbol(e.unop)) + to_string(*e.lhs, names);
    case Expr::Kind::Binary:
      return "(" + to_string(*e.lhs, names) + " " + std::string(op_symbol(e.binop)) + " " +
             to_string(*e.rhs, names) + ")";
  }
  return "?";
}

}  // namespace kindle
