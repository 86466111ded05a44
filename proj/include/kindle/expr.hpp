#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace kindle {

using Value = std::int64_t;
using VarId = std::uint32_t;
using Loc = std::uint32_t;

/// Binary operators of the program language. `Union` is only produced by the
/// abstract domain (interval-set union) and never by the parser.
enum class BinOp {
  Add,
  Mul,
  Div,
  Mod,
  Eq,
  Lt,
  BitXor,
  BitOr,
  LogOr,
  BitAnd,
  LogAnd,
  Shr,
  Shl,
  Union,
};

enum class UnOp { LogNot, BitNot, Neg };

std::string_view op_symbol(BinOp op);
std::string_view op_symbol(UnOp op);

/// True for operators whose result is always 0 or 1.
bool is_boolean_op(BinOp op);

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Arithmetic left the 64-bit range used by the concrete interpreter.
class OverflowError : public Error {
 public:
  using Error::Error;
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Immutable program expression over integer variables.
struct Expr {
  enum class Kind { Const, Var, Unary, Binary };

  Kind kind = Kind::Const;
  Value value = 0;
  VarId var = 0;
  UnOp unop = UnOp::Neg;
  BinOp binop = BinOp::Add;
  ExprPtr lhs;  // operand of unary expressions
  ExprPtr rhs;

  bool is_const() const { return kind == Kind::Const; }
  bool is_var() const { return kind == Kind::Var; }
  /// Result is a truth value (comparison or logical connective).
  bool is_boolean() const;
};

ExprPtr make_const(Value v);
ExprPtr make_var(VarId v);
ExprPtr make_unary(UnOp op, ExprPtr e);
ExprPtr make_binary(BinOp op, ExprPtr l, ExprPtr r);
ExprPtr make_not(ExprPtr e);

/// Variables in left-to-right source order, without duplicates.
std::vector<VarId> collect_vars(const Expr& e);
void collect_vars(const Expr& e, std::vector<VarId>& out);

bool references(const Expr& e, VarId v);

std::string to_string(const Expr& e, const std::vector<std::string>& names);

}  // namespace kindle
