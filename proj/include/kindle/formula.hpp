#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kindle/expr.hpp"

namespace kindle {

enum class Sort { Bool, Int };

struct Term;
using TermPtr = std::shared_ptr<const Term>;
/// Boolean-sorted term.
using Formula = TermPtr;

/// Immutable first-order term over mathematical integers.
struct Term {
  enum class Kind { BoolLit, IntLit, ProgVar, Symbol, App };

  Kind kind = Kind::BoolLit;
  Sort sort = Sort::Bool;
  bool bool_value = false;
  Value int_value = 0;
  /// Program variable not yet bound to a frame; see `instantiate`.
  VarId var = 0;
  /// Symbol name, or the operator of an application.
  std::string name;
  std::vector<TermPtr> args;
  /// Application of an uninterpreted function Int^n -> Int.
  bool uninterpreted = false;
};

TermPtr t_bool(bool b);
inline TermPtr t_true() { return t_bool(true); }
inline TermPtr t_false() { return t_bool(false); }
TermPtr t_int(Value v);
TermPtr t_var(VarId v);
TermPtr t_sym(const std::string& name, Sort sort);

TermPtr t_and(std::vector<TermPtr> args);
TermPtr t_or(std::vector<TermPtr> args);
inline TermPtr t_and(TermPtr a, TermPtr b) { return t_and(std::vector<TermPtr>{std::move(a), std::move(b)}); }
inline TermPtr t_or(TermPtr a, TermPtr b) { return t_or(std::vector<TermPtr>{std::move(a), std::move(b)}); }
TermPtr t_not(TermPtr a);
TermPtr t_implies(TermPtr a, TermPtr b);
TermPtr t_ite(TermPtr c, TermPtr a, TermPtr b);

TermPtr t_eq(TermPtr a, TermPtr b);
TermPtr t_lt(TermPtr a, TermPtr b);
TermPtr t_le(TermPtr a, TermPtr b);
TermPtr t_add(TermPtr a, TermPtr b);
TermPtr t_sub(TermPtr a, TermPtr b);
TermPtr t_neg(TermPtr a);
TermPtr t_mul(TermPtr a, TermPtr b);
/// SMT-LIB `div` and `mod` (Euclidean).
TermPtr t_div(TermPtr a, TermPtr b);
TermPtr t_mod(TermPtr a, TermPtr b);
TermPtr t_uf(const std::string& name, std::vector<TermPtr> args);

bool is_true(const TermPtr& t);
/// Structural equality.
bool same(const TermPtr& a, const TermPtr& b);
bool is_false(const TermPtr& t);

/// Replaces program variables.
TermPtr instantiate(const TermPtr& t, const std::function<TermPtr(VarId)>& bind);

/// Symbols and their sorts; uninterpreted functions map to their arity in `functions`.
void collect_symbols(const TermPtr& t, std::map<std::string, Sort>& symbols,
                     std::map<std::string, std::size_t>& functions);

/// True if the term needs more than linear integer arithmetic.
bool is_nonlinear(const TermPtr& t);

/// Concrete evaluation of a term whose program variables take values from `env`.
/// Bool results are returned as 0/1. Symbols are not allowed.
std::optional<Value> evaluate(const TermPtr& t, const std::vector<Value>& env);

std::string to_smt(const TermPtr& t);
std::string to_smt_int(Value v);
std::string smt_sort(Sort s);
/// Human-readable rendering with program variable names.
std::string to_string(const TermPtr& t, const std::vector<std::string>& names);

/// A standalone SMT-LIB2 script: declarations, assertions, check-sat.
std::string to_smt_script(const std::vector<Formula>& assertions);

}  // namespace kindle
