#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kindle/cfa.hpp"
#include "kindle/interp.hpp"
#include "kindle/sym_expr.hpp"

namespace kindle {

struct Precision {
  std::vector<VarId> important;  // Y, sorted
  unsigned depth = 1;            // n
  bool widen = true;             // w

  bool operator==(const Precision&) const = default;
};

std::string to_string(const Precision& p, const std::vector<std::string>& names);

/// Maps every variable to a SymExpr over the current values of the other
/// variables. Bindings never reference themselves and the reference graph is
/// acyclic.
class AbstractState {
 public:
  AbstractState() = default;
  AbstractState(Loc loc, std::size_t num_vars);  // all variables unconstrained

  static AbstractState bottom(Loc loc, std::size_t num_vars);

  Loc loc = 0;

  bool is_bottom() const { return bottom_; }
  std::size_t num_vars() const { return bindings_.size(); }

  const SymPtr& binding(VarId v) const { return bindings_[v]; }
  void bind(VarId v, SymPtr e);
  void bind(VarId v, IntervalSet s) { bind(v, sym_intervals(std::move(s))); }

  /// Value set of `v` obtained by evaluating its binding.
  IntervalSet value(VarId v) const;
  IntervalSet evaluate(const SymExpr& e) const;
  IntervalSet evaluate(const Expr& e) const;

  /// γ-membership of a concrete environment at this state's location.
  bool contains(const Env& env) const;

  void set_bottom();

  bool operator==(const AbstractState& other) const;

  std::string to_string(const std::vector<std::string>& names) const;

 private:
  friend class Transfer;
  std::vector<SymPtr> bindings_;
  bool bottom_ = false;
};

/// Post-state of `op` with the target location `dst`; may be bottom.
AbstractState transfer(const AbstractState& state, const Edge& edge, const Precision& prec);

AbstractState union_states(const AbstractState& e1, const AbstractState& e2);
/// `e1` is the earlier state; bounds of `e2` beyond those of `e1` go to infinity.
AbstractState widen_states(const AbstractState& e1, const AbstractState& e2);
bool differ(const AbstractState& e1, const AbstractState& e2, const Precision& prec);
AbstractState merge(const AbstractState& e1, const AbstractState& e2, const Precision& prec);

/// True if γ(state) ⊆ γ(by), checked variable by variable.
bool covers(const AbstractState& by, const AbstractState& state);
bool stop(const AbstractState& state, const std::vector<AbstractState>& reached);

}  // namespace kindle
