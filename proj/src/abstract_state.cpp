#include "kindle/abstract_state.hpp"

#include <algorithm>

namespace kindle {

std::string to_string(const Precision& p, const std::vector<std::string>& names) {
  std::string ys;
  for (auto v : p.important) {
    if (!ys.empty()) ys += ",";
    ys += v < names.size() ? names[v] : "v" + std::to_string(v);
  }
  return "({" + ys + "}," + std::to_string(p.depth) + "," + (p.widen ? "t" : "f") + ")";
}

AbstractState::AbstractState(Loc l, std::size_t num_vars) : loc(l), bindings_(num_vars, sym_top()) {}

AbstractState AbstractState::bottom(Loc l, std::size_t num_vars) {
  AbstractState s(l, num_vars);
  s.set_bottom();
  return s;
}

void AbstractState::set_bottom() {
  bottom_ = true;
  std::fill(bindings_.begin(), bindings_.end(), sym_intervals(IntervalSet::bottom()));
}

void AbstractState::bind(VarId v, SymPtr e) {
  bindings_[v] = std::move(e);
  if (bindings_[v]->is_intervals() && bindings_[v]->set.is_bottom()) set_bottom();
}

IntervalSet AbstractState::value(VarId v) const {
  if (bottom_) return IntervalSet::bottom();
  return evaluate(*bindings_[v]);
}

IntervalSet AbstractState::evaluate(const SymExpr& e) const {
  return kindle::evaluate(e, [this](VarId v) { return value(v); });
}

IntervalSet AbstractState::evaluate(const Expr& e) const { return evaluate(*to_sym(e)); }

bool AbstractState::contains(const Env& env) const {
  if (bottom_) return false;
  auto lookup = [&](VarId v) { return IntervalSet::singleton(env[v]); };
  for (VarId v = 0; v < bindings_.size(); ++v)
    if (!kindle::evaluate(*bindings_[v], lookup).contains(env[v])) return false;
  return true;
}

bool AbstractState::operator==(const AbstractState& other) const {
  if (loc != other.loc || bottom_ != other.bottom_ || bindings_.size() != other.bindings_.size()) return false;
  if (bottom_) return true;
  for (std::size_t i = 0; i < bindings_.size(); ++i)
    if (!equal(bindings_[i], other.bindings_[i])) return false;
  return true;
}

std::string AbstractState::to_string(const std::vector<std::string>& names) const {
  std::string out = std::to_string(loc) + ": ";
  if (bottom_) return out + "bottom";
  bool first = true;
  for (VarId v = 0; v < bindings_.size(); ++v) {
    if (bindings_[v]->is_intervals() && bindings_[v]->set.is_top()) continue;
    if (!first) out += ", ";
    first = false;
    out += (v < names.size() ? names[v] : "v" + std::to_string(v)) + " ∈ ";
    if (bindings_[v]->is_intervals())
      out += kindle::to_string(bindings_[v]->set);
    else
      out += kindle::to_string(*bindings_[v], names) + " = " + kindle::to_string(value(v));
  }
  if (first) out += "true";
  return out;
}

// Transfer functions need write access to bindings and share helpers.
class Transfer {
 public:
  Transfer(AbstractState& s, unsigned depth) : s_(s), depth_(depth) {}

  void assign(VarId x, const Expr& e) {
    SymPtr old = s_.bindings_[x];
    auto lookup = [pre = s_](VarId v) { return pre.value(v); };
    SymPtr rhs = truncate(substitute(to_sym(e), x, old), depth_, lookup);
    detach(x, old, lookup);
    s_.bind(x, rhs);
    check_nonempty();
  }

  void havoc(VarId x) {
    SymPtr old = s_.bindings_[x];
    auto lookup = [pre = s_](VarId v) { return pre.value(v); };
    detach(x, old, lookup);
    s_.bind(x, sym_top());
  }

  void assume(const Expr& cond) {
    auto r = refine(s_, cond, true);
    if (!r) {
      s_.set_bottom();
      return;
    }
    s_ = std::move(*r);
    check_nonempty();
  }

 private:
  using Lookup = std::function<IntervalSet(VarId)>;

  // Other bindings stop referring to x before x is rebound.
  void detach(VarId x, const SymPtr& old, const Lookup& lookup) {
    for (VarId z = 0; z < s_.bindings_.size(); ++z) {
      if (z == x || !references(*s_.bindings_[z], x)) continue;
      s_.bindings_[z] = truncate(substitute(s_.bindings_[z], x, old), depth_, lookup);
    }
  }

  void check_nonempty() {
    if (s_.bottom_) return;
    for (VarId v = 0; v < s_.bindings_.size(); ++v) {
      if (s_.value(v).is_bottom()) {
        s_.set_bottom();
        return;
      }
    }
  }

  static std::optional<AbstractState> join(std::optional<AbstractState> a, std::optional<AbstractState> b) {
    if (!a) return b;
    if (!b) return a;
    return union_states(*a, *b);
  }

  static std::optional<AbstractState> refine(AbstractState s, const Expr& c, bool positive) {
    if (s.is_bottom()) return std::nullopt;
    if (c.kind == Expr::Kind::Unary && c.unop == UnOp::LogNot) return refine(std::move(s), *c.lhs, !positive);
    if (c.kind == Expr::Kind::Binary) {
      bool is_and = c.binop == BinOp::LogAnd, is_or = c.binop == BinOp::LogOr;
      if ((is_and && positive) || (is_or && !positive)) {
        auto first = refine(std::move(s), *c.lhs, positive);
        if (!first) return std::nullopt;
        return refine(std::move(*first), *c.rhs, positive);
      }
      if (is_and || is_or) {
        // Short-circuit: either the left operand decides, or it doesn't and the right one does.
        auto left = refine(s, *c.lhs, positive);
        auto through = refine(std::move(s), *c.lhs, !positive);
        std::optional<AbstractState> right;
        if (through) right = refine(std::move(*through), *c.rhs, positive);
        return join(std::move(left), std::move(right));
      }
    }
    if (!refine_atom(s, c, positive)) return std::nullopt;
    IntervalSet v = s.evaluate(c);
    if (positive ? v.subset_of(IntervalSet::singleton(0)) : !v.contains(0)) return std::nullopt;
    for (VarId x = 0; x < s.num_vars(); ++x)
      if (s.value(x).is_bottom()) return std::nullopt;
    return s;
  }

  static Bound dec(Bound b) { return b == kNegInf || b == kPosInf ? b : b - 1; }
  static Bound inc(Bound b) { return b == kNegInf || b == kPosInf ? b : b + 1; }

  static bool refine_atom(AbstractState& s, const Expr& c, bool positive) {
    if (c.kind == Expr::Kind::Binary && (c.binop == BinOp::Eq || c.binop == BinOp::Lt)) {
      SymPtr l = to_sym(*c.lhs), r = to_sym(*c.rhs);
      IntervalSet lv = s.evaluate(*l), rv = s.evaluate(*r);
      if (lv.is_bottom() || rv.is_bottom()) return false;
      if (c.binop == BinOp::Eq) {
        if (positive) {
          IntervalSet meet = lv.intersect(rv);
          if (meet.is_bottom()) return false;
          return refine_sym(s, *l, meet) && refine_sym(s, *r, meet);
        }
        auto lc = lv.singleton_value(), rc = rv.singleton_value();
        if (lc && rc) return *lc != *rc;
        if (rc) return refine_sym(s, *l, IntervalSet::singleton(*rc).complement());
        if (lc) return refine_sym(s, *r, IntervalSet::singleton(*lc).complement());
        return true;
      }
      if (positive) {
        if (rv.max() != kPosInf && lv.min() != kNegInf && lv.min() >= rv.max()) return false;
        if (!refine_sym(s, *l, IntervalSet::range(kNegInf, dec(rv.max())))) return false;
        lv = s.evaluate(*l);
        return !lv.is_bottom() && refine_sym(s, *r, IntervalSet::range(inc(lv.min()), kPosInf));
      }
      if (lv.max() != kPosInf && rv.min() != kNegInf && lv.max() < rv.min()) return false;
      if (!refine_sym(s, *l, IntervalSet::range(rv.min(), kPosInf))) return false;
      lv = s.evaluate(*l);
      return !lv.is_bottom() && refine_sym(s, *r, IntervalSet::range(kNegInf, lv.max()));
    }
    SymPtr e = to_sym(c);
    IntervalSet zero = IntervalSet::singleton(0);
    return refine_sym(s, *e, positive ? zero.complement() : zero);
  }

  // Restricts the state so that `e` evaluates within `target`; false means bottom.
  static bool refine_sym(AbstractState& s, const SymExpr& e, const IntervalSet& target) {
    switch (e.kind) {
      case SymExpr::Kind::Intervals: return !e.set.intersect(target).is_bottom();
      case SymExpr::Kind::Var: return refine_var(s, e.var, target);
      case SymExpr::Kind::Unary:
        if (e.unop == UnOp::Neg || e.unop == UnOp::BitNot)
          return refine_sym(s, *e.lhs, IntervalSet::apply(e.unop, target));
        break;
      case SymExpr::Kind::Binary:
        if (e.binop == BinOp::Add) {
          IntervalSet rv = s.evaluate(*e.rhs);
          IntervalSet want_l = IntervalSet::apply(BinOp::Add, target, IntervalSet::apply(UnOp::Neg, rv));
          if (!refine_sym(s, *e.lhs, want_l)) return false;
          IntervalSet lv = s.evaluate(*e.lhs);
          IntervalSet want_r = IntervalSet::apply(BinOp::Add, target, IntervalSet::apply(UnOp::Neg, lv));
          if (!refine_sym(s, *e.rhs, want_r)) return false;
        }
        break;
    }
    return !s.evaluate(e).intersect(target).is_bottom();
  }

  static bool refine_var(AbstractState& s, VarId v, const IntervalSet& target) {
    const SymPtr b = s.bindings_[v];
    if (b->is_intervals()) {
      IntervalSet meet = b->set.intersect(target);
      if (meet.is_bottom()) return false;
      s.bindings_[v] = sym_intervals(std::move(meet));
      return true;
    }
    return refine_sym(s, *b, target);
  }

  AbstractState& s_;
  unsigned depth_;
};

AbstractState transfer(const AbstractState& state, const Edge& edge, const Precision& prec) {
  AbstractState out = state;
  out.loc = edge.dst;
  if (out.is_bottom()) return out;
  Transfer t(out, prec.depth);
  switch (edge.op.kind) {
    case Op::Kind::Assume: t.assume(*edge.op.expr); break;
    case Op::Kind::Assign: t.assign(edge.op.var, *edge.op.expr); break;
    case Op::Kind::Havoc: t.havoc(edge.op.var); break;
  }
  out.loc = edge.dst;
  return out;
}

AbstractState union_states(const AbstractState& e1, const AbstractState& e2) {
  if (e1.is_bottom()) return e2;
  if (e2.is_bottom()) return e1;
  AbstractState out(e1.loc, e1.num_vars());
  for (VarId v = 0; v < e1.num_vars(); ++v) {
    if (equal(e1.binding(v), e2.binding(v)))
      out.bind(v, e1.binding(v));
    else
      out.bind(v, e1.value(v).unite(e2.value(v)));
  }
  return out;
}

AbstractState widen_states(const AbstractState& e1, const AbstractState& e2) {
  if (e1.is_bottom()) return e2;
  if (e2.is_bottom()) return e1;
  AbstractState out(e1.loc, e1.num_vars());
  for (VarId v = 0; v < e1.num_vars(); ++v) {
    IntervalSet a = e1.value(v), b = e2.value(v);
    Bound lo = b.min() < a.min() ? kNegInf : a.min();
    Bound hi = b.max() > a.max() ? kPosInf : a.max();
    out.bind(v, IntervalSet::range(lo, hi));
  }
  return out;
}

bool differ(const AbstractState& e1, const AbstractState& e2, const Precision& prec) {
  if (e1.is_bottom() || e2.is_bottom()) return e1.is_bottom() != e2.is_bottom();
  for (auto v : prec.important)
    if (!equal(e1.binding(v), e2.binding(v))) return true;
  return false;
}

AbstractState merge(const AbstractState& e1, const AbstractState& e2, const Precision& prec) {
  if (differ(e1, e2, prec)) return e2;
  return prec.widen ? widen_states(e1, e2) : union_states(e1, e2);
}

bool covers(const AbstractState& by, const AbstractState& state) {
  if (state.is_bottom()) return true;
  if (by.is_bottom() || by.loc != state.loc) return false;
  for (VarId v = 0; v < state.num_vars(); ++v) {
    if (equal(by.binding(v), state.binding(v))) continue;
    if (!by.binding(v)->is_intervals()) return false;
    if (!state.value(v).subset_of(by.binding(v)->set)) return false;
  }
  return true;
}

bool stop(const AbstractState& state, const std::vector<AbstractState>& reached) {
  if (state.is_bottom()) return true;
  return std::any_of(reached.begin(), reached.end(), [&](const AbstractState& r) { return covers(r, state); });
}

}  // namespace kindle
