#include "kindle/encoder.hpp"

#include <algorithm>
#include <deque>

namespace kindle {

std::string to_string(HavocStrategy s) {
  switch (s) {
    case HavocStrategy::SoundAll: return "all";
    case HavocStrategy::SoundLoopModified: return "loop-modified";
    case HavocStrategy::UnsoundTerminationVars: return "termination-vars";
  }
  return "?";
}

namespace {

struct Enc {
  TermPtr value;
  bool is_bool = false;
  Formula def = t_true();
};

TermPtr as_int(const Enc& e) { return e.is_bool ? t_ite(e.value, t_int(1), t_int(0)) : e.value; }
Formula as_bool(const Enc& e) { return e.is_bool ? e.value : t_not(t_eq(e.value, t_int(0))); }

std::optional<Value> literal(const TermPtr& t) {
  if (t->kind == Term::Kind::IntLit) return t->int_value;
  return std::nullopt;
}

TermPtr pow2(unsigned i) { return t_int(Value{1} << i); }

// x & c for a literal c, as a sum of extracted bits.
TermPtr and_literal(const TermPtr& x, Value c) {
  if (c == 0) return t_int(0);
  if (c == -1) return x;
  if (c < 0) return t_sub(x, and_literal(x, ~c));
  TermPtr sum = t_int(0);
  for (unsigned i = 0; i < 63; ++i) {
    if (!((c >> i) & 1)) continue;
    TermPtr bit = t_mod(i == 0 ? x : t_div(x, pow2(i)), t_int(2));
    sum = t_add(sum, t_mul(pow2(i), bit));
  }
  return sum;
}

Enc encode(const Expr& e, const std::vector<TermPtr>& env);

Enc encode_binary(const Expr& e, const std::vector<TermPtr>& env) {
  Enc a = encode(*e.lhs, env);
  Enc b = encode(*e.rhs, env);
  Enc r;
  if (e.binop == BinOp::LogAnd || e.binop == BinOp::LogOr) {
    Formula x = as_bool(a), y = as_bool(b);
    r.is_bool = true;
    if (e.binop == BinOp::LogAnd) {
      r.value = t_and(x, y);
      r.def = t_and(a.def, t_or(t_not(x), b.def));
    } else {
      r.value = t_or(x, y);
      r.def = t_and(a.def, t_or(x, b.def));
    }
    return r;
  }
  TermPtr x = as_int(a), y = as_int(b);
  r.def = t_and(a.def, b.def);
  auto lx = literal(x), ly = literal(y);
  if (lx && ly && e.binop != BinOp::Union) {
    try {
      auto v = apply(e.binop, *lx, *ly);
      if (!v) {
        r.value = t_int(0);
        r.def = t_false();
      } else {
        r.value = t_int(*v);
      }
      return r;
    } catch (const OverflowError&) {
      // left symbolic; unbounded integers do not overflow
    }
  }
  auto shift_ok = [&] { return t_and(t_le(t_int(0), y), t_le(y, t_int(62))); };
  switch (e.binop) {
    case BinOp::Add: r.value = t_add(x, y); break;
    case BinOp::Mul: r.value = t_mul(x, y); break;
    case BinOp::Div:
      r.def = t_and(r.def, t_not(t_eq(y, t_int(0))));
      r.value = t_ite(t_le(t_int(0), x), t_div(x, y), t_neg(t_div(t_neg(x), y)));
      break;
    case BinOp::Mod:
      r.def = t_and(r.def, t_not(t_eq(y, t_int(0))));
      r.value = t_mod(x, y);
      break;
    case BinOp::Eq:
      r.is_bool = true;
      r.value = t_eq(x, y);
      break;
    case BinOp::Lt:
      r.is_bool = true;
      r.value = t_lt(x, y);
      break;
    case BinOp::Shl:
    case BinOp::Shr:
      if (ly) {
        if (*ly < 0 || *ly > 62) {
          r.value = t_int(0);
          r.def = t_false();
        } else if (e.binop == BinOp::Shl) {
          r.value = t_mul(x, pow2(static_cast<unsigned>(*ly)));
        } else {
          r.value = t_div(x, pow2(static_cast<unsigned>(*ly)));
        }
      } else {
        r.def = t_and(r.def, shift_ok());
        r.value = t_uf(e.binop == BinOp::Shl ? "int_shl" : "int_shr", {x, y});
      }
      break;
    case BinOp::BitAnd:
    case BinOp::BitOr:
    case BinOp::BitXor: {
      if (!lx && !ly) {
        const char* name = e.binop == BinOp::BitAnd ? "int_and" : e.binop == BinOp::BitOr ? "int_or" : "int_xor";
        r.value = t_uf(name, {x, y});
        break;
      }
      TermPtr both = lx ? and_literal(y, *lx) : and_literal(x, *ly);
      if (e.binop == BinOp::BitAnd)
        r.value = both;
      else if (e.binop == BinOp::BitOr)
        r.value = t_sub(t_add(x, y), both);
      else
        r.value = t_sub(t_add(x, y), t_mul(t_int(2), both));
      break;
    }
    case BinOp::Union: throw EncodingError("interval union is not a program operator");
    case BinOp::LogAnd:
    case BinOp::LogOr: break;
  }
  return r;
}

Enc encode(const Expr& e, const std::vector<TermPtr>& env) {
  switch (e.kind) {
    case Expr::Kind::Const: return Enc{t_int(e.value)};
    case Expr::Kind::Var: return Enc{env.at(e.var)};
    case Expr::Kind::Unary: {
      Enc a = encode(*e.lhs, env);
      Enc r;
      r.def = a.def;
      switch (e.unop) {
        case UnOp::LogNot:
          r.is_bool = true;
          r.value = t_not(as_bool(a));
          break;
        case UnOp::Neg: r.value = t_neg(as_int(a)); break;
        case UnOp::BitNot: r.value = t_sub(t_neg(as_int(a)), t_int(1)); break;
      }
      return r;
    }
    case Expr::Kind::Binary: return encode_binary(e, env);
  }
  throw EncodingError("unknown expression");
}

bool atomic(const TermPtr& t) {
  return t->kind == Term::Kind::BoolLit || t->kind == Term::Kind::IntLit || t->kind == Term::Kind::Symbol;
}

struct Contribution {
  Formula guard;
  std::vector<TermPtr> env;
};

struct Node {
  Formula reach = t_false();
  std::vector<TermPtr> env;
  std::vector<Contribution> in;
};

}  // namespace

EncodedTerm encode_expr(const Expr& e, const std::vector<TermPtr>& env) {
  Enc r = encode(e, env);
  return {as_int(r), r.def};
}

RegionEncoding encode_region(const NormalizedCfa& ncfa, Loc start, const std::vector<TermPtr>& env,
                             const std::string& tag) {
  const Cfa& cfa = ncfa.cfa;
  const Loc head = ncfa.loop_head;
  const auto& names = cfa.vars;
  const std::size_t n = cfa.num_locations;
  const Loc end = static_cast<Loc>(n);  // arrival at the loop head

  std::vector<bool> in_region(n, false);
  std::deque<Loc> queue{start};
  in_region[start] = true;
  while (!queue.empty()) {
    Loc u = queue.front();
    queue.pop_front();
    for (auto eid : cfa.out_edges(u)) {
      Loc d = cfa.edges[eid].dst;
      if (d == head || in_region[d]) continue;
      in_region[d] = true;
      queue.push_back(d);
    }
  }

  std::vector<std::size_t> indegree(n, 0);
  for (Loc u = 0; u < n; ++u) {
    if (!in_region[u]) continue;
    for (auto eid : cfa.out_edges(u)) {
      Loc d = cfa.edges[eid].dst;
      if (d != head) ++indegree[d];
    }
  }
  std::vector<Loc> order;
  std::deque<Loc> ready;
  for (Loc u = 0; u < n; ++u)
    if (in_region[u] && indegree[u] == 0) ready.push_back(u);
  while (!ready.empty()) {
    Loc u = ready.front();
    ready.pop_front();
    order.push_back(u);
    for (auto eid : cfa.out_edges(u)) {
      Loc d = cfa.edges[eid].dst;
      if (d != head && --indegree[d] == 0) ready.push_back(d);
    }
  }
  if (order.size() != static_cast<std::size_t>(std::count(in_region.begin(), in_region.end(), true)))
    throw EncodingError("cycle that avoids the loop head");
  if (order.empty() || order.front() != start) throw EncodingError("region start has predecessors");

  RegionEncoding out;
  std::vector<Node> nodes(n + 1);
  auto prefix = [&](VarId v) { return names[v] + "@" + tag; };

  auto combine = [&](Node& node, Loc loc) {
    std::erase_if(node.in, [](const Contribution& c) { return is_false(c.guard); });
    if (node.in.empty()) {
      node.reach = t_false();
      node.env = env;
      return;
    }
    std::vector<Formula> guards;
    for (const auto& c : node.in) guards.push_back(c.guard);
    Formula any = t_or(guards);
    if (atomic(any)) {
      node.reach = any;
    } else {
      node.reach = t_sym("reach@" + tag + "." + std::to_string(loc), Sort::Bool);
      out.defs.push_back(t_eq(node.reach, any));
    }
    node.env = node.in.front().env;
    for (VarId v = 0; v < names.size(); ++v) {
      bool agree = std::all_of(node.in.begin(), node.in.end(),
                               [&](const Contribution& c) { return same(c.env[v], node.env[v]); });
      if (agree) continue;
      TermPtr aux = t_sym(prefix(v) + ".L" + std::to_string(loc), Sort::Int);
      for (const auto& c : node.in) out.defs.push_back(t_implies(c.guard, t_eq(aux, c.env[v])));
      node.env[v] = aux;
    }
    node.in.clear();
  };

  for (Loc u : order) {
    Node& node = nodes[u];
    if (u == start) {
      node.reach = t_true();
      node.env = env;
    } else {
      combine(node, u);
    }
    if (is_false(node.reach)) continue;
    for (auto eid : cfa.out_edges(u)) {
      const Edge& edge = cfa.edges[eid];
      Contribution c;
      c.env = node.env;
      Formula guard;
      switch (edge.op.kind) {
        case Op::Kind::Assume: {
          Enc cond = encode(*edge.op.expr, node.env);
          guard = t_and({node.reach, cond.def, as_bool(cond)});
          break;
        }
        case Op::Kind::Assign: {
          Enc val = encode(*edge.op.expr, node.env);
          guard = t_and(node.reach, val.def);
          TermPtr x = as_int(val);
          if (!atomic(x)) {
            TermPtr aux = t_sym(prefix(edge.op.var) + ".a" + std::to_string(eid), Sort::Int);
            out.defs.push_back(t_eq(aux, x));
            x = aux;
          }
          c.env[edge.op.var] = x;
          break;
        }
        case Op::Kind::Havoc:
          guard = node.reach;
          c.env[edge.op.var] = t_sym(prefix(edge.op.var) + ".h" + std::to_string(eid), Sort::Int);
          break;
      }
      if (is_false(guard)) continue;
      if (!atomic(guard)) {
        TermPtr aux = t_sym("reach@" + tag + ".e" + std::to_string(eid), Sort::Bool);
        out.defs.push_back(t_eq(aux, guard));
        guard = aux;
      }
      c.guard = guard;
      nodes[edge.dst == head ? end : edge.dst].in.push_back(std::move(c));
    }
  }

  combine(nodes[end], head);
  out.reach_end = nodes[end].reach;
  out.end_env = nodes[end].env;
  out.reach_error = in_region[cfa.error] ? nodes[cfa.error].reach : t_false();
  return out;
}

TransitionSystem::TransitionSystem(const NormalizedCfa& ncfa) : ncfa_(&ncfa) {
  std::vector<TermPtr> env;
  for (const auto& name : ncfa.cfa.vars) env.push_back(t_sym(name + "@init", Sort::Int));
  pre_ = encode_region(ncfa, ncfa.cfa.entry, env, "p");
}

TermPtr TransitionSystem::var_at(VarId v, std::size_t frame) const {
  return t_sym(ncfa_->cfa.vars.at(v) + "@" + std::to_string(frame), Sort::Int);
}

Formula TransitionSystem::at_frame(const Formula& f, std::size_t frame) const {
  return instantiate(f, [&](VarId v) { return var_at(v, frame); });
}

Formula TransitionSystem::init() const {
  std::vector<Formula> parts{pre_.reach_end};
  for (VarId v = 0; v < num_vars(); ++v) parts.push_back(t_eq(var_at(v, 0), pre_.end_env[v]));
  return t_and(parts);
}

RegionEncoding& TransitionSystem::frame(std::size_t i) {
  auto it = frames_.find(i);
  if (it != frames_.end()) return it->second;
  std::vector<TermPtr> env;
  for (VarId v = 0; v < num_vars(); ++v) env.push_back(var_at(v, i));
  return frames_.emplace(i, encode_region(*ncfa_, ncfa_->loop_head, env, std::to_string(i))).first->second;
}

const std::vector<Formula>& TransitionSystem::defs(std::size_t i) { return frame(i).defs; }

Formula TransitionSystem::trans(std::size_t i) {
  const RegionEncoding& r = frame(i);
  std::vector<Formula> parts{r.reach_end};
  for (VarId v = 0; v < num_vars(); ++v) parts.push_back(t_eq(var_at(v, i + 1), r.end_env[v]));
  return t_and(parts);
}

Formula TransitionSystem::prop(std::size_t i) { return t_not(frame(i).reach_error); }

Formula TransitionSystem::pc_range(std::size_t i) const {
  if (ncfa_->num_loops < 2) return t_true();
  TermPtr pc = var_at(ncfa_->pc_var, i);
  return t_and(t_le(t_int(1), pc), t_le(pc, t_int(static_cast<Value>(ncfa_->num_loops))));
}

Formula base_defs(TransitionSystem& ts, std::size_t frames) {
  std::vector<Formula> parts(ts.pre_defs().begin(), ts.pre_defs().end());
  for (std::size_t i = 0; i <= frames; ++i) {
    const auto& d = ts.defs(i);
    parts.insert(parts.end(), d.begin(), d.end());
  }
  return t_and(parts);
}

Formula encode_violation_at(TransitionSystem& ts, std::size_t n) {
  std::vector<Formula> path{ts.init()};
  for (std::size_t i = 0; i < n; ++i) path.push_back(ts.trans(i));
  path.push_back(t_not(ts.prop(n)));
  Formula f = t_and(path);
  if (n == 0) f = t_or(ts.init_error(), f);
  return f;
}

Formula encode_base_case(TransitionSystem& ts, std::size_t k) {
  std::vector<Formula> cases;
  for (std::size_t n = 0; n <= k; ++n) cases.push_back(encode_violation_at(ts, n));
  return t_and(base_defs(ts, k), t_or(cases));
}

Formula encode_forward_condition(TransitionSystem& ts, std::size_t k) {
  std::vector<Formula> parts{base_defs(ts, k), ts.init()};
  for (std::size_t i = 0; i < k; ++i) parts.push_back(ts.trans(i));
  return t_and(parts);
}

Formula encode_step_frames(TransitionSystem& ts, std::size_t k, HavocStrategy strategy) {
  std::vector<Formula> parts;
  for (std::size_t i = 0; i <= k; ++i) {
    const auto& d = ts.defs(i);
    parts.insert(parts.end(), d.begin(), d.end());
    parts.push_back(ts.pc_range(i));
  }
  for (std::size_t i = 0; i < k; ++i) {
    parts.push_back(ts.prop(i));
    parts.push_back(ts.trans(i));
  }
  parts.push_back(t_not(ts.prop(k)));

  if (strategy != HavocStrategy::SoundAll) {
    const NormalizedCfa& ncfa = ts.ncfa();
    const auto& havocked =
        strategy == HavocStrategy::SoundLoopModified ? ncfa.loop_modified : ncfa.termination_vars;
    std::vector<Formula> pinned;
    for (VarId v = 0; v < ts.num_vars(); ++v)
      if (!std::binary_search(havocked.begin(), havocked.end(), v))
        pinned.push_back(t_eq(ts.var_at(v, 0), ts.pre_value(v)));
    if (!pinned.empty()) {
      parts.insert(parts.end(), ts.pre_defs().begin(), ts.pre_defs().end());
      parts.push_back(ts.pre_reaches_head());
      parts.insert(parts.end(), pinned.begin(), pinned.end());
    }
  }
  return t_and(parts);
}

Formula encode_step_invariant(TransitionSystem& ts, std::size_t k, const Formula& inv) {
  std::vector<Formula> parts;
  for (std::size_t i = 0; i <= k; ++i) parts.push_back(ts.at_frame(inv, i));
  return t_and(parts);
}

Formula encode_step_case(TransitionSystem& ts, std::size_t k, const Formula& inv, HavocStrategy strategy) {
  return t_and(encode_step_frames(ts, k, strategy), encode_step_invariant(ts, k, inv));
}

Trace extract_trace(const Model& model, const TransitionSystem& ts, std::size_t k) {
  const NormalizedCfa& ncfa = ts.ncfa();
  const Cfa& cfa = ncfa.cfa;
  Env initial(cfa.vars.size(), 0);
  for (VarId v = 0; v < cfa.vars.size(); ++v)
    if (auto x = model.get(cfa.vars[v] + "@init")) initial[v] = *x;
  auto choose = [&](std::size_t edge, std::size_t visits) -> Value {
    std::string tag = visits == 0 ? "p" : std::to_string(visits - 1);
    auto x = model.get(cfa.vars[cfa.edges[edge].op.var] + "@" + tag + ".h" + std::to_string(edge));
    return x.value_or(0);
  };
  // k + 1 visits plus the path to the error in the last frame
  std::size_t budget = (k + 2) * (cfa.edges.size() + 1) + cfa.num_locations + 16;
  RunResult r = run(cfa, choose, budget, ncfa.loop_head, initial);
  if (r.status != RunStatus::ErrorReached)
    throw EncodingError("model does not replay to the error location (" + to_string(r.status) + ")");
  return r.trace;
}

}  // namespace kindle
