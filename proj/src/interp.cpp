#include "kindle/interp.hpp"

#include <deque>
#include <unordered_set>

namespace kindle {

namespace {

template <typename Op>
Value checked(Op op, const char* what) {
  Value r = 0;
  if (op(r)) throw OverflowError(std::string("integer overflow in ") + what);
  return r;
}

}  // namespace

Value apply(UnOp op, Value a) {
  switch (op) {
    case UnOp::LogNot: return a == 0 ? 1 : 0;
    case UnOp::BitNot: return ~a;
    case UnOp::Neg:
      if (a == INT64_MIN) throw OverflowError("integer overflow in negation");
      return -a;
  }
  return 0;
}

std::optional<Value> apply(BinOp op, Value a, Value b) {
  Value r = 0;
  switch (op) {
    case BinOp::Add: return checked([&](Value& out) { return __builtin_add_overflow(a, b, &out); }, "addition");
    case BinOp::Mul: return checked([&](Value& out) { return __builtin_mul_overflow(a, b, &out); }, "multiplication");
    case BinOp::Div:
      if (b == 0) return std::nullopt;
      if (a == INT64_MIN && b == -1) throw OverflowError("integer overflow in division");
      return a / b;
    case BinOp::Mod: {
      if (b == 0) return std::nullopt;
      if (b == -1) return 0;
      r = a % b;
      if (r < 0) {
        auto mag = b < 0 ? std::uint64_t{0} - static_cast<std::uint64_t>(b) : static_cast<std::uint64_t>(b);
        r = static_cast<Value>(static_cast<std::uint64_t>(r) + mag);
      }
      return r;
    }
    case BinOp::Eq: return a == b ? 1 : 0;
    case BinOp::Lt: return a < b ? 1 : 0;
    case BinOp::BitXor: return a ^ b;
    case BinOp::BitOr: return a | b;
    case BinOp::BitAnd: return a & b;
    case BinOp::LogOr: return (a != 0 || b != 0) ? 1 : 0;
    case BinOp::LogAnd: return (a != 0 && b != 0) ? 1 : 0;
    case BinOp::Shr:
      if (b < 0 || b > 62) return std::nullopt;
      return a >> b;
    case BinOp::Shl:
      if (b < 0 || b > 62) return std::nullopt;
      return checked([&](Value& out) { return __builtin_mul_overflow(a, Value{1} << b, &out); }, "left shift");
    case BinOp::Union: throw Error("interval union is not a program operator");
  }
  return std::nullopt;
}

std::optional<Value> eval(const Expr& e, const Env& env) {
  switch (e.kind) {
    case Expr::Kind::Const: return e.value;
    case Expr::Kind::Var: return env.at(e.var);
    case Expr::Kind::Unary: {
      auto a = eval(*e.lhs, env);
      if (!a) return std::nullopt;
      return apply(e.unop, *a);
    }
    case Expr::Kind::Binary: {
      auto a = eval(*e.lhs, env);
      if (!a) return std::nullopt;
      if (e.binop == BinOp::LogAnd && *a == 0) return 0;
      if (e.binop == BinOp::LogOr && *a != 0) return 1;
      auto b = eval(*e.rhs, env);
      if (!b) return std::nullopt;
      return apply(e.binop, *a, *b);
    }
  }
  return std::nullopt;
}

RunResult run(const Cfa& cfa, std::span<const Value> choices, std::size_t max_steps, std::optional<Env> initial) {
  std::size_t next = 0;
  ChoiceFn choose = [&](std::size_t, std::size_t) { return next < choices.size() ? choices[next++] : Value{0}; };
  return run(cfa, choose, max_steps, cfa.num_locations, std::move(initial));
}

RunResult run(const Cfa& cfa, const ChoiceFn& choose, std::size_t max_steps, Loc loop_head,
              std::optional<Env> initial) {
  RunResult res;
  res.trace.initial.loc = cfa.entry;
  res.trace.initial.env = initial ? std::move(*initial) : Env(cfa.vars.size(), 0);
  res.trace.initial.env.resize(cfa.vars.size(), 0);
  ConcreteState cur = res.trace.initial;
  std::size_t visits = cur.loc == loop_head ? 1 : 0;
  for (std::size_t steps = 0;; ++steps) {
    if (cur.loc == cfa.error) {
      res.status = RunStatus::ErrorReached;
      return res;
    }
    const auto& outs = cfa.out_edges(cur.loc);
    if (outs.empty()) {
      res.status = RunStatus::Completed;
      return res;
    }
    if (steps >= max_steps) {
      res.status = RunStatus::StepBudgetExhausted;
      return res;
    }
    std::optional<std::size_t> taken;
    for (auto id : outs) {
      const Op& op = cfa.edges[id].op;
      if (op.kind == Op::Kind::Assume) {
        auto c = eval(*op.expr, cur.env);
        if (!c) {
          res.status = RunStatus::Trapped;
          return res;
        }
        if (*c == 0) continue;
      } else if (op.kind == Op::Kind::Assign) {
        auto v = eval(*op.expr, cur.env);
        if (!v) {
          res.status = RunStatus::Trapped;
          return res;
        }
        cur.env[op.var] = *v;
      } else {
        Value v = choose(id, visits);
        res.trace.choices.push_back(v);
        cur.env[op.var] = v;
      }
      taken = id;
      break;
    }
    if (!taken) {
      res.status = RunStatus::Blocked;
      return res;
    }
    cur.loc = cfa.edges[*taken].dst;
    if (cur.loc == loop_head) ++visits;
    res.trace.steps.push_back(TraceStep{*taken, cur});
  }
}

std::size_t loop_iterations(const Trace& trace, Loc loop_head) {
  std::size_t visits = trace.initial.loc == loop_head ? 1 : 0;
  for (const auto& s : trace.steps)
    if (s.state.loc == loop_head) ++visits;
  return visits == 0 ? 0 : visits - 1;
}

namespace {

struct StateHash {
  std::size_t operator()(const ConcreteState& s) const {
    std::size_t h = std::hash<Loc>()(s.loc);
    for (auto v : s.env) h = h * 1000003u ^ std::hash<Value>()(v);
    return h;
  }
};

struct Node {
  ConcreteState state;
  std::size_t parent = SIZE_MAX;
  std::size_t edge = 0;
  std::optional<Value> choice;
  std::size_t visits = 0;
};

// Level-by-level exploration shared by shortest_cex and for_each_reachable.
// `on_node` returns true to stop the search.
class Explorer {
 public:
  Explorer(const NormalizedCfa& ncfa, std::span<const Value> domain, std::size_t max_iter, std::size_t max_states)
      : ncfa_(ncfa), domain_(domain), max_iter_(max_iter), max_states_(max_states) {}

  template <typename F>
  std::optional<std::size_t> explore(F&& on_node) {
    const Cfa& cfa = ncfa_.cfa;
    std::deque<std::size_t> level;
    std::deque<std::size_t> next_level;
    add(Node{ConcreteState{cfa.entry, Env(cfa.vars.size(), 0)}, SIZE_MAX, 0, std::nullopt,
             cfa.entry == ncfa_.loop_head ? 1u : 0u},
        level);
    while (!level.empty()) {
      while (!level.empty()) {
        std::size_t id = level.front();
        level.pop_front();
        if (on_node(nodes_[id])) return id;
        expand(id, level, next_level);
        if (exhausted_) return std::nullopt;
      }
      std::swap(level, next_level);
    }
    return std::nullopt;
  }

  const std::vector<Node>& nodes() const { return nodes_; }
  bool exhausted() const { return exhausted_; }

 private:
  void add(Node n, std::deque<std::size_t>& queue) {
    if (!seen_.insert(n.state).second) return;
    if (nodes_.size() >= max_states_) {
      exhausted_ = true;
      return;
    }
    nodes_.push_back(std::move(n));
    queue.push_back(nodes_.size() - 1);
  }

  void successor(std::size_t parent, std::size_t edge, Env env, std::optional<Value> choice,
                 std::deque<std::size_t>& level, std::deque<std::size_t>& next_level) {
    const Cfa& cfa = ncfa_.cfa;
    Loc dst = cfa.edges[edge].dst;
    std::size_t visits = nodes_[parent].visits;
    if (dst == ncfa_.loop_head) {
      if (visits >= max_iter_ + 1) return;
      ++visits;
      add(Node{ConcreteState{dst, std::move(env)}, parent, edge, choice, visits}, next_level);
    } else {
      add(Node{ConcreteState{dst, std::move(env)}, parent, edge, choice, visits}, level);
    }
  }

  void expand(std::size_t id, std::deque<std::size_t>& level, std::deque<std::size_t>& next_level) {
    const Cfa& cfa = ncfa_.cfa;
    Loc loc = nodes_[id].state.loc;
    if (loc == cfa.error) return;
    for (auto eid : cfa.out_edges(loc)) {
      const Op& op = cfa.edges[eid].op;
      const Env& env = nodes_[id].state.env;
      if (op.kind == Op::Kind::Assume) {
        auto c = eval(*op.expr, env);
        if (c && *c != 0) successor(id, eid, env, std::nullopt, level, next_level);
      } else if (op.kind == Op::Kind::Assign) {
        auto v = eval(*op.expr, env);
        if (!v) continue;
        Env next = env;
        next[op.var] = *v;
        successor(id, eid, std::move(next), std::nullopt, level, next_level);
      } else {
        for (Value d : domain_) {
          Env next = nodes_[id].state.env;
          next[op.var] = d;
          successor(id, eid, std::move(next), d, level, next_level);
        }
      }
    }
  }

  const NormalizedCfa& ncfa_;
  std::span<const Value> domain_;
  std::size_t max_iter_;
  std::size_t max_states_;
  std::vector<Node> nodes_;
  std::unordered_set<ConcreteState, StateHash> seen_;
  bool exhausted_ = false;
};

}  // namespace

std::optional<Counterexample> shortest_cex(const NormalizedCfa& ncfa, std::span<const Value> domain,
                                           std::size_t max_loop_iterations, std::size_t max_states, bool* exhausted) {
  Explorer ex(ncfa, domain, max_loop_iterations, max_states);
  auto hit = ex.explore([&](const Node& n) { return n.state.loc == ncfa.cfa.error; });
  if (exhausted) *exhausted = ex.exhausted();
  if (!hit) return std::nullopt;

  const auto& nodes = ex.nodes();
  std::vector<std::size_t> path;
  for (std::size_t i = *hit; i != SIZE_MAX; i = nodes[i].parent) path.push_back(i);
  Counterexample cex;
  cex.trace.initial = nodes[path.back()].state;
  for (auto it = path.rbegin() + 1; it != path.rend(); ++it) {
    const Node& n = nodes[*it];
    cex.trace.steps.push_back(TraceStep{n.edge, n.state});
    if (n.choice) cex.trace.choices.push_back(*n.choice);
  }
  std::size_t visits = nodes[*hit].visits;
  cex.iterations = visits == 0 ? 0 : visits - 1;
  return cex;
}

bool for_each_reachable(const NormalizedCfa& ncfa, std::span<const Value> domain, std::size_t max_loop_iterations,
                        const std::function<void(const ConcreteState&)>& visit, std::size_t max_states) {
  Explorer ex(ncfa, domain, max_loop_iterations, max_states);
  ex.explore([&](const Node& n) {
    visit(n.state);
    return false;
  });
  return !ex.exhausted();
}

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::ErrorReached: return "error-reached";
    case RunStatus::Completed: return "completed";
    case RunStatus::StepBudgetExhausted: return "step-budget-exhausted";
    case RunStatus::Trapped: return "trapped";
    case RunStatus::Blocked: return "blocked";
  }
  return "?";
}

}  // namespace kindle
