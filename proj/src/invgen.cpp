#include "kindle/invgen.hpp"

#include <algorithm>
#include <deque>

#include "kindle/encoder.hpp"

namespace kindle {

InvariantSnapshot SnapshotChannel::get_currently_known_invariant() const {
  std::lock_guard lock(mu_);
  return history_.back();
}

void SnapshotChannel::publish(const Formula& f) {
  std::lock_guard lock(mu_);
  InvariantSnapshot next = history_.back();
  next.version += 1;
  next.formula = t_and(next.formula, f);
  history_.push_back(std::move(next));
}

void SnapshotChannel::mark_proved_safe() {
  std::lock_guard lock(mu_);
  history_.back().proved_safe = true;
}

std::vector<InvariantSnapshot> SnapshotChannel::history() const {
  std::lock_guard lock(mu_);
  return history_;
}

std::vector<VarId> select_variables(const NormalizedCfa& ncfa, std::size_t count) {
  const Cfa& cfa = ncfa.cfa;
  std::vector<std::size_t> dist(cfa.num_locations, SIZE_MAX);
  std::deque<Loc> queue{cfa.error};
  dist[cfa.error] = 0;
  std::vector<bool> chosen(cfa.vars.size(), false);
  std::vector<VarId> out;
  // candidates of the current depth: (position in edge, name, var)
  std::vector<std::tuple<std::size_t, std::string, VarId>> level;
  std::size_t current = 0;
  auto flush = [&] {
    std::sort(level.begin(), level.end());
    for (auto& [pos, name, v] : level) {
      if (chosen[v]) continue;
      chosen[v] = true;
      out.push_back(v);
    }
    level.clear();
  };
  while (!queue.empty()) {
    Loc d = queue.front();
    queue.pop_front();
    if (dist[d] != current) {
      flush();
      current = dist[d];
    }
    for (auto eid : cfa.in_edges(d)) {
      const Edge& e = cfa.edges[eid];
      if (e.op.kind == Op::Kind::Assume) {
        auto vars = collect_vars(*e.op.expr);
        std::size_t pos = 0;
        for (auto v : vars)
          if (v != ncfa.pc_var) level.emplace_back(pos++, cfa.vars[v], v);
      }
      if (dist[e.src] == SIZE_MAX) {
        dist[e.src] = dist[d] + 1;
        queue.push_back(e.src);
      }
    }
  }
  flush();
  if (out.size() > count) out.resize(count);
  return out;
}

Precision initial_precision() { return Precision{{}, 1, true}; }

Precision terminal_precision(const NormalizedCfa& ncfa) {
  Precision p{{}, 2, false};
  for (VarId v = 0; v < ncfa.cfa.vars.size(); ++v) p.important.push_back(v);
  return p;
}

std::optional<Precision> refine_precision(const Precision& p, std::size_t round, const NormalizedCfa& ncfa) {
  Precision terminal = terminal_precision(ncfa);
  if (p == terminal) return std::nullopt;
  Precision next = p;
  auto grow = [&](std::size_t size) {
    auto all = select_variables(ncfa, SIZE_MAX);
    if (size > all.size()) {
      next.important = terminal.important;
    } else {
      all.resize(size);
      std::sort(all.begin(), all.end());
      next.important = std::move(all);
    }
  };
  switch (round) {
    case 0: return p;
    case 1: grow(1); break;
    case 2: next.depth = 2; break;
    case 3: grow(2); break;
    case 4: next.widen = false; break;
    default: {
      std::size_t shift = std::min<std::size_t>(round - 3, 40);
      grow(std::size_t{1} << shift);
      break;
    }
  }
  return next;
}

Formula membership(VarId v, const IntervalSet& set) {
  if (set.is_bottom()) return t_false();
  if (set.is_top()) return t_true();
  TermPtr x = t_var(v);
  std::vector<Formula> parts;
  for (const auto& iv : set.intervals()) {
    if (iv.lo == iv.hi) {
      parts.push_back(t_eq(x, t_int(iv.lo)));
      continue;
    }
    std::vector<Formula> bounds;
    if (iv.lo != kNegInf) bounds.push_back(t_le(t_int(iv.lo), x));
    if (iv.hi != kPosInf) bounds.push_back(t_le(x, t_int(iv.hi)));
    parts.push_back(t_and(bounds));
  }
  return t_or(parts);
}

namespace {

std::optional<ExprPtr> to_expr(const SymExpr& e) {
  switch (e.kind) {
    case SymExpr::Kind::Intervals:
      if (auto c = e.set.singleton_value()) return make_const(*c);
      return std::nullopt;
    case SymExpr::Kind::Var: return make_var(e.var);
    case SymExpr::Kind::Unary: {
      auto a = to_expr(*e.lhs);
      if (!a) return std::nullopt;
      return make_unary(e.unop, *a);
    }
    case SymExpr::Kind::Binary: {
      if (e.binop == BinOp::Union) return std::nullopt;
      auto a = to_expr(*e.lhs);
      auto b = to_expr(*e.rhs);
      if (!a || !b) return std::nullopt;
      return make_binary(e.binop, *a, *b);
    }
  }
  return std::nullopt;
}

}  // namespace

Formula state_to_formula(const AbstractState& s) {
  if (s.is_bottom()) return t_false();
  std::vector<TermPtr> env;
  for (VarId v = 0; v < s.num_vars(); ++v) env.push_back(t_var(v));
  std::vector<Formula> parts;
  for (VarId v = 0; v < s.num_vars(); ++v) {
    const SymPtr& b = s.binding(v);
    parts.push_back(membership(v, s.value(v)));
    if (b->is_intervals()) continue;
    if (auto e = to_expr(*b)) {
      EncodedTerm enc = encode_expr(**e, env);
      parts.push_back(enc.def);
      parts.push_back(t_eq(t_var(v), enc.value));
    }
  }
  return t_and(parts);
}

Formula states_to_formula(const std::vector<AbstractState>& reached, Loc loop_head) {
  std::vector<Formula> disjuncts;
  for (const auto& s : reached)
    if (s.loc == loop_head && !s.is_bottom()) disjuncts.push_back(state_to_formula(s));
  return t_or(disjuncts);
}

InvariantEngine::InvariantEngine(const NormalizedCfa& ncfa, SnapshotChannel& channel, InvgenConfig config)
    : ncfa_(ncfa), channel_(channel), config_(config) {}

InvariantEngine::~InvariantEngine() { stop(); }

RoundResult InvariantEngine::run_round(const Precision& prec, std::stop_token stop) {
  CpaBudget budget;
  budget.deadline = std::chrono::steady_clock::now() + config_.round_budget;
  budget.max_states = config_.max_states;
  budget.stop = stop;
  CpaResult cpa = cpa_algorithm(ncfa_, initial_state(ncfa_), prec, budget);

  RoundResult r;
  r.precision = prec;
  r.complete = cpa.complete;
  r.states = cpa.states_created;
  if (config_.keep_reached) r.reached = cpa.reached;
  if (cpa.complete) {
    Formula f = states_to_formula(cpa.reached, ncfa_.loop_head);
    channel_.publish(f);
    r.formula = f;
    r.proved_safe = std::none_of(cpa.reached.begin(), cpa.reached.end(), [&](const AbstractState& s) {
      return s.loc == ncfa_.cfa.error && !s.is_bottom();
    });
    if (r.proved_safe) channel_.mark_proved_safe();
  }
  std::lock_guard lock(mu_);
  results_.push_back(r);
  return r;
}

std::vector<RoundResult> InvariantEngine::run_rounds(std::size_t rounds, std::stop_token stop) {
  std::vector<RoundResult> out;
  Precision prec = initial_precision();
  std::optional<Precision> last_run;
  for (std::size_t round = 0; out.size() < rounds; ++round) {
    if (stop.stop_requested()) break;
    auto next = refine_precision(prec, round, ncfa_);
    if (!next) break;
    prec = *next;
    // an unchanged precision would repeat the previous run
    if (last_run && *last_run == prec) continue;
    last_run = prec;
    out.push_back(run_round(prec, stop));
    if (out.back().proved_safe) break;
  }
  return out;
}

void InvariantEngine::generate(std::stop_token stop) { run_rounds(SIZE_MAX, stop); }

void InvariantEngine::start_async() {
  worker_ = std::jthread([this](std::stop_token st) { generate(st); });
}

void InvariantEngine::stop() {
  if (worker_.joinable()) {
    worker_.request_stop();
    worker_.join();
  }
}

std::vector<RoundResult> InvariantEngine::results() const {
  std::lock_guard lock(mu_);
  return results_;
}

}  // namespace kindle
