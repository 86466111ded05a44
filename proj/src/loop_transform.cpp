#include "kindle/loop_transform.hpp"

#include <algorithm>
#include <set>

namespace kindle {

namespace {

std::vector<bool> reachable(const Cfa& cfa, Loc from, bool forward) {
  std::vector<bool> seen(cfa.num_locations, false);
  std::vector<Loc> stack{from};
  seen[from] = true;
  while (!stack.empty()) {
    Loc l = stack.back();
    stack.pop_back();
    const auto& adj = forward ? cfa.out_edges(l) : cfa.in_edges(l);
    for (auto id : adj) {
      Loc next = forward ? cfa.edges[id].dst : cfa.edges[id].src;
      if (!seen[next]) {
        seen[next] = true;
        stack.push_back(next);
      }
    }
  }
  return seen;
}

// Iterative dataflow dominators; fine for the program sizes we handle.
std::vector<std::vector<bool>> dominators(const Cfa& cfa, const std::vector<bool>& live) {
  std::size_t n = cfa.num_locations;
  std::vector<std::vector<bool>> dom(n, std::vector<bool>(n, true));
  dom[cfa.entry].assign(n, false);
  dom[cfa.entry][cfa.entry] = true;
  bool changed = true;
  while (changed) {
    changed = false;
    for (Loc l = 0; l < n; ++l) {
      if (l == cfa.entry || !live[l]) continue;
      std::vector<bool> next(n, true);
      for (auto id : cfa.in_edges(l)) {
        Loc p = cfa.edges[id].src;
        if (!live[p]) continue;
        for (std::size_t i = 0; i < n; ++i) next[i] = next[i] && dom[p][i];
      }
      next[l] = true;
      if (next != dom[l]) {
        dom[l] = std::move(next);
        changed = true;
      }
    }
  }
  return dom;
}

void check_reducible(const Cfa& cfa) {
  auto live = reachable(cfa, cfa.entry, true);
  auto dom = dominators(cfa, live);
  // Every back edge found by DFS must target a dominator of its source.
  std::vector<int> state(cfa.num_locations, 0);
  std::vector<std::pair<Loc, std::size_t>> stack{{cfa.entry, 0}};
  state[cfa.entry] = 1;
  while (!stack.empty()) {
    auto& [loc, idx] = stack.back();
    const auto& outs = cfa.out_edges(loc);
    if (idx == outs.size()) {
      state[loc] = 2;
      stack.pop_back();
      continue;
    }
    Loc src = loc;
    Loc dst = cfa.edges[outs[idx++]].dst;
    if (state[dst] == 1) {
      if (!dom[src][dst]) throw UnsupportedProgram("irreducible control flow");
    } else if (state[dst] == 0) {
      state[dst] = 1;
      stack.emplace_back(dst, 0);
    }
  }
}

}  // namespace

std::vector<std::size_t> reverse_postorder(const Cfa& cfa) {
  std::vector<std::size_t> order(cfa.num_locations, 0);
  std::vector<Loc> post;
  std::vector<bool> seen(cfa.num_locations, false);
  std::vector<std::pair<Loc, std::size_t>> stack{{cfa.entry, 0}};
  seen[cfa.entry] = true;
  while (!stack.empty()) {
    auto& [loc, idx] = stack.back();
    const auto& outs = cfa.out_edges(loc);
    if (idx == outs.size()) {
      post.push_back(loc);
      stack.pop_back();
      continue;
    }
    Loc dst = cfa.edges[outs[idx++]].dst;
    if (!seen[dst]) {
      seen[dst] = true;
      stack.emplace_back(dst, 0);
    }
  }
  std::size_t next = 0;
  for (auto it = post.rbegin(); it != post.rend(); ++it) order[*it] = next++;
  for (Loc l = 0; l < cfa.num_locations; ++l)
    if (!seen[l]) order[l] = next++;
  return order;
}

NormalizedCfa to_single_loop(const Cfa& input) {
  check_reducible(input);
  NormalizedCfa out;
  out.cfa = input;
  Cfa& cfa = out.cfa;
  out.pc_var = static_cast<VarId>(cfa.vars.size());
  cfa.vars.push_back("__pc");

  auto heads = loop_heads(input);
  out.num_loops = heads.size();

  if (heads.empty()) {
    out.loop_head = cfa.add_location();
    out.has_loop = false;
    cfa.reindex();
    out.in_loop.assign(cfa.num_locations, false);
    return out;
  }

  out.has_loop = true;
  if (heads.size() == 1) {
    out.loop_head = heads.front();
  } else {
    Loc head = cfa.add_location();
    out.loop_head = head;
    std::vector<Edge> edges = std::move(cfa.edges);
    cfa.edges.clear();
    for (auto& e : edges) {
      auto it = std::find(heads.begin(), heads.end(), e.dst);
      if (it == heads.end()) {
        cfa.edges.push_back(std::move(e));
        continue;
      }
      Value j = static_cast<Value>(it - heads.begin()) + 1;
      Loc mid = cfa.add_location();
      cfa.edges.push_back(Edge{e.src, std::move(e.op), mid});
      cfa.edges.push_back(Edge{mid, Op::assign(out.pc_var, make_const(j)), head});
    }
    for (std::size_t j = 0; j < heads.size(); ++j) {
      auto cond = make_binary(BinOp::Eq, make_var(out.pc_var), make_const(static_cast<Value>(j) + 1));
      cfa.edges.push_back(Edge{head, Op::assume(cond), heads[j]});
    }
  }
  cfa.reindex();

  auto fwd = reachable(cfa, out.loop_head, true);
  auto bwd = reachable(cfa, out.loop_head, false);
  out.in_loop.assign(cfa.num_locations, false);
  for (Loc l = 0; l < cfa.num_locations; ++l) out.in_loop[l] = fwd[l] && bwd[l];

  std::set<VarId> modified, termination;
  for (const auto& e : cfa.edges) {
    if (!out.in_loop[e.src]) continue;
    if (out.in_loop[e.dst]) {
      if (e.op.kind != Op::Kind::Assume) modified.insert(e.op.var);
    } else if (e.op.kind == Op::Kind::Assume && e.dst != cfa.error) {
      for (auto v : collect_vars(*e.op.expr)) termination.insert(v);
    }
  }
  out.loop_modified.assign(modified.begin(), modified.end());
  out.termination_vars.assign(termination.begin(), termination.end());
  return out;
}

const std::vector<VarId>& loop_modified_vars(const NormalizedCfa& ncfa) { return ncfa.loop_modified; }

const std::vector<VarId>& termination_condition_vars(const NormalizedCfa& ncfa) { return ncfa.termination_vars; }

}  // namespace kindle
