#include "kindle/cfa.hpp"

#include <algorithm>
#include <sstream>

namespace kindle {

Op Op::assume(ExprPtr cond) {
  Op op;
  op.kind = Kind::Assume;
  op.expr = std::move(cond);
  return op;
}

Op Op::assign(VarId v, ExprPtr value) {
  Op op;
  op.kind = Kind::Assign;
  op.var = v;
  op.expr = std::move(value);
  return op;
}

Op Op::havoc(VarId v) {
  Op op;
  op.kind = Kind::Havoc;
  op.var = v;
  return op;
}

std::size_t Cfa::add_edge(Loc src, Op op, Loc dst) {
  edges.push_back(Edge{src, std::move(op), dst});
  std::size_t id = edges.size() - 1;
  if (out_.size() < num_locations) out_.resize(num_locations);
  if (in_.size() < num_locations) in_.resize(num_locations);
  out_[src].push_back(id);
  in_[dst].push_back(id);
  return id;
}

const std::vector<std::size_t>& Cfa::out_edges(Loc l) const {
  static const std::vector<std::size_t> none;
  return l < out_.size() ? out_[l] : none;
}

const std::vector<std::size_t>& Cfa::in_edges(Loc l) const {
  static const std::vector<std::size_t> none;
  return l < in_.size() ? in_[l] : none;
}

void Cfa::reindex() {
  out_.assign(num_locations, {});
  in_.assign(num_locations, {});
  for (std::size_t i = 0; i < edges.size(); ++i) {
    out_[edges[i].src].push_back(i);
    in_[edges[i].dst].push_back(i);
  }
}

namespace {

class Lowering {
 public:
  explicit Lowering(Cfa& cfa) : cfa_(cfa) {}

  void block(const Block& stmts, Loc from, Loc to) {
    if (stmts.empty()) {
      if (from != to) cfa_.add_edge(from, Op::assume(make_const(1)), to);
      return;
    }
    Loc cur = from;
    for (std::size_t i = 0; i < stmts.size(); ++i) {
      Loc target = i + 1 == stmts.size() ? to : cfa_.add_location();
      statement(stmts[i], cur, target);
      cur = target;
    }
  }

 private:
  void branch(const ExprPtr& cond, const Block& body, Loc from, Loc to) {
    if (body.empty()) {
      cfa_.add_edge(from, Op::assume(cond), to);
      return;
    }
    Loc start = cfa_.add_location();
    cfa_.add_edge(from, Op::assume(cond), start);
    block(body, start, to);
  }

  void statement(const Stmt& s, Loc from, Loc to) {
    switch (s.kind) {
      case Stmt::Kind::Assign:
        cfa_.add_edge(from, Op::assign(s.var, s.expr), to);
        return;
      case Stmt::Kind::Havoc:
        cfa_.add_edge(from, Op::havoc(s.var), to);
        return;
      case Stmt::Kind::Assert:
        cfa_.add_edge(from, Op::assume(make_not(s.expr)), cfa_.error);
        cfa_.add_edge(from, Op::assume(s.expr), to);
        return;
      case Stmt::Kind::If:
        branch(s.expr, s.body, from, to);
        branch(make_not(s.expr), s.else_body, from, to);
        return;
      case Stmt::Kind::While: {
        Loc head = from;
        if (from == cfa_.entry) {
          head = cfa_.add_location();
          cfa_.add_edge(from, Op::assume(make_const(1)), head);
        }
        if (s.body.empty()) {
          cfa_.add_edge(head, Op::assume(s.expr), head);
        } else {
          Loc start = cfa_.add_location();
          cfa_.add_edge(head, Op::assume(s.expr), start);
          block(s.body, start, head);
        }
        cfa_.add_edge(head, Op::assume(make_not(s.expr)), to);
        return;
      }
    }
  }

  Cfa& cfa_;
};

}  // namespace

Cfa build_cfa(const Ast& ast) {
  Cfa cfa;
  cfa.vars = ast.declarations;
  cfa.entry = cfa.add_location();
  cfa.error = cfa.add_location();
  if (ast.body.empty()) {
    cfa.exit = cfa.entry;
    cfa.reindex();
    return cfa;
  }
  cfa.exit = cfa.add_location();
  Lowering lower(cfa);
  lower.block(ast.body, cfa.entry, cfa.exit);
  cfa.reindex();
  return cfa;
}

std::vector<Loc> loop_heads(const Cfa& cfa) {
  std::vector<int> state(cfa.num_locations, 0);  // 0 new, 1 on stack, 2 done
  std::vector<Loc> heads;
  std::vector<std::pair<Loc, std::size_t>> stack;
  stack.emplace_back(cfa.entry, 0);
  state[cfa.entry] = 1;
  while (!stack.empty()) {
    auto& [loc, idx] = stack.back();
    const auto& outs = cfa.out_edges(loc);
    if (idx == outs.size()) {
      state[loc] = 2;
      stack.pop_back();
      continue;
    }
    Loc dst = cfa.edges[outs[idx++]].dst;
    if (state[dst] == 1) {
      heads.push_back(dst);
    } else if (state[dst] == 0) {
      state[dst] = 1;
      stack.emplace_back(dst, 0);
    }
  }
  std::sort(heads.begin(), heads.end());
  heads.erase(std::unique(heads.begin(), heads.end()), heads.end());
  return heads;
}

std::string to_string(const Op& op, const std::vector<std::string>& names) {
  std::string var = op.var < names.size() ? names[op.var] : "v" + std::to_string(op.var);
  switch (op.kind) {
    case Op::Kind::Assume:
      return "[" + to_string(*op.expr, names) + "]";
    case Op::Kind::Assign:
      return var + " := " + to_string(*op.expr, names);
    case Op::Kind::Havoc:
      return var + " := nondet()";
  }
  return "?";
}

std::string dump(const Cfa& cfa) {
  std::ostringstream os;
  os << "# entry " << cfa.entry << ", error " << cfa.error << ", exit " << cfa.exit << "\n";
  for (const auto& e : cfa.edges) os << e.src << " --" << to_string(e.op, cfa.vars) << "--> " << e.dst << "\n";
  return os.str();
}

}  // namespace kindle
