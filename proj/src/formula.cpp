#include "kindle/formula.hpp"

#include <sstream>

namespace kindle {

namespace {

TermPtr app(const std::string& op, Sort sort, std::vector<TermPtr> args) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::App;
  t->sort = sort;
  t->name = op;
  t->args = std::move(args);
  return t;
}

std::optional<Value> int_lit(const TermPtr& t) {
  if (t->kind == Term::Kind::IntLit) return t->int_value;
  return std::nullopt;
}

}  // namespace

bool same(const TermPtr& a, const TermPtr& b) {
  if (a == b) return true;
  if (a->kind != b->kind || a->sort != b->sort) return false;
  switch (a->kind) {
    case Term::Kind::BoolLit: return a->bool_value == b->bool_value;
    case Term::Kind::IntLit: return a->int_value == b->int_value;
    case Term::Kind::ProgVar: return a->var == b->var;
    case Term::Kind::Symbol: return a->name == b->name;
    case Term::Kind::App:
      if (a->name != b->name || a->args.size() != b->args.size()) return false;
      for (std::size_t i = 0; i < a->args.size(); ++i)
        if (!same(a->args[i], b->args[i])) return false;
      return true;
  }
  return false;
}

TermPtr t_bool(bool b) {
  static const TermPtr t = [] {
    auto x = std::make_shared<Term>();
    x->bool_value = true;
    return x;
  }();
  static const TermPtr f = std::make_shared<Term>();
  return b ? t : f;
}

TermPtr t_int(Value v) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::IntLit;
  t->sort = Sort::Int;
  t->int_value = v;
  return t;
}

TermPtr t_var(VarId v) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::ProgVar;
  t->sort = Sort::Int;
  t->var = v;
  return t;
}

TermPtr t_sym(const std::string& name, Sort sort) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::Symbol;
  t->sort = sort;
  t->name = name;
  return t;
}

bool is_true(const TermPtr& t) { return t->kind == Term::Kind::BoolLit && t->bool_value; }
bool is_false(const TermPtr& t) { return t->kind == Term::Kind::BoolLit && !t->bool_value; }

TermPtr t_and(std::vector<TermPtr> args) {
  std::vector<TermPtr> flat;
  for (auto& a : args) {
    if (is_true(a)) continue;
    if (is_false(a)) return t_false();
    if (a->kind == Term::Kind::App && a->name == "and")
      flat.insert(flat.end(), a->args.begin(), a->args.end());
    else
      flat.push_back(std::move(a));
  }
  if (flat.empty()) return t_true();
  if (flat.size() == 1) return flat.front();
  return app("and", Sort::Bool, std::move(flat));
}

TermPtr t_or(std::vector<TermPtr> args) {
  std::vector<TermPtr> flat;
  for (auto& a : args) {
    if (is_false(a)) continue;
    if (is_true(a)) return t_true();
    if (a->kind == Term::Kind::App && a->name == "or")
      flat.insert(flat.end(), a->args.begin(), a->args.end());
    else
      flat.push_back(std::move(a));
  }
  if (flat.empty()) return t_false();
  if (flat.size() == 1) return flat.front();
  return app("or", Sort::Bool, std::move(flat));
}

TermPtr t_not(TermPtr a) {
  if (a->kind == Term::Kind::BoolLit) return t_bool(!a->bool_value);
  if (a->kind == Term::Kind::App && a->name == "not") return a->args.front();
  return app("not", Sort::Bool, {std::move(a)});
}

TermPtr t_implies(TermPtr a, TermPtr b) { return t_or(t_not(std::move(a)), std::move(b)); }

TermPtr t_ite(TermPtr c, TermPtr a, TermPtr b) {
  if (is_true(c)) return a;
  if (is_false(c)) return b;
  if (same(a, b)) return a;
  Sort s = a->sort;
  return app("ite", s, {std::move(c), std::move(a), std::move(b)});
}

TermPtr t_eq(TermPtr a, TermPtr b) {
  if (same(a, b)) return t_true();
  auto x = int_lit(a), y = int_lit(b);
  if (x && y) return t_bool(*x == *y);
  return app("=", Sort::Bool, {std::move(a), std::move(b)});
}

TermPtr t_lt(TermPtr a, TermPtr b) {
  auto x = int_lit(a), y = int_lit(b);
  if (x && y) return t_bool(*x < *y);
  return app("<", Sort::Bool, {std::move(a), std::move(b)});
}

TermPtr t_le(TermPtr a, TermPtr b) {
  auto x = int_lit(a), y = int_lit(b);
  if (x && y) return t_bool(*x <= *y);
  return app("<=", Sort::Bool, {std::move(a), std::move(b)});
}

TermPtr t_add(TermPtr a, TermPtr b) {
  auto x = int_lit(a), y = int_lit(b);
  Value r = 0;
  if (x && y && !__builtin_add_overflow(*x, *y, &r)) return t_int(r);
  if (x && *x == 0) return b;
  if (y && *y == 0) return a;
  return app("+", Sort::Int, {std::move(a), std::move(b)});
}

TermPtr t_sub(TermPtr a, TermPtr b) {
  auto x = int_lit(a), y = int_lit(b);
  Value r = 0;
  if (x && y && !__builtin_sub_overflow(*x, *y, &r)) return t_int(r);
  if (y && *y == 0) return a;
  return app("-", Sort::Int, {std::move(a), std::move(b)});
}

TermPtr t_neg(TermPtr a) {
  auto x = int_lit(a);
  if (x && *x != INT64_MIN) return t_int(-*x);
  return app("-", Sort::Int, {std::move(a)});
}

TermPtr t_mul(TermPtr a, TermPtr b) {
  auto x = int_lit(a), y = int_lit(b);
  Value r = 0;
  if (x && y && !__builtin_mul_overflow(*x, *y, &r)) return t_int(r);
  if ((x && *x == 0) || (y && *y == 0)) return t_int(0);
  if (x && *x == 1) return b;
  if (y && *y == 1) return a;
  return app("*", Sort::Int, {std::move(a), std::move(b)});
}

TermPtr t_div(TermPtr a, TermPtr b) { return app("div", Sort::Int, {std::move(a), std::move(b)}); }
TermPtr t_mod(TermPtr a, TermPtr b) { return app("mod", Sort::Int, {std::move(a), std::move(b)}); }

TermPtr t_uf(const std::string& name, std::vector<TermPtr> args) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::App;
  t->sort = Sort::Int;
  t->name = name;
  t->args = std::move(args);
  t->uninterpreted = true;
  return t;
}

TermPtr instantiate(const TermPtr& t, const std::function<TermPtr(VarId)>& bind) {
  switch (t->kind) {
    case Term::Kind::ProgVar: return bind(t->var);
    case Term::Kind::App: {
      std::vector<TermPtr> args;
      args.reserve(t->args.size());
      bool changed = false;
      for (const auto& a : t->args) {
        args.push_back(instantiate(a, bind));
        changed = changed || args.back() != a;
      }
      if (!changed) return t;
      auto copy = std::make_shared<Term>(*t);
      copy->args = std::move(args);
      return copy;
    }
    default: return t;
  }
}

void collect_symbols(const TermPtr& t, std::map<std::string, Sort>& symbols,
                     std::map<std::string, std::size_t>& functions) {
  if (t->kind == Term::Kind::Symbol) {
    symbols.emplace(t->name, t->sort);
    return;
  }
  if (t->kind != Term::Kind::App) return;
  if (t->uninterpreted) functions.emplace(t->name, t->args.size());
  for (const auto& a : t->args) collect_symbols(a, symbols, functions);
}

bool is_nonlinear(const TermPtr& t) {
  if (t->kind != Term::Kind::App) return false;
  if (t->uninterpreted) return true;
  if (t->name == "*" && !int_lit(t->args[0]) && !int_lit(t->args[1])) return true;
  if ((t->name == "div" || t->name == "mod") && !int_lit(t->args[1])) return true;
  for (const auto& a : t->args)
    if (is_nonlinear(a)) return true;
  return false;
}

std::optional<Value> evaluate(const TermPtr& t, const std::vector<Value>& env) {
  switch (t->kind) {
    case Term::Kind::BoolLit: return t->bool_value ? 1 : 0;
    case Term::Kind::IntLit: return t->int_value;
    case Term::Kind::ProgVar: return t->var < env.size() ? std::optional<Value>(env[t->var]) : std::nullopt;
    case Term::Kind::Symbol: return std::nullopt;
    case Term::Kind::App: break;
  }
  if (t->uninterpreted) return std::nullopt;
  std::vector<Value> v;
  const std::string& op = t->name;
  if (op == "and" || op == "or") {
    bool is_and = op == "and";
    for (const auto& a : t->args) {
      auto x = evaluate(a, env);
      if (!x) return std::nullopt;
      if ((*x != 0) != is_and) return is_and ? 0 : 1;
    }
    return is_and ? 1 : 0;
  }
  for (const auto& a : t->args) {
    auto x = evaluate(a, env);
    if (!x) return std::nullopt;
    v.push_back(*x);
  }
  Value r = 0;
  if (op == "not") return v[0] == 0;
  if (op == "ite") return v[0] != 0 ? v[1] : v[2];
  if (op == "=") return v[0] == v[1];
  if (op == "<") return v[0] < v[1];
  if (op == "<=") return v[0] <= v[1];
  if (op == "+") return __builtin_add_overflow(v[0], v[1], &r) ? std::nullopt : std::optional<Value>(r);
  if (op == "-" && v.size() == 1) return v[0] == INT64_MIN ? std::nullopt : std::optional<Value>(-v[0]);
  if (op == "-") return __builtin_sub_overflow(v[0], v[1], &r) ? std::nullopt : std::optional<Value>(r);
  if (op == "*") return __builtin_mul_overflow(v[0], v[1], &r) ? std::nullopt : std::optional<Value>(r);
  if (op == "div" || op == "mod") {
    if (v[1] == 0 || (v[0] == INT64_MIN && v[1] == -1)) return std::nullopt;
    Value q = v[0] / v[1], m = v[0] % v[1];
    if (m < 0) {
      m += v[1] < 0 ? -v[1] : v[1];
      q += v[1] < 0 ? 1 : -1;
    }
    return op == "div" ? q : m;
  }
  return std::nullopt;
}

std::string to_smt_int(Value v) {
  if (v >= 0) return std::to_string(v);
  if (v == INT64_MIN) return "(- 9223372036854775808)";
  return "(- " + std::to_string(-v) + ")";
}

std::string smt_sort(Sort s) { return s == Sort::Bool ? "Bool" : "Int"; }

namespace {

void print(const TermPtr& t, std::ostream& os, const std::vector<std::string>* names) {
  switch (t->kind) {
    case Term::Kind::BoolLit: os << (t->bool_value ? "true" : "false"); return;
    case Term::Kind::IntLit: os << to_smt_int(t->int_value); return;
    case Term::Kind::ProgVar:
      if (names && t->var < names->size())
        os << (*names)[t->var];
      else
        os << "$v" << t->var;
      return;
    case Term::Kind::Symbol: os << t->name; return;
    case Term::Kind::App:
      os << "(" << t->name;
      for (const auto& a : t->args) {
        os << " ";
        print(a, os, names);
      }
      os << ")";
      return;
  }
}

}  // namespace

std::string to_smt(const TermPtr& t) {
  std::ostringstream os;
  print(t, os, nullptr);
  return os.str();
}

std::string to_string(const TermPtr& t, const std::vector<std::string>& names) {
  std::ostringstream os;
  print(t, os, &names);
  return os.str();
}

std::string to_smt_script(const std::vector<Formula>& assertions) {
  std::map<std::string, Sort> symbols;
  std::map<std::string, std::size_t> functions;
  bool nonlinear = false;
  for (const auto& a : assertions) {
    collect_symbols(a, symbols, functions);
    nonlinear = nonlinear || is_nonlinear(a);
  }
  std::ostringstream os;
  os << "(set-option :produce-models true)\n";
  os << "(set-logic " << (nonlinear ? "ALL" : "QF_LIA") << ")\n";
  for (const auto& [name, arity] : functions) {
    os << "(declare-fun " << name << " (";
    for (std::size_t i = 0; i < arity; ++i) os << (i ? " " : "") << "Int";
    os << ") Int)\n";
  }
  for (const auto& [name, sort] : symbols) os << "(declare-const " << name << " " << smt_sort(sort) << ")\n";
  for (const auto& a : assertions) os << "(assert " << to_smt(a) << ")\n";
  os << "(check-sat)\n";
  return os.str();
}

}  // namespace kindle
