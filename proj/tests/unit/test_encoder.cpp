#include <doctest.h>

#include "kindle/interp.hpp"
#include "support/util.hpp"

using namespace kindle;
using namespace kindle::testing;

namespace {

Formula eq(TermPtr a, Value v) { return t_eq(std::move(a), t_int(v)); }

Formula ladder_invariant(const NormalizedCfa& n) {
  TermPtr s = t_var(var_id(n, "s"));
  TermPtr x1 = t_var(var_id(n, "x1"));
  TermPtr x2 = t_var(var_id(n, "x2"));
  return t_and(std::vector<Formula>{t_le(t_int(1), s), t_le(s, t_int(4)),
                                    t_implies(t_not(t_eq(s, t_int(2))), t_eq(x1, x2))});
}

}  // namespace

TEST_CASE("encode_expr matches the interpreter on constants") {
  const BinOp ops[] = {BinOp::Add, BinOp::Mul, BinOp::Div, BinOp::Mod, BinOp::Eq, BinOp::Lt, BinOp::BitXor,
                       BinOp::BitOr, BinOp::BitAnd, BinOp::LogAnd, BinOp::LogOr, BinOp::Shr, BinOp::Shl};
  SmtSession s;
  TermPtr a = t_sym("a", Sort::Int);
  for (auto op : ops)
    for (Value x : {-5, -1, 0, 3, 6})
      for (Value c : {-2, 1, 2, 3}) {
        auto expected = apply(op, x, c);
        if (!expected) continue;
        // variable left operand, literal right operand
        EncodedTerm e = encode_expr(*make_binary(op, make_var(0), make_const(c)), {a});
        Formula f = t_and(std::vector<Formula>{e.def, eq(a, x), t_not(t_eq(e.value, t_int(*expected)))});
        REQUIRE_MESSAGE(s.check(f) == CheckResult::Unsat, op_symbol(op), " ", x, " ", c);
      }
}

TEST_CASE("transition relation of an increment") {
  NormalizedCfa n = normalize("int x; int f; x = 0; f = nondet(); while (f != 0) { x = x + 1; f = nondet(); }");
  TransitionSystem ts(n);
  VarId x = var_id(n, "x"), f = var_id(n, "f");
  Formula step = t_and(std::vector<Formula>{base_defs(ts, 1), ts.trans(0), eq(ts.var_at(x, 0), 5),
                                            t_not(eq(ts.var_at(f, 0), 0))});
  CHECK(fresh_check(t_and(step, t_not(eq(ts.var_at(x, 1), 6)))) == CheckResult::Unsat);
  CHECK(fresh_check(t_and(step, eq(ts.var_at(x, 1), 6))) == CheckResult::Sat);
}

TEST_CASE("property of the worked example is violated exactly on the error branch") {
  NormalizedCfa n = normalize(example_safe());
  TransitionSystem ts(n);
  auto frame = [&](Value s, Value x1, Value x2) {
    return t_and(std::vector<Formula>{base_defs(ts, 0), eq(ts.var_at(var_id(n, "s"), 0), s),
                                      eq(ts.var_at(var_id(n, "x1"), 0), x1), eq(ts.var_at(var_id(n, "x2"), 0), x2),
                                      eq(ts.var_at(var_id(n, "c"), 0), 1)});
  };
  CHECK(fresh_check(t_and(frame(4, 0, 1), t_not(ts.prop(0)))) == CheckResult::Sat);
  CHECK(fresh_check(t_and(frame(4, 2, 2), t_not(ts.prop(0)))) == CheckResult::Unsat);
  CHECK(fresh_check(t_and(frame(2, 0, 5), t_not(ts.prop(0)))) == CheckResult::Unsat);
}

TEST_CASE("initial states of the worked example") {
  NormalizedCfa n = normalize(example_safe());
  TransitionSystem ts(n);
  Formula init = t_and(base_defs(ts, 0), ts.init());
  Formula expected = t_and(std::vector<Formula>{eq(ts.var_at(var_id(n, "s"), 0), 1),
                                                eq(ts.var_at(var_id(n, "x1"), 0), 0),
                                                eq(ts.var_at(var_id(n, "x2"), 0), 0)});
  CHECK(fresh_check(t_and(init, t_not(expected))) == CheckResult::Unsat);
  CHECK(fresh_check(init) == CheckResult::Sat);
}

TEST_CASE("encode_base_case") {
  NormalizedCfa unsafe = normalize(example_unsafe());
  TransitionSystem tu(unsafe);
  CHECK(fresh_check(encode_base_case(tu, 2)) == CheckResult::Unsat);
  CHECK(fresh_check(encode_base_case(tu, 3)) == CheckResult::Sat);

  NormalizedCfa safe = normalize(example_safe());
  TransitionSystem ts(safe);
  for (std::size_t k = 1; k <= 8; ++k) CHECK(fresh_check(encode_base_case(ts, k)) == CheckResult::Unsat);
}

TEST_CASE("encode_forward_condition") {
  NormalizedCfa bounded = normalize("int i; i = 0; while (i < 2) { i = i + 1; }");
  TransitionSystem tb(bounded);
  CHECK(fresh_check(encode_forward_condition(tb, 2)) == CheckResult::Sat);
  CHECK(fresh_check(encode_forward_condition(tb, 3)) == CheckResult::Unsat);

  NormalizedCfa safe = normalize(example_safe());
  TransitionSystem ts(safe);
  for (std::size_t k = 1; k <= 10; ++k) CHECK(fresh_check(encode_forward_condition(ts, k)) == CheckResult::Sat);
}

TEST_CASE("encode_step_case on the worked example") {
  NormalizedCfa n = normalize(example_safe());
  TransitionSystem ts(n);
  Formula s_pos = t_le(t_int(1), t_var(var_id(n, "s")));
  CHECK(fresh_check(encode_step_case(ts, 4, t_true(), HavocStrategy::SoundAll)) == CheckResult::Sat);
  CHECK(fresh_check(encode_step_case(ts, 4, s_pos, HavocStrategy::SoundAll)) == CheckResult::Unsat);
  CHECK(fresh_check(encode_step_case(ts, 2, ladder_invariant(n), HavocStrategy::SoundAll)) == CheckResult::Unsat);
  for (std::size_t k = 1; k <= 8; ++k)
    CHECK(fresh_check(encode_step_case(ts, k, t_true(), HavocStrategy::SoundAll)) == CheckResult::Sat);
}

TEST_CASE("termination-vars havoc on the unsafe example") {
  NormalizedCfa n = normalize(example_unsafe());
  TransitionSystem ts(n);
  // Pinning s, x1, x2 to their initial values hides the violation at every k
  // that is not 3 modulo 4; at k = 3 the pinned start s = 1 reaches s = 4.
  for (std::size_t k : {1, 2, 4, 5})
    CHECK(fresh_check(encode_step_case(ts, k, t_true(), HavocStrategy::UnsoundTerminationVars)) ==
          CheckResult::Unsat);
  CHECK(fresh_check(encode_step_case(ts, 3, t_true(), HavocStrategy::UnsoundTerminationVars)) == CheckResult::Sat);
  // sound strategies keep the counterexample
  CHECK(fresh_check(encode_step_case(ts, 1, t_true(), HavocStrategy::SoundLoopModified)) == CheckResult::Sat);
  CHECK(fresh_check(encode_step_case(ts, 1, t_true(), HavocStrategy::SoundAll)) == CheckResult::Sat);
}

TEST_CASE("extract_trace") {
  NormalizedCfa n = normalize(example_unsafe());
  TransitionSystem ts(n);
  SmtSession s;
  REQUIRE(s.check(encode_base_case(ts, 3), true) == CheckResult::Sat);
  Trace t = extract_trace(s.model(), ts, 3);
  CHECK(t.last().loc == n.cfa.error);
  CHECK(loop_iterations(t, n.loop_head) == 3);

  NormalizedCfa flat = normalize("int x; x = nondet(); assert(x == 0);");
  TransitionSystem tf(flat);
  REQUIRE(s.check(encode_base_case(tf, 1), true) == CheckResult::Sat);
  Trace tt = extract_trace(s.model(), tf, 1);
  CHECK(tt.last().loc == flat.cfa.error);
  CHECK(loop_iterations(tt, flat.loop_head) == 0);

  // no usable model for an unsat query
  NormalizedCfa safe = normalize(example_safe());
  TransitionSystem tsafe(safe);
  CHECK(s.check(encode_base_case(tsafe, 2), true) == CheckResult::Unsat);
  CHECK_THROWS_AS(extract_trace(Model{}, tsafe, 2), EncodingError);
}

TEST_CASE("multi-loop dispatch range") {
  NormalizedCfa n = normalize(
      "int a; int f; a = 0; f = nondet(); while (f != 0) { a = a + 1; f = nondet(); }"
      "f = nondet(); while (f != 0) { a = a - 1; f = nondet(); } assert(a != 2);");
  TransitionSystem ts(n);
  CHECK(fresh_check(t_and(ts.pc_range(0), eq(ts.var_at(n.pc_var, 0), 3))) == CheckResult::Unsat);
  auto cex = shortest_cex(n, std::vector<Value>{0, 1}, 8);
  REQUIRE(cex);
  REQUIRE(cex->iterations >= 1);
  CHECK(fresh_check(encode_base_case(ts, cex->iterations - 1)) == CheckResult::Unsat);
  CHECK(fresh_check(encode_base_case(ts, cex->iterations)) == CheckResult::Sat);
}
