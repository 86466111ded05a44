#include <doctest.h>

#include "kindle/cpa.hpp"
#include "kindle/invgen.hpp"
#include "kindle/kinduction.hpp"
#include "support/util.hpp"

using namespace kindle;
using namespace kindle::testing;

namespace {

std::vector<std::string> names(const NormalizedCfa& n, const std::vector<VarId>& vs) {
  std::vector<std::string> out;
  for (auto v : vs) out.push_back(n.cfa.vars[v]);
  return out;
}

AbstractState head_state(Loc head, std::vector<IntervalSet> values) {
  AbstractState s(head, values.size());
  for (VarId v = 0; v < values.size(); ++v) s.bind(v, values[v]);
  return s;
}

}  // namespace

TEST_CASE("select_variables") {
  NormalizedCfa safe = normalize(example_safe());
  CHECK(names(safe, select_variables(safe, 1)) == std::vector<std::string>{"s"});

  NormalizedCfa xy = normalize("int x; int y; x = 0; y = 1; assert(x < y);");
  CHECK(names(xy, select_variables(xy, 2)) == std::vector<std::string>{"x", "y"});

  auto all = select_variables(safe, 100);
  CHECK(all.size() == 4);
  CHECK(select_variables(safe, 100) == all);
  for (auto v : all) CHECK(v != safe.pc_var);
}

TEST_CASE("refine_precision schedule") {
  NormalizedCfa n = normalize(example_safe());
  VarId v1 = select_variables(n, 1).front();
  Precision p0 = initial_precision();
  CHECK(p0 == Precision{{}, 1, true});
  auto p1 = refine_precision(p0, 1, n);
  REQUIRE(p1);
  CHECK(*p1 == Precision{{v1}, 1, true});
  auto p2 = refine_precision(*p1, 2, n);
  REQUIRE(p2);
  CHECK(*p2 == Precision{{v1}, 2, true});
  auto p3 = refine_precision(*p2, 3, n);
  REQUIRE(p3);
  CHECK(p3->important.size() == 2);
  CHECK(p3->depth == 2);

  Precision four{{0, 1, 2, 3}, 2, true};
  CHECK(*refine_precision(four, 4, n) == Precision{{0, 1, 2, 3}, 2, false});

  // growth beyond the assume variables jumps to all variables
  auto p5 = refine_precision(*refine_precision(*p3, 4, n), 5, n);
  REQUIRE(p5);
  CHECK(p5->important.size() == 4);
  auto p6 = refine_precision(*p5, 6, n);
  REQUIRE(p6);
  CHECK(*p6 == terminal_precision(n));
  CHECK_FALSE(refine_precision(terminal_precision(n), 7, n));
}

TEST_CASE("states_to_formula renders interval sets") {
  const Loc head = 7;
  auto render = [&](std::vector<AbstractState> states) {
    return to_string(states_to_formula(states, head), {"s"});
  };
  Formula r1 = states_to_formula({head_state(head, {IntervalSet::range(1, 4)})}, head);
  Formula e1 = t_and(t_le(t_int(1), t_var(0)), t_le(t_var(0), t_int(4)));
  CHECK(entails(r1, e1));
  CHECK(entails(e1, r1));

  Formula r2 = states_to_formula({head_state(head, {IntervalSet::singleton(0).unite(IntervalSet::singleton(5))})}, head);
  Formula e2 = t_or(t_eq(t_var(0), t_int(0)), t_eq(t_var(0), t_int(5)));
  CHECK(entails(r2, e2));
  CHECK(entails(e2, r2));

  Formula r3 = states_to_formula(
      {head_state(head, {IntervalSet::singleton(1)}), head_state(head, {IntervalSet::range(2, 4)})}, head);
  Formula e3 = t_or(t_eq(t_var(0), t_int(1)), t_and(t_le(t_int(2), t_var(0)), t_le(t_var(0), t_int(4))));
  CHECK(entails(r3, e3));
  CHECK(entails(e3, r3));

  CHECK(render({head_state(head + 1, {IntervalSet::singleton(1)})}) == "false");
}

TEST_CASE("state_to_formula keeps relational bindings") {
  AbstractState s(0, 2);
  s.bind(0, IntervalSet::range(0, 3));
  s.bind(1, sym_binary(BinOp::Add, sym_var(0), sym_intervals(IntervalSet::singleton(1))));
  Formula f = state_to_formula(s);
  CHECK(entails(f, t_eq(t_var(1), t_add(t_var(0), t_int(1)))));
}

TEST_CASE("snapshot channel strengthens by conjunction") {
  SnapshotChannel ch;
  CHECK(ch.get_currently_known_invariant().version == 0);
  CHECK(is_true(ch.get_currently_known_invariant().formula));
  ch.publish(t_le(t_int(0), t_var(0)));
  ch.publish(t_le(t_var(0), t_int(5)));
  auto h = ch.history();
  REQUIRE(h.size() == 3);
  for (std::size_t i = 0; i + 1 < h.size(); ++i) {
    CHECK(h[i + 1].version == h[i].version + 1);
    CHECK(entails(h[i + 1].formula, h[i].formula));
  }
}

TEST_CASE("engine: worked example round 1 implies s >= 1") {
  NormalizedCfa n = normalize(example_safe());
  SnapshotChannel ch;
  InvariantEngine engine(n, ch);
  auto rounds = engine.run_rounds(1);
  REQUIRE(rounds.size() == 1);
  REQUIRE(rounds[0].complete);
  auto snap = get_currently_known_invariant(ch);
  CHECK(snap.version == 1);
  CHECK(entails(snap.formula, t_le(t_int(1), t_var(var_id(n, "s")))));
}

TEST_CASE("engine: trivially safe program is proved on round 1") {
  NormalizedCfa n = normalize("int x; x = 0; while (x < 3) { x = x + 1; } assert(1);");
  SnapshotChannel ch;
  InvariantEngine engine(n, ch);
  auto rounds = engine.run_rounds(5);
  REQUIRE(rounds.size() == 1);
  CHECK(rounds[0].proved_safe);
  CHECK(ch.get_currently_known_invariant().proved_safe);
}

TEST_CASE("engine: unsafe example is never proved and stays stable at the end") {
  NormalizedCfa n = normalize(example_unsafe());
  SnapshotChannel ch;
  InvgenConfig cfg;
  cfg.max_states = 5000;
  cfg.round_budget = std::chrono::minutes(10);
  InvariantEngine engine(n, ch, cfg);
  auto rounds = engine.run_rounds(100);
  CHECK_FALSE(rounds.empty());
  for (const auto& r : rounds) CHECK_FALSE(r.proved_safe);
  CHECK(rounds.back().precision == terminal_precision(n));
  auto v = ch.get_currently_known_invariant().version;
  CHECK(ch.get_currently_known_invariant().version == v);
}

TEST_CASE("engine: asynchronous run can be cancelled") {
  NormalizedCfa n = normalize(example_unsafe());
  SnapshotChannel ch;
  {
    InvariantEngine engine(n, ch);
    engine.start_async();
    engine.stop();
    auto h = ch.history();
    for (std::size_t i = 0; i + 1 < h.size(); ++i) CHECK(h[i + 1].version == h[i].version + 1);
  }
}
