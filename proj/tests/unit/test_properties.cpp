#include <doctest.h>

#include <random>

#include "kindle/cpa.hpp"
#include "kindle/interp.hpp"
#include "support/corpus.hpp"
#include "support/util.hpp"

using namespace kindle;
using namespace kindle::testing;

namespace {

IntervalSet random_set(std::mt19937& rng) {
  IntervalSet s;
  int parts = static_cast<int>(rng() % 3);
  for (int i = 0; i < parts; ++i) {
    Value lo = static_cast<Value>(rng() % 21) - 10;
    s = s.unite(IntervalSet::range(lo, lo + static_cast<Value>(rng() % 5)));
  }
  if (rng() % 8 == 0) s = s.unite(IntervalSet::range(static_cast<Value>(rng() % 5), kPosInf));
  return s;
}

AbstractState random_state(std::mt19937& rng, std::size_t vars) {
  AbstractState st(0, vars);
  for (VarId v = 0; v < vars; ++v) {
    IntervalSet s = random_set(rng);
    if (s.is_bottom()) s = IntervalSet::singleton(0);
    st.bind(v, s);
  }
  return st;
}

}  // namespace

TEST_CASE("property: union and widening over-approximate both operands") {
  std::mt19937 rng(11);
  for (int i = 0; i < 500; ++i) {
    AbstractState a = random_state(rng, 2), b = random_state(rng, 2);
    AbstractState u = union_states(a, b), w = widen_states(a, b);
    CHECK(covers(u, a));
    CHECK(covers(u, b));
    CHECK(covers(w, a));
    CHECK(covers(w, b));
    CHECK(covers(union_states(a, a), a));
    CHECK(covers(a, union_states(a, a)));
  }
}

TEST_CASE("property: interval set lattice laws") {
  std::mt19937 rng(5);
  for (int i = 0; i < 1000; ++i) {
    IntervalSet a = random_set(rng), b = random_set(rng);
    CHECK(a.unite(b) == b.unite(a));
    CHECK(a.intersect(b) == b.intersect(a));
    CHECK(a.subset_of(a.unite(b)));
    CHECK(a.intersect(b).subset_of(a));
    CHECK(a.complement().complement() == a);
    CHECK(a.intersect(a.complement()).is_bottom());
    for (Value v = -12; v <= 12; ++v) CHECK(a.unite(b).contains(v) == (a.contains(v) || b.contains(v)));
  }
}

TEST_CASE("property: single-loop normalization preserves behaviour on generated programs") {
  for (const auto& p : make_corpus(60, 1000)) {
    Cfa cfa = build_cfa(parse(p.source));
    for (std::size_t len = 0; len <= 4; ++len)
      for (std::size_t bits = 0; bits < (std::size_t{1} << len); ++bits) {
        std::vector<Value> choices;
        for (std::size_t i = 0; i < len; ++i) choices.push_back((bits >> i) & 1);
        RunResult a = run(cfa, choices, 5'000);
        RunResult b = run(p.ncfa.cfa, choices, 5'000);
        if (a.status == RunStatus::StepBudgetExhausted || b.status == RunStatus::StepBudgetExhausted) continue;
        CAPTURE(p.source);
        REQUIRE(a.status == b.status);
        Env ea = a.trace.last().env, eb = b.trace.last().env;
        eb.resize(ea.size());
        CHECK(ea == eb);
      }
  }
}

TEST_CASE("property: loop-modified and termination variables over-approximate") {
  for (const auto& p : make_corpus(60, 2000)) {
    const NormalizedCfa& n = p.ncfa;
    for (const auto& e : n.cfa.edges) {
      bool in_loop = n.in_loop[e.src] && n.in_loop[e.dst];
      if (!in_loop) continue;
      if (e.op.kind != Op::Kind::Assume)
        CHECK(std::binary_search(n.loop_modified.begin(), n.loop_modified.end(), e.op.var));
    }
  }
}

TEST_CASE("property: corpus programs parse and respect the size limits") {
  auto corpus = make_corpus(100, 1);
  CHECK(corpus.size() == 100);
  for (const auto& p : corpus) {
    CHECK(p.ncfa.cfa.vars.size() <= 5);
    CHECK(p.ncfa.num_loops <= 2);
  }
}
