#include <doctest.h>

#include <filesystem>

#include "kindle/harness.hpp"
#include "kindle/interp.hpp"
#include "support/util.hpp"

using namespace kindle;
using namespace kindle::testing;

namespace {

VerifyOptions deterministic(const std::string& invgen = "continuous") {
  VerifyOptions o;
  o.invgen = invgen;
  o.deterministic_rounds = 10;
  o.max_states = 5000;
  o.round_budget_s = 600;
  o.k_max = 20;
  o.timeout_s = 120;
  return o;
}

}  // namespace

TEST_CASE("get_currently_known_invariant before any round") {
  SnapshotChannel ch;
  auto snap = get_currently_known_invariant(ch);
  CHECK(snap.version == 0);
  CHECK(is_true(snap.formula));
}

TEST_CASE("verify: worked example with continuous invariants") {
  VerifyOutcome out = verify_source(example_safe(), deterministic());
  CHECK(out.verdict.kind == VerdictKind::True);
  CHECK(out.verdict.final_k <= 4);
  CHECK(out.verdict.invariant_version >= 1);
}

TEST_CASE("verify: worked example without invariants runs out of k") {
  VerifyOutcome out = verify_source(example_safe(), deterministic("off"));
  CHECK(out.verdict.kind == VerdictKind::Unknown);
  CHECK(out.verdict.reason == UnknownReason::KMaxExhausted);
  CHECK(out.verdict.final_k == 20);
}

TEST_CASE("verify: injected invariants") {
  NormalizedCfa n = normalize(example_safe());
  KInductionConfig cfg;
  cfg.k_max = 6;
  FixedInvariantSource s_pos(t_le(t_int(1), t_var(var_id(n, "s"))), 1);
  Verdict v = verify(n, cfg, s_pos);
  CHECK(v.kind == VerdictKind::True);
  CHECK(v.source == ProofSource::Induction);
  CHECK(v.final_k == 4);
}

TEST_CASE("verify: unsafe example under every sound configuration") {
  for (const char* invgen : {"off", "continuous", "static:0,1,t", "static:2,2,f"})
    for (const char* havoc : {"all", "loop-modified"}) {
      VerifyOptions o = deterministic(invgen);
      o.havoc = havoc;
      VerifyOutcome out = verify_source(example_unsafe(), o);
      CAPTURE(invgen);
      CAPTURE(havoc);
      REQUIRE(out.verdict.kind == VerdictKind::False);
      REQUIRE(out.verdict.trace);
      CHECK(out.verdict.trace_iterations == 3);
      NormalizedCfa n = normalize(example_unsafe());
      auto replay = run(n.cfa, out.verdict.trace->choices, 10'000, out.verdict.trace->initial.env);
      CHECK(replay.status == RunStatus::ErrorReached);
    }
}

TEST_CASE("verify: termination-vars gives the wrong proof") {
  VerifyOptions o = deterministic("off");
  o.havoc = "termination-vars";
  VerifyOutcome out = verify_source(example_unsafe(), o);
  CHECK(out.verdict.kind == VerdictKind::True);
}

TEST_CASE("verify: bounded loop is proved by the forward condition") {
  VerifyOutcome out = verify_source("int i; int j; i = 0; j = 0; while (i < 2) { i = i + 1; j = j + 2; } assert(j == 4);",
                                  deterministic("off"));
  CHECK(out.verdict.kind == VerdictKind::True);
  CHECK(out.verdict.source == ProofSource::ForwardCondition);
  CHECK(out.verdict.final_k == 3);
}

TEST_CASE("verify: base case without omission agrees") {
  VerifyOptions o = deterministic("off");
  o.no_base_omission = true;
  VerifyOutcome out = verify_source(example_unsafe(), o);
  CHECK(out.verdict.kind == VerdictKind::False);
  CHECK(out.verdict.final_k == 3);
}

TEST_CASE("verify: solver timeout gives unknown") {
  VerifyOptions o = deterministic("off");
  o.timeout_s = 0;
  VerifyOutcome out = verify_source(example_safe(), o);
  CHECK(out.verdict.kind == VerdictKind::Unknown);
}

TEST_CASE("verify: dumped SMT scripts") {
  auto dir = std::filesystem::temp_directory_path() / "kindle-dump-test";
  std::filesystem::remove_all(dir);
  VerifyOptions o = deterministic("off");
  o.k_max = 2;
  o.dump_smt = dir.string();
  verify_source(example_safe(), o);
  CHECK(std::filesystem::exists(dir / "base-k1.smt2"));
  CHECK(std::filesystem::exists(dir / "step-k1-v0.smt2"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("verify: increment function") {
  NormalizedCfa n = normalize(example_safe());
  KInductionConfig cfg;
  cfg.k_max = 8;
  cfg.inc = [](std::size_t k) { return k * 2; };
  std::vector<std::size_t> ks;
  cfg.on_step = [&](std::size_t k, const Formula&, const Formula&, CheckResult) {
    if (ks.empty() || ks.back() != k) ks.push_back(k);
  };
  FixedInvariantSource none;
  verify(n, cfg, none);
  CHECK(ks == std::vector<std::size_t>{1, 2, 4, 8});
}
