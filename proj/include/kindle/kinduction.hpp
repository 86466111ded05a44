#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "kindle/encoder.hpp"
#include "kindle/invgen.hpp"
#include "kindle/smt.hpp"

namespace kindle {

struct KInductionConfig {
  std::size_t k_init = 1;
  std::size_t k_max = 100;
  std::function<std::size_t(std::size_t)> inc = [](std::size_t k) { return k + 1; };
  HavocStrategy havoc = HavocStrategy::SoundAll;
  SolverConfig solver;
  /// Wall-clock limit for the whole run.
  std::chrono::milliseconds timeout{900'000};
  /// Check only the newest depth in the base case.
  bool base_omission = true;
  /// Writes `<kind>-k<k>[-v<version>].smt2` scripts when non-empty.
  std::string dump_smt_dir;
  /// Called after every incremental step-case check with the persistent part,
  /// the invariant delta and the verdict.
  std::function<void(std::size_t k, const Formula& frames, const Formula& inv, CheckResult)> on_step;
};

enum class VerdictKind { True, False, Unknown };
enum class ProofSource { None, ForwardCondition, Induction, InvariantEngine };
enum class UnknownReason { None, KMaxExhausted, Timeout, SolverUnknown };

std::string to_string(VerdictKind k);
std::string to_string(ProofSource s);
std::string to_string(UnknownReason r);

struct Verdict {
  VerdictKind kind = VerdictKind::Unknown;
  ProofSource source = ProofSource::None;
  UnknownReason reason = UnknownReason::None;
  std::size_t final_k = 0;
  std::uint64_t invariant_version = 0;
  /// Counterexample of a False verdict; replays to the error location.
  std::optional<Trace> trace;
  std::size_t trace_iterations = 0;
  /// Step-case checks per k, for progress accounting.
  std::size_t step_checks = 0;
};

InvariantSnapshot get_currently_known_invariant(const InvariantSource& source);

/// Iterative-deepening k-induction: base case, forward condition, then the
/// inductive step re-checked for as long as new invariants keep arriving.
Verdict verify(const NormalizedCfa& ncfa, const KInductionConfig& cfg, const InvariantSource& invariants);

}  // namespace kindle
