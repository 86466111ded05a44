#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "kindle/cfa.hpp"
#include "kindle/loop_transform.hpp"

namespace kindle {

using Env = std::vector<Value>;

struct ConcreteState {
  Loc loc = 0;
  Env env;

  bool operator==(const ConcreteState&) const = default;
};

struct TraceStep {
  std::size_t edge = 0;
  ConcreteState state;  // after taking `edge`
};

struct Trace {
  ConcreteState initial;
  std::vector<TraceStep> steps;
  /// Values consumed by havoc edges, in order.
  std::vector<Value> choices;

  const ConcreteState& last() const { return steps.empty() ? initial : steps.back().state; }
};

enum class RunStatus {
  ErrorReached,
  Completed,
  StepBudgetExhausted,
  /// Division or modulo by zero, or a shift amount outside [0, 62].
  Trapped,
  /// No outgoing edge is enabled.
  Blocked,
};

struct RunResult {
  RunStatus status = RunStatus::Completed;
  Trace trace;
};

/// Evaluates `e` with C-like semantics: `/` truncates, `%` is Euclidean,
/// `>>` is arithmetic, comparisons and logical operators yield 0 or 1,
/// `&&`/`||` short-circuit. Returns nullopt on a trap and throws
/// OverflowError when a result leaves the 64-bit range.
std::optional<Value> eval(const Expr& e, const Env& env);

/// Applies a binary operator to already evaluated operands (no short-circuit).
std::optional<Value> apply(BinOp op, Value a, Value b);
Value apply(UnOp op, Value a);

/// Supplies havoc values; receives the edge index and the number of loop-head
/// visits so far (0 before the first visit).
using ChoiceFn = std::function<Value(std::size_t edge, std::size_t head_visits)>;

/// Executes the CFA from its entry. Havoc edges consume `choices` in order and
/// read 0 once they are exhausted. `max_steps` bounds the number of edges taken.
RunResult run(const Cfa& cfa, std::span<const Value> choices, std::size_t max_steps,
              std::optional<Env> initial = std::nullopt);

/// As above with a callback for havoc values; `loop_head` is used to count
/// visits for the callback.
RunResult run(const Cfa& cfa, const ChoiceFn& choose, std::size_t max_steps, Loc loop_head,
              std::optional<Env> initial = std::nullopt);

/// Completed loop iterations of a trace: loop-head visits minus one, floored at 0.
std::size_t loop_iterations(const Trace& trace, Loc loop_head);

struct Counterexample {
  Trace trace;
  std::size_t iterations = 0;
};

/// Breadth-first search over havoc values drawn from `domain`, level by level
/// in loop iterations. Returns an error trace with the fewest iterations, or
/// nullopt if none exists within `max_loop_iterations`. `max_states` caps the
/// explored configurations (nullopt is also returned when the cap is hit; see
/// `exhausted`).
std::optional<Counterexample> shortest_cex(const NormalizedCfa& ncfa, std::span<const Value> domain,
                                           std::size_t max_loop_iterations,
                                           std::size_t max_states = 2'000'000, bool* exhausted = nullptr);

/// Calls `visit` for every concrete state reachable with havoc values from
/// `domain` within `max_loop_iterations` iterations (each state once).
/// Returns false if `max_states` was hit.
bool for_each_reachable(const NormalizedCfa& ncfa, std::span<const Value> domain, std::size_t max_loop_iterations,
                        const std::function<void(const ConcreteState&)>& visit, std::size_t max_states = 2'000'000);

std::string to_string(RunStatus s);

}  // namespace kindle
