#pragma once

#include <chrono>
#include <cstdint>
#include <mutex>
#include <optional>
#include <stop_token>
#include <thread>
#include <vector>

#include "kindle/cpa.hpp"
#include "kindle/formula.hpp"

namespace kindle {

struct InvariantSnapshot {
  std::uint64_t version = 0;
  /// Loop-head invariant over program variables.
  Formula formula = t_true();
  bool proved_safe = false;
};

/// Where the k-induction core reads auxiliary invariants from.
class InvariantSource {
 public:
  virtual ~InvariantSource() = default;
  virtual InvariantSnapshot get_currently_known_invariant() const = 0;
};

/// Always the same snapshot; used to inject an invariant or to run without one.
class FixedInvariantSource : public InvariantSource {
 public:
  explicit FixedInvariantSource(Formula f = t_true(), std::uint64_t version = 0) {
    snap_.formula = std::move(f);
    snap_.version = version;
  }
  InvariantSnapshot get_currently_known_invariant() const override { return snap_; }

 private:
  InvariantSnapshot snap_;
};

/// Thread-safe, strengthening-only publication point.
class SnapshotChannel : public InvariantSource {
 public:
  InvariantSnapshot get_currently_known_invariant() const override;
  /// Publishes Inv := Inv ∧ f as the next version.
  void publish(const Formula& f);
  void mark_proved_safe();
  /// Every published snapshot in order, starting with version 0.
  std::vector<InvariantSnapshot> history() const;

 private:
  mutable std::mutex mu_;
  std::vector<InvariantSnapshot> history_{InvariantSnapshot{}};
};

/// Up to `count` variables read by assume edges, nearest to the error
/// location first (reverse BFS). The dispatch variable is never selected.
std::vector<VarId> select_variables(const NormalizedCfa& ncfa, std::size_t count);

Precision initial_precision();
/// All variables, depth 2, no widening.
Precision terminal_precision(const NormalizedCfa& ncfa);
/// Refinement `round` (1-based) applied to `p`: rounds 1, 3, 5, 6, ... grow
/// the important variables to 1, 2, 4, 8, ... (then all), round 2 raises the
/// depth to 2 and round 4 turns widening off. Nullopt once `p` is terminal.
std::optional<Precision> refine_precision(const Precision& p, std::size_t round, const NormalizedCfa& ncfa);

/// Disjunction of the reached loop-head states, each as a conjunction of
/// per-variable constraints; false if no state reaches the head.
Formula states_to_formula(const std::vector<AbstractState>& reached, Loc loop_head);

/// Rendering of one state.
Formula state_to_formula(const AbstractState& s);

/// Constraint `var(v) ∈ set`.
Formula membership(VarId v, const IntervalSet& set);

struct InvgenConfig {
  std::chrono::milliseconds round_budget{10'000};
  std::size_t max_states = 200'000;
  /// Keep each round's reached set in its RoundResult.
  bool keep_reached = false;
};

struct RoundResult {
  Precision precision;
  bool complete = false;
  bool proved_safe = false;
  std::size_t states = 0;
  /// Set when the round published.
  std::optional<Formula> formula;
  std::vector<AbstractState> reached;
};

/// Continuous invariant generation: CPA runs of increasing precision, each
/// complete run strengthening the published loop-head invariant.
class InvariantEngine {
 public:
  InvariantEngine(const NormalizedCfa& ncfa, SnapshotChannel& channel, InvgenConfig config = {});
  ~InvariantEngine();
  InvariantEngine(const InvariantEngine&) = delete;
  InvariantEngine& operator=(const InvariantEngine&) = delete;

  /// One CPA run at `prec`; publishes on completion.
  RoundResult run_round(const Precision& prec, std::stop_token stop = {});

  /// Runs the schedule from the initial precision for at most `rounds` rounds.
  /// Stops early on a proof or after the terminal precision.
  std::vector<RoundResult> run_rounds(std::size_t rounds, std::stop_token stop = {});

  /// Whole schedule until proof, terminal precision or cancellation.
  void generate(std::stop_token stop);

  void start_async();
  /// Cancels and joins the worker.
  void stop();

  std::vector<RoundResult> results() const;

 private:
  const NormalizedCfa& ncfa_;
  SnapshotChannel& channel_;
  InvgenConfig config_;
  mutable std::mutex mu_;
  std::vector<RoundResult> results_;
  std::jthread worker_;
};

}  // namespace kindle
