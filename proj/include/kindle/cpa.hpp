#pragma once

#include <chrono>
#include <stop_token>
#include <string>
#include <vector>

#include "kindle/abstract_state.hpp"
#include "kindle/loop_transform.hpp"

namespace kindle {

struct CpaBudget {
  std::chrono::steady_clock::time_point deadline = std::chrono::steady_clock::time_point::max();
  std::size_t max_states = 200'000;
  std::stop_token stop;
};

struct CpaResult {
  std::vector<AbstractState> reached;
  /// False if the budget ran out or the run was cancelled; `reached` is then partial.
  bool complete = true;
  std::size_t states_created = 0;
};

/// Worklist reachability. States at the loop head are joined with `merge`;
/// elsewhere, states that agree on the important variables are joined by union.
CpaResult cpa_algorithm(const NormalizedCfa& ncfa, const AbstractState& init, const Precision& prec,
                        const CpaBudget& budget = {});

/// Initial state at the entry with every variable unconstrained.
AbstractState initial_state(const NormalizedCfa& ncfa);

/// `loc: var ∈ set, ...`, one reached state per line, ordered by location.
std::string dump_reached(const CpaResult& result, const std::vector<std::string>& names);

}  // namespace kindle
