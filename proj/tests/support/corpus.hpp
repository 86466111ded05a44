#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kindle/loop_transform.hpp"

namespace kindle::testing {

/// A random program in the toy language: at most four variables, at most two
/// loops, every variable initialized, nondet values folded into {0, 1}, bitwise
/// operators and shifts only with literal operands.
std::string generate_program(std::uint64_t seed);

struct CorpusProgram {
  std::uint64_t seed = 0;
  std::string name;
  std::string source;
  NormalizedCfa ncfa;
};

/// `count` generated programs, skipping those whose bounded executions
/// (up to `overflow_bound` loop iterations) overflow 64-bit arithmetic.
std::vector<CorpusProgram> make_corpus(std::size_t count, std::uint64_t first_seed = 1,
                                       std::size_t overflow_bound = 10);

/// Nondet values used by the oracles. Generated programs fold every nondet
/// value with `% 2`, so this loses nothing.
const std::vector<std::int64_t>& oracle_domain();

}  // namespace kindle::testing
