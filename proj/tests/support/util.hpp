#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "kindle/cfa.hpp"
#include "kindle/encoder.hpp"
#include "kindle/loop_transform.hpp"
#include "kindle/parser.hpp"
#include "kindle/smt.hpp"

namespace kindle::testing {

inline std::string read_benchmark(const std::string& name) {
  std::ifstream in(std::string(KINDLE_BENCHMARK_DIR) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline const std::string& example_safe() {
  static const std::string s = read_benchmark("example-safe_true.c");
  return s;
}

inline const std::string& example_unsafe() {
  static const std::string s = read_benchmark("example-unsafe_false.c");
  return s;
}

inline NormalizedCfa normalize(const std::string& source) { return to_single_loop(build_cfa(parse(source))); }

inline VarId var_id(const NormalizedCfa& ncfa, const std::string& name) {
  for (VarId v = 0; v < ncfa.cfa.vars.size(); ++v)
    if (ncfa.cfa.vars[v] == name) return v;
  throw Error("no variable " + name);
}

/// One-shot check in a fresh solver process.
inline CheckResult fresh_check(const Formula& f) {
  SmtSession session;
  return session.check(f);
}

/// Program variables replaced by free integer symbols.
inline Formula ground(const Formula& f) {
  return instantiate(f, [](VarId v) { return t_sym("v" + std::to_string(v), Sort::Int); });
}

/// `a` entails `b` over program variables.
inline bool entails(const Formula& a, const Formula& b) {
  return fresh_check(ground(t_and(a, t_not(b)))) == CheckResult::Unsat;
}

}  // namespace kindle::testing
