#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "kindle/formula.hpp"

namespace kindle {

struct SolverConfig {
  std::vector<std::string> command{"z3", "-in", "-smt2"};
  std::chrono::milliseconds timeout{60'000};
};

/// Splits a shell-like command line on whitespace.
std::vector<std::string> split_command(const std::string& cmd);

enum class CheckResult { Sat, Unsat, Unknown };
std::string to_string(CheckResult r);

class SolverError : public Error {
 public:
  using Error::Error;
};

struct Model {
  std::map<std::string, Value> ints;
  std::map<std::string, bool> bools;

  std::optional<Value> get(const std::string& name) const;
};

/// Parses the response to `(get-model)`. Accepts negative literals as `(- 3)`.
Model parse_model(const std::string& text);

/// One external solver process speaking SMT-LIB2 over pipes. Declarations are
/// emitted on demand and scoped by push/pop. Every command is logged per stack
/// level so a crashed or timed-out solver can be restarted and the stack
/// replayed; the interrupted query then answers Unknown.
class SmtSession {
 public:
  explicit SmtSession(SolverConfig config = {});
  ~SmtSession();
  SmtSession(const SmtSession&) = delete;
  SmtSession& operator=(const SmtSession&) = delete;

  void push();
  void pop();
  void assert_formula(const Formula& f);

  /// Checks the current stack. With `want_model`, a Sat answer also fetches the model.
  CheckResult check_sat(bool want_model = false);

  /// Asserts `f` in a fresh frame, checks, and pops the frame again.
  CheckResult check(const Formula& f, bool want_model = false);
  /// Same as `check`, named for the incremental use where a persistent part
  /// is already on the stack and `delta` is tried on top of it.
  CheckResult check_assuming(const Formula& delta, bool want_model = false) { return check(delta, want_model); }

  /// Model of the last Sat answer obtained with `want_model`.
  const Model& model() const { return model_; }

  std::size_t depth() const { return levels_.size() - 1; }
  int pid() const { return pid_; }
  std::size_t restarts() const { return restarts_; }
  std::size_t checks() const { return checks_; }
  bool uses_full_logic() const { return full_logic_; }
  const std::string& last_unknown_reason() const { return unknown_reason_; }

  /// Kills the solver process without telling the session (crash simulation).
  void kill_solver();

 private:
  struct Level {
    std::vector<std::string> commands;
    std::set<std::string> declared;
  };

  void start();
  void stop_process();
  void restart();
  bool send(const std::string& text);
  void record(const std::string& cmd);
  bool is_declared(const std::string& name) const;
  std::optional<std::string> read_line(std::chrono::steady_clock::time_point deadline);
  std::optional<std::string> read_sexpr(std::chrono::steady_clock::time_point deadline);

  SolverConfig config_;
  int pid_ = -1;
  int to_solver_ = -1;
  int from_solver_ = -1;
  std::string buffer_;
  std::vector<Level> levels_;
  bool full_logic_ = false;
  std::size_t restarts_ = 0;
  std::size_t checks_ = 0;
  Model model_;
  std::string unknown_reason_;
};

}  // namespace kindle
