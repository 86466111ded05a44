#include "kindle/smt.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <sstream>
#include <thread>

extern char** environ;

namespace kindle {

std::vector<std::string> split_command(const std::string& cmd) {
  std::istringstream is(cmd);
  std::vector<std::string> out;
  std::string word;
  while (is >> word) out.push_back(word);
  return out;
}

std::string to_string(CheckResult r) {
  switch (r) {
    case CheckResult::Sat: return "sat";
    case CheckResult::Unsat: return "unsat";
    case CheckResult::Unknown: return "unknown";
  }
  return "?";
}

std::optional<Value> Model::get(const std::string& name) const {
  auto it = ints.find(name);
  if (it == ints.end()) return std::nullopt;
  return it->second;
}

namespace {

struct SExpr {
  std::string atom;
  std::vector<SExpr> list;
  bool is_list = false;
};

class SExprReader {
 public:
  explicit SExprReader(const std::string& s) : s_(s) {}

  std::optional<SExpr> next() {
    skip();
    if (i_ >= s_.size()) return std::nullopt;
    if (s_[i_] == ')') throw SolverError("unbalanced ')' in solver output");
    if (s_[i_] == '(') {
      ++i_;
      SExpr e;
      e.is_list = true;
      for (;;) {
        skip();
        if (i_ >= s_.size()) throw SolverError("unterminated list in solver output");
        if (s_[i_] == ')') {
          ++i_;
          return e;
        }
        e.list.push_back(*next());
      }
    }
    SExpr e;
    if (s_[i_] == '|' || s_[i_] == '"') {
      char close = s_[i_];
      std::size_t start = ++i_;
      while (i_ < s_.size() && s_[i_] != close) ++i_;
      e.atom = s_.substr(start, i_ - start);
      ++i_;
      return e;
    }
    std::size_t start = i_;
    while (i_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[i_])) && s_[i_] != '(' && s_[i_] != ')')
      ++i_;
    e.atom = s_.substr(start, i_ - start);
    return e;
  }

 private:
  void skip() {
    while (i_ < s_.size()) {
      if (std::isspace(static_cast<unsigned char>(s_[i_]))) {
        ++i_;
      } else if (s_[i_] == ';') {
        while (i_ < s_.size() && s_[i_] != '\n') ++i_;
      } else {
        break;
      }
    }
  }

  const std::string& s_;
  std::size_t i_ = 0;
};

std::optional<Value> int_value(const SExpr& e) {
  if (!e.is_list) {
    Value v = 0;
    std::istringstream is(e.atom);
    if (is >> v && is.eof()) return v;
    return std::nullopt;
  }
  if (e.list.size() == 2 && !e.list[0].is_list && e.list[0].atom == "-") {
    auto inner = int_value(e.list[1]);
    if (inner) return -*inner;
  }
  return std::nullopt;
}

void collect_defines(const SExpr& e, Model& m) {
  if (!e.is_list) return;
  if (e.list.size() == 5 && !e.list[0].is_list && e.list[0].atom == "define-fun" && e.list[2].is_list &&
      e.list[2].list.empty()) {
    const std::string& name = e.list[1].atom;
    const std::string& sort = e.list[3].atom;
    if (sort == "Int") {
      if (auto v = int_value(e.list[4])) m.ints[name] = *v;
    } else if (sort == "Bool" && !e.list[4].is_list) {
      m.bools[name] = e.list[4].atom == "true";
    }
    return;
  }
  for (const auto& c : e.list) collect_defines(c, m);
}

void ignore_sigpipe() {
  static const bool done = [] {
    ::signal(SIGPIPE, SIG_IGN);
    return true;
  }();
  (void)done;
}

}  // namespace

Model parse_model(const std::string& text) {
  Model m;
  SExprReader reader(text);
  while (auto e = reader.next()) collect_defines(*e, m);
  return m;
}

SmtSession::SmtSession(SolverConfig config) : config_(std::move(config)) {
  if (config_.command.empty()) throw SolverError("empty solver command");
  ignore_sigpipe();
  levels_.emplace_back();
  start();
}

SmtSession::~SmtSession() { stop_process(); }

void SmtSession::start() {
  int in[2], out[2];
  if (::pipe2(in, O_CLOEXEC) != 0 || ::pipe2(out, O_CLOEXEC) != 0)
    throw SolverError(std::string("pipe: ") + std::strerror(errno));
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in[0], 0);
  posix_spawn_file_actions_adddup2(&actions, out[1], 1);
  posix_spawn_file_actions_addopen(&actions, 2, "/dev/null", O_WRONLY, 0);
  std::vector<char*> argv;
  for (auto& a : config_.command) argv.push_back(a.data());
  argv.push_back(nullptr);
  pid_t pid = -1;
  int rc = posix_spawnp(&pid, argv[0], &actions, nullptr, argv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  ::close(in[0]);
  ::close(out[1]);
  if (rc != 0) {
    ::close(in[1]);
    ::close(out[0]);
    throw SolverError("cannot start solver '" + config_.command[0] + "': " + std::strerror(rc));
  }
  pid_ = pid;
  to_solver_ = in[1];
  from_solver_ = out[0];
  buffer_.clear();

  std::string header = "(set-option :print-success false)\n(set-option :produce-models true)\n(set-logic ";
  header += full_logic_ ? "ALL" : "QF_LIA";
  header += ")\n";
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    if (i > 0) header += "(push 1)\n";
    for (const auto& c : levels_[i].commands) header += c;
  }
  if (!send(header)) throw SolverError("solver '" + config_.command[0] + "' exited during startup");
}

void SmtSession::stop_process() {
  if (pid_ <= 0) return;
  if (to_solver_ >= 0) {
    send("(exit)\n");
    ::close(to_solver_);
    to_solver_ = -1;
  }
  int status = 0;
  for (int i = 0; i < 100; ++i) {
    pid_t r = ::waitpid(pid_, &status, WNOHANG);
    if (r != 0) break;
    if (i == 20) ::kill(pid_, SIGKILL);
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  ::kill(pid_, SIGKILL);
  ::waitpid(pid_, &status, WNOHANG);
  if (from_solver_ >= 0) ::close(from_solver_);
  from_solver_ = -1;
  pid_ = -1;
}

void SmtSession::restart() {
  ++restarts_;
  if (pid_ > 0) {
    ::kill(pid_, SIGKILL);
    int status = 0;
    ::waitpid(pid_, &status, 0);
    pid_ = -1;
  }
  if (to_solver_ >= 0) ::close(to_solver_);
  if (from_solver_ >= 0) ::close(from_solver_);
  to_solver_ = from_solver_ = -1;
  start();
}

void SmtSession::kill_solver() {
  if (pid_ > 0) {
    ::kill(pid_, SIGKILL);
    int status = 0;
    ::waitpid(pid_, &status, 0);
  }
}

bool SmtSession::send(const std::string& text) {
  std::size_t off = 0;
  while (off < text.size()) {
    ssize_t n = ::write(to_solver_, text.data() + off, text.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    off += static_cast<std::size_t>(n);
  }
  return true;
}

void SmtSession::record(const std::string& cmd) {
  levels_.back().commands.push_back(cmd);
  if (!send(cmd)) restart();
}

bool SmtSession::is_declared(const std::string& name) const {
  for (const auto& l : levels_)
    if (l.declared.count(name)) return true;
  return false;
}

void SmtSession::push() {
  levels_.emplace_back();
  if (!send("(push 1)\n")) restart();
}

void SmtSession::pop() {
  if (levels_.size() <= 1) throw SolverError("pop on empty assertion stack");
  levels_.pop_back();
  if (!send("(pop 1)\n")) restart();
}

void SmtSession::assert_formula(const Formula& f) {
  if (!full_logic_ && is_nonlinear(f)) {
    full_logic_ = true;
    restart();
  }
  std::map<std::string, Sort> symbols;
  std::map<std::string, std::size_t> functions;
  collect_symbols(f, symbols, functions);
  std::string decls;
  for (const auto& [name, arity] : functions) {
    if (is_declared(name)) continue;
    levels_.back().declared.insert(name);
    decls += "(declare-fun " + name + " (";
    for (std::size_t i = 0; i < arity; ++i) decls += i ? " Int" : "Int";
    decls += ") Int)\n";
  }
  for (const auto& [name, sort] : symbols) {
    if (is_declared(name)) continue;
    levels_.back().declared.insert(name);
    decls += "(declare-const " + name + " " + smt_sort(sort) + ")\n";
  }
  record(decls + "(assert " + to_smt(f) + ")\n");
}

std::optional<std::string> SmtSession::read_line(std::chrono::steady_clock::time_point deadline) {
  for (;;) {
    auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return line;
    }
    auto now = std::chrono::steady_clock::now();
    if (now >= deadline) return std::nullopt;
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
    pollfd p{from_solver_, POLLIN, 0};
    int rc = ::poll(&p, 1, static_cast<int>(std::min<long long>(ms + 1, 1'000'000)));
    if (rc < 0 && errno == EINTR) continue;
    if (rc <= 0) continue;
    char chunk[4096];
    ssize_t n = ::read(from_solver_, chunk, sizeof chunk);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) throw SolverError("solver closed its output");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

std::optional<std::string> SmtSession::read_sexpr(std::chrono::steady_clock::time_point deadline) {
  std::string text;
  int open = 0;
  bool started = false;
  for (;;) {
    auto line = read_line(deadline);
    if (!line) return std::nullopt;
    for (char c : *line) {
      if (c == '(') {
        ++open;
        started = true;
      } else if (c == ')') {
        --open;
      }
    }
    text += *line + "\n";
    if (started && open <= 0) return text;
  }
}

CheckResult SmtSession::check_sat(bool want_model) {
  ++checks_;
  unknown_reason_.clear();
  model_ = Model{};
  auto deadline = std::chrono::steady_clock::now() + config_.timeout;
  try {
    if (!send("(check-sat)\n")) throw SolverError("solver not accepting input");
    for (;;) {
      auto line = read_line(deadline);
      if (!line) {
        unknown_reason_ = "timeout";
        restart();
        return CheckResult::Unknown;
      }
      if (line->rfind("(error", 0) == 0) throw SolverError("solver reported " + *line);
      if (*line == "unsat") return CheckResult::Unsat;
      if (*line == "unknown") {
        unknown_reason_ = "solver answered unknown";
        return CheckResult::Unknown;
      }
      if (*line == "sat") break;
    }
    if (want_model) {
      if (!send("(get-model)\n")) throw SolverError("solver not accepting input");
      auto text = read_sexpr(deadline);
      if (!text) {
        unknown_reason_ = "timeout while reading model";
        restart();
        return CheckResult::Unknown;
      }
      if (text->rfind("(error", 0) == 0) throw SolverError("solver reported " + *text);
      model_ = parse_model(*text);
    }
    return CheckResult::Sat;
  } catch (const SolverError& e) {
    std::string what = e.what();
    if (what.rfind("solver reported", 0) == 0) throw;
    unknown_reason_ = "solver crashed: " + what;
    restart();
    return CheckResult::Unknown;
  }
}

CheckResult SmtSession::check(const Formula& f, bool want_model) {
  push();
  assert_formula(f);
  auto r = check_sat(want_model);
  pop();
  return r;
}

}  // namespace kindle
