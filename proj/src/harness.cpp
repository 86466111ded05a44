#include "kindle/harness.hpp"

#include <poll.h>
#include <signal.h>
#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <sstream>
#include <thread>

#include "kindle/cfa.hpp"
#include "kindle/parser.hpp"

namespace kindle {

InvgenMode parse_invgen(const std::string& text) {
  InvgenMode m;
  if (text == "off") {
    m.kind = InvgenMode::Kind::Off;
    return m;
  }
  if (text == "continuous") return m;
  const std::string prefix = "static:";
  if (text.rfind(prefix, 0) != 0) throw Error("invalid --invgen value '" + text + "'");
  std::string triple = text.substr(prefix.size());
  std::replace(triple.begin(), triple.end(), ',', ' ');
  std::istringstream is(triple);
  long s = -1, n = -1;
  std::string w;
  if (!(is >> s >> n >> w) || s < 0 || n < 1 || (w != "t" && w != "f") || !(is >> std::ws).eof())
    throw Error("invalid static triple '" + text.substr(prefix.size()) + "' (expected s,n,w with w t or f)");
  m.kind = InvgenMode::Kind::Static;
  m.s = static_cast<std::size_t>(s);
  m.n = static_cast<unsigned>(n);
  m.w = w == "t";
  return m;
}

std::string to_string(const InvgenMode& m) {
  switch (m.kind) {
    case InvgenMode::Kind::Off: return "off";
    case InvgenMode::Kind::Continuous: return "continuous";
    case InvgenMode::Kind::Static:
      return "static:" + std::to_string(m.s) + "," + std::to_string(m.n) + "," + (m.w ? "t" : "f");
  }
  return "?";
}

HavocStrategy parse_havoc(const std::string& text) {
  if (text == "all") return HavocStrategy::SoundAll;
  if (text == "loop-modified") return HavocStrategy::SoundLoopModified;
  if (text == "termination-vars") return HavocStrategy::UnsoundTerminationVars;
  throw Error("invalid --havoc value '" + text + "'");
}

void add_verify_options(CLI::App& app, VerifyOptions& o) {
  app.add_option("--k-init", o.k_init, "First k")->check(CLI::PositiveNumber);
  app.add_option("--k-max", o.k_max, "Last k");
  app.add_option("--invgen", o.invgen, "off | static:s,n,w | continuous");
  app.add_option("--deterministic-rounds", o.deterministic_rounds,
                 "Run this many invariant rounds before k-induction (continuous mode)");
  app.add_option("--invgen-round-budget", o.round_budget_s, "Seconds per invariant round");
  app.add_option("--invgen-max-states", o.max_states, "Abstract states per invariant round");
  app.add_option("--havoc", o.havoc, "all | loop-modified | termination-vars");
  app.add_option("--solver-cmd", o.solver_cmd, "SMT-LIB2 solver reading from stdin");
  app.add_option("--timeout", o.timeout_s, "Wall-clock limit in seconds");
  app.add_option("--dump-smt", o.dump_smt, "Directory for the emitted SMT-LIB2 queries");
  app.add_flag("--no-base-omission", o.no_base_omission, "Re-check all depths in every base case");
}

VerifyOptions parse_verify_flags(const std::string& flags) {
  VerifyOptions o;
  CLI::App app("config");
  add_verify_options(app, o);
  try {
    app.parse(flags, false);
  } catch (const CLI::ParseError& e) {
    throw Error("invalid flags '" + flags + "': " + e.what());
  }
  parse_invgen(o.invgen);
  parse_havoc(o.havoc);
  return o;
}

namespace {

std::chrono::milliseconds seconds(double s) {
  return std::chrono::milliseconds(static_cast<std::int64_t>(s * 1000));
}

}  // namespace

VerifyOutcome verify_program(const NormalizedCfa& ncfa, const VerifyOptions& opts) {
  KInductionConfig cfg;
  cfg.k_init = opts.k_init;
  cfg.k_max = opts.k_max;
  cfg.havoc = parse_havoc(opts.havoc);
  cfg.solver.command = split_command(opts.solver_cmd);
  cfg.timeout = seconds(opts.timeout_s);
  cfg.base_omission = !opts.no_base_omission;
  cfg.dump_smt_dir = opts.dump_smt;

  InvgenMode mode = parse_invgen(opts.invgen);
  VerifyOutcome out;
  if (mode.kind == InvgenMode::Kind::Off) {
    FixedInvariantSource none;
    out.verdict = verify(ncfa, cfg, none);
    out.snapshots.push_back(none.get_currently_known_invariant());
    return out;
  }

  InvgenConfig icfg;
  icfg.round_budget = seconds(opts.round_budget_s);
  icfg.max_states = opts.max_states;
  icfg.keep_reached = opts.keep_reached;
  SnapshotChannel channel;
  InvariantEngine engine(ncfa, channel, icfg);
  if (mode.kind == InvgenMode::Kind::Static) {
    Precision p;
    if (mode.s > 0) p.important = select_variables(ncfa, mode.s);
    std::sort(p.important.begin(), p.important.end());
    p.depth = mode.n;
    p.widen = mode.w;
    engine.run_round(p);
  } else if (opts.deterministic_rounds) {
    engine.run_rounds(*opts.deterministic_rounds);
  } else {
    engine.start_async();
  }
  out.verdict = verify(ncfa, cfg, channel);
  engine.stop();
  out.snapshots = channel.history();
  out.rounds = engine.results();
  return out;
}

VerifyOutcome verify_source(const std::string& source, const VerifyOptions& opts) {
  Ast ast = parse(source);
  NormalizedCfa ncfa = to_single_loop(build_cfa(ast));
  return verify_program(ncfa, opts);
}

std::string to_string(Classification c) {
  switch (c) {
    case Classification::CorrectProof: return "correct-proof";
    case Classification::CorrectAlarm: return "correct-alarm";
    case Classification::WrongProof: return "wrong-proof";
    case Classification::WrongAlarm: return "wrong-alarm";
    case Classification::Unknown: return "unknown";
  }
  return "?";
}

int score_of(Classification c) {
  switch (c) {
    case Classification::CorrectProof: return 2;
    case Classification::CorrectAlarm: return 1;
    case Classification::WrongProof: return -12;
    case Classification::WrongAlarm: return -6;
    case Classification::Unknown: return 0;
  }
  return 0;
}

Classification classify(bool expected_safe, VerdictKind actual) {
  switch (actual) {
    case VerdictKind::True: return expected_safe ? Classification::CorrectProof : Classification::WrongProof;
    case VerdictKind::False: return expected_safe ? Classification::WrongAlarm : Classification::CorrectAlarm;
    case VerdictKind::Unknown: return Classification::Unknown;
  }
  return Classification::Unknown;
}

std::optional<bool> expected_from_filename(const std::filesystem::path& file) {
  std::string name = file.filename().string();
  auto ends = [&](const std::string& suffix) {
    return name.size() >= suffix.size() && name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  if (ends("_true.c")) return true;
  if (ends("_false.c")) return false;
  return std::nullopt;
}

std::map<std::string, bool> load_manifest(const std::filesystem::path& dir) {
  std::map<std::string, bool> out;
  auto path = dir / "manifest.json";
  if (!std::filesystem::exists(path)) return out;
  std::ifstream in(path);
  nlohmann::json j = nlohmann::json::parse(in);
  for (auto& [name, value] : j.items()) {
    std::string v = value.is_boolean() ? (value.get<bool>() ? "true" : "false") : value.get<std::string>();
    if (v != "true" && v != "false") throw Error("manifest entry '" + name + "' must be true or false");
    out[name] = v == "true";
  }
  return out;
}

namespace {

double cpu_seconds(const rusage& ru) {
  auto tv = [](const timeval& t) { return static_cast<double>(t.tv_sec) + static_cast<double>(t.tv_usec) / 1e6; };
  return tv(ru.ru_utime) + tv(ru.ru_stime);
}

void fill(TaskResult& r, VerdictKind kind, std::size_t final_k, std::uint64_t version, std::string detail) {
  r.actual = kind;
  r.cls = classify(r.expected_safe, kind);
  r.final_k = final_k;
  r.inv_version = version;
  r.detail = std::move(detail);
}

}  // namespace

TaskResult run_task(const std::filesystem::path& file, bool expected_safe, const std::string& config,
                    const VerifyOptions& opts) {
  TaskResult r;
  r.task = file.filename().string();
  r.config = config;
  r.expected_safe = expected_safe;
  rusage before{}, before_children{};
  getrusage(RUSAGE_SELF, &before);
  getrusage(RUSAGE_CHILDREN, &before_children);
  auto start = std::chrono::steady_clock::now();
  try {
    std::ifstream in(file);
    if (!in) throw Error("cannot read " + file.string());
    std::stringstream ss;
    ss << in.rdbuf();
    VerifyOutcome out = verify_source(ss.str(), opts);
    const Verdict& v = out.verdict;
    std::string detail = v.kind == VerdictKind::True    ? to_string(v.source)
                         : v.kind == VerdictKind::False ? "trace with " + std::to_string(v.trace_iterations) + " iterations"
                                                        : to_string(v.reason);
    fill(r, v.kind, v.final_k, v.invariant_version, detail);
  } catch (const std::exception& e) {
    fill(r, VerdictKind::Unknown, 0, 0, std::string("error: ") + e.what());
  }
  r.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  rusage after{}, after_children{};
  getrusage(RUSAGE_SELF, &after);
  getrusage(RUSAGE_CHILDREN, &after_children);
  r.cpu_s = cpu_seconds(after) - cpu_seconds(before) + cpu_seconds(after_children) - cpu_seconds(before_children);
  return r;
}

std::vector<NamedConfig> parse_configs(const std::string& text) {
  std::vector<NamedConfig> out;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    auto colon = line.find(':');
    if (colon == std::string::npos) throw Error("config line without ':' : " + line);
    NamedConfig c;
    c.name = line.substr(first, colon - first);
    while (!c.name.empty() && std::isspace(static_cast<unsigned char>(c.name.back()))) c.name.pop_back();
    c.flags = line.substr(colon + 1);
    c.options = parse_verify_flags(c.flags);
    out.push_back(std::move(c));
  }
  if (out.empty()) throw Error("no configurations given");
  return out;
}

std::vector<BenchTask> collect_tasks(const std::filesystem::path& dir) {
  auto manifest = load_manifest(dir);
  std::vector<BenchTask> tasks;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".c") continue;
    std::string name = entry.path().filename().string();
    std::optional<bool> expected;
    if (auto it = manifest.find(name); it != manifest.end())
      expected = it->second;
    else
      expected = expected_from_filename(entry.path());
    if (expected) tasks.push_back({entry.path(), *expected});
  }
  std::sort(tasks.begin(), tasks.end(), [](const BenchTask& a, const BenchTask& b) { return a.file < b.file; });
  return tasks;
}

namespace {

// Worker output: kind, final_k, version, detail
std::string encode_result(const TaskResult& r) {
  std::ostringstream os;
  os << static_cast<int>(r.actual) << '\t' << r.final_k << '\t' << r.inv_version << '\t' << r.detail;
  return os.str();
}

void decode_result(const std::string& line, TaskResult& r) {
  std::istringstream is(line);
  int kind = 0;
  std::size_t k = 0;
  std::uint64_t version = 0;
  if (!(is >> kind >> k >> version)) {
    fill(r, VerdictKind::Unknown, 0, 0, "worker produced no result");
    return;
  }
  std::string detail;
  std::getline(is >> std::ws, detail);
  fill(r, static_cast<VerdictKind>(kind), k, version, detail);
}

struct Running {
  std::size_t index;
  int fd;
  std::string output;
  std::chrono::steady_clock::time_point start;
  double limit_s;
};

}  // namespace

std::vector<TaskResult> run_bench(const std::vector<BenchTask>& tasks, const std::vector<NamedConfig>& configs,
                                  std::size_t jobs) {
  struct Job {
    const BenchTask* task;
    const NamedConfig* config;
  };
  std::vector<Job> queue;
  for (const auto& c : configs)
    for (const auto& t : tasks) queue.push_back({&t, &c});
  std::vector<TaskResult> results(queue.size());
  std::map<pid_t, Running> running;
  std::size_t next = 0;
  jobs = std::max<std::size_t>(jobs, 1);
  std::cout.flush();
  std::cerr.flush();

  while (next < queue.size() || !running.empty()) {
    while (next < queue.size() && running.size() < jobs) {
      const Job& job = queue[next];
      TaskResult& r = results[next];
      r.task = job.task->file.filename().string();
      r.config = job.config->name;
      r.expected_safe = job.task->expected_safe;
      int fds[2];
      if (::pipe(fds) != 0) throw Error(std::string("pipe: ") + std::strerror(errno));
      pid_t pid = ::fork();
      if (pid < 0) throw Error(std::string("fork: ") + std::strerror(errno));
      if (pid == 0) {
        ::close(fds[0]);
        TaskResult child = run_task(job.task->file, job.task->expected_safe, job.config->name, job.config->options);
        std::string line = encode_result(child) + "\n";
        [[maybe_unused]] auto n = ::write(fds[1], line.data(), line.size());
        ::close(fds[1]);
        ::_exit(0);
      }
      ::close(fds[1]);
      running[pid] = Running{next, fds[0], "", std::chrono::steady_clock::now(),
                             job.config->options.timeout_s + 30};
      ++next;
    }

    // drain pipes so a worker never blocks on write
    for (auto& [pid, run] : running) {
      pollfd p{run.fd, POLLIN, 0};
      while (::poll(&p, 1, 0) > 0 && (p.revents & (POLLIN | POLLHUP))) {
        char buf[4096];
        ssize_t n = ::read(run.fd, buf, sizeof buf);
        if (n <= 0) break;
        run.output.append(buf, static_cast<std::size_t>(n));
      }
    }

    int status = 0;
    rusage ru{};
    pid_t done = ::wait4(-1, &status, WNOHANG, &ru);
    if (done > 0 && running.count(done)) {
      Running run = std::move(running[done]);
      running.erase(done);
      char buf[4096];
      ssize_t n;
      while ((n = ::read(run.fd, buf, sizeof buf)) > 0) run.output.append(buf, static_cast<std::size_t>(n));
      ::close(run.fd);
      TaskResult& r = results[run.index];
      r.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - run.start).count();
      r.cpu_s = cpu_seconds(ru);
      if (WIFEXITED(status) && WEXITSTATUS(status) == 0)
        decode_result(run.output, r);
      else
        fill(r, VerdictKind::Unknown, 0, 0, "worker terminated abnormally");
      continue;
    }
    auto now = std::chrono::steady_clock::now();
    for (auto& [pid, run] : running)
      if (std::chrono::duration<double>(now - run.start).count() > run.limit_s) ::kill(pid, SIGKILL);
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  return results;
}

ConfigSummary score(const std::string& config, const std::vector<TaskResult>& results) {
  ConfigSummary s;
  s.config = config;
  int negative = 0;
  std::vector<const TaskResult*> correct;
  std::size_t k_sum = 0, k_count = 0;
  for (const auto& r : results) {
    if (r.config != config) continue;
    int points = score_of(r.cls);
    s.score += points;
    s.cpu_s += r.cpu_s;
    s.wall_s += r.wall_s;
    switch (r.cls) {
      case Classification::CorrectProof: ++s.correct_proofs; break;
      case Classification::CorrectAlarm: ++s.correct_alarms; break;
      case Classification::WrongProof: ++s.wrong_proofs; break;
      case Classification::WrongAlarm: ++s.wrong_alarms; break;
      case Classification::Unknown: ++s.unknowns; break;
    }
    if (points < 0) negative += points;
    if (points > 0) {
      correct.push_back(&r);
      s.max_final_k = std::max(s.max_final_k, r.final_k);
      k_sum += r.final_k;
      ++k_count;
    }
  }
  s.correct = s.correct_proofs + s.correct_alarms;
  s.avg_final_k = k_count ? static_cast<double>(k_sum) / static_cast<double>(k_count) : 0;
  std::stable_sort(correct.begin(), correct.end(),
                   [](const TaskResult* a, const TaskResult* b) { return a->cpu_s < b->cpu_s; });
  int acc = negative;
  s.quantiles.emplace_back(acc, 0.0);
  for (const auto* r : correct) {
    acc += score_of(r->cls);
    s.quantiles.emplace_back(acc, r->cpu_s);
  }
  return s;
}

ScoreReport compare_configs(const std::vector<TaskResult>& results) {
  ScoreReport report;
  std::vector<std::string> names;
  for (const auto& r : results)
    if (std::find(names.begin(), names.end(), r.config) == names.end()) names.push_back(r.config);
  for (const auto& n : names) report.configs.push_back(score(n, results));
  return report;
}

std::string format_table(const ScoreReport& report) {
  std::ostringstream os;
  os << std::left << std::setw(22) << "config" << std::right << std::setw(7) << "score" << std::setw(9) << "correct"
     << std::setw(8) << "proofs" << std::setw(8) << "alarms" << std::setw(8) << "wrong-p" << std::setw(8) << "wrong-a"
     << std::setw(8) << "unknown" << std::setw(10) << "cpu_s" << std::setw(10) << "wall_s" << std::setw(7) << "max_k"
     << std::setw(7) << "avg_k" << "\n";
  os << std::fixed;
  for (const auto& c : report.configs) {
    os << std::left << std::setw(22) << c.config << std::right << std::setw(7) << c.score << std::setw(9) << c.correct
       << std::setw(8) << c.correct_proofs << std::setw(8) << c.correct_alarms << std::setw(8) << c.wrong_proofs
       << std::setw(8) << c.wrong_alarms << std::setw(8) << c.unknowns << std::setprecision(2) << std::setw(10)
       << c.cpu_s << std::setw(10) << c.wall_s << std::setw(7) << c.max_final_k << std::setprecision(2)
       << std::setw(7) << c.avg_final_k << "\n";
  }
  return os.str();
}

std::string csv_header() { return "task,config,expected,actual,class,cpu_s,wall_s,final_k,inv_version"; }

std::string to_csv_row(const TaskResult& r) {
  std::ostringstream os;
  os << r.task << ',' << r.config << ',' << (r.expected_safe ? "true" : "false") << ','
     << (r.actual == VerdictKind::True ? "true" : r.actual == VerdictKind::False ? "false" : "unknown") << ','
     << to_string(r.cls) << ',' << std::fixed << std::setprecision(3) << r.cpu_s << ',' << r.wall_s << ','
     << r.final_k << ',' << r.inv_version;
  return os.str();
}

void write_csv(const std::filesystem::path& out, const std::vector<TaskResult>& results) {
  std::ofstream os(out);
  if (!os) throw Error("cannot write " + out.string());
  os << csv_header() << "\n";
  for (const auto& r : results) os << to_csv_row(r) << "\n";
}

void write_quantiles(const std::filesystem::path& out, const ScoreReport& report) {
  std::ofstream os(out);
  if (!os) throw Error("cannot write " + out.string());
  os << "config,score,cpu_s\n" << std::fixed << std::setprecision(3);
  for (const auto& c : report.configs)
    for (const auto& [acc, t] : c.quantiles) os << c.config << ',' << acc << ',' << t << "\n";
}

}  // namespace kindle
