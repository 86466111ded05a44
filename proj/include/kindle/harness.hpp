#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kindle/kinduction.hpp"

namespace CLI {
class App;
}

namespace kindle {

struct InvgenMode {
  enum class Kind { Off, Static, Continuous };
  Kind kind = Kind::Continuous;
  /// Static triple (s, n, w): number of important variables, depth, widening.
  std::size_t s = 0;
  unsigned n = 1;
  bool w = true;
};

/// `off`, `continuous` or `static:s,n,w` with w one of t/f.
InvgenMode parse_invgen(const std::string& text);
std::string to_string(const InvgenMode& m);
HavocStrategy parse_havoc(const std::string& text);

struct VerifyOptions {
  std::size_t k_init = 1;
  std::size_t k_max = 100;
  std::string invgen = "continuous";
  /// Continuous mode only: run this many engine rounds before k-induction
  /// instead of a background worker.
  std::optional<std::size_t> deterministic_rounds;
  double round_budget_s = 10;
  std::size_t max_states = 200'000;
  std::string havoc = "all";
  std::string solver_cmd = "z3 -in -smt2";
  double timeout_s = 900;
  std::string dump_smt;
  bool no_base_omission = false;
  /// Keep the reached sets of the invariant rounds in the outcome.
  bool keep_reached = false;
};

/// Registers the verifier flags on `app`.
void add_verify_options(CLI::App& app, VerifyOptions& opts);

/// Parses a flag string such as `--invgen=off --k-max=20`.
VerifyOptions parse_verify_flags(const std::string& flags);

struct VerifyOutcome {
  Verdict verdict;
  /// Snapshots published during the run, starting with version 0.
  std::vector<InvariantSnapshot> snapshots;
  std::vector<RoundResult> rounds;
};

/// Builds the snapshot source for the options and runs k-induction.
VerifyOutcome verify_program(const NormalizedCfa& ncfa, const VerifyOptions& opts);

/// Parse, normalize, verify.
VerifyOutcome verify_source(const std::string& source, const VerifyOptions& opts);

enum class Classification { CorrectProof, CorrectAlarm, WrongProof, WrongAlarm, Unknown };
std::string to_string(Classification c);

/// +2 correct proof, +1 correct alarm, -12 wrong proof, -6 wrong alarm.
int score_of(Classification c);
Classification classify(bool expected_safe, VerdictKind actual);

/// From `*_true.c` / `*_false.c`; nullopt otherwise.
std::optional<bool> expected_from_filename(const std::filesystem::path& file);

/// `manifest.json` beside the tasks: {"file.c": "true" | "false"}.
std::map<std::string, bool> load_manifest(const std::filesystem::path& dir);

struct TaskResult {
  std::string task;
  std::string config;
  bool expected_safe = true;
  VerdictKind actual = VerdictKind::Unknown;
  Classification cls = Classification::Unknown;
  double cpu_s = 0;
  double wall_s = 0;
  std::size_t final_k = 0;
  std::uint64_t inv_version = 0;
  /// Unknown reason, proof source or error message.
  std::string detail;
};

/// Runs one task in-process. Parse and encoding errors give Unknown.
TaskResult run_task(const std::filesystem::path& file, bool expected_safe, const std::string& config,
                    const VerifyOptions& opts);

struct NamedConfig {
  std::string name;
  std::string flags;
  VerifyOptions options;
};

/// One `name: flags` per line; blank lines and `#` comments are skipped.
std::vector<NamedConfig> parse_configs(const std::string& text);

struct BenchTask {
  std::filesystem::path file;
  bool expected_safe = true;
};

/// Tasks with a known expected verdict, sorted by name.
std::vector<BenchTask> collect_tasks(const std::filesystem::path& dir);

/// Runs every task under every config, each in its own worker process, at
/// most `jobs` at a time. CPU time covers the worker and its solvers.
std::vector<TaskResult> run_bench(const std::vector<BenchTask>& tasks, const std::vector<NamedConfig>& configs,
                                  std::size_t jobs);

struct ConfigSummary {
  std::string config;
  int score = 0;
  std::size_t correct = 0;
  std::size_t correct_proofs = 0;
  std::size_t correct_alarms = 0;
  std::size_t wrong_proofs = 0;
  std::size_t wrong_alarms = 0;
  std::size_t unknowns = 0;
  double cpu_s = 0;
  double wall_s = 0;
  std::size_t max_final_k = 0;
  double avg_final_k = 0;
  /// (accumulated score, cpu time): starts at the sum of negative scores,
  /// then adds correct results in order of CPU time.
  std::vector<std::pair<int, double>> quantiles;
};

struct ScoreReport {
  std::vector<ConfigSummary> configs;
};

ConfigSummary score(const std::string& config, const std::vector<TaskResult>& results);
/// One summary per config, in first-appearance order.
ScoreReport compare_configs(const std::vector<TaskResult>& results);

std::string format_table(const ScoreReport& report);
std::string csv_header();
std::string to_csv_row(const TaskResult& r);
void write_csv(const std::filesystem::path& out, const std::vector<TaskResult>& results);
/// Quantile series, one `config,score,cpu_s` row per point.
void write_quantiles(const std::filesystem::path& out, const ScoreReport& report);

}  // namespace kindle
