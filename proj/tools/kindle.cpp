#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "kindle/cfa.hpp"
#include "kindle/cpa.hpp"
#include "kindle/harness.hpp"
#include "kindle/interp.hpp"
#include "kindle/parser.hpp"

using namespace kindle;

namespace {

constexpr int kExitParse = 10;
constexpr int kExitInternal = 11;
constexpr int kExitUsage = 12;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string env_string(const Env& env, const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t v = 0; v < env.size(); ++v) {
    if (names[v] == "__pc") continue;
    if (!out.empty()) out += ", ";
    out += names[v] + "=" + std::to_string(env[v]);
  }
  return out;
}

void print_trace(const Trace& t, const Cfa& cfa, std::ostream& os) {
  os << "  init  @" << t.initial.loc << "  " << env_string(t.initial.env, cfa.vars) << "\n";
  for (const auto& s : t.steps) {
    const Edge& e = cfa.edges[s.edge];
    os << "  " << e.src << " --" << to_string(e.op, cfa.vars) << "--> " << e.dst << "  "
       << env_string(s.state.env, cfa.vars) << "\n";
  }
}

int exit_code(VerdictKind k) {
  switch (k) {
    case VerdictKind::True: return 0;
    case VerdictKind::False: return 1;
    case VerdictKind::Unknown: return 2;
  }
  return kExitInternal;
}

int cmd_verify(const std::string& file, VerifyOptions opts, bool dump_cfa, bool show_reached) {
  NormalizedCfa ncfa = to_single_loop(build_cfa(parse(read_file(file))));
  if (dump_cfa) {
    std::cout << "# loop head " << ncfa.loop_head << "\n" << dump(ncfa.cfa);
    std::cout.flush();
  }
  opts.keep_reached = show_reached;
  VerifyOutcome out = verify_program(ncfa, opts);
  if (show_reached) {
    for (const auto& r : out.rounds) {
      std::cout << "# round " << to_string(r.precision, ncfa.cfa.vars) << (r.complete ? "" : " (incomplete)")
                << "\n";
      CpaResult cpa;
      cpa.reached = r.reached;
      cpa.complete = r.complete;
      std::cout << dump_reached(cpa, ncfa.cfa.vars);
    }
  }
  const Verdict& v = out.verdict;
  std::cout << "Verdict: " << to_string(v.kind);
  switch (v.kind) {
    case VerdictKind::True:
      std::cout << " (" << to_string(v.source) << ", k=" << v.final_k << ", invariant version "
                << v.invariant_version << ")\n";
      if (!out.snapshots.empty() && v.invariant_version > 0)
        std::cout << "Invariant: "
                  << to_string(out.snapshots.at(std::min<std::size_t>(v.invariant_version, out.snapshots.size() - 1))
                                   .formula,
                               ncfa.cfa.vars)
                  << "\n";
      break;
    case VerdictKind::False:
      std::cout << " (k=" << v.final_k << ", " << v.trace_iterations << " loop iterations)\n";
      if (v.trace) print_trace(*v.trace, ncfa.cfa, std::cout);
      break;
    case VerdictKind::Unknown: std::cout << " (" << to_string(v.reason) << ", k=" << v.final_k << ")\n"; break;
  }
  return exit_code(v.kind);
}

int cmd_bench(const std::string& dir, const std::string& configs_file, const std::string& out_csv,
              const std::string& quantiles, std::size_t jobs) {
  auto configs = parse_configs(read_file(configs_file));
  auto tasks = collect_tasks(dir);
  if (tasks.empty()) throw Error("no tasks with a known expected verdict in " + dir);
  std::cerr << tasks.size() << " tasks x " << configs.size() << " configurations\n";
  auto results = run_bench(tasks, configs, jobs);
  write_csv(out_csv, results);
  ScoreReport report = compare_configs(results);
  if (!quantiles.empty()) write_quantiles(quantiles, report);
  std::cout << format_table(report);
  return 0;
}

int cmd_interpret(const std::string& file, const std::vector<Value>& choices, std::size_t max_steps,
                  std::optional<std::size_t> search) {
  NormalizedCfa ncfa = to_single_loop(build_cfa(parse(read_file(file))));
  if (search) {
    std::vector<Value> domain{0, 1};
    bool exhausted = false;
    auto cex = shortest_cex(ncfa, domain, *search, 2'000'000, &exhausted);
    if (!cex) {
      std::cout << (exhausted ? "search exhausted its state budget\n"
                              : "no counterexample within " + std::to_string(*search) + " iterations\n");
      return exhausted ? 2 : 0;
    }
    std::cout << "counterexample with " << cex->iterations << " loop iterations\n";
    print_trace(cex->trace, ncfa.cfa, std::cout);
    return 1;
  }
  RunResult r = run(ncfa.cfa, choices, max_steps);
  std::cout << "status: " << to_string(r.status) << "\n";
  print_trace(r.trace, ncfa.cfa, std::cout);
  return r.status == RunStatus::ErrorReached ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app("k-induction verifier with continuously refined invariants");
  app.require_subcommand(1);

  VerifyOptions opts;
  std::string file;
  bool dump_cfa = false, dump_reached_flag = false;
  auto* verify_cmd = app.add_subcommand("verify", "Verify a program");
  verify_cmd->add_option("file", file, "Program")->required()->check(CLI::ExistingFile);
  add_verify_options(*verify_cmd, opts);
  verify_cmd->add_flag("--dump-cfa", dump_cfa, "Print the normalized CFA");
  verify_cmd->add_flag("--dump-reached", dump_reached_flag, "Print the reached set of every invariant round");

  std::string corpus, configs_file, out_csv = "results.csv", quantiles;
  std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());
  auto* bench_cmd = app.add_subcommand("bench", "Run a corpus under several configurations");
  bench_cmd->add_option("corpus", corpus, "Directory of *_true.c / *_false.c tasks")
      ->required()
      ->check(CLI::ExistingDirectory);
  bench_cmd->add_option("--configs", configs_file, "File of `name: flags` lines")->required();
  bench_cmd->add_option("--out", out_csv, "CSV output");
  bench_cmd->add_option("--quantiles", quantiles, "Quantile series CSV output");
  bench_cmd->add_option("--jobs,-j", jobs, "Parallel worker processes");

  std::string ifile;
  std::vector<Value> choices;
  std::size_t max_steps = 100'000;
  std::optional<std::size_t> search;
  auto* interp_cmd = app.add_subcommand("interpret", "Run the reference interpreter");
  interp_cmd->add_option("file", ifile, "Program")->required()->check(CLI::ExistingFile);
  interp_cmd->add_option("--choices", choices, "Values for nondet(), in order")->delimiter(',');
  interp_cmd->add_option("--max-steps", max_steps, "Step limit");
  interp_cmd->add_option("--search", search, "Search a shortest counterexample over {0,1} up to N iterations");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*verify_cmd) {
      parse_invgen(opts.invgen);
      parse_havoc(opts.havoc);
      return cmd_verify(file, opts, dump_cfa, dump_reached_flag);
    }
    if (*bench_cmd) return cmd_bench(corpus, configs_file, out_csv, quantiles, jobs);
    if (*interp_cmd) return cmd_interpret(ifile, choices, max_steps, search);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}
