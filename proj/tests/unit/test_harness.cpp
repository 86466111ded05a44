#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "kindle/harness.hpp"
#include "support/util.hpp"

using namespace kindle;
using namespace kindle::testing;

namespace {

TaskResult result(const std::string& config, Classification cls, double cpu = 1) {
  TaskResult r;
  r.task = "t";
  r.config = config;
  r.cls = cls;
  r.cpu_s = cpu;
  return r;
}

}  // namespace

TEST_CASE("score examples") {
  using C = Classification;
  CHECK(score("a", {result("a", C::CorrectProof), result("a", C::CorrectProof), result("a", C::CorrectAlarm)}).score ==
        5);
  CHECK(score("a", {result("a", C::WrongProof), result("a", C::WrongAlarm)}).score == -18);
  CHECK(score("a", {}).score == 0);
  CHECK(score("a", {result("a", C::Unknown)}).score == 0);
}

TEST_CASE("classify") {
  CHECK(classify(true, VerdictKind::True) == Classification::CorrectProof);
  CHECK(classify(false, VerdictKind::False) == Classification::CorrectAlarm);
  CHECK(classify(false, VerdictKind::True) == Classification::WrongProof);
  CHECK(classify(true, VerdictKind::False) == Classification::WrongAlarm);
  CHECK(classify(true, VerdictKind::Unknown) == Classification::Unknown);
}

TEST_CASE("quantile series is monotone in time and ends at the score") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<TaskResult> rs;
    std::size_t n = rng() % 20;
    for (std::size_t i = 0; i < n; ++i)
      rs.push_back(result("c", static_cast<Classification>(rng() % 5), static_cast<double>(rng() % 1000) / 10));
    ConfigSummary s = score("c", rs);
    REQUIRE_FALSE(s.quantiles.empty());
    CHECK(s.quantiles.back().first == s.score);
    for (std::size_t i = 1; i < s.quantiles.size(); ++i) CHECK(s.quantiles[i].second >= s.quantiles[i - 1].second);
  }
}

TEST_CASE("expected verdicts from file names and manifest") {
  CHECK(expected_from_filename("a/b/example-safe_true.c") == true);
  CHECK(expected_from_filename("x_false.c") == false);
  CHECK_FALSE(expected_from_filename("x.c"));

  auto dir = std::filesystem::temp_directory_path() / "kindle-manifest-test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "a_true.c") << "int x; x = 0;";
  std::ofstream(dir / "b.c") << "int x; x = 0; assert(x == 1);";
  std::ofstream(dir / "manifest.json") << R"({"a_true.c": "false", "b.c": "false"})";
  auto tasks = collect_tasks(dir);
  REQUIRE(tasks.size() == 2);
  CHECK(tasks[0].file.filename() == "a_true.c");
  CHECK_FALSE(tasks[0].expected_safe);
  CHECK_FALSE(tasks[1].expected_safe);
  std::filesystem::remove_all(dir);
}

TEST_CASE("parse_configs and flags") {
  auto cs = parse_configs("# comment\n\nnone: --invgen=off\nstatic: --invgen=static:0,1,t --k-max=7\n");
  REQUIRE(cs.size() == 2);
  CHECK(cs[0].name == "none");
  CHECK(cs[0].options.invgen == "off");
  CHECK(cs[1].options.k_max == 7);
  CHECK_THROWS(parse_verify_flags("--invgen=sometimes"));
  CHECK_THROWS(parse_verify_flags("--havoc=none"));
  CHECK_THROWS(parse_invgen("static:1,2"));
  CHECK(to_string(parse_invgen("static:3,2,f")) == "static:3,2,f");
}

TEST_CASE("CSV rows") {
  CHECK(csv_header() == "task,config,expected,actual,class,cpu_s,wall_s,final_k,inv_version");
  TaskResult r = result("cont", Classification::CorrectProof);
  r.task = "example-safe_true.c";
  r.actual = VerdictKind::True;
  r.final_k = 4;
  r.inv_version = 2;
  std::string row = to_csv_row(r);
  CHECK(row.rfind("example-safe_true.c,cont,true,true,correct-proof,", 0) == 0);
  CHECK(row.substr(row.size() - 4) == ",4,2");
}

TEST_CASE("compare_configs: single config and task gives one row") {
  ScoreReport rep = compare_configs({result("only", Classification::CorrectAlarm)});
  REQUIRE(rep.configs.size() == 1);
  CHECK(rep.configs[0].score == 1);
  CHECK(format_table(rep).find("only") != std::string::npos);
}

TEST_CASE("run_task on the worked examples") {
  std::filesystem::path dir = KINDLE_BENCHMARK_DIR;
  VerifyOptions cont = parse_verify_flags("--deterministic-rounds=10 --k-max=20 --invgen-max-states=5000 --invgen-round-budget=600");
  TaskResult safe = run_task(dir / "example-safe_true.c", true, "cont", cont);
  CHECK(safe.cls == Classification::CorrectProof);
  CHECK(safe.final_k <= 4);
  TaskResult unsafe = run_task(dir / "example-unsafe_false.c", false, "cont", cont);
  CHECK(unsafe.cls == Classification::CorrectAlarm);
  TaskResult wrong = run_task(dir / "example-unsafe_false.c", false, "tv", parse_verify_flags("--havoc=termination-vars"));
  CHECK(wrong.cls == Classification::WrongProof);
}

TEST_CASE("run_task reports parse errors as unknown") {
  auto file = std::filesystem::temp_directory_path() / "kindle-broken_true.c";
  std::ofstream(file) << "int x; x = ;";
  TaskResult r = run_task(file, true, "c", VerifyOptions{});
  CHECK(r.cls == Classification::Unknown);
  CHECK_FALSE(r.detail.empty());
  std::filesystem::remove(file);
}

TEST_CASE("run_bench: worker processes and wrong-proof counting") {
  std::vector<BenchTask> tasks{{std::filesystem::path(KINDLE_BENCHMARK_DIR) / "example-unsafe_false.c", false}};
  auto configs = parse_configs("sound: --invgen=off\ntv: --invgen=off --havoc=termination-vars\n");
  auto results = run_bench(tasks, configs, 2);
  REQUIRE(results.size() == 2);
  ScoreReport rep = compare_configs(results);
  REQUIRE(rep.configs.size() == 2);
  CHECK(rep.configs[0].correct_alarms == 1);
  CHECK(rep.configs[1].wrong_proofs == 1);
  CHECK(rep.configs[1].score == -12);
}
