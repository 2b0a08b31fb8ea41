#include <doctest.h>
#include <json.hpp>

#include <stackbandit/experiment.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <locale>
#include <set>
#include <sstream>
#include <string>

using namespace stackbandit;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t count_lines(const std::string& text) {
  std::size_t n = 0;
  for (char c : text) n += c == '\n';
  return n;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("stackbandit-test-" + name);
  fs::remove_all(p);
  return p;
}

ExperimentRequest small_request(const fs::path& out) {
  ExperimentRequest r;
  r.preset = "imitation-log2";
  r.overrides.seeds = std::vector<std::uint64_t>{0, 1, 2};
  r.overrides.horizon = 1000;
  r.out_dir = out.string();
  r.threads = 1;
  return r;
}

struct CommaDecimal : std::numpunct<char> {
  char do_decimal_point() const override { return ','; }
  char do_thousands_sep() const override { return '.'; }
  std::string do_grouping() const override { return "\3"; }
};

#ifdef STACKBANDIT_CLI_PATH
int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(STACKBANDIT_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}
#endif

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("registry holds the named presets in a fixed order") {
  const std::vector<std::string> names{"relu-curse",    "covering-relu-d3", "imitation-log2",       "imitation-vs-linucb",
                                       "expert-strong", "expert-weak",      "poly-proxy",           "poly-lipschitz-check",
                                       "optimism-trap", "lemma43-coverage"};
  const auto& presets = experiment_presets();
  REQUIRE(presets.size() == names.size());
  std::set<std::string> seen;
  for (std::size_t i = 0; i < names.size(); ++i) {
    CHECK(presets[i].name == names[i]);
    CHECK(!presets[i].claim.empty());
    CHECK(!presets[i].runs.empty());
    seen.insert(presets[i].name);
  }
  CHECK(seen.size() == names.size());
  CHECK_THROWS_AS(find_preset("no-such"), std::invalid_argument);
}

TEST_CASE("listing shows names and claims") {
  std::ostringstream out;
  list_experiments(out);
  const std::string text = out.str();
  for (const auto& p : experiment_presets()) {
    CHECK(text.find(p.name + "\n") != std::string::npos);
    CHECK(text.find(p.claim) != std::string::npos);
  }
  CHECK(text.find("polylogarithmic") != std::string::npos);
  CHECK(text.find("curse of expertise") != std::string::npos);
  CHECK(text.find("optimism") != std::string::npos);
}

TEST_CASE("every preset survives a JSON round trip") {
  for (const auto& p : experiment_presets()) {
    CAPTURE(p.name);
    const std::string text = experiment_to_json(p);
    const ExperimentPreset back = experiment_from_json(text);
    CHECK(experiment_to_json(back) == text);
  }
}

TEST_CASE("config parsing rejects malformed input") {
  CHECK_THROWS_AS(experiment_from_json("{"), std::invalid_argument);
  CHECK_THROWS_AS(experiment_from_json("{\"name\": \"x\"}"), std::invalid_argument);
  nlohmann::json j = nlohmann::json::parse(experiment_to_json(find_preset("imitation-log2")));
  j["bogus"] = 1;
  CHECK_THROWS_AS(experiment_from_json(j.dump()), std::invalid_argument);
  j.erase("bogus");
  j["runs"][0]["agent"]["params"]["nonsense"] = 1.0;
  CHECK_THROWS_AS(experiment_from_json(j.dump()), std::invalid_argument);
  j["runs"][0]["agent"]["params"].erase("nonsense");
  j["runs"][0]["horizon"] = 0;
  CHECK_THROWS_AS(experiment_from_json(j.dump()), std::invalid_argument);
}

TEST_CASE("overrides apply to every run") {
  ExperimentOverrides o;
  o.horizon = 500;
  o.sigma_b = 0.3;
  o.seeds = std::vector<std::uint64_t>{4, 5};
  const ExperimentPreset p = apply_overrides(find_preset("imitation-vs-linucb"), o);
  for (const auto& run : p.runs) {
    CHECK(run.config.horizon == 500);
    CHECK(run.config.noise.sigma_b == 0.3);
    CHECK(run.config.seeds == std::vector<std::uint64_t>{4, 5});
    CHECK(run.config.checkpoints.empty());
    REQUIRE(run.window);
    CHECK(run.window->second <= 500);
  }
  ExperimentOverrides eps;
  eps.eps = 0.2;
  CHECK_THROWS_AS(apply_overrides(find_preset("imitation-log2"), eps), std::invalid_argument);
  CHECK(apply_overrides(find_preset("relu-curse"), eps).runs[0].config.agent.params.at("eps") == 0.2);
}

TEST_CASE("real formatting uses 17 significant digits") {
  CHECK(format_real(0.1) == "0.10000000000000001");
  CHECK(format_real(1.0) == "1");
  CHECK(format_real(1234.5) == "1234.5");
  CHECK(std::stod(format_real(2.0 / 3.0)) == 2.0 / 3.0);
  const std::locale saved = std::locale::global(std::locale(std::locale::classic(), new CommaDecimal));
  CHECK(format_real(0.5) == "0.5");
  std::locale::global(saved);
}

TEST_CASE("traces csv has one row per seed and checkpoint") {
  const fs::path out = fresh_dir("rows");
  std::ostringstream err;
  REQUIRE(run_experiment(small_request(out), err) == kExitOk);
  const std::string csv = slurp(out / "traces.csv");
  const std::size_t checkpoints = default_checkpoints(1000).size();
  CHECK(count_lines(csv) == 1 + 3 * checkpoints);
  CHECK(csv.rfind("experiment,seed,checkpoint,cum_regret,empty_intersection_count\n", 0) == 0);
  CHECK(csv.find("\nimitation-log2,2,1000,") != std::string::npos);
  const auto summary = nlohmann::json::parse(slurp(out / "summary.json"));
  CHECK(summary["experiment"] == "imitation-log2");
  CHECK(summary["runs"][0]["mean"].size() == checkpoints);
  CHECK(summary["runs"][0].contains("exponent"));
  CHECK(summary["runs"][0].contains("window"));
  CHECK(summary.contains("runtime_seconds"));
  fs::remove_all(out);
}

TEST_CASE("identical runs give identical csv bytes") {
  const fs::path a = fresh_dir("det-a");
  const fs::path b = fresh_dir("det-b");
  std::ostringstream err;
  REQUIRE(run_experiment(small_request(a), err) == kExitOk);
  ExperimentRequest rb = small_request(b);
  rb.threads = 2;
  REQUIRE(run_experiment(rb, err) == kExitOk);
  CHECK(slurp(a / "traces.csv") == slurp(b / "traces.csv"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("the echoed config reproduces the run") {
  const fs::path a = fresh_dir("echo-a");
  const fs::path b = fresh_dir("echo-b");
  std::ostringstream err;
  REQUIRE(run_experiment(small_request(a), err) == kExitOk);
  const auto summary = nlohmann::json::parse(slurp(a / "summary.json"));
  const fs::path cfg = a / "echo.json";
  std::ofstream(cfg) << summary["config"].dump(2);
  ExperimentRequest r;
  r.config_path = cfg.string();
  r.out_dir = b.string();
  r.threads = 1;
  REQUIRE(run_experiment(r, err) == kExitOk);
  CHECK(slurp(a / "traces.csv") == slurp(b / "traces.csv"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("csv output ignores the stream locale") {
  ExperimentPreset p = apply_overrides(find_preset("imitation-log2"), [] {
    ExperimentOverrides o;
    o.horizon = 2000;
    o.seeds = std::vector<std::uint64_t>{1234};
    return o;
  }());
  const auto results = execute_experiment(p, 1);
  std::ostringstream plain;
  write_traces_csv(plain, p, results);
  std::ostringstream local;
  local.imbue(std::locale(std::locale::classic(), new CommaDecimal));
  write_traces_csv(local, p, results);
  CHECK(plain.str() == local.str());
  CHECK(plain.str().find(",1234,2000,") != std::string::npos);
}

TEST_CASE("request errors map to exit codes") {
  std::ostringstream err;
  ExperimentRequest unknown;
  unknown.preset = "no-such";
  CHECK(run_experiment(unknown, err) == kExitConfigError);
  CHECK(err.str().find("no-such") != std::string::npos);

  ExperimentRequest both = small_request(fresh_dir("both"));
  both.config_path = "x.json";
  CHECK(run_experiment(both, err) == kExitConfigError);

  ExperimentRequest missing;
  missing.config_path = "/nonexistent/config.json";
  CHECK(run_experiment(missing, err) == kExitConfigError);

  ExperimentRequest bad = small_request(fresh_dir("bad"));
  bad.overrides.d = 1;
  CHECK(run_experiment(bad, err) == kExitConfigError);

  const fs::path blocker = fresh_dir("blocker");
  std::ofstream(blocker) << "file";
  ExperimentRequest unwritable = small_request(blocker / "sub");
  CHECK(run_experiment(unwritable, err) == kExitRuntimeError);
  fs::remove_all(blocker);
}

TEST_CASE("output directory resolution") {
  CHECK(resolve_out_dir("given") == "given");
  ::setenv("STACKBANDIT_OUT_DIR", "from-env", 1);
  CHECK(resolve_out_dir("") == "from-env");
  ::unsetenv("STACKBANDIT_OUT_DIR");
  CHECK(resolve_out_dir("") == "results");
  CHECK(output_format_from_string("json") == OutputFormat::Json);
  CHECK_THROWS_AS(output_format_from_string("xml"), std::invalid_argument);
}

}

TEST_SUITE("cli") {

#ifdef STACKBANDIT_CLI_PATH
TEST_CASE("cli lists presets") {
  const fs::path log = fresh_dir("cli-list.txt");
  CHECK(run_cli("list", log) == 0);
  const std::string text = slurp(log);
  CHECK(text.find("imitation-log2") != std::string::npos);
  CHECK(text.find("optimism-trap") != std::string::npos);
  fs::remove(log);
}

TEST_CASE("cli runs a preset and writes its outputs") {
  const fs::path out = fresh_dir("cli-run");
  const fs::path log = fresh_dir("cli-run.txt");
  CHECK(run_cli("run --experiment imitation-log2 --seeds 3 --T 1000 --threads 1 --out " + out.string(), log) == 0);
  CHECK(count_lines(slurp(out / "traces.csv")) == 1 + 3 * default_checkpoints(1000).size());
  CHECK(fs::exists(out / "summary.json"));
  fs::remove_all(out);
  fs::remove(log);
}

TEST_CASE("cli format flag selects the files") {
  const fs::path out = fresh_dir("cli-fmt");
  const fs::path log = fresh_dir("cli-fmt.txt");
  CHECK(run_cli("run -e imitation-log2 --seeds 1,5 --T 200 --format csv -o " + out.string(), log) == 0);
  CHECK(fs::exists(out / "traces.csv"));
  CHECK(!fs::exists(out / "summary.json"));
  CHECK(slurp(out / "traces.csv").find("\nimitation-log2,5,200,") != std::string::npos);
  fs::remove_all(out);
  fs::remove(log);
}

TEST_CASE("cli reports config errors with exit code 2") {
  const fs::path log = fresh_dir("cli-err.txt");
  CHECK(run_cli("run --experiment no-such", log) == 2);
  CHECK(slurp(log).find("no-such") != std::string::npos);
  CHECK(run_cli("run --experiment imitation-log2 --seeds x", log) == 2);
  CHECK(run_cli("run --experiment imitation-log2 --T 0", log) == 2);
  CHECK(run_cli("run --experiment imitation-log2 --format xml", log) == 2);
  CHECK(run_cli("run --nonsense", log) == 2);
  fs::remove(log);
}
#endif

}
