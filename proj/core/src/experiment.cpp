#include "stackbandit/experiment.hpp"

#include <json.hpp>

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace stackbandit {

using nlohmann::json;

namespace {

std::vector<std::uint64_t> seed_range(std::uint64_t n) {
  std::vector<std::uint64_t> s(n);
  for (std::uint64_t i = 0; i < n; ++i) s[i] = i;
  return s;
}

ExperimentRun make_run(std::string label, GameSpec spec, NoiseSpec noise, AgentDescriptor agent, std::size_t horizon,
                       std::uint64_t seeds, std::optional<std::pair<std::size_t, std::size_t>> window = std::nullopt) {
  ExperimentRun run;
  run.label = std::move(label);
  run.config.spec = spec;
  run.config.noise = noise;
  run.config.agent = std::move(agent);
  run.config.horizon = horizon;
  run.config.seeds = seed_range(seeds);
  run.window = window;
  return run;
}

NoiseSpec noise(double sigma_r, double sigma_b) {
  NoiseSpec n;
  n.sigma_r = sigma_r;
  n.sigma_b = sigma_b;
  return n;
}

std::vector<ExperimentPreset> build_presets() {
  std::vector<ExperimentPreset> p;
  {
    const GameSpec g = GameSpec::relu_curse(10, 0.5);
    p.push_back({"relu-curse", "curse of expertise: a constant follower response hides the reward",
                 "per-round regret stays at Delta; response b=1 almost always",
                 {make_run("lin_ucb", g, noise(0.1, 0.0), {"lin_ucb", {}, {}}, 10000, 10, {{1000, 10000}}),
                  make_run("covering", g, noise(0.1, 0.0), {"covering", {{"eps", 0.7}}, {}}, 10000, 10,
                           {{1000, 10000}})}});
  }
  p.push_back({"covering-relu-d3", "covering the parameter set and running UCB gives sublinear regret",
               "fitted exponent in [0.45, 0.95] over [1e4, 1e5]",
               {make_run("covering", GameSpec::relu_curse(3, 0.5), noise(0.1, 0.0), {"covering", {}, {}}, 100000, 10,
                         {{10000, 100000}})}});
  {
    const GameSpec g = GameSpec::imitation(5);
    p.push_back({"imitation-log2", "imitating observed responses gives polylogarithmic regret",
                 "fitted exponent <= 0.30 over [1e3, 2e4]",
                 {make_run("imitation", g, noise(0.2, 0.2), {"imitation", {}, {}}, 20000, 20, {{1000, 20000}})}});
    p.push_back({"imitation-vs-linucb", "imitation from responses against reward-only linear UCB",
                 "imitation exponent <= 0.30; lin_ucb exponent in [0.35, 0.65]",
                 {make_run("imitation", g, noise(0.2, 0.2), {"imitation", {}, {}}, 20000, 20, {{1000, 20000}}),
                  make_run("lin_ucb", g, noise(0.2, 0.2), {"lin_ucb", {}, {}}, 20000, 20, {{1000, 20000}})}});
  }
  p.push_back({"expert-strong", "a strong expert turns the game into a linear bandit on a cap",
               "fitted exponent in [0.35, 0.65]; all actions inside the expert cap",
               {make_run("strong", GameSpec::expert_guided(5, 0.5, 0.95), noise(0.2, 0.0),
                         {"expert_guided", {{"eps_lin", 0.05}}, {{"mode", "strong"}}}, 20000, 20, {{1000, 20000}})}});
  p.push_back({"expert-weak", "a weak expert shrinks the action set to a cap",
               "sublinear regret, exponent < 0.98",
               {make_run("weak", GameSpec::expert_guided(6, 0.9, 0.3), noise(0.1, 0.0),
                         {"expert_guided", {{"eps_weak", 0.45}}, {{"mode", "weak"}}}, 100000, 10,
                         {{10000, 100000}})}});
  p.push_back({"poly-proxy", "responses alone suffice to learn the polynomial game",
               "post-commit per-round regret <= 0.05; regret <= (2k/(2k-1)) proxy regret",
               {make_run("poly_proxy", GameSpec::polynomial(4, 2), noise(0.05, 0.05), {"poly_proxy", {{"rho", 0.2}}, {}},
                         50000, 20)}});
  {
    ExperimentPreset lip{"poly-lipschitz-check", "the best-response value is Lipschitz in the response",
                         "cum_regret <= (2k/(2k-1)) proxy regret for k = 1, 2, 3",
                         {}};
    for (int k = 1; k <= 3; ++k) {
      lip.runs.push_back(make_run("k" + std::to_string(k), GameSpec::polynomial(4, k), noise(0.05, 0.05),
                                  {"poly_proxy", {{"rho", 0.2}}, {}}, 10000, 10));
    }
    p.push_back(std::move(lip));
  }
  {
    const GameSpec g = GameSpec::optimism_trap(10, 0.5);
    p.push_back({"optimism-trap", "optimism never probes the interior of the trap game",
                 "probe regret constant after round 1; optimistic agent stuck on the sphere",
                 {make_run("probe", g, noise(0.0, 0.0), {"probe", {}, {}}, 10000, 10),
                  make_run("optimistic_sphere", g, noise(0.0, 0.0), {"optimistic_sphere", {}, {}}, 10000, 10)}});
  }
  {
    ExperimentRun run = make_run("imitation", GameSpec::imitation(5), noise(0.2, 0.2),
                                 {"imitation", {{"c_alpha", 2.0}, {"delta", 0.05}}, {}}, 10000, 200);
    run.config.track_coverage = true;
    p.push_back({"lemma43-coverage", "the response confidence ball covers the parameter",
                 "coverage >= 0.90 with c_alpha = 2, delta = 0.05", {std::move(run)}});
  }
  return p;
}

// ------------------------------------------------------------------- json

json spec_to_json(const GameSpec& s) {
  return json{{"variant", std::string(to_string(s.variant))}, {"d", s.d}, {"delta", s.delta}, {"zeta", s.zeta},
              {"k", s.k}};
}

json vector_to_json(const RealVector& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

json run_to_json(const ExperimentRun& run) {
  const RunConfig& c = run.config;
  json j;
  j["label"] = run.label;
  j["game"] = spec_to_json(c.spec);
  if (c.theta) j["theta"] = json{{"leader", vector_to_json(c.theta->leader)}, {"follower", vector_to_json(c.theta->follower)}};
  j["noise"] = json{{"sigma_r", c.noise.sigma_r}, {"sigma_b", c.noise.sigma_b}, {"kind", std::string(to_string(c.noise.kind))}};
  json params = json::object();
  for (const auto& [k, v] : c.agent.params) params[k] = v;
  json options = json::object();
  for (const auto& [k, v] : c.agent.options) options[k] = v;
  j["agent"] = json{{"kind", c.agent.kind}, {"params", params}, {"options", options}};
  j["horizon"] = c.horizon;
  j["seeds"] = c.seeds;
  if (!c.checkpoints.empty()) j["checkpoints"] = c.checkpoints;
  if (c.track_coverage) j["track_coverage"] = true;
  if (run.window) j["window"] = json::array({run.window->first, run.window->second});
  return j;
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw std::invalid_argument(where + ": expected an object");
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) throw std::invalid_argument(where + ": unknown key '" + item.key() + "'");
  }
}

RealVector vector_from_json(const json& arr, const std::string& where) {
  if (!arr.is_array()) throw std::invalid_argument(where + ": expected an array of numbers");
  RealVector v(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number()) throw std::invalid_argument(where + ": expected an array of numbers");
    v(static_cast<Eigen::Index>(i)) = arr[i].get<double>();
  }
  return v;
}

template <class T>
T get_number(const json& obj, const char* key, T fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) throw std::invalid_argument(where + "." + key + ": expected an integer");
    if constexpr (std::is_unsigned_v<T>) {
      if (v.is_number_unsigned()) return v.get<T>();
      if (v.get<long long>() < 0) throw std::invalid_argument(where + "." + key + ": must be nonnegative");
    }
    return v.get<T>();
  } else {
    if (!v.is_number()) throw std::invalid_argument(where + "." + key + ": expected a number");
    return v.get<T>();
  }
}

ExperimentRun run_from_json(const json& j, const std::string& where) {
  reject_unknown(j, {"label", "game", "theta", "noise", "agent", "horizon", "seeds", "checkpoints", "track_coverage",
                     "window"},
                 where);
  ExperimentRun run;
  if (j.contains("label")) {
    if (!j["label"].is_string()) throw std::invalid_argument(where + ".label: expected a string");
    run.label = j["label"].get<std::string>();
  }
  RunConfig& c = run.config;
  if (!j.contains("game")) throw std::invalid_argument(where + ": missing 'game'");
  const json& g = j["game"];
  reject_unknown(g, {"variant", "d", "delta", "zeta", "k"}, where + ".game");
  if (!g.contains("variant") || !g["variant"].is_string()) throw std::invalid_argument(where + ".game.variant: expected a string");
  c.spec.variant = variant_from_string(g["variant"].get<std::string>());
  c.spec.d = get_number<int>(g, "d", c.spec.d, where + ".game");
  c.spec.delta = get_number<double>(g, "delta", c.spec.delta, where + ".game");
  c.spec.zeta = get_number<double>(g, "zeta", c.spec.zeta, where + ".game");
  c.spec.k = get_number<int>(g, "k", c.spec.k, where + ".game");
  if (j.contains("theta") && !j["theta"].is_null()) {
    const json& t = j["theta"];
    reject_unknown(t, {"leader", "follower"}, where + ".theta");
    Theta theta;
    theta.leader = vector_from_json(t.value("leader", json::array()), where + ".theta.leader");
    theta.follower = vector_from_json(t.value("follower", json::array()), where + ".theta.follower");
    c.theta = std::move(theta);
  }
  if (j.contains("noise")) {
    const json& n = j["noise"];
    reject_unknown(n, {"sigma_r", "sigma_b", "kind"}, where + ".noise");
    c.noise.sigma_r = get_number<double>(n, "sigma_r", 0.0, where + ".noise");
    c.noise.sigma_b = get_number<double>(n, "sigma_b", 0.0, where + ".noise");
    if (n.contains("kind")) {
      if (!n["kind"].is_string()) throw std::invalid_argument(where + ".noise.kind: expected a string");
      c.noise.kind = noise_kind_from_string(n["kind"].get<std::string>());
    }
  }
  if (!j.contains("agent")) throw std::invalid_argument(where + ": missing 'agent'");
  const json& a = j["agent"];
  reject_unknown(a, {"kind", "params", "options"}, where + ".agent");
  if (!a.contains("kind") || !a["kind"].is_string()) throw std::invalid_argument(where + ".agent.kind: expected a string");
  c.agent.kind = a["kind"].get<std::string>();
  if (a.contains("params")) {
    if (!a["params"].is_object()) throw std::invalid_argument(where + ".agent.params: expected an object");
    for (const auto& item : a["params"].items()) {
      if (!item.value().is_number()) throw std::invalid_argument(where + ".agent.params." + item.key() + ": expected a number");
      c.agent.params[item.key()] = item.value().get<double>();
    }
  }
  if (a.contains("options")) {
    if (!a["options"].is_object()) throw std::invalid_argument(where + ".agent.options: expected an object");
    for (const auto& item : a["options"].items()) {
      if (!item.value().is_string()) throw std::invalid_argument(where + ".agent.options." + item.key() + ": expected a string");
      c.agent.options[item.key()] = item.value().get<std::string>();
    }
  }
  c.horizon = get_number<std::size_t>(j, "horizon", 0, where);
  if (!j.contains("seeds")) throw std::invalid_argument(where + ": missing 'seeds'");
  const json& seeds = j["seeds"];
  if (seeds.is_number_integer()) {
    c.seeds = seed_range(get_number<std::uint64_t>(j, "seeds", 0, where));
  } else if (seeds.is_array()) {
    for (const auto& s : seeds) {
      if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
        throw std::invalid_argument(where + ".seeds: expected nonnegative integers");
      }
      c.seeds.push_back(s.get<std::uint64_t>());
    }
  } else {
    throw std::invalid_argument(where + ".seeds: expected a count or a list");
  }
  if (j.contains("checkpoints")) {
    if (!j["checkpoints"].is_array()) throw std::invalid_argument(where + ".checkpoints: expected an array");
    for (const auto& s : j["checkpoints"]) {
      if (!s.is_number_integer() || s.get<long long>() < 1) {
        throw std::invalid_argument(where + ".checkpoints: expected positive integers");
      }
      c.checkpoints.push_back(s.get<std::size_t>());
    }
  }
  if (j.contains("track_coverage")) {
    if (!j["track_coverage"].is_boolean()) throw std::invalid_argument(where + ".track_coverage: expected a boolean");
    c.track_coverage = j["track_coverage"].get<bool>();
  }
  if (j.contains("window") && !j["window"].is_null()) {
    const json& w = j["window"];
    if (!w.is_array() || w.size() != 2 || !w[0].is_number_integer() || !w[1].is_number_integer() ||
        w[0].get<long long>() < 1 || w[1].get<long long>() < w[0].get<long long>()) {
      throw std::invalid_argument(where + ".window: expected [t_lo, t_hi] with 1 <= t_lo <= t_hi");
    }
    run.window = std::make_pair(w[0].get<std::size_t>(), w[1].get<std::size_t>());
  }
  return run;
}

void validate_experiment(const ExperimentPreset& e) {
  if (e.name.empty()) throw std::invalid_argument("experiment: empty name");
  if (e.runs.empty()) throw std::invalid_argument("experiment '" + e.name + "': no runs");
  std::set<std::string> labels;
  for (const auto& run : e.runs) {
    run.config.validate();
    if (e.runs.size() > 1 && !labels.insert(run.label).second) {
      throw std::invalid_argument("experiment '" + e.name + "': duplicate run label '" + run.label + "'");
    }
  }
}

std::string describe_run(const ExperimentRun& run) {
  const RunConfig& c = run.config;
  std::ostringstream os;
  os << run.label << ": " << to_string(c.spec.variant) << " d=" << c.spec.d;
  if (c.spec.variant == Variant::ReluCurse || c.spec.variant == Variant::ExpertGuided ||
      c.spec.variant == Variant::OptimismTrap) {
    os << " delta=" << c.spec.delta;
  }
  if (c.spec.variant == Variant::ExpertGuided) os << " zeta=" << c.spec.zeta;
  if (c.spec.variant == Variant::Polynomial) os << " k=" << c.spec.k;
  os << " agent=" << c.agent.kind;
  for (const auto& [k, v] : c.agent.params) os << ' ' << k << '=' << v;
  for (const auto& [k, v] : c.agent.options) os << ' ' << k << '=' << v;
  os << " T=" << c.horizon << " seeds=" << c.seeds.size() << " sigma_r=" << c.noise.sigma_r
     << " sigma_b=" << c.noise.sigma_b;
  return os.str();
}

}  // namespace

const std::vector<ExperimentPreset>& experiment_presets() {
  static const std::vector<ExperimentPreset> presets = build_presets();
  return presets;
}

const ExperimentPreset& find_preset(const std::string& name) {
  for (const auto& p : experiment_presets()) {
    if (p.name == name) return p;
  }
  throw std::invalid_argument("unknown experiment '" + name + "' (see `stackbandit list`)");
}

void list_experiments(std::ostream& out) {
  for (const auto& p : experiment_presets()) {
    out << p.name << "\n  claim:    " << p.claim << "\n  expected: " << p.expected << '\n';
    for (const auto& run : p.runs) out << "  run       " << describe_run(run) << '\n';
  }
}

ExperimentPreset apply_overrides(ExperimentPreset e, const ExperimentOverrides& o) {
  std::size_t eps_applied = 0;
  for (auto& run : e.runs) {
    RunConfig& c = run.config;
    if (o.d) c.spec.d = *o.d;
    if (o.delta) c.spec.delta = *o.delta;
    if (o.zeta) c.spec.zeta = *o.zeta;
    if (o.k) c.spec.k = *o.k;
    if (o.sigma_r) c.noise.sigma_r = *o.sigma_r;
    if (o.sigma_b) c.noise.sigma_b = *o.sigma_b;
    if (o.seeds) c.seeds = *o.seeds;
    if (o.horizon) {
      c.horizon = *o.horizon;
      c.checkpoints.clear();
      if (run.window) {
        run.window->second = std::min(run.window->second, c.horizon);
        run.window->first = std::min(run.window->first, run.window->second);
      }
    }
    if (o.eps) {
      const std::string& kind = c.agent.kind;
      if (kind == "covering" || kind == "lin_ucb" || kind == "optimistic_sphere" || kind == "side_info_ucb") {
        c.agent.params["eps"] = *o.eps;
        ++eps_applied;
      } else if (kind == "expert_guided") {
        c.agent.params["eps_lin"] = *o.eps;
        c.agent.params["eps_weak"] = *o.eps;
        ++eps_applied;
      }
    }
  }
  if (o.eps && eps_applied == 0) {
    throw std::invalid_argument("--eps: no run of experiment '" + e.name + "' uses a net resolution");
  }
  return e;
}

std::string experiment_to_json(const ExperimentPreset& e) {
  json j;
  j["name"] = e.name;
  j["claim"] = e.claim;
  j["expected"] = e.expected;
  j["runs"] = json::array();
  for (const auto& run : e.runs) j["runs"].push_back(run_to_json(run));
  return j.dump(2);
}

ExperimentPreset experiment_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& ex) {
    throw std::invalid_argument(std::string("config: ") + ex.what());
  }
  reject_unknown(j, {"name", "claim", "expected", "runs"}, "config");
  ExperimentPreset e;
  if (!j.contains("name") || !j["name"].is_string()) throw std::invalid_argument("config.name: expected a string");
  e.name = j["name"].get<std::string>();
  e.claim = j.value("claim", std::string{});
  e.expected = j.value("expected", std::string{});
  if (!j.contains("runs") || !j["runs"].is_array()) throw std::invalid_argument("config.runs: expected an array");
  for (std::size_t i = 0; i < j["runs"].size(); ++i) {
    e.runs.push_back(run_from_json(j["runs"][i], "config.runs[" + std::to_string(i) + "]"));
  }
  validate_experiment(e);
  return e;
}

std::string row_label(const ExperimentPreset& e, const ExperimentRun& run) {
  return e.runs.size() > 1 ? e.name + "/" + run.label : e.name;
}

std::vector<RunResult> execute_experiment(const ExperimentPreset& e, unsigned threads) {
  validate_experiment(e);
  std::vector<RunResult> results;
  for (const auto& run : e.runs) {
    const auto start = std::chrono::steady_clock::now();
    RunResult r;
    r.label = run.label;
    r.summary = run_batch(run.config, threads);
    if (run.window) {
      try {
        r.exponent = scaling_exponent(r.summary, run.window->first, run.window->second);
      } catch (const std::invalid_argument&) {
      } catch (const std::domain_error&) {
      }
    }
    r.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    results.push_back(std::move(r));
  }
  return results;
}

std::string format_real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_traces_csv(std::ostream& out, const ExperimentPreset& e, const std::vector<RunResult>& results) {
  out << "experiment,seed,checkpoint,cum_regret,empty_intersection_count\n";
  for (std::size_t r = 0; r < results.size(); ++r) {
    const std::string label = row_label(e, e.runs.at(r));
    for (const auto& tr : results[r].summary.traces) {
      for (std::size_t j = 0; j < tr.checkpoints.size(); ++j) {
        out << label << ',' << std::to_string(tr.seed) << ',' << std::to_string(tr.checkpoints[j]) << ','
            << format_real(tr.cum_regret[j]) << ',' << std::to_string(tr.empty_intersections[j]) << '\n';
      }
    }
  }
}

void write_summary_json(std::ostream& out, const ExperimentPreset& e, const std::vector<RunResult>& results,
                        double runtime_seconds) {
  json j;
  j["experiment"] = e.name;
  j["config"] = json::parse(experiment_to_json(e));
  j["runs"] = json::array();
  for (std::size_t r = 0; r < results.size(); ++r) {
    const RunResult& res = results[r];
    const ExperimentRun& run = e.runs.at(r);
    json jr;
    jr["label"] = row_label(e, run);
    jr["checkpoints"] = res.summary.checkpoints;
    jr["mean"] = res.summary.mean;
    jr["se"] = res.summary.stderr_mean;
    if (!res.summary.proxy_mean.empty()) jr["proxy_mean"] = res.summary.proxy_mean;
    if (res.summary.coverage) jr["coverage"] = *res.summary.coverage;
    if (run.window) jr["window"] = json::array({run.window->first, run.window->second});
    if (res.exponent) {
      jr["exponent"] = json{{"slope", res.exponent->slope}, {"se", res.exponent->stderr_slope},
                            {"points", res.exponent->points}};
    } else {
      jr["exponent"] = nullptr;
    }
    jr["runtime_seconds"] = res.runtime_seconds;
    j["runs"].push_back(std::move(jr));
  }
  j["runtime_seconds"] = runtime_seconds;
  out << j.dump(2) << '\n';
}

OutputFormat output_format_from_string(const std::string& name) {
  if (name == "csv") return OutputFormat::Csv;
  if (name == "json") return OutputFormat::Json;
  if (name == "both") return OutputFormat::Both;
  throw std::invalid_argument("unknown output format '" + name + "' (csv, json or both)");
}

std::string resolve_out_dir(const std::string& requested) {
  if (!requested.empty()) return requested;
  if (const char* env = std::getenv("STACKBANDIT_OUT_DIR"); env != nullptr && *env != '\0') return env;
  return "results";
}

int run_experiment(const ExperimentRequest& request, std::ostream& err) {
  ExperimentPreset experiment;
  try {
    if (request.preset.has_value() == request.config_path.has_value()) {
      throw std::invalid_argument("exactly one of an experiment name and a config path is required");
    }
    if (request.preset) {
      experiment = find_preset(*request.preset);
    } else {
      std::ifstream in(*request.config_path);
      if (!in) throw std::invalid_argument("cannot read config file '" + *request.config_path + "'");
      std::ostringstream text;
      text << in.rdbuf();
      experiment = experiment_from_json(text.str());
    }
    experiment = apply_overrides(std::move(experiment), request.overrides);
    validate_experiment(experiment);
  } catch (const std::exception& ex) {
    err << "stackbandit: config error: " << ex.what() << '\n';
    return kExitConfigError;
  }

  const std::filesystem::path dir = resolve_out_dir(request.out_dir);
  try {
    std::filesystem::create_directories(dir);
  } catch (const std::exception& ex) {
    err << "stackbandit: cannot create output directory '" << dir.string() << "': " << ex.what() << '\n';
    return kExitRuntimeError;
  }

  std::vector<RunResult> results;
  const auto start = std::chrono::steady_clock::now();
  try {
    results = execute_experiment(experiment, request.threads);
  } catch (const std::invalid_argument& ex) {
    err << "stackbandit: config error: " << ex.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& ex) {
    err << "stackbandit: runtime error: " << ex.what() << '\n';
    return kExitRuntimeError;
  }
  const double runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  auto write = [&](const std::filesystem::path& path, auto&& body) -> bool {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
      err << "stackbandit: cannot write '" << path.string() << "'\n";
      return false;
    }
    body(out);
    out.flush();
    if (!out) {
      err << "stackbandit: write failed for '" << path.string() << "'\n";
      return false;
    }
    return true;
  };
  if (request.format != OutputFormat::Json &&
      !write(dir / "traces.csv", [&](std::ostream& o) { write_traces_csv(o, experiment, results); })) {
    return kExitRuntimeError;
  }
  if (request.format != OutputFormat::Csv &&
      !write(dir / "summary.json", [&](std::ostream& o) { write_summary_json(o, experiment, results, runtime); })) {
    return kExitRuntimeError;
  }
  return kExitOk;
}

}  // namespace stackbandit
