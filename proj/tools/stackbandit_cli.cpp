#include <CLI11.hpp>

#include <stackbandit/experiment.hpp>

#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

// "--seeds 5" means seeds 0..4; "--seeds 3,7,11" is an explicit list.
std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  if (text.find(',') == std::string::npos) {
    std::size_t pos = 0;
    const unsigned long long n = std::stoull(text, &pos);
    if (pos != text.size() || text.front() == '-') throw std::invalid_argument("bad seed count '" + text + "'");
    for (std::uint64_t i = 0; i < n; ++i) out.push_back(i);
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    if (item.empty() || item.front() == '-') throw std::invalid_argument("bad seed '" + item + "'");
    out.push_back(std::stoull(item, &pos));
    if (pos != item.size()) throw std::invalid_argument("bad seed '" + item + "'");
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator for decentralized Stackelberg bandit games with a best-responding follower"};
  app.require_subcommand(0, 1);

  auto* list = app.add_subcommand("list", "List experiment presets");

  auto* run = app.add_subcommand("run", "Run a preset or a config file");
  std::string experiment;
  std::string config;
  std::size_t horizon = 0;
  int d = 0;
  std::string seeds;
  double sigma_r = 0.0;
  double sigma_b = 0.0;
  double delta = 0.0;
  double zeta = 0.0;
  int k = 0;
  double eps = 0.0;
  std::string out_dir;
  std::string format = "both";
  unsigned threads = 0;

  auto* opt_exp = run->add_option("-e,--experiment", experiment, "Preset name (see `list`)");
  auto* opt_cfg = run->add_option("-c,--config", config, "JSON config file");
  opt_exp->excludes(opt_cfg);
  auto* opt_T = run->add_option("--T", horizon, "Horizon")->check(CLI::PositiveNumber);
  auto* opt_d = run->add_option("--d", d, "Dimension");
  auto* opt_seeds = run->add_option("--seeds", seeds, "Seed count N (seeds 0..N-1) or comma-separated list");
  auto* opt_sr = run->add_option("--sigma-r", sigma_r, "Reward noise level")->check(CLI::NonNegativeNumber);
  auto* opt_sb = run->add_option("--sigma-b", sigma_b, "Response noise level")->check(CLI::NonNegativeNumber);
  auto* opt_delta = run->add_option("--delta", delta, "Game threshold Delta");
  auto* opt_zeta = run->add_option("--zeta", zeta, "Expert alignment zeta");
  auto* opt_k = run->add_option("--k", k, "Polynomial degree parameter");
  auto* opt_eps = run->add_option("--eps", eps, "Net resolution")->check(CLI::PositiveNumber);
  run->add_option("-o,--out", out_dir, "Output directory (default $STACKBANDIT_OUT_DIR or ./results)");
  run->add_option("--format", format, "csv, json or both")->check(CLI::IsMember({"csv", "json", "both"}));
  run->add_option("--threads", threads, "Worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : stackbandit::kExitConfigError;
  }

  if (*list || app.get_subcommands().empty()) {
    stackbandit::list_experiments(std::cout);
    return 0;
  }

  stackbandit::ExperimentRequest request;
  if (*opt_exp) request.preset = experiment;
  if (*opt_cfg) request.config_path = config;
  auto& o = request.overrides;
  if (*opt_T) o.horizon = horizon;
  if (*opt_d) o.d = d;
  if (*opt_sr) o.sigma_r = sigma_r;
  if (*opt_sb) o.sigma_b = sigma_b;
  if (*opt_delta) o.delta = delta;
  if (*opt_zeta) o.zeta = zeta;
  if (*opt_k) o.k = k;
  if (*opt_eps) o.eps = eps;
  if (*opt_seeds) {
    try {
      o.seeds = parse_seeds(seeds);
    } catch (const std::exception& e) {
      std::cerr << "stackbandit: config error: --seeds: " << e.what() << '\n';
      return stackbandit::kExitConfigError;
    }
  }
  request.out_dir = out_dir;
  request.format = stackbandit::output_format_from_string(format);
  request.threads = threads;

  const int code = stackbandit::run_experiment(request, std::cerr);
  if (code == stackbandit::kExitOk) {
    std::cout << "wrote results to " << stackbandit::resolve_out_dir(out_dir) << '\n';
  }
  return code;
}
