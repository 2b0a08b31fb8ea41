#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stackbandit/harness.hpp"

namespace stackbandit {

/// One labeled batch inside an experiment. The window, when set, selects
/// the checkpoints used for the scaling-exponent fit.
struct ExperimentRun {
  std::string label;
  RunConfig config;
  std::optional<std::pair<std::size_t, std::size_t>> window;
};

struct ExperimentPreset {
  std::string name;
  /// Statement the preset exercises.
  std::string claim;
  /// Qualitative outcome to look for.
  std::string expected;
  std::vector<ExperimentRun> runs;
};

/// Registry in a fixed order.
const std::vector<ExperimentPreset>& experiment_presets();
/// Throws std::invalid_argument on unknown names.
const ExperimentPreset& find_preset(const std::string& name);

/// Writes name, claim and default parameters of every preset.
void list_experiments(std::ostream& out);

/// Flag overrides, applied to every run of an experiment.
struct ExperimentOverrides {
  std::optional<std::size_t> horizon;
  std::optional<int> d;
  std::optional<std::vector<std::uint64_t>> seeds;
  std::optional<double> sigma_r;
  std::optional<double> sigma_b;
  std::optional<double> delta;
  std::optional<double> zeta;
  std::optional<int> k;
  std::optional<double> eps;
};

/// Applies overrides; changing the horizon resets explicit checkpoints to the
/// default grid and clips the fit window.
ExperimentPreset apply_overrides(ExperimentPreset preset, const ExperimentOverrides& overrides);

/// JSON config text. The same schema is used for --config files and for the
/// echo in summary.json, so an echoed config reproduces its run.
std::string experiment_to_json(const ExperimentPreset& experiment);
/// Throws std::invalid_argument on malformed or invalid configs.
ExperimentPreset experiment_from_json(const std::string& text);

struct RunResult {
  std::string label;
  BatchSummary summary;
  std::optional<ExponentFit> exponent;
  double runtime_seconds = 0.0;
};

/// Row label used in traces.csv: the experiment name, or "name/label" when
/// the experiment has several runs.
std::string row_label(const ExperimentPreset& experiment, const ExperimentRun& run);

/// Executes every run in order.
std::vector<RunResult> execute_experiment(const ExperimentPreset& experiment, unsigned threads = 0);

/// CSV with header experiment,seed,checkpoint,cum_regret,empty_intersection_count.
/// Reals use 17 significant digits in the C locale.
void write_traces_csv(std::ostream& out, const ExperimentPreset& experiment, const std::vector<RunResult>& results);
void write_summary_json(std::ostream& out, const ExperimentPreset& experiment, const std::vector<RunResult>& results,
                        double runtime_seconds);

/// 17 significant digits, '.' separator, independent of the global locale.
std::string format_real(double v);

/// Explicit directory, else $STACKBANDIT_OUT_DIR, else "results".
std::string resolve_out_dir(const std::string& requested);

enum class OutputFormat { Csv, Json, Both };
OutputFormat output_format_from_string(const std::string& name);

struct ExperimentRequest {
  /// Exactly one of preset and config_path is set.
  std::optional<std::string> preset;
  std::optional<std::string> config_path;
  ExperimentOverrides overrides;
  /// Empty means $STACKBANDIT_OUT_DIR, falling back to "results".
  std::string out_dir;
  OutputFormat format = OutputFormat::Both;
  unsigned threads = 0;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitRuntimeError = 3;

/// Runs an experiment and writes its outputs. Returns 0, 2 on configuration
/// errors and 3 on runtime or output errors; diagnostics go to `err`.
int run_experiment(const ExperimentRequest& request, std::ostream& err);

}  // namespace stackbandit
