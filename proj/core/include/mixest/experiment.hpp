#pragma once

// Declarative experiment runner: parses TOML/JSON configs into typed specs,
// executes seeded multi-trial runs with paired streams and checkpointed
// metrics, verifies the convergence-bound regime, and serializes records,
// CSV tables, and SVG plots.

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mixest/baselines.hpp"
#include "mixest/common.hpp"
#include "mixest/dictionary.hpp"
#include "mixest/estimators.hpp"
#include "mixest/evaluation.hpp"
#include "mixest/targets.hpp"

namespace mixest {

struct TargetSpec {
  std::string kind;               // four_mode | wide_spikes | sparse_categorical
  double wide_sigma = 2.0;        // wide_spikes
  std::vector<SpikeSpec> spikes;  // wide_spikes; empty keeps the default corners
  std::int64_t alphabet = 0;      // sparse_categorical
  std::int64_t support = 0;
  CategoricalDecay decay = CategoricalDecay::Zipf;
  std::uint64_t perm_seed = 1234;

  bool categorical() const { return kind == "sparse_categorical"; }
  Target build() const;
};

struct DictionarySpec {
  std::string kind;  // gaussian_grid | categorical
  std::vector<GridLayer> layers;
  std::int64_t alphabet = 0;
  double epsilon = 0.0;

  bool categorical() const { return kind == "categorical"; }
  Dictionary build(const DomainBox& box) const;
};

struct ScheduleSpec {
  std::string kind = "power";  // constant_sqrt | strongly_convex | power
  double gamma0 = 0.1;         // power
  double decay = 0.35;         // power
  double nu = 0.0;             // strongly_convex; 0 means estimate from data
};

struct EstimatorSpec {
  std::string name;
  std::string kind = "smd";  // smd | softmax_sgd
  MirrorKind mirror = MirrorKind::NegativeEntropy;
  OutputMode output = OutputMode::LastIterate;
  SignConvention sign = SignConvention::Descent;
  ScheduleSpec schedule;
};

struct BaselineSpec {
  std::string name;
  std::string kind;  // kde | knn | add_constant
  std::int64_t fit_samples = 0;
  int k = 0;         // knn; 0 means ceil(sqrt(n))
  double c = 1.0;    // add_constant
};

/// Full experiment description. `metrics` is a subset of {kl_vs_target,
/// kl_vs_best_in_class, l2_vs_best_in_class}; the l2 metric is the squared
/// Euclidean distance ‖m − m*‖² (the Theorem 1 quantity).
struct ExperimentConfig {
  TargetSpec target;
  DictionarySpec dictionary;
  std::vector<EstimatorSpec> estimators;
  std::vector<BaselineSpec> baselines;

  std::int64_t stream_length = 1000;
  int trials = 1;
  std::vector<std::int64_t> checkpoints;  // empty: 20 log-spaced points in [1, N]
  std::vector<std::string> metrics{"kl_vs_target"};
  std::int64_t reference_samples = 20000;
  int kl_grid = 400;
  double nu = 0.0;  // verify-theorems override; 0 means estimate
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  int jobs = 1;
  DomainBox box;  // fixed [−5,5]²

  static ExperimentConfig from_json(const nlohmann::json& j);
  /// Dispatches on extension: .json via nlohmann, anything else via the
  /// TOML reader.
  static ExperimentConfig from_file(const std::string& path);
  /// The raw parsed tree (same dispatch), before validation. Sweeps edit
  /// this tree with apply_override, then call from_json per value.
  static nlohmann::json load_tree(const std::string& path);
  nlohmann::json to_json() const;
  void validate() const;
  std::vector<std::int64_t> resolved_checkpoints() const;
};

/// Self-contained run artifact: config echo, per-trial metric curves with
/// mean/stderr, oracle outputs, bound curves, rate fits, heatmap grids, seed
/// provenance, and timings. Everything emit_outputs needs is inside, so a
/// saved record can be re-plotted without rerunning.
struct ExperimentRecord {
  nlohmann::json data;

  void save(const std::string& path) const;
  static ExperimentRecord load(const std::string& path);
};

ExperimentRecord run_experiment(const ExperimentConfig& config);

struct VerifyCheck {
  std::string name;
  bool passed = false;
  double value = 0.0;      // the measured quantity
  double threshold = 0.0;  // the gate it is compared against
  std::string detail;
};

struct VerifyReport {
  std::vector<VerifyCheck> checks;
  bool all_passed = false;
  ExperimentRecord record;
};

/// Theorem regime: requires a categorical target/dictionary pair (exact KL)
/// and trials ≥ 50. Overrides the configured estimators with last-iterate
/// projected SGD and Exp-SMD at γ_i = 2/(ν(i+1)), checks the mean metric
/// against the bound curve at every checkpoint and the fitted rate slope,
/// then repeats the 1/√N regime (horizon-tuned constant step, Cesàro output,
/// suboptimality gap) across horizons {100, 316, 1000, 3162, 10000}.
VerifyReport verify_theorems(const ExperimentConfig& config);

/// CSV table: header "estimator,trial,checkpoint,metric,value", one row per
/// (estimator, trial, checkpoint, metric) in config order, then baselines
/// (checkpoint column = fit sample count). Values print as %.17g, so equal
/// records give byte-equal tables.
std::string metrics_csv(const ExperimentRecord& record);

/// Writes the requested artifact kinds (subset of {csv, json, svg}) into
/// out_dir and returns the written paths. csv → metrics.csv; json →
/// record.json; svg → one convergence plot per metric plus density heatmaps
/// and a target-density CSV grid for 2-D targets.
std::vector<std::string> emit_outputs(const ExperimentRecord& record,
                                      const std::set<std::string>& formats,
                                      const std::string& out_dir);

/// Sets `dotted_path` (e.g. "run.stream_length", "estimators.0.schedule.gamma0")
/// inside a config JSON tree to `value_text`, parsed as bool/int/float when
/// possible and kept as a string otherwise. Numeric segments index arrays.
void apply_override(nlohmann::json& config, const std::string& dotted_path,
                    const std::string& value_text);

}  // namespace mixest
