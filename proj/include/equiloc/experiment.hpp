#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "equiloc/instance.hpp"
#include "equiloc/metrics.hpp"
#include "equiloc/models.hpp"
#include "equiloc/scenarios.hpp"
#include "equiloc/solver.hpp"

namespace equiloc {

// How the N = 1 column is built: one random draw from the generator, or the
// instance's mean data.
enum class DetMode { kDraw, kMean };
std::string_view to_string(DetMode mode);
DetMode parse_det_mode(std::string_view name);

struct ExperimentConfig {
  std::string instance = "lehigh";
  std::optional<std::string> distances;
  int p = 1;
  double total_demand = 1000.0;
  double std_factor = 0.5;
  double speed_kmh = kDefaultSpeedKmh;
  double circuity = kDefaultCircuity;

  std::vector<ModelSpec> models;
  std::vector<GeneratorSpec> generators;  // n and seed are set per column
  std::vector<int> n_values{1, 50};
  std::uint64_t seed = 20230101;
  DetMode det_mode = DetMode::kDraw;
  SolveMethod method = SolveMethod::kEnumerateExact;

  // Convergence curves: per (generator, model), the optimum is re-solved
  // `plot_replications` times at each N.
  std::vector<int> plot_n_values{1, 5, 10, 25, 50};
  int plot_replications = 5;

  double equity_target = 0.0;
  std::string output_dir = "equiloc_run";
  unsigned threads = 1;

  void validate() const;
};

// Defaults: bundled instance, eleven table models, both generator sets,
// N in {1, 50}.
ExperimentConfig default_config();

ExperimentConfig config_from_json_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string config_to_json_text(const ExperimentConfig& cfg);

// "set1", "set2", or an object with name, distance_law, delta_minutes,
// distance_cv and demand_std_scale. n and seed are left at 1 and 0.
GeneratorSpec generator_from_json_text(const std::string& text);

// Seed of the scenario set shared by every model in one (generator, N)
// column; replication r > 0 is used for convergence curves only.
std::uint64_t column_seed(std::uint64_t base, const std::string& generator, int n,
                          int replication = 0);

// Scenario set for one column, honouring det_mode when n == 1.
ScenarioSet column_scenarios(const ExperimentConfig& cfg, const Instance& instance,
                             const GeneratorSpec& generator, int n, int replication = 0);

struct Cell {
  std::size_t model_index = 0;
  std::string model;
  std::string generator;
  int n = 0;
  std::uint64_t seed = 0;
  std::uint64_t scenario_hash = 0;
  std::size_t clamped_draws = 0;  // travel-time draws raised to the floor
  bool ok = false;
  std::string error;
  SolveStatus status = SolveStatus::kOptimal;
  Assignment assignment;
  std::vector<std::string> location_names;
  double objective = 0.0;
  double wall_ms = 0.0;
  metrics::EquityReport equity;
  // Lexicographic order of open sets makes this the comparison key between
  // cells.
  const std::vector<int>& open() const { return assignment.open; }
};

struct ConvergencePoint {
  int n = 0;
  double mean_objective = 0.0;
  double sample_std = 0.0;
};

struct ConvergenceCurve {
  std::string generator;
  std::string model;
  std::vector<ConvergencePoint> points;
};

struct ResultTable {
  std::vector<std::string> models;
  std::vector<std::string> generators;
  std::vector<int> n_values;
  std::vector<Cell> cells;  // sorted by (generator, n, model order)
  std::vector<ConvergenceCurve> curves;
  std::uint64_t instance_fingerprint = 0;

  const Cell* find(const std::string& model, const std::string& generator, int n) const;
};

// Solves every (model, generator, N) cell. All models in one column consume
// the identical scenario set. Cell failures are recorded, not thrown.
ResultTable run_experiment(const ExperimentConfig& cfg);
ResultTable run_experiment(const ExperimentConfig& cfg, const Instance& instance);

struct DivergenceSummary {
  struct ModelRow {
    std::string model;
    int det_vs_saa = 0;        // generators where N=1 and the largest N differ
    int vs_p_median = 0;       // columns where the optimum differs from p-median's
    int vs_p_center = 0;       // same for p-center
    int cross_generator = 0;   // N > 1 values where generators disagree
  };
  std::vector<ModelRow> rows;
  int models_with_det_saa_divergence = 0;
  int differing_model_pairs = 0;  // within any single column
  int models_with_cross_generator_divergence = 0;
};

DivergenceSummary divergence_report(const ResultTable& table);

// Writes results.csv, results.md, equity_diagnostics.csv, plotdata_*.csv and
// manifest.json. Everything except results.md (which carries wall times) is
// byte-identical across runs of the same config. Throws IoError before
// writing anything if `dir` is not writable.
std::vector<std::string> emit_reports(const ResultTable& table, const ExperimentConfig& cfg,
                                      const std::string& dir);

struct VerifyReport {
  std::size_t cells_checked = 0;
  std::size_t mismatches = 0;
  double max_abs_discrepancy = 0.0;
  std::vector<std::string> problems;
  bool ok() const { return mismatches == 0 && problems.empty(); }
};

// Re-derives every stored objective from the stored assignment, with the
// scenario sets regenerated from the manifest's seeds.
VerifyReport verify_run(const std::string& dir);

}  // namespace equiloc
