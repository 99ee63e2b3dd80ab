// equiloc command line: solve, experiment, verify, metrics.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "equiloc/csv.hpp"
#include "equiloc/error.hpp"
#include "equiloc/experiment.hpp"
#include "equiloc/hash.hpp"
#include "equiloc/metrics.hpp"
#include "equiloc/report.hpp"
#include "equiloc/solver.hpp"

using namespace equiloc;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitTimeLimit = 4;

struct SolveArgs {
  std::string instance = "lehigh";
  std::string distances;
  std::string model = "p-median";
  int p = 1;
  std::string set = "set1";
  int n = 1;
  std::uint64_t seed = 20230101;
  std::string rule;
  std::string method = "enumerate_exact";
  double time_limit = 0.0;
  double beta = 0.0;
  std::vector<double> weights;
  std::string det_mode = "det-draw";
  std::string save_scenarios;
  std::string out;
  double total_demand = 1000.0;
  double std_factor = 0.5;
  unsigned threads = 1;
};

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string join(const std::vector<int>& v, const char* sep) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) s += sep;
    s += std::to_string(v[k]);
  }
  return s;
}

int run_solve(const SolveArgs& a) {
  LoadOptions load;
  if (!a.distances.empty()) load.distance_path = a.distances;
  load.p = a.p;
  load.total_demand = a.total_demand;
  load.std_factor = a.std_factor;
  const Instance instance = resolve_instance(a.instance, load);

  ModelSpec spec;
  spec.objective = parse_objective(a.model);
  spec.ordered_weights = a.weights;
  if (!a.rule.empty()) spec.assignment_rule = parse_assignment_rule(a.rule);
  if (a.beta > 0.0) spec.beta = a.beta;

  GeneratorSpec gen;
  if (a.set == "set1" || a.set == "set2") {
    gen = generator_from_json_text("\"" + a.set + "\"");
  } else {
    gen = generator_from_json_text(read_text(a.set));
  }
  gen.n = a.n;
  gen.seed = a.seed;
  gen.validate();
  const ScenarioSet scen = (a.n == 1 && parse_det_mode(a.det_mode) == DetMode::kMean)
                               ? mean_scenario(instance)
                               : sample(instance, gen);
  if (!a.save_scenarios.empty()) export_scenarios(scen, a.save_scenarios);

  SolveOptions opts;
  opts.method = parse_solve_method(a.method);
  if (a.time_limit > 0.0) opts.time_limit_seconds = a.time_limit;
  opts.threads = a.threads;
  opts.seed = a.seed;
  const Solution s = solve(spec, instance, scen, opts);

  std::ostringstream out;
  out << "model: " << to_string(spec.objective) << "\n";
  out << "status: " << to_string(s.status) << "\n";
  out << "rule: " << to_string(s.provenance.rule) << "\n";
  out << "scenarios: " << scen.size() << " (" << scen.generator().name
      << ", hash " << to_hex(scen.content_hash()) << ")\n";
  if (scen.clamped_draws() > 0) out << "clamped draws: " << scen.clamped_draws() << "\n";
  out << "open:";
  for (int j : s.open_set()) out << ' ' << instance.node(j).name << " (" << j + 1 << ")";
  out << "\nobjective: " << csv::format_double(s.objective) << "\n";
  out << "assignment: " << join(s.assignment.assign, " ") << "\n";
  const auto eq = metrics::equity_report(s.per_node_outcomes);
  out << "gini: " << csv::format_double(eq.gini) << "  range: " << csv::format_double(eq.range)
      << "  mad: " << csv::format_double(eq.mad) << "\n";
  std::cout << out.str();
  if (!a.out.empty()) {
    std::ofstream f(a.out);
    if (!f) throw IoError("cannot write " + a.out);
    f << out.str();
  }
  return s.status == SolveStatus::kTimeLimit ? kExitTimeLimit : kExitOk;
}

int run_experiment_cmd(const std::string& config_path, const std::string& out_dir) {
  ExperimentConfig cfg = load_config(config_path);
  cfg.threads = default_config().threads;
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  // Fail on an unwritable directory before spending time on solves.
  std::filesystem::create_directories(cfg.output_dir);
  const ResultTable table = run_experiment(cfg);
  const auto files = emit_reports(table, cfg, cfg.output_dir);
  const DivergenceSummary summary = divergence_report(table);
  std::size_t failed = 0;
  for (const Cell& c : table.cells) {
    if (!c.ok) {
      ++failed;
      std::cerr << "cell " << c.model << " / " << c.generator << " / N=" << c.n
                << " failed: " << c.error << "\n";
    }
  }
  std::cout << "cells: " << table.cells.size() << " (" << failed << " failed)\n";
  std::cout << "DET vs SAA divergent models: " << summary.models_with_det_saa_divergence << "\n";
  std::cout << "differing model pairs: " << summary.differing_model_pairs << "\n";
  std::cout << "cross-generator divergent models: "
            << summary.models_with_cross_generator_divergence << "\n";
  std::cout << "wrote " << files.size() << " files to " << cfg.output_dir << "\n";
  return kExitOk;
}

int run_verify(const std::string& dir) {
  const VerifyReport r = verify_run(dir);
  for (const std::string& p : r.problems) std::cerr << p << "\n";
  std::cout << "checked " << r.cells_checked << " cells, " << r.mismatches
            << " mismatches, max discrepancy " << csv::format_double(r.max_abs_discrepancy)
            << "\n";
  return r.ok() ? kExitOk : kExitValidation;
}

int run_metrics(const std::string& path, double target) {
  std::vector<double> values;
  for (const std::string& line : csv::read_lines(path)) {
    for (const std::string& field : csv::split_record(line)) {
      const std::string t = csv::trim(field);
      if (t.empty()) continue;
      double v = 0.0;
      if (!csv::parse_double(t, v)) throw ParseError("not a number: '" + t + "'");
      values.push_back(v);
    }
  }
  const auto r = metrics::equity_report(values, target);
  std::cout << "n," << values.size() << "\n"
            << "mad," << csv::format_double(r.mad) << "\n"
            << "sad," << csv::format_double(r.sad) << "\n"
            << "range," << csv::format_double(r.range) << "\n"
            << "ratio_min_max," << csv::format_double(r.ratio_min_max) << "\n"
            << "variance," << csv::format_double(r.variance) << "\n"
            << "gini," << csv::format_double(r.gini) << (r.gini_zero_total ? ",zero_total" : "")
            << "\n"
            << "deviation_sum_abs," << csv::format_double(r.deviation_sum_abs) << "\n"
            << "deviation_max_abs," << csv::format_double(r.deviation_max_abs) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Equitable facility location under uncertainty"};
  app.require_subcommand(1);

  SolveArgs sa;
  auto* solve_cmd = app.add_subcommand("solve", "Solve one model");
  solve_cmd->add_option("--instance", sa.instance, "'lehigh' or a nodes CSV")->capture_default_str();
  solve_cmd->add_option("--distances", sa.distances, "Travel-time matrix CSV");
  solve_cmd->add_option("--model", sa.model, "Objective name")->required();
  solve_cmd->add_option("--p", sa.p, "Number of facilities")->capture_default_str();
  solve_cmd->add_option("--set", sa.set, "set1, set2 or a generator JSON file")
      ->capture_default_str();
  solve_cmd->add_option("--n", sa.n, "Scenario count")->capture_default_str();
  solve_cmd->add_option("--seed", sa.seed, "Scenario seed")->capture_default_str();
  solve_cmd->add_option("--rule", sa.rule, "closest or free");
  solve_cmd->add_option("--method", sa.method, "enumerate_exact or local_search")
      ->capture_default_str();
  solve_cmd->add_option("--time-limit", sa.time_limit, "Seconds");
  solve_cmd->add_option("--beta", sa.beta, "Require min/max outcome ratio >= beta");
  solve_cmd->add_option("--weights", sa.weights, "Ordered-median weights")->delimiter(',');
  solve_cmd->add_option("--det-mode", sa.det_mode, "det-draw or det-mean for N=1")
      ->capture_default_str();
  solve_cmd->add_option("--save-scenarios", sa.save_scenarios, "Export the scenario set");
  solve_cmd->add_option("--out", sa.out, "Also write the summary here");
  solve_cmd->add_option("--total-demand", sa.total_demand)->capture_default_str();
  solve_cmd->add_option("--std-factor", sa.std_factor)->capture_default_str();
  solve_cmd->add_option("--threads", sa.threads)->capture_default_str();

  std::string config_path, out_dir;
  auto* exp_cmd = app.add_subcommand("experiment", "Run a configured study");
  exp_cmd->add_option("--config", config_path, "Config JSON")->required();
  exp_cmd->add_option("--out", out_dir, "Override output_dir");

  std::string run_dir;
  auto* verify_cmd = app.add_subcommand("verify", "Re-derive every stored objective");
  verify_cmd->add_option("--run", run_dir, "Experiment output directory")->required();

  std::string outcomes_path;
  double target = 0.0;
  auto* metrics_cmd = app.add_subcommand("metrics", "Inequality indices of an outcome vector");
  metrics_cmd->add_option("--outcomes", outcomes_path, "Numbers, comma or newline separated")
      ->required();
  metrics_cmd->add_option("--target", target, "Target for deviation indices");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*solve_cmd) return run_solve(sa);
    if (*exp_cmd) return run_experiment_cmd(config_path, out_dir);
    if (*verify_cmd) return run_verify(run_dir);
    if (*metrics_cmd) return run_metrics(outcomes_path, target);
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitOk;
}
