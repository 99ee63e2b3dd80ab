#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "equiloc/csv.hpp"
#include "equiloc/error.hpp"
#include "equiloc/experiment.hpp"
#include "equiloc/report.hpp"

using namespace equiloc;

namespace {

std::string temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("equiloc_test_" + name);
  std::filesystem::remove_all(dir);
  return dir.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig small_config() {
  ExperimentConfig cfg = default_config();
  cfg.models = {ModelSpec{Objective::kPMedian, {}, {}, {}},
                ModelSpec{Objective::kPCenter, {}, {}, {}},
                ModelSpec{Objective::kEquity3, {}, {}, {}}};
  cfg.n_values = {1, 10};
  cfg.plot_n_values = {1, 5, 10};
  cfg.plot_replications = 3;
  cfg.threads = 1;
  return cfg;
}

Cell cell(const std::string& model, const std::string& gen, int n, int site) {
  Cell c;
  c.model = model;
  c.generator = gen;
  c.n = n;
  c.ok = true;
  c.assignment.open = {site};
  return c;
}

}  // namespace

TEST_CASE("config defaults and json round trip") {
  const ExperimentConfig d = default_config();
  CHECK(d.models.size() == 11);
  CHECK(d.generators.size() == 2);
  CHECK(d.n_values == std::vector<int>{1, 50});
  CHECK(d.instance == "lehigh");

  ExperimentConfig cfg = small_config();
  cfg.models.push_back(ModelSpec{Objective::kOrderedMedian, std::vector<double>(21, 1.0),
                                 AssignmentRule::kFree, 0.5});
  GeneratorSpec custom = set1(1, 0);
  custom.name = "narrow";
  custom.delta_minutes = 2.5;
  cfg.generators.push_back(custom);
  cfg.det_mode = DetMode::kMean;
  const ExperimentConfig back = config_from_json_text(config_to_json_text(cfg));
  CHECK(config_to_json_text(back) == config_to_json_text(cfg));
  CHECK(back.generators[2].delta_minutes == 2.5);
  CHECK(back.models[3].beta == 0.5);
  CHECK(back.det_mode == DetMode::kMean);
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(config_from_json_text("{\"models\": []}"), ValidationError);
  CHECK_THROWS_AS(config_from_json_text("{\"generators\": []}"), ValidationError);
  CHECK_THROWS_AS(config_from_json_text("{\"n_values\": [0]}"), ValidationError);
  CHECK_THROWS_AS(config_from_json_text("{\"models\": [\"equity-12\"]}"), ValidationError);
  CHECK_THROWS_AS(config_from_json_text("{\"det_mode\": \"det\"}"), ValidationError);
  CHECK_THROWS_AS(config_from_json_text("{nope"), ParseError);
  CHECK_THROWS_AS(config_from_json_text("{\"p\": \"two\"}"), ParseError);
  CHECK_NOTHROW(config_from_json_text("{}"));
}

TEST_CASE("column seeds") {
  CHECK(column_seed(1, "set1", 50) == column_seed(1, "set1", 50));
  CHECK(column_seed(1, "set1", 50) != column_seed(1, "set2", 50));
  CHECK(column_seed(1, "set1", 50) != column_seed(1, "set1", 50, 1));
  CHECK(column_seed(1, "set1", 50) != column_seed(2, "set1", 50));
}

TEST_CASE("det modes") {
  ExperimentConfig cfg = small_config();
  const Instance inst = lehigh_instance();
  cfg.det_mode = DetMode::kMean;
  const ScenarioSet mean = column_scenarios(cfg, inst, cfg.generators[0], 1);
  CHECK(mean[0].distance == inst.distance());
  cfg.det_mode = DetMode::kDraw;
  const ScenarioSet draw = column_scenarios(cfg, inst, cfg.generators[0], 1);
  CHECK(draw.size() == 1);
  CHECK_FALSE(draw[0].distance == inst.distance());
}

TEST_CASE("degenerate column equals a plain deterministic solve") {
  ExperimentConfig cfg = small_config();
  cfg.std_factor = 0.0;
  GeneratorSpec g = set1(1, 0);
  g.name = "flat";
  g.delta_minutes = 0.0;
  cfg.generators = {g};
  cfg.n_values = {1};
  cfg.plot_replications = 0;
  const ResultTable t = run_experiment(cfg);
  const Instance inst = lehigh_instance(1, 1000.0, 0.0);
  for (const ModelSpec& m : cfg.models) {
    const Solution s = solve(m, inst, mean_scenario(inst));
    const Cell* c = t.find(std::string(to_string(m.objective)), "flat", 1);
    REQUIRE(c);
    CHECK(c->ok);
    CHECK(c->open() == s.open_set());
    CHECK(c->objective == s.objective);
  }
}

TEST_CASE("columns share one scenario set and cells are complete") {
  const ExperimentConfig cfg = small_config();
  const ResultTable t = run_experiment(cfg);
  CHECK(t.cells.size() == 3 * 2 * 2);
  for (const Cell& c : t.cells) {
    CHECK(c.ok);
    const Cell* first = t.find("p-median", c.generator, c.n);
    CHECK(c.scenario_hash == first->scenario_hash);
    CHECK(c.location_names.size() == 1);
    CHECK(c.equity.gini >= 0.0);
  }
  CHECK(t.curves.size() == 2 * 3);
  for (const ConvergenceCurve& curve : t.curves) {
    REQUIRE(curve.points.size() == 3);
    CHECK(curve.points[1].n == 5);
    CHECK(curve.points[1].sample_std >= 0.0);
  }
  CHECK(report::plotdata_csv(t.curves[1]).find("1,") != std::string::npos);
}

TEST_CASE("worker count does not change results") {
  ExperimentConfig cfg = small_config();
  const ResultTable a = run_experiment(cfg);
  cfg.threads = 4;
  const ResultTable b = run_experiment(cfg);
  CHECK(report::results_csv(a) == report::results_csv(b));
  CHECK(report::equity_csv(a) == report::equity_csv(b));
  for (std::size_t k = 0; k < a.curves.size(); ++k) {
    CHECK(report::plotdata_csv(a.curves[k]) == report::plotdata_csv(b.curves[k]));
  }
}

TEST_CASE("cell failures are recorded") {
  ExperimentConfig cfg = small_config();
  cfg.models = {ModelSpec{Objective::kPMedian, {}, {}, 0.5},
                ModelSpec{Objective::kPCenter, {}, {}, {}}};
  cfg.plot_replications = 0;
  const ResultTable t = run_experiment(cfg);
  const Cell* bad = t.find("p-median", "set1", 1);
  REQUIRE(bad);
  CHECK_FALSE(bad->ok);
  CHECK_FALSE(bad->error.empty());
  CHECK(t.find("p-center", "set1", 1)->ok);
}

TEST_CASE("divergence summary") {
  ResultTable t;
  t.models = {"p-median", "p-center", "equity-2"};
  t.generators = {"set1", "set2"};
  t.n_values = {1, 50};
  for (const auto& m : t.models) {
    for (const auto& g : t.generators) {
      for (int n : t.n_values) t.cells.push_back(cell(m, g, n, 4));
    }
  }
  DivergenceSummary s = divergence_report(t);
  CHECK(s.models_with_det_saa_divergence == 0);
  CHECK(s.differing_model_pairs == 0);
  CHECK(s.models_with_cross_generator_divergence == 0);

  // p-median: Catasauqua (5) deterministic, Fountain Hill (7) under SAA.
  for (Cell& c : t.cells) {
    if (c.model == "p-median" && c.generator == "set1" && c.n == 50) c.assignment.open = {6};
    // equity-2: Catasauqua under set 1, Cetronia (16) under set 2.
    if (c.model == "equity-2" && c.generator == "set2" && c.n == 50) c.assignment.open = {15};
  }
  s = divergence_report(t);
  CHECK(s.rows[0].det_vs_saa == 1);
  CHECK(s.rows[0].cross_generator == 1);
  CHECK(s.rows[2].cross_generator == 1);
  CHECK(s.rows[2].vs_p_median == 2);
  CHECK(s.rows[1].vs_p_median == 1);
  CHECK(s.models_with_det_saa_divergence == 2);
  CHECK(s.models_with_cross_generator_divergence == 2);
  CHECK(s.differing_model_pairs == 4);
}

TEST_CASE("location labels are one-based") {
  Cell c = cell("p-median", "set1", 1, 4);
  c.location_names = {"Catasauqua"};
  CHECK(report::location_label(c) == "Catasauqua (5)");
}

TEST_CASE("reports, determinism and verify") {
  const ExperimentConfig cfg = small_config();
  const std::string a = temp_dir("run_a"), b = temp_dir("run_b");
  const auto files = emit_reports(run_experiment(cfg), cfg, a);
  emit_reports(run_experiment(cfg), cfg, b);
  CHECK(files.size() == 5 + 6 - 1);
  for (const auto& name : {"results.csv", "equity_diagnostics.csv", "manifest.json",
                           "plotdata_set1_p-center.csv"}) {
    CHECK(slurp(a + "/" + name) == slurp(b + "/" + name));
    CHECK_FALSE(slurp(a + "/" + name).empty());
  }
  CHECK(std::filesystem::exists(a + "/results.md"));
  CHECK(slurp(a + "/results.md").find("| p-median |") != std::string::npos);

  const VerifyReport ok = verify_run(a);
  CHECK(ok.ok());
  CHECK(ok.cells_checked == 12);
  CHECK(ok.max_abs_discrepancy == 0.0);

  // Tamper with one stored objective.
  auto lines = csv::read_lines(a + "/results.csv");
  auto fields = csv::split_record(lines[1]);
  fields[9] = csv::format_double(std::stod(fields[9]) + 1.0);
  std::string row;
  for (std::size_t k = 0; k < fields.size(); ++k) row += (k ? "," : "") + csv::quote(fields[k]);
  lines[1] = row;
  {
    std::ofstream out(a + "/results.csv", std::ios::binary);
    for (const auto& l : lines) out << l << '\n';
  }
  const VerifyReport bad = verify_run(a);
  CHECK_FALSE(bad.ok());
  CHECK(bad.mismatches == 1);
  CHECK(bad.max_abs_discrepancy == doctest::Approx(1.0));
}

TEST_CASE("unwritable output directory") {
  const ExperimentConfig cfg = small_config();
  ResultTable t;
  t.models = {"p-median"};
  const std::string file = temp_dir("not_a_dir");
  { std::ofstream f(file); }
  CHECK_THROWS_AS(emit_reports(t, cfg, file + "/sub"), IoError);
  ResultTable empty;
  CHECK_THROWS_AS(emit_reports(empty, cfg, temp_dir("empty")), ValidationError);
  CHECK_FALSE(std::filesystem::exists(temp_dir("empty")));
}
