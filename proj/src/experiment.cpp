#include "equiloc/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "equiloc/csv.hpp"
#include "equiloc/error.hpp"
#include "equiloc/hash.hpp"
#include "equiloc/report.hpp"
#include "equiloc/rng.hpp"

namespace equiloc {

using nlohmann::json;

namespace {

json model_to_json(const ModelSpec& m) {
  if (m.ordered_weights.empty() && !m.assignment_rule && !m.beta) {
    return std::string(to_string(m.objective));
  }
  json j = {{"name", std::string(to_string(m.objective))}};
  if (!m.ordered_weights.empty()) j["weights"] = m.ordered_weights;
  if (m.assignment_rule) j["rule"] = std::string(to_string(*m.assignment_rule));
  if (m.beta) j["beta"] = *m.beta;
  return j;
}

ModelSpec model_from_json(const json& j) {
  ModelSpec m;
  if (j.is_string()) {
    m.objective = parse_objective(j.get<std::string>());
    return m;
  }
  m.objective = parse_objective(j.at("name").get<std::string>());
  if (j.contains("weights")) m.ordered_weights = j.at("weights").get<std::vector<double>>();
  if (j.contains("rule")) m.assignment_rule = parse_assignment_rule(j.at("rule").get<std::string>());
  if (j.contains("beta")) m.beta = j.at("beta").get<double>();
  return m;
}

json generator_to_json(const GeneratorSpec& g) {
  if (g == set1(g.n, g.seed)) return "set1";
  if (g == set2(g.n, g.seed)) return "set2";
  return {{"name", g.name},
          {"distance_law", to_string(g.distance_law)},
          {"delta_minutes", g.delta_minutes},
          {"distance_cv", g.distance_cv},
          {"demand_std_scale", g.demand_std_scale}};
}

GeneratorSpec generator_from_json(const json& j) {
  if (j.is_string()) {
    const std::string name = j.get<std::string>();
    if (name == "set1") return set1(1, 0);
    if (name == "set2") return set2(1, 0);
    throw ValidationError("unknown generator '" + name + "'");
  }
  GeneratorSpec g;
  g.name = j.value("name", std::string("custom"));
  const std::string law = j.value("distance_law", std::string("uniform"));
  if (law == "uniform") {
    g.distance_law = DistanceLaw::kUniform;
  } else if (law == "lognormal") {
    g.distance_law = DistanceLaw::kLognormal;
  } else {
    throw ValidationError("unknown distance law '" + law + "'");
  }
  g.delta_minutes = j.value("delta_minutes", 10.0);
  g.distance_cv = j.value("distance_cv", 1.0);
  g.demand_std_scale = j.value("demand_std_scale", 1.0);
  return g;
}

unsigned env_threads() {
  if (const char* v = std::getenv("EQUILOC_THREADS")) {
    long long n = 0;
    if (csv::parse_int(v, n) && n >= 1) return static_cast<unsigned>(n);
  }
  return 1;
}

template <typename Job>
void run_pool(std::size_t jobs, unsigned threads, Job&& job) {
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < jobs; k = next++) job(k);
  };
  const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(jobs)));
  if (n <= 1) {
    worker();
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

Instance experiment_instance(const ExperimentConfig& cfg) {
  LoadOptions opts;
  opts.distance_path = cfg.distances;
  opts.p = cfg.p;
  opts.total_demand = cfg.total_demand;
  opts.std_factor = cfg.std_factor;
  opts.speed_kmh = cfg.speed_kmh;
  opts.circuity = cfg.circuity;
  return resolve_instance(cfg.instance, opts);
}

std::vector<int> parse_ints(const std::string& s) {
  std::vector<int> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) {
    long long v = 0;
    if (!csv::parse_int(tok, v)) throw ParseError("bad index list '" + s + "'");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

}  // namespace

std::string_view to_string(DetMode mode) { return mode == DetMode::kDraw ? "det-draw" : "det-mean"; }

DetMode parse_det_mode(std::string_view name) {
  if (name == "det-draw") return DetMode::kDraw;
  if (name == "det-mean") return DetMode::kMean;
  throw ValidationError("unknown det mode '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
  if (models.empty()) throw ValidationError("experiment needs at least one model");
  if (generators.empty()) throw ValidationError("experiment needs at least one generator");
  if (n_values.empty()) throw ValidationError("experiment needs at least one N");
  for (int n : n_values) {
    if (n < 1) throw ValidationError("N values must be positive");
  }
  for (int n : plot_n_values) {
    if (n < 1) throw ValidationError("plot N values must be positive");
  }
  if (plot_replications < 0) throw ValidationError("plot replications must be non-negative");
  std::set<std::string> names;
  for (const GeneratorSpec& g : generators) {
    g.validate();
    if (!names.insert(g.name).second) {
      throw ValidationError("duplicate generator name '" + g.name + "'");
    }
  }
  std::set<std::string> model_names;
  for (const ModelSpec& m : models) {
    if (!model_names.insert(std::string(to_string(m.objective))).second) {
      throw ValidationError("model '" + std::string(to_string(m.objective)) + "' listed twice");
    }
  }
  if (p < 1) throw ValidationError("p must be positive");
}

ExperimentConfig default_config() {
  ExperimentConfig cfg;
  for (Objective o : table_objectives()) cfg.models.push_back(ModelSpec{o, {}, {}, {}});
  cfg.generators = {set1(1, 0), set2(1, 0)};
  cfg.threads = env_threads();
  return cfg;
}

ExperimentConfig config_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  ExperimentConfig cfg = default_config();
  try {
    cfg.instance = j.value("instance", cfg.instance);
    if (j.contains("distances")) cfg.distances = j.at("distances").get<std::string>();
    cfg.p = j.value("p", cfg.p);
    cfg.total_demand = j.value("total_demand", cfg.total_demand);
    cfg.std_factor = j.value("std_factor", cfg.std_factor);
    cfg.speed_kmh = j.value("speed_kmh", cfg.speed_kmh);
    cfg.circuity = j.value("circuity", cfg.circuity);
    if (j.contains("models")) {
      cfg.models.clear();
      for (const auto& m : j.at("models")) cfg.models.push_back(model_from_json(m));
    }
    if (j.contains("generators")) {
      cfg.generators.clear();
      for (const auto& g : j.at("generators")) cfg.generators.push_back(generator_from_json(g));
    }
    if (j.contains("n_values")) cfg.n_values = j.at("n_values").get<std::vector<int>>();
    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("det_mode")) cfg.det_mode = parse_det_mode(j.at("det_mode").get<std::string>());
    if (j.contains("method")) cfg.method = parse_solve_method(j.at("method").get<std::string>());
    if (j.contains("plot_n_values")) {
      cfg.plot_n_values = j.at("plot_n_values").get<std::vector<int>>();
    }
    cfg.plot_replications = j.value("plot_replications", cfg.plot_replications);
    cfg.equity_target = j.value("equity_target", cfg.equity_target);
    cfg.output_dir = j.value("output_dir", cfg.output_dir);
  } catch (const json::exception& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return config_from_json_text(ss.str());
}

std::string config_to_json_text(const ExperimentConfig& cfg) {
  json j;
  j["instance"] = cfg.instance;
  if (cfg.distances) j["distances"] = *cfg.distances;
  j["p"] = cfg.p;
  j["total_demand"] = cfg.total_demand;
  j["std_factor"] = cfg.std_factor;
  j["speed_kmh"] = cfg.speed_kmh;
  j["circuity"] = cfg.circuity;
  j["models"] = json::array();
  for (const ModelSpec& m : cfg.models) j["models"].push_back(model_to_json(m));
  j["generators"] = json::array();
  for (const GeneratorSpec& g : cfg.generators) j["generators"].push_back(generator_to_json(g));
  j["n_values"] = cfg.n_values;
  j["seed"] = cfg.seed;
  j["det_mode"] = std::string(to_string(cfg.det_mode));
  j["method"] = std::string(to_string(cfg.method));
  j["plot_n_values"] = cfg.plot_n_values;
  j["plot_replications"] = cfg.plot_replications;
  j["equity_target"] = cfg.equity_target;
  j["output_dir"] = cfg.output_dir;
  return j.dump(2);
}

GeneratorSpec generator_from_json_text(const std::string& text) {
  try {
    GeneratorSpec g = generator_from_json(json::parse(text));
    g.validate();
    return g;
  } catch (const json::exception& e) {
    throw ParseError(std::string("generator: ") + e.what());
  }
}

std::uint64_t column_seed(std::uint64_t base, const std::string& generator, int n,
                          int replication) {
  Fnv1a h;
  h.str(generator).u64(static_cast<std::uint64_t>(n)).u64(static_cast<std::uint64_t>(replication));
  return mix_seed(base, h.value());
}

ScenarioSet column_scenarios(const ExperimentConfig& cfg, const Instance& instance,
                             const GeneratorSpec& generator, int n, int replication) {
  if (n == 1 && cfg.det_mode == DetMode::kMean) return mean_scenario(instance);
  GeneratorSpec g = generator;
  g.n = n;
  g.seed = column_seed(cfg.seed, generator.name, n, replication);
  return sample(instance, g);
}

const Cell* ResultTable::find(const std::string& model, const std::string& generator,
                              int n) const {
  for (const Cell& c : cells) {
    if (c.model == model && c.generator == generator && c.n == n) return &c;
  }
  return nullptr;
}

ResultTable run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  return run_experiment(cfg, experiment_instance(cfg));
}

ResultTable run_experiment(const ExperimentConfig& cfg, const Instance& instance) {
  cfg.validate();
  ResultTable table;
  table.instance_fingerprint = instance.fingerprint();
  for (const ModelSpec& m : cfg.models) table.models.emplace_back(to_string(m.objective));
  for (const GeneratorSpec& g : cfg.generators) table.generators.push_back(g.name);
  table.n_values = cfg.n_values;

  struct Column {
    const GeneratorSpec* generator;
    int n;
    std::optional<ScenarioSet> scenarios;
    std::string error;
  };
  std::vector<Column> columns;
  for (const GeneratorSpec& g : cfg.generators) {
    for (int n : cfg.n_values) {
      Column col{&g, n, std::nullopt, {}};
      try {
        col.scenarios = column_scenarios(cfg, instance, g, n);
      } catch (const Error& e) {
        col.error = e.what();
      }
      columns.push_back(std::move(col));
    }
  }

  const std::size_t num_models = cfg.models.size();
  table.cells.resize(columns.size() * num_models);
  run_pool(table.cells.size(), cfg.threads, [&](std::size_t k) {
    const Column& col = columns[k / num_models];
    const std::size_t mi = k % num_models;
    Cell& cell = table.cells[k];
    cell.model_index = mi;
    cell.model = table.models[mi];
    cell.generator = col.generator->name;
    cell.n = col.n;
    if (!col.scenarios) {
      cell.error = col.error;
      return;
    }
    cell.seed = col.scenarios->generator().seed;
    cell.scenario_hash = col.scenarios->content_hash();
    cell.clamped_draws = col.scenarios->clamped_draws();
    SolveOptions opts;
    opts.method = cfg.method;
    opts.seed = cfg.seed;
    const auto start = std::chrono::steady_clock::now();
    try {
      const Solution s = solve(cfg.models[mi], instance, *col.scenarios, opts);
      cell.ok = true;
      cell.status = s.status;
      cell.assignment = s.assignment;
      cell.objective = s.objective;
      for (int j : s.open_set()) cell.location_names.push_back(instance.node(j).name);
      cell.equity = metrics::equity_report(s.per_node_outcomes, cfg.equity_target);
    } catch (const Error& e) {
      cell.error = e.what();
    }
    cell.wall_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  });

  // Convergence curves: re-solve each model over independent replications.
  if (cfg.plot_replications > 0 && !cfg.plot_n_values.empty()) {
    struct PlotSet {
      std::size_t generator;
      std::size_t n_index;
      std::optional<ScenarioSet> scenarios;
    };
    std::vector<PlotSet> sets;
    for (std::size_t g = 0; g < cfg.generators.size(); ++g) {
      for (std::size_t ni = 0; ni < cfg.plot_n_values.size(); ++ni) {
        for (int r = 0; r < cfg.plot_replications; ++r) {
          PlotSet ps{g, ni, std::nullopt};
          try {
            ps.scenarios = column_scenarios(cfg, instance, cfg.generators[g],
                                            cfg.plot_n_values[ni], r);
          } catch (const Error&) {
          }
          sets.push_back(std::move(ps));
        }
      }
    }
    std::vector<double> values(sets.size() * num_models, std::nan(""));
    run_pool(values.size(), cfg.threads, [&](std::size_t k) {
      const PlotSet& ps = sets[k / num_models];
      if (!ps.scenarios) return;
      SolveOptions opts;
      opts.method = cfg.method;
      opts.seed = cfg.seed;
      try {
        values[k] = solve(cfg.models[k % num_models], instance, *ps.scenarios, opts).objective;
      } catch (const Error&) {
      }
    });
    const std::size_t reps = static_cast<std::size_t>(cfg.plot_replications);
    for (std::size_t g = 0; g < cfg.generators.size(); ++g) {
      for (std::size_t mi = 0; mi < num_models; ++mi) {
        ConvergenceCurve curve{cfg.generators[g].name, table.models[mi], {}};
        for (std::size_t ni = 0; ni < cfg.plot_n_values.size(); ++ni) {
          std::vector<double> obs;
          for (std::size_t r = 0; r < reps; ++r) {
            const std::size_t set = (g * cfg.plot_n_values.size() + ni) * reps + r;
            const double v = values[set * num_models + mi];
            if (!std::isnan(v)) obs.push_back(v);
          }
          ConvergencePoint pt{cfg.plot_n_values[ni], std::nan(""), std::nan("")};
          if (!obs.empty()) {
            double sum = 0.0;
            for (double v : obs) sum += v;
            pt.mean_objective = sum / static_cast<double>(obs.size());
            double ss = 0.0;
            for (double v : obs) ss += (v - pt.mean_objective) * (v - pt.mean_objective);
            pt.sample_std =
                obs.size() > 1 ? std::sqrt(ss / static_cast<double>(obs.size() - 1)) : 0.0;
          }
          curve.points.push_back(pt);
        }
        table.curves.push_back(std::move(curve));
      }
    }
  }
  return table;
}

DivergenceSummary divergence_report(const ResultTable& table) {
  DivergenceSummary summary;
  if (table.n_values.empty()) return summary;
  const int n_det = *std::min_element(table.n_values.begin(), table.n_values.end());
  const int n_saa = *std::max_element(table.n_values.begin(), table.n_values.end());

  auto differs = [](const Cell* a, const Cell* b) {
    return a && b && a->ok && b->ok && a->open() != b->open();
  };

  for (const std::string& model : table.models) {
    DivergenceSummary::ModelRow row;
    row.model = model;
    for (const std::string& g : table.generators) {
      if (n_det != n_saa && differs(table.find(model, g, n_det), table.find(model, g, n_saa))) {
        ++row.det_vs_saa;
      }
      for (int n : table.n_values) {
        const Cell* mine = table.find(model, g, n);
        if (differs(mine, table.find("p-median", g, n))) ++row.vs_p_median;
        if (differs(mine, table.find("p-center", g, n))) ++row.vs_p_center;
      }
    }
    for (int n : table.n_values) {
      if (n <= 1) continue;
      std::set<std::vector<int>> optima;
      bool all_ok = true;
      for (const std::string& g : table.generators) {
        const Cell* c = table.find(model, g, n);
        if (!c || !c->ok) {
          all_ok = false;
          break;
        }
        optima.insert(c->open());
      }
      if (all_ok && optima.size() > 1) ++row.cross_generator;
    }
    if (row.det_vs_saa > 0) ++summary.models_with_det_saa_divergence;
    if (row.cross_generator > 0) ++summary.models_with_cross_generator_divergence;
    summary.rows.push_back(std::move(row));
  }

  for (const std::string& g : table.generators) {
    for (int n : table.n_values) {
      for (std::size_t a = 0; a < table.models.size(); ++a) {
        for (std::size_t b = a + 1; b < table.models.size(); ++b) {
          if (differs(table.find(table.models[a], g, n), table.find(table.models[b], g, n))) {
            ++summary.differing_model_pairs;
          }
        }
      }
    }
  }
  return summary;
}

std::vector<std::string> emit_reports(const ResultTable& table, const ExperimentConfig& cfg,
                                      const std::string& dir) {
  namespace fs = std::filesystem;
  if (table.models.empty()) throw ValidationError("result table has no models");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
  {
    const fs::path probe = fs::path(dir) / ".equiloc_write_probe";
    std::ofstream f(probe);
    if (!f) throw IoError("output directory " + dir + " is not writable");
    f.close();
    fs::remove(probe, ec);
  }

  std::vector<std::pair<std::string, std::string>> files;
  files.emplace_back("results.csv", report::results_csv(table));
  files.emplace_back("equity_diagnostics.csv", report::equity_csv(table));
  for (const ConvergenceCurve& curve : table.curves) {
    files.emplace_back(report::plotdata_filename(curve), report::plotdata_csv(curve));
  }

  json manifest;
  manifest["format"] = "equiloc.run.v1";
  manifest["config"] = json::parse(config_to_json_text(cfg));
  manifest["instance_fingerprint"] = to_hex(table.instance_fingerprint);
  json columns = json::array();
  std::set<std::pair<std::string, int>> seen;
  for (const Cell& c : table.cells) {
    if (!seen.insert({c.generator, c.n}).second) continue;
    columns.push_back({{"generator", c.generator},
                       {"n", c.n},
                       {"seed", c.seed},
                       {"scenario_hash", to_hex(c.scenario_hash)},
                       {"clamped_draws", c.clamped_draws}});
  }
  manifest["columns"] = columns;
  json hashes = json::object();
  for (const auto& [name, content] : files) {
    hashes[name] = to_hex(Fnv1a().bytes(content.data(), content.size()).value());
  }
  manifest["file_hashes"] = hashes;
  files.emplace_back("manifest.json", manifest.dump(2) + "\n");
  files.emplace_back("results.md", report::results_markdown(table, divergence_report(table)));

  std::vector<std::string> written;
  for (const auto& [name, content] : files) {
    const fs::path path = fs::path(dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << content;
    if (!out) throw IoError("failed writing " + path.string());
    written.push_back(path.string());
  }
  return written;
}

VerifyReport verify_run(const std::string& dir) {
  namespace fs = std::filesystem;
  VerifyReport report;
  json manifest;
  {
    std::ifstream in(fs::path(dir) / "manifest.json");
    if (!in) throw IoError("no manifest.json in " + dir);
    try {
      in >> manifest;
    } catch (const json::exception& e) {
      throw ParseError(std::string("manifest.json: ") + e.what());
    }
  }
  const ExperimentConfig cfg = config_from_json_text(manifest.at("config").dump());
  const Instance instance = experiment_instance(cfg);
  if (to_hex(instance.fingerprint()) != manifest.at("instance_fingerprint").get<std::string>()) {
    report.problems.push_back("instance fingerprint differs from the manifest");
    return report;
  }

  for (const auto& [name, hash] : manifest.at("file_hashes").items()) {
    const fs::path path = fs::path(dir) / name;
    if (!fs::exists(path)) {
      report.problems.push_back("missing " + name);
    } else if (to_hex(hash_file(path.string())) != hash.get<std::string>()) {
      report.problems.push_back(name + " does not match its manifest hash");
    }
  }

  const auto lines = csv::read_lines((fs::path(dir) / "results.csv").string());
  if (lines.empty()) throw ParseError("results.csv is empty");
  const auto header = csv::split_record(lines[0]);
  auto col = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw ParseError("results.csv lacks column " + name);
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t c_model = col("model"), c_gen = col("generator"), c_n = col("n"),
                    c_ok = col("ok"), c_open = col("open"), c_assign = col("assignment"),
                    c_obj = col("objective"), c_hash = col("scenario_hash");

  std::map<std::pair<std::string, int>, ScenarioSet> cache;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    if (csv::trim(lines[k]).empty()) continue;
    const auto f = csv::split_record(lines[k]);
    if (f.size() != header.size()) throw ParseError("results.csv row " + std::to_string(k + 1));
    if (f[c_ok] != "1") continue;
    const std::string where = "row " + std::to_string(k + 1) + " (" + f[c_model] + ", " +
                              f[c_gen] + ", N=" + f[c_n] + ")";
    const auto gen_it = std::find_if(cfg.generators.begin(), cfg.generators.end(),
                                     [&](const GeneratorSpec& g) { return g.name == f[c_gen]; });
    const auto model_it = std::find_if(cfg.models.begin(), cfg.models.end(), [&](const ModelSpec& m) {
      return to_string(m.objective) == f[c_model];
    });
    if (gen_it == cfg.generators.end() || model_it == cfg.models.end()) {
      report.problems.push_back(where + ": not in the recorded config");
      continue;
    }
    long long n = 0;
    if (!csv::parse_int(f[c_n], n)) throw ParseError(where + ": bad N");
    auto key = std::make_pair(gen_it->name, static_cast<int>(n));
    auto it = cache.find(key);
    if (it == cache.end()) {
      it = cache.emplace(key, column_scenarios(cfg, instance, *gen_it, static_cast<int>(n))).first;
    }
    const ScenarioSet& scen = it->second;
    if (to_hex(scen.content_hash()) != f[c_hash]) {
      report.problems.push_back(where + ": regenerated scenarios do not match");
      continue;
    }
    Assignment a;
    a.open = parse_ints(f[c_open]);
    a.assign = parse_ints(f[c_assign]);
    double stored = 0.0;
    if (!csv::parse_double(f[c_obj], stored)) throw ParseError(where + ": bad objective");
    double recomputed = 0.0;
    try {
      recomputed = saa_objective(*model_it, a, scen, instance);
    } catch (const Error& e) {
      report.problems.push_back(where + ": " + e.what());
      continue;
    }
    ++report.cells_checked;
    const double diff = std::abs(recomputed - stored);
    report.max_abs_discrepancy = std::max(report.max_abs_discrepancy, diff);
    if (recomputed != stored) {
      ++report.mismatches;
      report.problems.push_back(where + ": stored " + f[c_obj] + " but recomputed " +
                                csv::format_double(recomputed));
    }
  }
  return report;
}

}  // namespace equiloc
