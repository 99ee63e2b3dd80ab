#include "equiloc/scenarios.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "equiloc/csv.hpp"
#include "equiloc/error.hpp"
#include "equiloc/hash.hpp"
#include "equiloc/rng.hpp"

namespace equiloc {

namespace {

constexpr std::uint32_t kDemandStream = 0;
constexpr std::uint32_t kDistanceStream = 1;

double draw_lognormal(const Philox4x32& rng, const Philox4x32::Counter& ctr, double mean,
                      double std) {
  if (std == 0.0) return mean;
  const LognormalParams lp = lognormal_from_mean_std(mean, std);
  return std::exp(lp.location + lp.shape * rng.normal(ctr));
}

std::string law_name(DistanceLaw law) {
  return law == DistanceLaw::kUniform ? "uniform" : "lognormal";
}

nlohmann::json generator_json(const GeneratorSpec& g) {
  return {{"name", g.name},
          {"demand_std_scale", g.demand_std_scale},
          {"distance_law", law_name(g.distance_law)},
          {"delta_minutes", g.delta_minutes},
          {"distance_cv", g.distance_cv},
          {"n", g.n},
          {"seed", g.seed}};
}

GeneratorSpec generator_from_json(const nlohmann::json& j) {
  GeneratorSpec g;
  g.name = j.at("name").get<std::string>();
  g.demand_std_scale = j.at("demand_std_scale").get<double>();
  const std::string law = j.at("distance_law").get<std::string>();
  if (law == "uniform") {
    g.distance_law = DistanceLaw::kUniform;
  } else if (law == "lognormal") {
    g.distance_law = DistanceLaw::kLognormal;
  } else {
    throw ParseError("unknown distance law '" + law + "'");
  }
  g.delta_minutes = j.at("delta_minutes").get<double>();
  g.distance_cv = j.at("distance_cv").get<double>();
  g.n = j.at("n").get<int>();
  g.seed = j.at("seed").get<std::uint64_t>();
  return g;
}

std::string scenario_file(std::size_t n) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "scenario_%04zu.csv", n);
  return buf;
}

}  // namespace

std::string to_string(DistanceLaw law) { return law_name(law); }

LognormalParams lognormal_from_mean_std(double mean, double std) {
  if (!(mean > 0.0) || !std::isfinite(mean)) {
    throw ValidationError("lognormal mean must be positive");
  }
  if (!(std >= 0.0) || !std::isfinite(std)) {
    throw ValidationError("lognormal std must be non-negative");
  }
  const double ratio = std / mean;
  const double shape2 = std::log1p(ratio * ratio);
  return {std::log(mean) - shape2 / 2.0, std::sqrt(shape2)};
}

void GeneratorSpec::validate() const {
  if (n < 1) throw ValidationError("scenario count must be at least 1");
  if (!(delta_minutes >= 0.0)) throw ValidationError("delta must be non-negative");
  if (!(distance_cv >= 0.0)) throw ValidationError("distance cv must be non-negative");
  if (!(demand_std_scale >= 0.0)) throw ValidationError("demand std scale must be non-negative");
}

GeneratorSpec set1(int n, std::uint64_t seed) {
  GeneratorSpec g;
  g.name = "set1";
  g.distance_law = DistanceLaw::kUniform;
  g.delta_minutes = 10.0;
  g.n = n;
  g.seed = seed;
  return g;
}

GeneratorSpec set2(int n, std::uint64_t seed) {
  GeneratorSpec g;
  g.name = "set2";
  g.distance_law = DistanceLaw::kLognormal;
  g.distance_cv = 1.0;
  g.n = n;
  g.seed = seed;
  return g;
}

ScenarioSet::ScenarioSet(std::vector<Scenario> scenarios, GeneratorSpec generator,
                         std::uint64_t instance_fingerprint, std::size_t clamped_draws)
    : scenarios_(std::move(scenarios)),
      generator_(std::move(generator)),
      fingerprint_(instance_fingerprint),
      clamped_(clamped_draws) {
  for (std::size_t s = 0; s < scenarios_.size(); ++s) {
    const Scenario& sc = scenarios_[s];
    const std::size_t n = sc.demand.size();
    if (sc.distance.size() != n) {
      throw ValidationError("scenario " + std::to_string(s) + " has mismatched sizes");
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!(sc.demand[i] >= 0.0)) {
        throw ValidationError("scenario " + std::to_string(s) + ": negative demand");
      }
      if (sc.distance(i, i) != 0.0) {
        throw ValidationError("scenario " + std::to_string(s) + ": non-zero diagonal");
      }
      for (std::size_t j = 0; j < n; ++j) {
        if (!(sc.distance(i, j) >= 0.0)) {
          throw ValidationError("scenario " + std::to_string(s) + ": negative distance");
        }
      }
    }
  }
}

std::uint64_t ScenarioSet::content_hash() const {
  Fnv1a h;
  h.str("equiloc.scenarios.v1");
  h.str(generator_.name).f64(generator_.demand_std_scale).str(law_name(generator_.distance_law));
  h.f64(generator_.delta_minutes).f64(generator_.distance_cv);
  h.u64(static_cast<std::uint64_t>(generator_.n)).u64(generator_.seed);
  h.u64(fingerprint_).u64(clamped_).u64(scenarios_.size());
  for (const Scenario& sc : scenarios_) h.f64s(sc.demand).f64s(sc.distance.values());
  return h.value();
}

ScenarioSet sample(const Instance& instance, const GeneratorSpec& gen) {
  gen.validate();
  const std::size_t n = instance.size();
  const std::uint64_t fingerprint = instance.fingerprint();
  const Philox4x32 rng(mix_seed(gen.seed, fingerprint));

  for (std::size_t i = 0; i < n; ++i) {
    if (gen.demand_std_scale > 0.0 && instance.demand_std()[i] > 0.0 &&
        !(instance.demand_mean()[i] > 0.0)) {
      throw ValidationError("node " + std::to_string(i) +
                            ": lognormal demand needs a positive mean");
    }
  }
  if (gen.distance_law == DistanceLaw::kLognormal && gen.distance_cv > 0.0) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j && !(instance.distance(i, j) > 0.0)) {
          throw ValidationError("lognormal travel time needs a positive mean for pair (" +
                                std::to_string(i) + "," + std::to_string(j) + ")");
        }
      }
    }
  }

  std::vector<Scenario> scenarios;
  scenarios.reserve(static_cast<std::size_t>(gen.n));
  std::size_t clamped = 0;
  for (int s = 0; s < gen.n; ++s) {
    const auto sn = static_cast<std::uint32_t>(s);
    Scenario sc;
    sc.demand.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double mu = instance.demand_mean()[i];
      const double sd = instance.demand_std()[i] * gen.demand_std_scale;
      sc.demand[i] =
          draw_lognormal(rng, {sn, static_cast<std::uint32_t>(i), 0, kDemandStream}, mu, sd);
    }
    sc.distance = DistanceMatrix(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        const Philox4x32::Counter ctr{sn, static_cast<std::uint32_t>(i),
                                      static_cast<std::uint32_t>(j), kDistanceStream};
        const double mu = instance.distance(i, j);
        double d = 0.0;
        if (gen.distance_law == DistanceLaw::kUniform) {
          const double lo = mu - gen.delta_minutes;
          const double hi = mu + gen.delta_minutes;
          d = lo + (hi - lo) * rng.uniforms(ctr)[0];
          if (d < kMinTravelMinutes) {
            d = kMinTravelMinutes;
            ++clamped;
          }
        } else {
          d = draw_lognormal(rng, ctr, mu, gen.distance_cv * mu);
        }
        sc.distance(i, j) = d;
      }
    }
    scenarios.push_back(std::move(sc));
  }
  return ScenarioSet(std::move(scenarios), gen, fingerprint, clamped);
}

ScenarioSet mean_scenario(const Instance& instance) {
  GeneratorSpec g;
  g.name = "mean";
  g.demand_std_scale = 0.0;
  g.delta_minutes = 0.0;
  g.distance_cv = 0.0;
  g.n = 1;
  Scenario sc{instance.demand_mean(), instance.distance()};
  return ScenarioSet({std::move(sc)}, g, instance.fingerprint());
}

double saa_objective(const ModelSpec& spec, const Assignment& a, const ScenarioSet& scen,
                     const Instance& instance) {
  if (scen.empty()) throw ValidationError("empty scenario set");
  const Weighting w = weighting_for(spec.objective);
  double total = 0.0;
  for (const Scenario& sc : scen.scenarios()) {
    total += objective_value(spec, outcomes(instance, a, sc, w), w);
  }
  return total / static_cast<double>(scen.size());
}

std::vector<double> mean_outcomes(const ModelSpec& spec, const Assignment& a,
                                  const ScenarioSet& scen, const Instance& instance) {
  if (scen.empty()) throw ValidationError("empty scenario set");
  const Weighting w = weighting_for(spec.objective);
  std::vector<double> acc(instance.size(), 0.0);
  for (const Scenario& sc : scen.scenarios()) {
    const auto z = outcomes(instance, a, sc, w);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += z.values[i];
  }
  for (double& v : acc) v /= static_cast<double>(scen.size());
  return acc;
}

std::vector<double> lexicographic_key(const Assignment& a, const ScenarioSet& scen,
                                      const Instance& instance) {
  if (scen.empty()) throw ValidationError("empty scenario set");
  std::vector<double> acc(instance.size(), 0.0);
  for (const Scenario& sc : scen.scenarios()) {
    const auto z = outcomes(instance, a, sc, Weighting::kUnweighted);
    const auto sorted = sorted_descending(z.values);
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += sorted[k];
  }
  for (double& v : acc) v /= static_cast<double>(scen.size());
  return acc;
}

void export_scenarios(const ScenarioSet& scen, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir + ": " + ec.message());

  nlohmann::json files = nlohmann::json::array();
  for (std::size_t s = 0; s < scen.size(); ++s) {
    const Scenario& sc = scen[s];
    std::ostringstream out;
    for (std::size_t i = 0; i < sc.demand.size(); ++i) {
      if (i) out << ',';
      out << csv::format_double(sc.demand[i]);
    }
    out << '\n' << distance_to_csv(sc.distance);
    const std::string name = scenario_file(s);
    std::ofstream f(fs::path(dir) / name, std::ios::binary);
    if (!f) throw IoError("cannot write " + name);
    f << out.str();
    files.push_back(name);
  }
  nlohmann::json manifest = {
      {"format", "equiloc.scenarios.v1"},
      {"generator", generator_json(scen.generator())},
      {"instance_fingerprint", to_hex(scen.instance_fingerprint())},
      {"clamped_draws", scen.clamped_draws()},
      {"scenario_count", scen.size()},
      {"files", files},
      {"content_hash", to_hex(scen.content_hash())},
  };
  std::ofstream m(fs::path(dir) / "manifest.json", std::ios::binary);
  if (!m) throw IoError("cannot write manifest");
  m << manifest.dump(2) << '\n';
}

ScenarioSet import_scenarios(const std::string& dir) {
  namespace fs = std::filesystem;
  nlohmann::json manifest;
  {
    std::ifstream in(fs::path(dir) / "manifest.json");
    if (!in) throw IoError("no manifest.json in " + dir);
    try {
      in >> manifest;
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("manifest.json: ") + e.what());
    }
  }
  try {
    if (manifest.at("format") != "equiloc.scenarios.v1") {
      throw ParseError("unsupported scenario bundle format");
    }
    const GeneratorSpec gen = generator_from_json(manifest.at("generator"));
    const std::uint64_t fingerprint =
        std::stoull(manifest.at("instance_fingerprint").get<std::string>(), nullptr, 16);
    const auto clamped = manifest.at("clamped_draws").get<std::size_t>();

    std::vector<Scenario> scenarios;
    for (const auto& file : manifest.at("files")) {
      const std::string name = file.get<std::string>();
      const auto lines = csv::read_lines((fs::path(dir) / name).string());
      Scenario sc;
      std::vector<std::vector<double>> rows;
      bool first = true;
      for (const std::string& line : lines) {
        if (csv::trim(line).empty()) continue;
        std::vector<double> values;
        for (const std::string& field : csv::split_record(line)) {
          double v = 0.0;
          if (!csv::parse_double(field, v)) throw ParseError(name + ": bad number '" + field + "'");
          values.push_back(v);
        }
        if (first) {
          sc.demand = std::move(values);
          first = false;
        } else {
          rows.push_back(std::move(values));
        }
      }
      sc.distance = DistanceMatrix::from_rows(rows);
      scenarios.push_back(std::move(sc));
    }
    ScenarioSet set(std::move(scenarios), gen, fingerprint, clamped);
    const std::string expected = manifest.at("content_hash").get<std::string>();
    if (to_hex(set.content_hash()) != expected) {
      throw ValidationError("scenario bundle " + dir + " does not match its manifest hash");
    }
    return set;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("manifest.json: ") + e.what());
  }
}

}  // namespace equiloc
