#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "equiloc/instance.hpp"
#include "equiloc/models.hpp"

namespace equiloc {

// Log-scale parameters (location, shape) of the lognormal law whose
// arithmetic mean and standard deviation are `mean` and `std`.
struct LognormalParams {
  double location = 0.0;
  double shape = 0.0;
};
LognormalParams lognormal_from_mean_std(double mean, double std);

enum class DistanceLaw {
  kUniform,    // U[mu - delta, mu + delta], clamped below at kMinTravelMinutes
  kLognormal,  // LogN with mean mu and std cv * mu
};

inline constexpr double kMinTravelMinutes = 0.1;

struct GeneratorSpec {
  std::string name = "custom";
  // Demand is always lognormal around the instance's mean/std profile; the
  // scale multiplies the std (0 gives deterministic demand).
  double demand_std_scale = 1.0;
  DistanceLaw distance_law = DistanceLaw::kUniform;
  double delta_minutes = 10.0;  // uniform half-width
  double distance_cv = 1.0;     // lognormal std / mean
  int n = 50;
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const GeneratorSpec&) const = default;
};

// Uniform travel times with a 10 minute half-width, lognormal demand.
GeneratorSpec set1(int n, std::uint64_t seed);
// Lognormal travel times with std equal to the mean, lognormal demand.
GeneratorSpec set2(int n, std::uint64_t seed);

class ScenarioSet {
 public:
  ScenarioSet(std::vector<Scenario> scenarios, GeneratorSpec generator,
              std::uint64_t instance_fingerprint, std::size_t clamped_draws = 0);

  std::size_t size() const { return scenarios_.size(); }
  bool empty() const { return scenarios_.empty(); }
  const Scenario& operator[](std::size_t n) const { return scenarios_[n]; }
  const std::vector<Scenario>& scenarios() const { return scenarios_; }
  const GeneratorSpec& generator() const { return generator_; }
  std::uint64_t instance_fingerprint() const { return fingerprint_; }
  // Uniform travel-time draws that fell below kMinTravelMinutes and were
  // raised to it.
  std::size_t clamped_draws() const { return clamped_; }

  // Hash over the generator, fingerprint and every drawn value.
  std::uint64_t content_hash() const;

  bool operator==(const ScenarioSet&) const = default;

 private:
  std::vector<Scenario> scenarios_;
  GeneratorSpec generator_;
  std::uint64_t fingerprint_;
  std::size_t clamped_;
};

// Draws gen.n scenarios. Deterministic in (gen.seed, instance fingerprint,
// gen); scenario n only depends on its own counters.
ScenarioSet sample(const Instance& instance, const GeneratorSpec& gen);

// A single scenario equal to the instance's mean demand and distance.
ScenarioSet mean_scenario(const Instance& instance);

// (1/N) Σ_n objective(outcomes under scenario n). Throws ValidationError on an
// empty set and ContractError on an infeasible assignment.
double saa_objective(const ModelSpec& spec, const Assignment& a,
                     const ScenarioSet& scen, const Instance& instance);

// Scenario-averaged per-node outcomes under the model's weighting.
std::vector<double> mean_outcomes(const ModelSpec& spec, const Assignment& a,
                                  const ScenarioSet& scen, const Instance& instance);

// Key of the lexicographic minimax model: the k-th component is the sample
// average of the k-th largest outcome.
std::vector<double> lexicographic_key(const Assignment& a, const ScenarioSet& scen,
                                      const Instance& instance);

// Bundle layout: <dir>/manifest.json plus <dir>/scenario_<n>.csv, where each
// scenario file holds the demand vector on its first line followed by the
// distance matrix rows.
void export_scenarios(const ScenarioSet& scen, const std::string& dir);
// Throws ValidationError when the files do not hash to the manifest value.
ScenarioSet import_scenarios(const std::string& dir);

std::string to_string(DistanceLaw law);

}  // namespace equiloc
