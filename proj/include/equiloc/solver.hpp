#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "equiloc/instance.hpp"
#include "equiloc/models.hpp"
#include "equiloc/scenarios.hpp"

namespace equiloc {

enum class SolveMethod { kEnumerateExact, kLocalSearch };

std::string_view to_string(SolveMethod method);
SolveMethod parse_solve_method(std::string_view name);

// Upper bound on C(|I|, p) for exact enumeration.
inline constexpr double kMaxEnumeratedSubsets = 1e6;

struct SolveOptions {
  SolveMethod method = SolveMethod::kEnumerateExact;
  std::optional<AssignmentRule> assignment_rule;  // overrides the model's
  std::optional<double> time_limit_seconds;
  unsigned threads = 1;
  // local search only
  int restarts = 4;
  std::uint64_t seed = 0;
};

enum class SolveStatus { kOptimal, kHeuristic, kTimeLimit };
std::string_view to_string(SolveStatus status);

struct Provenance {
  SolveMethod method = SolveMethod::kEnumerateExact;
  AssignmentRule rule = AssignmentRule::kClosest;
  std::uint64_t seed = 0;
  std::uint64_t scenario_hash = 0;
};

struct Solution {
  Assignment assignment;
  double objective = 0.0;
  // Scenario-averaged outcomes under the model's weighting.
  std::vector<double> per_node_outcomes;
  // Lexicographic key (LexicographicCenter only).
  std::vector<double> lex_key;
  ModelSpec model;
  SolveStatus status = SolveStatus::kOptimal;
  Provenance provenance;

  const std::vector<int>& open_set() const { return assignment.open; }
};

// Assignment rule applied when neither the options nor the model set one:
// closest where nearest assignment is provably optimal (p-median and total
// distance always, p-center for a single scenario), free otherwise.
AssignmentRule default_rule(Objective objective, std::size_t num_scenarios);

// Rule `solve` would use for this combination.
AssignmentRule effective_rule(const ModelSpec& spec, const SolveOptions& opts,
                              std::size_t num_scenarios);

// Best assignment of nodes to the given open facilities.
//   closest: each node to the facility with the smallest scenario-averaged
//            outcome, ties to the lowest index.
//   free:    exact branch and bound over all assignments, nodes fixed in
//            decreasing mean demand; ties go to the lexicographically
//            smallest assignment vector.
// Returns nullopt when the beta constraint cannot be met.
std::optional<Assignment> inner_assignment(const ModelSpec& spec,
                                           const std::vector<int>& open,
                                           const ScenarioSet& scen,
                                           const Instance& instance,
                                           AssignmentRule rule);

// Optimises `spec` over the feasible region. Throws ValidationError if exact
// enumeration is requested beyond kMaxEnumeratedSubsets and InfeasibleError
// when no open set satisfies the beta constraint.
Solution solve(const ModelSpec& spec, const Instance& instance, const ScenarioSet& scen,
               const SolveOptions& opts = {});

// Rawlsian refinement of the p-center: minimise the worst outcome, then the
// second worst, and so on.
Solution lexicographic_minimax(const Instance& instance, const ScenarioSet& scen,
                               const SolveOptions& opts = {});

// Recomputes a solution's objective from its assignment.
double reevaluate(const Solution& solution, const Instance& instance,
                  const ScenarioSet& scen);

// Number of p-subsets of n items, as a double to avoid overflow.
double binomial(std::size_t n, std::size_t k);

}  // namespace equiloc
