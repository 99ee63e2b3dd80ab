#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "equiloc/instance.hpp"
#include "equiloc/metrics.hpp"

namespace equiloc {

enum class Objective {
  kPMedian,
  kPCenter,
  kTotalDistance,
  kEquity1,  // Σ_i Σ_j |z_i − z_j|, unweighted
  kEquity2,  // max_{i,j} |z_i − z_j|, unweighted
  kEquity3,  // as Equity1, demand weighted
  kEquity4,  // as Equity2, demand weighted
  kEquity5,  // max_i Σ_j |z_i − z_j|, unweighted
  kEquity6,  // as Equity5, demand weighted
  kEquity7,  // Σ_i max_j |z_i − z_j|, unweighted
  kEquity8,  // as Equity7, demand weighted
  kLexicographicCenter,
  kOrderedMedian,
};

// The eleven single-objective models of the study, in table order.
std::span<const Objective> table_objectives();

std::string_view to_string(Objective objective);
// Accepts the CLI names: p-median, p-center, total-distance, equity-1 ..
// equity-8, lex-center, ordered-median.
Objective parse_objective(std::string_view name);

enum class Weighting { kUnweighted, kDemandWeighted };
enum class AssignmentRule { kClosest, kFree };

std::string_view to_string(AssignmentRule rule);
AssignmentRule parse_assignment_rule(std::string_view name);

Weighting weighting_for(Objective objective);
bool is_equity(Objective objective);
// True when the objective is nondecreasing in every outcome, which is what
// makes nearest-facility assignment optimal for a single scenario.
bool is_monotone(Objective objective);

struct ModelSpec {
  Objective objective = Objective::kPMedian;
  std::vector<double> ordered_weights;  // OrderedMedian only, one per node
  std::optional<AssignmentRule> assignment_rule;  // unset: solver default
  std::optional<double> beta;                     // min/max >= beta

  // Throws ValidationError when the fields are inconsistent for a problem
  // with `num_nodes` nodes.
  void validate(std::size_t num_nodes) const;
};

// One realisation of demand and travel times.
struct Scenario {
  std::vector<double> demand;
  DistanceMatrix distance;

  bool operator==(const Scenario&) const = default;
};

// Open facility set (sorted, size p) and the facility serving each node.
struct Assignment {
  std::vector<int> open;
  std::vector<int> assign;

  // Checks C1-C3 against `num_nodes` and `p`; throws ContractError.
  void validate(std::size_t num_nodes, int p) const;
  bool operator==(const Assignment&) const = default;
};

// Nodes served by their own site, one facility per node.
Assignment identity_assignment(std::size_t num_nodes);

// z_i = d[i][assign[i]], optionally times w_i.
metrics::OutcomeVector outcomes(const Instance& instance, const Assignment& a,
                                const Scenario& scenario, Weighting weighting);

// Raw objective on an outcome vector, no weighting check. For
// LexicographicCenter this is the worst outcome; OrderedMedian uses the first
// |z| weights.
double objective_on(const ModelSpec& spec, std::span<const double> z);

// Throws ContractError if `weighting` is not the model's outcome definition.
double objective_value(const ModelSpec& spec, const metrics::OutcomeVector& v,
                       Weighting weighting);

// Outcomes sorted in decreasing order, the comparison key of the
// lexicographic minimax model.
std::vector<double> sorted_descending(std::span<const double> z);

bool check_beta_constraint(std::span<const double> z, double beta);

}  // namespace equiloc
