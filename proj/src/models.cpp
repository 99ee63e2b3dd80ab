#include "equiloc/models.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>

#include "equiloc/error.hpp"

namespace equiloc {

namespace {

constexpr std::array kTableObjectives = {
    Objective::kPMedian, Objective::kPCenter, Objective::kTotalDistance,
    Objective::kEquity1, Objective::kEquity2, Objective::kEquity3,
    Objective::kEquity4, Objective::kEquity5, Objective::kEquity6,
    Objective::kEquity7, Objective::kEquity8,
};

constexpr std::array kAllObjectives = {
    Objective::kPMedian, Objective::kPCenter, Objective::kTotalDistance,
    Objective::kEquity1, Objective::kEquity2, Objective::kEquity3,
    Objective::kEquity4, Objective::kEquity5, Objective::kEquity6,
    Objective::kEquity7, Objective::kEquity8, Objective::kLexicographicCenter,
    Objective::kOrderedMedian,
};

double sum(std::span<const double> z) {
  double s = 0.0;
  for (double v : z) s += v;
  return s;
}

// max_i Σ_j |z_i − z_j|
double max_row_spread(std::span<const double> z) {
  double best = 0.0;
  for (double a : z) {
    double row = 0.0;
    for (double b : z) row += std::abs(a - b);
    best = std::max(best, row);
  }
  return best;
}

// Σ_i max_j |z_i − z_j|; the inner max is attained at the extreme outcomes.
double sum_row_max(std::span<const double> z) {
  const auto [lo, hi] = std::minmax_element(z.begin(), z.end());
  double s = 0.0;
  for (double v : z) s += std::max(*hi - v, v - *lo);
  return s;
}

}  // namespace

std::span<const Objective> table_objectives() { return kTableObjectives; }

std::string_view to_string(Objective objective) {
  switch (objective) {
    case Objective::kPMedian: return "p-median";
    case Objective::kPCenter: return "p-center";
    case Objective::kTotalDistance: return "total-distance";
    case Objective::kEquity1: return "equity-1";
    case Objective::kEquity2: return "equity-2";
    case Objective::kEquity3: return "equity-3";
    case Objective::kEquity4: return "equity-4";
    case Objective::kEquity5: return "equity-5";
    case Objective::kEquity6: return "equity-6";
    case Objective::kEquity7: return "equity-7";
    case Objective::kEquity8: return "equity-8";
    case Objective::kLexicographicCenter: return "lex-center";
    case Objective::kOrderedMedian: return "ordered-median";
  }
  return "?";
}

Objective parse_objective(std::string_view name) {
  for (Objective o : kAllObjectives) {
    if (to_string(o) == name) return o;
  }
  throw ValidationError("unknown model '" + std::string(name) + "'");
}

std::string_view to_string(AssignmentRule rule) {
  return rule == AssignmentRule::kClosest ? "closest" : "free";
}

AssignmentRule parse_assignment_rule(std::string_view name) {
  if (name == "closest") return AssignmentRule::kClosest;
  if (name == "free") return AssignmentRule::kFree;
  throw ValidationError("unknown assignment rule '" + std::string(name) + "'");
}

Weighting weighting_for(Objective objective) {
  switch (objective) {
    case Objective::kPMedian:
    case Objective::kEquity3:
    case Objective::kEquity4:
    case Objective::kEquity6:
    case Objective::kEquity8:
      return Weighting::kDemandWeighted;
    default:
      return Weighting::kUnweighted;
  }
}

bool is_equity(Objective objective) {
  switch (objective) {
    case Objective::kEquity1:
    case Objective::kEquity2:
    case Objective::kEquity3:
    case Objective::kEquity4:
    case Objective::kEquity5:
    case Objective::kEquity6:
    case Objective::kEquity7:
    case Objective::kEquity8:
      return true;
    default:
      return false;
  }
}

bool is_monotone(Objective objective) {
  return !is_equity(objective);
}

void ModelSpec::validate(std::size_t num_nodes) const {
  if (objective == Objective::kOrderedMedian) {
    if (ordered_weights.size() != num_nodes) {
      throw ValidationError("ordered-median needs " + std::to_string(num_nodes) +
                            " weights, got " + std::to_string(ordered_weights.size()));
    }
    for (double w : ordered_weights) {
      if (!std::isfinite(w) || w < 0.0) {
        throw ValidationError("ordered-median weights must be non-negative");
      }
    }
  } else if (!ordered_weights.empty()) {
    throw ValidationError("ordered weights are only meaningful for ordered-median");
  }
  if (beta && !(*beta > 0.0 && *beta <= 1.0)) {
    throw ValidationError("beta must lie in (0, 1]");
  }
}

void Assignment::validate(std::size_t num_nodes, int p) const {
  if (open.size() != static_cast<std::size_t>(p)) {
    throw ContractError("open set has " + std::to_string(open.size()) +
                        " facilities, expected p = " + std::to_string(p));
  }
  std::vector<char> is_open(num_nodes, 0);
  for (int j : open) {
    if (j < 0 || static_cast<std::size_t>(j) >= num_nodes) {
      throw ContractError("facility index out of range");
    }
    if (is_open[j]) throw ContractError("facility opened twice");
    is_open[j] = 1;
  }
  if (assign.size() != num_nodes) {
    throw ContractError("every node must be assigned exactly once");
  }
  for (std::size_t i = 0; i < num_nodes; ++i) {
    const int j = assign[i];
    if (j < 0 || static_cast<std::size_t>(j) >= num_nodes || !is_open[j]) {
      throw ContractError("node " + std::to_string(i) + " assigned to closed facility " +
                          std::to_string(j));
    }
  }
}

Assignment identity_assignment(std::size_t num_nodes) {
  Assignment a;
  for (std::size_t i = 0; i < num_nodes; ++i) {
    a.open.push_back(static_cast<int>(i));
    a.assign.push_back(static_cast<int>(i));
  }
  return a;
}

metrics::OutcomeVector outcomes(const Instance& instance, const Assignment& a,
                                const Scenario& scenario, Weighting weighting) {
  a.validate(instance.size(), instance.p());
  metrics::OutcomeVector v;
  v.values.resize(instance.size());
  for (std::size_t i = 0; i < instance.size(); ++i) {
    const double d = scenario.distance(i, static_cast<std::size_t>(a.assign[i]));
    v.values[i] = weighting == Weighting::kDemandWeighted ? scenario.demand[i] * d : d;
  }
  return v;
}

std::vector<double> sorted_descending(std::span<const double> z) {
  std::vector<double> s(z.begin(), z.end());
  std::sort(s.begin(), s.end(), std::greater<>());
  return s;
}

double objective_on(const ModelSpec& spec, std::span<const double> z) {
  if (z.empty()) return 0.0;
  switch (spec.objective) {
    case Objective::kPMedian:
    case Objective::kTotalDistance:
      return sum(z);
    case Objective::kPCenter:
    case Objective::kLexicographicCenter:
      return *std::max_element(z.begin(), z.end());
    case Objective::kEquity1:
    case Objective::kEquity3:
      return metrics::sad(z);
    case Objective::kEquity2:
    case Objective::kEquity4:
      return metrics::range_spread(z);
    case Objective::kEquity5:
    case Objective::kEquity6:
      return max_row_spread(z);
    case Objective::kEquity7:
    case Objective::kEquity8:
      return sum_row_max(z);
    case Objective::kOrderedMedian: {
      const std::vector<double> s = sorted_descending(z);
      double acc = 0.0;
      for (std::size_t k = 0; k < s.size() && k < spec.ordered_weights.size(); ++k) {
        acc += spec.ordered_weights[k] * s[k];
      }
      return acc;
    }
  }
  return 0.0;
}

double objective_value(const ModelSpec& spec, const metrics::OutcomeVector& v,
                       Weighting weighting) {
  if (weighting != weighting_for(spec.objective)) {
    throw ContractError(std::string(to_string(spec.objective)) +
                        " expects " +
                        (weighting_for(spec.objective) == Weighting::kDemandWeighted
                             ? "demand-weighted"
                             : "unweighted") +
                        " outcomes");
  }
  if (v.values.empty()) throw ValidationError("empty outcome vector");
  return objective_on(spec, v.values);
}

bool check_beta_constraint(std::span<const double> z, double beta) {
  return metrics::ratio_min_max(z) >= beta;
}

}  // namespace equiloc
