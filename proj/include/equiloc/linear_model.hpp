#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "equiloc/models.hpp"

namespace equiloc {

class ScenarioSet;

// Symbolic mixed-integer linear model of a location objective. It is only
// used to check that the solver's direct evaluation optimises the same
// problem as the textbook linearisation.
struct LinearModel {
  enum class VarKind { kFacility, kAssignment, kOutcome, kPairwise, kEpigraph };
  enum class Sense { kLessEqual, kEqual, kGreaterEqual };
  enum class RowKind { kCardinality, kSingleAssignment, kOpenLink, kOutcome, kAuxiliary, kBeta };

  struct Variable {
    std::string name;
    VarKind kind;
    bool binary = false;
    double lower = 0.0;
  };
  struct Term {
    int var;
    double coef;
  };
  struct Row {
    std::string name;
    RowKind kind;
    std::vector<Term> terms;
    Sense sense;
    double rhs;
  };

  std::vector<Variable> variables;
  std::vector<Row> rows;
  std::vector<Term> objective;
  // Objective = (Σ coef·var) / divisor. Sample averages keep integer
  // coefficients and divide once, so the value is computed in the same order
  // as the direct evaluation.
  double objective_divisor = 1.0;

  int add_variable(std::string name, VarKind kind, bool binary = false);
  void add_row(std::string name, RowKind kind, std::vector<Term> terms, Sense sense,
               double rhs);

  std::size_t count(VarKind kind) const;
  std::size_t count(RowKind kind) const;

  // Indices of x_j and y_{i,j}, for callers that enumerate integer points.
  std::vector<int> facility_vars;
  std::vector<std::vector<int>> assignment_vars;
};

// Emits the linearised model over all scenarios (shared x, y; per-scenario
// outcome and auxiliary variables). Supports the eleven table objectives and
// the beta constraint; throws UnsupportedError for LexicographicCenter and
// OrderedMedian.
LinearModel linearized_form(const ModelSpec& spec, const Instance& instance,
                            std::span<const Scenario> scenarios);
LinearModel linearized_form(const ModelSpec& spec, const Instance& instance,
                            const ScenarioSet& scenarios);

}  // namespace equiloc
