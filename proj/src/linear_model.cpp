#include "equiloc/linear_model.hpp"

#include <algorithm>
#include <string>

#include "equiloc/error.hpp"
#include "equiloc/scenarios.hpp"

namespace equiloc {

namespace {

std::string idx(std::initializer_list<std::size_t> parts) {
  std::string s = "[";
  bool first = true;
  for (std::size_t p : parts) {
    if (!first) s += ',';
    s += std::to_string(p);
    first = false;
  }
  return s + "]";
}

}  // namespace

int LinearModel::add_variable(std::string name, VarKind kind, bool binary) {
  variables.push_back(Variable{std::move(name), kind, binary, 0.0});
  return static_cast<int>(variables.size()) - 1;
}

void LinearModel::add_row(std::string name, RowKind kind, std::vector<Term> terms, Sense sense,
                          double rhs) {
  rows.push_back(Row{std::move(name), kind, std::move(terms), sense, rhs});
}

std::size_t LinearModel::count(VarKind kind) const {
  return static_cast<std::size_t>(std::count_if(
      variables.begin(), variables.end(), [&](const Variable& v) { return v.kind == kind; }));
}

std::size_t LinearModel::count(RowKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [&](const Row& r) { return r.kind == kind; }));
}

LinearModel linearized_form(const ModelSpec& spec, const Instance& instance,
                            std::span<const Scenario> scenarios) {
  using VK = LinearModel::VarKind;
  using RK = LinearModel::RowKind;
  using S = LinearModel::Sense;

  if (spec.objective == Objective::kLexicographicCenter) {
    throw UnsupportedError("lex-center is solved sequentially and has no single linear form");
  }
  if (spec.objective == Objective::kOrderedMedian) {
    throw UnsupportedError("ordered-median has no linear form here");
  }
  if (scenarios.empty()) throw ValidationError("linear form needs at least one scenario");
  spec.validate(instance.size());

  const std::size_t n = instance.size();
  const Objective obj = spec.objective;
  const bool weighted = weighting_for(obj) == Weighting::kDemandWeighted;
  LinearModel m;
  m.objective_divisor = static_cast<double>(scenarios.size());

  // (C1)-(C4)
  for (std::size_t j = 0; j < n; ++j) {
    m.facility_vars.push_back(m.add_variable("x" + idx({j}), VK::kFacility, true));
  }
  m.assignment_vars.assign(n, std::vector<int>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      m.assignment_vars[i][j] = m.add_variable("y" + idx({i, j}), VK::kAssignment, true);
    }
  }
  {
    std::vector<LinearModel::Term> terms;
    for (int x : m.facility_vars) terms.push_back({x, 1.0});
    m.add_row("C1", RK::kCardinality, std::move(terms), S::kEqual,
              static_cast<double>(instance.p()));
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<LinearModel::Term> terms;
    for (std::size_t j = 0; j < n; ++j) terms.push_back({m.assignment_vars[i][j], 1.0});
    m.add_row("C2" + idx({i}), RK::kSingleAssignment, std::move(terms), S::kEqual, 1.0);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      m.add_row("C3" + idx({i, j}), RK::kOpenLink,
                {{m.assignment_vars[i][j], 1.0}, {m.facility_vars[j], -1.0}}, S::kLessEqual,
                0.0);
    }
  }

  const bool needs_outcomes = obj != Objective::kPCenter || spec.beta.has_value();
  std::vector<std::vector<int>> z(scenarios.size());

  for (std::size_t s = 0; s < scenarios.size(); ++s) {
    const Scenario& sc = scenarios[s];
    auto coef = [&](std::size_t i, std::size_t j) {
      return weighted ? sc.demand[i] * sc.distance(i, j) : sc.distance(i, j);
    };

    if (needs_outcomes) {
      for (std::size_t i = 0; i < n; ++i) {
        const int zi = m.add_variable("z" + idx({s, i}), VK::kOutcome);
        z[s].push_back(zi);
        std::vector<LinearModel::Term> terms{{zi, 1.0}};
        for (std::size_t j = 0; j < n; ++j) terms.push_back({m.assignment_vars[i][j], -coef(i, j)});
        m.add_row("outcome" + idx({s, i}), RK::kOutcome, std::move(terms), S::kEqual, 0.0);
      }
    }

    // |z_i − z_j| for every ordered pair i != j.
    auto pairwise = [&]() {
      std::vector<std::vector<int>> u(n, std::vector<int>(n, -1));
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          if (i == j) continue;
          u[i][j] = m.add_variable("u" + idx({s, i, j}), VK::kPairwise);
          m.add_row("abs+" + idx({s, i, j}), RK::kAuxiliary,
                    {{u[i][j], 1.0}, {z[s][i], -1.0}, {z[s][j], 1.0}}, S::kGreaterEqual, 0.0);
          m.add_row("abs-" + idx({s, i, j}), RK::kAuxiliary,
                    {{u[i][j], 1.0}, {z[s][j], -1.0}, {z[s][i], 1.0}}, S::kGreaterEqual, 0.0);
        }
      }
      return u;
    };

    switch (obj) {
      case Objective::kPMedian:
      case Objective::kTotalDistance:
        for (std::size_t i = 0; i < n; ++i) m.objective.push_back({z[s][i], 1.0});
        break;
      case Objective::kPCenter: {
        const int t = m.add_variable("t" + idx({s}), VK::kEpigraph);
        for (std::size_t i = 0; i < n; ++i) {
          std::vector<LinearModel::Term> terms{{t, 1.0}};
          if (needs_outcomes) {
            terms.push_back({z[s][i], -1.0});
          } else {
            for (std::size_t j = 0; j < n; ++j) {
              terms.push_back({m.assignment_vars[i][j], -coef(i, j)});
            }
          }
          m.add_row("center" + idx({s, i}), RK::kAuxiliary, std::move(terms), S::kGreaterEqual,
                    0.0);
        }
        m.objective.push_back({t, 1.0});
        break;
      }
      case Objective::kEquity1:
      case Objective::kEquity3: {
        const auto u = pairwise();
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t j = 0; j < n; ++j) {
            if (i != j) m.objective.push_back({u[i][j], 1.0});
          }
        }
        break;
      }
      case Objective::kEquity2:
      case Objective::kEquity4: {
        const int t = m.add_variable("t" + idx({s}), VK::kEpigraph);
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            m.add_row("spread" + idx({s, i, j}), RK::kAuxiliary,
                      {{t, 1.0}, {z[s][i], -1.0}, {z[s][j], 1.0}}, S::kGreaterEqual, 0.0);
          }
        }
        m.objective.push_back({t, 1.0});
        break;
      }
      case Objective::kEquity5:
      case Objective::kEquity6: {
        const auto u = pairwise();
        const int t = m.add_variable("t" + idx({s}), VK::kEpigraph);
        for (std::size_t i = 0; i < n; ++i) {
          std::vector<LinearModel::Term> terms{{t, 1.0}};
          for (std::size_t j = 0; j < n; ++j) {
            if (i != j) terms.push_back({u[i][j], -1.0});
          }
          m.add_row("rowsum" + idx({s, i}), RK::kAuxiliary, std::move(terms), S::kGreaterEqual,
                    0.0);
        }
        m.objective.push_back({t, 1.0});
        break;
      }
      case Objective::kEquity7:
      case Objective::kEquity8: {
        const auto u = pairwise();
        for (std::size_t i = 0; i < n; ++i) {
          const int si = m.add_variable("s" + idx({s, i}), VK::kEpigraph);
          for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            m.add_row("rowmax" + idx({s, i, j}), RK::kAuxiliary, {{si, 1.0}, {u[i][j], -1.0}},
                      S::kGreaterEqual, 0.0);
          }
          m.objective.push_back({si, 1.0});
        }
        break;
      }
      case Objective::kLexicographicCenter:
      case Objective::kOrderedMedian:
        break;
    }
  }

  // min_i z̄_i >= beta max_k z̄_k, written pairwise on scenario sums.
  if (spec.beta) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < n; ++k) {
        if (i == k) continue;
        std::vector<LinearModel::Term> terms;
        for (std::size_t s = 0; s < scenarios.size(); ++s) terms.push_back({z[s][i], 1.0});
        for (std::size_t s = 0; s < scenarios.size(); ++s) {
          terms.push_back({z[s][k], -*spec.beta});
        }
        m.add_row("beta" + idx({i, k}), RK::kBeta, std::move(terms), S::kGreaterEqual, 0.0);
      }
    }
  }
  return m;
}

LinearModel linearized_form(const ModelSpec& spec, const Instance& instance,
                            const ScenarioSet& scenarios) {
  return linearized_form(spec, instance, std::span<const Scenario>(scenarios.scenarios()));
}

}  // namespace equiloc
