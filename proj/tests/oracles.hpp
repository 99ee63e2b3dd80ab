// Independent reference implementations used by the unit and acceptance
// tests. Everything here is deliberately naive.
#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "equiloc/instance.hpp"
#include "equiloc/linear_model.hpp"
#include "equiloc/models.hpp"
#include "equiloc/scenarios.hpp"

namespace oracle {

using namespace equiloc;

inline std::vector<Node> plain_nodes(std::size_t n) {
  std::vector<Node> nodes;
  for (std::size_t i = 0; i < n; ++i) {
    nodes.push_back(Node{static_cast<int>(i), "n" + std::to_string(i), 1, std::nullopt});
  }
  return nodes;
}

inline Instance instance_from(const std::vector<std::vector<double>>& d, int p,
                              std::vector<double> demand = {}) {
  if (demand.empty()) demand.assign(d.size(), 1.0);
  DemandProfile profile{demand, std::vector<double>(d.size(), 0.0)};
  return Instance(plain_nodes(d.size()), DistanceMatrix::from_rows(d), profile, p);
}

// Integer-valued data keeps every sum exact, so oracle and solver results can
// be compared with ==.
inline std::vector<std::vector<double>> random_matrix(std::mt19937_64& rng, std::size_t n,
                                                      int max_d) {
  std::uniform_int_distribution<int> dist(1, max_d);
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) d[i][j] = dist(rng);
    }
  }
  return d;
}

struct RandomCase {
  Instance instance;
  ScenarioSet scenarios;
};

inline RandomCase random_case(std::mt19937_64& rng, std::size_t n, int p, std::size_t num_scen,
                              int max_d = 20) {
  std::uniform_int_distribution<int> wdist(1, 9);
  std::vector<double> mean_demand(n);
  for (double& w : mean_demand) w = wdist(rng);
  Instance inst = instance_from(random_matrix(rng, n, max_d), p, mean_demand);
  std::vector<Scenario> scen;
  for (std::size_t s = 0; s < num_scen; ++s) {
    Scenario sc;
    sc.distance = DistanceMatrix::from_rows(random_matrix(rng, n, max_d));
    for (std::size_t i = 0; i < n; ++i) sc.demand.push_back(wdist(rng));
    scen.push_back(std::move(sc));
  }
  GeneratorSpec gen;
  gen.name = "test";
  gen.n = static_cast<int>(num_scen);
  ScenarioSet set(std::move(scen), gen, inst.fingerprint());
  return {std::move(inst), std::move(set)};
}

inline bool weighted(Objective o) {
  return o == Objective::kPMedian || o == Objective::kEquity3 || o == Objective::kEquity4 ||
         o == Objective::kEquity6 || o == Objective::kEquity8;
}

// Table definitions, written out as double sums.
inline double naive_objective(const ModelSpec& spec, const std::vector<double>& z) {
  const std::size_t n = z.size();
  double v = 0.0;
  switch (spec.objective) {
    case Objective::kPMedian:
    case Objective::kTotalDistance:
      for (double x : z) v += x;
      return v;
    case Objective::kPCenter:
    case Objective::kLexicographicCenter:
      for (double x : z) v = std::max(v, x);
      return v;
    case Objective::kEquity1:
    case Objective::kEquity3:
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) v += std::abs(z[i] - z[j]);
      }
      return v;
    case Objective::kEquity2:
    case Objective::kEquity4:
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) v = std::max(v, std::abs(z[i] - z[j]));
      }
      return v;
    case Objective::kEquity5:
    case Objective::kEquity6:
      for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) row += std::abs(z[i] - z[j]);
        v = std::max(v, row);
      }
      return v;
    case Objective::kEquity7:
    case Objective::kEquity8:
      for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) row = std::max(row, std::abs(z[i] - z[j]));
        v += row;
      }
      return v;
    case Objective::kOrderedMedian: {
      std::vector<double> s = z;
      std::sort(s.begin(), s.end(), std::greater<>());
      for (std::size_t k = 0; k < n; ++k) v += spec.ordered_weights[k] * s[k];
      return v;
    }
  }
  return v;
}

struct BruteResult {
  bool feasible = false;
  double objective = std::numeric_limits<double>::infinity();
  std::vector<double> key;
  std::vector<int> open;
  std::vector<int> assign;
};

// Every open set of size p and every map of nodes onto it.
inline BruteResult brute_force(const ModelSpec& spec, const Instance& inst,
                               const ScenarioSet& scen) {
  const std::size_t n = inst.size();
  const int p = inst.p();
  const double count = static_cast<double>(scen.size());
  const bool lex = spec.objective == Objective::kLexicographicCenter;
  BruteResult best;
  std::vector<double> z(n), zbar(n), key(n);
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) != p) continue;
    std::vector<int> open;
    for (std::size_t j = 0; j < n; ++j) {
      if (mask & (1u << j)) open.push_back(static_cast<int>(j));
    }
    std::vector<int> pick(n, 0);
    while (true) {
      double total = 0.0;
      std::fill(zbar.begin(), zbar.end(), 0.0);
      std::fill(key.begin(), key.end(), 0.0);
      for (std::size_t s = 0; s < scen.size(); ++s) {
        for (std::size_t i = 0; i < n; ++i) {
          const double d = scen[s].distance(i, static_cast<std::size_t>(open[pick[i]]));
          z[i] = weighted(spec.objective) ? scen[s].demand[i] * d : d;
          zbar[i] += z[i];
        }
        total += naive_objective(spec, z);
        if (lex) {
          std::vector<double> sorted = z;
          std::sort(sorted.begin(), sorted.end(), std::greater<>());
          for (std::size_t k = 0; k < n; ++k) key[k] += sorted[k];
        }
      }
      bool ok = true;
      if (spec.beta) {
        for (double& v : zbar) v /= count;
        const double lo = *std::min_element(zbar.begin(), zbar.end());
        const double hi = *std::max_element(zbar.begin(), zbar.end());
        ok = hi == 0.0 || lo / hi >= *spec.beta;
      }
      if (ok) {
        const double obj = total / count;
        bool better;
        if (lex) {
          for (double& v : key) v /= count;
          better = !best.feasible || key < best.key;
        } else {
          better = obj < best.objective;
        }
        if (better) {
          best.feasible = true;
          best.objective = obj;
          best.key = key;
          best.open = open;
          best.assign.assign(n, 0);
          for (std::size_t i = 0; i < n; ++i) best.assign[i] = open[pick[i]];
        }
      }
      std::size_t i = 0;
      while (i < n && ++pick[i] == p) pick[i++] = 0;
      if (i == n) break;
    }
  }
  return best;
}

// For each continuous variable, the rows in which it is the last-declared
// continuous variable; those rows bound it once earlier variables are fixed.
inline std::vector<std::vector<std::size_t>> defining_rows(const LinearModel& m) {
  using VK = LinearModel::VarKind;
  std::vector<std::vector<std::size_t>> rows_of(m.variables.size());
  for (std::size_t r = 0; r < m.rows.size(); ++r) {
    int top = -1;
    for (const auto& t : m.rows[r].terms) {
      const auto kind = m.variables[t.var].kind;
      if (kind != VK::kFacility && kind != VK::kAssignment) top = std::max(top, t.var);
    }
    if (top >= 0) rows_of[top].push_back(r);
  }
  return rows_of;
}

// Value of the linear form at an integer point (x, y): each continuous
// variable, in declaration order, takes the smallest value its rows allow
// given the variables fixed before it. Returns nullopt if a row is violated.
inline std::optional<double> linear_value_at(const LinearModel& m, std::vector<double>& val,
                                             const std::vector<std::vector<std::size_t>>& rows_of) {
  using VK = LinearModel::VarKind;
  using S = LinearModel::Sense;
  for (std::size_t v = 0; v < m.variables.size(); ++v) {
    const auto kind = m.variables[v].kind;
    if (kind == VK::kFacility || kind == VK::kAssignment) continue;
    double lo = m.variables[v].lower;
    for (std::size_t r : rows_of[v]) {
      const auto& row = m.rows[r];
      double rest = 0.0, coef = 0.0;
      for (const auto& t : row.terms) {
        if (t.var == static_cast<int>(v)) {
          coef += t.coef;
        } else {
          rest += t.coef * val[t.var];
        }
      }
      if (coef <= 0.0) continue;
      const double bound = (row.rhs - rest) / coef;
      if (row.sense == S::kEqual) {
        lo = bound;
        break;
      }
      if (row.sense == S::kGreaterEqual) lo = std::max(lo, bound);
    }
    val[v] = lo;
  }
  for (const auto& row : m.rows) {
    double lhs = 0.0;
    for (const auto& t : row.terms) lhs += t.coef * val[t.var];
    const bool ok = row.sense == S::kEqual          ? lhs == row.rhs
                    : row.sense == S::kLessEqual    ? lhs <= row.rhs
                                                    : lhs >= row.rhs;
    if (!ok) return std::nullopt;
  }
  double obj = 0.0;
  for (const auto& t : m.objective) obj += t.coef * val[t.var];
  return obj / m.objective_divisor;
}

inline std::optional<double> linear_value_at(const LinearModel& m, std::vector<double> val) {
  return linear_value_at(m, val, defining_rows(m));
}

// Minimum of the linear form over its integer points. x ranges over all
// 0/1 vectors and each node is routed to one facility with x_j = 1; the
// rows themselves reject anything outside the feasible region.
inline std::optional<double> linear_optimum(const LinearModel& m) {
  const std::size_t n = m.facility_vars.size();
  std::optional<double> best;
  std::vector<double> val(m.variables.size(), 0.0);
  const auto rows_of = defining_rows(m);
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    std::vector<std::size_t> open;
    for (std::size_t j = 0; j < n; ++j) {
      val[m.facility_vars[j]] = (mask >> j) & 1u;
      if ((mask >> j) & 1u) open.push_back(j);
    }
    if (open.empty()) continue;
    // The cardinality row depends on x alone; checking it first only skips
    // points the full row check would reject.
    bool card_ok = true;
    for (const auto& row : m.rows) {
      if (row.kind != LinearModel::RowKind::kCardinality) continue;
      double lhs = 0.0;
      for (const auto& t : row.terms) lhs += t.coef * val[t.var];
      card_ok = card_ok && lhs == row.rhs;
    }
    if (!card_ok) continue;
    std::vector<std::size_t> pick(n, 0);
    while (true) {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) val[m.assignment_vars[i][j]] = 0.0;
        val[m.assignment_vars[i][open[pick[i]]]] = 1.0;
      }
      const auto v = linear_value_at(m, val, rows_of);
      if (v && (!best || *v < *best)) best = v;
      std::size_t i = 0;
      while (i < n && ++pick[i] == open.size()) pick[i++] = 0;
      if (i == n) break;
    }
  }
  return best;
}

}  // namespace oracle
