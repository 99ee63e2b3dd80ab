#include "equiloc/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "equiloc/csv.hpp"
#include "equiloc/hash.hpp"

namespace equiloc::report {

namespace {

std::string ints(const std::vector<int>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) s += ' ';
    s += std::to_string(v[k]);
  }
  return s;
}

std::string num(double v) { return std::isnan(v) ? "" : csv::format_double(v); }

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string column_title(const std::string& generator, int n) {
  return generator + (n == 1 ? " DET" : " SAA-" + std::to_string(n));
}

}  // namespace

std::string location_label(const Cell& cell) {
  std::string s;
  const auto& open = cell.open();
  for (std::size_t k = 0; k < open.size(); ++k) {
    if (k) s += ", ";
    const std::string name = k < cell.location_names.size() ? cell.location_names[k] : "?";
    s += name + " (" + std::to_string(open[k] + 1) + ")";
  }
  return s;
}

std::string results_csv(const ResultTable& table) {
  std::ostringstream out;
  out << "model,generator,n,seed,scenario_hash,ok,status,open,locations,objective,assignment,"
         "error\n";
  for (const Cell& c : table.cells) {
    std::string names;
    for (std::size_t k = 0; k < c.location_names.size(); ++k) {
      if (k) names += ';';
      names += c.location_names[k];
    }
    out << csv::quote(c.model) << ',' << csv::quote(c.generator) << ',' << c.n << ',' << c.seed
        << ',' << to_hex(c.scenario_hash) << ',' << (c.ok ? 1 : 0) << ','
        << (c.ok ? to_string(c.status) : "") << ',' << ints(c.open()) << ','
        << csv::quote(names) << ',' << (c.ok ? csv::format_double(c.objective) : "") << ','
        << ints(c.assignment.assign) << ',' << csv::quote(c.error) << '\n';
  }
  return out.str();
}

std::string equity_csv(const ResultTable& table) {
  std::ostringstream out;
  out << "model,generator,n,open,mad,sad,range,ratio_min_max,variance,gini,gini_zero_total,"
         "target,deviation_sum_abs,deviation_max_abs\n";
  for (const Cell& c : table.cells) {
    if (!c.ok) continue;
    const metrics::EquityReport& e = c.equity;
    out << csv::quote(c.model) << ',' << csv::quote(c.generator) << ',' << c.n << ','
        << ints(c.open()) << ',' << num(e.mad) << ',' << num(e.sad) << ',' << num(e.range) << ','
        << num(e.ratio_min_max) << ',' << num(e.variance) << ',' << num(e.gini) << ','
        << (e.gini_zero_total ? 1 : 0) << ',' << num(e.target) << ','
        << num(e.deviation_sum_abs) << ',' << num(e.deviation_max_abs) << '\n';
  }
  return out.str();
}

std::string plotdata_csv(const ConvergenceCurve& curve) {
  std::ostringstream out;
  out << "n,mean_objective,sample_std\n";
  for (const ConvergencePoint& p : curve.points) {
    out << p.n << ',' << num(p.mean_objective) << ',' << num(p.sample_std) << '\n';
  }
  return out.str();
}

std::string plotdata_filename(const ConvergenceCurve& curve) {
  std::string name = "plotdata_" + curve.generator + "_" + curve.model + ".csv";
  for (char& ch : name) {
    if (ch == '/' || ch == '\\' || ch == ' ') ch = '_';
  }
  return name;
}

std::string results_markdown(const ResultTable& table, const DivergenceSummary& summary) {
  std::ostringstream out;
  out << "# Optimal locations\n\n";
  out << "| Model |";
  for (const std::string& g : table.generators) {
    for (int n : table.n_values) out << ' ' << column_title(g, n) << " |";
  }
  out << "\n|---|";
  for (std::size_t k = 0; k < table.generators.size() * table.n_values.size(); ++k) out << "---|";
  out << '\n';
  for (const std::string& m : table.models) {
    out << "| " << m << " |";
    for (const std::string& g : table.generators) {
      for (int n : table.n_values) {
        const Cell* c = table.find(m, g, n);
        if (!c) {
          out << " |";
        } else if (!c->ok) {
          out << " error |";
        } else {
          out << ' ' << location_label(*c) << " |";
        }
      }
    }
    out << '\n';
  }

  out << "\n# Objectives and solve times\n\n";
  out << "| Model | Generator | N | Objective | Status | Wall (ms) |\n|---|---|---|---|---|---|\n";
  for (const Cell& c : table.cells) {
    out << "| " << c.model << " | " << c.generator << " | " << c.n << " | ";
    if (c.ok) {
      out << fixed(c.objective, 4) << " | " << to_string(c.status);
    } else {
      out << "- | " << c.error;
    }
    out << " | " << fixed(c.wall_ms, 1) << " |\n";
  }

  out << "\n# Divergence\n\n";
  out << "| Model | DET vs SAA | vs p-median | vs p-center | across generators |\n"
         "|---|---|---|---|---|\n";
  for (const auto& r : summary.rows) {
    out << "| " << r.model << " | " << r.det_vs_saa << " | " << r.vs_p_median << " | "
        << r.vs_p_center << " | " << r.cross_generator << " |\n";
  }
  out << "\nModels whose optimum moves between the deterministic and sampled columns: "
      << summary.models_with_det_saa_divergence << "\n";
  out << "Model pairs with different optima on the same scenario set: "
      << summary.differing_model_pairs << "\n";
  out << "Models whose optimum depends on the generator: "
      << summary.models_with_cross_generator_divergence << "\n";
  return out.str();
}

}  // namespace equiloc::report
