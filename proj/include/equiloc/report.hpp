#pragma once

#include <string>

#include "equiloc/experiment.hpp"

namespace equiloc::report {

// Location label as printed in the human tables: "Catasauqua (5)" with a
// 1-based index.
std::string location_label(const Cell& cell);

std::string results_csv(const ResultTable& table);
std::string equity_csv(const ResultTable& table);
std::string plotdata_csv(const ConvergenceCurve& curve);
std::string plotdata_filename(const ConvergenceCurve& curve);
std::string results_markdown(const ResultTable& table, const DivergenceSummary& summary);

}  // namespace equiloc::report
