#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

// Inequity indices over per-node outcome vectors. Every index is anonymous
// (permutation invariant) and zero on a constant vector, gini excepted for
// the all-zero case which is defined as 0 and flagged.
namespace equiloc::metrics {

struct OutcomeVector {
  std::vector<double> values;
  std::optional<double> reference_mean;
};

enum class Index {
  kMad,
  kSad,
  kRange,
  kRatioMinMax,
  kVariance,
  kGini,
};

std::string_view to_string(Index index);
Index parse_index(std::string_view name);

double mean(std::span<const double> x);

// Σ|x_i − x̄| with x̄ = reference_mean when given.
double mad(const OutcomeVector& v);
// Σ_i Σ_j |x_i − x_j| over ordered pairs; divide by 2 for the unordered sum.
double sad(std::span<const double> x);
double range_spread(std::span<const double> x);
// min/max; 1 for an all-zero vector. Negative entries are rejected.
double ratio_min_max(std::span<const double> x);
// Population variance (divides by |x|).
double variance(std::span<const double> x);

struct GiniValue {
  double value = 0.0;
  bool zero_total = false;  // Σx = 0, value defined as 0
};
GiniValue gini_detailed(std::span<const double> x);
double gini(std::span<const double> x);

enum class TargetMode { kSumAbs, kMaxAbs };
double deviation_from_target(std::span<const double> x, double target, TargetMode mode);

// Evaluates `index` on `x`, for uniform dispatch in reports and property
// checks. kMad uses the arithmetic mean.
double evaluate(Index index, std::span<const double> x);

// Moves `delta` from the poorer entry `i` to the richer entry `j` and reports
// whether the index did not decrease. Throws ContractError unless
// x_i < x_j and 0 < delta <= x_i, or delta == 0 (no-op transfer).
bool check_pigou_dalton(Index index, std::span<const double> x, std::size_t i,
                        std::size_t j, double delta);

// Every index on one outcome vector.
struct EquityReport {
  double mad = 0.0;
  double sad = 0.0;
  double range = 0.0;
  double ratio_min_max = 0.0;
  double variance = 0.0;
  double gini = 0.0;
  bool gini_zero_total = false;
  double target = 0.0;
  double deviation_sum_abs = 0.0;
  double deviation_max_abs = 0.0;
};
EquityReport equity_report(std::span<const double> x, double target = 0.0);

}  // namespace equiloc::metrics
