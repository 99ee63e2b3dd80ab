#include "equiloc/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "equiloc/error.hpp"

namespace equiloc::metrics {

namespace {

void require_nonempty(std::span<const double> x, const char* what) {
  if (x.empty()) throw ValidationError(std::string(what) + ": empty outcome vector");
  for (double v : x) {
    if (!std::isfinite(v)) throw ValidationError(std::string(what) + ": non-finite outcome");
  }
}

void require_nonnegative(std::span<const double> x, const char* what) {
  for (double v : x) {
    if (v < 0.0) throw ValidationError(std::string(what) + ": negative outcome");
  }
}

}  // namespace

std::string_view to_string(Index index) {
  switch (index) {
    case Index::kMad: return "mad";
    case Index::kSad: return "sad";
    case Index::kRange: return "range";
    case Index::kRatioMinMax: return "ratio";
    case Index::kVariance: return "variance";
    case Index::kGini: return "gini";
  }
  return "?";
}

Index parse_index(std::string_view name) {
  for (Index i : {Index::kMad, Index::kSad, Index::kRange, Index::kRatioMinMax,
                  Index::kVariance, Index::kGini}) {
    if (to_string(i) == name) return i;
  }
  throw ValidationError("unknown inequity index '" + std::string(name) + "'");
}

double mean(std::span<const double> x) {
  require_nonempty(x, "mean");
  // Shifted by the first entry so a constant vector has its exact mean.
  const double origin = x[0];
  double s = 0.0;
  for (double v : x) s += v - origin;
  return origin + s / static_cast<double>(x.size());
}

double mad(const OutcomeVector& v) {
  require_nonempty(v.values, "mad");
  const double m = v.reference_mean ? *v.reference_mean : mean(v.values);
  double s = 0.0;
  for (double x : v.values) s += std::abs(x - m);
  return s;
}

double sad(std::span<const double> x) {
  require_nonempty(x, "sad");
  double s = 0.0;
  for (double a : x) {
    for (double b : x) s += std::abs(a - b);
  }
  return s;
}

double range_spread(std::span<const double> x) {
  require_nonempty(x, "range");
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  return *hi - *lo;
}

double ratio_min_max(std::span<const double> x) {
  require_nonempty(x, "ratio");
  require_nonnegative(x, "ratio");
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  if (*hi == 0.0) return 1.0;
  return *lo / *hi;
}

double variance(std::span<const double> x) {
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size());
}

GiniValue gini_detailed(std::span<const double> x) {
  require_nonempty(x, "gini");
  require_nonnegative(x, "gini");
  double total = 0.0;
  for (double v : x) total += v;
  if (total == 0.0) return {0.0, true};
  return {sad(x) / (2.0 * static_cast<double>(x.size()) * total), false};
}

double gini(std::span<const double> x) { return gini_detailed(x).value; }

double deviation_from_target(std::span<const double> x, double target, TargetMode mode) {
  require_nonempty(x, "deviation");
  double acc = 0.0;
  for (double v : x) {
    const double d = std::abs(v - target);
    acc = mode == TargetMode::kSumAbs ? acc + d : std::max(acc, d);
  }
  return acc;
}

double evaluate(Index index, std::span<const double> x) {
  switch (index) {
    case Index::kMad: return mad(OutcomeVector{{x.begin(), x.end()}, std::nullopt});
    case Index::kSad: return sad(x);
    case Index::kRange: return range_spread(x);
    case Index::kRatioMinMax: return ratio_min_max(x);
    case Index::kVariance: return variance(x);
    case Index::kGini: return gini(x);
  }
  throw ValidationError("unknown index");
}

bool check_pigou_dalton(Index index, std::span<const double> x, std::size_t i, std::size_t j,
                        double delta) {
  if (i >= x.size() || j >= x.size() || i == j) {
    throw ContractError("transfer indices must be distinct and in range");
  }
  if (delta != 0.0) {
    if (!(x[i] < x[j])) throw ContractError("transfer source must be the poorer entry");
    if (!(delta > 0.0 && delta <= x[i])) {
      throw ContractError("transfer amount must lie in (0, x_i]");
    }
  }
  std::vector<double> after(x.begin(), x.end());
  after[i] -= delta;
  after[j] += delta;
  return evaluate(index, after) >= evaluate(index, x);
}

EquityReport equity_report(std::span<const double> x, double target) {
  EquityReport r;
  r.mad = mad(OutcomeVector{{x.begin(), x.end()}, std::nullopt});
  r.sad = sad(x);
  r.range = range_spread(x);
  r.ratio_min_max = ratio_min_max(x);
  r.variance = variance(x);
  const GiniValue g = gini_detailed(x);
  r.gini = g.value;
  r.gini_zero_total = g.zero_total;
  r.target = target;
  r.deviation_sum_abs = deviation_from_target(x, target, TargetMode::kSumAbs);
  r.deviation_max_abs = deviation_from_target(x, target, TargetMode::kMaxAbs);
  return r;
}

}  // namespace equiloc::metrics
