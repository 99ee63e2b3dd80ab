#include <doctest.h>

#include <algorithm>
#include <random>

#include "equiloc/error.hpp"
#include "equiloc/metrics.hpp"

using namespace equiloc;
using namespace equiloc::metrics;

namespace {

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double hi) {
  std::uniform_real_distribution<double> u(0.0, hi);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

std::vector<double> random_int_vector(std::mt19937_64& rng, std::size_t n, int hi) {
  std::uniform_int_distribution<int> u(0, hi);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

}  // namespace

TEST_CASE("metric unit values") {
  CHECK(mad(OutcomeVector{{1, 2, 3, 6}, std::nullopt}) == 6.0);
  CHECK(sad(std::vector<double>{1, 2, 4}) == 12.0);
  CHECK(sad(std::vector<double>{0, 10, 20}) == 80.0);
  CHECK(range_spread(std::vector<double>{3, -1, 7}) == 8.0);
  CHECK(variance(std::vector<double>{0, 2}) == 1.0);
  CHECK(gini(std::vector<double>{0, 1}) == 0.5);
  CHECK(gini(std::vector<double>{1, 1, 1, 1, 0}) == 0.2);
  CHECK(ratio_min_max(std::vector<double>{2, 8}) == 0.25);
  CHECK(ratio_min_max(std::vector<double>{0, 0}) == 1.0);
}

TEST_CASE("mad against an external reference mean") {
  CHECK(mad(OutcomeVector{{1, 3}, 0.0}) == 4.0);
  CHECK(mad(OutcomeVector{{1, 3}, std::nullopt}) == 2.0);
}

TEST_CASE("gini with zero total is flagged") {
  const GiniValue g = gini_detailed(std::vector<double>{0, 0, 0});
  CHECK(g.value == 0.0);
  CHECK(g.zero_total);
  CHECK_FALSE(gini_detailed(std::vector<double>{1, 0}).zero_total);
}

TEST_CASE("invalid inputs") {
  CHECK_THROWS_AS(sad(std::vector<double>{}), ValidationError);
  CHECK_THROWS_AS(gini(std::vector<double>{1, -1}), ValidationError);
  CHECK_THROWS_AS(ratio_min_max(std::vector<double>{-1, 2}), ValidationError);
  CHECK_THROWS_AS(variance(std::vector<double>{1, std::nan("")}), ValidationError);
}

TEST_CASE("deviation from target") {
  const std::vector<double> x{1, 3};
  CHECK(deviation_from_target(x, 2, TargetMode::kSumAbs) == 2.0);
  CHECK(deviation_from_target(x, 2, TargetMode::kMaxAbs) == 1.0);
  CHECK(deviation_from_target(std::vector<double>{4, 4}, 4, TargetMode::kSumAbs) == 0.0);
}

TEST_CASE("pigou-dalton helper") {
  CHECK(check_pigou_dalton(Index::kGini, std::vector<double>{2, 4}, 0, 1, 1.0));
  CHECK(check_pigou_dalton(Index::kGini, std::vector<double>{3, 3}, 0, 1, 0.0));
  CHECK_THROWS_AS(check_pigou_dalton(Index::kVariance, std::vector<double>{0, 2}, 0, 1, 1.0),
                  ContractError);
  CHECK_THROWS_AS(check_pigou_dalton(Index::kGini, std::vector<double>{4, 2}, 0, 1, 1.0),
                  ContractError);
}

TEST_CASE("index names round trip") {
  for (Index i : {Index::kMad, Index::kSad, Index::kRange, Index::kRatioMinMax,
                  Index::kVariance, Index::kGini}) {
    CHECK(parse_index(to_string(i)) == i);
  }
  CHECK_THROWS_AS(parse_index("theil"), ValidationError);
}

TEST_CASE("anonymity") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 200; ++t) {
    auto v = random_int_vector(rng, 2 + t % 9, 50);
    auto w = v;
    std::shuffle(w.begin(), w.end(), rng);
    for (Index i : {Index::kMad, Index::kSad, Index::kRange, Index::kRatioMinMax,
                    Index::kVariance, Index::kGini}) {
      CHECK(evaluate(i, v) == doctest::Approx(evaluate(i, w)).epsilon(1e-12));
    }
  }
}

TEST_CASE("zero at equality") {
  for (double c : {0.0, 0.1, 1.0 / 3.0, 7.5, 1e6}) {
    const std::vector<double> v(6, c);
    CHECK(mad(OutcomeVector{v, std::nullopt}) == 0.0);
    CHECK(sad(v) == 0.0);
    CHECK(range_spread(v) == 0.0);
    CHECK(variance(v) == 0.0);
    CHECK(gini(v) == 0.0);
  }
}

TEST_CASE("homogeneity") {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 200; ++t) {
    auto v = random_vector(rng, 2 + t % 7, 100.0);
    auto w = v;
    const double c = 0.5 + t % 5;
    for (double& x : w) x *= c;
    CHECK(sad(w) == doctest::Approx(c * sad(v)).epsilon(1e-12));
    CHECK(mad(OutcomeVector{w, std::nullopt}) ==
          doctest::Approx(c * mad(OutcomeVector{v, std::nullopt})).epsilon(1e-12));
    CHECK(range_spread(w) == doctest::Approx(c * range_spread(v)).epsilon(1e-12));
    CHECK(variance(w) == doctest::Approx(c * c * variance(v)).epsilon(1e-12));
    CHECK(gini(w) == doctest::Approx(gini(v)).epsilon(1e-12));
  }
}

TEST_CASE("sad and gini are consistent") {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 300; ++t) {
    auto v = random_int_vector(rng, 1 + t % 10, 30);
    double total = 0.0;
    for (double x : v) total += x;
    if (total == 0.0) continue;
    const double n = static_cast<double>(v.size());
    CHECK(sad(v) == doctest::Approx(2.0 * n * total * gini(v)).epsilon(1e-12));
  }
}

TEST_CASE("equity report bundles every index") {
  const EquityReport r = equity_report(std::vector<double>{1, 3}, 2.0);
  CHECK(r.mad == 2.0);
  CHECK(r.sad == 4.0);
  CHECK(r.range == 2.0);
  CHECK(r.ratio_min_max == doctest::Approx(1.0 / 3.0));
  CHECK(r.variance == 1.0);
  CHECK(r.gini == 0.25);
  CHECK(r.deviation_sum_abs == 2.0);
  CHECK(r.deviation_max_abs == 1.0);
}
