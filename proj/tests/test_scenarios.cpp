#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "equiloc/error.hpp"
#include "equiloc/rng.hpp"
#include "equiloc/scenarios.hpp"
#include "oracles.hpp"

using namespace equiloc;

namespace {

std::string temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("equiloc_test_" + name);
  std::filesystem::remove_all(dir);
  return dir.string();
}

}  // namespace

TEST_CASE("philox known answers") {
  using C = Philox4x32::Counter;
  CHECK(Philox4x32(Philox4x32::Key{0, 0})(C{0, 0, 0, 0}) ==
        C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(Philox4x32(Philox4x32::Key{0xffffffff, 0xffffffff})(
            C{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}) ==
        C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(Philox4x32(Philox4x32::Key{0xa4093822, 0x299f31d0})(
            C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}) ==
        C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("uniforms and normals") {
  const Philox4x32 rng(42);
  double sum = 0.0, sq = 0.0;
  const int n = 20000;
  for (int k = 0; k < n; ++k) {
    const auto u = rng.uniforms({static_cast<std::uint32_t>(k), 0, 0, 0});
    CHECK(u[0] >= 0.0);
    CHECK(u[0] < 1.0);
    const double z = rng.normal({static_cast<std::uint32_t>(k), 1, 0, 0});
    sum += z;
    sq += z * z;
  }
  CHECK(std::abs(sum / n) < 0.05);
  CHECK(std::abs(sq / n - 1.0) < 0.05);
}

TEST_CASE("lognormal parameters") {
  auto p = lognormal_from_mean_std(1.0, 0.0);
  CHECK(p.location == 0.0);
  CHECK(p.shape == 0.0);
  const double std_unit_shape = std::sqrt(std::exp(1.0) - 1.0) * std::exp(0.5);
  p = lognormal_from_mean_std(std::exp(0.5), std_unit_shape);
  CHECK(p.shape == doctest::Approx(1.0));
  CHECK(p.location == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_THROWS_AS(lognormal_from_mean_std(0.0, 1.0), ValidationError);
  CHECK_THROWS_AS(lognormal_from_mean_std(-1.0, 1.0), ValidationError);
}

TEST_CASE("lognormal sample mean") {
  // Demand of a single node drawn 1e6 times.
  const auto inst = oracle::instance_from({{0, 1}, {1, 0}}, 1, {409.0, 1.0});
  DemandProfile prof{{409.0, 1.0}, {204.5, 0.0}};
  const Instance with_std(oracle::plain_nodes(2), inst.distance(), prof, 1);
  GeneratorSpec g = set1(1000000, 99);
  g.delta_minutes = 0.0;
  // the 2-node matrix keeps this cheap
  const ScenarioSet s = sample(with_std, g);
  double sum = 0.0;
  for (const Scenario& sc : s.scenarios()) sum += sc.demand[0];
  CHECK(std::abs(sum / 1e6 - 409.0) < 0.01 * 409.0);
}

TEST_CASE("degenerate generator reproduces the instance") {
  const Instance inst = lehigh_instance(1, 1000.0, 0.0);
  GeneratorSpec g = set1(1, 3);
  g.delta_minutes = 0.0;
  const ScenarioSet s = sample(inst, g);
  REQUIRE(s.size() == 1);
  CHECK(s[0].distance == inst.distance());
  CHECK(s[0].demand == inst.demand_mean());
  CHECK(s.clamped_draws() == 0);
}

TEST_CASE("determinism and prefix stability") {
  const Instance inst = lehigh_instance();
  const ScenarioSet a = sample(inst, set1(50, 7));
  const ScenarioSet b = sample(inst, set1(50, 7));
  CHECK(a == b);
  CHECK(a.content_hash() == b.content_hash());
  const ScenarioSet c = sample(inst, set1(60, 7));
  for (std::size_t s = 0; s < 50; ++s) CHECK(c[s].distance == a[s].distance);
  CHECK(sample(inst, set1(50, 8)).content_hash() != a.content_hash());
  CHECK(sample(inst, set2(50, 7)).content_hash() != a.content_hash());
}

TEST_CASE("set 1 travel times stay within the window") {
  const Instance inst = lehigh_instance();
  const ScenarioSet s = sample(inst, set1(50, 1));
  std::size_t clamped = 0;
  for (const Scenario& sc : s.scenarios()) {
    for (std::size_t i = 0; i < inst.size(); ++i) {
      CHECK(sc.demand[i] >= 0.0);
      for (std::size_t j = 0; j < inst.size(); ++j) {
        const double v = sc.distance(i, j);
        if (i == j) {
          CHECK(v == 0.0);
        } else if (v == kMinTravelMinutes && inst.distance(i, j) - 10.0 < kMinTravelMinutes) {
          ++clamped;
        } else {
          CHECK(v >= inst.distance(i, j) - 10.0);
          CHECK(v <= inst.distance(i, j) + 10.0);
        }
      }
    }
  }
  CHECK(clamped == s.clamped_draws());
}

TEST_CASE("set 1 statistical sanity") {
  const Instance inst = lehigh_instance();
  const ScenarioSet s = sample(inst, set1(10000, 2));
  std::size_t checked = 0;
  for (std::size_t i = 0; i < inst.size(); ++i) {
    for (std::size_t j = 0; j < inst.size(); ++j) {
      if (i == j || inst.distance(i, j) < 10.0 + kMinTravelMinutes) continue;
      double sum = 0.0;
      for (const Scenario& sc : s.scenarios()) sum += sc.distance(i, j);
      const double se = 20.0 / std::sqrt(12.0) / std::sqrt(10000.0);
      CHECK(std::abs(sum / 10000.0 - inst.distance(i, j)) < 3.0 * se * 1.5);
      ++checked;
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("lognormal travel time needs a positive mean") {
  auto d = std::vector<std::vector<double>>{{0, 0, 2}, {1, 0, 2}, {2, 2, 0}};
  const Instance inst = oracle::instance_from(d, 1);
  try {
    sample(inst, set2(2, 1));
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("(0,1)") != std::string::npos);
  }
  CHECK_NOTHROW(sample(inst, set1(2, 1)));
}

TEST_CASE("generator validation") {
  GeneratorSpec g = set1(0, 1);
  CHECK_THROWS_AS(g.validate(), ValidationError);
  g = set1(1, 1);
  g.delta_minutes = -1.0;
  CHECK_THROWS_AS(g.validate(), ValidationError);
}

TEST_CASE("sample average") {
  const Instance inst = oracle::instance_from({{0, 4}, {6, 0}}, 1);
  std::vector<Scenario> sc(2);
  sc[0] = Scenario{{1, 1}, DistanceMatrix::from_rows({{0, 4}, {4, 0}})};
  sc[1] = Scenario{{1, 1}, DistanceMatrix::from_rows({{0, 6}, {6, 0}})};
  const ScenarioSet set(sc, set1(2, 0), inst.fingerprint());
  const Assignment a{{0}, {0, 0}};
  CHECK(saa_objective(ModelSpec{Objective::kPCenter, {}, {}, {}}, a, set, inst) == 5.0);
  CHECK(mean_outcomes(ModelSpec{Objective::kPCenter, {}, {}, {}}, a, set, inst) ==
        std::vector<double>{0, 5});
  CHECK(lexicographic_key(a, set, inst) == std::vector<double>{5, 0});
  const ScenarioSet empty({}, set1(1, 0), inst.fingerprint());
  CHECK_THROWS_AS(saa_objective(ModelSpec{}, a, empty, inst), ValidationError);
}

TEST_CASE("scenario set rejects invalid data") {
  const Instance inst = oracle::instance_from({{0, 4}, {6, 0}}, 1);
  std::vector<Scenario> sc{Scenario{{1, -1}, DistanceMatrix::from_rows({{0, 4}, {4, 0}})}};
  CHECK_THROWS_AS(ScenarioSet(sc, set1(1, 0), inst.fingerprint()), ValidationError);
  sc[0] = Scenario{{1, 1}, DistanceMatrix::from_rows({{1, 4}, {4, 0}})};
  CHECK_THROWS_AS(ScenarioSet(sc, set1(1, 0), inst.fingerprint()), ValidationError);
}

TEST_CASE("export and import") {
  const Instance inst = lehigh_instance();
  const ScenarioSet s = sample(inst, set2(4, 11));
  const std::string dir = temp_dir("bundle");
  export_scenarios(s, dir);
  const ScenarioSet back = import_scenarios(dir);
  CHECK(back == s);
  CHECK(back.content_hash() == s.content_hash());

  {
    std::ifstream in(dir + "/scenario_0001.csv");
    std::string first;
    std::getline(in, first);
    std::string rest((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    first[0] = first[0] == '1' ? '2' : '1';
    std::ofstream out(dir + "/scenario_0001.csv");
    out << first << '\n' << rest;
  }
  CHECK_THROWS_AS(import_scenarios(dir), ValidationError);
}

TEST_CASE("saa variance shrinks with N") {
  const Instance inst = lehigh_instance();
  const Assignment a{{4}, std::vector<int>(21, 4)};
  const ModelSpec m{Objective::kPMedian, {}, {}, {}};
  auto spread = [&](int n) {
    std::vector<double> v;
    for (int r = 0; r < 30; ++r) v.push_back(saa_objective(m, a, sample(inst, set1(n, 1000 + r)), inst));
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= v.size();
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return ss / (v.size() - 1);
  };
  CHECK(spread(200) < spread(50));
}
