#include <doctest.h>

#include <cmath>
#include <random>

#include "comte/metrics.hpp"
#include "comte/random.hpp"

using namespace comte;

TEST_CASE("faithfulness examples") {
  auto r = faithfulness({"cpu", "mem"}, {"cpu", "disk", "net"});
  CHECK(r.precision == 0.5);
  CHECK(r.recall == doctest::Approx(1.0 / 3.0));
  auto empty = faithfulness({}, {"cpu"});
  CHECK(empty.precision == 1.0);
  CHECK(empty.recall == 0.0);
  CHECK(faithfulness(std::set<std::string>{"a"}, std::set<std::string>{}).recall == 1.0);
}

TEST_CASE("faithfulness against a logistic model") {
  LogisticModel model{{"n", "p"}, {"a", "b", "c"}, std::vector<double>(33, 0.0)};
  model.weights[11 + 4] = 0.3;  // b::skew
  Explanation e;
  e.metric_names = {"a", "b", "c"};
  const std::size_t idx[] = {1, 2};
  e.mask = SubstitutionMask::from_indices(3, idx);
  auto r = faithfulness(e, model);
  CHECK(r.precision == 0.5);
  CHECK(r.recall == 1.0);
  CHECK(comprehensibility(e) == 2);
}

TEST_CASE("lipschitz robustness") {
  auto schema = make_schema({"a", "b"}, 1);
  MultivariateSample x(schema, {0, 0}, "x");
  std::vector<MultivariateSample> nbrs{MultivariateSample(schema, {3, 4}, "n1"),
                                       MultivariateSample(schema, {0, 0}, "dup"),
                                       MultivariateSample(schema, {1, 0}, "n2")};
  MaskExplainer xi = [](const MultivariateSample& s) {
    SubstitutionMask m(2);
    m.set(0, s.at(0, 0) > 0.5);
    m.set(1, s.at(1, 0) > 0.5);
    return m;
  };
  auto r = lipschitz_robustness(x, xi, nbrs);
  CHECK(r.neighbor_count == 2);
  CHECK(r.lipschitz == doctest::Approx(1.0));  // n2: 1 / 1 beats n1: sqrt2 / 5
  CHECK(r.lipschitz_per_sqrt_m == doctest::Approx(1.0 / std::sqrt(2.0)));
  std::vector<MultivariateSample> only_dup{MultivariateSample(schema, {0, 0}, "dup")};
  try {
    lipschitz_robustness(x, xi, only_dup);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::degenerate_input);
  }
}

TEST_CASE("random masks have the requested size and cover all metrics") {
  std::mt19937_64 rng(1);
  std::vector<int> hits(6);
  for (int i = 0; i < 6000; ++i) {
    auto m = random_mask(6, 2, rng);
    REQUIRE(m.count() == 2);
    for (auto j : m.indices()) ++hits[j];
  }
  for (int h : hits) CHECK(std::abs(h / 6000.0 - 1.0 / 3.0) < 0.03);
  CHECK_THROWS_AS(random_mask(3, 4, rng), Error);
}

TEST_CASE("generalizability") {
  auto schema = make_schema({"a", "b"}, 1);
  ClassifierHandle f({"lo", "hi"}, [](const MultivariateSample& x) {
    const double p = x.at(0, 0) > 0.5 ? 1.0 : 0.0;
    return ClassProbabilities({"lo", "hi"}, {1 - p, p});
  }, true);
  MultivariateSample dist(schema, {1, 0}, "d");
  std::vector<MultivariateSample> cohort{MultivariateSample(schema, {0, 0}, "c1"),
                                         MultivariateSample(schema, {0.2, 1}, "c2")};
  const std::size_t on_a[] = {0};
  const std::size_t on_b[] = {1};
  CHECK(generalizability(SubstitutionMask::from_indices(2, on_a), dist, cohort, f, "hi").ratio == 1.0);
  auto r = generalizability(SubstitutionMask::from_indices(2, on_b), dist, cohort, f, "hi",
                            Execution::serial);
  CHECK(r.ratio == 0.0);
  CHECK(r.cohort_size == 2);
  auto e = generalizability(SubstitutionMask(2), dist, {}, f, "hi");
  CHECK(e.empty_cohort);
  CHECK(e.ratio == 0.0);
}
