#include <doctest.h>

#include <functional>
#include <map>
#include <random>

#include "comte/random.hpp"
#include "comte/search.hpp"
#include "comte/setcover.hpp"
#include "oracles.hpp"

using namespace comte;

namespace {

// Binary m x 1 samples; P("pos") read from a table indexed by the bit pattern (bit j = 2^j).
ClassifierHandle table_classifier(std::vector<double> table, bool concurrent = true) {
  return ClassifierHandle({"neg", "pos"}, [table](const MultivariateSample& x) {
    std::size_t key = 0;
    for (std::size_t j = 0; j < x.metrics(); ++j)
      if (x.at(j, 0) != 0.0) key |= std::size_t{1} << j;
    return ClassProbabilities({"neg", "pos"}, {1.0 - table[key], table[key]});
  }, concurrent);
}

MultivariateSample bits(const SchemaPtr& schema, std::vector<double> v, std::string id,
                        std::optional<std::string> label = std::nullopt) {
  return MultivariateSample(schema, std::move(v), std::move(id), std::move(label));
}

std::size_t mask_key(const SubstitutionMask& m) {
  std::size_t k = 0;
  for (std::size_t j : m.indices()) k |= std::size_t{1} << j;
  return k;
}

}  // namespace

TEST_CASE("greedy on a small set-cover forest") {
  SetCoverForest forest{4, {{0, 1}, {2}, {1, 3}}};
  auto f = make_setcover_classifier(forest);
  auto schema = setcover_schema(4);
  auto zeros = setcover_sample(schema, SubstitutionMask(4), "z");
  auto ones = setcover_sample(schema, SubstitutionMask::all(4), "o");
  MaskObjective obj(zeros, ones, f, 1);
  auto mask = greedy_search(obj, 1.0);
  CHECK(mask.indices() == std::vector<std::size_t>{1, 2});
  // one start evaluation, then 4 and 3 candidates
  CHECK(obj.evaluations() == 8);

  MaskObjective par(zeros, ones, f, 1);
  CHECK(greedy_search(par, 1.0, Execution::parallel) == mask);
}

TEST_CASE("greedy accepts a step that lowers the probability") {
  auto schema = make_schema({"a", "b"}, 1);
  auto f = table_classifier({0.5, 0.4, 0.3, 1.0});
  auto x = bits(schema, {0, 0}, "x");
  auto d = bits(schema, {1, 1}, "d");
  MaskObjective obj(x, d, f, 1);
  CHECK(greedy_search(obj, 0.95).to_string() == "11");
}

TEST_CASE("greedy breaks ties to the lowest index") {
  auto schema = make_schema({"a", "b", "c"}, 1);
  std::vector<double> table(8, 1.0);
  table[0] = 0.0;
  auto f = table_classifier(table);
  auto x = bits(schema, {0, 0, 0}, "x");
  auto d = bits(schema, {1, 1, 1}, "d");
  MaskObjective obj(x, d, f, 1);
  CHECK(greedy_search(obj, 0.95).to_string() == "100");
}

TEST_CASE("greedy reports a distractor below the target") {
  auto schema = make_schema({"a", "b"}, 1);
  auto f = table_classifier({0.1, 0.2, 0.2, 0.6});
  auto x = bits(schema, {0, 0}, "x");
  auto d = bits(schema, {1, 1}, "d");
  MaskObjective obj(x, d, f, 1);
  try {
    greedy_search(obj, 0.95);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::distractor_below_target);
  }
}

TEST_CASE("greedy result reaches tau and is never smaller than the optimum") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    auto forest = random_setcover_forest(rng, 2, 10, 6);
    auto f = make_setcover_classifier(forest);
    auto schema = setcover_schema(forest.universe_size);
    auto zeros = setcover_sample(schema, SubstitutionMask(forest.universe_size), "z");
    auto ones = setcover_sample(schema, SubstitutionMask::all(forest.universe_size), "o");
    MaskObjective obj(zeros, ones, f, 1);
    auto mask = greedy_search(obj, 1.0);
    CHECK(forest.is_hitting_set(mask));
    auto opt = oracle::min_size_reaching(forest.universe_size, 1.0,
                                         [&](const SubstitutionMask& a) { return obj.probability(a); });
    REQUIRE(opt.has_value());
    CHECK(mask.count() >= *opt);
    CHECK(obj.probability(prune_mask(obj, mask, 1.0)) == 1.0);
  }
}

TEST_CASE("random neighbor flips one uniformly chosen bit") {
  std::mt19937_64 rng(123);
  SubstitutionMask base(4);
  base.set(2);
  std::array<int, 4> counts{};
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    auto n = random_neighbor(base, rng);
    std::size_t diff = 0, where = 0;
    for (std::size_t j = 0; j < 4; ++j)
      if (n.test(j) != base.test(j)) ++diff, where = j;
    REQUIRE(diff == 1);
    ++counts[where];
  }
  for (int c : counts) CHECK(std::abs(c / double(draws) - 0.25) <= 0.02);
}

TEST_CASE("hill climbing is deterministic and respects its budget") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    auto forest = random_setcover_forest(rng, 3, 12, 6);
    auto f = make_setcover_classifier(forest);
    auto schema = setcover_schema(forest.universe_size);
    auto zeros = setcover_sample(schema, SubstitutionMask(forest.universe_size), "z");
    auto ones = setcover_sample(schema, SubstitutionMask::all(forest.universe_size), "o");
    SearchConfig cfg;
    cfg.rng_seed = 1000 + trial;
    cfg.num_restarts = 3;
    cfg.max_iters = 40;
    cfg.max_attempts = 10;
    cfg.delta = 0;
    MaskObjective a(zeros, ones, f, 1), b(zeros, ones, f, 1);
    auto ma = hill_climb(a, cfg, 1.0);
    auto mb = hill_climb(b, cfg, 1.0);
    CHECK(ma == mb);
    CHECK(a.evaluations() == b.evaluations());
    CHECK(a.evaluations() <= cfg.num_restarts * (cfg.max_iters + 1));
  }
}

TEST_CASE("hill climbing finds a zero-loss mask when one is easy") {
  auto schema = make_schema({"a", "b", "c", "d"}, 1);
  std::vector<double> table(16);
  for (std::size_t k = 0; k < 16; ++k) table[k] = (k & 1u) ? 1.0 : 0.0;
  auto f = table_classifier(table);
  auto x = bits(schema, {0, 0, 0, 0}, "x");
  auto d = bits(schema, {1, 1, 1, 1}, "d");
  MaskObjective obj(x, d, f, 1);
  SearchConfig cfg;
  auto mask = prune_mask(obj, hill_climb(obj, cfg, 0.95), 0.95);
  CHECK(mask.to_string() == "1000");
}

TEST_CASE("pruning leaves an irreducible mask") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t m = 5;
    std::vector<double> table(32);
    for (auto& p : table) p = uniform01(rng);
    table[31] = 1.0;
    auto schema = make_schema({"a", "b", "c", "d", "e"}, 1);
    auto f = table_classifier(table);
    auto x = bits(schema, {0, 0, 0, 0, 0}, "x");
    auto d = bits(schema, {1, 1, 1, 1, 1}, "d");
    MaskObjective obj(x, d, f, 1);
    auto pruned = prune_mask(obj, SubstitutionMask::all(m), 0.95);
    REQUIRE(table[mask_key(pruned)] >= 0.95);
    for (std::size_t j : pruned.indices()) CHECK(table[mask_key(pruned.flipped(j))] < 0.95);
  }
}

TEST_CASE("explain prefers a farther distractor with a smaller explanation") {
  auto schema = make_schema({"a", "b", "c", "d"}, 1);
  auto f = ClassifierHandle({"neg", "pos"}, [](const MultivariateSample& x) {
    const bool pos = x.at(0, 0) >= 1.0 || (x.at(1, 0) >= 1 && x.at(2, 0) >= 1 && x.at(3, 0) >= 1);
    return ClassProbabilities({"neg", "pos"}, {pos ? 0.0 : 1.0, pos ? 1.0 : 0.0});
  }, true);
  std::vector<MultivariateSample> train{
      bits(schema, {0, 1, 1, 1}, "near", "pos"),
      bits(schema, {2, 0, 0, 0}, "far", "pos"),
      bits(schema, {0, 0, 0, 0.5}, "other", "neg"),
  };
  auto index = build_index(train, f);
  auto x = bits(schema, {0, 0, 0, 0}, "x");
  SearchConfig cfg;
  cfg.delta = 0;
  for (auto exec : {Execution::serial, Execution::parallel}) {
    ExplainOptions opts;
    opts.execution = exec;
    auto out = explain(x, "pos", f, index, cfg, opts);
    CHECK(out.explanation.distractor_id == "far");
    CHECK(out.explanation.mask.to_string() == "1000");
    CHECK(out.loss == doctest::Approx(0.01));
    CHECK(out.distractors_tried == 2);
    CHECK(out.tau_qualified);
    CHECK(out.explanation.substituted_metrics.size() == 1);
    CHECK(out.explanation.substituted_metrics[0].distractor_series == std::vector<double>{2.0});
  }
  // with the default delta both are free, so the nearest wins the tie
  auto tie = explain(x, "pos", f, index, SearchConfig{});
  CHECK(tie.explanation.distractor_id == "near");
  CHECK(tie.explanation.mask.to_string() == "0111");
}

TEST_CASE("explain edge cases") {
  auto schema = make_schema({"a", "b"}, 1);
  auto f = table_classifier({0.0, 0.7, 0.7, 0.8});
  std::vector<MultivariateSample> train{bits(schema, {1, 1}, "d", "pos"),
                                        bits(schema, {0, 0}, "n", "neg")};
  auto index = build_index(train, f);

  SUBCASE("already in the target class") {
    auto out = explain(bits(schema, {1, 1}, "x"), "pos", f, index, [] {
      SearchConfig c;
      c.tau = 0.6;
      return c;
    }());
    CHECK(out.explanation.mask.empty());
    CHECK(out.explanation.achieved_probability == doctest::Approx(0.8));
  }
  SUBCASE("argmax-only distractors fall back to their own probability") {
    auto out = explain(bits(schema, {0, 0}, "x"), "pos", f, index, SearchConfig{});
    CHECK_FALSE(out.tau_qualified);
    CHECK(out.explanation.mask.to_string() == "11");
    CHECK(out.explanation.achieved_probability == doctest::Approx(0.8));
  }
  SUBCASE("unknown class") {
    CHECK_THROWS_AS(explain(bits(schema, {0, 0}, "x"), "nope", f, index, SearchConfig{}), Error);
  }
  SUBCASE("no distractor") {
    auto empty = build_index(std::vector<MultivariateSample>{bits(schema, {0, 0}, "n", "neg")}, f);
    try {
      explain(bits(schema, {0, 0}, "x"), "pos", f, empty, SearchConfig{});
      FAIL("expected throw");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::no_distractor);
    }
  }
}

TEST_CASE("explain is identical across execution modes and methods are reproducible") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t m = 6;
    std::vector<double> table(64);
    for (auto& p : table) p = uniform01(rng);
    std::vector<std::string> names;
    for (std::size_t j = 0; j < m; ++j) names.push_back("m" + std::to_string(j));
    auto schema = make_schema(names, 1);
    auto f = table_classifier(table);
    std::vector<MultivariateSample> train;
    for (std::size_t k = 0; k < 64; ++k) {
      std::vector<double> v(m);
      for (std::size_t j = 0; j < m; ++j) v[j] = (k >> j) & 1u;
      train.push_back(bits(schema, v, "t" + std::to_string(k), table[k] >= 0.5 ? "pos" : "neg"));
    }
    auto index = build_index(train, f);
    auto x = bits(schema, std::vector<double>(m, 0.0), "x");
    if (table[0] >= 0.95 || index.at("pos").index.empty()) continue;
    SearchConfig cfg;
    cfg.num_distractors = 4;
    cfg.rng_seed = trial;
    for (auto method : {SearchMethod::greedy, SearchMethod::hillclimb}) {
      ExplainOptions s{method, Execution::serial, nullptr};
      ExplainOptions p{method, Execution::parallel, nullptr};
      auto a = explain(x, "pos", f, index, cfg, s);
      auto b = explain(x, "pos", f, index, cfg, p);
      CHECK(a.explanation.mask == b.explanation.mask);
      CHECK(a.explanation.distractor_id == b.explanation.distractor_id);
      CHECK(a.loss == b.loss);
      CHECK(a.evaluations == b.evaluations);
      auto serial_f = table_classifier(table, false);
      auto c = explain(x, "pos", serial_f, index, cfg, p);
      CHECK(c.explanation.mask == a.explanation.mask);
    }
  }
}
