#include <doctest.h>

#include <random>
#include <sstream>

#include "comte/dataset_io.hpp"
#include "comte/normalization.hpp"
#include "comte/random.hpp"

using namespace comte;

TEST_CASE("min-max example") {
  auto schema = make_schema({"a", "flat"}, 3);
  std::vector<MultivariateSample> train{MultivariateSample(schema, {0, 5, 10, 2, 2, 2}, "t")};
  auto params = fit_normalization(train);
  CHECK(params.min == std::vector<double>{0, 2});
  CHECK(params.degenerate(1));
  auto y = apply_normalization(params, MultivariateSample(schema, {5, 20, -10, 2, 2, 7}, "x"));
  CHECK(std::vector<double>(y.values().begin(), y.values().end()) ==
        std::vector<double>{0.5, 2.0, -1.0, 0, 0, 0});
  CHECK(invert_series(params, 1, y.row(1)) == std::vector<double>{2, 2, 2});
}

TEST_CASE("normalization round-trips") {
  std::mt19937_64 rng(12);
  auto schema = make_schema({"a", "b", "c"}, 8);
  std::vector<MultivariateSample> train;
  for (int i = 0; i < 20; ++i) {
    std::vector<double> v(24);
    for (auto& e : v) e = 1e3 * standard_normal(rng) + 50;
    train.emplace_back(schema, v, std::to_string(i));
  }
  auto params = fit_normalization(train);
  for (const auto& x : train) {
    auto back = invert_normalization(params, apply_normalization(params, x));
    for (std::size_t k = 0; k < x.values().size(); ++k)
      CHECK(std::abs(back.values()[k] - x.values()[k]) <= 1e-9);
  }
  auto j = normalization_to_json(params);
  auto again = normalization_from_json(ordered_json::parse(j.dump()));
  CHECK(again.min == params.min);
  CHECK(again.max == params.max);
}

TEST_CASE("dataset ndjson round trip and reordering") {
  std::istringstream in(
      R"({"sample_id":"a","label":"x","metrics":{"cpu":[1,2],"mem":[3,4]}})"
      "\n"
      R"({"sample_id":"b","label":"y","metrics":{"mem":[7,8],"cpu":[5,6]}})"
      "\n");
  auto ds = read_dataset(in);
  CHECK(ds.schema->names() == std::vector<std::string>{"cpu", "mem"});
  CHECK(ds.at("b").row(0)[0] == 5);
  CHECK(ds.labels() == std::vector<std::string>{"x", "y"});
  std::ostringstream out;
  write_dataset(out, ds.samples);
  std::istringstream back(out.str());
  auto ds2 = read_dataset(back);
  CHECK(ds2.samples == ds.samples);
}

TEST_CASE("dataset errors") {
  auto parse = [](std::string text) {
    std::istringstream in(text);
    return read_dataset(in);
  };
  auto code = [&](std::string text) {
    try {
      parse(text);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::io_error;
  };
  CHECK(code("{oops\n") == ErrorCode::parse_error);
  CHECK(code(R"({"sample_id":"a","metrics":{"cpu":[1,2]}})"
             "\n"
             R"({"sample_id":"a","metrics":{"cpu":[1,2]}})") == ErrorCode::invalid_argument);
  CHECK(code(R"({"sample_id":"a","metrics":{"cpu":[1,2]}})"
             "\n"
             R"({"sample_id":"b","metrics":{"cpu":[1]}})") == ErrorCode::schema_mismatch);
  CHECK(code(R"({"sample_id":"a","metrics":{"cpu":[1,2]}})"
             "\n"
             R"({"sample_id":"b","metrics":{"gpu":[1,2]}})") == ErrorCode::schema_mismatch);
}

TEST_CASE("explanation json round trip and plot csv") {
  auto schema = make_schema({"a", "b"}, 2);
  MultivariateSample x(schema, {0, 1, 2, 3}, "x");
  MultivariateSample d(schema, {9, 8, 7, 6}, "d");
  const std::size_t idx[] = {1};
  auto e = make_explanation(x, d, "hi", SubstitutionMask::from_indices(2, idx), 0.97, nullptr);
  auto j = explanation_to_json(e);
  CHECK(j["mask"] == ordered_json::parse("[0,1]"));
  auto back = explanation_from_json(ordered_json::parse(j.dump()));
  CHECK(back.mask == e.mask);
  CHECK(back.distractor_id == "d");
  CHECK(back.substituted_metrics[0].distractor_series == std::vector<double>{7, 6});
  std::ostringstream csv;
  write_plot_csv(csv, e);
  CHECK(csv.str() == "metric,timestep,test_value,distractor_value\nb,0,2,7\nb,1,3,6\n");
}

TEST_CASE("model json round trips") {
  LogisticModel m{{"n", "p"}, {"a"}, std::vector<double>(11, 0.0)};
  m.weights[3] = -0.125;
  auto back = logistic_from_json(ordered_json::parse(logistic_to_json(m).dump()));
  CHECK(back.weights == m.weights);
  CHECK(back.class_names == m.class_names);
  SetCoverForest forest{3, {{0, 2}, {1}}};
  auto fb = setcover_from_json(ordered_json::parse(setcover_to_json(forest).dump()));
  CHECK(fb.sets == forest.sets);
}
