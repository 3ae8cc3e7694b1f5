#include <benchmark/benchmark.h>

#include <random>

#include "comte/distractor_index.hpp"
#include "comte/features.hpp"
#include "comte/logistic.hpp"
#include "comte/random.hpp"
#include "comte/search.hpp"

using namespace comte;

namespace {

SchemaPtr wide_schema(std::size_t m, std::size_t t) {
  std::vector<std::string> names;
  for (std::size_t j = 0; j < m; ++j) names.push_back("m" + std::to_string(j));
  return make_schema(names, t);
}

std::vector<MultivariateSample> random_samples(const SchemaPtr& schema, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<MultivariateSample> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> v(schema->metrics() * schema->length());
    for (auto& e : v) e = uniform01(rng);
    out.emplace_back(schema, std::move(v), "s" + std::to_string(i), i % 2 ? "b" : "a");
  }
  return out;
}

// Logistic model weighting the mean of every metric, signs alternating.
ClassifierHandle dense_classifier(std::size_t m) {
  LogisticModel model{{"a", "b"}, wide_schema(m, 1)->names(), std::vector<double>(m * kFeaturesPerMetric)};
  for (std::size_t j = 0; j < m; ++j) model.weights[j * kFeaturesPerMetric + 2] = j % 2 ? 4.0 : -4.0;
  return make_logistic_classifier(model);
}

Execution execution_of(const benchmark::State& state) {
  return state.range(0) ? Execution::parallel : Execution::serial;
}

void BM_FeatureBatch(benchmark::State& state) {
  const auto xs = random_samples(wide_schema(50, 64), 256, 1);
  for (auto _ : state) benchmark::DoNotOptimize(extract_features_batch(xs, execution_of(state)));
}
BENCHMARK(BM_FeatureBatch)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_GreedyScan(benchmark::State& state) {
  auto schema = wide_schema(100, 64);
  auto f = dense_classifier(100);
  auto xs = random_samples(schema, 2, 2);
  std::vector<double> lo(100 * 64, 0.0), hi(100 * 64, 0.0);
  for (std::size_t j = 0; j < 100; ++j)
    for (std::size_t k = 0; k < 64; ++k) (j % 2 ? hi : lo)[j * 64 + k] = 1.0;
  MultivariateSample x(schema, lo, "x"), d(schema, hi, "d");
  for (auto _ : state) {
    MaskObjective objective(x, d, f, 1);
    benchmark::DoNotOptimize(greedy_search(objective, 0.95, execution_of(state)));
  }
}
BENCHMARK(BM_GreedyScan)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ExplainSweep(benchmark::State& state) {
  auto schema = wide_schema(40, 32);
  auto f = dense_classifier(40);
  const auto train = random_samples(schema, 400, 3);
  const auto index = build_index(train, f);
  const auto x = random_samples(schema, 1, 4).front();
  const auto target = f.evaluate(x).argmax_name() == "a" ? "b" : "a";
  SearchConfig config;
  config.num_distractors = 8;
  ExplainOptions options;
  options.execution = execution_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(explain(x, target, f, index, config, options));
}
BENCHMARK(BM_ExplainSweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_NearestNeighbors(benchmark::State& state) {
  auto schema = wide_schema(4, 4);
  std::vector<SamplePtr> pool;
  for (auto& s : random_samples(schema, 5000, 5)) pool.push_back(std::make_shared<const MultivariateSample>(s));
  const NeighborIndex index(std::move(pool));
  const auto queries = random_samples(schema, 64, 6);
  const bool kd = state.range(0) != 0;
  for (auto _ : state)
    for (const auto& q : queries)
      benchmark::DoNotOptimize(kd ? index.nearest(q, 5) : index.nearest_bruteforce(q, 5));
}
BENCHMARK(BM_NearestNeighbors)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
