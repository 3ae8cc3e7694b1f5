#include "comte/setcover.hpp"

#include <algorithm>
#include <numeric>

#include "comte/random.hpp"

namespace comte {

void SetCoverForest::validate() const {
  if (universe_size == 0) throw Error(ErrorCode::invalid_argument, "empty universe");
  if (sets.empty()) throw Error(ErrorCode::invalid_argument, "forest needs at least one set");
  for (const auto& s : sets) {
    if (s.empty()) throw Error(ErrorCode::invalid_argument, "forest sets must be non-empty");
    for (std::size_t j : s)
      if (j >= universe_size)
        throw Error(ErrorCode::invalid_argument, "set element outside the universe");
  }
}

std::size_t SetCoverForest::sets_hit(const SubstitutionMask& chosen) const {
  std::size_t hit = 0;
  for (const auto& s : sets)
    if (std::any_of(s.begin(), s.end(), [&](std::size_t j) { return chosen.test(j); })) ++hit;
  return hit;
}

bool SetCoverForest::is_hitting_set(const SubstitutionMask& chosen) const {
  return sets_hit(chosen) == sets.size();
}

SchemaPtr setcover_schema(std::size_t universe_size) {
  std::vector<std::string> names;
  for (std::size_t j = 0; j < universe_size; ++j) names.push_back("u" + std::to_string(j));
  return make_schema(std::move(names), 1);
}

MultivariateSample setcover_sample(const SchemaPtr& schema, const SubstitutionMask& bits,
                                   std::string id) {
  if (bits.size() != schema->metrics() || schema->length() != 1)
    throw Error(ErrorCode::schema_mismatch, "set-cover sample must be m x 1");
  std::vector<double> values(bits.size());
  for (std::size_t j = 0; j < bits.size(); ++j) values[j] = bits.test(j) ? 1.0 : 0.0;
  return MultivariateSample(schema, std::move(values), std::move(id));
}

ClassProbabilities setcover_predict(const SetCoverForest& forest, const MultivariateSample& x) {
  if (x.metrics() != forest.universe_size || x.length() != 1) {
    throw Error(ErrorCode::schema_mismatch,
                "set-cover forest expects " + std::to_string(forest.universe_size) +
                    " metrics of length 1");
  }
  SubstitutionMask bits(forest.universe_size);
  for (std::size_t j = 0; j < forest.universe_size; ++j) {
    const double v = x.at(j, 0);
    if (v != 0.0 && v != 1.0)
      throw Error(ErrorCode::invalid_argument, "set-cover forest input must be binary");
    bits.set(j, v == 1.0);
  }
  const double p =
      static_cast<double>(forest.sets_hit(bits)) / static_cast<double>(forest.sets.size());
  return ClassProbabilities({"0", "1"}, {1.0 - p, p});
}

ClassifierHandle make_setcover_classifier(SetCoverForest forest) {
  forest.validate();
  auto shared = std::make_shared<const SetCoverForest>(std::move(forest));
  return ClassifierHandle(
      {"0", "1"}, [shared](const MultivariateSample& x) { return setcover_predict(*shared, x); },
      /*concurrent_safe=*/true);
}

std::vector<std::size_t> hitting_set_bruteforce(const SetCoverForest& forest) {
  forest.validate();
  const std::size_t m = forest.universe_size;
  if (m > kBruteForceUniverseLimit) {
    throw Error(ErrorCode::invalid_argument,
                "exhaustive hitting-set search is limited to a universe of " +
                    std::to_string(kBruteForceUniverseLimit));
  }
  std::vector<std::uint32_t> set_bits;
  for (const auto& s : forest.sets) {
    std::uint32_t b = 0;
    for (std::size_t j : s) b |= std::uint32_t{1} << j;
    set_bits.push_back(b);
  }
  auto hits_all = [&](std::uint32_t chosen) {
    return std::all_of(set_bits.begin(), set_bits.end(),
                       [&](std::uint32_t s) { return (s & chosen) != 0; });
  };

  // combinations of each size in lexicographic order; the first hit is the answer
  for (std::size_t k = 1; k <= m; ++k) {
    std::vector<std::size_t> combo(k);
    std::iota(combo.begin(), combo.end(), std::size_t{0});
    while (true) {
      std::uint32_t chosen = 0;
      for (std::size_t j : combo) chosen |= std::uint32_t{1} << j;
      if (hits_all(chosen)) return combo;
      std::size_t i = k;
      while (i > 0 && combo[i - 1] == m - k + (i - 1)) --i;
      if (i == 0) break;
      ++combo[i - 1];
      for (std::size_t r = i; r < k; ++r) combo[r] = combo[r - 1] + 1;
    }
  }
  throw Error(ErrorCode::invalid_argument, "no hitting set exists");  // unreachable: U hits all
}

SetCoverForest random_setcover_forest(std::mt19937_64& rng, std::size_t min_universe,
                                      std::size_t max_universe, std::size_t max_sets) {
  SetCoverForest forest;
  forest.universe_size = min_universe + uniform_index(rng, max_universe - min_universe + 1);
  const std::size_t n_sets = 1 + uniform_index(rng, max_sets);
  for (std::size_t i = 0; i < n_sets; ++i) {
    std::vector<std::size_t> s;
    while (s.empty()) {
      for (std::size_t j = 0; j < forest.universe_size; ++j)
        if (uniform01(rng) < 0.3) s.push_back(j);
    }
    forest.sets.push_back(std::move(s));
  }
  return forest;
}

}  // namespace comte
