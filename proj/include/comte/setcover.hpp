#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "comte/classifier.hpp"

namespace comte {

/// Executable form of the hitting-set reduction: tree i votes for class "1"
/// when the binary sample has a 1 at any index of set i, and the forest
/// output is the fraction of such trees.
struct SetCoverForest {
  std::size_t universe_size = 0;
  std::vector<std::vector<std::size_t>> sets;

  void validate() const;
  /// True when every set contains an element of `chosen`.
  bool is_hitting_set(const SubstitutionMask& chosen) const;
  std::size_t sets_hit(const SubstitutionMask& chosen) const;
};

inline constexpr std::size_t kBruteForceUniverseLimit = 20;

/// Schema "u0".."u{m-1}" with series length 1.
SchemaPtr setcover_schema(std::size_t universe_size);

/// Binary sample with a 1 at every set bit of `bits`.
MultivariateSample setcover_sample(const SchemaPtr& schema, const SubstitutionMask& bits,
                                   std::string id = {});

/// Classes {"0", "1"}; P("1") = (#sets hit) / n.
ClassProbabilities setcover_predict(const SetCoverForest& forest, const MultivariateSample& x);

ClassifierHandle make_setcover_classifier(SetCoverForest forest);

/// Minimum-cardinality hitting set by exhaustive enumeration (universe <= 20).
/// Among equal sizes, the lexicographically smallest ascending index list wins.
std::vector<std::size_t> hitting_set_bruteforce(const SetCoverForest& forest);

/// Random instance: universe in [min_universe, max_universe], 1..max_sets non-empty sets.
SetCoverForest random_setcover_forest(std::mt19937_64& rng, std::size_t min_universe,
                                      std::size_t max_universe, std::size_t max_sets);

}  // namespace comte
