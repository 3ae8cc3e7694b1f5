#pragma once

#include <span>
#include <string>
#include <vector>

#include "comte/core.hpp"

namespace comte {

/// Per-metric min/max from the training set, mapping each metric to [0, 1].
/// Test data reuses the same parameters and is not clamped. A constant
/// metric (min == max) maps every value to 0 and inverts to min.
struct NormalizationParams {
  std::vector<std::string> metric_names;
  std::vector<double> min;
  std::vector<double> max;

  bool degenerate(std::size_t j) const { return min[j] == max[j]; }
};

NormalizationParams fit_normalization(std::span<const MultivariateSample> training);

MultivariateSample apply_normalization(const NormalizationParams& params,
                                       const MultivariateSample& x);
MultivariateSample invert_normalization(const NormalizationParams& params,
                                        const MultivariateSample& x);

/// Inverse map for a single series of metric j.
std::vector<double> invert_series(const NormalizationParams& params, std::size_t j,
                                  std::span<const double> series);

std::vector<MultivariateSample> apply_normalization(const NormalizationParams& params,
                                                    std::span<const MultivariateSample> xs);

}  // namespace comte
