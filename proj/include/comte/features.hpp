#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "comte/classifier.hpp"
#include "comte/core.hpp"

namespace comte {

inline constexpr std::size_t kFeaturesPerMetric = 11;

/// Feature order within each metric block.
inline constexpr std::array<std::string_view, kFeaturesPerMetric> kFeatureNames = {
    "min", "max", "mean", "std", "skew", "kurtosis", "p5", "p25", "p50", "p75", "p95"};

using SeriesFeatures = std::array<double, kFeaturesPerMetric>;

/// Statistics of one series.
///
/// Conventions: population standard deviation (divide by t); skew is the
/// Fisher-Pearson standardized third moment; kurtosis is excess kurtosis;
/// skew, kurtosis and std are 0 for a constant series; percentiles
/// interpolate linearly between order statistics at rank p * (t - 1).
SeriesFeatures series_features(std::span<const double> series);

/// Linear-interpolation percentile of an ascending-sorted series, p in [0, 100].
double sorted_percentile(std::span<const double> sorted, double p);

struct FeatureVector {
  /// 11 * m values, metric-major then feature index.
  std::vector<double> values;
  /// Parallel "metric::feature" labels.
  std::vector<std::string> names;
};

FeatureVector extract_features(const MultivariateSample& x);

std::vector<std::string> feature_names(const MetricSchema& schema);

/// Batch extraction; the parallel path splits samples across OpenMP threads.
std::vector<FeatureVector> extract_features_batch(std::span<const MultivariateSample> samples,
                                                  Execution execution = Execution::parallel);

}  // namespace comte
