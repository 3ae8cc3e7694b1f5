#include "comte/features.hpp"

#include <algorithm>
#include <cmath>

namespace comte {

double sorted_percentile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw Error(ErrorCode::invalid_argument, "percentile of empty series");
  const double rank = p / 100.0 * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = rank - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

SeriesFeatures series_features(std::span<const double> series) {
  if (series.empty()) throw Error(ErrorCode::invalid_argument, "feature extraction on empty series");
  std::vector<double> sorted(series.begin(), series.end());
  std::sort(sorted.begin(), sorted.end());
  const double lo = sorted.front();
  const double hi = sorted.back();
  const double n = static_cast<double>(series.size());

  SeriesFeatures f{};
  f[0] = lo;
  f[1] = hi;
  if (lo == hi) {
    // constant series: every location statistic is the constant, every shape statistic 0
    std::fill(f.begin() + 2, f.end(), lo);
    f[3] = f[4] = f[5] = 0.0;
    return f;
  }

  double sum = 0.0;
  for (double v : series) sum += v;
  const double mean = sum / n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : series) {
    const double d = v - mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;

  f[2] = mean;
  f[3] = std::sqrt(m2);
  if (m2 > 0.0) {
    f[4] = m3 / std::pow(m2, 1.5);
    f[5] = m4 / (m2 * m2) - 3.0;
  }
  f[6] = sorted_percentile(sorted, 5.0);
  f[7] = sorted_percentile(sorted, 25.0);
  f[8] = sorted_percentile(sorted, 50.0);
  f[9] = sorted_percentile(sorted, 75.0);
  f[10] = sorted_percentile(sorted, 95.0);
  return f;
}

std::vector<std::string> feature_names(const MetricSchema& schema) {
  std::vector<std::string> names;
  names.reserve(schema.metrics() * kFeaturesPerMetric);
  for (const auto& metric : schema.names())
    for (auto feature : kFeatureNames) names.push_back(metric + "::" + std::string(feature));
  return names;
}

FeatureVector extract_features(const MultivariateSample& x) {
  FeatureVector out;
  out.values.reserve(x.metrics() * kFeaturesPerMetric);
  for (std::size_t j = 0; j < x.metrics(); ++j) {
    const auto f = series_features(x.row(j));
    out.values.insert(out.values.end(), f.begin(), f.end());
  }
  out.names = feature_names(x.schema());
  return out;
}

std::vector<FeatureVector> extract_features_batch(std::span<const MultivariateSample> samples,
                                                  Execution execution) {
  std::vector<FeatureVector> out(samples.size());
  const auto n = static_cast<std::ptrdiff_t>(samples.size());
  if (execution == Execution::serial) {
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = extract_features(samples[i]);
    return out;
  }
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = extract_features(samples[i]);
  return out;
}

}  // namespace comte
