#include "comte/normalization.hpp"

#include <algorithm>
#include <limits>

namespace comte {

namespace {

void check_schema(const NormalizationParams& params, const MultivariateSample& x) {
  if (params.metric_names != x.schema().names()) {
    throw Error(ErrorCode::schema_mismatch,
                "normalization parameters cover " + std::to_string(params.metric_names.size()) +
                    " metrics that do not match sample '" + x.id() + "'");
  }
}

}  // namespace

NormalizationParams fit_normalization(std::span<const MultivariateSample> training) {
  if (training.empty()) throw Error(ErrorCode::invalid_argument, "cannot normalize an empty dataset");
  const auto& schema = training.front().schema();
  NormalizationParams p;
  p.metric_names = schema.names();
  p.min.assign(schema.metrics(), std::numeric_limits<double>::infinity());
  p.max.assign(schema.metrics(), -std::numeric_limits<double>::infinity());
  for (const auto& s : training) {
    if (!same_schema(s, training.front()))
      throw Error(ErrorCode::schema_mismatch, "training samples must share one schema");
    for (std::size_t j = 0; j < s.metrics(); ++j) {
      for (double v : s.row(j)) {
        p.min[j] = std::min(p.min[j], v);
        p.max[j] = std::max(p.max[j], v);
      }
    }
  }
  return p;
}

MultivariateSample apply_normalization(const NormalizationParams& params,
                                       const MultivariateSample& x) {
  check_schema(params, x);
  std::vector<double> out(x.values().begin(), x.values().end());
  const std::size_t t = x.length();
  for (std::size_t j = 0; j < x.metrics(); ++j) {
    const double lo = params.min[j];
    const double range = params.max[j] - lo;
    for (std::size_t k = 0; k < t; ++k) {
      double& v = out[j * t + k];
      v = params.degenerate(j) ? 0.0 : (v - lo) / range;
    }
  }
  return x.with_values(std::move(out));
}

std::vector<double> invert_series(const NormalizationParams& params, std::size_t j,
                                  std::span<const double> series) {
  std::vector<double> out(series.begin(), series.end());
  const double lo = params.min.at(j);
  const double range = params.max.at(j) - lo;
  for (double& v : out) v = params.degenerate(j) ? lo : lo + v * range;
  return out;
}

MultivariateSample invert_normalization(const NormalizationParams& params,
                                        const MultivariateSample& x) {
  check_schema(params, x);
  std::vector<double> out;
  out.reserve(x.values().size());
  for (std::size_t j = 0; j < x.metrics(); ++j) {
    auto row = invert_series(params, j, x.row(j));
    out.insert(out.end(), row.begin(), row.end());
  }
  return x.with_values(std::move(out));
}

std::vector<MultivariateSample> apply_normalization(const NormalizationParams& params,
                                                    std::span<const MultivariateSample> xs) {
  std::vector<MultivariateSample> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(apply_normalization(params, x));
  return out;
}

}  // namespace comte
