#include "comte/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

namespace comte {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::schema_mismatch: return "schema-mismatch";
    case ErrorCode::no_distractor: return "no-distractor";
    case ErrorCode::distractor_below_target: return "distractor-below-target";
    case ErrorCode::classifier_failure: return "classifier-failure";
    case ErrorCode::degenerate_input: return "degenerate-input";
    case ErrorCode::parse_error: return "parse-error";
    case ErrorCode::io_error: return "io-error";
  }
  return "unknown";
}

MetricSchema::MetricSchema(std::vector<std::string> names, std::size_t length)
    : names_(std::move(names)), length_(length) {
  if (names_.empty()) throw Error(ErrorCode::invalid_argument, "schema needs at least one metric");
  if (length_ == 0) throw Error(ErrorCode::invalid_argument, "series length must be positive");
  std::unordered_set<std::string> seen;
  for (const auto& n : names_) {
    if (n.empty()) throw Error(ErrorCode::invalid_argument, "metric names must be non-empty");
    if (!seen.insert(n).second)
      throw Error(ErrorCode::invalid_argument, "duplicate metric name '" + n + "'");
  }
}

std::optional<std::size_t> MetricSchema::index_of(std::string_view name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names_.begin());
}

SchemaPtr make_schema(std::vector<std::string> names, std::size_t length) {
  return std::make_shared<const MetricSchema>(std::move(names), length);
}

MultivariateSample::MultivariateSample(SchemaPtr schema, std::vector<double> values,
                                       std::string id, std::optional<std::string> label)
    : schema_(std::move(schema)), values_(std::move(values)), id_(std::move(id)),
      label_(std::move(label)) {
  if (!schema_) throw Error(ErrorCode::invalid_argument, "sample without schema");
  const std::size_t expected = schema_->metrics() * schema_->length();
  if (values_.size() != expected) {
    throw Error(ErrorCode::schema_mismatch,
                "sample '" + id_ + "' has " + std::to_string(values_.size()) +
                    " values, schema expects " + std::to_string(schema_->metrics()) + "x" +
                    std::to_string(schema_->length()));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw Error(ErrorCode::invalid_argument,
                  "sample '" + id_ + "' has a non-finite value in metric '" +
                      schema_->name(i / schema_->length()) + "'");
    }
  }
}

std::span<const double> MultivariateSample::row(std::size_t j) const {
  if (j >= metrics()) throw Error(ErrorCode::invalid_argument, "metric index out of range");
  return std::span<const double>(values_).subspan(j * length(), length());
}

MultivariateSample MultivariateSample::with_values(std::vector<double> values) const {
  return MultivariateSample(schema_, std::move(values), id_, label_);
}

MultivariateSample MultivariateSample::with_id(std::string id) const {
  return MultivariateSample(schema_, values_, std::move(id), label_);
}

bool operator==(const MultivariateSample& a, const MultivariateSample& b) {
  return same_schema(a, b) && a.values_ == b.values_ && a.id_ == b.id_ && a.label_ == b.label_;
}

bool same_schema(const MultivariateSample& a, const MultivariateSample& b) {
  return a.schema_ptr() == b.schema_ptr() || a.schema() == b.schema();
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

double euclidean_distance(const MultivariateSample& a, const MultivariateSample& b) {
  if (!same_schema(a, b)) throw Error(ErrorCode::schema_mismatch, "distance across schemas");
  return std::sqrt(squared_distance(a.values(), b.values()));
}

ClassProbabilities::ClassProbabilities(std::vector<std::string> class_names,
                                       std::vector<double> per_class)
    : class_names_(std::move(class_names)), per_class_(std::move(per_class)) {
  if (class_names_.size() != per_class_.size() || per_class_.empty()) {
    throw Error(ErrorCode::classifier_failure,
                "probability row has " + std::to_string(per_class_.size()) + " entries for " +
                    std::to_string(class_names_.size()) + " classes");
  }
}

ClassProbabilities ClassProbabilities::validated(std::vector<std::string> class_names,
                                                 std::vector<double> per_class) {
  double sum = 0.0;
  for (double p : per_class) {
    if (!std::isfinite(p) || p < 0.0 || p > 1.0)
      throw Error(ErrorCode::classifier_failure, "probability outside [0, 1]");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kProbabilitySumTolerance + kProbabilityRoundingSlack) {
    throw Error(ErrorCode::classifier_failure,
                "probability row sums to " + std::to_string(sum) + ", expected 1");
  }
  for (double& p : per_class) p /= sum;
  return ClassProbabilities(std::move(class_names), std::move(per_class));
}

double ClassProbabilities::probability(std::string_view class_name) const {
  auto it = std::find(class_names_.begin(), class_names_.end(), class_name);
  if (it == class_names_.end())
    throw Error(ErrorCode::invalid_argument, "unknown class '" + std::string(class_name) + "'");
  return per_class_[static_cast<std::size_t>(it - class_names_.begin())];
}

std::size_t ClassProbabilities::argmax() const {
  return static_cast<std::size_t>(std::max_element(per_class_.begin(), per_class_.end()) -
                                  per_class_.begin());
}

SubstitutionMask SubstitutionMask::from_indices(std::size_t m,
                                                std::span<const std::size_t> indices) {
  SubstitutionMask mask(m);
  for (std::size_t j : indices) {
    if (j >= m) throw Error(ErrorCode::invalid_argument, "mask index out of range");
    mask.set(j);
  }
  return mask;
}

SubstitutionMask SubstitutionMask::all(std::size_t m) {
  SubstitutionMask mask(m);
  std::fill(mask.bits_.begin(), mask.bits_.end(), std::uint8_t{1});
  return mask;
}

std::size_t SubstitutionMask::count() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

SubstitutionMask SubstitutionMask::flipped(std::size_t j) const {
  SubstitutionMask out = *this;
  out.set(j, !test(j));
  return out;
}

SubstitutionMask SubstitutionMask::complement() const {
  SubstitutionMask out = *this;
  for (auto& b : out.bits_) b = b ? 0 : 1;
  return out;
}

std::vector<std::size_t> SubstitutionMask::indices() const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < bits_.size(); ++j)
    if (bits_[j]) out.push_back(j);
  return out;
}

std::string SubstitutionMask::to_string() const {
  std::string s;
  s.reserve(bits_.size());
  for (auto b : bits_) s.push_back(b ? '1' : '0');
  return s;
}

MultivariateSample combine(const MultivariateSample& x_test, const MultivariateSample& x_dist,
                           const SubstitutionMask& mask) {
  if (!same_schema(x_test, x_dist)) {
    if (x_test.metrics() != x_dist.metrics())
      throw Error(ErrorCode::schema_mismatch, "combine: metric count differs (" +
                                                  std::to_string(x_test.metrics()) + " vs " +
                                                  std::to_string(x_dist.metrics()) + ")");
    if (x_test.length() != x_dist.length())
      throw Error(ErrorCode::schema_mismatch, "combine: series length differs (" +
                                                  std::to_string(x_test.length()) + " vs " +
                                                  std::to_string(x_dist.length()) + ")");
    throw Error(ErrorCode::schema_mismatch, "combine: metric names differ");
  }
  if (mask.size() != x_test.metrics()) {
    throw Error(ErrorCode::schema_mismatch, "combine: mask length " +
                                                std::to_string(mask.size()) + " vs " +
                                                std::to_string(x_test.metrics()) + " metrics");
  }
  const std::size_t t = x_test.length();
  std::vector<double> out(x_test.values().begin(), x_test.values().end());
  for (std::size_t j = 0; j < mask.size(); ++j) {
    if (!mask.test(j)) continue;
    auto src = x_dist.row(j);
    std::copy(src.begin(), src.end(), out.begin() + static_cast<std::ptrdiff_t>(j * t));
  }
  return x_test.with_values(std::move(out));
}

double loss_strict(double target_probability, std::size_t mask_size, double lambda) {
  if (lambda < 0.0) throw Error(ErrorCode::invalid_argument, "lambda must be non-negative");
  const double gap = 1.0 - target_probability;
  return gap * gap + lambda * static_cast<double>(mask_size);
}

double loss_relaxed(double target_probability, std::size_t mask_size, double tau,
                    std::size_t delta, double lambda) {
  if (!(tau > 0.0 && tau <= 1.0)) throw Error(ErrorCode::invalid_argument, "tau must be in (0, 1]");
  if (lambda < 0.0) throw Error(ErrorCode::invalid_argument, "lambda must be non-negative");
  const double gap = std::max(0.0, tau - target_probability);
  const double excess = mask_size > delta ? static_cast<double>(mask_size - delta) : 0.0;
  return gap * gap + lambda * excess;
}

std::vector<std::string> Explanation::explanation_metrics() const {
  std::vector<std::string> out;
  for (std::size_t j : mask.indices()) out.push_back(metric_names.at(j));
  return out;
}

}  // namespace comte
