#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "comte/error.hpp"

namespace comte {

/// Ordered metric names plus the common series length.
class MetricSchema {
 public:
  MetricSchema(std::vector<std::string> names, std::size_t length);

  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::string& name(std::size_t j) const { return names_.at(j); }
  std::size_t metrics() const noexcept { return names_.size(); }
  std::size_t length() const noexcept { return length_; }
  std::optional<std::size_t> index_of(std::string_view name) const;

  friend bool operator==(const MetricSchema&, const MetricSchema&) = default;

 private:
  std::vector<std::string> names_;
  std::size_t length_;
};

using SchemaPtr = std::shared_ptr<const MetricSchema>;

SchemaPtr make_schema(std::vector<std::string> names, std::size_t length);

/// An m x t matrix of finite reals, stored row-major (metric-major, time-minor).
class MultivariateSample {
 public:
  MultivariateSample(SchemaPtr schema, std::vector<double> values, std::string id = {},
                     std::optional<std::string> label = std::nullopt);

  const SchemaPtr& schema_ptr() const noexcept { return schema_; }
  const MetricSchema& schema() const noexcept { return *schema_; }
  std::size_t metrics() const noexcept { return schema_->metrics(); }
  std::size_t length() const noexcept { return schema_->length(); }

  std::span<const double> row(std::size_t j) const;
  std::span<const double> values() const noexcept { return values_; }
  double at(std::size_t j, std::size_t k) const { return values_[j * length() + k]; }

  const std::string& id() const noexcept { return id_; }
  const std::optional<std::string>& label() const noexcept { return label_; }

  MultivariateSample with_values(std::vector<double> values) const;
  MultivariateSample with_id(std::string id) const;

  friend bool operator==(const MultivariateSample& a, const MultivariateSample& b);

 private:
  SchemaPtr schema_;
  std::vector<double> values_;
  std::string id_;
  std::optional<std::string> label_;
};

bool same_schema(const MultivariateSample& a, const MultivariateSample& b);

/// Squared Euclidean distance over the flattened values, summed in index order.
double squared_distance(std::span<const double> a, std::span<const double> b);
double euclidean_distance(const MultivariateSample& a, const MultivariateSample& b);

/// Tolerance band within which external probability rows are renormalized.
inline constexpr double kProbabilitySumTolerance = 1e-6;
/// Absorbs representation error so a row summing to exactly 1 - 1e-6 in decimal is accepted.
inline constexpr double kProbabilityRoundingSlack = 1e-12;

class ClassProbabilities {
 public:
  ClassProbabilities(std::vector<std::string> class_names, std::vector<double> per_class);

  /// Checks entries lie in [0,1] and the sum is within kProbabilitySumTolerance of 1,
  /// then renormalizes. Throws classifier_failure otherwise.
  static ClassProbabilities validated(std::vector<std::string> class_names,
                                      std::vector<double> per_class);

  const std::vector<std::string>& class_names() const noexcept { return class_names_; }
  const std::vector<double>& per_class() const noexcept { return per_class_; }
  std::size_t size() const noexcept { return per_class_.size(); }
  double operator[](std::size_t i) const { return per_class_.at(i); }
  double probability(std::string_view class_name) const;
  std::size_t argmax() const;
  const std::string& argmax_name() const { return class_names_[argmax()]; }

  friend bool operator==(const ClassProbabilities&, const ClassProbabilities&) = default;

 private:
  std::vector<std::string> class_names_;
  std::vector<double> per_class_;
};

/// The diagonal of the binary substitution matrix A.
class SubstitutionMask {
 public:
  SubstitutionMask() = default;
  explicit SubstitutionMask(std::size_t m) : bits_(m, 0) {}
  static SubstitutionMask from_indices(std::size_t m, std::span<const std::size_t> indices);
  static SubstitutionMask all(std::size_t m);

  std::size_t size() const noexcept { return bits_.size(); }
  std::size_t count() const noexcept;
  bool test(std::size_t j) const { return bits_.at(j) != 0; }
  void set(std::size_t j, bool on = true) { bits_.at(j) = on ? 1 : 0; }
  SubstitutionMask flipped(std::size_t j) const;
  SubstitutionMask complement() const;
  std::vector<std::size_t> indices() const;
  bool empty() const noexcept { return count() == 0; }

  /// "0101"-style rendering, bit 0 first.
  std::string to_string() const;

  friend bool operator==(const SubstitutionMask&, const SubstitutionMask&) = default;
  friend auto operator<=>(const SubstitutionMask&, const SubstitutionMask&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

/// x' = (I - A) x_test + A x_dist, realized as row selection so it is bit-exact.
MultivariateSample combine(const MultivariateSample& x_test, const MultivariateSample& x_dist,
                           const SubstitutionMask& mask);

/// (1 - p)^2 + lambda * |A|
double loss_strict(double target_probability, std::size_t mask_size, double lambda);

/// ((tau - p)^+)^2 + lambda * (|A| - delta)^+
double loss_relaxed(double target_probability, std::size_t mask_size, double tau,
                    std::size_t delta, double lambda);

struct SubstitutedMetric {
  std::string metric;
  std::vector<double> test_series;
  std::vector<double> distractor_series;

  friend bool operator==(const SubstitutedMetric&, const SubstitutedMetric&) = default;
};

struct Explanation {
  std::string sample_id;
  std::string distractor_id;
  std::string target_class;
  std::vector<std::string> metric_names;
  SubstitutionMask mask;
  double achieved_probability = 0.0;
  /// Series in original (un-normalized) units, one entry per set mask bit.
  std::vector<SubstitutedMetric> substituted_metrics;

  std::vector<std::string> explanation_metrics() const;

  friend bool operator==(const Explanation&, const Explanation&) = default;
};

}  // namespace comte
