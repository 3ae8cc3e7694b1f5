#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "comte/core.hpp"
#include "comte/logistic.hpp"
#include "comte/normalization.hpp"
#include "comte/search.hpp"
#include "comte/setcover.hpp"

namespace comte {

using ordered_json = nlohmann::ordered_json;

/// Newline-delimited records {"sample_id", "label", "metrics": {name: [t reals]}}.
/// The first record fixes the metric order; later records must carry the same
/// metric set and length and are reordered to it.
struct Dataset {
  SchemaPtr schema;
  std::vector<MultivariateSample> samples;

  const MultivariateSample* find(std::string_view sample_id) const;
  const MultivariateSample& at(std::string_view sample_id) const;
  std::vector<std::string> labels() const;  // distinct, sorted
};

Dataset read_dataset(std::istream& in);
Dataset read_dataset_file(const std::filesystem::path& path);
void write_dataset(std::ostream& out, std::span<const MultivariateSample> samples);
void write_dataset_file(const std::filesystem::path& path,
                        std::span<const MultivariateSample> samples);

ordered_json sample_to_json(const MultivariateSample& sample);
MultivariateSample sample_from_json(const ordered_json& record, SchemaPtr schema);

ordered_json normalization_to_json(const NormalizationParams& params);
NormalizationParams normalization_from_json(const ordered_json& j);

ordered_json logistic_to_json(const LogisticModel& model);
LogisticModel logistic_from_json(const ordered_json& j);

ordered_json setcover_to_json(const SetCoverForest& forest);
SetCoverForest setcover_from_json(const ordered_json& j);

ordered_json explanation_to_json(const Explanation& explanation);
Explanation explanation_from_json(const ordered_json& j);

/// Explanation plus search bookkeeping (method, loss, evaluations, ...).
ordered_json outcome_to_json(const SearchOutcome& outcome);

/// Per-metric rows `metric,timestep,test_value,distractor_value` in original units.
void write_plot_csv(std::ostream& out, const Explanation& explanation);

ordered_json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const ordered_json& j);

/// A built-in model file: {"type": "logistic", ...} or {"type": "setcover", ...}.
struct BuiltinModel {
  std::optional<LogisticModel> logistic;
  std::optional<SetCoverForest> setcover;
  ClassifierHandle handle() const;
};

BuiltinModel load_builtin_model(const std::filesystem::path& path);

}  // namespace comte
