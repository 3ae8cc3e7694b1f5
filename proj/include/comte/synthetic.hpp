#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "comte/core.hpp"

namespace comte {

enum class SignalKind { level, trend, spikes };

std::string_view signal_kind_name(SignalKind kind);
SignalKind parse_signal_kind(std::string_view name);

/// Class-specific pattern added to one metric: a constant level shift, a
/// linear ramp reaching `amplitude` at the last timestep, or spikes of height
/// `amplitude` every `period` steps (leak-like and allocation-like shapes).
struct SignalRecipe {
  std::string class_name;
  std::size_t metric = 0;
  SignalKind kind = SignalKind::level;
  double amplitude = 1.0;
  std::size_t period = 8;
};

struct GeneratorSpec {
  std::size_t metrics = 0;
  std::size_t length = 0;
  std::vector<std::string> classes;
  std::vector<SignalRecipe> signals;
  double noise_scale = 0.0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::string id_prefix = "s";

  void validate() const;
};

struct GeneratedDataset {
  std::vector<MultivariateSample> samples;
  /// Sorted names of every metric that carries a class signal.
  std::vector<std::string> signal_metrics;
  nlohmann::ordered_json manifest;
};

/// Deterministic for a fixed spec. Labels cycle through the classes, so class
/// counts differ by at most one. Metric j is named "metric_jj" (zero-padded).
GeneratedDataset generate(const GeneratorSpec& spec);

std::string synthetic_metric_name(std::size_t j, std::size_t m);

}  // namespace comte
