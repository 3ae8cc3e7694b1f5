#include "comte/synthetic.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "comte/random.hpp"

namespace comte {

std::string_view signal_kind_name(SignalKind kind) {
  switch (kind) {
    case SignalKind::level: return "level";
    case SignalKind::trend: return "trend";
    case SignalKind::spikes: return "spikes";
  }
  return "level";
}

SignalKind parse_signal_kind(std::string_view name) {
  if (name == "level") return SignalKind::level;
  if (name == "trend") return SignalKind::trend;
  if (name == "spikes") return SignalKind::spikes;
  throw Error(ErrorCode::invalid_argument, "unknown signal kind '" + std::string(name) + "'");
}

void GeneratorSpec::validate() const {
  if (metrics == 0 || length == 0)
    throw Error(ErrorCode::invalid_argument, "generator needs m >= 1 and t >= 1");
  if (classes.size() < 2) throw Error(ErrorCode::invalid_argument, "generator needs two or more classes");
  if (samples == 0) throw Error(ErrorCode::invalid_argument, "generator needs a positive sample count");
  if (noise_scale < 0.0) throw Error(ErrorCode::invalid_argument, "noise scale must be non-negative");
  for (const auto& s : signals) {
    if (s.metric >= metrics)
      throw Error(ErrorCode::invalid_argument, "signal metric index " + std::to_string(s.metric) +
                                                   " outside m = " + std::to_string(metrics));
    if (std::find(classes.begin(), classes.end(), s.class_name) == classes.end())
      throw Error(ErrorCode::invalid_argument, "signal for unknown class '" + s.class_name + "'");
    if (s.kind == SignalKind::spikes && s.period == 0)
      throw Error(ErrorCode::invalid_argument, "spike period must be positive");
  }
}

std::string synthetic_metric_name(std::size_t j, std::size_t m) {
  const std::size_t width = std::to_string(m > 0 ? m - 1 : 0).size();
  std::string digits = std::to_string(j);
  return "metric_" + std::string(width > digits.size() ? width - digits.size() : 0, '0') + digits;
}

GeneratedDataset generate(const GeneratorSpec& spec) {
  spec.validate();
  std::vector<std::string> names;
  for (std::size_t j = 0; j < spec.metrics; ++j) names.push_back(synthetic_metric_name(j, spec.metrics));
  auto schema = make_schema(names, spec.length);

  std::mt19937_64 rng(spec.seed);
  std::vector<double> baseline(spec.metrics);
  for (auto& b : baseline) b = 0.2 + 0.6 * uniform01(rng);

  const std::size_t t = spec.length;
  const std::size_t id_width = std::to_string(spec.samples - 1).size();
  GeneratedDataset out;
  out.samples.reserve(spec.samples);
  for (std::size_t i = 0; i < spec.samples; ++i) {
    const std::string& label = spec.classes[i % spec.classes.size()];
    std::vector<double> values(spec.metrics * t);
    for (std::size_t j = 0; j < spec.metrics; ++j)
      for (std::size_t k = 0; k < t; ++k)
        values[j * t + k] = baseline[j] + spec.noise_scale * standard_normal(rng);
    for (const auto& s : spec.signals) {
      if (s.class_name != label) continue;
      const std::size_t phase = s.kind == SignalKind::spikes ? uniform_index(rng, s.period) : 0;
      for (std::size_t k = 0; k < t; ++k) {
        double add = 0.0;
        switch (s.kind) {
          case SignalKind::level: add = s.amplitude; break;
          case SignalKind::trend:
            add = t > 1 ? s.amplitude * static_cast<double>(k) / static_cast<double>(t - 1) : 0.0;
            break;
          case SignalKind::spikes: add = (k % s.period == phase) ? s.amplitude : 0.0; break;
        }
        values[s.metric * t + k] += add;
      }
    }
    std::string digits = std::to_string(i);
    std::string id = spec.id_prefix + std::string(id_width - digits.size(), '0') + digits;
    out.samples.emplace_back(schema, std::move(values), std::move(id), label);
  }

  std::set<std::string> signal;
  for (const auto& s : spec.signals) signal.insert(names[s.metric]);
  out.signal_metrics.assign(signal.begin(), signal.end());

  nlohmann::ordered_json recipe = nlohmann::ordered_json::array();
  for (const auto& s : spec.signals) {
    recipe.push_back({{"class", s.class_name},
                      {"metric", names[s.metric]},
                      {"kind", signal_kind_name(s.kind)},
                      {"amplitude", s.amplitude},
                      {"period", s.period}});
  }
  out.manifest = {{"seed", spec.seed},
                  {"metrics", spec.metrics},
                  {"length", spec.length},
                  {"classes", spec.classes},
                  {"samples", spec.samples},
                  {"noise_scale", spec.noise_scale},
                  {"signal_metrics", out.signal_metrics},
                  {"recipe", recipe}};
  return out;
}

}  // namespace comte
