#include "comte/dataset_io.hpp"

#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <unordered_set>

namespace comte {

namespace {

[[noreturn]] void parse_fail(const std::string& what, const std::string& payload = {}) {
  throw Error(ErrorCode::parse_error, what, payload);
}

template <typename T>
T field(const ordered_json& j, const char* key, const std::string& context) {
  if (!j.is_object() || !j.contains(key)) parse_fail(context + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    parse_fail(context + ": field '" + key + "' has the wrong type (" + e.what() + ")");
  }
}

std::vector<double> real_array(const ordered_json& j, const std::string& context) {
  if (!j.is_array()) parse_fail(context + ": expected an array of reals");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number()) parse_fail(context + ": non-numeric entry");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

const MultivariateSample* Dataset::find(std::string_view sample_id) const {
  for (const auto& s : samples)
    if (s.id() == sample_id) return &s;
  return nullptr;
}

const MultivariateSample& Dataset::at(std::string_view sample_id) const {
  if (const auto* s = find(sample_id)) return *s;
  throw Error(ErrorCode::invalid_argument, "no sample with id '" + std::string(sample_id) + "'");
}

std::vector<std::string> Dataset::labels() const {
  std::set<std::string> out;
  for (const auto& s : samples)
    if (s.label()) out.insert(*s.label());
  return {out.begin(), out.end()};
}

ordered_json sample_to_json(const MultivariateSample& sample) {
  ordered_json j;
  j["sample_id"] = sample.id();
  if (sample.label()) j["label"] = *sample.label();
  ordered_json metrics = ordered_json::object();
  for (std::size_t r = 0; r < sample.metrics(); ++r) {
    auto row = sample.row(r);
    metrics[sample.schema().name(r)] = std::vector<double>(row.begin(), row.end());
  }
  j["metrics"] = std::move(metrics);
  return j;
}

MultivariateSample sample_from_json(const ordered_json& record, SchemaPtr schema) {
  const auto id = field<std::string>(record, "sample_id", "dataset record");
  std::optional<std::string> label;
  if (record.contains("label") && !record["label"].is_null())
    label = field<std::string>(record, "label", "record '" + id + "'");
  if (!record.contains("metrics") || !record["metrics"].is_object())
    parse_fail("record '" + id + "': 'metrics' must be an object");
  const auto& metrics = record["metrics"];
  if (metrics.size() != schema->metrics())
    throw Error(ErrorCode::schema_mismatch, "record '" + id + "': expected " +
                                                std::to_string(schema->metrics()) + " metrics");
  std::vector<double> values;
  values.reserve(schema->metrics() * schema->length());
  for (const auto& name : schema->names()) {
    if (!metrics.contains(name))
      throw Error(ErrorCode::schema_mismatch, "record '" + id + "': missing metric '" + name + "'");
    auto row = real_array(metrics[name], "record '" + id + "' metric '" + name + "'");
    if (row.size() != schema->length()) {
      throw Error(ErrorCode::schema_mismatch, "record '" + id + "' metric '" + name + "': length " +
                                                  std::to_string(row.size()) + ", expected " +
                                                  std::to_string(schema->length()));
    }
    values.insert(values.end(), row.begin(), row.end());
  }
  return MultivariateSample(std::move(schema), std::move(values), id, std::move(label));
}

Dataset read_dataset(std::istream& in) {
  Dataset ds;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ordered_json record;
    try {
      record = ordered_json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      parse_fail("dataset line " + std::to_string(line_no) + ": " + e.what(), line);
    }
    if (!ds.schema) {
      if (!record.is_object() || !record.contains("metrics") || !record["metrics"].is_object() ||
          record["metrics"].empty())
        parse_fail("dataset line " + std::to_string(line_no) + ": no metrics", line);
      std::vector<std::string> names;
      for (const auto& [name, _] : record["metrics"].items()) names.push_back(name);
      const auto& first = record["metrics"].begin().value();
      if (!first.is_array() || first.empty())
        parse_fail("dataset line " + std::to_string(line_no) + ": empty series", line);
      ds.schema = make_schema(std::move(names), first.size());
    }
    auto sample = sample_from_json(record, ds.schema);
    if (!ids.insert(sample.id()).second)
      throw Error(ErrorCode::invalid_argument, "duplicate sample_id '" + sample.id() + "'");
    ds.samples.push_back(std::move(sample));
  }
  if (!ds.schema) throw Error(ErrorCode::invalid_argument, "dataset is empty");
  return ds;
}

Dataset read_dataset_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open dataset '" + path.string() + "'");
  return read_dataset(in);
}

void write_dataset(std::ostream& out, std::span<const MultivariateSample> samples) {
  for (const auto& s : samples) out << sample_to_json(s).dump() << '\n';
}

void write_dataset_file(const std::filesystem::path& path,
                        std::span<const MultivariateSample> samples) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io_error, "cannot write '" + path.string() + "'");
  write_dataset(out, samples);
}

ordered_json normalization_to_json(const NormalizationParams& params) {
  ordered_json metrics = ordered_json::array();
  for (std::size_t j = 0; j < params.metric_names.size(); ++j)
    metrics.push_back({{"name", params.metric_names[j]}, {"min", params.min[j]}, {"max", params.max[j]}});
  return {{"type", "minmax"}, {"metrics", metrics}};
}

NormalizationParams normalization_from_json(const ordered_json& j) {
  if (!j.contains("metrics") || !j["metrics"].is_array())
    parse_fail("normalization parameters: missing 'metrics' array");
  NormalizationParams p;
  for (const auto& m : j["metrics"]) {
    p.metric_names.push_back(field<std::string>(m, "name", "normalization"));
    p.min.push_back(field<double>(m, "min", "normalization"));
    p.max.push_back(field<double>(m, "max", "normalization"));
    if (p.min.back() > p.max.back())
      parse_fail("normalization: min > max for metric '" + p.metric_names.back() + "'");
  }
  return p;
}

ordered_json logistic_to_json(const LogisticModel& model) {
  return {{"type", "logistic"},
          {"class_names", model.class_names},
          {"metrics", model.metric_names},
          {"features", std::vector<std::string>(kFeatureNames.begin(), kFeatureNames.end())},
          {"weights", model.weights},
          {"nonzero", model.nonzero_count()}};
}

LogisticModel logistic_from_json(const ordered_json& j) {
  LogisticModel m;
  m.class_names = field<std::vector<std::string>>(j, "class_names", "logistic model");
  m.metric_names = field<std::vector<std::string>>(j, "metrics", "logistic model");
  m.weights = real_array(j.at("weights"), "logistic model weights");
  if (m.class_names.size() != 2) parse_fail("logistic model: exactly two classes required");
  if (m.weights.size() != m.metric_names.size() * kFeaturesPerMetric)
    parse_fail("logistic model: weight count does not match 11 features per metric");
  return m;
}

ordered_json setcover_to_json(const SetCoverForest& forest) {
  return {{"type", "setcover"}, {"universe_size", forest.universe_size}, {"sets", forest.sets}};
}

SetCoverForest setcover_from_json(const ordered_json& j) {
  SetCoverForest f;
  f.universe_size = field<std::size_t>(j, "universe_size", "setcover forest");
  f.sets = field<std::vector<std::vector<std::size_t>>>(j, "sets", "setcover forest");
  f.validate();
  return f;
}

ordered_json explanation_to_json(const Explanation& e) {
  ordered_json subs = ordered_json::array();
  for (const auto& s : e.substituted_metrics)
    subs.push_back({{"metric", s.metric}, {"test", s.test_series}, {"distractor", s.distractor_series}});
  std::vector<int> mask;
  for (std::size_t j = 0; j < e.mask.size(); ++j) mask.push_back(e.mask.test(j) ? 1 : 0);
  return {{"sample_id", e.sample_id},
          {"target_class", e.target_class},
          {"distractor_id", e.distractor_id},
          {"achieved_probability", e.achieved_probability},
          {"metrics", e.metric_names},
          {"mask", mask},
          {"substitutions", subs}};
}

Explanation explanation_from_json(const ordered_json& j) {
  Explanation e;
  e.sample_id = field<std::string>(j, "sample_id", "explanation");
  e.target_class = field<std::string>(j, "target_class", "explanation");
  e.distractor_id = field<std::string>(j, "distractor_id", "explanation");
  e.achieved_probability = field<double>(j, "achieved_probability", "explanation");
  e.metric_names = field<std::vector<std::string>>(j, "metrics", "explanation");
  const auto bits = field<std::vector<int>>(j, "mask", "explanation");
  if (bits.size() != e.metric_names.size()) parse_fail("explanation: mask length differs from metrics");
  e.mask = SubstitutionMask(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] != 0 && bits[i] != 1) parse_fail("explanation: mask entries must be 0 or 1");
    e.mask.set(i, bits[i] == 1);
  }
  if (!j.contains("substitutions") || !j["substitutions"].is_array())
    parse_fail("explanation: missing 'substitutions'");
  for (const auto& s : j["substitutions"]) {
    SubstitutedMetric m;
    m.metric = field<std::string>(s, "metric", "substitution");
    m.test_series = real_array(s.at("test"), "substitution test series");
    m.distractor_series = real_array(s.at("distractor"), "substitution distractor series");
    e.substituted_metrics.push_back(std::move(m));
  }
  if (e.substituted_metrics.size() != e.mask.count())
    parse_fail("explanation: substitutions do not match the mask");
  return e;
}

ordered_json outcome_to_json(const SearchOutcome& outcome) {
  ordered_json j = explanation_to_json(outcome.explanation);
  j["method"] = std::string(method_name(outcome.method));
  j["loss"] = outcome.loss;
  j["evaluations"] = outcome.evaluations;
  j["distractors_tried"] = outcome.distractors_tried;
  j["tau_qualified"] = outcome.tau_qualified;
  return j;
}

void write_plot_csv(std::ostream& out, const Explanation& e) {
  out << "metric,timestep,test_value,distractor_value\n";
  out << std::setprecision(17);
  for (const auto& s : e.substituted_metrics) {
    for (std::size_t k = 0; k < s.test_series.size(); ++k)
      out << s.metric << ',' << k << ',' << s.test_series[k] << ',' << s.distractor_series[k] << '\n';
  }
}

ordered_json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return ordered_json::parse(buf.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::parse_error, path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const ordered_json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io_error, "cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

ClassifierHandle BuiltinModel::handle() const {
  if (logistic) return make_logistic_classifier(*logistic);
  if (setcover) return make_setcover_classifier(*setcover);
  throw Error(ErrorCode::invalid_argument, "empty built-in model");
}

BuiltinModel load_builtin_model(const std::filesystem::path& path) {
  const auto j = read_json_file(path);
  const auto type = field<std::string>(j, "type", path.string());
  BuiltinModel m;
  if (type == "logistic") {
    m.logistic = logistic_from_json(j);
  } else if (type == "setcover") {
    m.setcover = setcover_from_json(j);
  } else {
    parse_fail(path.string() + ": unknown model type '" + type + "'");
  }
  return m;
}

}  // namespace comte
