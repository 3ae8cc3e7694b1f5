#include "comte/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "comte/dataset_io.hpp"
#include "comte/distractor_index.hpp"
#include "comte/features.hpp"
#include "comte/metrics.hpp"
#include "comte/normalization.hpp"
#include "comte/random.hpp"
#include "comte/search.hpp"
#include "comte/synthetic.hpp"
#include "comte/wire.hpp"

namespace comte {

namespace {

std::uint64_t default_seed() {
  if (const char* env = std::getenv("COMTE_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw Error(ErrorCode::invalid_argument, std::string("COMTE_SEED is not an integer: ") + env);
    }
  }
  return 0;
}

void emit_json(const ordered_json& j, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << j.dump(2) << '\n';
  } else {
    write_json_file(path, j);
  }
}

/// "builtin:<model-file>" or "exec:<command>".
ClassifierHandle load_classifier(const std::string& spec, const SchemaPtr& schema) {
  if (spec.rfind("builtin:", 0) == 0) return load_builtin_model(spec.substr(8)).handle();
  if (spec.rfind("exec:", 0) == 0) return external_classifier(spec.substr(5), schema);
  throw Error(ErrorCode::invalid_argument,
              "--classifier must be builtin:<model-file> or exec:<command>, got '" + spec + "'");
}

struct SearchFlags {
  std::string method = "greedy";
  SearchConfig config;
  bool serial = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--method", method, "greedy | hillclimb")->check(CLI::IsMember({"greedy", "hillclimb"}));
    cmd->add_option("--distractors", config.num_distractors, "distractor candidates to try");
    cmd->add_option("--tau", config.tau, "target probability");
    cmd->add_option("--delta", config.delta, "explanation size without penalty");
    cmd->add_option("--lambda", config.lambda, "sparsity weight");
    cmd->add_option("--seed", config.rng_seed, "rng seed (default: $COMTE_SEED or 0)");
    cmd->add_option("--restarts", config.num_restarts, "hill-climb restarts");
    cmd->add_option("--max-attempts", config.max_attempts, "hill-climb failed moves before restart");
    cmd->add_option("--max-iters", config.max_iters, "hill-climb iterations per restart");
    cmd->add_flag("--serial", serial, "use the serial reference kernels");
  }

  ExplainOptions options() const {
    ExplainOptions o;
    o.method = parse_search_method(method);
    o.execution = serial ? Execution::serial : Execution::parallel;
    return o;
  }
};

/// Training data, normalization and classifier shared by explain and evaluate.
struct Workspace {
  Dataset train_raw;
  NormalizationParams params;
  std::vector<MultivariateSample> train;
  std::optional<ClassifierHandle> classifier;

  void load(const std::string& train_path, const std::string& params_path,
            const std::string& classifier_spec) {
    train_raw = read_dataset_file(train_path);
    params = params_path.empty() ? fit_normalization(train_raw.samples)
                                 : normalization_from_json(read_json_file(params_path));
    train = apply_normalization(params, train_raw.samples);
    classifier = load_classifier(classifier_spec, train_raw.schema);
  }

  /// Raw sample by id from the test file when given, otherwise from training.
  MultivariateSample raw_sample(const std::string& id, const std::string& test_path) const {
    if (!test_path.empty()) {
      Dataset test = read_dataset_file(test_path);
      if (test.schema->names() != train_raw.schema->names() ||
          test.schema->length() != train_raw.schema->length())
        throw Error(ErrorCode::schema_mismatch, "test file schema differs from training schema");
      const auto& s = test.at(id);
      return MultivariateSample(train_raw.schema, {s.values().begin(), s.values().end()}, s.id(), s.label());
    }
    return train_raw.at(id);
  }
};

/// Runs the search in normalized space, then renders series from the raw samples.
SearchOutcome explain_raw(const Workspace& ws, const DistractorIndex& index,
                          const MultivariateSample& raw, const std::string& target,
                          const SearchFlags& flags) {
  const auto x = apply_normalization(ws.params, raw);
  SearchOutcome outcome = explain(x, target, *ws.classifier, index, flags.config, flags.options());
  const auto& e = outcome.explanation;
  const MultivariateSample* dist = e.distractor_id.empty() ? nullptr : ws.train_raw.find(e.distractor_id);
  outcome.explanation = make_explanation(raw, dist ? *dist : raw, target, e.mask,
                                         e.achieved_probability, nullptr);
  if (!dist) outcome.explanation.distractor_id.clear();
  return outcome;
}

int run(CLI::App& app, const std::vector<std::string>& args, std::ostream& out) {
  app.require_subcommand(1);
  const std::uint64_t seed = default_seed();

  // normalize
  std::string train_path, params_path, out_path;
  auto* normalize = app.add_subcommand("normalize", "fit min/max normalization on a training set");
  normalize->add_option("--train", train_path)->required();
  normalize->add_option("--out", out_path)->required();

  // train-logistic
  double l1 = 0.0;
  L1TrainOptions train_opts;
  auto* train = app.add_subcommand("train-logistic", "train the sparse logistic pipeline");
  train->add_option("--train", train_path)->required();
  train->add_option("--params", params_path, "normalization parameters (fitted when omitted)");
  train->add_option("--l1", l1, "l1 penalty")->required();
  train->add_option("--steps", train_opts.steps);
  train->add_option("--learning-rate", train_opts.learning_rate);
  train->add_option("--out", out_path)->required();

  // explain
  std::string sample_id, target, classifier_spec, test_path;
  SearchFlags flags;
  flags.config.rng_seed = seed;
  auto* explain_cmd = app.add_subcommand("explain", "counterfactual explanation for one sample");
  explain_cmd->add_option("--train", train_path)->required();
  explain_cmd->add_option("--params", params_path);
  explain_cmd->add_option("--test", test_path, "dataset holding --sample (default: --train)");
  explain_cmd->add_option("--sample", sample_id)->required();
  explain_cmd->add_option("--target-class", target)->required();
  explain_cmd->add_option("--classifier", classifier_spec)->required();
  explain_cmd->add_option("--out", out_path);
  flags.attach(explain_cmd);

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "explanation quality measures");
  evaluate->require_subcommand(1);
  std::string explanation_path, model_path, cohort_path;
  std::optional<std::size_t> truncate_to;
  std::size_t k_neighbors = 5;
  std::string explainer_kind = "search";

  auto* eval_comp = evaluate->add_subcommand("comprehensibility", "number of substituted series");
  eval_comp->add_option("--explanation", explanation_path)->required();
  eval_comp->add_option("--out", out_path);

  auto* eval_faith = evaluate->add_subcommand("faithfulness", "precision/recall against a logistic model");
  eval_faith->add_option("--explanation", explanation_path)->required();
  eval_faith->add_option("--model", model_path)->required();
  eval_faith->add_option("--truncate-to", truncate_to, "keep only the first n explanation metrics");
  eval_faith->add_option("--out", out_path);

  auto* eval_robust = evaluate->add_subcommand("robustness", "local Lipschitz constant over training neighbors");
  eval_robust->add_option("--train", train_path)->required();
  eval_robust->add_option("--params", params_path);
  eval_robust->add_option("--test", test_path);
  eval_robust->add_option("--sample", sample_id)->required();
  eval_robust->add_option("--target-class", target)->required();
  eval_robust->add_option("--classifier", classifier_spec)->required();
  eval_robust->add_option("--k", k_neighbors, "nearest training neighbors");
  eval_robust->add_option("--explainer", explainer_kind, "search | random")->check(CLI::IsMember({"search", "random"}));
  eval_robust->add_option("--out", out_path);
  flags.attach(eval_robust);

  auto* eval_gen = evaluate->add_subcommand("generalizability", "flip ratio of an explanation over a cohort");
  eval_gen->add_option("--explanation", explanation_path)->required();
  eval_gen->add_option("--train", train_path)->required();
  eval_gen->add_option("--params", params_path);
  eval_gen->add_option("--cohort", cohort_path, "dataset of cohort samples")->required();
  eval_gen->add_option("--classifier", classifier_spec)->required();
  eval_gen->add_option("--out", out_path);

  // plot-data
  auto* plot = app.add_subcommand("plot-data", "per-metric series of an explanation as CSV");
  plot->add_option("--explanation", explanation_path)->required();
  plot->add_option("--out", out_path)->required();

  // generate
  GeneratorSpec gen;
  gen.seed = seed;
  std::string classes_csv = "a,b", manifest_path;
  std::vector<std::string> signal_specs;
  auto* generate_cmd = app.add_subcommand("generate", "synthetic labeled dataset");
  generate_cmd->add_option("--metrics", gen.metrics)->required();
  generate_cmd->add_option("--length", gen.length)->required();
  generate_cmd->add_option("--samples", gen.samples)->required();
  generate_cmd->add_option("--classes", classes_csv, "comma-separated class names");
  generate_cmd->add_option("--signal", signal_specs, "class:metric:level|trend|spikes:amplitude[:period]");
  generate_cmd->add_option("--noise", gen.noise_scale);
  generate_cmd->add_option("--seed", gen.seed);
  generate_cmd->add_option("--id-prefix", gen.id_prefix);
  generate_cmd->add_option("--out", out_path)->required();
  generate_cmd->add_option("--manifest", manifest_path);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  app.parse(static_cast<int>(argv.size()), argv.data());

  if (*normalize) {
    const auto ds = read_dataset_file(train_path);
    write_json_file(out_path, normalization_to_json(fit_normalization(ds.samples)));
    return 0;
  }

  if (*train) {
    const auto ds = read_dataset_file(train_path);
    const auto params = params_path.empty() ? fit_normalization(ds.samples)
                                            : normalization_from_json(read_json_file(params_path));
    const auto labels = ds.labels();
    if (labels.size() != 2)
      throw Error(ErrorCode::invalid_argument, "logistic training needs exactly two labels, found " +
                                                   std::to_string(labels.size()));
    const auto normalized = apply_normalization(params, ds.samples);
    const auto features = extract_features_batch(normalized);
    std::vector<int> y;
    for (const auto& s : ds.samples) y.push_back(*s.label() == labels[1] ? 1 : 0);
    train_opts.l1 = l1;
    const auto model = logistic_train_l1(features, y, labels, ds.schema->names(), train_opts);
    write_json_file(out_path, logistic_to_json(model));
    out << ordered_json{{"nonzero_features", model.nonzero_count()},
                        {"used_metrics", model.used_metrics()}}.dump() << '\n';
    return 0;
  }

  if (*explain_cmd) {
    Workspace ws;
    ws.load(train_path, params_path, classifier_spec);
    const auto raw = ws.raw_sample(sample_id, test_path);
    const auto index = build_index(ws.train, *ws.classifier,
                                   flags.serial ? Execution::serial : Execution::parallel);
    emit_json(outcome_to_json(explain_raw(ws, index, raw, target, flags)), out_path, out);
    return 0;
  }

  if (*eval_comp) {
    const auto e = explanation_from_json(read_json_file(explanation_path));
    emit_json({{"sample_id", e.sample_id}, {"comprehensibility", comprehensibility(e)}}, out_path, out);
    return 0;
  }

  if (*eval_faith) {
    auto e = explanation_from_json(read_json_file(explanation_path));
    const auto model = load_builtin_model(model_path);
    if (!model.logistic) throw Error(ErrorCode::invalid_argument, "faithfulness needs a logistic model");
    auto metrics = e.explanation_metrics();
    if (truncate_to && metrics.size() > *truncate_to) metrics.resize(*truncate_to);
    const auto used = model.logistic->used_metrics();
    const auto r = faithfulness(std::set<std::string>(metrics.begin(), metrics.end()),
                                std::set<std::string>(used.begin(), used.end()));
    emit_json({{"sample_id", e.sample_id},
               {"precision", r.precision},
               {"recall", r.recall},
               {"explanation_metrics", r.explanation_metrics},
               {"ground_truth_metrics", r.ground_truth_metrics}},
              out_path, out);
    return 0;
  }

  if (*eval_robust) {
    Workspace ws;
    ws.load(train_path, params_path, classifier_spec);
    const auto x = apply_normalization(ws.params, ws.raw_sample(sample_id, test_path));
    const auto index = build_index(ws.train, *ws.classifier,
                                   flags.serial ? Execution::serial : Execution::parallel);
    std::vector<SamplePtr> pool;
    for (const auto& s : ws.train) pool.push_back(std::make_shared<const MultivariateSample>(s));
    const NeighborIndex all(std::move(pool));
    std::vector<MultivariateSample> neighbors;
    for (const auto& n : all.nearest(x, k_neighbors)) neighbors.push_back(*n.sample);

    MaskExplainer search_explainer = [&](const MultivariateSample& s) {
      return explain(s, target, *ws.classifier, index, flags.config, flags.options()).explanation.mask;
    };
    MaskExplainer explainer = search_explainer;
    if (explainer_kind == "random") {
      // random subset of the size the search would return, seeded per sample id
      explainer = [&](const MultivariateSample& s) {
        const std::size_t size = search_explainer(s).count();
        std::mt19937_64 rng(mix_seed(flags.config.rng_seed, std::hash<std::string>{}(s.id())));
        return random_mask(s.metrics(), size, rng);
      };
    }
    const auto r = lipschitz_robustness(x, explainer, neighbors);
    ordered_json ratios = ordered_json::array();
    for (const auto& [id, ratio] : r.per_neighbor_ratios) ratios.push_back({{"sample_id", id}, {"ratio", ratio}});
    emit_json({{"sample_id", sample_id},
               {"explainer", explainer_kind},
               {"lipschitz", r.lipschitz},
               {"lipschitz_per_sqrt_m", r.lipschitz_per_sqrt_m},
               {"neighbor_count", r.neighbor_count},
               {"per_neighbor_ratios", ratios}},
              out_path, out);
    return 0;
  }

  if (*eval_gen) {
    Workspace ws;
    ws.load(train_path, params_path, classifier_spec);
    const auto e = explanation_from_json(read_json_file(explanation_path));
    const auto* dist = ws.train_raw.find(e.distractor_id);
    if (!dist)
      throw Error(ErrorCode::invalid_argument,
                  "distractor '" + e.distractor_id + "' is not in the training set");
    const auto cohort_raw = read_dataset_file(cohort_path);
    std::vector<MultivariateSample> cohort;
    for (const auto& s : cohort_raw.samples) {
      MultivariateSample rebased(ws.train_raw.schema, {s.values().begin(), s.values().end()}, s.id(), s.label());
      cohort.push_back(apply_normalization(ws.params, rebased));
    }
    const auto r = generalizability(e, apply_normalization(ws.params, *dist), cohort, *ws.classifier);
    emit_json({{"sample_id", e.sample_id},
               {"ratio", r.ratio},
               {"flipped", r.flipped},
               {"cohort_size", r.cohort_size},
               {"empty_cohort", r.empty_cohort}},
              out_path, out);
    return 0;
  }

  if (*plot) {
    const auto e = explanation_from_json(read_json_file(explanation_path));
    std::ofstream csv(out_path);
    if (!csv) throw Error(ErrorCode::io_error, "cannot write '" + out_path + "'");
    write_plot_csv(csv, e);
    return 0;
  }

  if (*generate_cmd) {
    gen.classes.clear();
    std::stringstream cs(classes_csv);
    for (std::string c; std::getline(cs, c, ',');) gen.classes.push_back(c);
    for (const auto& spec : signal_specs) {
      std::vector<std::string> parts;
      std::stringstream ss(spec);
      for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
      if (parts.size() < 4 || parts.size() > 5)
        throw Error(ErrorCode::invalid_argument, "--signal expects class:metric:kind:amplitude[:period]");
      SignalRecipe r;
      r.class_name = parts[0];
      r.metric = std::stoul(parts[1]);
      r.kind = parse_signal_kind(parts[2]);
      r.amplitude = std::stod(parts[3]);
      if (parts.size() == 5) r.period = std::stoul(parts[4]);
      gen.signals.push_back(r);
    }
    const auto data = generate(gen);
    write_dataset_file(out_path, data.samples);
    if (!manifest_path.empty()) write_json_file(manifest_path, data.manifest);
    return 0;
  }
  return 0;
}

void print_error(std::ostream& err, std::string_view code, const std::string& message,
                 const std::string& payload = {}) {
  ordered_json e{{"code", code}, {"message", message}};
  if (!payload.empty()) e["payload"] = payload;
  err << ordered_json{{"error", e}}.dump() << '\n';
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Counterfactual explanations for multivariate time-series classifiers", "comte"};
  try {
    return run(app, args, out);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    print_error(err, "usage", e.what());
    return 64;
  } catch (const Error& e) {
    print_error(err, error_code_name(e.code()), e.what(), e.payload());
    return 2;
  } catch (const std::exception& e) {
    print_error(err, "internal", e.what());
    return 3;
  }
}

}  // namespace comte
