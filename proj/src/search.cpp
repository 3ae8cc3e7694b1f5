#include "comte/search.hpp"

#include <algorithm>
#include <exception>
#include <limits>
#include <optional>
#include <utility>

#include "comte/random.hpp"

namespace comte {

void SearchConfig::validate() const {
  if (!(tau > 0.0 && tau <= 1.0)) throw Error(ErrorCode::invalid_argument, "tau must be in (0, 1]");
  if (lambda < 0.0) throw Error(ErrorCode::invalid_argument, "lambda must be non-negative");
  if (num_distractors < 1 || num_restarts < 1 || max_attempts < 1 || max_iters < 1)
    throw Error(ErrorCode::invalid_argument, "search budgets must be >= 1");
}

std::string_view method_name(OutcomeMethod method) {
  switch (method) {
    case OutcomeMethod::greedy: return "greedy";
    case OutcomeMethod::hillclimb: return "hillclimb";
    case OutcomeMethod::hillclimb_fallback_greedy: return "hillclimb_fallback_greedy";
  }
  return "unknown";
}

SearchMethod parse_search_method(std::string_view name) {
  if (name == "greedy") return SearchMethod::greedy;
  if (name == "hillclimb") return SearchMethod::hillclimb;
  throw Error(ErrorCode::invalid_argument, "unknown search method '" + std::string(name) + "'");
}

MaskObjective::MaskObjective(const MultivariateSample& x_test, const MultivariateSample& x_dist,
                             const ClassifierHandle& f, std::size_t class_index)
    : x_test_(x_test), x_dist_(x_dist), f_(f), class_index_(class_index) {
  if (!same_schema(x_test, x_dist))
    throw Error(ErrorCode::schema_mismatch, "test sample and distractor differ in schema");
  if (class_index >= f.class_names().size())
    throw Error(ErrorCode::invalid_argument, "class index out of range");
}

double MaskObjective::probability(const SubstitutionMask& mask) const {
  ++evaluations_;
  return f_.probability(combine(x_test_, x_dist_, mask), class_index_);
}

SubstitutionMask greedy_search(const MaskObjective& objective, double tau, Execution execution) {
  const std::size_t m = objective.metrics();
  SubstitutionMask chosen(m);
  double p = objective.probability(chosen);
  const bool parallel = execution == Execution::parallel && objective.classifier().concurrent_safe();
  std::vector<double> scores(m);
  std::vector<std::exception_ptr> errors(m);

  while (p < tau) {
    if (chosen.count() == m) {
      throw Error(ErrorCode::distractor_below_target,
                  "distractor below target: full substitution reaches " + std::to_string(p) +
                      " < tau " + std::to_string(tau));
    }
    const auto n = static_cast<std::ptrdiff_t>(m);
    auto score = [&](std::ptrdiff_t j) {
      if (chosen.test(j)) return;
      try {
        scores[j] = objective.probability(chosen.flipped(j));
      } catch (...) {
        errors[j] = std::current_exception();
      }
    };
    if (parallel) {
#pragma omp parallel for schedule(dynamic)
      for (std::ptrdiff_t j = 0; j < n; ++j) score(j);
    } else {
      for (std::ptrdiff_t j = 0; j < n; ++j) score(j);
    }
    for (auto& e : errors)
      if (e) std::rethrow_exception(std::exchange(e, nullptr));

    // best improvement, even when negative; strict > keeps the lowest index on ties
    std::optional<std::size_t> best;
    for (std::size_t j = 0; j < m; ++j) {
      if (chosen.test(j)) continue;
      if (!best || scores[j] > scores[*best]) best = j;
    }
    chosen.set(*best);
    p = scores[*best];
  }
  return chosen;
}

SubstitutionMask random_neighbor(const SubstitutionMask& mask, std::mt19937_64& rng) {
  if (mask.size() == 0) throw Error(ErrorCode::invalid_argument, "random neighbor of an empty mask");
  return mask.flipped(uniform_index(rng, mask.size()));
}

SubstitutionMask hill_climb(const MaskObjective& objective, const SearchConfig& config,
                            double tau) {
  config.validate();
  const std::size_t m = objective.metrics();
  std::mt19937_64 rng(config.rng_seed);
  const double p_init = std::min(0.5, static_cast<double>(config.delta) / static_cast<double>(m));
  auto loss_of = [&](const SubstitutionMask& a) {
    return loss_relaxed(objective.probability(a), a.count(), tau, config.delta, config.lambda);
  };

  SubstitutionMask best(m);
  double best_loss = std::numeric_limits<double>::infinity();
  for (std::size_t restart = 0; restart < config.num_restarts; ++restart) {
    SubstitutionMask current(m);
    for (std::size_t j = 0; j < m; ++j) current.set(j, uniform01(rng) < p_init);
    double loss = loss_of(current);
    if (loss < best_loss) {
      best = current;
      best_loss = loss;
    }
    std::size_t attempts = 0;
    std::size_t iters = 0;
    while (attempts < config.max_attempts && iters < config.max_iters && best_loss > 0.0) {
      ++iters;
      SubstitutionMask candidate = random_neighbor(current, rng);
      const double candidate_loss = loss_of(candidate);
      if (candidate_loss <= loss) {
        attempts = 0;
        current = std::move(candidate);
        loss = candidate_loss;
        if (loss < best_loss) {
          best = current;
          best_loss = loss;
        }
      } else {
        ++attempts;
      }
    }
    // nothing can beat a zero loss, so later restarts would not change the answer
    if (best_loss == 0.0) break;
  }
  return best;
}

SubstitutionMask prune_mask(const MaskObjective& objective, const SubstitutionMask& mask,
                            double tau) {
  SubstitutionMask current = mask;
  if (current.empty()) return current;
  double p = objective.probability(current);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t j : current.indices()) {
      SubstitutionMask candidate = current.flipped(j);
      const double q = objective.probability(candidate);
      const bool clear = p >= tau ? q >= tau : (q >= tau || q >= p - kPruneTolerance);
      if (clear) {
        current = std::move(candidate);
        p = q;
        changed = true;
      }
    }
  }
  return current;
}

Explanation make_explanation(const MultivariateSample& x_test, const MultivariateSample& x_dist,
                             std::string_view target_class, const SubstitutionMask& mask,
                             double achieved_probability,
                             const NormalizationParams* normalization) {
  Explanation e;
  e.sample_id = x_test.id();
  e.distractor_id = x_dist.id();
  e.target_class = std::string(target_class);
  e.metric_names = x_test.schema().names();
  e.mask = mask;
  e.achieved_probability = achieved_probability;
  for (std::size_t j : mask.indices()) {
    SubstitutedMetric s;
    s.metric = x_test.schema().name(j);
    if (normalization) {
      s.test_series = invert_series(*normalization, j, x_test.row(j));
      s.distractor_series = invert_series(*normalization, j, x_dist.row(j));
    } else {
      s.test_series.assign(x_test.row(j).begin(), x_test.row(j).end());
      s.distractor_series.assign(x_dist.row(j).begin(), x_dist.row(j).end());
    }
    e.substituted_metrics.push_back(std::move(s));
  }
  return e;
}

namespace {

struct CandidateResult {
  SubstitutionMask mask;
  OutcomeMethod method = OutcomeMethod::greedy;
  double probability = 0.0;
  double loss = std::numeric_limits<double>::infinity();
  std::size_t evaluations = 0;
  std::exception_ptr error;
};

CandidateResult run_candidate(const MultivariateSample& x_test, const MultivariateSample& x_dist,
                              const ClassifierHandle& f, std::size_t class_index,
                              const SearchConfig& config, const ExplainOptions& options,
                              double target, std::size_t rank, Execution inner) {
  CandidateResult r;
  MaskObjective objective(x_test, x_dist, f, class_index);
  SubstitutionMask mask;
  if (options.method == SearchMethod::greedy) {
    mask = prune_mask(objective, greedy_search(objective, target, inner), target);
    r.method = OutcomeMethod::greedy;
  } else {
    SearchConfig local = config;
    local.rng_seed = mix_seed(config.rng_seed, rank);
    mask = prune_mask(objective, hill_climb(objective, local, target), target);
    r.method = OutcomeMethod::hillclimb;
    if (mask.empty() || objective.probability(mask) < target) {
      mask = prune_mask(objective, greedy_search(objective, target, inner), target);
      r.method = OutcomeMethod::hillclimb_fallback_greedy;
    }
  }
  r.probability = objective.probability(mask);
  r.loss = loss_relaxed(r.probability, mask.count(), config.tau, config.delta, config.lambda);
  r.mask = std::move(mask);
  r.evaluations = objective.evaluations();
  return r;
}

}  // namespace

SearchOutcome explain(const MultivariateSample& x_test, std::string_view target_class,
                      const ClassifierHandle& f, const DistractorIndex& index,
                      const SearchConfig& config, const ExplainOptions& options) {
  config.validate();
  const std::size_t c = f.class_index(target_class);
  std::size_t evaluations = 1;
  const double p_test = f.probability(x_test, c);

  if (p_test >= config.tau) {
    // already at the target: the empty substitution is the explanation
    SearchOutcome out;
    auto it = index.find(target_class);
    std::optional<MultivariateSample> nearest;
    if (it != index.end() && !it->second.index.empty())
      nearest = *it->second.index.nearest(x_test, 1).front().sample;
    out.explanation = make_explanation(x_test, nearest ? *nearest : x_test, target_class,
                                       SubstitutionMask(x_test.metrics()), p_test,
                                       options.normalization);
    if (!nearest) out.explanation.distractor_id.clear();
    out.method = options.method == SearchMethod::greedy ? OutcomeMethod::greedy
                                                        : OutcomeMethod::hillclimb;
    out.loss = loss_relaxed(p_test, 0, config.tau, config.delta, config.lambda);
    out.evaluations = evaluations;
    return out;
  }

  const auto neighbors = nearest_distractors(index, target_class, x_test, config.num_distractors);

  // qualify candidates: f_c(x_dist) >= tau
  std::vector<double> dist_probability(neighbors.size());
  for (std::size_t i = 0; i < neighbors.size(); ++i)
    dist_probability[i] = f.probability(*neighbors[i].sample, c);
  evaluations += neighbors.size();

  std::vector<std::size_t> chosen;
  std::vector<double> targets;
  for (std::size_t i = 0; i < neighbors.size(); ++i) {
    if (dist_probability[i] >= config.tau) {
      chosen.push_back(i);
      targets.push_back(config.tau);
    }
  }
  const bool qualified = !chosen.empty();
  if (!qualified) {
    // argmax-only distractors: a full substitution still reaches f_c(x_dist)
    for (std::size_t i = 0; i < neighbors.size(); ++i) {
      chosen.push_back(i);
      targets.push_back(dist_probability[i]);
    }
  }

  const auto n = static_cast<std::ptrdiff_t>(chosen.size());
  std::vector<CandidateResult> results(chosen.size());
  const bool parallel_sweep =
      options.execution == Execution::parallel && f.concurrent_safe() && n > 1;
  const Execution inner = parallel_sweep ? Execution::serial : options.execution;
  auto work = [&](std::ptrdiff_t k) {
    try {
      results[k] = run_candidate(x_test, *neighbors[chosen[k]].sample, f, c, config, options,
                                 targets[k], chosen[k], inner);
    } catch (...) {
      results[k].error = std::current_exception();
    }
  };
  if (parallel_sweep) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t k = 0; k < n; ++k) work(k);
  } else {
    for (std::ptrdiff_t k = 0; k < n; ++k) work(k);
  }

  std::optional<std::size_t> best;
  for (std::size_t k = 0; k < results.size(); ++k) {
    if (results[k].error) std::rethrow_exception(results[k].error);
    evaluations += results[k].evaluations;
    if (!best || results[k].loss < results[*best].loss) best = k;
  }

  const auto& winner = results[*best];
  SearchOutcome out;
  out.explanation = make_explanation(x_test, *neighbors[chosen[*best]].sample, target_class,
                                     winner.mask, winner.probability, options.normalization);
  out.method = winner.method;
  out.loss = winner.loss;
  out.evaluations = evaluations;
  out.distractors_tried = chosen.size();
  out.tau_qualified = qualified;
  return out;
}

}  // namespace comte
