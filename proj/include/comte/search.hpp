#pragma once

#include <atomic>
#include <cstdint>
#include <random>
#include <string_view>

#include "comte/classifier.hpp"
#include "comte/core.hpp"
#include "comte/distractor_index.hpp"
#include "comte/normalization.hpp"

namespace comte {

struct SearchConfig {
  double tau = 0.95;                  // target probability
  std::size_t delta = 3;              // explanation size that is not penalized
  double lambda = 0.01;               // sparsity weight
  std::size_t num_distractors = 3;
  std::uint64_t rng_seed = 0;
  std::size_t num_restarts = 5;
  std::size_t max_attempts = 50;
  std::size_t max_iters = 1000;

  void validate() const;
};

enum class SearchMethod { greedy, hillclimb };
enum class OutcomeMethod { greedy, hillclimb, hillclimb_fallback_greedy };

std::string_view method_name(OutcomeMethod method);
SearchMethod parse_search_method(std::string_view name);

/// f_c(combine(x_test, x_dist, A)) as a function of the mask, counting classifier calls.
class MaskObjective {
 public:
  MaskObjective(const MultivariateSample& x_test, const MultivariateSample& x_dist,
                const ClassifierHandle& f, std::size_t class_index);

  double probability(const SubstitutionMask& mask) const;
  std::size_t metrics() const noexcept { return x_test_.metrics(); }
  std::size_t evaluations() const noexcept { return evaluations_.load(); }
  const ClassifierHandle& classifier() const noexcept { return f_; }

 private:
  const MultivariateSample& x_test_;
  const MultivariateSample& x_dist_;
  const ClassifierHandle& f_;
  std::size_t class_index_;
  mutable std::atomic<std::size_t> evaluations_{0};
};

/// Sequential greedy search: repeatedly substitutes the single metric with the
/// largest probability gain (ties to the lowest index) until f_c >= tau.
/// Throws distractor_below_target when the full substitution stays below tau.
/// The parallel path scores candidate metrics concurrently when the classifier allows it.
SubstitutionMask greedy_search(const MaskObjective& objective, double tau,
                               Execution execution = Execution::serial);

/// One uniformly chosen bit flipped.
SubstitutionMask random_neighbor(const SubstitutionMask& mask, std::mt19937_64& rng);

/// Random-restart hill climbing on the relaxed loss with target `tau`.
/// Uses config.rng_seed, num_restarts, max_attempts, max_iters, delta and lambda.
/// Returns the lowest-loss accepted state over all restarts (earliest on ties).
SubstitutionMask hill_climb(const MaskObjective& objective, const SearchConfig& config,
                            double tau);

/// Clears bits (ascending, repeated to a fixed point) that are not needed:
/// while f_c >= tau a bit goes if f_c stays >= tau; otherwise a bit goes if
/// clearing it does not lower f_c by more than 1e-12.
SubstitutionMask prune_mask(const MaskObjective& objective, const SubstitutionMask& mask,
                            double tau);

inline constexpr double kPruneTolerance = 1e-12;

struct SearchOutcome {
  Explanation explanation;
  OutcomeMethod method = OutcomeMethod::greedy;
  double loss = 0.0;
  std::size_t evaluations = 0;
  std::size_t distractors_tried = 0;
  /// False when no candidate reached tau and the argmax-only relaxation was used.
  bool tau_qualified = true;
};

struct ExplainOptions {
  SearchMethod method = SearchMethod::greedy;
  Execution execution = Execution::parallel;
  /// When set, substituted series in the explanation are mapped back to original units.
  const NormalizationParams* normalization = nullptr;
};

/// Sweeps the nearest distractors of class c and keeps the minimum relaxed-loss explanation
/// (ties to the nearest distractor). Serial and parallel sweeps give identical outcomes.
SearchOutcome explain(const MultivariateSample& x_test, std::string_view target_class,
                      const ClassifierHandle& f, const DistractorIndex& index,
                      const SearchConfig& config, const ExplainOptions& options = {});

/// Builds the user-facing explanation for a mask.
Explanation make_explanation(const MultivariateSample& x_test, const MultivariateSample& x_dist,
                             std::string_view target_class, const SubstitutionMask& mask,
                             double achieved_probability,
                             const NormalizationParams* normalization);

}  // namespace comte
