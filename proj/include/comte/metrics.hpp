#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "comte/classifier.hpp"
#include "comte/core.hpp"
#include "comte/logistic.hpp"

namespace comte {

struct FaithfulnessReport {
  double precision = 1.0;
  double recall = 0.0;
  std::set<std::string> explanation_metrics;
  std::set<std::string> ground_truth_metrics;
};

/// precision = |E n G| / |E| (1 for an empty explanation), recall = |E n G| / |G|
/// (1 when the ground truth is empty).
FaithfulnessReport faithfulness(const std::set<std::string>& explanation_metrics,
                                const std::set<std::string>& ground_truth_metrics);

/// Ground truth: metrics with at least one nonzero feature weight in the model.
FaithfulnessReport faithfulness(const Explanation& explanation, const LogisticModel& model);

/// Number of substituted time series.
std::size_t comprehensibility(const Explanation& explanation);
std::size_t comprehensibility(const SubstitutionMask& mask);

struct RobustnessReport {
  double lipschitz = 0.0;
  /// lipschitz / sqrt(m); a scale-free variant for comparing datasets of different width.
  double lipschitz_per_sqrt_m = 0.0;
  std::size_t neighbor_count = 0;
  std::vector<std::pair<std::string, double>> per_neighbor_ratios;
};

using MaskExplainer = std::function<SubstitutionMask(const MultivariateSample&)>;

/// max over neighbors of |xi(x) - xi(x_j)|_2 / |x - x_j|_2 with xi the binary mask.
/// Zero-distance neighbors are skipped; throws degenerate_input if none remain.
RobustnessReport lipschitz_robustness(const MultivariateSample& x_test,
                                      const MaskExplainer& explainer,
                                      std::span<const MultivariateSample> neighbors);

/// Baseline explainer: a uniformly random subset of `size` metrics.
SubstitutionMask random_mask(std::size_t m, std::size_t size, std::mt19937_64& rng);

struct GeneralizabilityReport {
  double ratio = 0.0;
  std::size_t flipped = 0;
  std::size_t cohort_size = 0;
  bool empty_cohort = false;
};

/// Fraction of cohort samples whose argmax becomes target_class after applying the
/// explanation's substitutions from x_dist. Empty cohort yields 0 with the flag set.
GeneralizabilityReport generalizability(const SubstitutionMask& mask,
                                        const MultivariateSample& x_dist,
                                        std::span<const MultivariateSample> cohort,
                                        const ClassifierHandle& f, std::string_view target_class,
                                        Execution execution = Execution::parallel);

GeneralizabilityReport generalizability(const Explanation& explanation,
                                        const MultivariateSample& x_dist,
                                        std::span<const MultivariateSample> cohort,
                                        const ClassifierHandle& f,
                                        Execution execution = Execution::parallel);

}  // namespace comte
