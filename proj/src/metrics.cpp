#include "comte/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>

#include "comte/random.hpp"

namespace comte {

FaithfulnessReport faithfulness(const std::set<std::string>& explanation_metrics,
                                const std::set<std::string>& ground_truth_metrics) {
  FaithfulnessReport r;
  r.explanation_metrics = explanation_metrics;
  r.ground_truth_metrics = ground_truth_metrics;
  std::size_t common = 0;
  for (const auto& e : explanation_metrics) common += ground_truth_metrics.count(e);
  r.precision = explanation_metrics.empty()
                    ? 1.0
                    : static_cast<double>(common) / static_cast<double>(explanation_metrics.size());
  r.recall = ground_truth_metrics.empty()
                 ? 1.0
                 : static_cast<double>(common) / static_cast<double>(ground_truth_metrics.size());
  return r;
}

FaithfulnessReport faithfulness(const Explanation& explanation, const LogisticModel& model) {
  const auto e = explanation.explanation_metrics();
  const auto g = model.used_metrics();
  return faithfulness(std::set<std::string>(e.begin(), e.end()),
                      std::set<std::string>(g.begin(), g.end()));
}

std::size_t comprehensibility(const SubstitutionMask& mask) { return mask.count(); }
std::size_t comprehensibility(const Explanation& explanation) {
  return comprehensibility(explanation.mask);
}

RobustnessReport lipschitz_robustness(const MultivariateSample& x_test,
                                      const MaskExplainer& explainer,
                                      std::span<const MultivariateSample> neighbors) {
  RobustnessReport r;
  const SubstitutionMask base = explainer(x_test);
  for (const auto& neighbor : neighbors) {
    const double distance = euclidean_distance(x_test, neighbor);
    if (distance == 0.0) continue;
    const SubstitutionMask other = explainer(neighbor);
    if (other.size() != base.size())
      throw Error(ErrorCode::schema_mismatch, "explainer returned masks of different widths");
    std::size_t differing = 0;
    for (std::size_t j = 0; j < base.size(); ++j) differing += base.test(j) != other.test(j);
    const double ratio = std::sqrt(static_cast<double>(differing)) / distance;
    r.per_neighbor_ratios.emplace_back(neighbor.id(), ratio);
    r.lipschitz = std::max(r.lipschitz, ratio);
  }
  if (r.per_neighbor_ratios.empty()) {
    throw Error(ErrorCode::degenerate_input,
                "every neighbor of '" + x_test.id() + "' is at distance 0");
  }
  r.neighbor_count = r.per_neighbor_ratios.size();
  r.lipschitz_per_sqrt_m = r.lipschitz / std::sqrt(static_cast<double>(x_test.metrics()));
  return r;
}

SubstitutionMask random_mask(std::size_t m, std::size_t size, std::mt19937_64& rng) {
  if (size > m) throw Error(ErrorCode::invalid_argument, "random mask larger than the metric count");
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  // partial Fisher-Yates
  for (std::size_t i = 0; i < size; ++i)
    std::swap(order[i], order[i + uniform_index(rng, m - i)]);
  return SubstitutionMask::from_indices(m, std::span(order).first(size));
}

GeneralizabilityReport generalizability(const SubstitutionMask& mask,
                                        const MultivariateSample& x_dist,
                                        std::span<const MultivariateSample> cohort,
                                        const ClassifierHandle& f, std::string_view target_class,
                                        Execution execution) {
  GeneralizabilityReport r;
  r.cohort_size = cohort.size();
  if (cohort.empty()) {
    r.empty_cohort = true;
    return r;
  }
  const std::size_t c = f.class_index(target_class);
  const auto n = static_cast<std::ptrdiff_t>(cohort.size());
  std::vector<std::uint8_t> flipped(cohort.size(), 0);
  std::vector<std::exception_ptr> errors(cohort.size());
  auto apply = [&](std::ptrdiff_t i) {
    try {
      flipped[i] = f.evaluate(combine(cohort[i], x_dist, mask)).argmax() == c;
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  if (execution == Execution::parallel && f.concurrent_safe()) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) apply(i);
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) apply(i);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  r.flipped = static_cast<std::size_t>(std::count(flipped.begin(), flipped.end(), 1));
  r.ratio = static_cast<double>(r.flipped) / static_cast<double>(r.cohort_size);
  return r;
}

GeneralizabilityReport generalizability(const Explanation& explanation,
                                        const MultivariateSample& x_dist,
                                        std::span<const MultivariateSample> cohort,
                                        const ClassifierHandle& f, Execution execution) {
  if (!explanation.distractor_id.empty() && x_dist.id() != explanation.distractor_id) {
    throw Error(ErrorCode::invalid_argument, "distractor '" + x_dist.id() +
                                                 "' does not match the explanation's '" +
                                                 explanation.distractor_id + "'");
  }
  return generalizability(explanation.mask, x_dist, cohort, f, explanation.target_class,
                          execution);
}

}  // namespace comte
