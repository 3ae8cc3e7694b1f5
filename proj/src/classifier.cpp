#include "comte/classifier.hpp"

#include <algorithm>

namespace comte {

ClassifierHandle::ClassifierHandle(std::vector<std::string> class_names, EvaluateFn evaluate,
                                   bool concurrent_safe, BatchFn batch) {
  if (class_names.empty())
    throw Error(ErrorCode::invalid_argument, "classifier needs at least one class");
  if (!evaluate) throw Error(ErrorCode::invalid_argument, "classifier without evaluate function");
  state_ = std::make_shared<const State>(
      State{std::move(class_names), std::move(evaluate), std::move(batch), concurrent_safe});
}

ClassProbabilities ClassifierHandle::evaluate(const MultivariateSample& x) const {
  ClassProbabilities p = state_->evaluate(x);
  if (p.class_names() != state_->class_names)
    throw Error(ErrorCode::classifier_failure, "classifier changed its class ordering");
  return p;
}

std::vector<ClassProbabilities> ClassifierHandle::evaluate_batch(
    std::span<const MultivariateSample> xs) const {
  if (state_->batch) return state_->batch(xs);
  std::vector<ClassProbabilities> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(evaluate(x));
  return out;
}

std::size_t ClassifierHandle::class_index(std::string_view class_name) const {
  const auto& names = state_->class_names;
  auto it = std::find(names.begin(), names.end(), class_name);
  if (it == names.end())
    throw Error(ErrorCode::invalid_argument,
                "classifier has no class '" + std::string(class_name) + "'");
  return static_cast<std::size_t>(it - names.begin());
}

double ClassifierHandle::probability(const MultivariateSample& x, std::size_t class_index) const {
  return evaluate(x)[class_index];
}

double loss_strict(const ClassifierHandle& f, std::size_t class_index,
                   const SubstitutionMask& mask, const MultivariateSample& x_prime,
                   double lambda) {
  return loss_strict(f.probability(x_prime, class_index), mask.count(), lambda);
}

double loss_relaxed(const ClassifierHandle& f, std::size_t class_index,
                    const SubstitutionMask& mask, const MultivariateSample& x_prime, double tau,
                    std::size_t delta, double lambda) {
  return loss_relaxed(f.probability(x_prime, class_index), mask.count(), tau, delta, lambda);
}

}  // namespace comte
