#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "comte/core.hpp"

namespace comte {

/// How a kernel runs: the serial path is the reference, the parallel path uses OpenMP.
enum class Execution { serial, parallel };

/// Uniform black-box classifier: sample -> k class probabilities.
///
/// Copies share the underlying model. A handle that does not advertise
/// concurrent safety must only be called from one thread at a time; the
/// parallel kernels fall back to their serial path for such handles.
class ClassifierHandle {
 public:
  using EvaluateFn = std::function<ClassProbabilities(const MultivariateSample&)>;
  using BatchFn =
      std::function<std::vector<ClassProbabilities>(std::span<const MultivariateSample>)>;

  ClassifierHandle(std::vector<std::string> class_names, EvaluateFn evaluate,
                   bool concurrent_safe, BatchFn batch = {});

  const std::vector<std::string>& class_names() const noexcept { return state_->class_names; }
  bool concurrent_safe() const noexcept { return state_->concurrent_safe; }

  ClassProbabilities evaluate(const MultivariateSample& x) const;
  std::vector<ClassProbabilities> evaluate_batch(std::span<const MultivariateSample> xs) const;

  /// Index of a class name; throws invalid_argument for unknown classes.
  std::size_t class_index(std::string_view class_name) const;

  /// Probability of one class.
  double probability(const MultivariateSample& x, std::size_t class_index) const;

 private:
  struct State {
    std::vector<std::string> class_names;
    EvaluateFn evaluate;
    BatchFn batch;
    bool concurrent_safe;
  };
  std::shared_ptr<const State> state_;
};

/// Strict loss (1 - f_c(x'))^2 + lambda * |A| evaluated through a classifier.
double loss_strict(const ClassifierHandle& f, std::size_t class_index,
                   const SubstitutionMask& mask, const MultivariateSample& x_prime, double lambda);

/// Relaxed loss ((tau - f_c(x'))+)^2 + lambda * (|A| - delta)+ evaluated through a classifier.
double loss_relaxed(const ClassifierHandle& f, std::size_t class_index,
                    const SubstitutionMask& mask, const MultivariateSample& x_prime, double tau,
                    std::size_t delta, double lambda);

}  // namespace comte
