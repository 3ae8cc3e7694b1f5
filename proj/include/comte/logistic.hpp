#pragma once

#include <span>
#include <string>
#include <vector>

#include "comte/classifier.hpp"
#include "comte/features.hpp"

namespace comte {

/// Binary logistic regression without intercept over the 11-feature pipeline:
/// P(class_names[1]) = S(w . phi(x)).
struct LogisticModel {
  std::vector<std::string> class_names;  // exactly two; the second is the positive class
  std::vector<std::string> metric_names;
  std::vector<double> weights;           // 11 * m

  std::vector<std::size_t> support() const;  // indices of nonzero weights
  std::size_t nonzero_count() const { return support().size(); }
  /// Metrics with at least one nonzero feature weight, in schema order.
  std::vector<std::string> used_metrics() const;
};

double sigmoid(double z);

ClassProbabilities logistic_predict(const LogisticModel& model, const MultivariateSample& x);

struct L1TrainOptions {
  double l1 = 0.0;             // lambda_1
  std::size_t steps = 2000;
  double learning_rate = 0.5;
  Execution execution = Execution::parallel;
};

/// Proximal gradient (ISTA) on the mean logistic loss plus l1 * |w|_1, starting at w = 0.
/// labels[i] is 1 for class_names[1], 0 for class_names[0].
LogisticModel logistic_train_l1(std::span<const FeatureVector> features,
                                std::span<const int> labels,
                                std::vector<std::string> class_names,
                                std::vector<std::string> metric_names,
                                const L1TrainOptions& options);

/// Soft-thresholding operator S_t(v) = sign(v) * max(|v| - t, 0).
double soft_threshold(double v, double threshold);

ClassifierHandle make_logistic_classifier(LogisticModel model);

}  // namespace comte
