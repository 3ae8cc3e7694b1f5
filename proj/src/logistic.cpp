#include "comte/logistic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace comte {

std::vector<std::size_t> LogisticModel::support() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < weights.size(); ++i)
    if (weights[i] != 0.0) out.push_back(i);
  return out;
}

std::vector<std::string> LogisticModel::used_metrics() const {
  std::vector<std::string> out;
  for (std::size_t j = 0; j < metric_names.size(); ++j) {
    for (std::size_t f = 0; f < kFeaturesPerMetric; ++f) {
      if (weights.at(j * kFeaturesPerMetric + f) != 0.0) {
        out.push_back(metric_names[j]);
        break;
      }
    }
  }
  return out;
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

ClassProbabilities logistic_predict(const LogisticModel& model, const MultivariateSample& x) {
  if (model.class_names.size() != 2)
    throw Error(ErrorCode::invalid_argument, "logistic model needs exactly two classes");
  const FeatureVector phi = extract_features(x);
  if (phi.values.size() != model.weights.size()) {
    throw Error(ErrorCode::schema_mismatch,
                "logistic model has " + std::to_string(model.weights.size()) +
                    " weights, sample yields " + std::to_string(phi.values.size()) + " features");
  }
  const double y = sigmoid(dot(model.weights, phi.values));
  return ClassProbabilities(model.class_names, {1.0 - y, y});
}

double soft_threshold(double v, double threshold) {
  if (v > threshold) return v - threshold;
  if (v < -threshold) return v + threshold;
  return 0.0;
}

LogisticModel logistic_train_l1(std::span<const FeatureVector> features,
                                std::span<const int> labels,
                                std::vector<std::string> class_names,
                                std::vector<std::string> metric_names,
                                const L1TrainOptions& options) {
  if (features.size() < 2 || features.size() != labels.size())
    throw Error(ErrorCode::invalid_argument, "training needs at least two labeled samples");
  if (class_names.size() != 2)
    throw Error(ErrorCode::invalid_argument, "logistic training needs exactly two classes");
  const auto positives = std::count(labels.begin(), labels.end(), 1);
  if (positives == 0 || positives == static_cast<std::ptrdiff_t>(labels.size()))
    throw Error(ErrorCode::invalid_argument, "training data contains a single class");
  if (options.l1 < 0.0 || options.learning_rate <= 0.0)
    throw Error(ErrorCode::invalid_argument, "l1 must be >= 0 and learning rate > 0");

  const std::size_t d = features.front().values.size();
  for (const auto& fv : features)
    if (fv.values.size() != d) throw Error(ErrorCode::schema_mismatch, "ragged feature vectors");
  if (d != metric_names.size() * kFeaturesPerMetric)
    throw Error(ErrorCode::schema_mismatch, "feature dimension does not match metric count");

  const auto n = static_cast<std::ptrdiff_t>(features.size());
  std::vector<double> w(d, 0.0);
  std::vector<double> residual(features.size());
  std::vector<double> grad(d);
  const double threshold = options.learning_rate * options.l1;

  for (std::size_t step = 0; step < options.steps; ++step) {
    // residuals are independent per sample; the gradient sum stays serial so
    // both execution modes produce identical weights
    if (options.execution == Execution::parallel) {
#pragma omp parallel for schedule(static)
      for (std::ptrdiff_t i = 0; i < n; ++i)
        residual[i] = sigmoid(dot(w, features[i].values)) - labels[i];
    } else {
      for (std::ptrdiff_t i = 0; i < n; ++i)
        residual[i] = sigmoid(dot(w, features[i].values)) - labels[i];
    }
    std::fill(grad.begin(), grad.end(), 0.0);
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const auto& x = features[i].values;
      for (std::size_t k = 0; k < d; ++k) grad[k] += residual[i] * x[k];
    }
    for (std::size_t k = 0; k < d; ++k) {
      const double g = grad[k] / static_cast<double>(n);
      w[k] = soft_threshold(w[k] - options.learning_rate * g, threshold);
    }
  }
  return LogisticModel{std::move(class_names), std::move(metric_names), std::move(w)};
}

ClassifierHandle make_logistic_classifier(LogisticModel model) {
  auto names = model.class_names;
  auto shared = std::make_shared<const LogisticModel>(std::move(model));
  return ClassifierHandle(
      std::move(names),
      [shared](const MultivariateSample& x) { return logistic_predict(*shared, x); },
      /*concurrent_safe=*/true);
}

}  // namespace comte
