#pragma once

#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "comte/classifier.hpp"
#include "comte/core.hpp"

namespace comte {

using SamplePtr = std::shared_ptr<const MultivariateSample>;

struct Neighbor {
  SamplePtr sample;
  double distance;  // Euclidean over flattened values
};

/// Exact k-nearest-neighbor index over flattened samples (metric-major, time-minor).
///
/// Backed by a KD-tree. Ordering is ascending distance with ties broken by
/// sample id, identical to the linear scan in nearest_bruteforce().
class NeighborIndex {
 public:
  NeighborIndex() = default;
  explicit NeighborIndex(std::vector<SamplePtr> samples);

  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }
  const std::vector<SamplePtr>& samples() const noexcept { return samples_; }
  const MultivariateSample* find(std::string_view sample_id) const;

  std::vector<Neighbor> nearest(const MultivariateSample& query, std::size_t n) const;
  /// Reference linear scan.
  std::vector<Neighbor> nearest_bruteforce(const MultivariateSample& query, std::size_t n) const;

 private:
  struct Node {
    std::size_t point = 0;  // index into samples_
    std::size_t axis = 0;
    std::ptrdiff_t left = -1;
    std::ptrdiff_t right = -1;
  };

  std::ptrdiff_t build(std::span<std::size_t> points, std::size_t depth);
  void search(std::ptrdiff_t node, std::span<const double> query, std::size_t n,
              std::vector<std::pair<double, std::size_t>>& best) const;
  bool better(double d, std::size_t point, const std::pair<double, std::size_t>& than) const;

  std::vector<SamplePtr> samples_;
  std::vector<Node> nodes_;
  std::ptrdiff_t root_ = -1;
  std::size_t dims_ = 0;
};

/// Correctly classified training samples of one class.
struct ClassIndex {
  std::string class_name;
  NeighborIndex index;
};

using DistractorIndex = std::map<std::string, ClassIndex, std::less<>>;

/// Optional down-sampling applied before indexing (random subset, k-means, ...).
using TrainingFilter =
    std::function<std::vector<SamplePtr>(const std::vector<SamplePtr>& training)>;

/// Sample s enters index[c] iff label(s) = c and argmax f(s) = c. Every class
/// of the classifier gets an entry, possibly empty.
DistractorIndex build_index(std::span<const MultivariateSample> training,
                            const ClassifierHandle& f,
                            Execution execution = Execution::parallel,
                            const TrainingFilter& filter = {});

/// The n nearest distractors of class c; throws no_distractor for an empty or missing class.
std::vector<Neighbor> nearest_distractors(const DistractorIndex& index,
                                          std::string_view class_name,
                                          const MultivariateSample& x_test, std::size_t n);

}  // namespace comte
