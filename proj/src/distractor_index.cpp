#include "comte/distractor_index.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>

namespace comte {

NeighborIndex::NeighborIndex(std::vector<SamplePtr> samples) : samples_(std::move(samples)) {
  if (samples_.empty()) return;
  dims_ = samples_.front()->values().size();
  for (const auto& s : samples_)
    if (!same_schema(*s, *samples_.front()))
      throw Error(ErrorCode::schema_mismatch, "index samples must share one schema");
  std::vector<std::size_t> points(samples_.size());
  std::iota(points.begin(), points.end(), std::size_t{0});
  nodes_.reserve(samples_.size());
  root_ = build(points, 0);
}

std::ptrdiff_t NeighborIndex::build(std::span<std::size_t> points, std::size_t depth) {
  if (points.empty()) return -1;
  const std::size_t axis = depth % dims_;
  const std::size_t mid = points.size() / 2;
  std::nth_element(points.begin(), points.begin() + static_cast<std::ptrdiff_t>(mid),
                   points.end(), [&](std::size_t a, std::size_t b) {
                     return samples_[a]->values()[axis] < samples_[b]->values()[axis];
                   });
  const auto id = static_cast<std::ptrdiff_t>(nodes_.size());
  nodes_.push_back(Node{points[mid], axis, -1, -1});
  const auto left = build(points.subspan(0, mid), depth + 1);
  const auto right = build(points.subspan(mid + 1), depth + 1);
  nodes_[static_cast<std::size_t>(id)].left = left;
  nodes_[static_cast<std::size_t>(id)].right = right;
  return id;
}

const MultivariateSample* NeighborIndex::find(std::string_view sample_id) const {
  for (const auto& s : samples_)
    if (s->id() == sample_id) return s.get();
  return nullptr;
}

bool NeighborIndex::better(double d, std::size_t point,
                           const std::pair<double, std::size_t>& than) const {
  if (d != than.first) return d < than.first;
  return samples_[point]->id() < samples_[than.second]->id();
}

void NeighborIndex::search(std::ptrdiff_t node_id, std::span<const double> query, std::size_t n,
                           std::vector<std::pair<double, std::size_t>>& best) const {
  if (node_id < 0) return;
  const Node& node = nodes_[static_cast<std::size_t>(node_id)];
  const auto point = samples_[node.point]->values();
  const double d = squared_distance(query, point);

  if (best.size() < n || better(d, node.point, best.back())) {
    auto pos = std::find_if(best.begin(), best.end(),
                            [&](const auto& e) { return better(d, node.point, e); });
    best.insert(pos, {d, node.point});
    if (best.size() > n) best.pop_back();
  }

  const double diff = query[node.axis] - point[node.axis];
  const auto near = diff < 0.0 ? node.left : node.right;
  const auto far = diff < 0.0 ? node.right : node.left;
  search(near, query, n, best);
  // <= keeps equal-distance candidates reachable for the id tie-break
  if (best.size() < n || diff * diff <= best.back().first) search(far, query, n, best);
}

std::vector<Neighbor> NeighborIndex::nearest(const MultivariateSample& query,
                                             std::size_t n) const {
  if (n == 0) throw Error(ErrorCode::invalid_argument, "neighbor count must be >= 1");
  if (empty()) return {};
  if (!same_schema(query, *samples_.front()))
    throw Error(ErrorCode::schema_mismatch, "query schema differs from index schema");
  std::vector<std::pair<double, std::size_t>> best;
  best.reserve(n + 1);
  search(root_, query.values(), n, best);
  std::vector<Neighbor> out;
  out.reserve(best.size());
  for (const auto& [d, p] : best) out.push_back(Neighbor{samples_[p], std::sqrt(d)});
  return out;
}

std::vector<Neighbor> NeighborIndex::nearest_bruteforce(const MultivariateSample& query,
                                                        std::size_t n) const {
  if (n == 0) throw Error(ErrorCode::invalid_argument, "neighbor count must be >= 1");
  std::vector<std::pair<double, std::size_t>> all;
  all.reserve(samples_.size());
  for (std::size_t i = 0; i < samples_.size(); ++i)
    all.emplace_back(squared_distance(query.values(), samples_[i]->values()), i);
  std::sort(all.begin(), all.end(), [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return samples_[a.second]->id() < samples_[b.second]->id();
  });
  all.resize(std::min(n, all.size()));
  std::vector<Neighbor> out;
  for (const auto& [d, p] : all) out.push_back(Neighbor{samples_[p], std::sqrt(d)});
  return out;
}

DistractorIndex build_index(std::span<const MultivariateSample> training,
                            const ClassifierHandle& f, Execution execution,
                            const TrainingFilter& filter) {
  if (training.empty()) throw Error(ErrorCode::invalid_argument, "empty training set");
  std::vector<SamplePtr> pool;
  pool.reserve(training.size());
  for (const auto& s : training) {
    if (!s.label()) throw Error(ErrorCode::invalid_argument, "training sample '" + s.id() + "' has no label");
    if (!same_schema(s, training.front()))
      throw Error(ErrorCode::schema_mismatch, "training samples must share one schema");
    pool.push_back(std::make_shared<const MultivariateSample>(s));
  }
  if (filter) pool = filter(pool);

  const auto n = static_cast<std::ptrdiff_t>(pool.size());
  std::vector<std::size_t> predicted(pool.size());
  std::vector<std::exception_ptr> errors(pool.size());
  auto classify = [&](std::ptrdiff_t i) {
    try {
      predicted[i] = f.evaluate(*pool[i]).argmax();
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  if (execution == Execution::parallel && f.concurrent_safe()) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) classify(i);
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) classify(i);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::map<std::string, std::vector<SamplePtr>, std::less<>> members;
  for (const auto& c : f.class_names()) members[c];
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const auto& label = *pool[i]->label();
    if (f.class_names()[predicted[i]] == label) members[label].push_back(pool[i]);
  }
  DistractorIndex index;
  for (auto& [c, list] : members) index.emplace(c, ClassIndex{c, NeighborIndex(std::move(list))});
  return index;
}

std::vector<Neighbor> nearest_distractors(const DistractorIndex& index,
                                          std::string_view class_name,
                                          const MultivariateSample& x_test, std::size_t n) {
  auto it = index.find(class_name);
  if (it == index.end() || it->second.index.empty()) {
    throw Error(ErrorCode::no_distractor,
                "no valid distractor for class '" + std::string(class_name) +
                    "': no correctly classified training sample of that class");
  }
  return it->second.index.nearest(x_test, n);
}

}  // namespace comte
