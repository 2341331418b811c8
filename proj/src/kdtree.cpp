#include "btit/kdtree.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <queue>

namespace btit::graph {

namespace {
constexpr std::uint32_t kLeafSize = 8;
}

void KdTree::clear()
{
  dim_ = 0;
  points_.clear();
  ids_.clear();
  order_.clear();
  nodes_.clear();
}

void KdTree::build(int dim, std::vector<double> points, std::vector<std::uint32_t> ids)
{
  dim_ = dim;
  points_ = std::move(points);
  ids_ = std::move(ids);
  order_.resize(ids_.size());
  std::iota(order_.begin(), order_.end(), 0u);
  nodes_.clear();
  nodes_.reserve(2 * ids_.size() / kLeafSize + 2);
  if (!ids_.empty())
    build_node(0, static_cast<std::uint32_t>(ids_.size()));
}

std::int32_t KdTree::build_node(std::uint32_t begin, std::uint32_t end)
{
  const auto index = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(Node{begin, end});
  if (end - begin <= kLeafSize)
    return index;

  // Split along the widest coordinate at the median.
  int axis = 0;
  double widest = -1.0;
  for (int d = 0; d < dim_; ++d) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::uint32_t i = begin; i < end; ++i) {
      const double v = point(order_[i])[d];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi - lo > widest) {
      widest = hi - lo;
      axis = d;
    }
  }
  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) { return point(a)[axis] < point(b)[axis]; });
  const double split = point(order_[mid])[axis];
  nodes_[index].axis = axis;
  nodes_[index].split = split;
  const auto left = build_node(begin, mid);
  const auto right = build_node(mid, end);
  nodes_[index].left = left;
  nodes_[index].right = right;
  return index;
}

double KdTree::dist2(const double* a, std::span<const double> q) const noexcept
{
  double s = 0.0;
  for (int d = 0; d < dim_; ++d) {
    const double diff = a[d] - q[d];
    s += diff * diff;
  }
  return s;
}

void KdTree::range(std::span<const double> q, double r2, std::vector<std::uint32_t>& out) const
{
  if (nodes_.empty())
    return;
  std::vector<double> offset(dim_, 0.0);
  range_node(0, q, r2, 0.0, offset, out);
}

void KdTree::range_node(std::int32_t ni, std::span<const double> q, double r2, double box2,
                        std::vector<double>& offset, std::vector<std::uint32_t>& out) const
{
  const Node& node = nodes_[ni];
  if (node.axis < 0) {
    visited_ += node.end - node.begin;
    for (std::uint32_t i = node.begin; i < node.end; ++i) {
      const double* p = point(order_[i]);
      double s = 0.0;
      int d = 0;
      for (; d < dim_ && s <= r2; ++d) {
        const double diff = p[d] - q[d];
        s += diff * diff;
      }
      if (d == dim_ && s <= r2)
        out.push_back(ids_[order_[i]]);
    }
    return;
  }
  // Points equal to the split value may sit on either side; the far side is
  // still at least |delta| away along the split axis.
  const double delta = q[node.axis] - node.split;
  const std::int32_t near = delta <= 0.0 ? node.left : node.right;
  const std::int32_t far = delta <= 0.0 ? node.right : node.left;
  range_node(near, q, r2, box2, offset, out);
  const double old = offset[node.axis];
  const double far2 = box2 - old * old + delta * delta;
  if (far2 <= r2) {
    offset[node.axis] = delta;
    range_node(far, q, r2, far2, offset, out);
    offset[node.axis] = old;
  }
}

std::vector<std::pair<double, std::uint32_t>> KdTree::nearest(std::span<const double> q, std::size_t k) const
{
  std::vector<std::pair<double, std::uint32_t>> best;
  if (nodes_.empty() || k == 0)
    return best;
  // Max-heap on (distance, id) keeps the current k best.
  std::priority_queue<std::pair<double, std::uint32_t>> heap;
  auto bound = [&] {
    return heap.size() < k ? std::numeric_limits<double>::infinity() : heap.top().first;
  };
  std::vector<std::pair<double, std::int32_t>> stack{{0.0, 0}};
  while (!stack.empty()) {
    const auto [lb, ni] = stack.back();
    stack.pop_back();
    if (lb > bound())
      continue;
    const Node& node = nodes_[ni];
    if (node.axis < 0) {
      visited_ += node.end - node.begin;
      for (std::uint32_t i = node.begin; i < node.end; ++i) {
        const std::pair<double, std::uint32_t> cand{dist2(point(order_[i]), q), ids_[order_[i]]};
        if (heap.size() < k) {
          heap.push(cand);
        } else if (cand < heap.top()) {
          heap.pop();
          heap.push(cand);
        }
      }
      continue;
    }
    const double delta = q[node.axis] - node.split;
    const double far_lb = std::max(lb, delta * delta);
    // Visit the near side first (pushed last).
    if (delta <= 0.0) {
      stack.emplace_back(far_lb, node.right);
      stack.emplace_back(lb, node.left);
    } else {
      stack.emplace_back(far_lb, node.left);
      stack.emplace_back(lb, node.right);
    }
  }
  best.reserve(heap.size());
  while (!heap.empty()) {
    best.push_back(heap.top());
    heap.pop();
  }
  std::sort(best.begin(), best.end());
  return best;
}

}  // namespace btit::graph
