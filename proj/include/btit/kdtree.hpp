#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace btit::graph {

/// Static k-d tree over points stored row-major in a flat buffer. Rebuilt
/// from scratch whenever the point set changes.
class KdTree
{
public:
  KdTree() = default;

  // `points` holds ids.size() * dim coordinates.
  void build(int dim, std::vector<double> points, std::vector<std::uint32_t> ids);
  void clear();

  std::size_t size() const noexcept { return ids_.size(); }
  int dim() const noexcept { return dim_; }

  /// Ids of all points with squared distance <= r2 from q, in arbitrary order.
  void range(std::span<const double> q, double r2, std::vector<std::uint32_t>& out) const;

  /// The k nearest points as (squared distance, id), sorted by distance then id.
  std::vector<std::pair<double, std::uint32_t>> nearest(std::span<const double> q, std::size_t k) const;

  // Points whose distance to a query was (at least partly) computed, summed
  // over all queries since construction.
  std::uint64_t visited() const noexcept { return visited_; }

private:
  struct Node
  {
    std::uint32_t begin, end;   // slice of order_
    std::int32_t left = -1, right = -1;
    int axis = -1;
    double split = 0.0;
  };

  std::int32_t build_node(std::uint32_t begin, std::uint32_t end);
  void range_node(std::int32_t ni, std::span<const double> q, double r2, double box2,
                  std::vector<double>& offset, std::vector<std::uint32_t>& out) const;
  const double* point(std::uint32_t slot) const noexcept { return points_.data() + std::size_t(slot) * dim_; }
  double dist2(const double* a, std::span<const double> q) const noexcept;

  int dim_ = 0;
  std::vector<double> points_;
  std::vector<std::uint32_t> ids_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
  mutable std::uint64_t visited_ = 0;
};

}  // namespace btit::graph
