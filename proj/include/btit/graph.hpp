#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <vector>

#include "btit/dynamics.hpp"
#include "btit/kdtree.hpp"

namespace btit::graph {

using dynamics::Vector;
using NodeId = std::uint32_t;

inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Direction : int
{
  Forward = 0,   // tree rooted at the start
  Backward = 1,  // tree rooted at the goal
};

constexpr Direction opposite(Direction d) noexcept
{
  return d == Direction::Forward ? Direction::Backward : Direction::Forward;
}
constexpr int index(Direction d) noexcept { return static_cast<int>(d); }

/// Per-state bookkeeping for both search directions. Direction-indexed
/// arrays: [Forward] is the start tree, [Backward] the goal tree.
struct NodeRecord
{
  NodeId id = kNoNode;
  Vector x;
  // Cost-to-come within the direction's tree (inf when not connected).
  std::array<double, 2> g{kInfinity, kInfinity};
  // Admissible estimate toward the direction's target: [F] cost to the goal,
  // [B] cost from the start. Fixed when the state is added.
  std::array<double, 2> h_base{0.0, 0.0};
  // Raised on the fly during a search; h_hat() never drops below h_base.
  std::array<double, 2> h_raise{0.0, 0.0};
  std::array<NodeId, 2> parent{kNoNode, kNoNode};
  std::array<std::vector<NodeId>, 2> children;
  bool alive = true;
  // Member of X_samples: not yet expanded by either search.
  bool in_samples = false;

  double g_of(Direction d) const noexcept { return g[index(d)]; }
  double h_hat(Direction d) const noexcept
  {
    return std::max(h_base[index(d)], h_raise[index(d)]);
  }
  NodeId parent_of(Direction d) const noexcept { return parent[index(d)]; }
  bool in_tree(Direction d) const noexcept { return g[index(d)] < kInfinity; }
  // Admissible estimate of the best solution through this state.
  double f_hat() const noexcept { return h_base[0] + h_base[1]; }
};

/// r-disk radius  gamma * (log q / q)^(1/d)  in normalized units.
double connection_radius(double q, int d, double gamma);
/// 2 (1 + 1/d)^(1/d)
double default_radius_gamma(int d);
/// ceil(k_gamma * log q)
std::size_t knn_count(std::size_t q, double k_gamma);

/// The implicit random geometric graph: node store plus a spatial index over
/// states normalized to [0,1] per dimension by the workspace bounds.
class Rgg
{
public:
  Rgg() = default;
  Rgg(Vector lower, Vector upper);

  NodeId add(Vector x, std::array<double, 2> h_base, bool sample);
  // Marks the node dead and drops it from its parents' child lists. The
  // node's own children must already have been detached by the caller.
  void remove(NodeId id);

  // Unknown ids throw PreconditionError.
  NodeRecord& node(NodeId id);
  const NodeRecord& node(NodeId id) const;
  const std::vector<NodeRecord>& nodes() const noexcept { return nodes_; }
  std::size_t capacity() const noexcept { return nodes_.size(); }
  // Number of live states (q).
  std::size_t size() const noexcept { return live_; }
  int dim() const noexcept { return static_cast<int>(lower_.size()); }

  void set_parent(Direction d, NodeId child, NodeId parent);
  void clear_parent(Direction d, NodeId child);
  bool has_edge(Direction d, NodeId parent, NodeId child) const;

  NodeId root(Direction d) const noexcept { return roots_[index(d)]; }
  void set_root(Direction d, NodeId id) noexcept { roots_[index(d)] = id; }

  void rebuild_index();
  std::size_t indexed() const noexcept { return index_.size(); }
  // Points examined by spatial queries so far.
  std::uint64_t index_visits() const noexcept { return index_.visited(); }

  Vector normalize(const Vector& x) const;
  double normalized_distance_sq(const Vector& a, const Vector& b) const;

  /// Live states within normalized distance r of x (inclusive), excluding
  /// `exclude`, ascending id.
  std::vector<NodeId> near(const Vector& x, double r, NodeId exclude = kNoNode) const;
  /// k nearest live states by normalized distance (ties by id), ascending id.
  std::vector<NodeId> nearest(const Vector& x, std::size_t k, NodeId exclude = kNoNode) const;

  /// Brute-force range search, same metric as near().
  std::vector<NodeId> near_brute_force(const Vector& x, double r, NodeId exclude = kNoNode) const;

private:
  Vector lower_, scale_;
  std::vector<NodeRecord> nodes_;
  std::size_t live_ = 0;
  std::array<NodeId, 2> roots_{kNoNode, kNoNode};
  KdTree index_;
};

/// Whether `y` may be offered to a search in direction d by the spatial
/// query: a vertex of that direction's tree, an unexpanded sample, or the
/// opposite root (the direction's target).
bool in_candidate_set(const Rgg& rgg, NodeId y, Direction d);

/// Neighbors_F / Neighbors_B: candidates from `raw` (a spatial query or
/// adjacency list) filtered by in_candidate_set (or only by liveness when
/// `any_live`), plus x's parent in the opposite tree and x's children in the
/// direction's tree. Deduplicated, ascending id, never contains x.
std::vector<NodeId> assemble_neighbors(const Rgg& rgg, NodeId x, Direction d,
                                       const std::vector<NodeId>& raw, bool any_live = false);

/// assemble_neighbors over an r-disk query.
std::vector<NodeId> neighbors(const Rgg& rgg, NodeId x, Direction d, double r);

}  // namespace btit::graph
