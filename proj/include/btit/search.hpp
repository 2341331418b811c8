#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "btit/graph.hpp"
#include "btit/open_queue.hpp"

namespace btit::search {

using graph::Direction;
using graph::NodeId;
using graph::Rgg;

enum class Priority
{
  FHat,   // g + h
  MMMax,  // max(g + h, 2g)
};

enum class Termination
{
  FirstIntersectionPlusLB,
  LBOnly,
};

enum class Connection
{
  RDisk,
  KNN,
};

enum class Heuristic
{
  Controller,
  Euclidean,
};

enum class Clock
{
  Work,  // deterministic cost model, see planner.hpp
  Wall,
};

std::string to_string(Priority p);
std::string to_string(Termination t);
std::string to_string(Connection c);
std::string to_string(Heuristic h);
std::string to_string(Clock c);
Priority parse_priority(const std::string& s);
Termination parse_termination(const std::string& s);
Connection parse_connection(const std::string& s);
Heuristic parse_heuristic(const std::string& s);
Clock parse_clock(const std::string& s);

/// Which stored states a direction's spatial query may return.
enum class Candidates
{
  // The direction's tree, unexpanded samples and the opposite root.
  TreeAndSamples,
  // Every live state.
  All,
};

struct AnytimeEvent
{
  double wall_time = 0.0;
  double cost = 0.0;
  std::uint64_t batch_index = 0;
};

/// Queue key of a state with cost-to-come g and estimate h.
double queue_key(Priority p, double g, double h) noexcept;

/// Edge costs and validity supplied to the search. Forward expansion of x
/// offers edges x -> y, backward expansion offers y -> x.
class EdgeModel
{
public:
  virtual ~EdgeModel() = default;
  // Exact cost of the directed edge, +inf when the pair cannot be connected.
  virtual double cost(NodeId from, NodeId to) = 0;
  virtual bool valid(NodeId from, NodeId to) = 0;
  // Raw neighbor candidates of x for a search in direction d.
  virtual void candidates(NodeId x, Direction d, std::vector<NodeId>& out) = 0;
};

struct SearchOptions
{
  Priority priority = Priority::FHat;
  Termination termination = Termination::FirstIntersectionPlusLB;
  Candidates candidates = Candidates::TreeAndSamples;
  bool bidirectional = true;
  // Stored on-the-fly heuristic raises. They keep h_hat admissible but not
  // consistent, so popped keys may dip when they are on.
  bool heuristic_updates = true;
  // Absolute tolerance for "improves".
  double improve_tolerance = 1e-9;
};

struct SearchStats
{
  std::uint64_t expansions = 0;
  std::uint64_t neighbors = 0;
  std::uint64_t rewires = 0;
  std::uint64_t edge_checks = 0;
  std::uint64_t batches = 0;
  std::uint64_t prunes = 0;
  std::uint64_t pruned_states = 0;
};

struct PruneReport
{
  std::size_t removed = 0;
  std::size_t orphaned = 0;
};

/// Bidirectional (or forward-only) batch search over an Rgg whose roots are
/// set. The caller owns the outer loop: begin_batch / need_batch /
/// terminate / step / finish_batch.
class SearchCore
{
public:
  SearchCore(Rgg& rgg, EdgeModel& model, SearchOptions opt);

  // Reseeds both queues with the roots. `graph_changed` drops stored
  // heuristic raises, which are only valid for the graph they were made on.
  void begin_batch(std::uint64_t batch_index, bool graph_changed);
  bool need_batch() const;
  bool terminate() const;
  // Pops the best state over both queues and expands it.
  void step();
  // Prune and clear both queues.
  PruneReport finish_batch();

  double c_best() const noexcept { return c_best_; }
  NodeId meet_state() const noexcept { return meet_; }
  const std::vector<NodeId>& incumbent_path() const noexcept { return path_; }
  std::uint64_t batch_index() const noexcept { return batch_; }
  bool first_intersection() const noexcept { return first_flag_; }
  const SearchStats& stats() const noexcept { return stats_; }
  const OpenQueue& queue(Direction d) const noexcept { return queues_[graph::index(d)]; }
  // States that have held a finite cost-to-come in either direction.
  bool touched(NodeId id) const noexcept { return id < touched_.size() && touched_[id]; }

  // Called after each C_best improvement.
  std::function<void()> on_improve;
  // Called for every popped state before it is expanded.
  std::function<void(Direction, NodeId, double g, double key)> on_expand;

  // Exposed for tests.
  double key_of(NodeId id, Direction d) const;
  PruneReport prune();

private:
  void expand(Direction d, NodeId x);
  // Bookkeeping after g_d(y) changed: intersection test, heuristic raise,
  // enqueue. Returns false when the edge to y's opposite parent is invalid.
  bool after_cost_change(Direction d, NodeId y);
  void propagate(Direction d, NodeId root);
  void enqueue(Direction d, NodeId y);
  bool expanded_this_batch(Direction d, NodeId y) const;
  double raise_bound(Direction d) const;
  double edge_cost(Direction d, NodeId x, NodeId y);
  bool edge_valid(Direction d, NodeId x, NodeId y);
  void record_incumbent(NodeId meet, double cost);
  void orphan_subtree(Direction d, NodeId root, std::size_t& count);
  void ensure_capacity();

  Rgg& rgg_;
  EdgeModel& model_;
  SearchOptions opt_;
  std::array<OpenQueue, 2> queues_;
  double c_best_ = graph::kInfinity;
  NodeId meet_ = graph::kNoNode;
  std::vector<NodeId> path_;
  bool first_flag_ = false;
  bool graph_dirty_ = false;
  std::uint64_t batch_ = 0;
  std::uint64_t batch_serial_ = 0;
  std::array<std::vector<std::uint64_t>, 2> closed_;
  std::array<double, 2> pruned_g_min_{graph::kInfinity, graph::kInfinity};
  std::vector<char> touched_;
  SearchStats stats_;
  std::vector<NodeId> scratch_;
};

}  // namespace btit::search
