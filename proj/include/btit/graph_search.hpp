#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "btit/search.hpp"

namespace btit::search {

struct WeightedEdge
{
  NodeId from = 0;
  NodeId to = 0;
  double weight = 0.0;
};

/// A directed graph with supplied admissible heuristics. Heuristic vectors
/// may be left empty (all zero).
struct ExplicitGraph
{
  std::size_t vertices = 0;
  std::vector<WeightedEdge> edges;
  NodeId start = 0;
  NodeId goal = 0;
  std::vector<double> h_to_goal;
  std::vector<double> h_from_start;
};

struct GraphSearchConfig
{
  Priority priority = Priority::FHat;
  Termination termination = Termination::LBOnly;
  Candidates candidates = Candidates::TreeAndSamples;
  bool bidirectional = true;
  bool heuristic_updates = true;
  // Hard cap on batches; the run also stops after a batch that did not
  // improve the incumbent.
  std::size_t max_batches = 64;
};

struct ExpansionRecord
{
  std::uint64_t batch = 0;
  Direction direction = Direction::Forward;
  NodeId id = 0;
  double g = 0.0;
  double key = 0.0;
};

struct GraphSearchResult
{
  double cost = graph::kInfinity;
  std::vector<NodeId> path;
  std::vector<ExpansionRecord> expansions;
  // Per vertex, indexed by direction.
  std::vector<std::array<double, 2>> g;
  std::vector<std::array<double, 2>> h_hat;
  std::vector<std::array<NodeId, 2>> parent;
  std::vector<char> touched;
  std::vector<char> alive;
  std::size_t batches = 0;
  std::size_t pruned = 0;
};

/// Runs the batch search on an explicit graph: every vertex is a sample of
/// the first batch and later batches add nothing.
GraphSearchResult plan_on_graph(const ExplicitGraph& graph, const GraphSearchConfig& cfg);

}  // namespace btit::search
