#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "btit/geometry.hpp"
#include "btit/search.hpp"

namespace btit::planner {

using dynamics::Vector;
using geometry::Scenario;
using search::AnytimeEvent;

struct PlannerConfig
{
  std::size_t batch_size = 200;
  double time_budget = 2.0;  // seconds
  std::uint64_t seed = 0;
  int segments = geometry::kDefaultSegments;
  search::Priority priority = search::Priority::FHat;
  search::Termination termination = search::Termination::FirstIntersectionPlusLB;
  search::Connection connection = search::Connection::RDisk;
  search::Heuristic heuristic = search::Heuristic::Controller;
  search::Clock clock = search::Clock::Work;
  search::Candidates candidates = search::Candidates::TreeAndSamples;
  // Stop after this many batches (0: only the budget stops the run).
  std::size_t max_batches = 0;
  // Overrides the scenario's and the default r-disk constant.
  std::optional<double> radius_gamma;
  double k_gamma = 2.0;

  // Throws PreconditionError naming the offending field.
  void validate() const;
};

/// One incumbent, as reported when it was found.
struct Solution
{
  double time = 0.0;
  double cost = 0.0;
  std::uint64_t batch_index = 0;
  std::vector<graph::NodeId> ids;
  std::vector<Vector> states;
};

struct PlanStats
{
  std::uint64_t batches = 0;
  std::uint64_t samples = 0;
  std::uint64_t truncated_batches = 0;
  std::uint64_t expansions = 0;
  std::uint64_t rewires = 0;
  std::uint64_t edge_checks = 0;
  std::uint64_t steer_calls = 0;
  std::uint64_t steer_evaluations = 0;
  std::uint64_t state_checks = 0;
  std::uint64_t neighbors = 0;
  std::uint64_t index_visits = 0;
  std::uint64_t indexed = 0;
  std::uint64_t draws = 0;
  std::uint64_t pruned = 0;
  std::size_t live_states = 0;
  // Elapsed time on the configured clock and on the wall clock.
  double elapsed = 0.0;
  double wall_seconds = 0.0;
};

struct PlanResult
{
  std::string planner;
  std::vector<AnytimeEvent> events;
  std::vector<Solution> solutions;
  double final_cost = graph::kInfinity;
  PlanStats stats;
  // Connection radius (normalized units) or k used for each batch.
  std::vector<double> radii;
  // Every state ever stored, by id (start = 0, goal = 1).
  std::vector<Vector> states;

  bool solved() const noexcept { return !events.empty(); }
};

/// BTIT*: batch informed sampling with bidirectional search.
PlanResult plan(const Scenario& scn, const PlannerConfig& cfg);

/// Forward-only search sharing the sampler, steering, collision checking and
/// pruning with plan().
PlanResult plan_baseline(const Scenario& scn, const PlannerConfig& cfg);

/// Deterministic stand-in for elapsed compute time: each counted primitive
/// is charged a fixed cost measured once on a reference machine.
struct WorkModel
{
  double ns_per_steer_evaluation = 0.0;
  double ns_per_state_check = 0.0;
  double ns_per_neighbor = 0.0;
  double ns_per_index_visit = 0.0;
  double ns_per_expansion = 0.0;
  double ns_per_indexed_state = 0.0;
  double ns_per_draw = 0.0;

  static WorkModel for_dimension(int n);
};

}  // namespace btit::planner
