#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "btit/geometry.hpp"

namespace btit::sampling {

using dynamics::Vector;
using geometry::Scenario;
using Rng = std::mt19937_64;

inline constexpr std::uint64_t kMaxConsecutiveRejections = 1'000'000;
// Average rejections per accepted sample before an informed batch is cut short.
inline constexpr std::uint64_t kRejectionsPerSample = 1'000;

/// Independent generator for one batch, derived from the trial's root seed.
Rng batch_stream(std::uint64_t root_seed, std::uint64_t batch_index);

/// Uniform on [0, 1) from the top 53 bits.
inline double uniform01(Rng& rng) noexcept
{
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}
double standard_normal(Rng& rng) noexcept;

/// Uniform over the bound box, resampled until collision-free.
Vector sample_uniform(const Scenario& scn, Rng& rng);

/// Admissible cost estimates through a state: from the start and to the goal.
struct CostEstimate
{
  double from_start = 0.0;
  double to_goal = 0.0;

  double total() const noexcept { return from_start + to_goal; }
};

using CostEstimator = std::function<CostEstimate(const Vector&)>;

/// Strict: a state whose estimate equals the incumbent cannot improve it.
inline bool in_informed_set(const CostEstimate& e, double c_best) noexcept
{
  return e.total() < c_best;
}

struct SampleBatch
{
  std::vector<Vector> states;
  // Parallel to states; empty when no estimator was supplied.
  std::vector<CostEstimate> estimates;
  std::uint64_t batch_index = 0;
  // Set when the rejection cap cut the batch short.
  bool truncated = false;
  std::uint64_t draws = 0;
};

/// m valid states x with estimate(x).total() < c_best. With c_best = inf the
/// filter is vacuous. `should_stop` lets a caller abandon a long rejection run
/// (the batch is then returned partial and flagged truncated).
SampleBatch informed_sample(const Scenario& scn, std::size_t m, double c_best, Rng& rng,
                            const CostEstimator& estimate, std::uint64_t batch_index = 0,
                            const std::function<bool()>& should_stop = {});

/// Direct sampling for the Euclidean-heuristic configuration: position
/// coordinates drawn uniformly from the prolate hyperspheroid with foci at the
/// start and goal positions and transverse diameter c_best; remaining
/// coordinates uniform within bounds.
SampleBatch informed_sample_phs(const Scenario& scn, std::size_t m, double c_best, Rng& rng,
                                std::uint64_t batch_index = 0,
                                const std::function<bool()>& should_stop = {});

/// Euclidean distance between the position projections of two states.
double position_distance(const Scenario& scn, const Vector& a, const Vector& b);

}  // namespace btit::sampling
