#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "btit/dynamics.hpp"

namespace btit::geometry {

using dynamics::Vector;

inline constexpr int kScenarioSchemaVersion = 1;
inline constexpr int kDefaultSegments = 200;

// Closed axis-aligned box over the position coordinates.
struct Box
{
  Vector min;
  Vector max;

  bool contains(const double* position) const noexcept
  {
    for (Eigen::Index i = 0; i < min.size(); ++i)
      if (position[i] < min[i] || position[i] > max[i])
        return false;
    return true;
  }
};

struct Workspace
{
  Vector lower;
  Vector upper;
  std::vector<int> position_dims;

  int dim() const noexcept { return static_cast<int>(lower.size()); }
};

struct ObstacleSet
{
  std::vector<Box> boxes;
};

struct Scenario
{
  std::string name;
  std::string description;
  std::string system;  // preset name, see dynamics::system_preset
  Workspace workspace;
  ObstacleSet obstacles;
  Vector start;
  Vector goal;
  // Overrides the default r-disk scale constant when present.
  std::optional<double> radius_gamma;

  dynamics::LinearSystem make_system() const { return dynamics::system_preset(system); }
  int dim() const noexcept { return workspace.dim(); }
};

/// Throws ScenarioError naming the offending field.
void validate(const Scenario& scn);

/// In bounds and outside every obstacle (touching a box counts as collision).
bool state_valid(const Scenario& scn, const Vector& x);
bool state_valid(const Scenario& scn, const double* x) noexcept;

/// Samples the steering trajectory at `segments` uniform time intervals and
/// checks every sample with state_valid.
bool edge_valid(const Scenario& scn, const dynamics::SteeringResult& sr,
                int segments = kDefaultSegments);
bool edge_valid(const Scenario& scn, dynamics::Steerer& steerer, const dynamics::SteeringResult& sr,
                int segments, std::uint64_t* state_checks = nullptr);

/// Stricter than edge_valid: also covers the trajectory between samples.
/// Each piece stays within the box spanned by its end states widened by
/// M h^2 / 8 per coordinate, where M bounds the second derivative on the
/// piece by its end values plus their difference. The bound is exact when
/// the second derivative is linear in t, as for double integrators.
bool edge_free(const Scenario& scn, const dynamics::SteeringResult& sr,
               int segments = kDefaultSegments);
bool edge_free(const Scenario& scn, dynamics::Steerer& steerer, const dynamics::SteeringResult& sr,
               int segments, std::uint64_t* state_checks = nullptr);

Scenario parse_scenario(const std::string& json_text, const std::string& source = "<string>");
std::string dump_scenario(const Scenario& scn);
Scenario load_scenario(const std::filesystem::path& path);
void save_scenario(const Scenario& scn, const std::filesystem::path& path);

}  // namespace btit::geometry
