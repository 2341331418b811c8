#include "btit/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "btit/errors.hpp"

namespace btit::geometry {

namespace {

using nlohmann::json;

constexpr std::size_t kMaxPositionDims = 16;

Vector read_vector(const json& j, const std::string& field, std::optional<Eigen::Index> expected = {})
{
  if (!j.is_array())
    throw ScenarioError(field, "expected an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number())
      throw ScenarioError(field + "[" + std::to_string(i) + "]", "expected a number");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  if (expected && v.size() != *expected)
    throw ScenarioError(field, "expected " + std::to_string(*expected) + " entries, got " +
                                 std::to_string(v.size()));
  return v;
}

const json& require(const json& j, const std::string& key)
{
  if (!j.contains(key))
    throw ScenarioError(key, "missing required field");
  return j.at(key);
}

json to_json(const Vector& v)
{
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    a.push_back(v[i]);
  return a;
}

std::string vec_str(const Vector& v)
{
  std::ostringstream os;
  os << "[";
  for (Eigen::Index i = 0; i < v.size(); ++i)
    os << (i ? ", " : "") << v[i];
  os << "]";
  return os.str();
}

}  // namespace

bool state_valid(const Scenario& scn, const double* x) noexcept
{
  const auto& ws = scn.workspace;
  const int n = ws.dim();
  for (int i = 0; i < n; ++i)
    if (!(x[i] >= ws.lower[i] && x[i] <= ws.upper[i]))
      return false;
  std::array<double, kMaxPositionDims> p{};
  for (std::size_t k = 0; k < ws.position_dims.size(); ++k)
    p[k] = x[ws.position_dims[k]];
  for (const auto& box : scn.obstacles.boxes)
    if (box.contains(p.data()))
      return false;
  return true;
}

bool state_valid(const Scenario& scn, const Vector& x)
{
  if (x.size() != scn.dim())
    throw PreconditionError("state_valid: state has dimension " + std::to_string(x.size()) +
                            ", scenario has " + std::to_string(scn.dim()));
  return state_valid(scn, x.data());
}

bool edge_valid(const Scenario& scn, dynamics::Steerer& steerer, const dynamics::SteeringResult& sr,
                int segments, std::uint64_t* state_checks)
{
  if (segments < 1)
    throw PreconditionError("edge_valid: segments must be >= 1");
  // Coarse-to-fine visiting order: multiples of the largest power of two,
  // then odd multiples of each smaller power. Same set of sample times as a
  // sequential sweep, but collisions are usually found after a few samples.
  int top = 1;
  while (top * 2 <= segments)
    top *= 2;
  Vector x;
  std::uint64_t checks = 0;
  bool ok = true;
  for (int stride = top; stride >= 1 && ok; stride /= 2) {
    const bool first = stride == top;
    for (int i = first ? 0 : stride; i <= segments; i += first ? stride : 2 * stride) {
      const double t = sr.tau_star * (static_cast<double>(i) / segments);
      steerer.state_at(sr, t, x);
      ++checks;
      if (!state_valid(scn, x.data())) {
        ok = false;
        break;
      }
    }
  }
  if (state_checks)
    *state_checks += checks;
  return ok;
}

bool edge_valid(const Scenario& scn, const dynamics::SteeringResult& sr, int segments)
{
  dynamics::Steerer steerer(scn.make_system());
  return edge_valid(scn, steerer, sr, segments, nullptr);
}

bool edge_free(const Scenario& scn, dynamics::Steerer& steerer, const dynamics::SteeringResult& sr,
               int segments, std::uint64_t* state_checks)
{
  if (segments < 1)
    throw PreconditionError("edge_free: segments must be >= 1");
  if (!edge_valid(scn, steerer, sr, segments, state_checks))
    return false;
  const auto& ws = scn.workspace;
  const int n = ws.dim();
  const auto& pos = ws.position_dims;
  const double h = sr.tau_star / segments;
  const double spread = h * h / 8.0;

  Vector x0, x1, a0, a1, lo(n), hi(n);
  steerer.state_at(sr, 0.0, x0);
  steerer.second_derivative(sr, 0.0, x0, a0);
  std::uint64_t checks = 1;
  bool ok = true;
  for (int i = 1; i <= segments && ok; ++i) {
    const double t = sr.tau_star * (static_cast<double>(i) / segments);
    steerer.state_at(sr, t, x1);
    steerer.second_derivative(sr, t, x1, a1);
    ++checks;
    for (int k = 0; k < n; ++k) {
      const double m = std::max(std::abs(a0[k]), std::abs(a1[k])) + std::abs(a1[k] - a0[k]);
      lo[k] = std::min(x0[k], x1[k]) - m * spread;
      hi[k] = std::max(x0[k], x1[k]) + m * spread;
      if (lo[k] < ws.lower[k] || hi[k] > ws.upper[k])
        ok = false;
    }
    for (std::size_t b = 0; b < scn.obstacles.boxes.size() && ok; ++b) {
      const auto& box = scn.obstacles.boxes[b];
      bool overlap = true;
      for (std::size_t k = 0; k < pos.size() && overlap; ++k)
        overlap = lo[pos[k]] <= box.max[k] && hi[pos[k]] >= box.min[k];
      ok = !overlap;
    }
    std::swap(x0, x1);
    std::swap(a0, a1);
  }
  if (state_checks)
    *state_checks += checks;
  return ok;
}

bool edge_free(const Scenario& scn, const dynamics::SteeringResult& sr, int segments)
{
  dynamics::Steerer steerer(scn.make_system());
  return edge_free(scn, steerer, sr, segments, nullptr);
}

void validate(const Scenario& scn)
{
  const auto& ws = scn.workspace;
  int n = ws.dim();
  try {
    n = scn.make_system().state_dim();
  } catch (const PreconditionError& e) {
    throw ScenarioError("system", e.what());
  }
  if (ws.lower.size() != n)
    throw ScenarioError("bounds.lower", "expected " + std::to_string(n) + " entries");
  if (ws.upper.size() != n)
    throw ScenarioError("bounds.upper", "expected " + std::to_string(n) + " entries");
  for (int i = 0; i < n; ++i) {
    if (!std::isfinite(ws.lower[i]) || !std::isfinite(ws.upper[i]) || !(ws.lower[i] < ws.upper[i]))
      throw ScenarioError("bounds", "lower[" + std::to_string(i) + "] must be < upper[" +
                                      std::to_string(i) + "]");
  }
  if (ws.position_dims.empty() || ws.position_dims.size() > kMaxPositionDims)
    throw ScenarioError("position_dims", "must list between 1 and 16 coordinates");
  std::set<int> seen;
  for (int d : ws.position_dims) {
    if (d < 0 || d >= n)
      throw ScenarioError("position_dims", "index " + std::to_string(d) + " out of range");
    if (!seen.insert(d).second)
      throw ScenarioError("position_dims", "duplicate index " + std::to_string(d));
  }
  const auto pd = static_cast<Eigen::Index>(ws.position_dims.size());
  for (std::size_t b = 0; b < scn.obstacles.boxes.size(); ++b) {
    const auto& box = scn.obstacles.boxes[b];
    const std::string field = "obstacles[" + std::to_string(b) + "]";
    if (box.min.size() != pd || box.max.size() != pd)
      throw ScenarioError(field, "corners must have " + std::to_string(pd) + " entries");
    for (Eigen::Index i = 0; i < pd; ++i)
      if (!(box.min[i] < box.max[i]))
        throw ScenarioError(field, "min must be < max componentwise");
  }
  if (scn.start.size() != n)
    throw ScenarioError("start", "expected " + std::to_string(n) + " entries");
  if (scn.goal.size() != n)
    throw ScenarioError("goal", "expected " + std::to_string(n) + " entries");
  if (!state_valid(scn, scn.start.data()))
    throw ScenarioError("start", "state " + vec_str(scn.start) + " is out of bounds or in collision");
  if (!state_valid(scn, scn.goal.data()))
    throw ScenarioError("goal", "state " + vec_str(scn.goal) + " is out of bounds or in collision");
  if (scn.radius_gamma && !(*scn.radius_gamma > 0.0))
    throw ScenarioError("radius_gamma", "must be > 0");
}

Scenario parse_scenario(const std::string& json_text, const std::string& source)
{
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ScenarioError("<document>", source + ": " + e.what());
  }
  if (!j.is_object())
    throw ScenarioError("<document>", "expected a JSON object");

  const auto& schema = require(j, "schema");
  if (!schema.is_number_integer() || schema.get<int>() != kScenarioSchemaVersion)
    throw ScenarioError("schema", "unsupported schema version (expected 1)");

  Scenario scn;
  scn.name = j.value("name", std::filesystem::path(source).stem().string());
  scn.description = j.value("description", std::string{});
  const auto& sys = require(j, "system");
  if (!sys.is_string())
    throw ScenarioError("system", "expected a preset name");
  scn.system = sys.get<std::string>();

  const auto& bounds = require(j, "bounds");
  if (!bounds.is_object())
    throw ScenarioError("bounds", "expected an object with lower/upper");
  scn.workspace.lower = read_vector(require(bounds, "lower"), "bounds.lower");
  scn.workspace.upper = read_vector(require(bounds, "upper"), "bounds.upper");

  const auto& pdims = require(j, "position_dims");
  if (!pdims.is_array())
    throw ScenarioError("position_dims", "expected an array of indices");
  for (const auto& d : pdims) {
    if (!d.is_number_integer())
      throw ScenarioError("position_dims", "expected integer indices");
    scn.workspace.position_dims.push_back(d.get<int>());
  }

  if (j.contains("obstacles")) {
    const auto& obs = j.at("obstacles");
    if (!obs.is_array())
      throw ScenarioError("obstacles", "expected an array of boxes");
    for (std::size_t b = 0; b < obs.size(); ++b) {
      const std::string field = "obstacles[" + std::to_string(b) + "]";
      if (!obs[b].is_object() || !obs[b].contains("min") || !obs[b].contains("max"))
        throw ScenarioError(field, "expected {\"min\": [...], \"max\": [...]}");
      scn.obstacles.boxes.push_back(
        Box{read_vector(obs[b].at("min"), field + ".min"), read_vector(obs[b].at("max"), field + ".max")});
    }
  }

  scn.start = read_vector(require(j, "start"), "start");
  scn.goal = read_vector(require(j, "goal"), "goal");
  if (j.contains("radius_gamma")) {
    if (!j.at("radius_gamma").is_number())
      throw ScenarioError("radius_gamma", "expected a number");
    scn.radius_gamma = j.at("radius_gamma").get<double>();
  }

  validate(scn);
  return scn;
}

std::string dump_scenario(const Scenario& scn)
{
  json j;
  j["schema"] = kScenarioSchemaVersion;
  j["name"] = scn.name;
  if (!scn.description.empty())
    j["description"] = scn.description;
  j["system"] = scn.system;
  j["bounds"] = {{"lower", to_json(scn.workspace.lower)}, {"upper", to_json(scn.workspace.upper)}};
  j["position_dims"] = scn.workspace.position_dims;
  json obs = json::array();
  for (const auto& b : scn.obstacles.boxes)
    obs.push_back({{"min", to_json(b.min)}, {"max", to_json(b.max)}});
  j["obstacles"] = obs;
  j["start"] = to_json(scn.start);
  j["goal"] = to_json(scn.goal);
  if (scn.radius_gamma)
    j["radius_gamma"] = *scn.radius_gamma;
  return j.dump(2) + "\n";
}

Scenario load_scenario(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in)
    throw ScenarioError("<file>", "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.string());
}

void save_scenario(const Scenario& scn, const std::filesystem::path& path)
{
  std::ofstream out(path);
  if (!out)
    throw ScenarioError("<file>", "cannot write " + path.string());
  out << dump_scenario(scn);
}

}  // namespace btit::geometry
