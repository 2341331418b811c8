#include "btit/graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "btit/errors.hpp"

namespace btit::graph {

double connection_radius(double q, int d, double gamma)
{
  if (!(q >= 2.0))
    throw PreconditionError("connection_radius: q must be >= 2");
  if (d < 1)
    throw PreconditionError("connection_radius: d must be >= 1");
  return gamma * std::pow(std::log(q) / q, 1.0 / d);
}

double default_radius_gamma(int d)
{
  return 2.0 * std::pow(1.0 + 1.0 / d, 1.0 / d);
}

std::size_t knn_count(std::size_t q, double k_gamma)
{
  if (q < 2)
    return 1;
  return static_cast<std::size_t>(std::ceil(k_gamma * std::log(static_cast<double>(q))));
}

Rgg::Rgg(Vector lower, Vector upper) : lower_(std::move(lower))
{
  if (lower_.size() != upper.size())
    throw PreconditionError("Rgg: bound dimensions differ");
  scale_ = (upper - lower_).cwiseInverse();
  if (!scale_.allFinite() || (scale_.array() <= 0.0).any())
    throw PreconditionError("Rgg: lower must be < upper");
}

NodeId Rgg::add(Vector x, std::array<double, 2> h_base, bool sample)
{
  if (x.size() != lower_.size())
    throw PreconditionError("Rgg::add: state dimension mismatch");
  NodeRecord rec;
  rec.id = static_cast<NodeId>(nodes_.size());
  rec.x = std::move(x);
  rec.h_base = h_base;
  rec.in_samples = sample;
  nodes_.push_back(std::move(rec));
  ++live_;
  return nodes_.back().id;
}

NodeRecord& Rgg::node(NodeId id)
{
  if (id >= nodes_.size())
    throw PreconditionError("Rgg: unknown state id " + std::to_string(id));
  return nodes_[id];
}

const NodeRecord& Rgg::node(NodeId id) const
{
  if (id >= nodes_.size())
    throw PreconditionError("Rgg: unknown state id " + std::to_string(id));
  return nodes_[id];
}

void Rgg::remove(NodeId id)
{
  NodeRecord& n = node(id);
  if (!n.alive)
    return;
  for (Direction d : {Direction::Forward, Direction::Backward})
    if (n.parent_of(d) != kNoNode)
      clear_parent(d, id);
  n.alive = false;
  n.in_samples = false;
  n.g = {kInfinity, kInfinity};
  n.children[0].clear();
  n.children[1].clear();
  --live_;
}

void Rgg::set_parent(Direction d, NodeId child, NodeId parent)
{
  const int k = index(d);
  NodeRecord& c = node(child);
  if (c.parent[k] == parent)
    return;
  if (c.parent[k] != kNoNode)
    clear_parent(d, child);
  c.parent[k] = parent;
  auto& kids = node(parent).children[k];
  kids.insert(std::lower_bound(kids.begin(), kids.end(), child), child);
}

void Rgg::clear_parent(Direction d, NodeId child)
{
  const int k = index(d);
  NodeRecord& c = node(child);
  if (c.parent[k] == kNoNode)
    return;
  auto& kids = node(c.parent[k]).children[k];
  auto it = std::lower_bound(kids.begin(), kids.end(), child);
  if (it != kids.end() && *it == child)
    kids.erase(it);
  c.parent[k] = kNoNode;
}

bool Rgg::has_edge(Direction d, NodeId parent, NodeId child) const
{
  return node(child).parent[index(d)] == parent;
}

Vector Rgg::normalize(const Vector& x) const
{
  return (x - lower_).cwiseProduct(scale_);
}

double Rgg::normalized_distance_sq(const Vector& a, const Vector& b) const
{
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double diff = (a[i] - lower_[i]) * scale_[i] - (b[i] - lower_[i]) * scale_[i];
    s += diff * diff;
  }
  return s;
}

void Rgg::rebuild_index()
{
  const int n = dim();
  std::vector<double> pts;
  std::vector<std::uint32_t> ids;
  pts.reserve(live_ * n);
  ids.reserve(live_);
  for (const auto& rec : nodes_) {
    if (!rec.alive)
      continue;
    for (int i = 0; i < n; ++i)
      pts.push_back((rec.x[i] - lower_[i]) * scale_[i]);
    ids.push_back(rec.id);
  }
  index_.build(n, std::move(pts), std::move(ids));
}

std::vector<NodeId> Rgg::near(const Vector& x, double r, NodeId exclude) const
{
  std::vector<NodeId> out;
  if (index_.size() == 0)
    return out;
  const int n = dim();
  std::array<double, 64> q{};
  if (n > static_cast<int>(q.size()))
    throw PreconditionError("Rgg::near: dimension too large");
  for (int i = 0; i < n; ++i)
    q[i] = (x[i] - lower_[i]) * scale_[i];
  index_.range(std::span<const double>(q.data(), n), r * r, out);
  std::erase_if(out, [&](NodeId id) { return id == exclude || !nodes_[id].alive; });
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<NodeId> Rgg::nearest(const Vector& x, std::size_t k, NodeId exclude) const
{
  std::vector<NodeId> out;
  if (index_.size() == 0)
    return out;
  const int n = dim();
  std::array<double, 64> q{};
  for (int i = 0; i < n; ++i)
    q[i] = (x[i] - lower_[i]) * scale_[i];
  // One extra in case the query state itself is indexed.
  for (const auto& [d2, id] : index_.nearest(std::span<const double>(q.data(), n), k + 1)) {
    if (id == exclude || !nodes_[id].alive)
      continue;
    if (out.size() == k)
      break;
    out.push_back(id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<NodeId> Rgg::near_brute_force(const Vector& x, double r, NodeId exclude) const
{
  std::vector<NodeId> out;
  const int n = dim();
  for (const auto& rec : nodes_) {
    if (!rec.alive || rec.id == exclude)
      continue;
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const double diff = (rec.x[i] - lower_[i]) * scale_[i] - (x[i] - lower_[i]) * scale_[i];
      s += diff * diff;
    }
    if (s <= r * r)
      out.push_back(rec.id);
  }
  return out;
}

bool in_candidate_set(const Rgg& rgg, NodeId y, Direction d)
{
  const NodeRecord& n = rgg.node(y);
  if (!n.alive)
    return false;
  return n.in_tree(d) || n.in_samples || y == rgg.root(opposite(d));
}

std::vector<NodeId> assemble_neighbors(const Rgg& rgg, NodeId x, Direction d,
                                       const std::vector<NodeId>& raw, bool any_live)
{
  std::vector<NodeId> out;
  out.reserve(raw.size() + 4);
  for (NodeId y : raw)
    if (y != x && (any_live ? rgg.node(y).alive : in_candidate_set(rgg, y, d)))
      out.push_back(y);
  const NodeRecord& n = rgg.node(x);
  if (const NodeId p = n.parent_of(opposite(d)); p != kNoNode && rgg.node(p).alive)
    out.push_back(p);
  for (NodeId c : n.children[index(d)])
    if (rgg.node(c).alive)
      out.push_back(c);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  std::erase(out, x);
  return out;
}

std::vector<NodeId> neighbors(const Rgg& rgg, NodeId x, Direction d, double r)
{
  return assemble_neighbors(rgg, x, d, rgg.near(rgg.node(x).x, r, x));
}

}  // namespace btit::graph
