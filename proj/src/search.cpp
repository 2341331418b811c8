#include "btit/search.hpp"

#include <algorithm>
#include <cmath>

#include "btit/errors.hpp"

namespace btit::search {

using graph::index;
using graph::kInfinity;
using graph::kNoNode;
using graph::NodeRecord;
using graph::opposite;

namespace {

template <typename E>
E parse_enum(const std::string& s, std::initializer_list<std::pair<const char*, E>> table, const char* what)
{
  for (const auto& [name, value] : table)
    if (s == name)
      return value;
  throw PreconditionError(std::string("unknown ") + what + ": " + s);
}

}  // namespace

std::string to_string(Priority p) { return p == Priority::FHat ? "fhat" : "mm"; }
std::string to_string(Termination t) { return t == Termination::LBOnly ? "lb" : "first-lb"; }
std::string to_string(Connection c) { return c == Connection::RDisk ? "rdisk" : "knn"; }
std::string to_string(Heuristic h) { return h == Heuristic::Controller ? "controller" : "euclidean"; }
std::string to_string(Clock c) { return c == Clock::Work ? "work" : "wall"; }

Priority parse_priority(const std::string& s)
{
  return parse_enum<Priority>(s, {{"fhat", Priority::FHat}, {"mm", Priority::MMMax}}, "priority");
}
Termination parse_termination(const std::string& s)
{
  return parse_enum<Termination>(
      s, {{"first-lb", Termination::FirstIntersectionPlusLB}, {"lb", Termination::LBOnly}}, "termination");
}
Connection parse_connection(const std::string& s)
{
  return parse_enum<Connection>(s, {{"rdisk", Connection::RDisk}, {"knn", Connection::KNN}}, "connection");
}
Heuristic parse_heuristic(const std::string& s)
{
  return parse_enum<Heuristic>(s, {{"controller", Heuristic::Controller}, {"euclidean", Heuristic::Euclidean}},
                               "heuristic");
}
Clock parse_clock(const std::string& s)
{
  return parse_enum<Clock>(s, {{"work", Clock::Work}, {"wall", Clock::Wall}}, "clock");
}

double queue_key(Priority p, double g, double h) noexcept
{
  const double f = g + h;
  return p == Priority::FHat ? f : std::max(f, 2.0 * g);
}

SearchCore::SearchCore(Rgg& rgg, EdgeModel& model, SearchOptions opt)
  : rgg_(rgg), model_(model), opt_(opt)
{
  if (rgg_.root(Direction::Forward) == kNoNode || rgg_.root(Direction::Backward) == kNoNode)
    throw PreconditionError("SearchCore: both roots must be set");
  rgg_.node(rgg_.root(Direction::Forward)).g[0] = 0.0;
  rgg_.node(rgg_.root(Direction::Backward)).g[1] = 0.0;
  ensure_capacity();
  touched_[rgg_.root(Direction::Forward)] = 1;
  touched_[rgg_.root(Direction::Backward)] = 1;
}

void SearchCore::ensure_capacity()
{
  const std::size_t n = rgg_.capacity();
  closed_[0].resize(n, 0);
  closed_[1].resize(n, 0);
  touched_.resize(n, 0);
}

void SearchCore::begin_batch(std::uint64_t batch_index, bool graph_changed)
{
  ensure_capacity();
  batch_ = batch_index;
  ++batch_serial_;
  ++stats_.batches;
  first_flag_ = false;
  pruned_g_min_ = {kInfinity, kInfinity};
  if (graph_changed || graph_dirty_) {
    for (const auto& rec : rgg_.nodes())
      if (rec.alive)
        rgg_.node(rec.id).h_raise = {0.0, 0.0};
    graph_dirty_ = false;
  }
  queues_[0].clear();
  queues_[1].clear();
  enqueue(Direction::Forward, rgg_.root(Direction::Forward));
  if (opt_.bidirectional)
    enqueue(Direction::Backward, rgg_.root(Direction::Backward));
}

bool SearchCore::need_batch() const
{
  const bool ef = queues_[0].empty();
  if (!opt_.bidirectional)
    return ef;
  const bool eb = queues_[1].empty();
  if (ef && eb)
    return true;
  // Without an incumbent an exhausted side means the graph holds no
  // solution. With one, the remaining side alone still certifies the bound.
  return !std::isfinite(c_best_) && (ef || eb);
}

bool SearchCore::terminate() const
{
  if (first_flag_)
    return true;
  if (!std::isfinite(c_best_))
    return false;
  if (!opt_.bidirectional)
    return c_best_ <= queues_[0].f_min();
  return c_best_ <= std::min(queues_[0].pr_min(), queues_[1].pr_min());
}

void SearchCore::step()
{
  Direction d = Direction::Forward;
  if (queues_[0].empty()) {
    d = Direction::Backward;
  } else if (opt_.bidirectional && !queues_[1].empty() &&
             OpenQueue::before(queues_[1].top(), queues_[0].top())) {
    d = Direction::Backward;
  }
  OpenQueue& q = queues_[index(d)];
  if (q.empty())
    throw PreconditionError("SearchCore::step: both queues are empty");
  const OpenQueue::Entry e = q.pop();
  if (on_expand)
    on_expand(d, e.id, e.g, e.key);
  expand(d, e.id);
}

double SearchCore::key_of(NodeId id, Direction d) const
{
  const NodeRecord& n = rgg_.node(id);
  return queue_key(opt_.priority, n.g_of(d), n.h_hat(d));
}

void SearchCore::enqueue(Direction d, NodeId y)
{
  const NodeRecord& n = rgg_.node(y);
  const double g = n.g_of(d);
  const double h = n.h_hat(d);
  queues_[index(d)].push({queue_key(opt_.priority, g, h), g, g + h, y});
}

bool SearchCore::expanded_this_batch(Direction d, NodeId y) const
{
  return closed_[index(d)][y] == batch_serial_;
}

double SearchCore::raise_bound(Direction d) const
{
  return std::min(queues_[index(d)].g_min(), pruned_g_min_[index(d)]);
}

double SearchCore::edge_cost(Direction d, NodeId x, NodeId y)
{
  return d == Direction::Forward ? model_.cost(x, y) : model_.cost(y, x);
}

bool SearchCore::edge_valid(Direction d, NodeId x, NodeId y)
{
  ++stats_.edge_checks;
  return d == Direction::Forward ? model_.valid(x, y) : model_.valid(y, x);
}

void SearchCore::expand(Direction d, NodeId x)
{
  const int k = index(d);
  ++stats_.expansions;
  closed_[k][x] = batch_serial_;
  rgg_.node(x).in_samples = false;

  scratch_.clear();
  model_.candidates(x, d, scratch_);
  const std::vector<NodeId> nbrs =
      graph::assemble_neighbors(rgg_, x, d, scratch_, opt_.candidates == Candidates::All);

  for (NodeId y : nbrs) {
    ++stats_.neighbors;
    const NodeRecord& ny = rgg_.node(y);
    if (ny.parent[k] == x) {
      enqueue(d, y);
      continue;
    }
    const double c = edge_cost(d, x, y);
    if (!std::isfinite(c))
      continue;
    const double g_new = rgg_.node(x).g[k] + c;
    if (!(g_new < ny.g[k] - opt_.improve_tolerance))
      continue;
    if (!edge_valid(d, x, y))
      continue;
    rgg_.set_parent(d, y, x);
    rgg_.node(y).g[k] = g_new;
    ++stats_.rewires;
    after_cost_change(d, y);
    propagate(d, y);
    if (first_flag_)
      break;
  }
}

bool SearchCore::after_cost_change(Direction d, NodeId y)
{
  const int k = index(d);
  const Direction o = opposite(d);
  touched_[y] = 1;
  NodeRecord& n = rgg_.node(y);

  if (n.in_tree(o)) {
    const double total = n.g[k] + n.g[index(o)];
    if (total < c_best_ - (std::isfinite(c_best_) ? opt_.improve_tolerance : 0.0)) {
      const NodeId op = n.parent[index(o)];
      if (op != kNoNode && !edge_valid(o, op, y)) {
        pruned_g_min_[k] = std::min(pruned_g_min_[k], n.g[k]);
        return false;
      }
      record_incumbent(y, total);
      if (opt_.bidirectional && opt_.termination == Termination::FirstIntersectionPlusLB)
        first_flag_ = true;
    }
  }

  if (opt_.bidirectional && opt_.heuristic_updates && !expanded_this_batch(o, y)) {
    // Every state the opposite search has not closed this batch lies beyond
    // its frontier, so its cost toward our target is at least the smallest
    // open (or discarded) cost-to-come over there.
    const double bound = raise_bound(o);
    if (std::isfinite(bound) && bound > n.h_raise[k])
      n.h_raise[k] = bound;
  }

  const double g = n.g[k];
  const double h = n.h_hat(d);
  const double h_prime = opt_.bidirectional ? std::max(g, h) : h;
  if (g + h_prime <= c_best_ || queues_[k].contains(y))
    enqueue(d, y);
  else
    pruned_g_min_[k] = std::min(pruned_g_min_[k], g);
  return true;
}

void SearchCore::propagate(Direction d, NodeId root)
{
  const int k = index(d);
  std::vector<NodeId> stack(rgg_.node(root).children[k].begin(), rgg_.node(root).children[k].end());
  while (!stack.empty()) {
    const NodeId c = stack.back();
    stack.pop_back();
    NodeRecord& n = rgg_.node(c);
    const double g_new = rgg_.node(n.parent[k]).g[k] + edge_cost(d, n.parent[k], c);
    if (g_new == n.g[k])
      continue;
    n.g[k] = g_new;
    after_cost_change(d, c);
    const auto& kids = rgg_.node(c).children[k];
    stack.insert(stack.end(), kids.begin(), kids.end());
  }
}

void SearchCore::record_incumbent(NodeId meet, double cost)
{
  c_best_ = cost;
  meet_ = meet;
  path_.clear();
  const std::size_t limit = rgg_.capacity() + 1;
  for (NodeId v = meet; v != kNoNode; v = rgg_.node(v).parent[0]) {
    path_.push_back(v);
    if (path_.size() > limit)
      throw NumericDomainError("SearchCore: cycle in the forward tree");
  }
  std::reverse(path_.begin(), path_.end());
  for (NodeId v = rgg_.node(meet).parent[1]; v != kNoNode; v = rgg_.node(v).parent[1]) {
    path_.push_back(v);
    if (path_.size() > 2 * limit)
      throw NumericDomainError("SearchCore: cycle in the backward tree");
  }
  if (on_improve)
    on_improve();
}

PruneReport SearchCore::finish_batch()
{
  PruneReport r = prune();
  queues_[0].clear();
  queues_[1].clear();
  return r;
}

void SearchCore::orphan_subtree(Direction d, NodeId root, std::size_t& count)
{
  const int k = index(d);
  std::vector<NodeId> stack{root};
  while (!stack.empty()) {
    const NodeId v = stack.back();
    stack.pop_back();
    NodeRecord& n = rgg_.node(v);
    stack.insert(stack.end(), n.children[k].begin(), n.children[k].end());
    rgg_.clear_parent(d, v);
    n.g[k] = kInfinity;
    ++count;
  }
}

PruneReport SearchCore::prune()
{
  PruneReport report;
  if (!std::isfinite(c_best_))
    return report;
  ++stats_.prunes;

  std::vector<char> keep(rgg_.capacity(), 0);
  for (NodeId v : path_)
    keep[v] = 1;
  keep[rgg_.root(Direction::Forward)] = 1;
  keep[rgg_.root(Direction::Backward)] = 1;

  auto doomed = [&](const NodeRecord& n) {
    if (!n.alive || keep[n.id])
      return false;
    const double f = n.f_hat();
    const bool in_tree = n.in_tree(Direction::Forward) || n.in_tree(Direction::Backward);
    return in_tree ? f > c_best_ : f >= c_best_;
  };

  std::vector<NodeId> removed;
  for (const auto& n : rgg_.nodes())
    if (doomed(n))
      removed.push_back(n.id);

  for (NodeId v : removed) {
    for (Direction d : {Direction::Forward, Direction::Backward}) {
      const std::vector<NodeId> kids = rgg_.node(v).children[index(d)];
      for (NodeId c : kids)
        orphan_subtree(d, c, report.orphaned);
    }
    rgg_.remove(v);
  }
  // Orphans that left both trees go back to the sample set, or out.
  for (const auto& n : rgg_.nodes()) {
    if (!n.alive || keep[n.id])
      continue;
    if (n.in_tree(Direction::Forward) || n.in_tree(Direction::Backward))
      continue;
    if (n.f_hat() >= c_best_) {
      rgg_.remove(n.id);
      removed.push_back(n.id);
    } else {
      rgg_.node(n.id).in_samples = true;
    }
  }
  for (const auto& n : rgg_.nodes())
    if (n.alive && n.in_samples && n.f_hat() >= c_best_ && !keep[n.id])
      rgg_.node(n.id).in_samples = false;

  for (NodeId v : removed) {
    queues_[0].erase(v);
    queues_[1].erase(v);
  }
  report.removed = removed.size();
  stats_.pruned_states += report.removed;
  if (report.removed > 0) {
    graph_dirty_ = true;
    rgg_.rebuild_index();
  }
  return report;
}

}  // namespace btit::search
