#include <cmath>
#include <string>
#include <unordered_map>

#include "btit/errors.hpp"
#include "btit/graph_search.hpp"

namespace btit::search {

namespace {

class ExplicitEdges final : public EdgeModel
{
public:
  explicit ExplicitEdges(const ExplicitGraph& g) : out_(g.vertices), in_(g.vertices)
  {
    for (const auto& e : g.edges) {
      const std::uint64_t k = key(e.from, e.to);
      auto [it, fresh] = weight_.emplace(k, e.weight);
      if (!fresh) {
        // Parallel edges: only the cheapest matters.
        it->second = std::min(it->second, e.weight);
        continue;
      }
      out_[e.from].push_back(e.to);
      in_[e.to].push_back(e.from);
    }
  }

  double cost(NodeId from, NodeId to) override
  {
    const auto it = weight_.find(key(from, to));
    return it == weight_.end() ? graph::kInfinity : it->second;
  }
  bool valid(NodeId from, NodeId to) override { return weight_.contains(key(from, to)); }
  void candidates(NodeId x, Direction d, std::vector<NodeId>& out) override
  {
    const auto& src = d == Direction::Forward ? out_[x] : in_[x];
    out.insert(out.end(), src.begin(), src.end());
  }

private:
  static std::uint64_t key(NodeId a, NodeId b) { return (std::uint64_t(a) << 32) | b; }

  std::vector<std::vector<NodeId>> out_, in_;
  std::unordered_map<std::uint64_t, double> weight_;
};

}  // namespace

GraphSearchResult plan_on_graph(const ExplicitGraph& graph, const GraphSearchConfig& cfg)
{
  const std::size_t n = graph.vertices;
  if (n == 0)
    throw PreconditionError("plan_on_graph: empty graph");
  if (graph.start >= n || graph.goal >= n)
    throw PreconditionError("plan_on_graph: start or goal out of range");
  for (const auto& e : graph.edges) {
    if (e.from >= n || e.to >= n)
      throw PreconditionError("plan_on_graph: edge endpoint out of range");
    if (!(e.weight >= 0.0) || !std::isfinite(e.weight))
      throw PreconditionError("plan_on_graph: edge weight must be finite and nonnegative, got " +
                              std::to_string(e.weight));
  }
  auto heuristic = [](const std::vector<double>& h, std::size_t v, const char* what) {
    if (h.empty())
      return 0.0;
    if (v >= h.size())
      throw PreconditionError(std::string("plan_on_graph: ") + what + " has the wrong length");
    if (!(h[v] >= 0.0))
      throw PreconditionError(std::string("plan_on_graph: ") + what + " must be nonnegative");
    return h[v];
  };

  GraphSearchResult result;
  if (graph.start == graph.goal) {
    result.cost = 0.0;
    result.path = {graph.start};
    return result;
  }

  Rgg rgg(dynamics::Vector::Zero(1), dynamics::Vector::Ones(1));
  for (std::size_t v = 0; v < n; ++v) {
    const bool root = v == graph.start || v == graph.goal;
    rgg.add(dynamics::Vector::Zero(1),
            {heuristic(graph.h_to_goal, v, "h_to_goal"), heuristic(graph.h_from_start, v, "h_from_start")},
            !root);
  }
  rgg.set_root(Direction::Forward, graph.start);
  rgg.set_root(Direction::Backward, graph.goal);

  ExplicitEdges model(graph);
  SearchOptions opt;
  opt.priority = cfg.priority;
  opt.termination = cfg.termination;
  opt.candidates = cfg.candidates;
  opt.bidirectional = cfg.bidirectional;
  opt.heuristic_updates = cfg.heuristic_updates;
  SearchCore core(rgg, model, opt);
  core.on_expand = [&](Direction d, NodeId id, double g, double key) {
    result.expansions.push_back({core.batch_index(), d, id, g, key});
  };

  double cost_at_batch_start = graph::kInfinity;
  for (;;) {
    if (core.need_batch()) {
      if (result.batches > 0 && !(core.c_best() < cost_at_batch_start))
        break;
      if (result.batches == cfg.max_batches)
        break;
      cost_at_batch_start = core.c_best();
      core.begin_batch(result.batches++, false);
      continue;
    }
    if (core.terminate()) {
      result.pruned += core.finish_batch().removed;
      continue;
    }
    core.step();
  }

  result.cost = core.c_best();
  result.path = core.incumbent_path();
  result.g.resize(n);
  result.h_hat.resize(n);
  result.parent.resize(n);
  result.touched.resize(n);
  result.alive.resize(n);
  for (std::size_t v = 0; v < n; ++v) {
    const auto& rec = rgg.node(static_cast<NodeId>(v));
    result.g[v] = rec.g;
    result.h_hat[v] = {rec.h_hat(Direction::Forward), rec.h_hat(Direction::Backward)};
    result.parent[v] = rec.parent;
    result.touched[v] = core.touched(static_cast<NodeId>(v));
    result.alive[v] = rec.alive;
  }
  return result;
}

}  // namespace btit::search
