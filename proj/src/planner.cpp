#include "btit/planner.hpp"

#include <chrono>
#include <cmath>
#include <unordered_map>

#include "btit/errors.hpp"
#include "btit/sampling.hpp"

namespace btit::planner {

using dynamics::SteeringResult;
using dynamics::Steerer;
using graph::Direction;
using graph::NodeId;
using graph::Rgg;

void PlannerConfig::validate() const
{
  if (batch_size < 1)
    throw PreconditionError("batch_size must be >= 1");
  if (!(time_budget > 0.0) || !std::isfinite(time_budget))
    throw PreconditionError("time_budget must be a positive number of seconds");
  if (segments < 1)
    throw PreconditionError("segments must be >= 1");
  if (radius_gamma && !(*radius_gamma > 0.0))
    throw PreconditionError("radius_gamma must be positive");
  if (!(k_gamma > 0.0))
    throw PreconditionError("k_gamma must be positive");
}

WorkModel WorkModel::for_dimension(int n)
{
  // Fitted as a + b n^2 from timings of the 4- and 10-dimensional presets.
  const double n2 = static_cast<double>(n) * n;
  WorkModel w;
  w.ns_per_steer_evaluation = 105.0 + 5.4 * n2;
  w.ns_per_state_check = 180.0 + 1.4 * n2;
  w.ns_per_neighbor = 60.0;
  w.ns_per_index_visit = 45.0;
  w.ns_per_expansion = 400.0;
  w.ns_per_indexed_state = 360.0 + 2.0 * n2;
  w.ns_per_draw = 165.0 + 0.4 * n2;
  return w;
}

namespace {

constexpr double kMicro = 1e-6;

double quantize(double seconds) { return std::round(seconds / kMicro) * kMicro; }

class KinodynamicEdges final : public search::EdgeModel
{
public:
  KinodynamicEdges(const Scenario& scn, const Rgg& rgg, int segments)
    : scn_(scn), rgg_(rgg), steerer_(scn.make_system()), segments_(segments)
  {
  }

  void set_radius(double r) { radius_ = r; }
  void set_k(std::size_t k) { k_ = k; }

  double cost(NodeId from, NodeId to) override { return entry(from, to).cost; }

  bool valid(NodeId from, NodeId to) override
  {
    Entry& e = entry(from, to);
    if (!std::isfinite(e.cost))
      return false;
    if (e.valid < 0) {
      const SteeringResult sr = steerer_.fixed_time(rgg_.node(from).x, rgg_.node(to).x, e.tau);
      e.valid = geometry::edge_free(scn_, steerer_, sr, segments_, &state_checks) ? 1 : 0;
    }
    return e.valid == 1;
  }

  void candidates(NodeId x, Direction, std::vector<NodeId>& out) override
  {
    ++nn_queries;
    const auto& q = rgg_.node(x).x;
    out = k_ > 0 ? rgg_.nearest(q, k_, x) : rgg_.near(q, radius_, x);
    nn_results += out.size();
  }

  std::uint64_t steer_evaluations() const { return steerer_.evaluations(); }

  std::uint64_t steer_calls = 0;
  std::uint64_t state_checks = 0;
  std::uint64_t nn_queries = 0;
  std::uint64_t nn_results = 0;

private:
  struct Entry
  {
    double cost = graph::kInfinity;
    double tau = 0.0;
    int valid = -1;
  };

  Entry& entry(NodeId from, NodeId to)
  {
    const std::uint64_t key = (std::uint64_t(from) << 32) | to;
    auto [it, fresh] = cache_.try_emplace(key);
    if (fresh) {
      ++steer_calls;
      try {
        const SteeringResult sr = steerer_.steer(rgg_.node(from).x, rgg_.node(to).x);
        it->second.cost = sr.cost;
        it->second.tau = sr.tau_star;
      } catch (const UnsteerablePairError&) {
        it->second.cost = graph::kInfinity;
      }
    }
    return it->second;
  }

  const Scenario& scn_;
  const Rgg& rgg_;
  Steerer steerer_;
  int segments_;
  double radius_ = 0.0;
  std::size_t k_ = 0;
  std::unordered_map<std::uint64_t, Entry> cache_;
};

class Runner
{
public:
  Runner(const Scenario& scn, const PlannerConfig& cfg, bool bidirectional)
    : scn_(scn), cfg_(cfg), bidirectional_(bidirectional), estimator_(scn.make_system()),
      work_(WorkModel::for_dimension(scn.dim())),
      rgg_(scn.workspace.lower, scn.workspace.upper), edges_(scn, rgg_, cfg.segments)
  {
  }

  PlanResult run()
  {
    PlanResult result;
    result.planner = bidirectional_ ? "btit" : "baseline";

    const double h_root = root_estimate();
    rgg_.set_root(Direction::Forward, rgg_.add(scn_.start, {h_root, 0.0}, false));
    rgg_.set_root(Direction::Backward, rgg_.add(scn_.goal, {0.0, h_root}, false));
    rgg_.rebuild_index();
    wall_start_ = std::chrono::steady_clock::now();
    work_offset_ = work_seconds();

    if (scn_.start == scn_.goal) {
      const double t = quantize(now());
      result.events.push_back({t, 0.0, 0});
      result.solutions.push_back({t, 0.0, 0, {0}, {scn_.start}});
      result.final_cost = 0.0;
      finish(result, nullptr);
      return result;
    }

    search::SearchOptions opt;
    opt.priority = cfg_.priority;
    opt.termination = cfg_.termination;
    opt.candidates = cfg_.candidates;
    opt.bidirectional = bidirectional_;
    search::SearchCore core(rgg_, edges_, opt);
    core_ = &core;
    core.on_improve = [&] {
      const double t = quantize(now());
      result.events.push_back({t, core.c_best(), core.batch_index()});
      Solution s{t, core.c_best(), core.batch_index(), core.incumbent_path(), {}};
      for (NodeId id : s.ids)
        s.states.push_back(rgg_.node(id).x);
      result.solutions.push_back(std::move(s));
    };

    std::uint64_t batch = 0;
    while (now() < cfg_.time_budget) {
      if (core.need_batch()) {
        if (cfg_.max_batches != 0 && batch == cfg_.max_batches)
          break;
        const std::size_t added = add_batch(batch, core.c_best(), result);
        core.begin_batch(batch++, added > 0);
        continue;
      }
      if (core.terminate()) {
        core.finish_batch();
        continue;
      }
      core.step();
    }
    result.final_cost = core.c_best();
    finish(result, &core);
    return result;
  }

private:
  double root_estimate()
  {
    if (cfg_.heuristic == search::Heuristic::Euclidean)
      return sampling::position_distance(scn_, scn_.start, scn_.goal);
    try {
      return estimator_.steer(scn_.start, scn_.goal).cost;
    } catch (const UnsteerablePairError&) {
      return 0.0;
    }
  }

  sampling::CostEstimate estimate(const Vector& x)
  {
    if (cfg_.heuristic == search::Heuristic::Euclidean)
      return {sampling::position_distance(scn_, scn_.start, x), sampling::position_distance(scn_, x, scn_.goal)};
    sampling::CostEstimate e;
    try {
      e.from_start = estimator_.steer(scn_.start, x).cost;
    } catch (const UnsteerablePairError&) {
      e.from_start = 0.0;
    }
    try {
      e.to_goal = estimator_.steer(x, scn_.goal).cost;
    } catch (const UnsteerablePairError&) {
      e.to_goal = 0.0;
    }
    return e;
  }

  std::size_t add_batch(std::uint64_t batch, double c_best, PlanResult& result)
  {
    auto rng = sampling::batch_stream(cfg_.seed, batch);
    auto stop = [&] { return now() >= cfg_.time_budget; };
    sampling::SampleBatch sb;
    if (cfg_.heuristic == search::Heuristic::Euclidean) {
      sb = sampling::informed_sample_phs(scn_, cfg_.batch_size, c_best, rng, batch, stop);
      for (const auto& x : sb.states)
        sb.estimates.push_back(estimate(x));
    } else {
      sb = sampling::informed_sample(scn_, cfg_.batch_size, c_best, rng,
                                     [this](const Vector& x) { return estimate(x); }, batch, stop);
    }
    draws_ += sb.draws;
    ++stats_.batches;
    if (sb.truncated)
      ++stats_.truncated_batches;
    for (std::size_t i = 0; i < sb.states.size(); ++i)
      rgg_.add(sb.states[i], {sb.estimates[i].to_goal, sb.estimates[i].from_start}, true);
    stats_.samples += sb.states.size();
    rgg_.rebuild_index();
    indexed_ += rgg_.size();

    const std::size_t q = std::max<std::size_t>(rgg_.size(), 2);
    if (cfg_.connection == search::Connection::KNN) {
      const std::size_t k = graph::knn_count(q, cfg_.k_gamma);
      edges_.set_k(k);
      result.radii.push_back(static_cast<double>(k));
    } else {
      const int d = scn_.dim();
      const double gamma = cfg_.radius_gamma    ? *cfg_.radius_gamma
                           : scn_.radius_gamma ? *scn_.radius_gamma
                                               : graph::default_radius_gamma(d);
      const double r = graph::connection_radius(q, d, gamma);
      edges_.set_radius(r);
      result.radii.push_back(r);
    }
    return sb.states.size();
  }

  double work_seconds() const
  {
    double ns = 0.0;
    ns += work_.ns_per_steer_evaluation * double(edges_.steer_evaluations() + estimator_.evaluations());
    ns += work_.ns_per_state_check * double(edges_.state_checks);
    ns += work_.ns_per_indexed_state * double(indexed_);
    ns += work_.ns_per_draw * double(draws_);
    ns += work_.ns_per_index_visit * double(rgg_.index_visits());
    if (core_) {
      ns += work_.ns_per_neighbor * double(core_->stats().neighbors);
      ns += work_.ns_per_expansion * double(core_->stats().expansions);
    }
    return ns * 1e-9;
  }

  double wall_seconds() const
  {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start_).count();
  }

  double now() const
  {
    return cfg_.clock == search::Clock::Wall ? wall_seconds() : work_seconds() - work_offset_;
  }

  void finish(PlanResult& result, const search::SearchCore* core)
  {
    PlanStats& s = result.stats;
    s = stats_;
    if (core) {
      s.expansions = core->stats().expansions;
      s.rewires = core->stats().rewires;
      s.edge_checks = core->stats().edge_checks;
      s.pruned = core->stats().pruned_states;
    }
    s.steer_calls = edges_.steer_calls;
    s.steer_evaluations = edges_.steer_evaluations() + estimator_.evaluations();
    s.state_checks = edges_.state_checks;
    s.index_visits = rgg_.index_visits();
    s.indexed = indexed_;
    s.draws = draws_;
    if (core)
      s.neighbors = core->stats().neighbors;
    s.live_states = rgg_.size();
    s.elapsed = now();
    s.wall_seconds = wall_seconds();
    result.states.reserve(rgg_.capacity());
    for (const auto& n : rgg_.nodes())
      result.states.push_back(n.x);
    core_ = nullptr;
  }

  const Scenario& scn_;
  const PlannerConfig& cfg_;
  bool bidirectional_;
  Steerer estimator_;
  WorkModel work_;
  Rgg rgg_;
  KinodynamicEdges edges_;
  const search::SearchCore* core_ = nullptr;
  std::chrono::steady_clock::time_point wall_start_;
  double work_offset_ = 0.0;
  std::uint64_t draws_ = 0;
  std::uint64_t indexed_ = 0;
  PlanStats stats_;
};

PlanResult run_planner(const Scenario& scn, const PlannerConfig& cfg, bool bidirectional)
{
  cfg.validate();
  geometry::validate(scn);
  Runner runner(scn, cfg, bidirectional);
  return runner.run();
}

}  // namespace

PlanResult plan(const Scenario& scn, const PlannerConfig& cfg)
{
  return run_planner(scn, cfg, true);
}

PlanResult plan_baseline(const Scenario& scn, const PlannerConfig& cfg)
{
  return run_planner(scn, cfg, false);
}

}  // namespace btit::planner
