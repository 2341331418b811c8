// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Tolerances and trial counts are fixed here.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "btit/bench.hpp"
#include "btit/graph_search.hpp"
#include "btit/planner.hpp"
#include "oracles.hpp"
#include "solution_check.hpp"

using namespace btit;

namespace {

constexpr double kSteerRelTol = 1e-6;
constexpr int kSteerPairs = 200;
constexpr double kSteerMaxSeconds = 10.0;
constexpr double kClosedFormTol = 1e-10;
constexpr double kLyapunovTol = 1e-8;
constexpr double kGramianMaxSeconds = 5.0;
constexpr int kGraphs = 50;
constexpr int kAdmissibilityGraphs = 20;
constexpr double kGraphTol = 1e-9;
constexpr double kGraphMaxSeconds = 5.0;
constexpr double kPathCostRelTol = 1e-9;
constexpr int kCheckSegments = 200;
constexpr int kFineSegments = 10000;
constexpr int kAnytimeSeeds = 20;
constexpr double kMinSuccessRate = 0.95;
constexpr double kDeterminismMaxSeconds = 10.0;
constexpr std::uint64_t kFirstSeed = 1;

using Clock = std::chrono::steady_clock;

struct Outcome
{
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const char* name, const std::function<Outcome()>& body)
{
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  std::printf("%s [%d] %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), secs);
  std::fflush(stdout);
  failures += !o.pass;
}

double seconds_since(Clock::time_point t0)
{
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

geometry::Scenario bundled(const std::string& name)
{
  return geometry::load_scenario(std::filesystem::path(BTIT_TEST_SCENARIO_DIR) / (name + ".json"));
}

template <class... Args>
std::string fmt(const char* f, Args... args)
{
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome steering()
{
  const auto t0 = Clock::now();
  const auto scn = bundled("dir4d_lab");
  const auto sys = scn.make_system();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto draw = [&] {
    dynamics::Vector x(4);
    for (int i = 0; i < 4; ++i)
      x[i] = scn.workspace.lower[i] + u(rng) * (scn.workspace.upper[i] - scn.workspace.lower[i]);
    return x;
  };
  double worst = 0.0;
  for (int k = 0; k < kSteerPairs; ++k) {
    const auto x0 = draw(), x1 = draw();
    const double tau_max = dynamics::default_tau_max(x0, x1);
    const auto sr = dynamics::steer(sys, x0, x1, tau_max);
    const auto [t_ref, c_ref] = oracle::grid_minimum(
      [&](double t) { return oracle::double_integrator_cost(x0, x1, t); }, dynamics::kTauMin, tau_max);
    worst = std::max(worst, std::abs(sr.cost - c_ref) / c_ref);
  }
  const double secs = seconds_since(t0);
  return {worst <= kSteerRelTol && secs < kSteerMaxSeconds,
          fmt("max relative cost error %.3g over %d dir4d pairs (tol %.0e, limit %.0f s)", worst, kSteerPairs,
              kSteerRelTol, kSteerMaxSeconds)};
}

Outcome gramians()
{
  const auto t0 = Clock::now();
  double worst_closed = 0.0;
  for (const char* name : {"di1d", "dir4d"}) {
    const auto sys = dynamics::system_preset(name);
    const int axes = sys.state_dim() / 2;
    for (double t : {0.01, 0.1, 0.5, 1.0, 2.0, 5.0}) {
      dynamics::Matrix want = dynamics::Matrix::Zero(2 * axes, 2 * axes);
      for (int a = 0; a < axes; ++a) {
        want(a, a) = t * t * t / 3.0;
        want(a, a + axes) = want(a + axes, a) = t * t / 2.0;
        want(a + axes, a + axes) = t;
      }
      worst_closed = std::max(worst_closed, (dynamics::gramian(sys, t) - want).cwiseAbs().maxCoeff());
    }
  }
  const auto quad = dynamics::system_preset("lq10d");
  const dynamics::Matrix W = quad.B() * quad.R().inverse() * quad.B().transpose();
  const double worst_quad =
    (dynamics::gramian(quad, 0.5) - oracle::lyapunov_rk4(quad.A(), W, 0.5, 4000)).cwiseAbs().maxCoeff();
  const double secs = seconds_since(t0);
  return {worst_closed <= kClosedFormTol && worst_quad <= kLyapunovTol && secs < kGramianMaxSeconds,
          fmt("double integrators max error %.3g (tol %.0e); quadrotor vs Lyapunov ODE max error %.3g (tol %.0e)",
              worst_closed, kClosedFormTol, worst_quad, kLyapunovTol)};
}

search::GraphSearchConfig graph_config(search::Priority p)
{
  search::GraphSearchConfig cfg;
  cfg.priority = p;
  cfg.termination = search::Termination::LBOnly;
  return cfg;
}

Outcome graph_optimality()
{
  const auto t0 = Clock::now();
  int matched = 0, solvable = 0;
  double worst = 0.0;
  for (int seed = 0; seed < kGraphs; ++seed) {
    const auto g = oracle::random_graph(seed);
    const double want = oracle::dijkstra(g, g.start)[g.goal];
    const double got = search::plan_on_graph(g, graph_config(search::Priority::FHat)).cost;
    solvable += want < oracle::kInf;
    const bool ok = (want == oracle::kInf && got == oracle::kInf) || std::abs(got - want) <= kGraphTol;
    if (want < oracle::kInf && got < oracle::kInf)
      worst = std::max(worst, std::abs(got - want));
    matched += ok;
  }
  const double secs = seconds_since(t0);
  return {matched == kGraphs && secs < kGraphMaxSeconds,
          fmt("%d/%d graphs match Dijkstra (%d with a path), max difference %.3g (tol %.0e)", matched, kGraphs,
              solvable, worst, kGraphTol)};
}

Outcome meet_in_the_middle()
{
  const auto t0 = Clock::now();
  int violations = 0;
  std::size_t expansions = 0;
  double worst_ratio = 0.0;
  for (int seed = 0; seed < kGraphs; ++seed) {
    const auto g = oracle::random_graph(seed);
    const double c_star = oracle::dijkstra(g, g.start)[g.goal];
    const auto r = search::plan_on_graph(g, graph_config(search::Priority::MMMax));
    for (const auto& e : r.expansions) {
      ++expansions;
      if (!(e.g <= c_star / 2.0 + kGraphTol))
        ++violations;
      if (c_star < oracle::kInf && c_star > 0.0)
        worst_ratio = std::max(worst_ratio, e.g / c_star);
    }
  }
  const double secs = seconds_since(t0);
  return {violations == 0 && secs < kGraphMaxSeconds,
          fmt("%d of %zu expansions exceed C*/2 (largest g/C* = %.4f)", violations, expansions, worst_ratio)};
}

Outcome admissibility()
{
  const auto t0 = Clock::now();
  int violations = 0, raised = 0;
  std::size_t touched = 0;
  for (int seed = 0; seed < kAdmissibilityGraphs; ++seed) {
    const auto g = oracle::random_graph(1000 + seed, 30, 4);
    const auto to_goal = oracle::dijkstra(g, g.goal, true);
    auto cfg = graph_config(search::Priority::FHat);
    cfg.termination = search::Termination::FirstIntersectionPlusLB;
    const auto r = search::plan_on_graph(g, cfg);
    for (std::size_t v = 0; v < g.vertices; ++v) {
      if (!r.touched[v])
        continue;
      ++touched;
      const double base = g.h_to_goal.empty() ? 0.0 : g.h_to_goal[v];
      raised += r.h_hat[v][0] > base;
      violations += !(r.h_hat[v][0] <= to_goal[v] + kGraphTol);
    }
  }
  const double secs = seconds_since(t0);
  return {violations == 0 && secs < kGraphMaxSeconds,
          fmt("%d violations over %zu touched states in %d graphs (%d estimates raised)", violations, touched,
              kAdmissibilityGraphs, raised)};
}

planner::PlannerConfig trial_config(const geometry::Scenario& scn, std::uint64_t seed)
{
  const auto preset = bench::preset_for(scn);
  planner::PlannerConfig cfg;
  cfg.batch_size = preset.batch_size;
  cfg.time_budget = preset.budget;
  cfg.seed = seed;
  return cfg;
}

Outcome end_to_end()
{
  std::ostringstream detail;
  bool pass = true;
  for (const char* name : {"dir4d_lab", "lq10d_lab2"}) {
    const auto scn = bundled(name);
    const auto cfg = trial_config(scn, kFirstSeed);
    const auto r = planner::plan(scn, cfg);
    int coarse_ok = 0, fine_ok = 0;
    std::string problem;
    for (const auto& sol : r.solutions) {
      const auto coarse = check::validate_solution(scn, sol, kCheckSegments, kPathCostRelTol);
      const auto fine = check::validate_solution(scn, sol, kFineSegments, kPathCostRelTol);
      coarse_ok += coarse.ok;
      fine_ok += fine.ok;
      if (problem.empty() && !coarse.ok)
        problem = coarse.problem;
      if (problem.empty() && !fine.ok)
        problem = fine.problem;
    }
    const int n = static_cast<int>(r.solutions.size());
    const bool ok = n > 0 && coarse_ok == n && fine_ok == n;
    pass = pass && ok;
    detail << name << " seed " << kFirstSeed << " (" << cfg.time_budget << " s): " << n << " incumbents, " << coarse_ok
           << " valid at " << kCheckSegments << " segments, " << fine_ok << " at " << kFineSegments;
    if (n == 0)
      detail << " [no solution]";
    if (!problem.empty())
      detail << " [" << problem << "]";
    detail << "; ";
  }
  auto s = detail.str();
  s.resize(s.size() - 2);
  return {pass, s};
}

struct Runs
{
  std::vector<bench::TrialResult> btit, baseline;
};

// Median over all trials with unsolved trials counted as +inf.
double median_first(const std::vector<bench::TrialResult>& rs)
{
  std::vector<double> v;
  for (const auto& t : rs)
    v.push_back(t.first_solution_time.value_or(oracle::kInf));
  return oracle::sorted_median(v);
}

Outcome anytime(const Runs& runs)
{
  int solved = 0, monotone = 0;
  std::vector<double> first_costs, final_costs;
  for (const auto& t : runs.btit) {
    if (t.events.empty())
      continue;
    ++solved;
    bool dec = true;
    for (std::size_t i = 1; i < t.events.size(); ++i)
      dec = dec && t.events[i].cost < t.events[i - 1].cost && t.events[i].wall_time >= t.events[i - 1].wall_time;
    monotone += dec;
    first_costs.push_back(t.events.front().cost);
    final_costs.push_back(t.events.back().cost);
  }
  const double rate = static_cast<double>(solved) / kAnytimeSeeds;
  const double med_first = first_costs.empty() ? oracle::kInf : oracle::sorted_median(first_costs);
  const double med_final = final_costs.empty() ? oracle::kInf : oracle::sorted_median(final_costs);
  return {rate >= kMinSuccessRate && monotone == solved && med_final <= med_first && solved > 0,
          fmt("dir4d_lab, %d seeds x 2 s: success %.0f%% (min %.0f%%), strictly improving in %d/%d, median first cost "
              "%.4g, median final cost %.4g",
              kAnytimeSeeds, 100.0 * rate, 100.0 * kMinSuccessRate, monotone, solved, med_first, med_final)};
}

Outcome speedup(const Runs& runs)
{
  const double b = median_first(runs.btit);
  const double a = median_first(runs.baseline);
  std::vector<bench::SummaryRow> rows;
  double work_btit = 0, wall_btit = 0, work_base = 0, wall_base = 0;
  for (const auto* set : {&runs.btit, &runs.baseline})
    for (const auto& t : *set) {
      rows.push_back({t.planner, t.scenario, t.seed, t.first_solution_time, t.final_cost, t.final_cost.has_value()});
      (set == &runs.btit ? work_btit : work_base) += t.stats.elapsed;
      (set == &runs.btit ? wall_btit : wall_base) += t.stats.wall_seconds;
    }
  double success_only = 0.0;
  for (const auto& r : bench::summarize(rows).ratios)
    if (r.planner == "btit" && r.versus == "baseline")
      success_only = r.ratio;
  const double ratio = b > 0.0 ? a / b : 0.0;
  return {b < a,
          fmt("dir4d_lab, %d seeds: median first solution btit %.4g s vs baseline %.4g s on the work clock, ratio %.3g "
              "(successful trials only: %.3g); wall/work time btit %.3g, baseline %.3g",
              kAnytimeSeeds, b, a, ratio, success_only, wall_btit / work_btit, wall_base / work_base)};
}

Outcome determinism(const Runs& runs)
{
  const auto t0 = Clock::now();
  const auto scn = bundled("dir4d_lab");
  const auto again = bench::run_trials(scn, bench::PlannerKind::Btit, 1, trial_config(scn, kFirstSeed));
  const auto first = std::vector<bench::TrialResult>{runs.btit.front()};
  const std::string a = bench::events_csv(first), b = bench::events_csv(again);
  const double secs = seconds_since(t0);
  return {a == b && secs < kDeterminismMaxSeconds && first.front().seed == kFirstSeed,
          fmt("dir4d_lab seed %llu re-run: events CSV %s (%zu bytes)", static_cast<unsigned long long>(kFirstSeed),
              a == b ? "byte-identical" : "differs", a.size())};
}

}  // namespace

int main()
{
  report(1, "steering correctness", steering);
  report(2, "gramian correctness", gramians);
  report(3, "graph-search optimality", graph_optimality);
  report(4, "meet-in-the-middle bound", meet_in_the_middle);
  report(5, "admissibility of heuristic updates", admissibility);
  report(6, "end-to-end validity", end_to_end);

  Runs runs;
  const auto t0 = Clock::now();
  try {
    const auto lab = bundled("dir4d_lab");
    const auto cfg = trial_config(lab, kFirstSeed);
    runs.btit = bench::run_trials(lab, bench::PlannerKind::Btit, kAnytimeSeeds, cfg);
    runs.baseline = bench::run_trials(lab, bench::PlannerKind::Baseline, kAnytimeSeeds, cfg);
  } catch (const std::exception& e) {
    std::printf("error running the dir4d_lab trials: %s\n", e.what());
  }
  std::printf("(ran %d btit and %d baseline dir4d_lab trials in %.1f s)\n", kAnytimeSeeds, kAnytimeSeeds,
              seconds_since(t0));
  const bool have_runs = runs.btit.size() == kAnytimeSeeds && runs.baseline.size() == kAnytimeSeeds;
  auto need_runs = [&](auto fn) {
    return [&, fn]() -> Outcome {
      if (!have_runs)
        return {false, "trials did not run"};
      return fn(runs);
    };
  };
  report(7, "anytime behavior", need_runs(anytime));
  report(8, "directional speedup over the unidirectional baseline", need_runs(speedup));
  report(9, "determinism", need_runs(determinism));

  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
