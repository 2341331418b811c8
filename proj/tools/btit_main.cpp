#include <cstdio>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "btit/bench.hpp"
#include "btit/errors.hpp"

using namespace btit;

namespace {

struct PlanArgs
{
  std::string scenario;
  std::string planner = "btit";
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  std::optional<std::size_t> batch_size;
  std::optional<double> budget;
  int segments = geometry::kDefaultSegments;
  std::string priority = "fhat";
  std::string termination = "first-lb";
  std::string connection = "rdisk";
  std::string heuristic = "controller";
  std::string clock = "work";
  std::optional<double> radius_gamma;
  std::string out = ".";
  unsigned jobs = 1;
  bool quiet = false;
};

int run_plan(const PlanArgs& a)
{
  const auto path = bench::resolve_scenario(a.scenario);
  const auto scn = geometry::load_scenario(path);
  const auto preset = bench::preset_for(scn);

  planner::PlannerConfig cfg;
  cfg.batch_size = a.batch_size.value_or(preset.batch_size);
  cfg.time_budget = a.budget.value_or(preset.budget);
  cfg.seed = a.seed;
  cfg.segments = a.segments;
  cfg.priority = search::parse_priority(a.priority);
  cfg.termination = search::parse_termination(a.termination);
  cfg.connection = search::parse_connection(a.connection);
  cfg.heuristic = search::parse_heuristic(a.heuristic);
  cfg.clock = search::parse_clock(a.clock);
  cfg.radius_gamma = a.radius_gamma;
  const auto kind = bench::parse_planner(a.planner);

  const auto results = bench::run_trials(scn, kind, a.trials, cfg, a.jobs);
  const auto paths = bench::write_csvs(a.out, results);
  if (!a.quiet) {
    for (const auto& t : results) {
      std::printf("%s %s seed %llu: ", t.planner.c_str(), t.scenario.c_str(), static_cast<unsigned long long>(t.seed));
      if (t.final_cost)
        std::printf("first %.6g s, final cost %.6g after %zu events\n", *t.first_solution_time, *t.final_cost,
                    t.events.size());
      else
        std::printf("no solution\n");
    }
    std::printf("wrote %s\nwrote %s\n", paths.events.string().c_str(), paths.summary.string().c_str());
  }
  return 0;
}

int run_summarize(const std::vector<std::string>& files)
{
  std::vector<bench::SummaryRow> rows;
  for (const auto& f : files) {
    auto part = bench::read_summary_csv(f);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  std::cout << bench::format_summary(bench::summarize(rows));
  return 0;
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"BTIT* kinodynamic planner benchmark"};
  app.require_subcommand(1);

  PlanArgs pa;
  auto* plan = app.add_subcommand("plan", "Run seeded trials and write events and summary CSVs");
  plan->add_option("--scenario", pa.scenario, "Scenario name or JSON path")->required();
  plan->add_option("--planner", pa.planner, "btit or baseline")->check(CLI::IsMember({"btit", "baseline"}));
  plan->add_option("--trials", pa.trials, "Number of trials")->check(CLI::PositiveNumber);
  plan->add_option("--seed", pa.seed, "Seed of the first trial");
  plan->add_option("--batch-size", pa.batch_size, "Samples per batch (default from the scenario's system)");
  plan->add_option("--budget", pa.budget, "Time budget per trial in seconds (default from the scenario's system)");
  plan->add_option("--segments", pa.segments, "Collision-check segments per edge")->check(CLI::PositiveNumber);
  plan->add_option("--priority", pa.priority, "fhat or mm")->check(CLI::IsMember({"fhat", "mm"}));
  plan->add_option("--termination", pa.termination, "first-lb or lb")->check(CLI::IsMember({"first-lb", "lb"}));
  plan->add_option("--connection", pa.connection, "rdisk or knn")->check(CLI::IsMember({"rdisk", "knn"}));
  plan->add_option("--heuristic", pa.heuristic, "controller or euclidean")
    ->check(CLI::IsMember({"controller", "euclidean"}));
  plan->add_option("--clock", pa.clock, "work (deterministic) or wall")->check(CLI::IsMember({"work", "wall"}));
  plan->add_option("--radius-gamma", pa.radius_gamma, "Override the r-disk scale constant");
  plan->add_option("--out", pa.out, "Output directory");
  plan->add_option("--jobs", pa.jobs, "Trials run in parallel")->check(CLI::PositiveNumber);
  plan->add_flag("--quiet", pa.quiet, "Only write the CSVs");

  std::vector<std::string> files;
  auto* summarize = app.add_subcommand("summarize", "Summarize one or more summary CSVs");
  summarize->add_option("files", files, "Summary CSV files")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*plan)
      return run_plan(pa);
    return run_summarize(files);
  } catch (const bench::CsvSchemaError& e) {
    std::cerr << "error: schema mismatch in column '" << e.column() << "': " << e.what() << "\n";
  } catch (const ScenarioError& e) {
    std::cerr << "error: scenario field '" << e.field() << "': " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return 1;
}
