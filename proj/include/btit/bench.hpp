#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "btit/planner.hpp"

namespace btit::bench {

using geometry::Scenario;
using planner::PlannerConfig;

inline constexpr const char* kEventsHeader = "planner,scenario,seed,batch,wall_time_s,cost";
inline constexpr const char* kSummaryHeader = "planner,scenario,seed,first_solution_s,final_cost,success";
inline constexpr const char* kScenarioDirEnv = "BTIT_SCENARIO_DIR";

enum class PlannerKind
{
  Btit,
  Baseline,
};

std::string to_string(PlannerKind p);
PlannerKind parse_planner(const std::string& s);

/// Batch size and budget used when the command line does not give them.
struct Preset
{
  std::size_t batch_size = 200;
  double budget = 2.0;
};

/// Defaults by system preset: dir4d 200 states / 2 s, lq10d 300 states / 10 s.
Preset preset_for(const Scenario& scn);

/// $BTIT_SCENARIO_DIR when set, otherwise the bundled scenario directory.
std::filesystem::path scenario_dir();

/// An existing file path is used as is; otherwise `<scenario_dir>/<name>.json`.
/// Throws PreconditionError listing where it looked.
std::filesystem::path resolve_scenario(const std::string& name_or_path);

struct TrialResult
{
  std::string planner;
  std::string scenario;
  std::uint64_t seed = 0;
  std::vector<search::AnytimeEvent> events;
  std::optional<double> first_solution_time;
  std::optional<double> final_cost;
  planner::PlanStats stats;
};

TrialResult make_trial_result(const std::string& scenario, std::uint64_t seed, const planner::PlanResult& r);

/// Runs trials with seeds cfg.seed + i on up to `jobs` threads. Results are in
/// seed order whatever the thread count.
std::vector<TrialResult> run_trials(const Scenario& scn, PlannerKind planner, std::size_t trials,
                                    const PlannerConfig& cfg, unsigned jobs = 1);

std::string format_double(double v);
std::string events_csv(const std::vector<TrialResult>& results);
std::string summary_csv(const std::vector<TrialResult>& results);

struct CsvPaths
{
  std::filesystem::path events;
  std::filesystem::path summary;
};

/// Writes `<scenario>_<planner>_events.csv` and `..._summary.csv` into dir,
/// creating it if needed. Throws std::runtime_error when it cannot.
CsvPaths write_csvs(const std::filesystem::path& dir, const std::vector<TrialResult>& results);

struct EventRow
{
  std::string planner;
  std::string scenario;
  std::uint64_t seed = 0;
  std::uint64_t batch = 0;
  double wall_time = 0.0;
  double cost = 0.0;
};

struct SummaryRow
{
  std::string planner;
  std::string scenario;
  std::uint64_t seed = 0;
  std::optional<double> first_solution;
  std::optional<double> final_cost;
  bool success = false;
};

/// Malformed input; column() names the offending header field.
class CsvSchemaError : public std::runtime_error
{
public:
  CsvSchemaError(std::string column, const std::string& what)
    : std::runtime_error(what), column_(std::move(column))
  {
  }
  const std::string& column() const noexcept { return column_; }

private:
  std::string column_;
};

std::vector<EventRow> parse_events_csv(const std::string& text, const std::string& source = "<string>");
std::vector<SummaryRow> parse_summary_csv(const std::string& text, const std::string& source = "<string>");
std::vector<SummaryRow> read_summary_csv(const std::filesystem::path& path);

/// Median of the values (mean of the middle pair for even counts). Throws on
/// empty input.
double median(std::vector<double> values);

struct GroupSummary
{
  std::string planner;
  std::string scenario;
  std::size_t trials = 0;
  std::size_t successes = 0;
  // Over successful trials only.
  std::optional<double> median_first_solution;
  std::optional<double> median_final_cost;

  double success_rate() const { return trials == 0 ? 0.0 : double(successes) / double(trials); }
};

/// Median first-solution time of `versus` divided by that of `planner`; above
/// 1 means `planner` is faster.
struct SpeedRatio
{
  std::string scenario;
  std::string planner;
  std::string versus;
  double ratio = 0.0;
};

struct SummaryTable
{
  std::vector<GroupSummary> groups;  // sorted by (scenario, planner)
  std::vector<SpeedRatio> ratios;    // every ordered planner pair per scenario
};

SummaryTable summarize(const std::vector<SummaryRow>& rows);
std::string format_summary(const SummaryTable& table);

}  // namespace btit::bench
