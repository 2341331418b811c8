#include "btit/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "btit/errors.hpp"

#ifndef BTIT_DEFAULT_SCENARIO_DIR
#define BTIT_DEFAULT_SCENARIO_DIR "scenarios"
#endif

namespace btit::bench {

namespace fs = std::filesystem;

std::string to_string(PlannerKind p)
{
  return p == PlannerKind::Btit ? "btit" : "baseline";
}

PlannerKind parse_planner(const std::string& s)
{
  if (s == "btit")
    return PlannerKind::Btit;
  if (s == "baseline")
    return PlannerKind::Baseline;
  throw PreconditionError("unknown planner '" + s + "' (expected btit or baseline)");
}

Preset preset_for(const Scenario& scn)
{
  if (scn.system == "lq10d")
    return {300, 10.0};
  return {200, 2.0};
}

fs::path scenario_dir()
{
  if (const char* env = std::getenv(kScenarioDirEnv); env && *env)
    return env;
  return BTIT_DEFAULT_SCENARIO_DIR;
}

fs::path resolve_scenario(const std::string& name_or_path)
{
  if (name_or_path.empty())
    throw PreconditionError("empty scenario name");
  const fs::path direct(name_or_path);
  if (fs::is_regular_file(direct))
    return direct;
  const fs::path dir = scenario_dir();
  fs::path named = dir / name_or_path;
  if (named.extension() != ".json")
    named += ".json";
  if (fs::is_regular_file(named))
    return named;
  throw PreconditionError("scenario '" + name_or_path + "' not found (looked for " + direct.string() +
                          " and " + named.string() + ")");
}

TrialResult make_trial_result(const std::string& scenario, std::uint64_t seed, const planner::PlanResult& r)
{
  TrialResult t;
  t.planner = r.planner;
  t.scenario = scenario;
  t.seed = seed;
  t.events = r.events;
  if (!r.events.empty()) {
    t.first_solution_time = r.events.front().wall_time;
    t.final_cost = r.events.back().cost;
  }
  t.stats = r.stats;
  return t;
}

std::vector<TrialResult> run_trials(const Scenario& scn, PlannerKind kind, std::size_t trials,
                                    const PlannerConfig& cfg, unsigned jobs)
{
  cfg.validate();
  geometry::validate(scn);
  std::vector<TrialResult> results(trials);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= trials)
        return;
      try {
        PlannerConfig c = cfg;
        c.seed = cfg.seed + i;
        const auto r = kind == PlannerKind::Btit ? planner::plan(scn, c) : planner::plan_baseline(scn, c);
        results[i] = make_trial_result(scn.name, c.seed, r);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure)
          failure = std::current_exception();
        next = trials;
      }
    }
  };

  const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(trials, 1))));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n; ++t)
      pool.emplace_back(worker);
    for (auto& th : pool)
      th.join();
  }
  if (failure)
    std::rethrow_exception(failure);
  return results;
}

std::string format_double(double v)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string optional_field(const std::optional<double>& v)
{
  return v ? format_double(*v) : std::string();
}

void check_name(const std::string& s, const char* column)
{
  if (s.find_first_of(",\n\r\"") != std::string::npos)
    throw PreconditionError(std::string(column) + " '" + s + "' cannot be written to CSV");
}

}  // namespace

std::string events_csv(const std::vector<TrialResult>& results)
{
  std::string out = kEventsHeader;
  out += '\n';
  for (const auto& t : results) {
    check_name(t.planner, "planner");
    check_name(t.scenario, "scenario");
    for (const auto& e : t.events) {
      out += t.planner + ',' + t.scenario + ',' + std::to_string(t.seed) + ',' + std::to_string(e.batch_index) + ',' +
             format_double(e.wall_time) + ',' + format_double(e.cost) + '\n';
    }
  }
  return out;
}

std::string summary_csv(const std::vector<TrialResult>& results)
{
  std::string out = kSummaryHeader;
  out += '\n';
  for (const auto& t : results) {
    check_name(t.planner, "planner");
    check_name(t.scenario, "scenario");
    const bool success = t.final_cost && std::isfinite(*t.final_cost);
    out += t.planner + ',' + t.scenario + ',' + std::to_string(t.seed) + ',' + optional_field(t.first_solution_time) +
           ',' + optional_field(t.final_cost) + ',' + (success ? "1" : "0") + '\n';
  }
  return out;
}

namespace {

void write_file(const fs::path& path, const std::string& text)
{
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f)
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << text;
  f.close();
  if (!f)
    throw std::runtime_error("failed writing " + path.string());
}

}  // namespace

CsvPaths write_csvs(const fs::path& dir, const std::vector<TrialResult>& results)
{
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw std::runtime_error("cannot create output directory " + dir.string() +
                             (ec ? ": " + ec.message() : std::string()));
  std::string stem = "trials";
  if (!results.empty())
    stem = results.front().scenario + "_" + results.front().planner;
  CsvPaths p{dir / (stem + "_events.csv"), dir / (stem + "_summary.csv")};
  write_file(p.events, events_csv(results));
  write_file(p.summary, summary_csv(results));
  return p;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> split_fields(const std::string& line)
{
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos)
      return out;
    start = comma + 1;
  }
}

class CsvReader
{
public:
  CsvReader(const std::string& text, const std::string& source, const char* header)
    : source_(source), columns_(split_fields(header))
  {
    std::istringstream in(text);
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
      ++number;
      if (!line.empty() && line.back() == '\r')
        line.pop_back();
      if (number == 1) {
        check_header(line);
        continue;
      }
      if (line.empty())
        continue;
      auto fields = split_fields(line);
      if (fields.size() != columns_.size()) {
        const std::string& col = columns_[std::min(fields.size(), columns_.size() - 1)];
        throw CsvSchemaError(col, source_ + ":" + std::to_string(number) + ": expected " +
                                      std::to_string(columns_.size()) + " fields, found " +
                                      std::to_string(fields.size()) + " (column '" + col + "')");
      }
      rows_.push_back({number, std::move(fields)});
    }
    if (number == 0)
      throw CsvSchemaError(columns_.front(), source_ + ": empty file, expected header '" + header + "'");
  }

  struct Row
  {
    std::size_t line;
    std::vector<std::string> fields;
  };
  const std::vector<Row>& rows() const { return rows_; }

  std::string text(const Row& r, std::size_t col) const { return r.fields[col]; }

  std::uint64_t integer(const Row& r, std::size_t col) const
  {
    const std::string& s = r.fields[col];
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
      fail(r, col, "not a nonnegative integer");
    return v;
  }

  std::optional<double> optional_number(const Row& r, std::size_t col) const
  {
    const std::string& s = r.fields[col];
    if (s.empty())
      return std::nullopt;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
      fail(r, col, "not a number");
    return v;
  }

  double number(const Row& r, std::size_t col) const
  {
    const auto v = optional_number(r, col);
    if (!v)
      fail(r, col, "missing value");
    return *v;
  }

  [[noreturn]] void fail(const Row& r, std::size_t col, const std::string& why) const
  {
    throw CsvSchemaError(columns_[col], source_ + ":" + std::to_string(r.line) + ": column '" + columns_[col] +
                                            "': " + why + " ('" + r.fields[col] + "')");
  }

private:
  void check_header(const std::string& line) const
  {
    const auto got = split_fields(line);
    for (std::size_t i = 0; i < columns_.size(); ++i) {
      if (i >= got.size())
        throw CsvSchemaError(columns_[i], source_ + ": missing column '" + columns_[i] + "'");
      if (got[i] != columns_[i])
        throw CsvSchemaError(columns_[i], source_ + ": expected column '" + columns_[i] + "' at position " +
                                              std::to_string(i + 1) + ", found '" + got[i] + "'");
    }
    if (got.size() > columns_.size())
      throw CsvSchemaError(got[columns_.size()], source_ + ": unexpected column '" + got[columns_.size()] + "'");
  }

  std::string source_;
  std::vector<std::string> columns_;
  std::vector<Row> rows_;
};

}  // namespace

std::vector<EventRow> parse_events_csv(const std::string& text, const std::string& source)
{
  CsvReader csv(text, source, kEventsHeader);
  std::vector<EventRow> out;
  for (const auto& r : csv.rows())
    out.push_back({csv.text(r, 0), csv.text(r, 1), csv.integer(r, 2), csv.integer(r, 3), csv.number(r, 4),
                   csv.number(r, 5)});
  return out;
}

std::vector<SummaryRow> parse_summary_csv(const std::string& text, const std::string& source)
{
  CsvReader csv(text, source, kSummaryHeader);
  std::vector<SummaryRow> out;
  for (const auto& r : csv.rows()) {
    SummaryRow row{csv.text(r, 0), csv.text(r, 1), csv.integer(r, 2), csv.optional_number(r, 3),
                   csv.optional_number(r, 4), false};
    const std::string& s = r.fields[5];
    if (s == "1")
      row.success = true;
    else if (s != "0")
      csv.fail(r, 5, "expected 0 or 1");
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<SummaryRow> read_summary_csv(const fs::path& path)
{
  std::ifstream f(path, std::ios::binary);
  if (!f)
    throw std::runtime_error("cannot read " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_summary_csv(ss.str(), path.string());
}

double median(std::vector<double> values)
{
  if (values.empty())
    throw PreconditionError("median of an empty set");
  const std::size_t n = values.size();
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(values.begin(), mid, values.end());
  const double upper = *mid;
  if (n % 2 == 1)
    return upper;
  const double lower = *std::max_element(values.begin(), mid);
  return lower + (upper - lower) / 2.0;
}

SummaryTable summarize(const std::vector<SummaryRow>& rows)
{
  struct Acc
  {
    std::size_t trials = 0;
    std::vector<double> times, costs;
  };
  std::map<std::pair<std::string, std::string>, Acc> groups;  // (scenario, planner)
  for (const auto& r : rows) {
    Acc& a = groups[{r.scenario, r.planner}];
    ++a.trials;
    if (r.success && r.final_cost && std::isfinite(*r.final_cost)) {
      a.costs.push_back(*r.final_cost);
      if (r.first_solution)
        a.times.push_back(*r.first_solution);
    }
  }

  SummaryTable table;
  for (const auto& [key, a] : groups) {
    GroupSummary g;
    g.scenario = key.first;
    g.planner = key.second;
    g.trials = a.trials;
    g.successes = a.costs.size();
    if (!a.times.empty())
      g.median_first_solution = median(a.times);
    if (!a.costs.empty())
      g.median_final_cost = median(a.costs);
    table.groups.push_back(std::move(g));
  }
  for (const auto& a : table.groups)
    for (const auto& b : table.groups) {
      if (a.scenario != b.scenario || a.planner == b.planner)
        continue;
      if (!a.median_first_solution || !b.median_first_solution || !(*a.median_first_solution > 0.0))
        continue;
      table.ratios.push_back({a.scenario, a.planner, b.planner, *b.median_first_solution / *a.median_first_solution});
    }
  return table;
}

std::string format_summary(const SummaryTable& table)
{
  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-16s %-10s %7s %8s %16s %18s\n", "scenario", "planner", "trials", "success",
                "median_first_s", "median_final_cost");
  out << buf;
  auto opt = [](const std::optional<double>& v) {
    char b[32];
    if (!v)
      return std::string("-");
    std::snprintf(b, sizeof b, "%.6g", *v);
    return std::string(b);
  };
  for (const auto& g : table.groups) {
    std::snprintf(buf, sizeof buf, "%-16s %-10s %7zu %7.1f%% %16s %18s\n", g.scenario.c_str(), g.planner.c_str(),
                  g.trials, 100.0 * g.success_rate(), opt(g.median_first_solution).c_str(),
                  opt(g.median_final_cost).c_str());
    out << buf;
  }
  if (!table.ratios.empty()) {
    out << "\nmedian first-solution time ratios:\n";
    for (const auto& r : table.ratios) {
      std::snprintf(buf, sizeof buf, "%-16s %s vs %s: %.3gx\n", r.scenario.c_str(), r.planner.c_str(),
                    r.versus.c_str(), r.ratio);
      out << buf;
    }
  }
  return out.str();
}

}  // namespace btit::bench
