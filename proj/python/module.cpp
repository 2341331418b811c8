#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "btit/bench.hpp"
#include "btit/errors.hpp"
#include "btit/graph_search.hpp"
#include "btit/planner.hpp"
#include "btit/sampling.hpp"

namespace py = pybind11;
using namespace btit;

PYBIND11_MODULE(_core, m)
{
  m.doc() = "BTIT* bidirectional kinodynamic planner";

  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<NumericDomainError>(m, "NumericDomainError", PyExc_ArithmeticError);
  py::register_exception<SingularGramianError>(m, "SingularGramianError", PyExc_RuntimeError);
  py::register_exception<UnsteerablePairError>(m, "UnsteerablePairError", PyExc_RuntimeError);
  py::register_exception<InfeasibleSpaceError>(m, "InfeasibleSpaceError", PyExc_RuntimeError);
  py::register_exception<ScenarioError>(m, "ScenarioError", PyExc_ValueError);
  py::register_exception<bench::CsvSchemaError>(m, "CsvSchemaError", PyExc_ValueError);

  // dynamics
  py::class_<dynamics::LinearSystem>(m, "LinearSystem")
    .def(py::init<dynamics::Matrix, dynamics::Matrix, dynamics::Vector, dynamics::Matrix, std::string>(),
         py::arg("A"), py::arg("B"), py::arg("c"), py::arg("R"), py::arg("name") = "")
    .def_property_readonly("A", &dynamics::LinearSystem::A)
    .def_property_readonly("B", &dynamics::LinearSystem::B)
    .def_property_readonly("c", &dynamics::LinearSystem::c)
    .def_property_readonly("R", &dynamics::LinearSystem::R)
    .def_property_readonly("name", &dynamics::LinearSystem::name)
    .def_property_readonly("state_dim", &dynamics::LinearSystem::state_dim)
    .def_property_readonly("control_dim", &dynamics::LinearSystem::control_dim)
    .def_property_readonly("nilpotent", &dynamics::LinearSystem::nilpotent);

  py::class_<dynamics::SteeringResult>(m, "SteeringResult")
    .def_readonly("tau_star", &dynamics::SteeringResult::tau_star)
    .def_readonly("cost", &dynamics::SteeringResult::cost)
    .def_readonly("x0", &dynamics::SteeringResult::x0)
    .def_readonly("x1", &dynamics::SteeringResult::x1)
    .def_readonly("d_vec", &dynamics::SteeringResult::d_vec);

  m.def("system_preset", &dynamics::system_preset, py::arg("name"));
  m.def("system_preset_names", &dynamics::system_preset_names);
  m.def("mat_exp", &dynamics::mat_exp, py::arg("A"), py::arg("t"));
  m.def("gramian", &dynamics::gramian, py::arg("system"), py::arg("t"));
  m.def("drift", &dynamics::drift, py::arg("system"), py::arg("x0"), py::arg("t"));
  m.def("steer_cost", &dynamics::steer_cost, py::arg("system"), py::arg("x0"), py::arg("x1"), py::arg("tau"));
  m.def(
    "steer",
    [](const dynamics::LinearSystem& sys, const dynamics::Vector& x0, const dynamics::Vector& x1,
       std::optional<double> tau_max) {
      return dynamics::steer(sys, x0, x1, tau_max.value_or(dynamics::default_tau_max(x0, x1)));
    },
    py::arg("system"), py::arg("x0"), py::arg("x1"), py::arg("tau_max") = py::none());
  m.def("steer_fixed_time", &dynamics::steer_fixed_time, py::arg("system"), py::arg("x0"), py::arg("x1"),
        py::arg("tau"));
  m.def("state_at", &dynamics::state_at, py::arg("system"), py::arg("result"), py::arg("t"));
  m.def("control_at", &dynamics::control_at, py::arg("system"), py::arg("result"), py::arg("t"));
  m.def(
    "synthesize",
    [](const dynamics::LinearSystem& sys, const dynamics::SteeringResult& sr, int segments) {
      auto tr = dynamics::synthesize(sys, sr, segments);
      return py::make_tuple(tr.times, tr.states);
    },
    py::arg("system"), py::arg("result"), py::arg("segments"));

  // geometry
  py::class_<geometry::Scenario>(m, "Scenario")
    .def_readonly("name", &geometry::Scenario::name)
    .def_readonly("description", &geometry::Scenario::description)
    .def_readonly("system", &geometry::Scenario::system)
    .def_readonly("start", &geometry::Scenario::start)
    .def_readonly("goal", &geometry::Scenario::goal)
    .def_readonly("radius_gamma", &geometry::Scenario::radius_gamma)
    .def_property_readonly("lower", [](const geometry::Scenario& s) { return s.workspace.lower; })
    .def_property_readonly("upper", [](const geometry::Scenario& s) { return s.workspace.upper; })
    .def_property_readonly("position_dims", [](const geometry::Scenario& s) { return s.workspace.position_dims; })
    .def_property_readonly("obstacles",
                           [](const geometry::Scenario& s) {
                             std::vector<std::pair<dynamics::Vector, dynamics::Vector>> out;
                             for (const auto& b : s.obstacles.boxes)
                               out.emplace_back(b.min, b.max);
                             return out;
                           })
    .def_property_readonly("dim", &geometry::Scenario::dim)
    .def("make_system", &geometry::Scenario::make_system);

  m.def("load_scenario", &geometry::load_scenario, py::arg("path"));
  m.def("parse_scenario", &geometry::parse_scenario, py::arg("json_text"), py::arg("source") = "<string>");
  m.def("dump_scenario", &geometry::dump_scenario, py::arg("scenario"));
  m.def("state_valid", py::overload_cast<const geometry::Scenario&, const dynamics::Vector&>(&geometry::state_valid),
        py::arg("scenario"), py::arg("x"));
  m.def(
    "edge_valid",
    [](const geometry::Scenario& scn, const dynamics::SteeringResult& sr, int segments) {
      return geometry::edge_valid(scn, sr, segments);
    },
    py::arg("scenario"), py::arg("result"), py::arg("segments") = geometry::kDefaultSegments);
  m.def(
    "edge_free",
    [](const geometry::Scenario& scn, const dynamics::SteeringResult& sr, int segments) {
      return geometry::edge_free(scn, sr, segments);
    },
    py::arg("scenario"), py::arg("result"), py::arg("segments") = geometry::kDefaultSegments);

  // sampling
  m.def(
    "sample_uniform",
    [](const geometry::Scenario& scn, std::uint64_t seed, std::size_t count) {
      auto rng = sampling::batch_stream(seed, 0);
      std::vector<dynamics::Vector> out;
      for (std::size_t i = 0; i < count; ++i)
        out.push_back(sampling::sample_uniform(scn, rng));
      return out;
    },
    py::arg("scenario"), py::arg("seed"), py::arg("count"));

  m.def("connection_radius", &graph::connection_radius, py::arg("q"), py::arg("d"), py::arg("gamma"));

  // graph search on explicit graphs
  py::enum_<search::Priority>(m, "Priority").value("FHAT", search::Priority::FHat).value("MM", search::Priority::MMMax);
  py::enum_<search::Termination>(m, "Termination")
    .value("FIRST_LB", search::Termination::FirstIntersectionPlusLB)
    .value("LB", search::Termination::LBOnly);
  py::enum_<search::Connection>(m, "Connection")
    .value("RDISK", search::Connection::RDisk)
    .value("KNN", search::Connection::KNN);
  py::enum_<search::Heuristic>(m, "Heuristic")
    .value("CONTROLLER", search::Heuristic::Controller)
    .value("EUCLIDEAN", search::Heuristic::Euclidean);
  py::enum_<search::Clock>(m, "Clock").value("WORK", search::Clock::Work).value("WALL", search::Clock::Wall);

  py::class_<search::GraphSearchResult>(m, "GraphSearchResult")
    .def_readonly("cost", &search::GraphSearchResult::cost)
    .def_readonly("path", &search::GraphSearchResult::path)
    .def_readonly("g", &search::GraphSearchResult::g)
    .def_readonly("h_hat", &search::GraphSearchResult::h_hat)
    .def_readonly("batches", &search::GraphSearchResult::batches)
    .def_property_readonly("expanded",
                           [](const search::GraphSearchResult& r) {
                             std::vector<std::tuple<std::uint64_t, std::string, std::uint32_t, double>> out;
                             for (const auto& e : r.expansions)
                               out.emplace_back(e.batch, e.direction == graph::Direction::Forward ? "F" : "B", e.id,
                                                e.g);
                             return out;
                           });

  m.def(
    "plan_on_graph",
    [](std::size_t vertices, const std::vector<std::tuple<std::uint32_t, std::uint32_t, double>>& edges,
       std::uint32_t start, std::uint32_t goal, std::vector<double> h_to_goal, std::vector<double> h_from_start,
       search::Priority priority, search::Termination termination, bool bidirectional) {
      search::ExplicitGraph g;
      g.vertices = vertices;
      for (const auto& [a, b, w] : edges)
        g.edges.push_back({a, b, w});
      g.start = start;
      g.goal = goal;
      g.h_to_goal = std::move(h_to_goal);
      g.h_from_start = std::move(h_from_start);
      search::GraphSearchConfig cfg;
      cfg.priority = priority;
      cfg.termination = termination;
      cfg.bidirectional = bidirectional;
      return search::plan_on_graph(g, cfg);
    },
    py::arg("vertices"), py::arg("edges"), py::arg("start"), py::arg("goal"),
    py::arg("h_to_goal") = std::vector<double>{}, py::arg("h_from_start") = std::vector<double>{},
    py::arg("priority") = search::Priority::FHat, py::arg("termination") = search::Termination::LBOnly,
    py::arg("bidirectional") = true);

  // planner
  py::class_<planner::PlannerConfig>(m, "PlannerConfig")
    .def(py::init<>())
    .def_readwrite("batch_size", &planner::PlannerConfig::batch_size)
    .def_readwrite("time_budget", &planner::PlannerConfig::time_budget)
    .def_readwrite("seed", &planner::PlannerConfig::seed)
    .def_readwrite("segments", &planner::PlannerConfig::segments)
    .def_readwrite("priority", &planner::PlannerConfig::priority)
    .def_readwrite("termination", &planner::PlannerConfig::termination)
    .def_readwrite("connection", &planner::PlannerConfig::connection)
    .def_readwrite("heuristic", &planner::PlannerConfig::heuristic)
    .def_readwrite("clock", &planner::PlannerConfig::clock)
    .def_readwrite("max_batches", &planner::PlannerConfig::max_batches)
    .def_readwrite("radius_gamma", &planner::PlannerConfig::radius_gamma);

  py::class_<search::AnytimeEvent>(m, "AnytimeEvent")
    .def_readonly("wall_time", &search::AnytimeEvent::wall_time)
    .def_readonly("cost", &search::AnytimeEvent::cost)
    .def_readonly("batch_index", &search::AnytimeEvent::batch_index)
    .def("__repr__", [](const search::AnytimeEvent& e) {
      return "AnytimeEvent(wall_time=" + bench::format_double(e.wall_time) + ", cost=" + bench::format_double(e.cost) +
             ", batch_index=" + std::to_string(e.batch_index) + ")";
    });

  py::class_<planner::Solution>(m, "Solution")
    .def_readonly("time", &planner::Solution::time)
    .def_readonly("cost", &planner::Solution::cost)
    .def_readonly("batch_index", &planner::Solution::batch_index)
    .def_readonly("states", &planner::Solution::states);

  py::class_<planner::PlanResult>(m, "PlanResult")
    .def_readonly("planner", &planner::PlanResult::planner)
    .def_readonly("events", &planner::PlanResult::events)
    .def_readonly("solutions", &planner::PlanResult::solutions)
    .def_readonly("final_cost", &planner::PlanResult::final_cost)
    .def_property_readonly("solved", &planner::PlanResult::solved)
    .def_property_readonly("batches", [](const planner::PlanResult& r) { return r.stats.batches; })
    .def_property_readonly("samples", [](const planner::PlanResult& r) { return r.stats.samples; });

  m.def("plan", &planner::plan, py::arg("scenario"), py::arg("config"), py::call_guard<py::gil_scoped_release>());
  m.def("plan_baseline", &planner::plan_baseline, py::arg("scenario"), py::arg("config"),
        py::call_guard<py::gil_scoped_release>());

  // bench
  m.def("resolve_scenario", &bench::resolve_scenario, py::arg("name_or_path"));
  m.def("median", &bench::median, py::arg("values"));
  m.def(
    "run_trials",
    [](const geometry::Scenario& scn, const std::string& planner, std::size_t trials,
       const planner::PlannerConfig& cfg, unsigned jobs) {
      std::vector<bench::TrialResult> results;
      {
        py::gil_scoped_release release;
        results = bench::run_trials(scn, bench::parse_planner(planner), trials, cfg, jobs);
      }
      return py::make_tuple(bench::events_csv(results), bench::summary_csv(results));
    },
    py::arg("scenario"), py::arg("planner"), py::arg("trials"), py::arg("config"), py::arg("jobs") = 1,
    "Returns the (events, summary) CSV texts.");
  m.def(
    "summarize",
    [](const std::string& summary_csv_text) {
      return bench::format_summary(bench::summarize(bench::parse_summary_csv(summary_csv_text)));
    },
    py::arg("summary_csv"));

  m.attr("EVENTS_HEADER") = bench::kEventsHeader;
  m.attr("SUMMARY_HEADER") = bench::kSummaryHeader;
}
