import math

import numpy as np
import pytest

import btit


def double_integrator():
    A = np.array([[0.0, 1.0], [0.0, 0.0]])
    B = np.array([[0.0], [1.0]])
    return btit.LinearSystem(A, B, np.zeros(2), np.eye(1), "di1d")


def test_double_integrator_gramian():
    sys = double_integrator()
    g = btit.gramian(sys, 1.0)
    np.testing.assert_allclose(g, [[1 / 3, 1 / 2], [1 / 2, 1.0]], rtol=1e-12)


def test_steer_double_integrator():
    sys = double_integrator()
    x0, x1 = np.zeros(2), np.array([1.0, 0.0])
    assert btit.steer_cost(sys, x0, x1, 1.0) == pytest.approx(13.0, rel=1e-12)
    sr = btit.steer(sys, x0, x1)
    assert sr.tau_star == pytest.approx(36 ** 0.25, rel=1e-5)
    assert sr.cost == pytest.approx(sr.tau_star + 12 / sr.tau_star**3, rel=1e-9)
    times, states = btit.synthesize(sys, sr, 50)
    assert len(times) == 51
    np.testing.assert_allclose(states[-1], x1, atol=1e-9)


def test_connection_radius():
    assert btit.connection_radius(math.e, 1, 1.0) == pytest.approx(math.exp(-1), rel=1e-15)
    with pytest.raises(ValueError):
        btit.connection_radius(1.0, 4, 2.5)


def test_plan_on_graph():
    r = btit.plan_on_graph(3, [(0, 1, 1.0), (1, 2, 2.0), (0, 2, 5.0)], 0, 2)
    assert r.cost == 3.0
    assert list(r.path) == [0, 1, 2]
    with pytest.raises(ValueError):
        btit.plan_on_graph(3, [(0, 1, -1.0)], 0, 2)


def test_presets():
    assert set(btit.system_preset_names()) >= {"dir4d", "lq10d"}
    assert btit.system_preset("lq10d").state_dim == 10


def test_plan_and_reports():
    scn = btit.load_scenario(btit.resolve_scenario("dir4d_free"))
    cfg = btit.PlannerConfig()
    cfg.seed = 7
    cfg.time_budget = 1.0
    r = btit.plan(scn, cfg)
    assert r.solved
    costs = [e.cost for e in r.events]
    assert costs == sorted(costs, reverse=True)
    assert r.final_cost == costs[-1]

    events, summary = btit.run_trials(scn, "btit", 2, cfg)
    assert events.splitlines()[0] == btit.EVENTS_HEADER
    assert summary.splitlines()[0] == btit.SUMMARY_HEADER
    assert "\r" not in events
    assert "btit" in btit.summarize(summary)
    with pytest.raises(ValueError):
        btit.summarize(events)


def test_errors_map_to_python():
    with pytest.raises(ValueError):
        btit.system_preset("bicycle")
    with pytest.raises(ValueError):
        btit.parse_scenario("{ not json")
    with pytest.raises(ValueError):
        btit.resolve_scenario("no_such_scenario")
    with pytest.raises(ValueError):
        btit.LinearSystem(np.eye(2), np.ones((3, 1)), np.zeros(2), np.eye(1))
