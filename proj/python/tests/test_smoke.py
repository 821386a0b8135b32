import json
import math

import pytest

import coexplorer as cx


def sim_clock():
    now = [0.0]

    def clock():
        return now[0]

    return now, clock


def test_config_kwargs_and_errors():
    cfg = cx.Config(n=3, step=0.1, seed=5)
    assert cfg.dims == 3
    assert cfg.step == pytest.approx(0.1)
    assert "n = 3" in str(cfg)
    with pytest.raises(cx.ConfigError):
        cx.Config(no_such_key=1)


def test_session_ticks_and_feedback():
    now, clock = sim_clock()
    s = cx.Session(cx.Config(n=4, seed=1), clock)
    assert s.state == [0.5] * 4
    assert s.mode == "autonomous"
    for _ in range(20):
        now[0] += 0.1
        s.tick()
    assert s.t == 20
    s.feedback("guide", 1)
    now[0] += 0.1
    s.tick()
    assert s.replay_size == 10
    lines = s.outbound_json()
    addresses = {json.loads(line)["address"] for line in lines}
    assert {"/state", "/history/append"} <= addresses


def test_session_commands():
    s = cx.Session(cx.Config(n=2, mode="stepwise"))
    with pytest.raises(cx.WrongMode):
        s.tick()
    assert s.set_state([0.503, -0.2]) == pytest.approx([0.5, 0.0])
    assert s.back(0) == [0.5, 0.5]
    with pytest.raises(cx.UnknownHistoryId):
        s.back(99)
    with pytest.raises(cx.DimensionMismatch):
        s.set_state([0.1])
    s.command("start_auto")
    assert s.mode == "autonomous"
    s.command("reset")
    assert s.t == 0 and s.history_size == 1


def test_episode_is_deterministic():
    a = cx.run_episode("coexplorer", dims=2, budget=200, seed=3)
    b = cx.run_episode("coexplorer", dims=2, budget=200, seed=3)
    assert a.steps_to_target == b.steps_to_target
    assert a.distances == b.distances
    assert len(a.distances) == a.steps_to_target


def test_bonus_and_zone_counts():
    assert cx.exploration_bonus(0.0) == 10.0
    assert cx.exploration_bonus(math.inf, r=0.5) == 0.5
    assert cx.zone_expand_count([0.5] * 10) == 200
    assert cx.zone_expand_count([0.0] * 10) == 100


def test_pca_and_protocol():
    pts = cx.project_pca([[0.0, 0.0, 0.0], [0.1, 0.2, 0.3], [0.2, 0.4, 0.6]])
    assert all(abs(pc2) <= 1e-8 for _, pc2 in pts)
    with pytest.raises(cx.DegenerateTrajectory):
        cx.project_pca([[0.5, 0.5], [0.5, 0.5]])
    line = '{"address":"/feedback/guide","args":[1]}'
    assert cx.roundtrip_json(line, 2) == line
    with pytest.raises(cx.MalformedMessage):
        cx.roundtrip_json('{"address":"/state/set","args":[0.5]}', 2)


def test_trajectory_pca_from_log(tmp_path):
    now, clock = sim_clock()
    s = cx.Session(cx.Config(n=3, seed=2, log_path=str(tmp_path / "session.jsonl")), clock)
    for _ in range(30):
        now[0] += 0.1
        s.tick()
    del s
    rows = cx.project_trajectory_pca(str(tmp_path / "session.jsonl"))
    assert len(rows) >= 30
    assert rows[0][0] <= rows[-1][0]
