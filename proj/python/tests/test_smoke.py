import math

import pytest

import osa_pomdp as osa


def test_channel_basics():
    p = osa.ChannelParams(0.15, 0.1)
    assert osa.stationary_idle(p) == pytest.approx(0.1 / 0.95)
    assert osa.update_sensed(p, osa.Observation.Idle) == 0.15
    assert osa.update_unsensed(p, 0.5) == pytest.approx(0.1 + 0.05 * 0.5)


def test_solve_single_channel():
    s = osa.single_channel_scenario()
    V = osa.solve_single_channel(s.channel, s.rewards, l_max=20)
    assert math.isfinite(V.gain)
    assert V.values.shape == (len(V.grid), 20)
    assert set(V.actions[:, -1]) == {int(osa.Action.SenseFallback)}
    pol = osa.extract_thresholds(V)
    assert 1 <= pol.l_star <= 20
    assert len(pol.thresholds) == 20
    assert set(osa.check_structure(V)) >= {"monotone_in_delay", "convex_in_belief"}


def test_simulate_memoryless_one():
    cfg = osa.SimConfig()
    m = osa.run_episode(cfg, osa.MemorylessPolicy(1))
    assert m.avg_delay == 1.0
    assert m.throughput == 1.0
    assert osa.little_check(m) == 0.0
    assert m == osa.run_episode(cfg, osa.MemorylessPolicy(1))


def test_optimal_policy_and_sweep():
    cfg = osa.SimConfig()
    cfg.num_packets = 500
    pol = osa.solve_optimal_policy(cfg)
    assert "threshold" in pol.describe()
    rows = osa.sweep_gamma(cfg, [5.0, 50.0])
    assert rows[0][1].avg_delay >= rows[1][1].avg_delay


def test_errors_carry_kind():
    cfg = osa.SimConfig()
    with pytest.raises(osa.OsaError) as info:
        osa.sweep_gamma(cfg, [10.0, 5.0])
    assert info.value.kind == "InvalidArgument"
    with pytest.raises(osa.OsaError):
        osa.solve_single_channel(osa.ChannelParams(1.0, 0.0), osa.RewardParams())


def test_estimator_and_learner():
    e = osa.estimate_continuous(osa.ChannelParams(0.15, 0.1), 100000)
    assert abs(e.alpha - 0.15) <= 0.01
    s = osa.scenario_preset(1)
    pol, trace = osa.run_learning([s.channel] * 4, s.rewards, iterations=20)
    assert len(trace) == 20
    assert pol.l_max == 15


def test_multichannel_preset():
    s = osa.scenario_preset(2)
    l_star, thresholds, gain = osa.solve_multichannel_l_star(s.channel, s.rewards, n_channels=2)
    assert 1 <= l_star <= 15
    assert len(thresholds) == 15
    assert math.isfinite(gain)
