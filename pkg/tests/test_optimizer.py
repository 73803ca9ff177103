import numpy as np
import pytest

from risnoma.alloc import min_power_allocation, reduced_objective
from risnoma.channel import RngSeed
from risnoma.model import ChannelSet, ContractError, Mode, RisState, SystemParams
from risnoma.optimizer import (
    OptimizerConfig,
    _tournament,
    no_ris_baseline,
    optimize,
    projected_gradient_norm,
    step,
)

from conftest import random_channels

FAST = OptimizerConfig(restarts=6, max_iters=300, seed=RngSeed(1, 0))


def params_for(cs, mode, **kw):
    return SystemParams(N=cs.N, M=cs.M, mode=mode, **kw)


class TestStep:
    def test_zero_gradient(self):
        ris = RisState([0.3, 1.0], [1.0, 2.0])
        out = step(ris, (np.zeros(2), np.zeros(2)), 0.5, Mode.ABSORPTIVE)
        np.testing.assert_array_equal(out.beta, ris.beta)
        np.testing.assert_array_equal(out.theta, ris.theta)

    def test_amplitude_clamped(self):
        out = step(RisState([0.05], [0.0]), ([0.0], [1.0]), 0.1, Mode.ABSORPTIVE)
        assert out.beta[0] == 0.0

    def test_phase_wraps(self):
        out = step(RisState([1.0], [0.1]), ([1.0], [0.0]), 0.2, Mode.ABSORPTIVE)
        assert out.theta[0] == pytest.approx(2 * np.pi - 0.1)

    def test_phase_only_keeps_unit_amplitude(self):
        out = step(RisState.phase_only([0.0, 1.0]), ([1.0, 1.0], [5.0, -5.0]), 0.3,
                   Mode.PHASE_ONLY)
        assert np.all(out.beta == 1.0)

    def test_step_must_be_positive(self):
        with pytest.raises(ContractError):
            step(RisState([1.0], [0.0]), ([0.0], [0.0]), 0.0, Mode.ABSORPTIVE)


class TestBaseline:
    def test_direct_only(self):
        cs = ChannelSet(5, 2, [], [], [], [1], np.zeros((0, 1)))
        res = no_ris_baseline(cs, SystemParams(Pj=0.0))
        assert res.objective == pytest.approx(2.45)

    def test_zero_jammer_channel_same_as_zero_power(self):
        cs = ChannelSet(5, 2, [], [], [], [0], np.zeros((0, 1)))
        a = no_ris_baseline(cs, SystemParams(Pj=40.0)).objective
        b = no_ris_baseline(cs, SystemParams(Pj=0.0)).objective
        assert a == b

    def test_strong_jammer(self):
        cs = ChannelSet(5, 2, [], [], [], [2], np.zeros((0, 1)))
        res = no_ris_baseline(cs, SystemParams(Pj=40.0))
        assert res.objective == pytest.approx(161 * (5 / 4 + 30 / 25))
        assert res.objective == pytest.approx(394.45)

    def test_ignores_ris_part(self, rng):
        cs = random_channels(rng, 5, 2)
        res = no_ris_baseline(cs, SystemParams())
        assert res.objective == no_ris_baseline(cs.without_ris(), SystemParams()).objective

    def test_no_ris_mode_is_rejected_by_optimize(self, rng):
        cs = random_channels(rng, 3, 2)
        with pytest.raises(ContractError):
            optimize(cs, SystemParams(mode=Mode.NO_RIS))


def test_one_dimensional_analytic_optimum():
    cs = ChannelSet(5, 2, [1], [0], [0], [1], [[1]])
    res = optimize(cs, params_for(cs, Mode.ABSORPTIVE), FAST)
    assert res.objective == pytest.approx(5 / 4 + 30 / 25, rel=1e-6)
    assert res.ris.theta[0] == pytest.approx(np.pi, abs=1e-3)
    assert res.ris.beta[0] == pytest.approx(1.0, abs=1e-3)
    assert res.allocation.sigma_j2 < 1e-6


def test_ris_without_influence_equals_baseline(rng):
    cs = random_channels(rng, 4, 3)
    cs = ChannelSet(cs.h1, cs.h2, np.zeros(4), cs.g1, cs.g2, cs.hj, cs.Gj)
    for mode in (Mode.PHASE_ONLY, Mode.ABSORPTIVE):
        res = optimize(cs, params_for(cs, mode), FAST)
        assert res.objective == pytest.approx(no_ris_baseline(cs, SystemParams()).objective,
                                              rel=1e-14)


def test_nesting_with_warm_start(rng):
    for _ in range(5):
        cs = random_channels(rng, 6, 4)
        ph = optimize(cs, params_for(cs, Mode.PHASE_ONLY), FAST)
        ab = optimize(cs, params_for(cs, Mode.ABSORPTIVE), FAST)
        base = no_ris_baseline(cs, SystemParams())
        assert ab.objective <= ph.objective + 1e-9 * (1 + ph.objective)
        assert ab.objective <= base.objective + 1e-9 * (1 + base.objective)


def test_explicit_warm_start_matches_internal(rng):
    cs = random_channels(rng, 5, 3)
    ph = optimize(cs, params_for(cs, Mode.PHASE_ONLY), FAST)
    a = optimize(cs, params_for(cs, Mode.ABSORPTIVE), FAST, warm_start=ph.ris)
    b = optimize(cs, params_for(cs, Mode.ABSORPTIVE), FAST)
    assert a.objective == b.objective
    np.testing.assert_array_equal(a.ris.beta, b.ris.beta)


def test_trace_monotone_and_feasible(rng):
    for mode in (Mode.PHASE_ONLY, Mode.ABSORPTIVE):
        for _ in range(4):
            cs = random_channels(rng, 10, 4)
            res = optimize(cs, params_for(cs, mode), FAST)
            assert np.all(np.diff(res.objective_trace) <= 0)
            assert res.objective_trace[-1] == res.objective
            assert np.all((res.ris.beta >= 0) & (res.ris.beta <= 1))
            assert np.all((res.ris.theta >= 0) & (res.ris.theta < 2 * np.pi))
            if mode is Mode.PHASE_ONLY:
                assert np.all(res.ris.beta == 1.0)


def test_result_allocation_is_rederivable(rng):
    cs = random_channels(rng, 7, 2)
    res = optimize(cs, params_for(cs, Mode.ABSORPTIVE), FAST)
    again = min_power_allocation(cs, res.ris, params_for(cs, Mode.ABSORPTIVE))
    assert res.allocation == again
    assert res.objective == pytest.approx(reduced_objective(cs, res.ris, params_for(cs, Mode.ABSORPTIVE)),
                                          rel=1e-12)


def test_determinism(rng):
    cs = random_channels(rng, 8, 4)
    a = optimize(cs, params_for(cs, Mode.ABSORPTIVE), FAST)
    b = optimize(cs, params_for(cs, Mode.ABSORPTIVE), FAST)
    assert a.objective == b.objective
    assert a.restart_index_of_best == b.restart_index_of_best
    np.testing.assert_array_equal(a.objective_trace, b.objective_trace)
    np.testing.assert_array_equal(a.ris.theta, b.ris.theta)


def test_seed_changes_random_restarts(rng):
    cs = random_channels(rng, 8, 4)
    p = params_for(cs, Mode.PHASE_ONLY)
    a = optimize(cs, p, OptimizerConfig(restarts=3, max_iters=1, seed=RngSeed(1, 0)))
    b = optimize(cs, p, OptimizerConfig(restarts=3, max_iters=1, seed=RngSeed(2, 0)))
    assert a.objective_trace[0] == b.objective_trace[0] or a.restart_index_of_best != 0


def test_stationarity_or_iteration_cap(rng):
    cfg = OptimizerConfig(restarts=4, max_iters=2000, seed=RngSeed(3, 0))
    for _ in range(5):
        cs = random_channels(rng, 4, 2)
        for mode in (Mode.PHASE_ONLY, Mode.ABSORPTIVE):
            p = params_for(cs, mode)
            res = optimize(cs, p, cfg)
            g = projected_gradient_norm(cs, res.ris, p)
            assert res.hit_max_iters or g <= 1e-4 * (1 + abs(res.objective))


def test_tournament_breaks_ties_by_index():
    assert _tournament(np.array([3.0, 1.0, 1.0, 2.0])) == 1
    assert _tournament(np.array([np.inf, np.inf])) == -1
    assert _tournament(np.array([np.inf, 4.0])) == 1


def test_all_restarts_degenerate_gives_flagged_result():
    cs = ChannelSet(0, 2, [1, 1], [0, 0], [0, 0], [1], [[1], [1]])
    res = optimize(cs, params_for(cs, Mode.PHASE_ONLY), FAST)
    assert not res.feasible
    assert res.objective == np.inf


def test_empty_surface_falls_back_to_baseline(rng):
    cs = random_channels(rng, 0, 3)
    res = optimize(cs, params_for(cs, Mode.ABSORPTIVE), FAST)
    assert res.objective == no_ris_baseline(cs, SystemParams()).objective


def test_config_contracts():
    for bad in (dict(backtrack_factor=1.0), dict(rel_tol=0.0), dict(restarts=0),
                dict(init_step=0.0)):
        with pytest.raises(ContractError):
            OptimizerConfig(**bad)
