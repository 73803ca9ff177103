import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from risnoma.model import (
    ChannelSet,
    ContractError,
    Mode,
    RisState,
    SystemParams,
    effective_channel,
    effective_jammer_channel,
    received_signal,
    wrap_phase,
)

from conftest import random_channels, random_ris


def one_element(h1=0, f=(1,), g1=(1,), hj=(1,), Gj=((1,),)):
    return ChannelSet(h1, 0, f, g1, np.zeros(len(f)), hj, Gj)


def loop_user(cs, ris, which):
    h, g = (cs.h1, cs.g1) if which == 1 else (cs.h2, cs.g2)
    acc = complex(h)
    for n in range(cs.N):
        acc += ris.beta[n] * np.exp(1j * ris.theta[n]) * cs.f[n] * g[n]
    return acc


def loop_jammer(cs, ris):
    out = np.array(cs.hj, dtype=complex)
    for m in range(cs.M):
        for n in range(cs.N):
            out[m] += ris.beta[n] * np.exp(1j * ris.theta[n]) * cs.f[n] * cs.Gj[n, m]
    return out


class TestEffectiveChannel:
    def test_empty_ris_returns_direct_channel(self):
        cs = ChannelSet(5 + 0j, 1, [], [], [], [1], np.zeros((0, 1)))
        assert effective_channel(cs, RisState.empty(), 1) == 5 + 0j

    def test_perfect_cancellation(self):
        cs = one_element(h1=1)
        u = effective_channel(cs, RisState([1.0], [np.pi]), 1)
        assert abs(u) < 1e-15

    def test_two_elements_hand_value(self):
        cs = ChannelSet(0, 0, [1, 1], [1, 1j], [0, 0], [1], np.zeros((2, 1)))
        ris = RisState([1.0, 0.5], [0.0, np.pi / 2])
        u = effective_channel(cs, ris, 1)
        assert u == pytest.approx(0.5 + 0j, abs=1e-15)
        assert loop_user(cs, ris, 1) == pytest.approx(0.5, abs=1e-15)

    def test_dimension_mismatch(self):
        cs = one_element()
        with pytest.raises(ContractError):
            effective_channel(cs, RisState([1.0, 1.0], [0.0, 0.0]), 1)
        with pytest.raises(ContractError):
            effective_channel(cs, RisState([1.0], [0.0]), 3)


class TestEffectiveJammerChannel:
    def test_no_ris(self):
        cs = ChannelSet(1, 1, [], [], [], [2], np.zeros((0, 1)))
        np.testing.assert_array_equal(effective_jammer_channel(cs, RisState.empty()), [2 + 0j])

    def test_constructive(self):
        e = effective_jammer_channel(one_element(), RisState([1.0], [0.0]))
        np.testing.assert_allclose(e, [2 + 0j])

    def test_partial_cancellation(self):
        cs = one_element(hj=(1, 1j), Gj=((1, 0),))
        e = effective_jammer_channel(cs, RisState([1.0], [np.pi]))
        np.testing.assert_allclose(e, [0, 1j], atol=1e-15)

    def test_dimension_mismatch(self):
        with pytest.raises(ContractError):
            effective_jammer_channel(one_element(), RisState.empty())


class TestReceivedSignal:
    def test_all_zero(self):
        cs = ChannelSet(0, 0, [0], [0], [0], [0], [[0]])
        assert received_signal(cs, RisState([1.0], [0.0]), 1, 1, [1], 0) == 0

    def test_direct_paths(self):
        cs = ChannelSet(1, 0, [], [], [], [1], np.zeros((0, 1)))
        r = received_signal(cs, RisState.empty(), 2, 0, [3], 0)
        assert r == 5 + 0j

    def test_cancelled_user(self):
        cs = one_element(h1=1, hj=(0,), Gj=((0,),))
        r = received_signal(cs, RisState([1.0], [np.pi]), 7.5 - 2j, 0, [0], 0)
        assert abs(r) < 1e-14

    def test_shape_mismatch(self):
        with pytest.raises(ContractError):
            received_signal(one_element(), RisState([1.0], [0.0]), 1, 1, [1, 2], 0)


class TestTypes:
    def test_channel_contracts(self):
        with pytest.raises(ContractError):
            ChannelSet(1, 1, [1], [1, 2], [1], [1], [[1]])
        with pytest.raises(ContractError):
            ChannelSet(1, 1, [1], [1], [1], [], np.zeros((1, 0)))
        with pytest.raises(ContractError):
            ChannelSet(1, 1, [np.nan], [1], [1], [1], [[1]])
        with pytest.raises(ContractError):
            ChannelSet(1, 1, [1], [1], [1], [1, 1], [[1]])

    def test_ris_contracts(self):
        with pytest.raises(ContractError):
            RisState([1.2], [0.0])
        with pytest.raises(ContractError):
            RisState([-0.1], [0.0])
        with pytest.raises(ContractError):
            RisState([1.0], [0.0, 1.0])

    def test_channels_are_immutable(self, rng):
        cs = random_channels(rng, 3, 2)
        with pytest.raises(ValueError):
            cs.f[0] = 1.0

    def test_phase_canonical_range(self):
        ris = RisState([1, 1, 1, 1], [-1e-20, 2 * np.pi, -0.1, 7.0])
        assert np.all((ris.theta >= 0) & (ris.theta < 2 * np.pi))
        assert ris.theta[0] == 0.0 and ris.theta[1] == 0.0
        assert ris.theta[2] == pytest.approx(2 * np.pi - 0.1)
        assert wrap_phase(np.array([3 * np.pi]))[0] == pytest.approx(np.pi)

    def test_canonical_storage_is_idempotent(self, rng):
        ris = random_ris(rng, 20)
        again = RisState(ris.beta, ris.theta)
        np.testing.assert_array_equal(again.theta, ris.theta)

    def test_phase_only_constructor(self):
        ris = RisState.phase_only([0.3, 1.0])
        assert ris.is_phase_only()
        assert not RisState([0.5], [0.0]).is_phase_only()

    def test_system_params(self):
        p = SystemParams(N=5, mode="no-ris")
        assert p.N == 0 and p.mode is Mode.NO_RIS
        for bad in (dict(sigma2=0), dict(Pj=-1), dict(T1=0), dict(M=0)):
            with pytest.raises(ContractError):
                SystemParams(**bad)

    def test_mode_parse(self):
        assert Mode.parse("PHASE_ONLY") is Mode.PHASE_ONLY
        assert Mode.parse("absorptive") is Mode.ABSORPTIVE
        with pytest.raises(ContractError):
            Mode.parse("holographic")

    def test_truncate(self, rng):
        cs = random_channels(rng, 6, 4)
        t = cs.truncate(3, 2)
        assert (t.N, t.M) == (3, 2)
        np.testing.assert_array_equal(t.Gj, cs.Gj[:3, :2])
        with pytest.raises(ContractError):
            cs.truncate(7)


dims = st.tuples(st.integers(0, 12), st.integers(1, 6), st.integers(0, 2**32 - 1))


@settings(max_examples=60, deadline=None)
@given(dims)
def test_scalar_loop_oracle(d):
    N, M, seed = d
    rng = np.random.default_rng(seed)
    cs, ris = random_channels(rng, N, M), random_ris(rng, N)
    for which in (1, 2):
        expect = loop_user(cs, ris, which)
        got = effective_channel(cs, ris, which)
        assert abs(got - expect) <= 1e-12 * max(1.0, abs(expect))
    expect = loop_jammer(cs, ris)
    got = effective_jammer_channel(cs, ris)
    assert np.all(np.abs(got - expect) <= 1e-12 * np.maximum(1.0, np.abs(expect)))


@settings(max_examples=40, deadline=None)
@given(dims, st.floats(-3, 3), st.floats(-3, 3))
def test_linearity_in_user_channels(d, a, b):
    N, M, seed = d
    rng = np.random.default_rng(seed)
    ris = random_ris(rng, N)
    cs1, cs2 = random_channels(rng, N, M), random_channels(rng, N, M)
    mix = ChannelSet(a * cs1.h1 + b * cs2.h1, 0, cs1.f, a * cs1.g1 + b * cs2.g1,
                     cs1.g2, cs1.hj, cs1.Gj)
    cs2 = ChannelSet(cs2.h1, 0, cs1.f, cs2.g1, cs1.g2, cs1.hj, cs1.Gj)
    lhs = effective_channel(mix, ris, 1)
    rhs = a * effective_channel(cs1, ris, 1) + b * effective_channel(cs2, ris, 1)
    assert lhs == pytest.approx(rhs, abs=1e-12 * (1 + abs(rhs)))


def test_periodicity(rng):
    for _ in range(20):
        cs, ris = random_channels(rng, 8, 3), random_ris(rng, 8)
        shifted = RisState(ris.beta, ris.theta + 2 * np.pi)
        np.testing.assert_allclose(shifted.theta, ris.theta, rtol=0, atol=1e-14)
        for which in (1, 2):
            a = effective_channel(cs, ris, which)
            b = effective_channel(cs, shifted, which)
            assert abs(a - b) <= 1e-13 * (1 + abs(a))
        np.testing.assert_allclose(effective_jammer_channel(cs, shifted),
                                   effective_jammer_channel(cs, ris), rtol=1e-13, atol=1e-13)


def test_zero_amplitude_removes_element(rng):
    for _ in range(20):
        N = 7
        cs, ris = random_channels(rng, N, 3), random_ris(rng, N)
        k = rng.integers(N)
        beta = ris.beta.copy()
        beta[k] = 0.0
        keep = np.arange(N) != k
        reduced = ChannelSet(cs.h1, cs.h2, cs.f[keep], cs.g1[keep], cs.g2[keep], cs.hj,
                             cs.Gj[keep])
        zeroed = RisState(beta, ris.theta)
        small = RisState(ris.beta[keep], ris.theta[keep])
        for which in (1, 2):
            a = effective_channel(cs, zeroed, which)
            b = effective_channel(reduced, small, which)
            assert abs(a - b) <= 1e-13 * (1 + abs(b))
        np.testing.assert_allclose(effective_jammer_channel(cs, zeroed),
                                   effective_jammer_channel(reduced, small), atol=1e-13)
