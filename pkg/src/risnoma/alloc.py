"""
SINR evaluation and the minimum-power allocation.

For a fixed surface both SINR constraints are active at the optimum. With
``S = sigma_j2 + sigma2`` and ``U_i = |u_i|^2`` the powers are::

    p2 = T2 * S / U2
    p1 = T1 * (T2 + 1) * S / U1

so the total power is a function of the surface alone,
``P = S * (T2 / U2 + T1 * (T2 + 1) / U1)``. This module evaluates that
reduced objective and its exact gradient with respect to the phases and
amplitudes, vectorized over a batch of surfaces.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .jammer import interference_power
from .model import (
    ChannelSet,
    RisState,
    SystemParams,
    _check_ris,
    effective_channel,
    jammer_channels,
    user_channels,
)

DEGENERATE_GAIN = 1e-30


class DegenerateChannel(ArithmeticError):
    """An effective user channel vanishes, so no finite power meets the targets."""


@dataclass(frozen=True)
class Allocation:
    p1: float
    p2: float
    gamma1: float
    gamma2: float
    sigma_j2: float
    total_normalized: float
    sic_order_ok: bool
    feasible: bool = True

    @property
    def total(self) -> float:
        return self.p1 + self.p2

    @classmethod
    def infeasible(cls, sigma_j2: float = np.nan) -> "Allocation":
        return cls(np.inf, np.inf, np.nan, np.nan, sigma_j2, np.inf, False, feasible=False)


def sinr(cs: ChannelSet, ris: RisState, p1: float, p2: float, Pj: float, sigma2: float):
    """SINRs of both users, user 1 decoded first treating user 2 as noise."""
    if p1 < 0 or p2 < 0:
        raise ValueError("transmit powers must be non-negative")
    U1 = abs(effective_channel(cs, ris, 1)) ** 2
    U2 = abs(effective_channel(cs, ris, 2)) ** 2
    S = interference_power(cs, ris, Pj) + sigma2
    return p1 * U1 / (p2 * U2 + S), p2 * U2 / S


def min_power_allocation(cs: ChannelSet, ris: RisState, params: SystemParams) -> Allocation:
    """Smallest user powers meeting both SINR targets with equality.

    Raises
    ------
    DegenerateChannel
        If either effective channel gain is below ``DEGENERATE_GAIN``.
    """
    _check_ris(cs, ris)
    U1 = abs(effective_channel(cs, ris, 1)) ** 2
    U2 = abs(effective_channel(cs, ris, 2)) ** 2
    if U1 < DEGENERATE_GAIN or U2 < DEGENERATE_GAIN:
        raise DegenerateChannel(f"effective channel gains |u1|^2={U1:.3g}, |u2|^2={U2:.3g}")
    sigma_j2 = _batch_sigma_j2(cs, params, ris.coefficients[None, :])[0]
    S = sigma_j2 + params.sigma2
    p2 = params.T2 * S / U2
    p1 = params.T1 * (params.T2 + 1.0) * S / U1
    g1, g2 = sinr(cs, ris, p1, p2, params.Pj, params.sigma2)
    return Allocation(
        p1=p1,
        p2=p2,
        gamma1=g1,
        gamma2=g2,
        sigma_j2=sigma_j2,
        total_normalized=(p1 + p2) / params.sigma2,
        sic_order_ok=bool(p1 * U1 > p2 * U2),
    )


def _batch_sigma_j2(cs, params, w):
    e = jammer_channels(cs, w)
    return params.Pj * np.sum(e.real**2 + e.imag**2, axis=-1)


def batch_objective(cs: ChannelSet, params: SystemParams, beta: np.ndarray,
                    theta: np.ndarray) -> np.ndarray:
    """Reduced objective for a batch of surfaces, arrays of shape (R, N)."""
    w = beta * np.exp(1j * theta)
    u1, u2 = user_channels(cs, w)
    U1 = u1.real**2 + u1.imag**2
    U2 = u2.real**2 + u2.imag**2
    S = params.sigma2 + _batch_sigma_j2(cs, params, w)
    degenerate = (U1 < DEGENERATE_GAIN) | (U2 < DEGENERATE_GAIN)
    with np.errstate(divide="ignore", invalid="ignore"):
        P = S * (params.T2 / U2 + params.T1 * (params.T2 + 1.0) / U1)
    return np.where(degenerate, np.inf, P)


def batch_gradient(cs: ChannelSet, params: SystemParams, beta: np.ndarray,
                   theta: np.ndarray):
    """Objective and its partials w.r.t. theta and beta, batched over rows.

    Returns ``(P, d_theta, d_beta)``; rows at degenerate points have
    ``P = inf`` and NaN gradients.
    """
    phase = np.exp(1j * theta)
    w = beta * phase
    a1, a2 = cs.f * cs.g1, cs.f * cs.g2
    B = cs.f[:, None] * cs.Gj
    u1, u2 = user_channels(cs, w)
    e = jammer_channels(cs, w)
    U1 = u1.real**2 + u1.imag**2
    U2 = u2.real**2 + u2.imag**2
    c1 = params.T1 * (params.T2 + 1.0)
    S = params.sigma2 + params.Pj * np.sum(e.real**2 + e.imag**2, axis=-1)
    degenerate = (U1 < DEGENERATE_GAIN) | (U2 < DEGENERATE_GAIN)
    with np.errstate(divide="ignore", invalid="ignore"):
        Q = params.T2 / U2 + c1 / U1
        P = np.where(degenerate, np.inf, S * Q)
        # dP = Re(z * dw) elementwise
        z = 2.0 * (
            (Q * params.Pj)[..., None] * (np.conj(e) @ B.T)
            - (S * params.T2 / U2**2)[..., None] * (np.conj(u2)[..., None] * a2)
            - (S * c1 / U1**2)[..., None] * (np.conj(u1)[..., None] * a1)
        )
    d_theta = np.real(z * 1j * w)
    d_beta = np.real(z * phase)
    d_theta[degenerate] = np.nan
    d_beta[degenerate] = np.nan
    return P, d_theta, d_beta


def reduced_objective(cs: ChannelSet, ris: RisState, params: SystemParams) -> float:
    """Total power ``p1 + p2`` as a function of the surface; inf if degenerate."""
    _check_ris(cs, ris)
    return float(batch_objective(cs, params, ris.beta[None, :], ris.theta[None, :])[0])


def reduced_gradient(cs: ChannelSet, ris: RisState, params: SystemParams):
    """Exact partial derivatives ``(d_theta, d_beta)`` of `reduced_objective`."""
    _check_ris(cs, ris)
    P, d_theta, d_beta = batch_gradient(cs, params, ris.beta[None, :], ris.theta[None, :])
    if not np.isfinite(P[0]):
        raise DegenerateChannel("objective is unbounded at this surface configuration")
    return d_theta[0], d_beta[0]
