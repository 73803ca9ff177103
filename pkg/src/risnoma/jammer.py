"""Worst-case jammer: the transmit vector matched to its effective channel."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ChannelSet, ContractError, RisState, effective_jammer_channel


@dataclass(frozen=True)
class JammerResult:
    xj: np.ndarray
    sigma_j2: float
    rho: float


def solve_jammer(cs: ChannelSet, ris: RisState, Pj: float) -> JammerResult:
    """Interference-maximizing jammer signal under a total power budget `Pj`.

    The maximizer of ``|e^T x|`` subject to ``||x||^2 <= Pj`` is
    ``x = sqrt(Pj) * conj(e) / ||e||``, giving received power ``Pj ||e||^2``.
    When ``e == 0`` every feasible `x` is optimal and zero is returned.
    """
    if not Pj >= 0:
        raise ContractError("jammer power must be non-negative")
    e = effective_jammer_channel(cs, ris)
    rho = float(np.linalg.norm(e))
    if rho == 0.0:
        return JammerResult(np.zeros(cs.M, dtype=complex), 0.0, 0.0)
    xj = (np.sqrt(Pj) / rho) * np.conj(e)
    return JammerResult(xj, Pj * rho**2, rho)


def interference_power(cs: ChannelSet, ris: RisState, Pj: float) -> float:
    return solve_jammer(cs, ris, Pj).sigma_j2
