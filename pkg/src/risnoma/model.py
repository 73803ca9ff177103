"""
Core domain types for the RIS-assisted two-user uplink NOMA system.

The surface is described by per-element reflection coefficients
``beta[n] * exp(1j * theta[n])``. The diagonal reflection matrix is never
formed explicitly; every product through the surface is a length-N weighted
sum.

An empty surface (``N == 0``) is the no-RIS baseline.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * np.pi


class ContractError(ValueError):
    """Raised when inputs violate a shape or range contract."""


class Mode(str, enum.Enum):
    NO_RIS = "no-ris"
    PHASE_ONLY = "phase-only"
    ABSORPTIVE = "absorptive"

    @classmethod
    def parse(cls, value: "Mode | str") -> "Mode":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("_", "-")
        aliases = {"noris": "no-ris", "none": "no-ris", "phaseonly": "phase-only",
                   "phase": "phase-only", "ris": "phase-only", "a-ris": "absorptive"}
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise ContractError(f"unknown RIS mode {value!r}") from None


def wrap_phase(theta) -> np.ndarray:
    """Map phases onto the canonical interval [0, 2*pi)."""
    out = np.mod(np.asarray(theta, dtype=float), TWO_PI)
    # np.mod can round tiny negative inputs up to exactly 2*pi
    out[out >= TWO_PI] = 0.0
    return out


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def _as_vector(name: str, value, dtype=complex) -> np.ndarray:
    a = np.atleast_1d(np.array(value, dtype=dtype))
    if a.ndim != 1:
        raise ContractError(f"{name} must be one-dimensional, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ContractError(f"{name} has non-finite entries")
    return a


@dataclass(frozen=True)
class ChannelSet:
    """One realization of every complex channel in the system.

    Parameters
    ----------
    h1, h2 : complex
        Direct user-to-BS channels.
    f : (N,) complex array
        RIS-to-BS channel.
    g1, g2 : (N,) complex arrays
        User-to-RIS channels.
    hj : (M,) complex array
        Jammer-to-BS channel.
    Gj : (N, M) complex array
        Jammer-to-RIS channel; rows index RIS elements, columns jammer
        antennas.
    """

    h1: complex
    h2: complex
    f: np.ndarray
    g1: np.ndarray
    g2: np.ndarray
    hj: np.ndarray
    Gj: np.ndarray

    def __post_init__(self):
        for name in ("h1", "h2"):
            v = complex(getattr(self, name))
            if not np.isfinite(v):
                raise ContractError(f"{name} is not finite")
            object.__setattr__(self, name, v)
        for name in ("f", "g1", "g2", "hj"):
            object.__setattr__(self, name, _frozen(_as_vector(name, getattr(self, name))))
        Gj = np.array(self.Gj, dtype=complex)
        if Gj.ndim != 2:
            raise ContractError(f"Gj must be two-dimensional, got shape {Gj.shape}")
        if not np.all(np.isfinite(Gj)):
            raise ContractError("Gj has non-finite entries")
        object.__setattr__(self, "Gj", _frozen(Gj))

        N, M = self.f.size, self.hj.size
        if M < 1:
            raise ContractError("the jammer needs at least one antenna (M >= 1)")
        if self.g1.size != N or self.g2.size != N:
            raise ContractError(
                f"g1/g2 lengths {self.g1.size}/{self.g2.size} do not match f length {N}")
        if Gj.shape != (N, M):
            raise ContractError(f"Gj shape {Gj.shape} does not match (N, M) = {(N, M)}")

    @property
    def N(self) -> int:
        return self.f.size

    @property
    def M(self) -> int:
        return self.hj.size

    def truncate(self, N: int, M: int | None = None) -> "ChannelSet":
        """Keep the first `N` RIS elements and first `M` jammer antennas."""
        M = self.M if M is None else M
        if not (0 <= N <= self.N and 1 <= M <= self.M):
            raise ContractError(f"cannot truncate (N, M) = {(self.N, self.M)} to {(N, M)}")
        return ChannelSet(self.h1, self.h2, self.f[:N], self.g1[:N], self.g2[:N],
                          self.hj[:M], self.Gj[:N, :M])

    def without_ris(self) -> "ChannelSet":
        return self.truncate(0)


@dataclass(frozen=True)
class RisState:
    """Per-element reflection amplitudes and phases.

    ``theta`` is stored wrapped to [0, 2*pi); ``beta`` must lie in [0, 1].
    """

    beta: np.ndarray
    theta: np.ndarray

    def __post_init__(self):
        beta = _as_vector("beta", self.beta, dtype=float)
        theta = _as_vector("theta", self.theta, dtype=float)
        if beta.size != theta.size:
            raise ContractError(f"beta has {beta.size} entries but theta has {theta.size}")
        if np.any(beta < 0.0) or np.any(beta > 1.0):
            raise ContractError("beta entries must lie in [0, 1]")
        object.__setattr__(self, "beta", _frozen(beta))
        object.__setattr__(self, "theta", _frozen(wrap_phase(theta)))

    @classmethod
    def phase_only(cls, theta) -> "RisState":
        theta = np.asarray(theta, dtype=float).reshape(-1)
        return cls(np.ones(theta.size), theta)

    @classmethod
    def empty(cls) -> "RisState":
        return cls(np.zeros(0), np.zeros(0))

    @property
    def N(self) -> int:
        return self.beta.size

    @property
    def coefficients(self) -> np.ndarray:
        """Complex reflection coefficients ``beta * exp(1j * theta)``."""
        return self.beta * np.exp(1j * self.theta)

    def is_phase_only(self) -> bool:
        return bool(np.all(self.beta == 1.0))


@dataclass(frozen=True)
class SystemParams:
    """Noise, jammer budget, SINR targets and surface configuration.

    ``Pj`` is the jammer's total transmit budget: the constraint on the
    squared norm of its transmit vector.
    """

    sigma2: float = 1.0
    Pj: float = 40.0
    T1: float = 5.0
    T2: float = 5.0
    N: int = 0
    M: int = 1
    mode: Mode = Mode.NO_RIS
    # relaxes the T1, T2 > 0 check for edge-case tests only
    allow_zero_targets: bool = field(default=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode.parse(self.mode))
        if not self.sigma2 > 0:
            raise ContractError("sigma2 must be positive")
        if not self.Pj >= 0:
            raise ContractError("Pj must be non-negative")
        low_ok = (lambda t: t >= 0) if self.allow_zero_targets else (lambda t: t > 0)
        if not (low_ok(self.T1) and low_ok(self.T2)):
            raise ContractError("SINR targets must be positive")
        if self.N < 0 or self.M < 1:
            raise ContractError("need N >= 0 and M >= 1")
        if self.mode is Mode.NO_RIS and self.N != 0:
            object.__setattr__(self, "N", 0)


def _check_ris(cs: ChannelSet, ris: RisState) -> None:
    if ris.N != cs.N:
        raise ContractError(f"RIS has {ris.N} elements but channels have N = {cs.N}")


def user_channels(cs: ChannelSet, w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Effective user channels for a batch of coefficient vectors.

    `w` has shape (..., N); returns ``(u1, u2)`` each of shape (...,).
    """
    u1 = cs.h1 + w @ (cs.f * cs.g1)
    u2 = cs.h2 + w @ (cs.f * cs.g2)
    return u1, u2


def jammer_channels(cs: ChannelSet, w: np.ndarray) -> np.ndarray:
    """Effective jammer channels ``hj + Gj^T (f * w)`` for a batch of shape (..., N)."""
    return cs.hj + (w * cs.f) @ cs.Gj


def effective_channel(cs: ChannelSet, ris: RisState, which: int) -> complex:
    """Combined direct plus reflected channel of user 1 or 2."""
    _check_ris(cs, ris)
    if which not in (1, 2):
        raise ContractError(f"user index must be 1 or 2, got {which}")
    h, g = (cs.h1, cs.g1) if which == 1 else (cs.h2, cs.g2)
    if cs.N == 0:
        return h
    return complex(h + np.dot(ris.coefficients, cs.f * g))


def effective_jammer_channel(cs: ChannelSet, ris: RisState) -> np.ndarray:
    """Jammer effective channel, entry m = hj[m] + sum_n w[n] f[n] Gj[n, m]."""
    _check_ris(cs, ris)
    if cs.N == 0:
        return cs.hj.copy()
    return jammer_channels(cs, ris.coefficients)


def received_signal(cs: ChannelSet, ris: RisState, x1, x2, xj, noise=0.0):
    """Synthesize the BS received sample(s).

    Symbols may be scalars or arrays broadcasting along a leading sample
    axis; `xj` has trailing dimension M. Used only for diagnostics.
    """
    xj = np.asarray(xj, dtype=complex)
    if xj.shape[-1:] != (cs.M,):
        raise ContractError(f"jammer signal must have trailing dimension {cs.M}")
    u1 = effective_channel(cs, ris, 1)
    u2 = effective_channel(cs, ris, 2)
    e = effective_jammer_channel(cs, ris)
    r = u1 * np.asarray(x1) + u2 * np.asarray(x2) + xj @ e + np.asarray(noise)
    return complex(r) if np.ndim(r) == 0 else r
