"""
Seeded Rayleigh-fading channel draws.

Every entry is ``c * z`` with ``z`` unit circularly-symmetric complex
Gaussian, so ``c`` is the RMS amplitude of that link.

Random streams come from numpy's PCG64 bit generator keyed by a
``SeedSequence(entropy=(master_seed, trial_index), spawn_key=(link, row))``.
Each link (and each RIS row of the jammer-RIS matrix) owns its own stream,
so a draw at (N, M) is exactly the leading block of any larger draw with
the same seed.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .model import ChannelSet, ContractError

# spawn-key prefixes; stable across releases so CSV outputs stay reproducible
_LINK_KEYS = {"h1": 0, "h2": 1, "f": 2, "g1": 3, "g2": 4, "hj": 5, "Gj": 6}
OPTIMIZER_KEY = 100


@dataclass(frozen=True)
class GainProfile:
    """RMS amplitude gain of every link.

    The defaults put the strong jammer link through the surface
    (jammer-RIS 1.0, jammer-BS 0.2). `table_literal` gives the other
    assignment of the two jammer gains.
    """

    gain_h1: float = 5.0
    gain_h2: float = 2.0
    gain_f: float = 1.0
    gain_g1: float = 1.0
    gain_g2: float = 0.2
    gain_hj: float = 0.2
    gain_Gj: float = 1.0

    def __post_init__(self):
        for k, v in asdict(self).items():
            if not (np.isfinite(v) and v >= 0):
                raise ContractError(f"{k} must be finite and >= 0, got {v}")

    @classmethod
    def table_literal(cls) -> "GainProfile":
        """Jammer-BS gain 1.0 and jammer-RIS gain 0.2."""
        return cls(gain_hj=1.0, gain_Gj=0.2)

    def scaled(self, factor: float) -> "GainProfile":
        return GainProfile(**{k: v * factor for k, v in asdict(self).items()})


@dataclass(frozen=True)
class RngSeed:
    master_seed: int = 0
    trial_index: int = 0

    def __post_init__(self):
        if not (0 <= self.master_seed < 2**64 and self.trial_index >= 0):
            raise ContractError("seeds must be unsigned (master seed below 2**64)")

    def generator(self, *key: int) -> np.random.Generator:
        """Independent PCG64 stream for the given spawn key."""
        ss = np.random.SeedSequence(entropy=(self.master_seed, self.trial_index),
                                    spawn_key=tuple(key))
        return np.random.Generator(np.random.PCG64(ss))


def unit_complex_gaussian(rng: np.random.Generator, size: int) -> np.ndarray:
    """`size` samples of CN(0, 1); real and imaginary parts interleaved in the stream."""
    x = rng.standard_normal((size, 2))
    return (x[:, 0] + 1j * x[:, 1]) * np.sqrt(0.5)


def draw_channels(profile: GainProfile, N: int, M: int, seed: RngSeed) -> ChannelSet:
    if N < 0 or M < 1:
        raise ContractError(f"need N >= 0 and M >= 1, got N={N}, M={M}")

    def link(name: str, size: int) -> np.ndarray:
        z = unit_complex_gaussian(seed.generator(_LINK_KEYS[name]), size)
        return getattr(profile, "gain_" + name) * z

    Gj = np.empty((N, M), dtype=complex)
    for n in range(N):
        Gj[n] = profile.gain_Gj * unit_complex_gaussian(seed.generator(_LINK_KEYS["Gj"], n), M)
    return ChannelSet(
        h1=link("h1", 1)[0],
        h2=link("h2", 1)[0],
        f=link("f", N),
        g1=link("g1", N),
        g2=link("g2", N),
        hj=link("hj", M),
        Gj=Gj,
    )


_CHANNEL_KEYS = ("h1", "h2", "f", "g1", "g2", "hj", "Gj")


def save_channels(cs: ChannelSet, path) -> None:
    """Store a realization as an ``.npz`` archive of complex arrays."""
    np.savez(path, **{k: np.asarray(getattr(cs, k)) for k in _CHANNEL_KEYS})


def load_channels(path) -> ChannelSet:
    with np.load(path) as data:
        missing = [k for k in _CHANNEL_KEYS if k not in data]
        if missing:
            raise ContractError(f"{path}: missing channel arrays {missing}")
        return ChannelSet(**{k: data[k][()] if data[k].ndim == 0 else data[k]
                             for k in _CHANNEL_KEYS})
