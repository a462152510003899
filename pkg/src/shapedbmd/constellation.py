"""Bipolar ASK constellations with binary reflected Gray code labeling."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distmodel import JointDistribution

MAX_BITS = 8


def brgc(m: int) -> np.ndarray:
    """Gray word of each amplitude rank k = 0..2**m - 1."""
    k = np.arange(1 << m)
    return k ^ (k >> 1)


@dataclass(frozen=True, eq=False)
class Constellation:
    """2**m-ASK points indexed by label.

    `amplitudes[label]` is the odd integer x_b; `points[label]` is delta * x_b.
    """

    m: int
    amplitudes: np.ndarray
    delta: float

    def __post_init__(self):
        a = np.array(self.amplitudes, dtype=float)
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)
        pts = self.delta * a
        pts.setflags(write=False)
        object.__setattr__(self, "_points", pts)

    @property
    def points(self) -> np.ndarray:
        return self._points

    @property
    def size(self) -> int:
        return 1 << self.m

    def labels_by_amplitude(self) -> np.ndarray:
        """Labels sorted by increasing amplitude."""
        return np.argsort(self.amplitudes, kind="stable")

    def scaled(self, delta: float) -> "Constellation":
        return Constellation(self.m, self.amplitudes, delta)


def ask_brgc(m: int, delta: float = 1.0) -> Constellation:
    """Gray-labeled bipolar ASK with amplitudes delta * {±1, ±3, ..., ±(2**m - 1)}.

    Rank k (in increasing amplitude) carries label k XOR (k >> 1), so the
    first bit-level B_1 is the sign of the amplitude.

    A delta of zero is accepted and models the zero-SNR channel.
    """
    if not isinstance(m, (int, np.integer)) or not 1 <= m <= MAX_BITS:
        raise ValueError(f"m must be an integer in 1..{MAX_BITS}, got {m!r}")
    if delta < 0:
        raise ValueError("delta must be non-negative")
    n = 1 << m
    amps = np.empty(n)
    amps[brgc(m)] = 2 * np.arange(n) + 1 - n
    return Constellation(int(m), amps, float(delta))


def average_power(c: Constellation, d: JointDistribution) -> float:
    if c.m != d.m:
        raise ValueError(f"constellation has m={c.m}, distribution has m={d.m}")
    return float(d.probs @ c.points**2)


def delta_for_power(m: int, d: JointDistribution, power: float) -> float:
    """Scaling that meets E[(delta x_B)**2] = power with equality."""
    if m != d.m:
        raise ValueError(f"m={m} does not match distribution m={d.m}")
    if power <= 0:
        raise ValueError("power must be positive")
    second_moment = average_power(ask_brgc(m, 1.0), d)
    if second_moment <= 0:
        raise ValueError("distribution has zero power")
    return float(np.sqrt(power / second_moment))
