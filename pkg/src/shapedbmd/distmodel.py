"""
Distributions over m-bit labels.

A label is stored as the integer whose binary expansion is (b_1, ..., b_m),
with b_1 the most significant bit. Every array indexed by "label" in this
package follows that convention.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

PROB_TOL = 1e-12
# probabilities at or below this are treated as exact zeros
ZERO_PROB = 1e-15


def label_bits(m: int) -> np.ndarray:
    """Bit table of shape (2**m, m); row `a` holds the bits of label `a`, MSB first."""
    labels = np.arange(1 << m)
    shifts = np.arange(m - 1, -1, -1)
    return (labels[:, None] >> shifts[None, :]) & 1


def format_label(label: int, m: int) -> str:
    return format(label, f"0{m}b")


@dataclass(frozen=True)
class BitMarginal:
    p0: float
    p1: float

    def __post_init__(self):
        if self.p0 < 0 or self.p1 < 0 or abs(self.p0 + self.p1 - 1.0) > PROB_TOL:
            raise ValueError(f"invalid bit marginal ({self.p0}, {self.p1})")

    def __getitem__(self, b: int) -> float:
        if b not in (0, 1):
            raise IndexError(b)
        return self.p1 if b else self.p0


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """Probability mass function on {0,1}^m, indexed by label integer."""

    m: int
    probs: np.ndarray

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be a positive integer")
        p = np.array(self.probs, dtype=float).reshape(-1)
        if p.size != 1 << self.m:
            raise ValueError(f"expected {1 << self.m} probabilities, got {p.size}")
        if np.any(~np.isfinite(p)) or np.any(p < 0):
            raise ValueError("probabilities must be finite and non-negative")
        if abs(p.sum() - 1.0) > PROB_TOL:
            raise ValueError(f"probabilities sum to {p.sum()!r}, not 1")
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    @classmethod
    def uniform(cls, m: int) -> "JointDistribution":
        return cls(m, np.full(1 << m, 1.0 / (1 << m)))

    @classmethod
    def point_mass(cls, m: int, label: int) -> "JointDistribution":
        p = np.zeros(1 << m)
        p[label] = 1.0
        return cls(m, p)

    @classmethod
    def from_weights(cls, m: int, weights: Sequence[float]) -> "JointDistribution":
        """Normalize non-negative weights into a distribution."""
        w = np.asarray(weights, dtype=float)
        total = w.sum()
        if total <= 0:
            raise ValueError("weights must have positive sum")
        return cls(m, w / total)

    @classmethod
    def from_mapping(cls, m: int, mapping: dict[str, float]) -> "JointDistribution":
        """Build from {'01': 0.5, '10': 0.5}; omitted labels get probability 0."""
        p = np.zeros(1 << m)
        for bits, prob in mapping.items():
            if len(bits) != m or set(bits) - {"0", "1"}:
                raise ValueError(f"bad label {bits!r} for m={m}")
            p[int(bits, 2)] = prob
        return cls(m, p)

    @classmethod
    def from_bit_probs(cls, one_probs: Sequence[float]) -> "JointDistribution":
        """Product distribution with P(B_i = 1) = one_probs[i - 1]."""
        q = np.asarray(one_probs, dtype=float)
        if np.any(q < 0) or np.any(q > 1):
            raise ValueError("bit probabilities must lie in [0, 1]")
        bits = label_bits(q.size)
        p = np.prod(np.where(bits == 1, q, 1.0 - q), axis=1)
        return cls(q.size, p / p.sum())

    @property
    def size(self) -> int:
        return 1 << self.m

    def support(self) -> np.ndarray:
        """Boolean mask of labels with probability above the zero threshold."""
        return self.probs > ZERO_PROB

    def is_strictly_positive(self) -> bool:
        return bool(np.all(self.support()))

    def __eq__(self, other):
        if not isinstance(other, JointDistribution):
            return NotImplemented
        return self.m == other.m and np.array_equal(self.probs, other.probs)

    def __hash__(self):
        return hash((self.m, self.probs.tobytes()))

    def __repr__(self):
        return f"JointDistribution(m={self.m}, probs={np.array2string(self.probs, precision=6)})"


def _check_index(d: JointDistribution, i: int) -> None:
    if not 1 <= i <= d.m:
        raise ValueError(f"bit index {i} out of range 1..{d.m}")


def marginal(d: JointDistribution, i: int) -> BitMarginal:
    """Distribution of bit-level B_i (1-based index)."""
    _check_index(d, i)
    p1 = float(d.probs[label_bits(d.m)[:, i - 1] == 1].sum())
    p0 = float(d.probs[label_bits(d.m)[:, i - 1] == 0].sum())
    return BitMarginal(p0, p1)


def bit_marginals(d: JointDistribution) -> np.ndarray:
    """Array of shape (m, 2) with P(B_i = b) at [i - 1, b]."""
    bits = label_bits(d.m)
    p1 = d.probs @ bits
    p0 = d.probs @ (1 - bits)
    return np.stack([p0, p1], axis=1)


def product_of_marginals(d: JointDistribution) -> JointDistribution:
    bm = bit_marginals(d)
    bits = label_bits(d.m)
    p = np.prod(bm[np.arange(d.m)[None, :], bits], axis=1)
    return JointDistribution(d.m, p / p.sum())


def is_product(d: JointDistribution, tol: float = 1e-10) -> bool:
    return bool(np.max(np.abs(product_of_marginals(d).probs - d.probs)) <= tol)


def entropy_bits(p: Iterable[float]) -> float:
    """Entropy in bits of a probability vector, with 0 log 0 = 0."""
    p = np.asarray(list(p) if not isinstance(p, np.ndarray) else p, dtype=float)
    p = p[p > ZERO_PROB]
    return float(-np.sum(p * np.log2(p)))


def entropy(d: JointDistribution) -> float:
    return entropy_bits(d.probs)


def maxwell_boltzmann(points: Sequence[float], nu: float) -> JointDistribution:
    """P(b) proportional to exp(-nu * x_b**2) over unscaled amplitudes in label order."""
    if nu < 0:
        raise ValueError("nu must be non-negative")
    x = np.asarray(points, dtype=float)
    m = int(round(np.log2(x.size)))
    if 1 << m != x.size:
        raise ValueError("number of points must be a power of two")
    e = -nu * x**2
    w = np.exp(e - e.max())
    return JointDistribution(m, w / w.sum())


def load_distribution(path: str | Path) -> JointDistribution:
    """Read `<bitstring> <probability>` lines; '#' starts a comment.

    The sum is renormalized to 1 when it is within 1e-6 of 1, otherwise the
    file is rejected.
    """
    entries: dict[str, float] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"{path}:{lineno}: expected '<bitstring> <probability>'")
        bits, prob = parts[0], float(parts[1])
        if bits in entries:
            raise ValueError(f"{path}:{lineno}: duplicate label {bits}")
        entries[bits] = prob
    if not entries:
        raise ValueError(f"{path}: no entries")
    widths = {len(b) for b in entries}
    if len(widths) != 1:
        raise ValueError(f"{path}: labels have inconsistent lengths")
    m = widths.pop()
    total = sum(entries.values())
    if any(v < 0 for v in entries.values()):
        raise ValueError(f"{path}: negative probability")
    if abs(total - 1.0) > 1e-6:
        raise ValueError(f"{path}: probabilities sum to {total}, not 1")
    return JointDistribution.from_mapping(m, {k: v / total for k, v in entries.items()})


def save_distribution(d: JointDistribution, path: str | Path) -> None:
    lines = [f"{format_label(a, d.m)} {p:.17g}" for a, p in enumerate(d.probs)]
    Path(path).write_text("\n".join(lines) + "\n")
