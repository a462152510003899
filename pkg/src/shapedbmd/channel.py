"""
Channel models and the output quadrature.

Both channel types expose the same two hooks used by every rate functional:

* ``output_grid()`` returns output points and weights such that an
  expectation over Y is ``sum(w * f(y) * p(y|b))``. For the AWGN channel these
  are composite Gauss-Legendre nodes; for a discrete channel the output
  alphabet with unit weights.
* ``log_likelihood(y)`` returns log p(y|b) with shape (len(y), 2**m).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .constellation import Constellation
from .distmodel import ZERO_PROB, JointDistribution, bit_marginals, label_bits

LOG_SQRT_2PI = 0.5 * np.log(2 * np.pi)
DEFAULT_NODES_PER_UNIT = 16
GUARD = 10.0


def logsumexp(a: np.ndarray, axis: int = -1) -> np.ndarray:
    """log(sum(exp(a))) along `axis`; all -inf slices give -inf without warnings."""
    a = np.asarray(a, dtype=float)
    top = np.max(a, axis=axis, keepdims=True)
    safe = np.where(np.isfinite(top), top, 0.0)
    with np.errstate(divide="ignore"):
        out = np.log(np.sum(np.exp(a - safe), axis=axis, keepdims=True)) + safe
    return np.squeeze(out, axis=axis)


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    lo: float
    hi: float

    def integrate(self, values: np.ndarray) -> float:
        """Integral of sampled values (last axis runs over nodes)."""
        return np.asarray(values) @ self.weights


@lru_cache(maxsize=None)
def _legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def composite_gauss_legendre(lo: float, hi: float, nodes_per_unit: int = DEFAULT_NODES_PER_UNIT) -> QuadratureRule:
    """Gauss-Legendre on panels of width at most 1 covering [lo, hi]."""
    if not hi > lo:
        raise ValueError("need hi > lo")
    if nodes_per_unit < 1:
        raise ValueError("nodes_per_unit must be positive")
    panels = int(np.ceil(hi - lo - 1e-12))
    width = (hi - lo) / panels
    x, w = _legendre(int(nodes_per_unit))
    left = lo + width * np.arange(panels)
    nodes = (left[:, None] + 0.5 * width * (x[None, :] + 1.0)).reshape(-1)
    weights = np.tile(0.5 * width * w, panels)
    return QuadratureRule(nodes, weights, float(lo), float(hi))


def make_quadrature(c: Constellation, nodes_per_unit: int = DEFAULT_NODES_PER_UNIT) -> QuadratureRule:
    """Rule over [min point - 10, max point + 10] for unit-variance noise."""
    return composite_gauss_legendre(
        float(c.points.min()) - GUARD, float(c.points.max()) + GUARD, nodes_per_unit
    )


@dataclass(frozen=True, eq=False)
class AwgnChannel:
    """Y = points[B] + Z with Z ~ N(0, 1)."""

    constellation: Constellation
    nodes_per_unit: int = DEFAULT_NODES_PER_UNIT

    def __post_init__(self):
        object.__setattr__(self, "_rule", make_quadrature(self.constellation, self.nodes_per_unit))

    @property
    def m(self) -> int:
        return self.constellation.m

    @property
    def rule(self) -> QuadratureRule:
        return self._rule

    def output_grid(self) -> tuple[np.ndarray, np.ndarray]:
        return self._rule.nodes, self._rule.weights

    def log_likelihood(self, y) -> np.ndarray:
        y = np.atleast_1d(np.asarray(y, dtype=float))
        diff = y[:, None] - self.constellation.points[None, :]
        return -0.5 * diff**2 - LOG_SQRT_2PI

    def sample(self, labels: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        labels = np.asarray(labels)
        return self.constellation.points[labels] + rng.standard_normal(labels.shape)


@dataclass(frozen=True, eq=False)
class DiscreteChannel:
    """Finite-output memoryless channel; transition[b, y] = P(y|b)."""

    m: int
    transition: np.ndarray

    def __post_init__(self):
        t = np.array(self.transition, dtype=float)
        if t.ndim != 2 or t.shape[0] != 1 << self.m:
            raise ValueError(f"transition must have {1 << self.m} rows")
        if np.any(t < 0) or np.any(np.abs(t.sum(axis=1) - 1.0) > 1e-12):
            raise ValueError("transition rows must be probability vectors")
        t.setflags(write=False)
        object.__setattr__(self, "transition", t)

    @property
    def output_size(self) -> int:
        return self.transition.shape[1]

    def output_grid(self) -> tuple[np.ndarray, np.ndarray]:
        k = self.output_size
        return np.arange(k), np.ones(k)

    def log_likelihood(self, y) -> np.ndarray:
        y = np.atleast_1d(np.asarray(y, dtype=int))
        with np.errstate(divide="ignore"):
            return np.log(self.transition[:, y].T)

    def sample(self, labels: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        labels = np.asarray(labels)
        cdf = np.cumsum(self.transition, axis=1)
        u = rng.random(labels.shape)
        y = (u[..., None] >= cdf[labels]).sum(axis=-1)
        return np.minimum(y, self.output_size - 1)


Channel = Union[AwgnChannel, DiscreteChannel]


def conditional_density(ch: Channel, y, label: int):
    """p(y|label); a scalar for scalar y."""
    out = np.exp(ch.log_likelihood(y)[:, label])
    return float(out[0]) if np.ndim(y) == 0 else out


def log_joint(logp: np.ndarray, d: JointDistribution) -> np.ndarray:
    """log(P_B(a) p(y|a)) with -inf on zero-probability labels."""
    with np.errstate(divide="ignore"):
        logprior = np.where(d.support(), np.log(np.maximum(d.probs, ZERO_PROB)), -np.inf)
    return logp + logprior[None, :]


def scaled_log_bit_joint(scaled: np.ndarray, shift: np.ndarray, m: int) -> np.ndarray:
    """Bit-level log joints from row-shifted joint densities.

    `scaled` is exp(logjoint - shift[:, None]); the result has shape (m, 2, n).
    """
    bits = label_bits(m)
    masks = np.concatenate([bits == 0, bits == 1], axis=1).astype(float)
    with np.errstate(divide="ignore"):
        out = np.log(scaled @ masks) + shift[:, None]
    return np.stack([out[:, :m].T, out[:, m:].T], axis=1)


def log_bit_joint(logjoint: np.ndarray, m: int) -> np.ndarray:
    """log(P_{B_i}(b) p_{Y|B_i}(y|b)), shape (m, 2, n)."""
    top = np.max(logjoint, axis=1)
    shift = np.where(np.isfinite(top), top, 0.0)
    return scaled_log_bit_joint(np.exp(logjoint - shift[:, None]), shift, m)


def log_bit_likelihood(logp: np.ndarray, d: JointDistribution) -> np.ndarray:
    """log p_{Y|B_i}(y|b), shape (m, 2, n); NaN where P_{B_i}(b) = 0."""
    bm = bit_marginals(d)
    lbj = log_bit_joint(log_joint(logp, d), d.m)
    out = np.full_like(lbj, np.nan)
    ok = bm > ZERO_PROB
    with np.errstate(divide="ignore"):
        out[ok] = lbj[ok] - np.log(bm[ok])[:, None]
    return out


def bit_conditional_density(ch: Channel, d: JointDistribution, y, i: int, b: int) -> Optional[np.ndarray]:
    """p_{Y|B_i}(y|b), or None when P_{B_i}(b) = 0 and the conditional is undefined."""
    if not 1 <= i <= d.m:
        raise ValueError(f"bit index {i} out of range 1..{d.m}")
    if bit_marginals(d)[i - 1, b] <= ZERO_PROB:
        return None
    lbl = log_bit_likelihood(ch.log_likelihood(y), d)[i - 1, b]
    out = np.exp(lbl)
    return float(out[0]) if np.ndim(y) == 0 else out


def identity_channel_2bit() -> DiscreteChannel:
    """Noiseless channel Y = B_1 B_2; output index equals the label."""
    return DiscreteChannel(2, np.eye(4))


def erase_all_channel_2bit() -> DiscreteChannel:
    """Every input label produces the single output 'e'."""
    return DiscreteChannel(2, np.ones((4, 1)))


def load_discrete_channel(path: str | Path) -> DiscreteChannel:
    """Read `m K` then 2**m rows of K probabilities. '#' starts a comment."""
    rows = []
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append(line.split())
    if not rows or len(rows[0]) != 2:
        raise ValueError(f"{path}: first line must be 'm K'")
    m, k = int(rows[0][0]), int(rows[0][1])
    body = rows[1:]
    if len(body) != 1 << m or any(len(r) != k for r in body):
        raise ValueError(f"{path}: expected {1 << m} rows of {k} probabilities")
    return DiscreteChannel(m, np.array(body, dtype=float))


def save_discrete_channel(ch: DiscreteChannel, path: str | Path) -> None:
    lines = [f"{ch.m} {ch.output_size}"]
    lines += [" ".join(f"{v:.17g}" for v in row) for row in ch.transition]
    Path(path).write_text("\n".join(lines) + "\n")
