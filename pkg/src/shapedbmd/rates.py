"""
Rate functionals for bit-metric decoding.

All rates are in bits per channel use. Expectations over (B, Y) are taken
against the measure ``w(y) * P_B(b) * p(y|b)`` on the channel's output grid,
so the same code serves discrete channels (exact sums) and the AWGN channel
(quadrature). Mixture logarithms are evaluated with log-sum-exp.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional, Sequence, Union

import numpy as np

from .channel import AwgnChannel, Channel, log_bit_likelihood, log_joint, logsumexp, scaled_log_bit_joint
from .constellation import average_power
from .distmodel import ZERO_PROB, JointDistribution, bit_marginals, entropy, entropy_bits, is_product, label_bits
from .search import golden_max

LN2 = np.log(2.0)
SGMI_S_MAX = 4.0
SGMI_S_TOL = 1e-6


class _Eval:
    """Arrays shared by the functionals for one (channel, distribution) pair."""

    def __init__(self, ch: Channel, d: JointDistribution):
        if ch.m != d.m:
            raise ValueError(f"channel has m={ch.m}, distribution has m={d.m}")
        self.ch, self.d = ch, d
        self.y, self.w = ch.output_grid()
        self.logp = ch.log_likelihood(self.y)
        self.logjoint = log_joint(self.logp, d)
        top = np.max(self.logjoint, axis=1)
        self.shift = np.where(np.isfinite(top), top, 0.0)
        # exp(logjoint - shift): every row with any mass has a maximum of 1
        self.scaled = np.exp(self.logjoint - self.shift[:, None])
        with np.errstate(divide="ignore"):
            self.logpy = np.log(self.scaled.sum(axis=1)) + self.shift
        self.bm = bit_marginals(d)
        self._lbj = None
        self._weight = None

    @property
    def weight(self) -> np.ndarray:
        if self._weight is None:
            self._weight = (self.w * np.exp(self.shift))[:, None] * self.scaled
            self.active = self._weight > 0
        return self._weight

    @property
    def log_bit_joint(self) -> np.ndarray:
        if self._lbj is None:
            self._lbj = scaled_log_bit_joint(self.scaled, self.shift, self.d.m)
        return self._lbj

    def expect(self, values: np.ndarray) -> float:
        """E[values(Y, B)] in nats; `values` has shape (n, 2**m)."""
        weight = self.weight
        return float(np.sum(weight[self.active] * values[self.active]))

    def mutual_information(self) -> float:
        with np.errstate(invalid="ignore"):
            return self.expect(self.logp - self.logpy[:, None]) / LN2

    def bit_mutual_information(self) -> np.ndarray:
        lbj = self.log_bit_joint
        ok_bits = self.bm > ZERO_PROB
        with np.errstate(divide="ignore", invalid="ignore"):
            term = lbj - np.log(self.bm)[:, :, None] - self.logpy[None, None, :]
        wj = self.w[None, None, :] * np.exp(lbj)
        active = (wj > 0) & ok_bits[:, :, None]
        contrib = np.where(active, wj * np.where(active, term, 0.0), 0.0)
        return contrib.sum(axis=(1, 2)) / LN2

    def bit_entropies(self) -> np.ndarray:
        return np.array([entropy_bits(row) for row in self.bm])


@dataclass(frozen=True)
class Metric:
    """Decoding metric q(y, b), represented by its logarithm on output arrays."""

    log_values: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    name: str = "metric"

    def __call__(self, y, label: int):
        out = np.exp(self.log_values(np.atleast_1d(y))[:, label])
        return float(out[0]) if np.ndim(y) == 0 else out


class BmdRate(NamedTuple):
    raw: float
    clipped: float


class SgmiRate(NamedTuple):
    s: float
    rate: float


def mutual_information(ch: Channel, d: JointDistribution) -> float:
    """I(B;Y)."""
    return max(0.0, _Eval(ch, d).mutual_information())


def bit_mutual_information(ch: Channel, d: JointDistribution, i: Optional[int] = None):
    """I(B_i;Y) for one 1-based bit index, or the vector over all bit-levels."""
    mi = np.maximum(_Eval(ch, d).bit_mutual_information(), 0.0)
    if i is None:
        return mi
    if not 1 <= i <= d.m:
        raise ValueError(f"bit index {i} out of range 1..{d.m}")
    return float(mi[i - 1])


def bit_conditional_entropy(ch: Channel, d: JointDistribution, i: int) -> float:
    """H(B_i|Y) = H(B_i) - I(B_i;Y)."""
    if not 1 <= i <= d.m:
        raise ValueError(f"bit index {i} out of range 1..{d.m}")
    ev = _Eval(ch, d)
    h = ev.bit_entropies()[i - 1] - ev.bit_mutual_information()[i - 1]
    return float(min(max(h, 0.0), 1.0))


def _bmd_raw(ev: _Eval) -> float:
    cond = ev.bit_entropies() - ev.bit_mutual_information()
    return entropy(ev.d) - float(np.sum(cond))


def rate_bmd(ch: Channel, d: JointDistribution) -> BmdRate:
    """H(B) - sum_i H(B_i|Y), before and after clipping at zero."""
    raw = _bmd_raw(_Eval(ch, d))
    return BmdRate(raw, max(0.0, raw))


def rate_bmd_independent(ch: Channel, d: JointDistribution) -> float:
    """sum_i I(B_i;Y); only defined for product distributions."""
    if not is_product(d):
        raise ValueError("distribution is not a product of its bit marginals")
    return float(np.sum(_Eval(ch, d).bit_mutual_information()))


def matched_metric(ch: Channel) -> Metric:
    return Metric(ch.log_likelihood, "matched")


def _log_q_bmd(ch: Channel, d: JointDistribution, y: np.ndarray) -> np.ndarray:
    lbl = log_bit_likelihood(ch.log_likelihood(y), d)
    lbl = np.where(np.isnan(lbl), -np.inf, lbl)
    bits = label_bits(d.m)
    out = np.zeros((lbl.shape[2], 1 << d.m))
    for i in range(d.m):
        out += lbl[i, bits[:, i], :].T
    return out


def q_bmd(ch: Channel, d: JointDistribution) -> Metric:
    """Product of bit-wise conditional densities; zero on labels with an impossible bit value."""
    return Metric(lambda y: _log_q_bmd(ch, d, np.atleast_1d(y)), "bmd")


def r_bmd(d: JointDistribution) -> np.ndarray:
    """prod_i P_{B_i}(b_i) / P_B(b) on the support; NaN off the support."""
    bm = bit_marginals(d)
    bits = label_bits(d.m)
    prod = np.prod(bm[np.arange(d.m)[None, :], bits], axis=1)
    supp = d.support()
    out = np.full(d.size, np.nan)
    out[supp] = prod[supp] / d.probs[supp]
    return out


def _log_r(d: JointDistribution, r) -> np.ndarray:
    supp = d.support()
    if r is None:
        vals = np.ones(d.size)
    elif callable(r):
        vals = np.array([r(a) if supp[a] else np.nan for a in range(d.size)], dtype=float)
    else:
        vals = np.asarray(r, dtype=float)
    if vals.shape != (d.size,):
        raise ValueError("r must provide one value per label")
    if np.any(~(vals[supp] > 0)):
        raise ValueError("r must be positive on the support of the distribution")
    out = np.full(d.size, -np.inf)
    out[supp] = np.log(vals[supp])
    return out


def _generic(ev: _Eval, logq: np.ndarray, s: float, logr: np.ndarray) -> float:
    supp = ev.d.support()
    if s == 0:
        num = np.zeros_like(logq)
    else:
        num = s * logq
    num = num + logr[None, :]
    logprior = np.log(ev.d.probs[supp])
    den = logsumexp(num[:, supp] + logprior[None, :], axis=1)
    with np.errstate(invalid="ignore"):
        return ev.expect(num - den[:, None]) / LN2


def rate_generic(
    ch: Channel,
    d: JointDistribution,
    q: Metric,
    s: float,
    r: Union[None, Sequence[float], Callable[[int], float]] = None,
) -> float:
    """E[log2(q(Y,B)^s r(B) / sum_{b in supp P_B} P_B(b) q(Y,b)^s r(b))].

    `r` may be None (r = 1), an array over labels, or a callable on labels.
    Only its values on the support of `d` are used.
    """
    if s < 0:
        raise ValueError("s must be non-negative")
    ev = _Eval(ch, d)
    return _generic(ev, q.log_values(ev.y), float(s), _log_r(d, r))


def rate_lm_instance(ch: Channel, d: JointDistribution) -> float:
    """The generic rate at q = q_BMD, s = 1, r = r_BMD (may be negative)."""
    ev = _Eval(ch, d)
    return _generic(ev, _log_q_bmd(ch, d, ev.y), 1.0, _log_r(d, r_bmd(d)))


def _sgmi(ev: _Eval, logq: np.ndarray) -> SgmiRate:
    logr = _log_r(ev.d, None)
    f = lambda s: _generic(ev, logq, s, logr)
    hi = SGMI_S_MAX
    while True:
        s, val = golden_max(f, 0.0, hi, SGMI_S_TOL)
        if s < hi - 10 * SGMI_S_TOL or hi >= 1024:
            break
        hi *= 2
    return SgmiRate(float(s), max(0.0, float(val)))


def rate_sgmi(ch: Channel, d: JointDistribution) -> SgmiRate:
    """GMI of the bit-metric: max over s >= 0 of the generic rate with r = 1."""
    ev = _Eval(ch, d)
    return _sgmi(ev, _log_q_bmd(ch, d, ev.y))


@dataclass(frozen=True)
class RateReport:
    """All rate functionals at one operating point."""

    capacity_mi: float
    bmd: float
    bmd_raw: float
    sgmi: float
    sgmi_s: float
    lm_instance: float
    bitwise_mi_sum: float
    per_bit_mi: tuple[float, ...]
    distribution: JointDistribution
    delta: Optional[float] = None
    snr_db: Optional[float] = None

    def as_dict(self) -> dict:
        return {
            "snr_db": self.snr_db,
            "capacity_mi": self.capacity_mi,
            "bmd": self.bmd,
            "bmd_raw": self.bmd_raw,
            "sgmi": self.sgmi,
            "sgmi_s": self.sgmi_s,
            "lm_instance": self.lm_instance,
            "bitwise_mi_sum": self.bitwise_mi_sum,
            "per_bit_mi": list(self.per_bit_mi),
            "distribution": self.distribution.probs.tolist(),
            "delta": self.delta,
        }


def rate_report(ch: Channel, d: JointDistribution) -> RateReport:
    ev = _Eval(ch, d)
    bit_mi = np.maximum(ev.bit_mutual_information(), 0.0)
    raw = entropy(d) - float(np.sum(ev.bit_entropies() - bit_mi))
    logq = _log_q_bmd(ch, d, ev.y)
    sg = _sgmi(ev, logq)
    lm = _generic(ev, logq, 1.0, _log_r(d, r_bmd(d)))
    delta = snr_db = None
    if isinstance(ch, AwgnChannel):
        delta = ch.constellation.delta
        power = average_power(ch.constellation, d)
        snr_db = 10 * np.log10(power) if power > 0 else -np.inf
    return RateReport(
        capacity_mi=max(0.0, ev.mutual_information()),
        bmd=max(0.0, raw),
        bmd_raw=raw,
        sgmi=sg.rate,
        sgmi_s=sg.s,
        lm_instance=lm,
        bitwise_mi_sum=float(np.sum(bit_mi)),
        per_bit_mi=tuple(float(v) for v in bit_mi),
        distribution=d,
        delta=delta,
        snr_db=snr_db,
    )
