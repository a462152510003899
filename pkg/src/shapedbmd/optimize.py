"""
Input optimization under the average power constraint, and SNR readout.

Every search meets the power constraint with equality: for a candidate label
distribution the scaling delta is solved from E[(delta x_B)**2] = power.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .channel import DEFAULT_NODES_PER_UNIT, AwgnChannel
from .constellation import ask_brgc, delta_for_power
from .distmodel import JointDistribution, maxwell_boltzmann
from .rates import _Eval, _log_q_bmd, _sgmi, _bmd_raw
from .search import golden_max

logger = logging.getLogger(__name__)

SNR_MIN_DB = -10.0
SNR_MAX_DB = 60.0
BISECTION_MAX_ITER = 80
RATE_TOL = 1e-6
SNR_TOL_DB = 1e-6
WARM_STARTS = 1

FUNCTIONALS = ("capacity", "shaped-bmd", "sgmi", "bitshaped-bmd", "uniform-bmd", "uniform-sgmi")


@dataclass(frozen=True)
class OperatingPoint:
    """Optimized (delta, distribution) pair at one power constraint."""

    power: float
    delta: float
    distribution: JointDistribution
    rate: float
    functional: str
    params: dict = field(default_factory=dict, compare=False)

    @property
    def snr_db(self) -> float:
        return 10 * np.log10(self.power)

    @property
    def channel(self) -> AwgnChannel:
        return AwgnChannel(ask_brgc(self.distribution.m, self.delta))


def _channel_for(d: JointDistribution, power: float, nodes_per_unit: int) -> AwgnChannel:
    return AwgnChannel(ask_brgc(d.m, delta_for_power(d.m, d, power)), nodes_per_unit)


def _mutual_information(d: JointDistribution, power: float, nodes_per_unit: int) -> float:
    return _Eval(_channel_for(d, power, nodes_per_unit), d).mutual_information()


def _bitwise_mi_sum(d: JointDistribution, power: float, nodes_per_unit: int) -> float:
    return float(np.sum(_Eval(_channel_for(d, power, nodes_per_unit), d).bit_mutual_information()))


def capacity_mb(m: int, power: float, nodes_per_unit: int = DEFAULT_NODES_PER_UNIT) -> OperatingPoint:
    """Maximize I(B;Y) over Maxwell-Boltzmann inputs P(b) ~ exp(-nu x_b**2)."""
    if power <= 0:
        raise ValueError("power must be positive")
    amps = ask_brgc(m, 1.0).amplitudes

    def f(nu: float) -> float:
        return _mutual_information(maxwell_boltzmann(amps, nu), power, nodes_per_unit)

    nu_hi = 1.0 / (amps.max() ** 2)
    while True:
        nu, rate = golden_max(f, 0.0, nu_hi, 1e-10 * nu_hi)
        if nu < 0.9 * nu_hi or nu_hi > 1e3:
            break
        nu_hi *= 4
    d = maxwell_boltzmann(amps, nu)
    return OperatingPoint(power, delta_for_power(m, d, power), d, rate, "capacity", {"nu": nu})


def _line_search(f: Callable[[float], float], x0: float, f0: float, lo: float, hi: float,
                 coarse: Optional[float], xtol: float) -> tuple[float, float]:
    """Grid scan (if `coarse`) then golden refinement around the best grid point."""
    best_x, best_f = x0, f0
    if coarse:
        for x in np.arange(lo, hi + 1e-12, coarse):
            fx = f(float(x))
            if fx > best_f:
                best_x, best_f = float(x), fx
        width = coarse
    else:
        width = 0.02
    a, b = max(lo, best_x - width), min(hi, best_x + width)
    x, fx = golden_max(f, a, b, xtol)
    if fx > best_f:
        best_x, best_f = x, fx
    return best_x, best_f


def _coordinate_ascent(f: Callable[[np.ndarray], float], q0: np.ndarray, free: Sequence[int],
                       step: float, coarse: float, max_sweeps: int = 50) -> tuple[np.ndarray, float]:
    q = q0.copy()
    best = f(q)
    for sweep in range(max_sweeps):
        for j in free:
            def g(x, j=j):
                trial = q.copy()
                trial[j] = x
                return f(trial)

            x, val = _line_search(g, q[j], best, 0.0, 1.0, coarse if sweep == 0 else None, 1e-5)
            if val > best:
                q[j], best = x, val
        # stop once no single-coordinate move of size `step` helps
        improved = False
        for j in free:
            for sgn in (-1.0, 1.0):
                x = q[j] + sgn * step
                if not 0.0 <= x <= 1.0:
                    continue
                trial = q.copy()
                trial[j] = x
                val = f(trial)
                if val > best + 1e-13:
                    q, best, improved = trial, val, True
        if not improved:
            break
    return q, best


def bitshaped_search(
    m: int,
    power: float,
    nodes_per_unit: int = DEFAULT_NODES_PER_UNIT,
    starts: int = 8,
    rng: Optional[np.random.Generator] = None,
    seed: int = 0,
    symmetric: bool = True,
    step: float = 0.005,
    init: Optional[Sequence[Sequence[float]]] = None,
) -> OperatingPoint:
    """Maximize sum_i I(B_i;Y) over independent bit-levels.

    Cyclic coordinate ascent over P(B_i = 1) from the uniform start plus
    `starts` random starts. In symmetric mode the sign bit B_1 stays at 1/2.
    Extra starting points can be passed through `init`.
    """
    if power <= 0:
        raise ValueError("power must be positive")
    rng = rng if rng is not None else np.random.default_rng(seed)
    free = list(range(1 if symmetric else 0, m))

    def f(q: np.ndarray) -> float:
        return _bitwise_mi_sum(JointDistribution.from_bit_probs(q), power, nodes_per_unit)

    candidates = [np.full(m, 0.5)]
    for _ in range(starts):
        q = rng.uniform(0.05, 0.95, size=m)
        if symmetric:
            q[0] = 0.5
        candidates.append(q)
    for q in init or ():
        q = np.array(q, dtype=float)
        if symmetric:
            q[0] = 0.5
        candidates.append(q)

    best_q, best = None, -np.inf
    for k, q0 in enumerate(candidates):
        coarse = 0.05 if k <= starts else None
        q, val = _coordinate_ascent(f, q0, free, step, coarse)
        logger.debug("bitshaped start %d: rate %.9f at %s", k, val, np.round(q, 4))
        if val > best:
            best_q, best = q, val
    d = JointDistribution.from_bit_probs(best_q)
    return OperatingPoint(power, delta_for_power(m, d, power), d, best, "bitshaped-bmd",
                          {"bit_probs": best_q.tolist()})


def uniform_point(m: int, power: float, nodes_per_unit: int = DEFAULT_NODES_PER_UNIT) -> OperatingPoint:
    d = JointDistribution.uniform(m)
    return OperatingPoint(power, delta_for_power(m, d, power), d,
                          _bitwise_mi_sum(d, power, nodes_per_unit), "uniform-bmd")


def evaluate(functional: str, m: int, power: float, nodes_per_unit: int = DEFAULT_NODES_PER_UNIT,
             seed: int = 0, **kwargs) -> OperatingPoint:
    """Rate of a named functional at a power constraint, with the input that produced it.

    capacity, shaped-bmd and sgmi use the MB capacity-optimal input;
    uniform-bmd and uniform-sgmi use uniform bits; bitshaped-bmd runs the
    product-distribution search.
    """
    if functional in ("capacity", "shaped-bmd", "sgmi"):
        op = capacity_mb(m, power, nodes_per_unit)
    elif functional in ("uniform-bmd", "uniform-sgmi"):
        op = uniform_point(m, power, nodes_per_unit)
    elif functional == "bitshaped-bmd":
        return bitshaped_search(m, power, nodes_per_unit, seed=seed, **kwargs)
    else:
        raise ValueError(f"unknown functional {functional!r}; choose from {FUNCTIONALS}")
    if functional in ("capacity", "uniform-bmd"):
        rate = op.rate
    else:
        ch = AwgnChannel(ask_brgc(m, op.delta), nodes_per_unit)
        ev = _Eval(ch, op.distribution)
        if functional == "shaped-bmd":
            rate = max(0.0, _bmd_raw(ev))
        else:
            rate = _sgmi(ev, _log_q_bmd(ch, op.distribution, ev.y)).rate
    return OperatingPoint(power, op.delta, op.distribution, rate, functional, dict(op.params))


def snr_at_rate(
    functional: str,
    m: int,
    target_rate: float,
    nodes_per_unit: int = DEFAULT_NODES_PER_UNIT,
    seed: int = 0,
    bracket: tuple[float, float] = (SNR_MIN_DB, SNR_MAX_DB),
    return_point: bool = False,
):
    """SNR in dB at which `functional` reaches `target_rate`, by bisection on the power.

    `bracket` may be narrowed by the caller when bounds are known. With
    `return_point`, the operating point at the returned SNR is also returned.

    For bitshaped-bmd the intermediate bisection steps warm-start the search
    from the previous optimum with a reduced number of random starts; the
    search at the final SNR runs with the full multi-start set and bisection
    resumes if it moves the rate away from the target.
    """
    if not 0 < target_rate < m:
        raise ValueError(f"target rate must lie in (0, {m})")
    lo, hi = bracket
    warm: list = []

    def at(snr_db: float, full: bool = False) -> OperatingPoint:
        kwargs = {}
        if functional == "bitshaped-bmd":
            if warm:
                kwargs["init"] = warm[-1:]
            if warm and not full:
                kwargs["starts"] = WARM_STARTS
        op = evaluate(functional, m, 10 ** (snr_db / 10), nodes_per_unit, seed=seed, **kwargs)
        if functional == "bitshaped-bmd":
            warm.append(op.params["bit_probs"])
        return op

    op_hi = at(hi)
    if op_hi.rate < target_rate:
        if hi >= SNR_MAX_DB:
            raise ArithmeticError(f"{functional} does not reach {target_rate} bits below {SNR_MAX_DB} dB")
        return snr_at_rate(functional, m, target_rate, nodes_per_unit, seed, (hi, SNR_MAX_DB), return_point)
    if lo > SNR_MIN_DB and at(lo).rate > target_rate:
        return snr_at_rate(functional, m, target_rate, nodes_per_unit, seed, (SNR_MIN_DB, lo), return_point)

    best = op_hi
    verified = functional != "bitshaped-bmd"
    for _ in range(BISECTION_MAX_ITER):
        mid = 0.5 * (lo + hi)
        op = at(mid)
        done = abs(op.rate - target_rate) < RATE_TOL or hi - lo < SNR_TOL_DB
        if done and not verified:
            op = at(mid, full=True)
            verified = True
            done = abs(op.rate - target_rate) < RATE_TOL or hi - lo < SNR_TOL_DB
        if done:
            best = op
            break
        if op.rate < target_rate:
            lo = mid
        else:
            hi, best = mid, op
    snr = best.snr_db
    logger.info("%s reaches %.9f bits at %.6f dB", functional, best.rate, snr)
    return (snr, best) if return_point else snr


def gap_db(functional_a: str, functional_b: str, m: int, target_rate: float,
           nodes_per_unit: int = DEFAULT_NODES_PER_UNIT, seed: int = 0) -> float:
    """Extra SNR functional_b needs over functional_a to reach the target rate."""
    if functional_a == functional_b:
        return 0.0
    a = snr_at_rate(functional_a, m, target_rate, nodes_per_unit, seed)
    b = snr_at_rate(functional_b, m, target_rate, nodes_per_unit, seed)
    return b - a


def capacity_point_rates(op: OperatingPoint, nodes_per_unit: int = DEFAULT_NODES_PER_UNIT) -> dict:
    """Capacity, shaped BMD and sGMI evaluated at one MB operating point."""
    ch = AwgnChannel(ask_brgc(op.distribution.m, op.delta), nodes_per_unit)
    ev = _Eval(ch, op.distribution)
    return {
        "capacity": ev.mutual_information(),
        "shaped-bmd": max(0.0, _bmd_raw(ev)),
        "sgmi": _sgmi(ev, _log_q_bmd(ch, op.distribution, ev.y)).rate,
    }
