"""
Random-coding Monte Carlo at toy block lengths.

Each trial draws a fresh codebook with symbols iid from P_B, sends a uniformly
chosen codeword, and decodes with either the bit-metric
sum_t sum_i log p_{Y|B_i}(y_t | b_{i,t}) or the matched metric
sum_t log p(y_t | b_t). Ties between maximizers are broken uniformly at random.
A frame error is a decoded codeword that differs from the transmitted one, so
duplicate codewords in the codebook are not counted against the decoder.

Trial t uses the generator seeded by SeedSequence(seed, spawn_key=(t,)), so
results do not depend on the order in which trials are run.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .channel import Channel, DiscreteChannel, log_bit_likelihood
from .distmodel import JointDistribution, label_bits

MAX_CODEBOOK_BITS = 20
DECODERS = ("bit-metric", "matched-ml")


@dataclass(frozen=True)
class SimConfig:
    n: int
    rate: float
    trials: int
    seed: int = 0
    decoder: str = "bit-metric"

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("block length must be at least 1")
        if self.rate < 0:
            raise ValueError("rate must be non-negative")
        if self.trials < 1:
            raise ValueError("trials must be positive")
        if self.decoder not in DECODERS:
            raise ValueError(f"decoder must be one of {DECODERS}")
        if self.codebook_bits > MAX_CODEBOOK_BITS:
            raise ValueError(
                f"codebook of 2^{self.codebook_bits} words exceeds the 2^{MAX_CODEBOOK_BITS} cap"
            )

    @property
    def codebook_bits(self) -> int:
        # guard against n * rate landing a hair above an integer
        return max(0, math.ceil(self.n * self.rate - 1e-9))

    @property
    def codebook_size(self) -> int:
        return 1 << self.codebook_bits


@dataclass(frozen=True)
class SimResult:
    n: int
    rate: float
    trials: int
    errors: int
    ties: int

    @property
    def frame_error_rate(self) -> float:
        return self.errors / self.trials

    @property
    def std_error(self) -> float:
        p = self.frame_error_rate
        return math.sqrt(p * (1 - p) / self.trials)


def _log_metric_table(ch: Channel, d: JointDistribution, y: np.ndarray, decoder: str) -> np.ndarray:
    """Per-symbol log metric, shape (len(y), 2**m)."""
    logp = ch.log_likelihood(y)
    if decoder == "matched-ml" or d.m == 1:
        # for m = 1, p_{Y|B_1} is p_{Y|B} itself
        return logp
    lbl = log_bit_likelihood(logp, d)
    lbl = np.where(np.isnan(lbl), -np.inf, lbl)
    bits = label_bits(d.m)
    out = np.zeros_like(logp)
    for i in range(d.m):
        out += lbl[i, bits[:, i], :].T
    return out


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(trial,)))


def run_sim(ch: Channel, d: JointDistribution, cfg: SimConfig) -> SimResult:
    if ch.m != d.m:
        raise ValueError(f"channel has m={ch.m}, distribution has m={d.m}")
    size, n = cfg.codebook_size, cfg.n
    cdf = np.cumsum(d.probs)
    cdf[-1] = 1.0
    table = None
    if isinstance(ch, DiscreteChannel):
        table = _log_metric_table(ch, d, np.arange(ch.output_size), cfg.decoder)
    cols = np.arange(n)
    errors = ties = 0
    for t in range(cfg.trials):
        rng = trial_rng(cfg.seed, t)
        codebook = np.searchsorted(cdf, rng.random((size, n)), side="right")
        msg = int(rng.integers(size))
        sent = codebook[msg]
        y = ch.sample(sent, rng)
        metric = table[y] if table is not None else _log_metric_table(ch, d, y, cfg.decoder)
        scores = metric[cols, codebook].sum(axis=1)
        winners = np.flatnonzero(scores == scores.max())
        if winners.size > 1:
            ties += 1
            choice = int(winners[rng.integers(winners.size)])
        else:
            choice = int(winners[0])
        if not np.array_equal(codebook[choice], sent):
            errors += 1
    return SimResult(n, cfg.rate, cfg.trials, errors, ties)


def rate_sweep(
    ch: Channel,
    d: JointDistribution,
    n_list: Sequence[int],
    rate_list: Sequence[float],
    trials: int,
    seed: int = 0,
    decoder: str = "bit-metric",
) -> list[SimResult]:
    """run_sim over the grid n_list x rate_list, in that order, all with the same seed."""
    if not len(n_list) or not len(rate_list):
        raise ValueError("n_list and rate_list must be non-empty")
    if trials == 0:
        return []
    cfgs = [SimConfig(n, r, trials, seed, decoder) for n in n_list for r in rate_list]
    return [run_sim(ch, d, cfg) for cfg in cfgs]


CSV_HEADER = ("n", "rate", "trials", "errors", "fer", "ties")


def results_to_csv(results: Iterable[SimResult]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in results:
        w.writerow([r.n, f"{r.rate:.9g}", r.trials, r.errors, f"{r.frame_error_rate:.9g}", r.ties])
    return buf.getvalue()
