"""
Command-line front end.

    shapedbmd rate-curve --m 5 --snr-min 10 --snr-max 28 --snr-step 0.5 --out fig1.csv
    shapedbmd gap --m 5 --target-rate 3.8
    shapedbmd examples
    shapedbmd optimize --m 5 --snr-min 23 --snr-max 23 --rates capacity,bitshaped-bmd
    shapedbmd simulate --channel identity --dist-file dep.txt --n-list 16 --rate-list 0.5

Settings resolve as: command-line flag, then `key = value` lines of the
--config file, then built-in defaults.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .channel import (
    AwgnChannel,
    erase_all_channel_2bit,
    identity_channel_2bit,
    load_discrete_channel,
)
from .constellation import ask_brgc, delta_for_power
from .distmodel import JointDistribution, load_distribution
from .optimize import (
    FUNCTIONALS,
    bitshaped_search,
    capacity_mb,
    capacity_point_rates,
    snr_at_rate,
    uniform_point,
)
from .rates import _Eval, _bmd_raw, _log_q_bmd, _sgmi, rate_bmd, rate_lm_instance, rate_report
from .simulate import DECODERS, rate_sweep, results_to_csv

logger = logging.getLogger("shapedbmd")

COLUMNS = ("capacity", "shaped-bmd", "sgmi", "bitshaped-bmd", "uniform-bmd", "uniform-sgmi")
EXAMPLE_TOL = 1e-9


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return f"{float(x) + 0.0:.9g}"  # no "-0"


@dataclass
class RunConfig:
    command: str = ""
    m: int = 5
    snr_min: float = 10.0
    snr_max: float = 28.0
    snr_step: float = 0.5
    rates: tuple = COLUMNS
    target_rate: Optional[float] = None
    quad_nodes: int = 16
    out: Optional[str] = None
    format: str = "csv"
    seed: int = 0
    dist_file: Optional[str] = None
    channel_file: Optional[str] = None
    channel: Optional[str] = None
    n_list: tuple = ()
    rate_list: tuple = ()
    trials: int = 1000
    decoder: str = "bit-metric"
    symmetric: bool = True

    def snr_grid(self) -> np.ndarray:
        if not self.snr_step > 0:
            raise ValueError("--snr-step must be positive")
        if self.snr_max < self.snr_min:
            raise ValueError("--snr-max must not be below --snr-min")
        count = int(np.floor((self.snr_max - self.snr_min) / self.snr_step + 1e-9)) + 1
        return np.round(self.snr_min + self.snr_step * np.arange(count), 12)


def _parse_list(text, conv):
    if isinstance(text, (list, tuple)):
        return tuple(conv(t) for t in text)
    return tuple(conv(t) for t in str(text).replace(",", " ").split() if t)


def _parse_rates(text) -> tuple:
    names = _parse_list(text, str)
    bad = [n for n in names if n not in FUNCTIONALS]
    if bad:
        raise ValueError(f"unknown rate(s) {bad}; choose from {', '.join(FUNCTIONALS)}")
    return names


def _parse_bool(text) -> bool:
    if isinstance(text, bool):
        return text
    return str(text).strip().lower() in ("1", "true", "yes", "on")


CONVERTERS = {
    "m": int,
    "snr_min": float,
    "snr_max": float,
    "snr_step": float,
    "rates": _parse_rates,
    "target_rate": float,
    "quad_nodes": int,
    "seed": int,
    "n_list": lambda t: _parse_list(t, int),
    "rate_list": lambda t: _parse_list(t, float),
    "trials": int,
    "symmetric": _parse_bool,
}


def read_config_file(path: str) -> dict:
    """Parse `key = value` lines; keys may use dashes or underscores."""
    known = {f.name for f in fields(RunConfig)} - {"command"}
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in known:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = value
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    s = argparse.SUPPRESS
    common.add_argument("--m", type=int, default=s, help="bits per label (2**m-ASK)")
    common.add_argument("--snr-min", type=float, default=s)
    common.add_argument("--snr-max", type=float, default=s)
    common.add_argument("--snr-step", type=float, default=s)
    common.add_argument("--rates", default=s, help="comma-separated subset of " + ",".join(FUNCTIONALS))
    common.add_argument("--target-rate", type=float, default=s)
    common.add_argument("--quad-nodes", type=int, default=s, help="quadrature nodes per unit length")
    common.add_argument("--out", default=s, help="output file (default stdout)")
    common.add_argument("--format", choices=("csv", "json"), default=s)
    common.add_argument("--seed", type=int, default=s)
    common.add_argument("--config", default=s, help="plain-text 'key = value' config file")
    common.add_argument("--dist-file", default=s, help="label distribution file")
    common.add_argument("--channel-file", default=s, help="discrete channel file")
    common.add_argument("-v", "--verbose", action="count", default=0)

    parser = argparse.ArgumentParser(prog="shapedbmd", description="Achievable rates for bit-metric decoding.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("rate-curve", parents=[common], help="rates over an SNR grid (AWGN, 2**m-ASK)")
    sub.add_parser("gap", parents=[common], help="SNR gaps to ASK capacity at a target rate")
    sub.add_parser("examples", parents=[common], help="check the two finite-alphabet examples")
    opt = sub.add_parser("optimize", parents=[common], help="optimized inputs over an SNR grid")
    opt.add_argument("--free-sign-bit", dest="symmetric", action="store_false", default=s,
                     help="let the bit-shaped search move the sign bit")
    sim = sub.add_parser("simulate", parents=[common], help="random-coding Monte Carlo")
    sim.add_argument("--channel", choices=("identity", "erase-all", "awgn"), default=s)
    sim.add_argument("--n-list", default=s, help="block lengths, comma-separated")
    sim.add_argument("--rate-list", default=s, help="code rates, comma-separated")
    sim.add_argument("--trials", type=int, default=s)
    sim.add_argument("--decoder", choices=DECODERS, default=s)
    sub.add_parser("rates", parents=[common], help="all rate functionals for one channel and distribution")
    return parser


def resolve_config(argv: Optional[Sequence[str]] = None) -> tuple[RunConfig, int]:
    args = vars(build_parser().parse_args(argv))
    verbose = args.pop("verbose", 0)
    command = args.pop("command")
    merged: dict = {}
    if "config" in args:
        merged.update(read_config_file(args.pop("config")))
    merged.update(args)
    cfg = RunConfig(command=command)
    for key, value in merged.items():
        if value is None:
            continue
        conv = CONVERTERS.get(key)
        setattr(cfg, key, conv(value) if conv else value)
    if not cfg.rates:
        raise ValueError("--rates must name at least one rate")
    return cfg, verbose


def write_output(cfg: RunConfig, text: str) -> None:
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)


def render(cfg: RunConfig, header: Sequence[str], rows: list[dict]) -> str:
    if cfg.format == "json":
        return json.dumps(rows, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([row[h] if isinstance(row[h], str) else fmt(row[h]) for h in header])
    return buf.getvalue()


def _jsonable(row: dict) -> dict:
    out = {}
    for k, v in row.items():
        if isinstance(v, str) or v is None:
            out[k] = v
        elif isinstance(v, (list, tuple)):
            out[k] = [float(fmt(x)) for x in v]
        else:
            out[k] = float(fmt(v))
    return out


def _fixed_point_rates(d: JointDistribution, power: float, nodes: int) -> dict:
    ch = AwgnChannel(ask_brgc(d.m, delta_for_power(d.m, d, power)), nodes)
    ev = _Eval(ch, d)
    return {
        "capacity": ev.mutual_information(),
        "shaped-bmd": max(0.0, _bmd_raw(ev)),
        "sgmi": _sgmi(ev, _log_q_bmd(ch, d, ev.y)).rate,
    }


def cmd_rate_curve(cfg: RunConfig) -> int:
    wanted = [c for c in COLUMNS if c in cfg.rates]
    fixed = load_distribution(cfg.dist_file) if cfg.dist_file else None
    if fixed is not None and fixed.m != cfg.m:
        raise ValueError(f"distribution file has m={fixed.m}, expected {cfg.m}")
    rows = []
    warm = None
    for snr in cfg.snr_grid():
        power = 10 ** (snr / 10)
        row: dict = {"snr_db": float(snr)}
        if {"capacity", "shaped-bmd", "sgmi"} & set(wanted):
            if fixed is not None:
                vals = _fixed_point_rates(fixed, power, cfg.quad_nodes)
            else:
                vals = capacity_point_rates(capacity_mb(cfg.m, power, cfg.quad_nodes), cfg.quad_nodes)
            row.update({k: v for k, v in vals.items() if k in wanted})
        if "bitshaped-bmd" in wanted:
            op = bitshaped_search(cfg.m, power, cfg.quad_nodes, seed=cfg.seed, init=[warm] if warm else None)
            warm = op.params["bit_probs"]
            row["bitshaped-bmd"] = op.rate
        if {"uniform-bmd", "uniform-sgmi"} & set(wanted):
            op = uniform_point(cfg.m, power, cfg.quad_nodes)
            row["uniform-bmd"] = op.rate
            if "uniform-sgmi" in wanted:
                row["uniform-sgmi"] = _fixed_point_rates(op.distribution, power, cfg.quad_nodes)["sgmi"]
        logger.info("snr %.3f dB: %s", snr, {k: round(v, 6) for k, v in row.items()})
        rows.append({k.replace("-", "_"): v for k, v in row.items() if k == "snr_db" or k in wanted})
    header = ["snr_db"] + [c.replace("-", "_") for c in wanted]
    if cfg.format == "json":
        rows = [_jsonable(r) for r in rows]
    write_output(cfg, render(cfg, header, rows))
    return 0


def gap_report(cfg: RunConfig) -> list[dict]:
    """SNR at the target rate for each requested functional and its gap to capacity."""
    if cfg.target_rate is None:
        raise ValueError("gap needs --target-rate")
    nodes, m, target = cfg.quad_nodes, cfg.m, cfg.target_rate
    snrs = {"capacity": snr_at_rate("capacity", m, target, nodes, cfg.seed)}
    order = [c for c in COLUMNS if c in cfg.rates and c != "capacity"]
    if "bitshaped-bmd" in order and "uniform-bmd" not in order:
        order.insert(order.index("bitshaped-bmd"), "uniform-bmd")
    for name in [c for c in order if c != "bitshaped-bmd"]:
        snrs[name] = snr_at_rate(name, m, target, nodes, cfg.seed)
    if "bitshaped-bmd" in order:
        # capacity and uniform bits bound the bit-shaped rate from either side
        snrs["bitshaped-bmd"] = snr_at_rate(
            "bitshaped-bmd", m, target, nodes, cfg.seed, bracket=(snrs["capacity"], snrs["uniform-bmd"])
        )
    names = ["capacity"] + [c for c in COLUMNS if c in snrs and c != "capacity" and (c in cfg.rates)]
    return [{"functional": n, "snr_db": snrs[n], "gap_db": snrs[n] - snrs["capacity"]} for n in names]


def cmd_gap(cfg: RunConfig) -> int:
    rows = gap_report(cfg)
    if cfg.format == "json":
        rows = [_jsonable(r) for r in rows]
    write_output(cfg, render(cfg, ["functional", "snr_db", "gap_db"], rows))
    return 0


def example_checks() -> list[dict]:
    """The two four-input examples: identity and erase-all channels."""
    dep = JointDistribution.from_mapping(2, {"01": 0.5, "10": 0.5})
    rows = []
    cases = [
        ("identity", identity_channel_2bit(), "dependent P(01)=P(10)=1/2", dep, 1.0, 1.0),
        ("identity", identity_channel_2bit(), "independent P_B1(0)=P_B2(1)=1", JointDistribution.point_mass(2, 0b01), 0.0, 0.0),
        ("identity", identity_channel_2bit(), "independent P_B1(1)=P_B2(0)=1", JointDistribution.point_mass(2, 0b10), 0.0, 0.0),
        ("erase-all", erase_all_channel_2bit(), "dependent P(01)=P(10)=1/2", dep, -1.0, 0.0),
    ]
    for chname, ch, dname, d, want_raw, want_clipped in cases:
        raw, clipped = rate_bmd(ch, d)
        ok = abs(raw - want_raw) <= EXAMPLE_TOL and abs(clipped - want_clipped) <= EXAMPLE_TOL
        rows.append({
            "channel": chname,
            "distribution": dname,
            "bmd_raw": raw,
            "bmd": clipped,
            "expected_raw": want_raw,
            "expected_bmd": want_clipped,
            "lm_instance": rate_lm_instance(ch, d),
            "status": "ok" if ok else "MISMATCH",
        })
    return rows


def cmd_examples(cfg: RunConfig) -> int:
    rows = example_checks()
    header = ["channel", "distribution", "bmd_raw", "bmd", "expected_raw", "expected_bmd", "lm_instance", "status"]
    out = rows if cfg.format == "csv" else [{k: (v if isinstance(v, str) else float(fmt(v))) for k, v in r.items()} for r in rows]
    write_output(cfg, render(cfg, header, out))
    return 0 if all(r["status"] == "ok" for r in rows) else 1


def cmd_optimize(cfg: RunConfig) -> int:
    wanted = [c for c in ("capacity", "bitshaped-bmd", "uniform-bmd") if c in cfg.rates]
    if not wanted:
        raise ValueError("optimize supports --rates capacity, bitshaped-bmd, uniform-bmd")
    rows = []
    warm = None
    for snr in cfg.snr_grid():
        power = 10 ** (snr / 10)
        for name in wanted:
            if name == "capacity":
                op = capacity_mb(cfg.m, power, cfg.quad_nodes)
            elif name == "bitshaped-bmd":
                op = bitshaped_search(cfg.m, power, cfg.quad_nodes, seed=cfg.seed,
                                      symmetric=cfg.symmetric, init=[warm] if warm else None)
                warm = op.params["bit_probs"]
            else:
                op = uniform_point(cfg.m, power, cfg.quad_nodes)
            row = {"snr_db": float(snr), "functional": name, "rate": op.rate, "delta": op.delta}
            row.update({f"p{a}": p for a, p in enumerate(op.distribution.probs)})
            rows.append(row)
    header = ["snr_db", "functional", "rate", "delta"] + [f"p{a}" for a in range(1 << cfg.m)]
    if cfg.format == "json":
        rows = [_jsonable(r) for r in rows]
    write_output(cfg, render(cfg, header, rows))
    return 0


def _simulation_channel(cfg: RunConfig):
    if cfg.channel_file:
        return load_discrete_channel(cfg.channel_file)
    if cfg.channel == "identity":
        return identity_channel_2bit()
    if cfg.channel == "erase-all":
        return erase_all_channel_2bit()
    return None


def cmd_simulate(cfg: RunConfig) -> int:
    if not cfg.n_list:
        raise ValueError("simulate needs a non-empty --n-list")
    if not cfg.rate_list:
        raise ValueError("simulate needs a non-empty --rate-list")
    ch = _simulation_channel(cfg)
    m = ch.m if ch is not None else cfg.m
    d = load_distribution(cfg.dist_file) if cfg.dist_file else JointDistribution.uniform(m)
    if ch is None:
        # AWGN at --snr-min with the distribution scaled to that power
        ch = AwgnChannel(ask_brgc(m, delta_for_power(m, d, 10 ** (cfg.snr_min / 10))), cfg.quad_nodes)
    results = rate_sweep(ch, d, cfg.n_list, cfg.rate_list, cfg.trials, cfg.seed, cfg.decoder)
    if cfg.format == "json":
        text = json.dumps([
            {"n": r.n, "rate": float(fmt(r.rate)), "trials": r.trials, "errors": r.errors,
             "fer": float(fmt(r.frame_error_rate)), "ties": r.ties} for r in results
        ], indent=2) + "\n"
    else:
        text = results_to_csv(results)
    write_output(cfg, text)
    return 0


def cmd_rates(cfg: RunConfig) -> int:
    d = load_distribution(cfg.dist_file) if cfg.dist_file else None
    if cfg.channel_file:
        ch = load_discrete_channel(cfg.channel_file)
        d = d or JointDistribution.uniform(ch.m)
    else:
        d = d or JointDistribution.uniform(cfg.m)
        ch = AwgnChannel(ask_brgc(d.m, delta_for_power(d.m, d, 10 ** (cfg.snr_min / 10))), cfg.quad_nodes)
    rep = rate_report(ch, d).as_dict()
    rows = [{k: v for k, v in rep.items() if k not in ("distribution", "per_bit_mi")}]
    if cfg.format == "json":
        rep = {k: (v if not isinstance(v, float) else float(fmt(v))) for k, v in rep.items()}
        rep["per_bit_mi"] = [float(fmt(v)) for v in rep["per_bit_mi"]]
        write_output(cfg, json.dumps(rep, indent=2) + "\n")
    else:
        write_output(cfg, render(cfg, list(rows[0]), rows))
    return 0


COMMANDS = {
    "rate-curve": cmd_rate_curve,
    "gap": cmd_gap,
    "examples": cmd_examples,
    "optimize": cmd_optimize,
    "simulate": cmd_simulate,
    "rates": cmd_rates,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        cfg, verbose = resolve_config(argv)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    logging.basicConfig(level=logging.WARNING - 10 * min(verbose, 2), format="%(message)s")
    try:
        return COMMANDS[cfg.command](cfg)
    except ArithmeticError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
