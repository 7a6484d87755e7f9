"""
Command-line front end.

Every subcommand prints one table, as CSV (default) or JSON, to stdout or to
``--out``. Floats are written with 17 significant digits so that tables
round-trip exactly; identical invocations give byte-identical output.

Exit codes: 0 on success, 1 when ``verify`` finds a failing check, 2 on a
configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from qwlab import __version__, genfun, pathsum, series, stationary
from qwlab.checks import CHECKS, run_checks
from qwlab.errors import QWLabError
from qwlab.walk import (
    Amplitude2,
    CoinField,
    CoinMatrix,
    HADAMARD,
    cesaro_average,
    evolve,
    measure,
    point_mass,
)

MODELS = ("one-defect", "wojcik", "hadamard", "custom")


class ConfigError(Exception):
    """Invalid command-line configuration (exit code 2)."""


# -- parsing helpers -------------------------------------------------------

_ANGLE = re.compile(r"^\s*([-+]?\d*\.?\d*)\s*\*?\s*pi\s*(?:/\s*(\d+\.?\d*))?\s*$")


def parse_angle(text: str) -> float:
    """Radians as a float literal, or a multiple of pi such as ``pi/6`` or ``0.4*pi``."""
    try:
        return float(text)
    except ValueError:
        pass
    m = _ANGLE.match(text)
    if not m:
        raise argparse.ArgumentTypeError(f"not an angle in radians: {text!r}")
    mult = m.group(1)
    k = float(mult) if mult not in ("", "+", "-") else (-1.0 if mult == "-" else 1.0)
    den = float(m.group(2)) if m.group(2) else 1.0
    return k * math.pi / den


def parse_complex(text: str) -> complex:
    """Python complex literal; ``i`` is accepted in place of ``j``."""
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def _entry(v: Any) -> complex:
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, str):
        return parse_complex(v)
    return complex(v)


def _coin_from_json(m: Any) -> CoinMatrix:
    if not (isinstance(m, list) and len(m) == 2 and all(isinstance(r, list) and len(r) == 2 for r in m)):
        raise ConfigError("a coin must be a 2x2 nested list")
    return CoinMatrix(_entry(m[0][0]), _entry(m[0][1]), _entry(m[1][0]), _entry(m[1][1]))


def load_coin_file(path: str) -> CoinField:
    """Custom coin field from JSON: ``{"default": [[a, b], [c, d]], "sites": {"0": [[...]]}}``.

    Entries are numbers, ``[re, im]`` pairs or complex strings such as
    ``"0.6+0.8j"``. ``default`` is optional (Hadamard).
    """
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        default = _coin_from_json(data["default"]) if "default" in data else HADAMARD
        table = {int(k): _coin_from_json(v) for k, v in data.get("sites", {}).items()}
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError,
            argparse.ArgumentTypeError) as exc:
        raise ConfigError(f"cannot load coin file {path!r}: {exc}") from None
    return CoinField.custom(table, default)


@dataclass(frozen=True)
class RunConfig:
    model: str
    xi: float | None
    phi: float | None
    qubit: Amplitude2
    steps: int
    window: int | None
    xmax: int | None
    fmt: str
    out: str | None
    coin_file: str | None

    def field(self) -> CoinField:
        if self.model == "one-defect":
            return CoinField.one_defect(self.require_xi())
        if self.model == "wojcik":
            if self.phi is None:
                raise ConfigError("--model wojcik needs --phi")
            return CoinField.wojcik(self.phi)
        if self.model == "hadamard":
            return CoinField.hadamard()
        if self.coin_file is None:
            raise ConfigError("--model custom needs --coin-file")
        return load_coin_file(self.coin_file)

    def require_xi(self) -> float:
        if self.xi is None:
            raise ConfigError("this command needs --xi")
        if not (0.0 < self.xi < math.pi / 2):
            raise ConfigError(f"--xi must lie in the open interval (0, pi/2) = (0, {math.pi / 2!r}); "
                              f"got {self.xi!r}")
        return self.xi

    def require_one_defect(self) -> float:
        if self.model != "one-defect":
            raise ConfigError(f"this command supports only --model one-defect, not {self.model!r}")
        return self.require_xi()

    def metadata(self, command: str) -> dict:
        return {
            "command": command,
            "model": self.model,
            "xi": self.xi,
            "phi": self.phi,
            "qubit": [[self.qubit.left.real, self.qubit.left.imag],
                      [self.qubit.right.real, self.qubit.right.imag]],
            "N": self.steps,
            "version": __version__,
        }


def config_from_args(args: argparse.Namespace) -> RunConfig:
    alpha, beta = args.alpha, args.beta
    norm = math.hypot(abs(alpha), abs(beta))
    if norm == 0:
        raise ConfigError("the initial qubit must be nonzero")
    if args.steps < 1:
        raise ConfigError("--steps must be at least 1")
    if args.model == "one-defect" and args.xi is None:
        args.xi = math.pi / 6
    return RunConfig(
        model=args.model, xi=args.xi, phi=args.phi,
        qubit=Amplitude2.normalized(alpha, beta),
        steps=args.steps, window=args.window, xmax=args.xmax,
        fmt=args.format, out=args.out, coin_file=args.coin_file,
    )


# -- output ----------------------------------------------------------------

def _fmt(v: Any) -> str:
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _jsonable(v: Any) -> Any:
    if isinstance(v, np.floating):
        return float(v)
    if isinstance(v, np.integer):
        return int(v)
    return v


@dataclass
class Table:
    columns: list[str]
    rows: list[list[Any]]
    footer: list[list[Any]] | None = None

    def render(self, fmt: str, metadata: dict) -> str:
        if fmt == "json":
            doc = {
                "metadata": metadata,
                "columns": self.columns,
                "rows": [{c: _jsonable(v) for c, v in zip(self.columns, r)} for r in self.rows],
            }
            if self.footer:
                doc["footer"] = [{c: _jsonable(v) for c, v in zip(self.columns, r)} for r in self.footer]
            return json.dumps(doc, indent=2) + "\n"
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows + (self.footer or []):
            w.writerow([_fmt(v) for v in r])
        return buf.getvalue()


# -- commands --------------------------------------------------------------

def cmd_simulate(cfg: RunConfig, args: argparse.Namespace) -> Table:
    n = cfg.steps
    window = cfg.window if cfg.window is not None else n
    state = point_mass(cfg.qubit, window)
    field = cfg.field()
    rows = []
    times = range(0, n + 1, args.every) if args.every else [n]
    t_prev = 0
    for t in times:
        state = evolve(state, field, t - t_prev)
        t_prev = t
        prof = measure(state)
        for x, mu in zip(prof.xs, prof.values):
            rows.append([t, int(x), float(mu)])
    return Table(["n", "x", "mu"], rows)


def cmd_cesaro(cfg: RunConfig, args: argparse.Namespace) -> Table:
    prof = cesaro_average(cfg.field(), cfg.qubit, cfg.steps, cfg.window)
    xmax = cfg.xmax if cfg.xmax is not None else cfg.steps
    rows = [[x, float(prof[x])] for x in range(-xmax, xmax + 1)]
    return Table(["x", "mu_bar_cesaro"], rows)


def cmd_stationary(cfg: RunConfig, args: argparse.Namespace) -> Table:
    xi = cfg.require_one_defect()
    xmax = cfg.xmax if cfg.xmax is not None else 10
    localized = xi < math.pi / 4
    rows = []
    for x in range(-xmax, xmax + 1):
        prob = stationary.stationary_prob_measure(xi, x) if localized else float("nan")
        rows.append([x, stationary.stationary_measure(xi, args.c_modulus, x), prob])
    footer = None
    if localized:
        footer = [["total", stationary.stationary_total_mass(xi, args.c_modulus), 1.0]]
    return Table(["x", "mu", "mu_prob"], rows, footer)


def cmd_limit(cfg: RunConfig, args: argparse.Namespace) -> Table:
    xi = cfg.require_one_defect()
    xmax = cfg.xmax if cfg.xmax is not None else 10
    ces = cesaro_average(cfg.field(), cfg.qubit, cfg.steps)
    rows = []
    for x in range(-xmax, xmax + 1):
        closed = genfun.time_averaged_limit_measure(xi, x, cfg.qubit)
        residue = genfun.tal_residue_sum(xi, x, cfg.qubit)
        rows.append([x, closed, residue, float(ces[x]) if abs(x) <= cfg.steps else 0.0])
    total_closed = genfun.tal_total_mass(xi)
    if xi < math.pi / 4:
        q = 3 - 2 * math.sqrt(2) * math.sin(xi)
        if xmax >= 1:
            total_res = stationary.geometric_profile_total([r[2] for r in rows], xmax, rows[-1][2], 1 / q)
        else:
            # the geometric decay only starts at |x| = 1
            edge = genfun.tal_residue_sum(xi, 1, cfg.qubit)
            total_res = rows[0][2] + 2.0 * edge / (1.0 - 1 / q)
    else:
        total_res = 0.0
    footer = [["total", total_closed, total_res, math.fsum(r[3] for r in rows)]]
    return Table(["x", "mu_bar_closed", "mu_bar_residue", f"cesaro_{cfg.steps}"], rows, footer)


def cmd_return_prob(cfg: RunConfig, args: argparse.Namespace) -> Table:
    xi = cfg.require_one_defect()
    amps = pathsum.genfun_amplitudes(xi, cfg.qubit, cfg.steps)
    limit = pathsum.return_prob_limit(xi)
    rows = []
    for n in range(0, cfg.steps + 1, args.every or 1):
        pl, pr = abs(amps[n, 0]) ** 2, abs(amps[n, 1]) ** 2
        rows.append([n, float(pl), float(pr), float(pl + pr), limit])
    return Table(["n", "psiL_sq", "psiR_sq", "r2n", "asymptotic"], rows)


_SERIES = {
    "rstar": lambda order: series.rstar_series(order),
    "first-return-plus": lambda order: series.first_return_series_plus(order),
    "first-return-minus": lambda order: series.first_return_series_minus(order),
    "sqrt-one-plus-z4": lambda order: series.sqrt_one_plus_z4(order),
    "Z": lambda order: series.z_of_w_series(order),
}


def cmd_series(cfg: RunConfig, args: argparse.Namespace) -> Table:
    s = _SERIES[args.which](cfg.steps)
    rows = [[n, c.numerator, c.denominator] for n, c in enumerate(s.coeffs)]
    return Table(["n", "numerator", "denominator"], rows)


def _sweep_row(xi: float, qubit: Amplitude2, n: int) -> list:
    localized = xi < math.pi / 4
    amp = pathsum.return_amplitude_genfun(xi, qubit, n)
    return [
        xi,
        pathsum.return_prob_limit(xi),
        amp.norm_sq,
        genfun.time_averaged_limit_measure(xi, 0, qubit),
        genfun.tal_total_mass(xi),
        pathsum.theta0(xi).theta0 if localized else float("nan"),
    ]


def _thread_cap() -> int:
    raw = os.environ.get("QWLAB_THREADS", "")
    if not raw:
        return min(8, os.cpu_count() or 1)
    try:
        cap = int(raw)
    except ValueError:
        raise ConfigError(f"QWLAB_THREADS must be a positive integer, got {raw!r}") from None
    if cap < 1:
        raise ConfigError(f"QWLAB_THREADS must be a positive integer, got {raw!r}")
    return cap


def cmd_sweep(cfg: RunConfig, args: argparse.Namespace) -> Table:
    if cfg.model != "one-defect":
        raise ConfigError("sweep supports only --model one-defect")
    lo, hi = args.xi_min, args.xi_max
    for v in (lo, hi):
        if not (0.0 < v < math.pi / 2):
            raise ConfigError(f"sweep bounds must lie in the open interval (0, pi/2); got {v!r}")
    if args.points < 1:
        raise ConfigError("--points must be at least 1")
    grid = [float(v) for v in np.linspace(lo, hi, args.points)]
    with ThreadPoolExecutor(max_workers=_thread_cap()) as pool:
        # map keeps input order regardless of completion order
        rows = list(pool.map(lambda xi: _sweep_row(xi, cfg.qubit, cfg.steps), grid))
    return Table(["xi", "return_prob_limit", f"r2n_at_{cfg.steps}", "mu_bar_0",
                  "mu_bar_total", "theta0"], rows)


def cmd_verify(cfg: RunConfig, args: argparse.Namespace) -> Table:
    results = run_checks(negative_control=args.negative_control, only=args.check or None)
    rows = [[r.name, r.anchor, r.value, r.tolerance, "pass" if r.passed else "FAIL"] for r in results]
    return Table(["check", "result", "value", "tolerance", "status"], rows)


COMMANDS = {
    "simulate": (cmd_simulate, "evolve from a point mass and print the position measure"),
    "cesaro": (cmd_cesaro, "Cesaro average of the position measures over N steps"),
    "stationary": (cmd_stationary, "closed-form stationary measure of the one-defect walk"),
    "limit": (cmd_limit, "time-averaged limit measure: closed form, residue sum, Cesaro estimate"),
    "return-prob": (cmd_return_prob, "return probability at the origin at times 2n"),
    "series": (cmd_series, "exact rational coefficients of the first-return series"),
    "verify": (cmd_verify, "run the invariant suite and print a pass/fail table"),
    "sweep": (cmd_sweep, "localization quantities over a grid of defect angles"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", choices=MODELS, default="one-defect")
    common.add_argument("--xi", type=parse_angle, default=None,
                        help="defect angle in radians (pi/6 style also accepted); default pi/6")
    common.add_argument("--phi", type=float, default=None, help="Wojcik phase, coin omega*H with omega = exp(2 pi i phi)")
    common.add_argument("--alpha", type=parse_complex, default=1.0 + 0j, help="qubit L component")
    common.add_argument("--beta", type=parse_complex, default=0j, help="qubit R component")
    common.add_argument("--steps", "-N", type=int, default=100)
    common.add_argument("--window", type=int, default=None)
    common.add_argument("--xmax", type=int, default=None)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", default=None, help="write the table here instead of stdout")
    common.add_argument("--coin-file", default=None, help="JSON coin table for --model custom")

    parser = argparse.ArgumentParser(prog="qwlab", description="One-defect quantum walk toolkit.")
    parser.add_argument("--version", action="version", version=f"qwlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    subs = {}
    for name, (_, help_text) in COMMANDS.items():
        subs[name] = sub.add_parser(name, parents=[common], help=help_text, description=help_text)
    subs["simulate"].add_argument("--every", type=int, default=0,
                                  help="emit the profile every k steps instead of only at the end")
    subs["return-prob"].add_argument("--every", type=int, default=0, help="row stride in n")
    subs["stationary"].add_argument("--c-modulus", type=float, default=1.0,
                                    help="|c| in the unnormalized measure")
    subs["series"].add_argument("--which", choices=sorted(_SERIES), default="rstar")
    subs["sweep"].add_argument("--xi-min", type=parse_angle, default=0.05)
    subs["sweep"].add_argument("--xi-max", type=parse_angle, default=math.pi / 2 - 0.05)
    subs["sweep"].add_argument("--points", type=int, default=16)
    subs["verify"].add_argument("--negative-control", action="store_true",
                                help="perturb the stationary eigenvalue by 1%%; the suite must fail")
    subs["verify"].add_argument("--check", action="append", choices=[c[0] for c in CHECKS],
                                help="run only this check (repeatable)")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        if args.command in ("simulate", "return-prob") and getattr(args, "every", 0) < 0:
            raise ConfigError("--every must be nonnegative")
        if args.command == "simulate" and cfg.window is not None and cfg.window < cfg.steps:
            raise ConfigError(f"--window {cfg.window} is smaller than --steps {cfg.steps}")
        table = COMMANDS[args.command][0](cfg, args)
    except (ConfigError, QWLabError, ValueError) as exc:
        print(f"qwlab {args.command}: error: {exc}", file=sys.stderr)
        return 2
    text = table.render(cfg.fmt, cfg.metadata(args.command))
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.command == "verify":
        return 0 if all(r[-1] == "pass" for r in table.rows) else 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
