"""Command-line scenarios with reproducible CSV/JSON output.

Usage::

    funcmech free --q0 0 --p0 1 --a 1 --b 1 --t 0,1,2,5
    funcmech correction --lambda 0.1 --q0 1 --p0 0 --t 0.1 --eps 0.2,0.1,0.05
    funcmech box --t 5,10,20,50 --format json
    funcmech quantum --a 0.1 --b 1 --hbar 0.1 --t 0,1,5
    funcmech flow --lambda 0.1 --q0 1 --p0 0 --t 0,1,2

Values come from (highest precedence first) command-line flags, the
``--config`` file (JSON or YAML, same keys as the flags), and per-scenario
defaults.  Without ``--out`` the output is written to
``$FUNCMECH_OUTPUT_DIR/<scenario>.<format>`` (current directory if unset).

Exit codes: 0 success, 1 invalid input, 2 numerical failure or a reported
tolerance above its bound.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import math
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np
import yaml

from . import box_dynamics as box
from . import characteristic_flow as cf
from . import newton_corrections as nc
from . import phase_density as pd
from . import quantum_bridge as qb
from .errors import NumericalFailure, ValidationError

log = logging.getLogger("funcmech")

SCENARIOS = ("free", "box", "correction", "quantum", "flow")
OUTPUT_DIR_ENV = "FUNCMECH_OUTPUT_DIR"

COMMON_DEFAULTS: dict[str, Any] = {
    "mass": 1.0,
    "hbar": 1.0,
    "lambda": 0.0,
    "k": 0.0,
    "eps": [0.2, 0.1, 0.05],
    "order": 40,
    "trunc": None,
    "fd_step": 1e-3,
    "seed": 12345,
    "smoothing": 0.05,
    "grid": 512,
    "mc_samples": 0,
    "format": "csv",
    "out": None,
}

SCENARIO_DEFAULTS: dict[str, dict[str, Any]] = {
    "free": {"q0": 0.0, "p0": 1.0, "a": 1.0, "b": 1.0, "t": [0.0, 1.0, 2.0, 5.0]},
    "box": {"q0": 0.5, "p0": 0.0, "a": 0.1, "b": 1.0, "t": [5.0, 10.0, 20.0, 50.0]},
    "correction": {"q0": 1.0, "p0": 0.0, "a": 1.0, "b": 1.0, "lambda": 0.1, "t": [0.1]},
    "quantum": {"q0": 0.5, "p0": 0.0, "a": 0.1, "b": 1.0, "hbar": 0.1, "t": [0.0, 1.0, 5.0]},
    "flow": {"q0": 1.0, "p0": 0.0, "a": 1.0, "b": 1.0, "lambda": 0.1, "t": [0.0, 1.0, 2.0, 5.0]},
}

FLOAT_KEYS = ("q0", "p0", "a", "b", "mass", "lambda", "hbar", "k", "fd_step", "smoothing")
INT_KEYS = ("order", "trunc", "seed", "grid", "mc_samples")
LIST_KEYS = ("t", "eps")
STR_KEYS = ("out", "format")
CONFIG_KEYS = frozenset(FLOAT_KEYS + INT_KEYS + LIST_KEYS + STR_KEYS + ("scenario",))

# bounds on the tolerances each run reports
BOUNDS = {
    "normalization": 1e-6,
    "var_q_rel": 1e-6,
    "box_normalization": 1e-9,
    "energy_drift": 1e-8,
    "reversibility": 1e-8,
    "boundary": 1e-8,
    "unitarity": 1e-6,
    "coincidence": 1e-10,
    "wigner": 1e-10,
}


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str
    q0: float
    p0: float
    a: float
    b: float
    mass: float
    lam: float
    hbar: float
    k: float
    t: tuple[float, ...]
    eps: tuple[float, ...]
    order: int
    trunc: int | None
    fd_step: float
    seed: int
    smoothing: float
    grid: int
    mc_samples: int
    out: str | None
    format: str

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ValidationError(f"unknown scenario {self.scenario!r}", key="scenario")
        for name in ("q0", "p0", "lam", "k"):
            if not math.isfinite(getattr(self, name)):
                raise ValidationError(f"{_flag(name)} must be finite", key=_flag(name))
        for name in ("a", "b", "mass", "hbar", "fd_step", "smoothing"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValidationError(f"{name} must be positive, got {v}", key=name)
        if not self.t or any(not math.isfinite(v) for v in self.t):
            raise ValidationError("t must be a non-empty list of finite times", key="t")
        if self.scenario in ("box", "quantum") and any(v < 0 for v in self.t):
            raise ValidationError("t must be non-negative for the box scenarios", key="t")
        if self.scenario == "correction":
            cf._check_epsilons(self.eps)
        if self.order < 2:
            raise ValidationError("order must be >= 2", key="order")
        if self.trunc is not None and self.trunc < 1:
            raise ValidationError("trunc must be >= 1", key="trunc")
        if self.grid < 2:
            raise ValidationError("grid must be >= 2", key="grid")
        if self.mc_samples < 0:
            raise ValidationError("mc_samples must be >= 0", key="mc_samples")
        if self.format not in ("csv", "json"):
            raise ValidationError(f"format must be csv or json, got {self.format!r}", key="format")
        if self.scenario == "box":
            box.BoxState(self.gaussian(), self.mass)
        else:
            self.gaussian()

    def gaussian(self) -> pd.GaussianState:
        return pd.GaussianState(self.q0, self.p0, self.a, self.b)

    def resolved(self) -> dict[str, Any]:
        d = dataclasses.asdict(self)
        d["lambda"] = d.pop("lam")
        d["t"] = list(self.t)
        d["eps"] = list(self.eps)
        return d


def _flag(name: str) -> str:
    return "lambda" if name == "lam" else name


@dataclass
class RunReport:
    scenario: str
    config: dict[str, Any]
    tables: dict[str, dict[str, list]] = field(default_factory=dict)
    checks: dict[str, tuple[float, float]] = field(default_factory=dict)
    wall_time: float = 0.0

    @property
    def ok(self) -> bool:
        return all(achieved <= bound for achieved, bound in self.checks.values())

    def check(self, name: str, achieved: float, bound: float | None = None) -> None:
        bound = BOUNDS[name] if bound is None else bound
        prev = self.checks.get(name)
        achieved = float(achieved)
        if math.isnan(achieved):
            achieved = math.inf
        if prev is not None:
            achieved = max(prev[0], achieved)
        self.checks[name] = (achieved, bound)


# --- configuration -----------------------------------------------------------


def _parse_list(key: str, value) -> tuple[float, ...]:
    if isinstance(value, (int, float)):
        return (float(value),)
    if isinstance(value, str):
        parts = [v for v in value.replace(" ", "").split(",") if v]
    else:
        parts = list(value)
    try:
        return tuple(float(v) for v in parts)
    except (TypeError, ValueError):
        raise ValidationError(f"{key} must be a comma-separated list of numbers, got {value!r}", key=key) from None


def _coerce(key: str, value):
    if value is None:
        return None
    try:
        if key in FLOAT_KEYS:
            if isinstance(value, bool):
                raise ValueError
            return float(value)
        if key in INT_KEYS:
            if isinstance(value, bool) or float(value) != int(float(value)):
                raise ValueError
            return int(float(value))
    except (TypeError, ValueError):
        raise ValidationError(f"{key} has invalid value {value!r}", key=key) from None
    if key in LIST_KEYS:
        return _parse_list(key, value)
    return str(value)


def load_config_file(path: str | os.PathLike) -> dict[str, Any]:
    """Read a JSON or YAML mapping with the same keys as the flags."""
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read config file {p}: {exc}", key="config") from None
    try:
        data = json.loads(text) if p.suffix == ".json" else yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise ValidationError(f"cannot parse config file {p}: {exc}", key="config") from None
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ValidationError("config file must hold a mapping", key="config")
    data = {str(k).replace("-", "_"): v for k, v in data.items()}
    unknown = sorted(set(data) - CONFIG_KEYS)
    if unknown:
        raise ValidationError(f"unknown config key(s): {', '.join(unknown)}", key=unknown[0])
    return data


def build_config(scenario: str, flags: dict[str, Any], file_values: dict[str, Any] | None = None) -> ScenarioConfig:
    """Merge flags over file values over defaults and validate."""
    if scenario not in SCENARIOS:
        raise ValidationError(f"unknown scenario {scenario!r}", key="scenario")
    file_values = dict(file_values or {})
    file_scenario = file_values.pop("scenario", None)
    if file_scenario is not None and file_scenario != scenario:
        raise ValidationError(f"config file is for scenario {file_scenario!r}, not {scenario!r}", key="scenario")
    merged: dict[str, Any] = {**COMMON_DEFAULTS, **SCENARIO_DEFAULTS[scenario]}
    for source in (file_values, flags):
        for key, value in source.items():
            if value is not None:
                merged[key] = _coerce(key, value)
    for key in LIST_KEYS:
        merged[key] = _parse_list(key, merged[key])
    merged["lam"] = merged.pop("lambda")
    return ScenarioConfig(scenario=scenario, **merged)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(message, key=None)


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="funcmech", description="Phase-space density scenarios.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="scenario", required=True, parser_class=_Parser)
    helps = {
        "free": "free-motion moments and coordinate marginals",
        "box": "particle in a box: uniformization and |p| limit",
        "correction": "mean-position corrections for the cubic force",
        "quantum": "quantum packet comparisons",
        "flow": "single trajectory with energy diagnostics",
    }
    for name in SCENARIOS:
        sp = sub.add_parser(name, help=helps[name])
        sp.add_argument("--config", help="JSON or YAML file with the same keys as the flags")
        for key in ("q0", "p0", "a", "b", "mass", "hbar", "k"):
            sp.add_argument(f"--{key}", dest=key)
        sp.add_argument("--lambda", dest="lambda")
        sp.add_argument("--t", dest="t", help="comma-separated times")
        sp.add_argument("--eps", dest="eps", help="comma-separated, decreasing widths")
        sp.add_argument("--order", dest="order", help="Gauss-Hermite points per dimension (default 40)")
        sp.add_argument("--trunc", dest="trunc", help="image-series truncation override")
        sp.add_argument("--fd-step", dest="fd_step")
        sp.add_argument("--seed", dest="seed")
        sp.add_argument("--smoothing", dest="smoothing")
        sp.add_argument("--grid", dest="grid", help="grid points for plot tables")
        sp.add_argument("--mc-samples", dest="mc_samples", help="Monte Carlo cross-check size (0 = off)")
        sp.add_argument("--out", dest="out")
        sp.add_argument("--format", dest="format", choices=("csv", "json"))
    return parser


def parse_config(argv: Sequence[str] | None = None) -> ScenarioConfig:
    args = make_parser().parse_args(argv)
    flags = {k: v for k, v in vars(args).items() if k not in ("scenario", "config", "verbose")}
    file_values = load_config_file(args.config) if args.config else None
    return build_config(args.scenario, flags, file_values)


# --- scenarios -----------------------------------------------------------------


def _free(cfg: ScenarioConfig, rep: RunReport) -> None:
    g = cfg.gaussian()
    rows = {k: [] for k in ("t", "mean_q", "mean_p", "var_q", "var_p", "var_q_numeric", "normalization_numeric")}
    grid = {"t": [], "q": [], "rho_c": []}
    for t in cfg.t:
        mom = pd.free_moments(g, cfg.mass, t)
        num = pd.numeric_moments(g, cfg.mass, t)
        for key, val in (
            ("t", t),
            ("mean_q", mom.mean_q),
            ("mean_p", mom.mean_p),
            ("var_q", mom.var_q),
            ("var_p", mom.var_p),
            ("var_q_numeric", num.var_q),
            ("normalization_numeric", num.normalization),
        ):
            rows[key].append(val)
        rep.check("var_q_rel", abs(num.var_q - mom.var_q) / mom.var_q)
        rep.check("normalization", abs(num.normalization - 1.0))
        marg = pd.free_coordinate_marginal(g, cfg.mass, t)
        qs = np.linspace(marg.center - 4 * marg.width, marg.center + 4 * marg.width, cfg.grid)
        grid["t"] += [t] * cfg.grid
        grid["q"] += qs.tolist()
        grid["rho_c"] += marg(qs).tolist()
    rep.tables["moments"] = rows
    rep.tables["marginal"] = grid


def _box(cfg: ScenarioConfig, rep: RunReport) -> None:
    g = cfg.gaussian()
    rows = {k: [] for k in ("t", "truncation", "sup_dev_uniform", "maxwell_linf", "normalization", "mean_p2")}
    qgrid = {"t": [], "q": [], "rho_c": []}
    pgrid = {"t": [], "p": [], "rho_a": [], "limit": []}
    xq, wq = pd._legendre_rule(0.0, 1.0, 400)
    p_max = 5.0 * g.b
    ps = np.linspace(p_max / cfg.grid, p_max, cfg.grid)
    pn, pw = pd._legendre_rule(0.0, abs(g.p0) + 10.0 * g.b, 800)
    limit = box.limiting_distributions(box.BoxState(g, cfg.mass))
    for t in cfg.t:
        n = box.required_truncation(g, cfg.mass, t) if cfg.trunc is None else cfg.trunc
        state = box.BoxState(g, cfg.mass, n)
        q = box.unit_grid(cfg.grid)
        rho_c = box.box_coordinate_marginal(state, t, q)
        rho_a = box.box_abs_momentum_marginal(state, t, ps)
        norm = float(wq @ box.box_coordinate_marginal(state, t, xq))
        rows["t"].append(t)
        rows["truncation"].append(n)
        rows["sup_dev_uniform"].append(float(np.max(np.abs(rho_c - 1.0))))
        rows["maxwell_linf"].append(float(np.max(np.abs(rho_a - limit.momentum_abs_limit(ps)))))
        rows["normalization"].append(norm)
        rows["mean_p2"].append(float(pw @ (pn**2 * box.box_abs_momentum_marginal(state, t, pn))))
        rep.check("box_normalization", abs(norm - 1.0))
        qgrid["t"] += [t] * q.size
        qgrid["q"] += q.tolist()
        qgrid["rho_c"] += rho_c.tolist()
        pgrid["t"] += [t] * ps.size
        pgrid["p"] += ps.tolist()
        pgrid["rho_a"] += rho_a.tolist()
        pgrid["limit"] += limit.momentum_abs_limit(ps).tolist()
    rep.tables["limits"] = rows
    rep.tables["coordinate"] = qgrid
    rep.tables["momentum"] = pgrid


def _correction(cfg: ScenarioConfig, rep: RunReport) -> None:
    system = nc.CubicForceSystem(cfg.lam, cfg.q0, cfg.p0)
    quad = cf.QuadratureSpec(order=cfg.order)
    cols = (
        "t",
        "epsilon",
        "mean_q_numeric",
        "q_newton",
        "correction_numeric",
        "correction_series",
        "ratio",
        "relative_gap",
        "in_regime",
    )
    rows = {k: [] for k in cols}
    if cfg.mc_samples:
        rows["mean_q_mc"] = []
        rows["mean_q_mc_stderr"] = []
    extra = {"t": [], "extrapolated_ratio": [], "series_ratio": []}
    for t in cfg.t:
        reports = nc.correction_study(system, cfg.eps, t, quad)
        for r in reports:
            for key in cols:
                rows[key].append(r.ratio if key == "ratio" else getattr(r, key))
            if cfg.mc_samples:
                mean, err = nc.monte_carlo_mean_q(system, r.epsilon, t, cfg.mc_samples, cfg.seed)
                rows["mean_q_mc"].append(mean)
                rows["mean_q_mc_stderr"].append(err)
        extra["t"].append(t)
        extra["extrapolated_ratio"].append(nc.extrapolated_ratio(reports) if len(reports) > 1 else reports[0].ratio)
        extra["series_ratio"].append(-0.25 * cfg.lam * t**2)
    rep.tables["corrections"] = rows
    rep.tables["extrapolation"] = extra


def _quantum(cfg: ScenarioConfig, rep: RunReport) -> None:
    g = cfg.gaussian()
    coinc = {"t": [], "max_difference": [], "condition_holds": []}
    for t in cfg.t:
        res = qb.coincidence_check(g, cfg.mass, cfg.hbar, [t])
        coinc["t"].append(t)
        coinc["max_difference"].append(res.max_difference)
        coinc["condition_holds"].append(res.condition_holds)
        if res.condition_holds:
            rep.check("coincidence", res.max_difference)
    packet = qb.QuantumPacket(cfg.q0, cfg.p0, cfg.a, cfg.hbar, cfg.mass)
    rng = np.random.default_rng(cfg.seed)
    wq = rng.uniform(cfg.q0 - 3 * cfg.a, cfg.q0 + 3 * cfg.a, 100)
    wp = rng.uniform(cfg.p0 - 3 * cfg.hbar / cfg.a, cfg.p0 + 3 * cfg.hbar / cfg.a, 100)
    wt = rng.uniform(0.0, max(cfg.t), 100)
    wig = float(np.max(np.abs(qb.wigner_gaussian(packet, wq, wp, wt) - qb.classical_joint_density(packet, wq, wp, wt))))
    rep.check("wigner", wig)
    boxrows = {"t": [], "truncation": [], "phi_at_0": [], "phi_at_1": [], "norm": []}
    norms = []
    for t in cfg.t:
        n = qb.required_box_truncation(packet, t) if cfg.trunc is None else cfg.trunc
        ends = np.abs(qb.box_wavefunction(packet, np.array([0.0, 1.0]), t, n))
        norm = qb.box_norm(packet, t)
        norms.append(norm)
        boxrows["t"].append(t)
        boxrows["truncation"].append(n)
        boxrows["phi_at_0"].append(float(ends[0]))
        boxrows["phi_at_1"].append(float(ends[1]))
        boxrows["norm"].append(norm)
        rep.check("boundary", float(ends.max()))
    rep.check("unitarity", max(norms) - min(norms))
    hbars = [cfg.hbar, cfg.hbar / 2, cfg.hbar / 4]
    semi = {"t": [], "hbar": [], "smoothed_l1": []}
    for t in cfg.t:
        packets = [qb.QuantumPacket(cfg.q0, cfg.p0, cfg.a, h, cfg.mass) for h in hbars]
        for h, d in zip(hbars, qb.semiclassical_compare(packets, t, cfg.smoothing)):
            semi["t"].append(t)
            semi["hbar"].append(h)
            semi["smoothed_l1"].append(d)
    rep.tables["coincidence"] = coinc
    rep.tables["box"] = boxrows
    rep.tables["semiclassical"] = semi
    rep.tables["wigner"] = {"max_difference": [wig]}


def _flow(cfg: ScenarioConfig, rep: RunReport) -> None:
    H = cf.HamiltonianSpec(masses=(cfg.mass,), potential=((0.0, 0.0, 0.5 * cfg.k, cfg.lam / 3.0),))
    x0 = cf.PhasePoint((cfg.q0,), (cfg.p0,))
    e0 = float(H.energy(*x0.arrays())[0])
    rows = {k: [] for k in ("t", "q", "p", "energy", "energy_drift", "steps", "reversibility_error")}
    for t in cfg.t:
        res = cf.flow(H, x0, t)
        back = cf.flow(H, res.endpoint, -t).endpoint
        rev = max(abs(back.q[0] - cfg.q0), abs(back.p[0] - cfg.p0))
        rows["t"].append(t)
        rows["q"].append(res.endpoint.q[0])
        rows["p"].append(res.endpoint.p[0])
        rows["energy"].append(float(H.energy(*res.endpoint.arrays())[0]))
        rows["energy_drift"].append(res.energy_drift)
        rows["steps"].append(res.steps_used)
        rows["reversibility_error"].append(rev)
        rep.check("energy_drift", res.energy_drift)
        rep.check("reversibility", rev)
    rep.tables["trajectory"] = rows
    rep.config["initial_energy"] = e0


RUNNERS = {"free": _free, "box": _box, "correction": _correction, "quantum": _quantum, "flow": _flow}


def run_scenario(cfg: ScenarioConfig) -> RunReport:
    """Run one scenario and collect its tables and tolerance checks (no I/O)."""
    rep = RunReport(cfg.scenario, cfg.resolved())
    start = time.perf_counter()
    RUNNERS[cfg.scenario](cfg, rep)
    rep.wall_time = time.perf_counter() - start
    return rep


# --- output --------------------------------------------------------------------


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if v is None:
        return ""
    return format(float(v), ".17g")


def _json_value(v):
    if isinstance(v, (list, tuple)):
        return [_json_value(x) for x in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        f = float(v)
        return f if math.isfinite(f) else None
    return v


def report_to_flat(rep: RunReport) -> dict[str, Any]:
    """Flat JSON object: config echo, ``<table>_<column>`` arrays, checks.

    Columns of the first table appear unprefixed as well.  Wall time is left
    out so that identical configurations produce identical files.
    """
    out: dict[str, Any] = {"scenario": rep.scenario}
    out.update({k: _json_value(v) for k, v in rep.config.items() if k != "scenario"})
    for i, (name, table) in enumerate(rep.tables.items()):
        for col, values in table.items():
            out[f"{name}_{col}"] = _json_value(values)
            if i == 0:
                out.setdefault(col, _json_value(values))
    for name, (achieved, bound) in rep.checks.items():
        out[f"check_{name}"] = _json_value(achieved)
        out[f"check_{name}_bound"] = bound
    out["ok"] = rep.ok
    return out


def write_csv(path: Path, table: dict[str, list]) -> None:
    cols = list(table)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(cols)
        for row in zip(*(table[c] for c in cols)):
            writer.writerow([_fmt(v) for v in row])


def output_path(cfg: ScenarioConfig) -> Path:
    if cfg.out:
        return Path(cfg.out)
    base = Path(os.environ.get(OUTPUT_DIR_ENV, "."))
    return base / f"{cfg.scenario}.{cfg.format}"


def emit(rep: RunReport, cfg: ScenarioConfig) -> list[Path]:
    """Write the report; CSV puts the first table at the output path and the rest beside it."""
    path = output_path(cfg)
    path.parent.mkdir(parents=True, exist_ok=True)
    if cfg.format == "json":
        path.write_text(json.dumps(report_to_flat(rep), indent=1) + "\n")
        return [path]
    written = []
    for i, (name, table) in enumerate(rep.tables.items()):
        target = path if i == 0 else path.with_name(f"{path.stem}_{name}{path.suffix or '.csv'}")
        write_csv(target, table)
        written.append(target)
    return written


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    logging.basicConfig(level=logging.INFO if ("-v" in argv or "--verbose" in argv) else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = parse_config(argv)
    except ValidationError as exc:
        key = f" [{exc.key}]" if exc.key else ""
        print(f"error{key}: {exc}", file=sys.stderr)
        return 1
    try:
        rep = run_scenario(cfg)
    except ValidationError as exc:
        key = f" [{exc.key}]" if exc.key else ""
        print(f"error{key}: {exc}", file=sys.stderr)
        return 1
    except NumericalFailure as exc:
        print(f"numerical failure: {exc} (achieved={exc.achieved}, bound={exc.bound})", file=sys.stderr)
        return 2
    paths = emit(rep, cfg)
    print(json.dumps({"config": _json_value_dict(rep.config), "outputs": [str(p) for p in paths]}, sort_keys=True))
    log.info("wall time %.3f s", rep.wall_time)
    failed = [(n, a, b) for n, (a, b) in rep.checks.items() if not a <= b]
    for name, achieved, bound in failed:
        print(f"tolerance exceeded: {name} = {achieved:.3e} > {bound:.1e}", file=sys.stderr)
    return 2 if failed else 0


def _json_value_dict(d: dict[str, Any]) -> dict[str, Any]:
    return {k: _json_value(v) for k, v in d.items()}
