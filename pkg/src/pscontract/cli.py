"""Command-line interface: configuration, suite orchestration and reports.

    pscontract verify --config run.json [--suite ID ...] [--seed N] [--out DIR]
    pscontract algebra inspect --realization sl3
    pscontract decompose --g '[[2, 1], [1, 1]]'
    pscontract contract sweep --config run.json [--out DIR]

Exit status: 0 when every selected check passes, 1 when some check fails,
2 for invalid input.
"""

from __future__ import annotations

import argparse
import datetime
import json
import re
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import contract as ct
from .errors import ConfigError, NonRegular, NotInBigCell
from .fiber import SpinFiber, sign_character, trivial_character
from .grp import bruhat, iwasawa, nbar_matrix
from .liealg import REALIZATIONS, get_realization
from .reps import PrincipalSeriesParams
from .suites import REGISTRY_VERSION, SUITE_IDS, SWEEP_SUITES, SuiteContext, run_suite

# ξ₁ defaults in a-coordinates (basis H_i = e_ii - e_{i+1,i+1}):
# sl2: H = diag(1, -1); sl3: diag(2, 1, -3); sl4: diag(3, 1, -1, -3)
DEFAULT_XI1 = {"sl2": [1.0], "sl3": [2.0, 3.0], "sl4": [3.0, 4.0, 3.0]}
CONFIG_KEYS = {"realization", "xi1", "xi2", "fiber", "seed", "tolerances", "r_grid", "suites", "output"}
DEFAULT_OUTPUT = {"json": "report.json", "csv": "sweeps.csv"}


@dataclass
class RunConfig:
    realization: str = "sl2"
    xi1: list = field(default_factory=lambda: list(DEFAULT_XI1["sl2"]))
    xi2: list = field(default_factory=list)
    fiber: str = "trivial-character"
    seed: int = 0
    tolerances: dict = field(default_factory=dict)
    r_grid: list = field(default_factory=lambda: list(ct.DEFAULT_R_GRID))
    suites: list = field(default_factory=lambda: list(SUITE_IDS))
    output: dict = field(default_factory=lambda: dict(DEFAULT_OUTPUT))


# ---------------------------------------------------------------------------
# configuration


def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool) and np.isfinite(x)


def parse_fiber(spec) -> object:
    """'trivial-character', 'sign-character' or 'spin-j' (j = 1/2, 1, 1.5, ...)."""
    if spec == "trivial-character":
        return trivial_character()
    if spec == "sign-character":
        return sign_character()
    m = re.fullmatch(r"spin-(\d+(?:/2|\.5|\.0)?)", str(spec))
    if m:
        j = float(Fraction(m.group(1)))
        if j > 0 and float(2 * j).is_integer():
            return SpinFiber(j)
    raise ValueError(f"fiber must be trivial-character, sign-character or spin-j with j a positive half-integer, got {spec!r}")


def load_config(doc) -> RunConfig:
    """Validate a JSON document; raises ConfigError listing every problem."""
    if not isinstance(doc, dict):
        raise ConfigError(["config must be a JSON object"])
    problems = []
    cfg = RunConfig()
    for key in sorted(set(doc) - CONFIG_KEYS):
        problems.append(f"unknown field {key!r}")

    real = doc.get("realization", cfg.realization)
    alg = None
    if real not in REALIZATIONS:
        problems.append(f"realization: must be one of {sorted(REALIZATIONS)}, got {real!r}")
    else:
        cfg.realization = real
        alg = get_realization(real)

    xi1 = doc.get("xi1", DEFAULT_XI1.get(real, []))
    if not isinstance(xi1, list) or not all(_is_number(v) for v in xi1):
        problems.append("xi1: must be a list of numbers (a-coordinates)")
    elif alg is not None:
        if len(xi1) != alg.dim_a:
            problems.append(f"xi1: expected {alg.dim_a} a-coordinates for {real}, got {len(xi1)}")
        elif not alg.is_regular(alg.subspaces["a"] @ np.asarray(xi1, dtype=float)):
            problems.append("xi1: regularity violated (some restricted root vanishes on xi1)")
        else:
            cfg.xi1 = [float(v) for v in xi1]

    xi2 = doc.get("xi2", [])
    if not isinstance(xi2, list) or not all(_is_number(v) for v in xi2):
        problems.append("xi2: must be a list of numbers (m-coordinates)")
    elif alg is not None and len(xi2) != alg.dim_m:
        problems.append(f"xi2: expected {alg.dim_m} m-coordinates for {real}, got {len(xi2)}")
    else:
        cfg.xi2 = [float(v) for v in xi2]

    fib = doc.get("fiber", cfg.fiber)
    try:
        parse_fiber(fib)
        cfg.fiber = fib
    except ValueError as exc:
        problems.append(f"fiber: {exc}")

    seed = doc.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        problems.append(f"seed: must be a non-negative integer, got {seed!r}")
    else:
        cfg.seed = seed

    tols = doc.get("tolerances", {})
    if not isinstance(tols, dict):
        problems.append("tolerances: must be an object mapping 'suite' or 'suite.check' to a number")
    else:
        for key, val in sorted(tols.items()):
            if key.split(".", 1)[0] not in SUITE_IDS:
                problems.append(f"tolerances: {key!r} does not name a registered suite")
            if not _is_number(val) or val < 0:
                problems.append(f"tolerances: value for {key!r} must be a non-negative number")
        cfg.tolerances = dict(tols)

    grid = doc.get("r_grid", cfg.r_grid)
    if not isinstance(grid, list) or not grid or not all(_is_number(v) for v in grid):
        problems.append("r_grid: must be a non-empty list of numbers")
    elif any(not 0 < v <= 1 for v in grid) or any(b >= a for a, b in zip(grid, grid[1:])):
        problems.append("r_grid: values must be strictly decreasing in (0, 1]")
    else:
        cfg.r_grid = [float(v) for v in grid]

    suites = doc.get("suites", cfg.suites)
    if not isinstance(suites, list) or not all(isinstance(s, str) for s in suites):
        problems.append("suites: must be a list of suite identifiers")
    else:
        unknown = [s for s in suites if s not in SUITE_IDS]
        if unknown:
            problems.append(f"suites: unknown identifiers {unknown}; registry v{REGISTRY_VERSION} has {list(SUITE_IDS)}")
        cfg.suites = [s for s in SUITE_IDS if s in suites]

    out = doc.get("output", cfg.output)
    if not isinstance(out, dict) or set(out) - {"json", "csv"} or not all(isinstance(v, str) for v in out.values()):
        problems.append("output: must be an object with optional string fields 'json' and 'csv'")
    else:
        cfg.output = {**DEFAULT_OUTPUT, **out}

    if problems:
        raise ConfigError(problems)
    return cfg


def read_config(path) -> RunConfig:
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError([f"cannot read config {path}: {exc.strerror}"]) from None
    except json.JSONDecodeError as exc:
        raise ConfigError([f"config is not valid JSON: {exc}"]) from None
    return load_config(doc)


def build_context(cfg: RunConfig) -> SuiteContext:
    alg = get_realization(cfg.realization)
    fiber = parse_fiber(cfg.fiber)
    # representation suites need a fibre of M acting on this realization's 𝔪
    rep_fiber = fiber if fiber.dim_m == alg.dim_m else trivial_character()
    xi1 = alg.subspaces["a"] @ np.asarray(cfg.xi1, dtype=float)
    try:
        params = PrincipalSeriesParams(alg, xi1, rep_fiber)
    except NonRegular as exc:
        raise ConfigError([f"xi1: {exc}"]) from None
    return SuiteContext(params, fiber, cfg.seed, tuple(cfg.r_grid), dict(cfg.tolerances))


# ---------------------------------------------------------------------------
# running and reporting


def _jsonable(x):
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, tuple):
        return list(x)
    raise TypeError(f"cannot serialize {type(x).__name__}")


def dumps(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, default=_jsonable) + "\n"


def run(cfg: RunConfig, out_dir=None, log=print):
    """Execute the selected suites; returns (exit status, report dict, sweep CSV text)."""
    ctx = build_context(cfg)
    results = {}
    sweeps = []
    for sid in cfg.suites:
        res = run_suite(sid, ctx)
        results[sid] = res.to_json()
        sweeps.extend(res.sweeps)
        log(f"{sid:8s} {results[sid]['status'].upper():4s} max_residual={results[sid]['max_residual']:.3e} "
            f"tolerance={results[sid]['tolerance']:.1e}")
    report = {
        "meta": {
            "registry_version": REGISTRY_VERSION,
            "realization": cfg.realization,
            "config": asdict(cfg),
            "representation_fiber": ctx.params.fiber.describe(),
            "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds"),
        },
        "suites": results,
    }
    csv_text = ct.reports_to_csv(sweeps)
    base = Path(out_dir) if out_dir is not None else Path(".")
    base.mkdir(parents=True, exist_ok=True)
    (base / cfg.output["json"]).write_text(dumps(report))
    (base / cfg.output["csv"]).write_text(csv_text)
    status = 0 if all(r["status"] == "pass" for r in results.values()) else 1
    return status, report, csv_text


# ---------------------------------------------------------------------------
# commands


def _cmd_verify(args) -> int:
    cfg = read_config(args.config)
    if args.suite is not None:
        unknown = [s for s in args.suite if s not in SUITE_IDS]
        if unknown:
            raise ConfigError([f"--suite: unknown identifiers {unknown}"])
        cfg.suites = [s for s in SUITE_IDS if s in args.suite]
    if args.seed is not None:
        if args.seed < 0:
            raise ConfigError(["--seed: must be a non-negative integer"])
        cfg.seed = args.seed
    status, _, _ = run(cfg, args.out)
    print("all checks passed" if status == 0 else "some checks FAILED")
    return status


def _cmd_inspect(args) -> int:
    if args.realization not in REALIZATIONS:
        raise ConfigError([f"--realization: must be one of {sorted(REALIZATIONS)}"])
    sys.stdout.write(dumps(get_realization(args.realization).to_json()))
    return 0


def _cmd_decompose(args) -> int:
    try:
        g = np.array(json.loads(args.g), dtype=float)
    except (json.JSONDecodeError, TypeError, ValueError):
        raise ConfigError(["--g: expected a JSON square matrix of numbers"]) from None
    if g.ndim != 2 or g.shape[0] != g.shape[1] or f"sl{g.shape[0]}" not in REALIZATIONS:
        raise ConfigError([f"--g: expected an n×n matrix with n in 2..4, got shape {list(g.shape)}"])
    if abs(np.linalg.det(g) - 1.0) > 1e-8:
        raise ConfigError([f"--g: determinant must be 1, got {np.linalg.det(g):.6g}"])
    alg = get_realization(f"sl{g.shape[0]}")
    iw = iwasawa(alg, g)
    out = {"iwasawa": {"k": iw.ktilde, "a": iw.atilde, "n": iw.ntilde}}
    try:
        b = bruhat(alg, g)
        out["bruhat"] = {"nbar": nbar_matrix(alg, b.nbar), "m": b.m, "a": b.a, "n": b.n}
    except NotInBigCell as exc:
        out["bruhat"] = None
        out["bruhat_error"] = str(exc)
    sys.stdout.write(dumps(out))
    return 0


def _cmd_sweep(args) -> int:
    cfg = read_config(args.config)
    cfg.suites = list(SWEEP_SUITES)
    status, report, csv_text = run(cfg, args.out, log=lambda line: print(line, file=sys.stderr))
    sys.stdout.write(csv_text)
    return status


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pscontract", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run verification suites from a JSON config")
    v.add_argument("--config", required=True)
    v.add_argument("--suite", nargs="+", action="extend", help="restrict to these suite ids")
    v.add_argument("--seed", type=int)
    v.add_argument("--out", help="directory for the JSON report and sweep CSV")
    v.set_defaults(func=_cmd_verify)

    a = sub.add_parser("algebra", help="realization data")
    asub = a.add_subparsers(dest="action", required=True)
    ins = asub.add_parser("inspect", help="print a realization as JSON")
    ins.add_argument("--realization", required=True)
    ins.set_defaults(func=_cmd_inspect)

    d = sub.add_parser("decompose", help="Iwasawa and Bruhat factors of a matrix")
    d.add_argument("--g", required=True, help="JSON matrix, e.g. '[[2,1],[1,1]]'")
    d.set_defaults(func=_cmd_decompose)

    c = sub.add_parser("contract", help="contraction sweeps")
    csub = c.add_subparsers(dest="action", required=True)
    sw = csub.add_parser("sweep", help="run the r-sweeps and print the CSV table")
    sw.add_argument("--config", required=True)
    sw.add_argument("--out")
    sw.set_defaults(func=_cmd_sweep)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"config error: {problem}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
