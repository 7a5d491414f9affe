"""Acceptance criteria for the verification toolkit.

Each test runs the relevant suites on sl2 and sl3 under the default seeds,
compares every named residual against the criterion's threshold and checks
the runtime budget.  One PASS/FAIL line per criterion is printed and also
collected for the terminal summary.
"""

import json
import re
import subprocess
import sys
import time
from pathlib import Path

import pytest

from pscontract.cli import build_context, load_config
from pscontract.suites import run_suite

ROOT = Path(__file__).resolve().parents[1]
REALIZATIONS = {"sl2": [1.0], "sl3": [2.0, 3.0]}
LINES = []  # read by the terminal-summary hook in conftest


@pytest.fixture(scope="module")
def contexts():
    return {
        name: build_context(load_config({"realization": name, "xi1": xi1, "fiber": "trivial-character", "seed": 0}))
        for name, xi1 in REALIZATIONS.items()
    }


def record(number, title, ok, detail):
    line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
    LINES.append(line)
    print(line)


def run_criterion(number, title, contexts, budget, requirements, realizations=REALIZATIONS, extra=None):
    """Run suites, compare named checks against thresholds and check the budget.

    ``requirements`` maps suite id to {check name: threshold}.  ``extra`` is
    an optional callable (suite id, result) -> list of failure messages.
    """
    failures = []
    worst = 0.0
    start = time.perf_counter()
    for name in realizations:
        for suite, thresholds in requirements.items():
            res = run_suite(suite, contexts[name])
            if not res.passed:
                failures.append(f"{name}/{suite} failed its own gates")
            for check, limit in thresholds.items():
                residual = res.checks[check][0]
                worst = max(worst, residual)
                if not residual <= limit:
                    failures.append(f"{name}/{suite}.{check} = {residual:.3g} > {limit:.0e}")
            if extra is not None:
                failures.extend(f"{name}/{m}" for m in extra(suite, res))
    elapsed = time.perf_counter() - start
    if elapsed >= budget:
        failures.append(f"took {elapsed:.1f}s, budget {budget}s")
    ok = not failures
    record(number, title, ok, f"max residual {worst:.2e}, {elapsed:.2f}s" if ok else "; ".join(failures))
    assert ok, failures


def test_structure(contexts):
    exact = {c: 1e-12 for c in ("jacobi", "structure_vs_matrix", "killing_invariance", "theta_involution", "theta_automorphism")}
    numeric = {c: 1e-9 for c in ("root_bracket_inclusion", "nbar_orthonormality")}
    ranks = {"rank_deficit": 0.0}
    run_criterion(1, "structure constants, Killing form, involution, ranks", contexts, 1.0,
                  {"algebra": {**exact, **numeric, **ranks}})


def test_ad_xi1_image(contexts):
    def enough(suite, res):
        return [] if res.diagnostics["elements"] >= 6 else ["fewer than 5 random regular elements"]

    run_criterion(2, "rank and m-orthogonality of ad(xi1) on V", contexts, 1.0,
                  {"lemma31": {"rank_gap": 0.0, "m_orthogonality": 1e-9}}, extra=enough)


def test_factorizations(contexts):
    run_criterion(3, "Iwasawa and Bruhat round trips, a-tilde identity", contexts, 2.0,
                  {"lemma21": {"iwasawa_round_trip": 1e-10, "bruhat_round_trip": 1e-10, "atilde_identity": 1e-9}})


def test_factor_curve_derivatives(contexts):
    run_criterion(4, "factor-curve derivatives against finite differences", contexts, 2.0,
                  {"lemma21": {"da": 1e-6, "dm": 1e-6, "dnbar": 1e-6, "datilde": 1e-6}})


def test_representations(contexts):
    checks = {"homomorphism": 1e-8, "derivative_vs_fd": 1e-6, "commutator": 1e-5}
    run_criterion(5, "pi and pi0: homomorphism, derivative, commutator", contexts, 5.0,
                  {"prop22": checks, "prop33": checks})


def test_berezin_symbols(contexts):
    def backends(suite, res):
        have = set(res.diagnostics["backends"])
        need = {"trivial-character", "sign-character", "spin-0.5", "spin-1.0", "spin-1.5"}
        return [] if need <= have else [f"missing backends {sorted(need - have)}"]

    props = {c: 1e-10 for c in ("adjoint", "equivariance", "dsigma")}
    run_criterion(6, "Berezin symbol properties on all fibre backends", contexts, 2.0,
                  {"prop41": {**props, "reconstruction": 1e-8}}, realizations=["sl2"], extra=backends)


def test_linear_symbol_quantization(contexts):
    run_criterion(7, "jet evaluator vs closed form, trace identity", contexts, 3.0,
                  {"lemma42": {"jet_vs_closed_form": 1e-7, "trace_identity": 1e-10}})


def test_commutator_bracket_identity(contexts):
    def library(suite, res):
        return [] if len(res.diagnostics["pairs"]) >= 12 else ["symbol library has fewer than 12 pairs"]

    run_criterion(8, "commutator vs Poisson bracket over the symbol library", contexts, 10.0,
                  {"lemma43": {"commutator_bracket": 1e-6}}, extra=library)


def test_adapted_correspondence(contexts):
    adapted = {"adapted": 1e-7, "adapted_jet": 1e-7}
    run_criterion(9, "linear symbols and W(f) = -i d pi on G and G0", contexts, 10.0,
                  {"prop51": {"pairing": 1e-9}, "prop61": {"pairing": 1e-9}, "prop53": adapted, "prop63": adapted})


def test_orbit_brackets(contexts):
    run_criterion(10, "bracket identities, Z' relation, Psi0 round trips", contexts, 15.0,
                  {"prop52": {"bracket_identity": 1e-6, "z_prime_relation": 1e-9},
                   "prop62": {"bracket_identity": 1e-6, "invert_then_psi0": 1e-8, "psi0_then_invert": 1e-8}})


def test_contraction_sweeps(contexts):
    def sweeps(suite, res):
        out = []
        for rep in res.sweeps:
            if rep.check_id in ("group_law", "algebra_law"):
                continue
            if not (rep.ratio is not None and rep.ratio <= 1e-3):
                out.append(f"{rep.check_id} ratio {rep.ratio}")
            if not (rep.slope is not None and 0.7 <= rep.slope <= 1.3):
                out.append(f"{rep.check_id} slope {rep.slope}")
            if not rep.monotone:
                out.append(f"{rep.check_id} not monotone")
        return out

    run_criterion(11, "contraction sweeps over r = 2^0 .. 2^-10", contexts, 20.0,
                  {"prop71": {}, "prop81": {"k_component_exact": 1e-10}, "prop83": {}}, extra=sweeps)


def _cli_run(out_dir):
    start = time.perf_counter()
    codes = []
    for name in REALIZATIONS:
        cfg = ROOT / "configs" / f"{name}_default.json"
        proc = subprocess.run([sys.executable, "-m", "pscontract.cli", "verify", "--config", str(cfg), "--out", str(out_dir / name)],
                              capture_output=True, text=True)
        codes.append(proc.returncode)
    return codes, time.perf_counter() - start


def test_full_cli_run(tmp_path):
    strip = lambda text: re.sub(r'"timestamp": "[^"]*"', '"timestamp": ""', text)
    codes, elapsed = _cli_run(tmp_path / "first")
    codes2, _ = _cli_run(tmp_path / "second")
    failures = []
    if any(codes + codes2):
        failures.append(f"exit codes {codes + codes2}")
    if elapsed >= 60.0:
        failures.append(f"took {elapsed:.1f}s, budget 60s")
    for name in REALIZATIONS:
        a, b = tmp_path / "first" / name, tmp_path / "second" / name
        if strip((a / "report.json").read_text()) != strip((b / "report.json").read_text()):
            failures.append(f"{name} report differs between runs")
        if (a / "sweeps.csv").read_bytes() != (b / "sweeps.csv").read_bytes():
            failures.append(f"{name} sweep table differs between runs")
        report = json.loads((a / "report.json").read_text())
        if len(report["suites"]) != 17:
            failures.append(f"{name} ran {len(report['suites'])} suites")
    ok = not failures
    record(12, "full CLI run on sl2 and sl3", ok, f"exit 0, {elapsed:.1f}s, stable reports" if ok else "; ".join(failures))
    assert ok, failures
