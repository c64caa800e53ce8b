"""Command-line entry point: ``hypolab <module> <subcmd> [options] [FILES...]``.

Every command prints one JSON report. Exit status is 0 on success, 2 for
bad input and 3 when a mathematical obstruction is found (a resonance, a
non-exact or non-closed cochain, a failed Heisenberg condition).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import dyncoh, heis, liealg, torus
from .cecoh import adjoint_rep, cohomology_dim, trivial_rep
from .rational import format_fraction, to_fraction

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_OBSTRUCTION = 3

BUILTIN = "builtin:"


class InputError(Exception):
    pass


class Obstruction(Exception):
    """Raised by a command after its report is complete, to select exit status 3."""


@dataclass
class RunReport:
    command: list[str]
    inputs: list[dict] = field(default_factory=list)
    results: dict = field(default_factory=dict)
    residuals: dict = field(default_factory=dict)
    verdicts: list[str] = field(default_factory=list)
    wall_clock_s: float | None = None

    def to_json(self) -> dict:
        out = {
            "command": self.command,
            "inputs": self.inputs,
            "results": self.results,
            "residuals": self.residuals,
            "verdicts": self.verdicts,
        }
        if self.wall_clock_s is not None:
            out["wall_clock_s"] = self.wall_clock_s
        return _jsonable(out)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=False, allow_nan=False)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, Fraction):
        return format_fraction(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, complex):
        return {"re": _jsonable(obj.real), "im": _jsonable(obj.imag)}
    return obj


# -- input resolution ------------------------------------------------------------------


def _read(spec: str, report: RunReport) -> tuple[str | None, Any]:
    """Return (builtin name, None) or (None, parsed JSON), recording a digest either way."""
    if spec.startswith(BUILTIN):
        name = spec[len(BUILTIN):]
        report.inputs.append({"name": spec, "sha256": hashlib.sha256(spec.encode()).hexdigest()})
        return name, None
    try:
        raw = Path(spec).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {spec}: {exc.strerror}") from None
    report.inputs.append({"name": spec, "sha256": hashlib.sha256(raw).hexdigest()})
    try:
        return None, json.loads(raw)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        where = f" at line {exc.lineno}, column {exc.colno}" if isinstance(exc, json.JSONDecodeError) else ""
        raise InputError(f"{spec}: invalid JSON{where}") from None


def _int_arg(text: str, what: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise InputError(f"{what} must be an integer, got {text!r}") from None


def _split(name: str) -> tuple[str, list[str]]:
    head, *rest = name.split(":")
    return head, rest


def load_algebra(spec: str, report: RunReport) -> liealg.LieAlgebra:
    name, data = _read(spec, report)
    if name is None:
        try:
            return liealg.LieAlgebra.from_json(data)
        except liealg.LieAlgebraError as exc:
            raise InputError(f"{spec}: {exc}") from None
    head, rest = _split(name)
    builders: dict[str, Callable[[int], liealg.LieAlgebra]] = {
        "heisenberg": liealg.heisenberg,
        "filiform": liealg.filiform,
        "abelian": liealg.abelian,
    }
    if head == "g23" and not rest:
        return liealg.free_nilpotent_2_3()
    if head in builders and len(rest) == 1:
        try:
            return builders[head](_int_arg(rest[0], head))
        except ValueError as exc:
            raise InputError(str(exc)) from None
    raise InputError(f"unknown algebra {spec!r}; try builtin:heisenberg:g, builtin:filiform:g, builtin:g23, builtin:abelian:n")


def load_action(spec: str, report: RunReport) -> torus.TranslationAction:
    name, data = _read(spec, report)
    if name is None:
        try:
            return torus.TranslationAction.from_json(data)
        except (ValueError, TypeError) as exc:
            raise InputError(f"{spec}: {exc}") from None
    head, rest = _split(name)
    simple = {"golden": torus.golden, "golden-2d": torus.golden_2d, "rational-half": torus.rational_half}
    if head in simple and not rest:
        return simple[head]()
    if head == "golden-type" and len(rest) == 1:
        k = _int_arg(rest[0], head)
        if k < 2:
            raise InputError("golden-type needs k >= 2")
        return torus.golden_type(k)
    if head == "liouville" and len(rest) == 1:
        terms = _int_arg(rest[0], head)
        if not 1 <= terms <= 5:
            raise InputError("liouville takes 1..5 terms (more underflow a double)")
        return torus.liouville(terms)
    raise InputError(
        f"unknown action {spec!r}; try builtin:golden, builtin:golden-2d, builtin:golden-type:k, "
        "builtin:rational-half, builtin:liouville:4"
    )


def load_series(spec: str, d: int, report: RunReport) -> torus.FourierSeries:
    name, data = _read(spec, report)
    if name is None:
        try:
            return torus.FourierSeries.from_json(data, d)
        except (ValueError, TypeError) as exc:
            raise InputError(f"{spec}: {exc}") from None
    head, rest = _split(name)
    if head == "mode" and len(rest) == 1:
        n = [_int_arg(x, "frequency") for x in rest[0].split(",")]
        if len(n) != d:
            raise InputError(f"mode {n} does not live in Z^{d}")
        return torus.FourierSeries.mode(n)
    raise InputError(f"unknown series {spec!r}; try builtin:mode:n1,n2")


def load_cochain(spec: str, action: torus.TranslationAction, report: RunReport) -> dyncoh.Cochain:
    name, data = _read(spec, report)
    if name is not None:
        raise InputError("no built-in cochains; omit the file to draw a random one")
    try:
        return dyncoh.Cochain.from_json(data, action)
    except (ValueError, TypeError) as exc:
        raise InputError(f"{spec}: {exc}") from None


def load_heisenberg(spec: str, report: RunReport) -> heis.HeisenbergAction:
    name, data = _read(spec, report)
    if name is None:
        try:
            return heis.HeisenbergAction.from_json(data)
        except (heis.HeisenbergActionError, ValueError, TypeError) as exc:
            raise InputError(f"{spec}: {exc}") from None
    table = {"heis-xy": heis.heis_xy, "heis-golden": heis.heis_golden, "heis-x": heis.heis_x}
    if name in table:
        return table[name]()
    raise InputError(f"unknown Heisenberg action {spec!r}; try builtin:heis-xy, builtin:heis-golden, builtin:heis-x")


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def _files(args, count: int, usage: str) -> list[str]:
    if len(args.files) < count:
        raise InputError(f"usage: {usage}")
    return args.files


# -- commands -------------------------------------------------------------------------


def cmd_algebra(args, report: RunReport) -> None:
    (spec, *_) = _files(args, 1, "hypolab algebra info|classify FILE")
    g = load_algebra(spec, report)
    jac = liealg.jacobi_check(g)
    if not jac.ok:
        i, j, k, total = jac.violations[0]
        names = g.basis_names
        raise InputError(
            f"Jacobi identity fails on ({names[i]}, {names[j]}, {names[k]}): sum is {g.format_vector(total)}"
        )
    report.results["dim"] = g.dim
    if args.subcmd == "info":
        series = liealg.lower_central_series(g)
        report.results.update(
            {
                "lower_central_series_dims": [s.dim for s in series],
                "nilpotent": liealg.is_nilpotent(g),
                "step": liealg.step(g),
                "center_dim": liealg.center(g).dim,
                "derived_dim": liealg.derived_subalgebra(g).dim,
            }
        )
        return
    try:
        ht = liealg.classify_2step_dim1(g)
        report.results["two_step_dim1"] = {"applicable": True, "heisenberg_g": ht.g, "euclidean_n": ht.n}
        report.verdicts.append(f"isomorphic to h^{ht.g} x R^{ht.n}")
    except liealg.NotApplicable as exc:
        report.results["two_step_dim1"] = {"applicable": False, "reason": str(exc)}
    found = None
    for zi in range(g.dim):
        a = liealg.Subspace.span(g.dim, [g.basis_vector(i) for i in range(g.dim) if i != zi])
        if liealg.is_subalgebra_abelian(g, a) and liealg.is_ideal(g, a):
            found = (zi, liealg.classify_codim1_abelian(g, a, g.basis_vector(zi)))
            break
    if found is None:
        report.results["codim1_abelian"] = {"applicable": False, "reason": "no coordinate hyperplane is an abelian ideal"}
        return
    zi, prof = found
    report.results["codim1_abelian"] = {
        "applicable": True,
        "complement": g.basis_names[zi],
        "verdict": prof.verdict,
        "blocks": prof.blocks,
        "filiform_g": prof.filiform_g,
        "euclidean_n": prof.euclid_n,
        "charpoly": [format_fraction(c) for c in prof.charpoly],
    }
    report.verdicts.append(prof.describe())


def cmd_cohomology(args, report: RunReport) -> None:
    (spec, *_) = _files(args, 1, "hypolab cohomology trivial|adjoint FILE --degree L")
    g = load_algebra(spec, report)
    if args.degree is None or not 0 <= args.degree <= g.dim:
        raise InputError(f"--degree must lie in 0..{g.dim}")
    rep = trivial_rep(g) if args.subcmd == "trivial" else adjoint_rep(g)
    dims = cohomology_dim(rep, args.degree)
    report.results.update(
        {
            "representation": args.subcmd,
            "degree": args.degree,
            "cochains": dims.cochains,
            "dim_Z": dims.cocycles,
            "dim_B": dims.coboundaries,
            "dim_H": dims.betti,
        }
    )


def cmd_torus(args, report: RunReport) -> None:
    files = _files(args, 1, "hypolab torus scan|solve|tame ACTION [SERIES]")
    act = load_action(files[0], report)
    report.results["action"] = act.to_json()
    if args.subcmd == "scan":
        res = torus.diophantine_scan(act, args.tau, args.radius)
        report.results["scan"] = res.to_json(full_table=args.full_table)
        report.verdicts.append(res.verdict)
        if res.verdict == torus.VERDICT_RESONANT:
            raise Obstruction
        return
    if args.subcmd == "solve":
        if len(files) < 2:
            raise InputError("usage: hypolab torus solve ACTION SERIES")
        v = load_series(files[1], act.d, report)
        try:
            sol = torus.solve_laplacian(act, v)
        except torus.ResonanceError as exc:
            report.results["resonance"] = list(exc.frequency)
            report.verdicts.append(f"resonance at {tuple(exc.frequency)}")
            raise Obstruction from None
        back = torus.apply_laplacian(act, sol.solution)
        report.results["solution"] = sol.solution.to_json()
        report.results["obstruction_mean"] = sol.obstruction
        report.residuals["forward_apply"] = (back - v.without_mean()).max_abs_coefficient()
        return
    rng = _rng(args.seed)
    rows = []
    for r in range(args.order + 1):
        est = torus.tame_constant_estimate(act, args.tau, r, args.trials, args.radius, rng)
        rows.append(est.to_json())
    report.results["tame"] = rows
    ok = all(row["mode_sweep_C_r"] <= row["analytic_bound"] * (1 + 1e-12) for row in rows)
    report.verdicts.append("single-mode sweep within analytic bound" if ok else "single-mode sweep exceeds analytic bound")


def cmd_cochain(args, report: RunReport) -> None:
    files = _files(args, 1, "hypolab cochain hodge|roundtrip ACTION [COCHAIN]")
    act = load_action(files[0], report)
    rng = _rng(args.seed)
    radius = args.radius if args.radius is not None else 3
    if args.subcmd == "hodge":
        degree = args.degree if args.degree is not None else 1
        if len(files) > 1:
            omega = load_cochain(files[1], act, report)
        else:
            if not 0 <= degree <= act.k:
                raise InputError(f"--degree must lie in 0..{act.k}")
            omega = dyncoh.Cochain.random(act, degree, radius, rng)
        try:
            parts = dyncoh.hodge_decompose(omega)
            dims = dyncoh.cohomology_dims(act, max(1, omega.radius))
        except torus.ResonanceError as exc:
            report.results["resonance"] = list(exc.frequency)
            report.verdicts.append(f"resonance at {tuple(exc.frequency)}")
            raise Obstruction from None
        report.results.update(
            {
                "degree": omega.degree,
                "norms": {
                    "input": omega.norm(),
                    "exact": parts.exact.norm(),
                    "coexact": parts.coexact.norm(),
                    "harmonic": math.sqrt(sum(abs(c) ** 2 for c in parts.harmonic.coeffs.values())),
                },
                "harmonic": [{"index": list(I.indices), "value": complex(c)} for I, c in sorted(parts.harmonic.coeffs.items())],
                "harmonic_dims": dims,
            }
        )
        report.residuals.update(parts.residuals(omega))
        return
    if len(files) > 1:
        omega = load_cochain(files[1], act, report)
    else:
        omega = dyncoh.Cochain.random_closed(act, 1, radius, rng)
    try:
        beta = dyncoh.AbelianCocycle(act, [omega])
    except dyncoh.NotClosedError as exc:
        report.verdicts.append(f"not closed: {exc}")
        raise Obstruction from None
    except ValueError as exc:
        raise InputError(str(exc)) from None
    back = dyncoh.recover_form(beta.component(0), act, max(1, omega.radius))
    t, s = rng.normal(size=(2, 8, act.k))
    x = rng.random(size=(8, act.d))
    report.results["radius"] = omega.radius
    report.residuals["roundtrip"] = (back - omega).norm()
    report.residuals["cocycle_identity"] = beta.identity_defect(t, s, x)


def cmd_heisenberg(args, report: RunReport) -> None:
    if args.subcmd == "check":
        (spec, *_) = _files(args, 1, "hypolab heisenberg check FILE")
        act = load_heisenberg(spec, report)
        chk = heis.heisenberg_gh_check(act, args.tau, args.radius)
        report.results.update(chk.to_json())
        report.verdicts += [
            f"commuting generators: {'PASS' if chk.abelian_ok else 'FAIL'}",
            f"center test: {'PASS' if chk.center_ok else 'FAIL'}",
            f"base test: {report.results['base_test']}",
            chk.verdict,
        ]
        if not chk.passes:
            raise Obstruction
        return
    g = args.g
    k = args.k if args.k is not None else g
    try:
        model = heis.SchrodingerModel(g, k)
    except (ValueError, heis.GridTooCoarseError) as exc:
        raise InputError(str(exc)) from None
    witness = heis.attempt_solve_multiplication(model, heis.gaussian)
    cancel = heis.attempt_solve_multiplication(model, lambda x: heis.multiplication_symbol(model, x) * heis.gaussian(x))
    report.results.update({"g": g, "k": k, "grid": {"R": model.R, "h": model.h}, "gaussian": witness.to_json()})
    report.residuals["constructed_cancellation"] = cancel.residual
    value = witness.value.real if witness.value.imag == 0 else witness.value
    report.verdicts.append(f"obstruction: v(0)={value:g}")
    raise Obstruction


def cmd_counterexample(args, report: RunReport) -> None:
    try:
        beta = to_fraction(args.beta)
    except (ValueError, ZeroDivisionError, TypeError):
        raise InputError(f"--beta must be rational, got {args.beta!r}") from None
    w = liealg.counterexample_g23(beta)
    g = liealg.free_nilpotent_2_3()
    report.results.update(
        {
            "beta": beta,
            "R_prime": g.format_vector(w.r_lift),
            "S_prime": g.format_vector(w.s_lift),
            "bracket": g.format_vector(w.bracket),
            "bracket_coords": list(w.bracket),
            "lower_central_series_dims": [s.dim for s in liealg.lower_central_series(g)],
            "center": [g.format_vector(v) for v in liealg.center(g).basis],
        }
    )
    report.verdicts.append("abelian lift impossible" if w.nonzero else "bracket vanishes")


COMMANDS = {
    "algebra": (cmd_algebra, ["info", "classify"]),
    "cohomology": (cmd_cohomology, ["trivial", "adjoint"]),
    "torus": (cmd_torus, ["scan", "solve", "tame"]),
    "cochain": (cmd_cochain, ["hodge", "roundtrip"]),
    "heisenberg": (cmd_heisenberg, ["check", "witness"]),
    "counterexample": (cmd_counterexample, None),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hypolab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="module", required=True)
    for module, (_, subcmds) in COMMANDS.items():
        p = sub.add_parser(module)
        if subcmds:
            p.add_argument("subcmd", choices=subcmds)
        p.add_argument("files", nargs="*", metavar="FILE", help="JSON input or builtin:NAME")
        p.add_argument("--tau", type=float, default=1.0)
        p.add_argument("--radius", type=int, default=None)
        p.add_argument("--degree", type=int, default=None)
        p.add_argument("--order", type=int, default=0, help="largest Sobolev order r in the tame table")
        p.add_argument("--trials", type=int, default=20)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--beta", default="1")
        p.add_argument("--g", type=int, default=1)
        p.add_argument("--k", type=int, default=None)
        p.add_argument("--full-table", action="store_true", help="include every shell in a scan report")
        p.add_argument("--timing", action="store_true", help="add wall-clock time (breaks byte-stability)")
        p.add_argument("--out", default=None)
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    if args.radius is None and args.module in ("torus", "heisenberg"):
        args.radius = 1000 if args.module == "heisenberg" or getattr(args, "subcmd", "") == "scan" else 20
    if args.radius is not None and args.radius < 1:
        print("error: --radius must be positive", file=sys.stderr)
        return EXIT_INPUT
    report = RunReport(command=["hypolab", *argv])
    start = time.perf_counter()
    code = EXIT_OK
    try:
        COMMANDS[args.module][0](args, report)
    except Obstruction:
        code = EXIT_OBSTRUCTION
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (torus.ResonanceError, dyncoh.NotExactError, dyncoh.NotClosedError) as exc:
        report.verdicts.append(f"obstruction: {exc}")
        code = EXIT_OBSTRUCTION
    if args.timing:
        report.wall_clock_s = time.perf_counter() - start
    text = report.dumps() + "\n"
    if args.out:
        try:
            Path(args.out).write_text(text)
        except OSError as exc:
            print(f"error: cannot write {args.out}: {exc.strerror}", file=sys.stderr)
            return EXIT_INPUT
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
