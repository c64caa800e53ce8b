"""Translation actions on Heisenberg nilmanifolds and the Schrödinger obstruction.

In a Schrödinger representation of h^g the generators X_j act as
multiplication by 2 pi i x_j on L^2(R^g), so the orbitwise laplacian of an
action whose base part spans X_1..X_k becomes multiplication by
4 pi^2 (x_1^2 + ... + x_k^2). Anything in its image vanishes at x = 0, which
a Gaussian does not. This module models that on a grid and checks the two
necessary conditions it leads to.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
import sympy as sp

from .torus import FOUR_PI_SQ, VERDICT_CONSISTENT, DiophantineReport, TranslationAction, diophantine_scan

VERDICT_PASS = "passes necessary conditions"
VERDICT_FAIL = "fails GH necessary conditions"


class HeisenbergActionError(ValueError):
    pass


class GridTooCoarseError(ArithmeticError):
    pass


# -- grid model ---------------------------------------------------------------


@dataclass(frozen=True)
class SchrodingerModel:
    """Samples of functions on [-R, R]^g at spacing h; the origin is a grid point."""

    g: int
    k: int
    R: float = 6.0
    h: float = 0.05
    tol: float = 1e-9

    def __post_init__(self):
        if self.g < 1:
            raise ValueError("g must be positive")
        if not 1 <= self.k <= self.g:
            raise ValueError(f"need 1 <= k <= g, got k={self.k}, g={self.g}")
        if self.R <= 0 or self.h <= 0:
            raise ValueError("R and h must be positive")
        if self.half_width < 3:
            raise GridTooCoarseError(f"h={self.h} leaves fewer than 3 samples between 0 and R={self.R}")

    @property
    def half_width(self) -> int:
        return int(round(self.R / self.h))

    @property
    def axis(self) -> np.ndarray:
        m = self.half_width
        return self.h * np.arange(-m, m + 1)

    @property
    def shape(self) -> tuple[int, ...]:
        return (2 * self.half_width + 1,) * self.g

    @property
    def origin(self) -> tuple[int, ...]:
        return (self.half_width,) * self.g

    def points(self) -> np.ndarray:
        """Grid points, shape (*shape, g)."""
        return np.stack(np.meshgrid(*([self.axis] * self.g), indexing="ij"), axis=-1)

    def symbol_grid(self) -> np.ndarray:
        return multiplication_symbol(self, self.points())

    def sample(self, v: Callable | np.ndarray) -> np.ndarray:
        if callable(v):
            vals = np.asarray(v(self.points()))
        else:
            vals = np.asarray(v)
        if vals.shape != self.shape:
            raise ValueError(f"samples have shape {vals.shape}, grid is {self.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("samples must be finite")
        return vals


def multiplication_symbol(model: SchrodingerModel, x) -> np.ndarray | float:
    """4 pi^2 (x_1^2 + ... + x_k^2); the remaining g - k coordinates do not enter."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != model.g:
        raise ValueError(f"points must have {model.g} coordinates")
    out = FOUR_PI_SQ * np.sum(x[..., : model.k] ** 2, axis=-1)
    return float(out) if out.ndim == 0 else out


def gaussian(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.exp(-np.sum(x**2, axis=-1))


@dataclass
class ObstructionWitness:
    """v(0) != 0, so v is not in the image of the multiplication operator."""

    value: complex
    sup_norm: float

    def to_json(self) -> dict:
        return {"v(0)": _number_json(self.value), "sup_norm": self.sup_norm}


@dataclass
class MultiplicationSolution:
    u: np.ndarray
    residual: float
    fit_condition: float
    filled_points: int

    def to_json(self) -> dict:
        return {"residual": self.residual, "fit_condition": self.fit_condition, "filled_points": self.filled_points}


def _number_json(z: complex):
    z = complex(z)
    return z.real if z.imag == 0 else {"re": z.real, "im": z.imag}


FIT_OFFSETS = (-3, -2, -1, 1, 2, 3)
MAX_FIT_CONDITION = 1e8


def attempt_solve_multiplication(
    model: SchrodingerModel, v: Callable | np.ndarray
) -> MultiplicationSolution | ObstructionWitness:
    """Divide v by the symbol, or certify that v(0) != 0 blocks a solution.

    Where the symbol vanishes (x_1 = ... = x_k = 0) the quotient is filled
    by a least-squares quadratic in x_1 through the six nearest samples on
    each side. The residual is max |symbol u - v| / max |v| over grid points
    farther than 3h from the origin.
    """
    vals = model.sample(v)
    sup = float(np.max(np.abs(vals))) if vals.size else 0.0
    v0 = vals[model.origin]
    if abs(v0) > model.tol * sup:
        return ObstructionWitness(complex(v0), sup)
    sym = model.symbol_grid()
    zero = sym == 0.0
    u = np.zeros(vals.shape, dtype=np.result_type(vals.dtype, float))
    np.divide(vals, sym, out=u, where=~zero)

    m = model.half_width
    offsets = np.array(FIT_OFFSETS, dtype=float) * model.h
    vander = np.vander(offsets, 3, increasing=True)
    cond = float(np.linalg.cond(vander))
    if cond > MAX_FIT_CONDITION:
        raise GridTooCoarseError(f"quadratic fit near the origin has condition number {cond:.3e}")
    mask = zero[m : m + 1]  # every zero of the symbol has x_1 = 0
    if np.any(mask):
        rhs = np.stack([u[m + o : m + o + 1][mask] for o in FIT_OFFSETS])
        coef, *_ = np.linalg.lstsq(vander, rhs, rcond=None)
        u[m : m + 1][mask] = coef[0]

    far = np.linalg.norm(model.points(), axis=-1) > 3 * model.h
    err = np.abs(sym * u - vals)[far]
    residual = float(np.max(err)) / sup if sup and err.size else 0.0
    return MultiplicationSolution(u, residual, cond, int(np.count_nonzero(zero)))


# -- Heisenberg actions -----------------------------------------------------------

_ENTRY = re.compile(r"^[0-9+\-*/(). ]*(sqrt\([0-9+\-*/(). ]*\)[0-9+\-*/(). ]*)*$")


def parse_entry(value) -> sp.Expr:
    """An exact real number: ints, Fractions, "p/q", or arithmetic with sqrt such as "(1+sqrt(5))/2"."""
    if isinstance(value, bool):
        raise HeisenbergActionError("booleans are not numbers")
    if isinstance(value, int):
        return sp.Integer(value)
    if isinstance(value, Fraction):
        return sp.Rational(value.numerator, value.denominator)
    if isinstance(value, float):
        return sp.Rational(Fraction(value))
    if isinstance(value, sp.Expr):
        expr = value
    elif isinstance(value, str):
        text = value.strip()
        if not text or not _ENTRY.match(text):
            raise HeisenbergActionError(f"cannot parse entry {value!r}")
        try:
            expr = sp.sympify(text, rational=True)
        except (sp.SympifyError, SyntaxError, TypeError) as exc:
            raise HeisenbergActionError(f"cannot parse entry {value!r}") from exc
    else:
        raise HeisenbergActionError(f"cannot interpret {value!r} as a number")
    if expr.free_symbols or not expr.is_real:
        raise HeisenbergActionError(f"entry {value!r} is not a real number")
    return expr


def _symplectic(g: int) -> sp.Matrix:
    """Gram matrix of the bracket form on the base: omega(X_i, Y_i) = 1."""
    J = sp.zeros(2 * g, 2 * g)
    for i in range(g):
        J[i, g + i] = 1
        J[g + i, i] = -1
    return J


class HeisenbergAction:
    """k commuting generators of h^g in the basis X_1..X_g, Y_1..Y_g, Z."""

    def __init__(self, g: int, generators: Sequence[Sequence], name: str = ""):
        if g < 1:
            raise HeisenbergActionError("g must be positive")
        rows = [[parse_entry(x) for x in row] for row in generators]
        if not rows:
            raise HeisenbergActionError("need at least one generator")
        for pos, row in enumerate(rows):
            if len(row) != 2 * g + 1:
                raise HeisenbergActionError(f"generator {pos} has {len(row)} entries, expected {2 * g + 1}")
        self.g = g
        self.name = name
        self.rho = sp.Matrix(rows)
        if self.rho.rank(simplify=True) != len(rows):
            raise HeisenbergActionError("generators are linearly dependent")
        J = _symplectic(g)
        base = self.base_matrix()
        # a non-commuting pair is reported by the check rather than rejected here
        self.noncommuting = [
            (a, b)
            for a in range(len(rows))
            for b in range(a + 1, len(rows))
            if sp.simplify((base.row(a) * J * base.row(b).T)[0, 0]) != 0
        ]

    @property
    def k(self) -> int:
        return self.rho.rows

    @property
    def is_abelian(self) -> bool:
        return not self.noncommuting

    def base_matrix(self) -> sp.Matrix:
        """Rows of rho with the Z coordinate dropped: the image in h^g / [h^g, h^g]."""
        return self.rho[:, : 2 * self.g]

    def to_json(self) -> dict:
        return {"g": self.g, "generators": [[str(x) for x in self.rho.row(i)] for i in range(self.k)]}

    @classmethod
    def from_json(cls, data) -> "HeisenbergAction":
        if not isinstance(data, dict) or not {"g", "generators"} <= data.keys():
            raise HeisenbergActionError("Heisenberg action needs fields g, generators")
        if not isinstance(data["generators"], list):
            raise HeisenbergActionError("field 'generators' must be a list of rows")
        return cls(int(data["g"]), data["generators"])


def heis_xy() -> HeisenbergAction:
    """X and Y in h^1: no Z direction in the span (and [X, Y] = Z, so no R^2-action either)."""
    return HeisenbergAction(1, [[1, 0, 0], [0, 1, 0]], name="heis-xy")


def heis_golden() -> HeisenbergAction:
    """R^2 on h^1 by X + phi Y and Z."""
    return HeisenbergAction(1, [[1, "(1+sqrt(5))/2", 0], [0, 0, 1]], name="heis-golden")


def heis_x() -> HeisenbergAction:
    """The flow of X in h^1."""
    return HeisenbergAction(1, [[1, 0, 0]], name="heis-x")


def center_in_span(act: HeisenbergAction) -> bool:
    z = sp.zeros(1, 2 * act.g + 1)
    z[0, 2 * act.g] = 1
    return act.rho.col_join(z).rank(simplify=True) == act.rho.rank(simplify=True)


def symplectic_completion(g: int, isotropic: Sequence[sp.Matrix]) -> sp.Matrix:
    """Rows e_1..e_g, f_1..f_g of a symplectic basis of R^{2g} whose first e's span ``isotropic``.

    ``isotropic`` must be linearly independent with omega vanishing on it.
    """
    J = _symplectic(g)

    def om(a, b):
        return sp.simplify((a * J * b.T)[0, 0])

    es = [sp.Matrix(v).reshape(1, 2 * g) for v in isotropic]
    m = len(es)
    fs: list[sp.Matrix] = []
    for j in range(m):
        # omega(e_i, f) = delta_ij for all i, omega(f_i, f) = 0 for earlier f_i
        A = sp.Matrix.vstack(*[(e * J) for e in es], *[(f * J) for f in fs]) if fs else sp.Matrix.vstack(*[(e * J) for e in es])
        rhs = sp.Matrix([1 if i == j else 0 for i in range(m)] + [0] * len(fs))
        sol, params = A.gauss_jordan_solve(rhs)
        sol = sol.subs({p: 0 for p in params})
        fs.append(sp.simplify(sol.T))
    # complete with a symplectic basis of the complement of span(e, f)
    for unit in range(2 * g):
        if len(es) == g:
            break
        v = sp.zeros(1, 2 * g)
        v[0, unit] = 1
        for e, f in zip(es, fs):
            v = v - om(v, f) * e + om(v, e) * f
        if all(x == 0 for x in sp.simplify(v)):
            continue
        for unit2 in range(2 * g):
            w = sp.zeros(1, 2 * g)
            w[0, unit2] = 1
            for e, f in zip(es, fs):
                w = w - om(w, f) * e + om(w, e) * f
            c = om(v, w)
            if c != 0:
                es.append(sp.simplify(v))
                fs.append(sp.simplify(w / c))
                break
    return sp.Matrix.vstack(*es, *fs)


def _base_action(act: HeisenbergAction) -> tuple[TranslationAction | None, list[sp.Matrix]]:
    base = act.base_matrix()
    cols = [base.row(i) for i in range(act.k) if any(sp.simplify(x) != 0 for x in base.row(i))]
    if not cols:
        return None, []
    if all(x.is_Rational for c in cols for x in c):
        columns = [[Fraction(int(x.p), int(x.q)) for x in c] for c in cols]
        return TranslationAction.from_columns(columns, name="base"), cols
    return TranslationAction.from_columns([[float(x) for x in c] for c in cols], name="base"), cols


@dataclass
class HeisenbergCheck:
    abelian_ok: bool
    center_ok: bool
    base: DiophantineReport | None
    base_generators: list[list[float]]
    symplectic_basis: list[list[str]]
    tau: float
    radius: int
    verdict: str = field(init=False)

    def __post_init__(self):
        base_ok = self.base is not None and self.base.verdict == VERDICT_CONSISTENT
        if self.abelian_ok and self.center_ok and base_ok:
            self.verdict = f"{VERDICT_PASS} at (tau={self.tau:g}, N={self.radius})"
        else:
            self.verdict = VERDICT_FAIL

    @property
    def passes(self) -> bool:
        return self.verdict.startswith(VERDICT_PASS)

    def to_json(self) -> dict:
        return {
            "commuting_generators": "PASS" if self.abelian_ok else "FAIL",
            "center_test": "PASS" if self.center_ok else "FAIL",
            "base_test": (self.base.verdict if self.base is not None else "no base component"),
            "base_scan": self.base.to_json(full_table=False) if self.base is not None else None,
            "base_generators": self.base_generators,
            "symplectic_basis": self.symplectic_basis,
            "verdict": self.verdict,
            "scope": "necessary conditions only",
        }


def heisenberg_gh_check(act: HeisenbergAction, tau: float, radius: int) -> HeisenbergCheck:
    """Center membership and a diophantine scan of the projected base action."""
    center_ok = center_in_span(act)
    base, cols = _base_action(act)
    report = diophantine_scan(base, tau, radius) if base is not None else None
    basis = None
    if act.is_abelian:
        # commuting generators project to an isotropic subspace of dimension <= g
        independent = sp.Matrix.vstack(*cols).T.columnspace() if cols else []
        basis = symplectic_completion(act.g, [v.T for v in independent])
    return HeisenbergCheck(
        abelian_ok=act.is_abelian,
        center_ok=center_ok,
        base=report,
        base_generators=[[float(x) for x in c] for c in cols],
        symplectic_basis=[[str(x) for x in basis.row(i)] for i in range(basis.rows)] if basis is not None else [],
        tau=tau,
        radius=radius,
    )
