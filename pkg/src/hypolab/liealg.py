"""Finite-dimensional Lie algebras over Q given by structure constants.

Brackets are stored sparsely for i < j only; the i > j half is always derived
by antisymmetry so the table cannot disagree with itself.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from . import rational as Q
from .rational import Matrix, Vector, to_fraction


class LieAlgebraError(ValueError):
    pass


class NotApplicable(LieAlgebraError):
    """Raised when a classification routine's hypotheses do not hold."""


class LieAlgebra:
    def __init__(self, basis_names: Sequence[str], brackets: Mapping[tuple[int, int], Mapping[int, object]] = ()):
        names = [str(n) for n in basis_names]
        if not names:
            raise LieAlgebraError("a Lie algebra needs at least one basis element")
        if len(set(names)) != len(names):
            raise LieAlgebraError(f"duplicate basis names in {names}")
        self.basis_names = tuple(names)
        self.dim = len(names)

        table: dict[tuple[int, int], dict[int, Fraction]] = {}
        for (i, j), coeffs in dict(brackets).items():
            i, j = int(i), int(j)
            for idx in (i, j):
                if not 0 <= idx < self.dim:
                    raise LieAlgebraError(f"bracket index {idx} out of range 0..{self.dim - 1}")
            vec = {}
            for m, c in coeffs.items():
                m = int(m)
                if not 0 <= m < self.dim:
                    raise LieAlgebraError(f"coefficient index {m} out of range 0..{self.dim - 1}")
                c = to_fraction(c)
                if c:
                    vec[m] = c
            if i == j:
                if vec:
                    raise LieAlgebraError(f"[b{i}, b{i}] must vanish")
                continue
            if i > j:
                i, j = j, i
                vec = {m: -c for m, c in vec.items()}
            if (i, j) in table and table[(i, j)] != vec:
                raise LieAlgebraError(f"inconsistent values given for [b{i}, b{j}]")
            if vec:
                table[(i, j)] = vec
        self._brackets = table

        n = self.dim
        dense = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
        for (i, j), vec in table.items():
            for m, c in vec.items():
                dense[i][j][m] = c
                dense[j][i][m] = -c
        self._dense = dense

    # -- basic access -----------------------------------------------------

    def __repr__(self) -> str:
        return f"LieAlgebra(dim={self.dim}, basis={list(self.basis_names)})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, LieAlgebra):
            return NotImplemented
        return self.basis_names == other.basis_names and self._brackets == other._brackets

    def __hash__(self):
        return hash((self.basis_names, tuple(sorted((k, tuple(sorted(v.items()))) for k, v in self._brackets.items()))))

    @property
    def nonzero_brackets(self) -> dict[tuple[int, int], dict[int, Fraction]]:
        return {k: dict(v) for k, v in self._brackets.items()}

    def index(self, name: str) -> int:
        try:
            return self.basis_names.index(name)
        except ValueError:
            raise KeyError(f"no basis element named {name!r}") from None

    def basis_vector(self, i: int | str) -> Vector:
        if isinstance(i, str):
            i = self.index(i)
        v = [Fraction(0)] * self.dim
        v[i] = Fraction(1)
        return v

    def vector(self, terms: Mapping[str, object]) -> Vector:
        """Coordinates of ``sum c * name`` for ``{name: c}``."""
        v = [Fraction(0)] * self.dim
        for name, c in terms.items():
            v[self.index(name)] += to_fraction(c)
        return v

    def structure_constants(self, i: int, j: int) -> Vector:
        return list(self._dense[i][j])

    def bracket(self, x: Sequence, y: Sequence) -> Vector:
        out = [Fraction(0)] * self.dim
        for i, xi in enumerate(x):
            if not xi:
                continue
            row = self._dense[i]
            for j, yj in enumerate(y):
                if not yj:
                    continue
                c = xi * yj
                for m, s in enumerate(row[j]):
                    if s:
                        out[m] += c * s
        return out

    def ad(self, x: Sequence) -> Matrix:
        """Matrix of ad_x; column j holds [x, b_j]."""
        cols = [self.bracket(x, self.basis_vector(j)) for j in range(self.dim)]
        return Q.transpose(cols)

    def format_vector(self, v: Sequence[Fraction]) -> str:
        """E.g. ``Y1 - (2/3)Y2``."""
        out = ""
        for name, c in zip(self.basis_names, v):
            if not c:
                continue
            mag = abs(c)
            term = name if mag == 1 else f"({Q.format_fraction(mag)}){name}"
            if not out:
                out = term if c > 0 else f"-{term}"
            else:
                out += f" + {term}" if c > 0 else f" - {term}"
        return out or "0"

    # -- serialization ------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "basis": list(self.basis_names),
            "brackets": [
                {"i": i, "j": j, "coeffs": {str(m): Q.format_fraction(c) for m, c in sorted(vec.items())}}
                for (i, j), vec in sorted(self._brackets.items())
            ],
        }

    @classmethod
    def from_json(cls, data) -> "LieAlgebra":
        if not isinstance(data, dict):
            raise LieAlgebraError("algebra file must hold a JSON object")
        for key in ("dim", "basis", "brackets"):
            if key not in data:
                raise LieAlgebraError(f"missing field {key!r}")
        dim = data["dim"]
        basis = data["basis"]
        if not isinstance(dim, int) or dim < 1:
            raise LieAlgebraError(f"field 'dim' must be a positive integer, got {dim!r}")
        if not isinstance(basis, list) or len(basis) != dim:
            raise LieAlgebraError(f"field 'basis' must list exactly {dim} names")
        if not isinstance(data["brackets"], list):
            raise LieAlgebraError("field 'brackets' must be a list")
        table: dict[tuple[int, int], dict[int, object]] = {}
        for pos, entry in enumerate(data["brackets"]):
            where = f"brackets[{pos}]"
            if not isinstance(entry, dict) or not {"i", "j", "coeffs"} <= entry.keys():
                raise LieAlgebraError(f"{where}: expected object with fields i, j, coeffs")
            try:
                i, j = int(entry["i"]), int(entry["j"])
                coeffs = {int(m): to_fraction(c) for m, c in entry["coeffs"].items()}
            except (TypeError, ValueError, AttributeError, ZeroDivisionError) as exc:
                raise LieAlgebraError(f"{where}: {exc}") from None
            key = (i, j) if i <= j else (j, i)
            if i > j:
                coeffs = {m: -c for m, c in coeffs.items()}
            if key in table:
                if {m: c for m, c in table[key].items() if c} != {m: c for m, c in coeffs.items() if c}:
                    raise LieAlgebraError(f"{where}: inconsistent duplicate bracket [{i}, {j}]")
                continue
            table[key] = coeffs
        try:
            return cls(basis, table)
        except LieAlgebraError as exc:
            raise LieAlgebraError(f"brackets: {exc}") from None

    @classmethod
    def loads(cls, text: str) -> "LieAlgebra":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise LieAlgebraError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
        return cls.from_json(data)


# -- subspaces -------------------------------------------------------------


@dataclass(frozen=True)
class Subspace:
    """A subspace of Q^ambient stored by its reduced row-echelon basis."""

    ambient: int
    basis: tuple[tuple[Fraction, ...], ...] = ()
    pivots: tuple[int, ...] = field(default=(), compare=False)

    @classmethod
    def span(cls, ambient: int, vectors: Iterable[Sequence]) -> "Subspace":
        rows = [[to_fraction(x) for x in v] for v in vectors]
        for r in rows:
            if len(r) != ambient:
                raise ValueError(f"vector of length {len(r)} in Q^{ambient}")
        reduced, pivots = Q.rref(rows)
        return cls(ambient, tuple(tuple(r) for r in reduced), tuple(pivots))

    @classmethod
    def whole(cls, ambient: int) -> "Subspace":
        return cls.span(ambient, Q.identity(ambient))

    @classmethod
    def zero(cls, ambient: int) -> "Subspace":
        return cls(ambient)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def vectors(self) -> list[Vector]:
        return [list(b) for b in self.basis]

    def coordinates(self, v: Sequence) -> Vector:
        """Coefficients of v in :attr:`basis`; raises if v is not in the subspace."""
        v = [to_fraction(x) for x in v]
        coords = [v[p] for p in self.pivots]
        recon = [Fraction(0)] * self.ambient
        for c, b in zip(coords, self.basis):
            if c:
                for t, x in enumerate(b):
                    recon[t] += c * x
        if recon != v:
            raise ValueError("vector is not in the subspace")
        return coords

    def __contains__(self, v) -> bool:
        try:
            self.coordinates(v)
        except ValueError:
            return False
        return True

    def contains_subspace(self, other: "Subspace") -> bool:
        return all(list(b) in self for b in other.basis)

    def __add__(self, other: "Subspace") -> "Subspace":
        return Subspace.span(self.ambient, self.vectors() + other.vectors())


def bracket_subspaces(g: LieAlgebra, a: Subspace, b: Subspace) -> Subspace:
    """span{[x, y] : x in a, y in b}."""
    return Subspace.span(g.dim, [g.bracket(x, y) for x in a.basis for y in b.basis])


# -- axioms ----------------------------------------------------------------


@dataclass
class JacobiReport:
    violations: list[tuple[int, int, int, Vector]]

    @property
    def ok(self) -> bool:
        return not self.violations


def jacobi_check(g: LieAlgebra) -> JacobiReport:
    """Evaluate [x,[y,z]] + [y,[z,x]] + [z,[x,y]] on every basis triple i < j < k."""
    bad = []
    e = [g.basis_vector(i) for i in range(g.dim)]
    for i in range(g.dim):
        for j in range(i + 1, g.dim):
            for k in range(j + 1, g.dim):
                x, y, z = e[i], e[j], e[k]
                total = [
                    a + b + c
                    for a, b, c in zip(
                        g.bracket(x, g.bracket(y, z)),
                        g.bracket(y, g.bracket(z, x)),
                        g.bracket(z, g.bracket(x, y)),
                    )
                ]
                if any(total):
                    bad.append((i, j, k, total))
    return JacobiReport(bad)


# -- structure -------------------------------------------------------------


def lower_central_series(g: LieAlgebra) -> list[Subspace]:
    """g^(0) = g, g^(j+1) = [g, g^(j)], up to and including the first repeat."""
    whole = Subspace.whole(g.dim)
    series = [whole]
    while True:
        nxt = bracket_subspaces(g, whole, series[-1])
        series.append(nxt)
        if nxt.dim == series[-2].dim:
            break
    series.pop()  # the loop stops on a repeated term
    return series


def is_nilpotent(g: LieAlgebra) -> bool:
    return lower_central_series(g)[-1].dim == 0


def step(g: LieAlgebra) -> int | None:
    """Minimal l with g^(l) = 0, or ``None`` for non-nilpotent algebras."""
    series = lower_central_series(g)
    return len(series) - 1 if series[-1].dim == 0 else None


def derived_subalgebra(g: LieAlgebra) -> Subspace:
    whole = Subspace.whole(g.dim)
    return bracket_subspaces(g, whole, whole)


def center(g: LieAlgebra) -> Subspace:
    # x is central iff [x, b_j] = 0 for every j, i.e. ad_{b_j} x = 0 stacked over j
    rows: Matrix = []
    for j in range(g.dim):
        rows.extend(g.ad(g.basis_vector(j)))
    return Subspace.span(g.dim, Q.nullspace(rows, g.dim))


def is_subalgebra_abelian(g: LieAlgebra, a: Subspace) -> bool:
    return all(not any(g.bracket(x, y)) for x in a.basis for y in a.basis)


def is_ideal(g: LieAlgebra, a: Subspace) -> bool:
    return a.contains_subspace(bracket_subspaces(g, Subspace.whole(g.dim), a))


# -- builders --------------------------------------------------------------


def abelian(n: int) -> LieAlgebra:
    return LieAlgebra([f"e{i + 1}" for i in range(n)])


def heisenberg(g: int) -> LieAlgebra:
    """h^g = span(X_1..X_g, Y_1..Y_g, Z) with [X_i, Y_i] = Z."""
    if g < 1:
        raise ValueError("Heisenberg parameter must be at least 1")
    names = [f"X{i}" for i in range(1, g + 1)] + [f"Y{i}" for i in range(1, g + 1)] + ["Z"]
    z = 2 * g
    return LieAlgebra(names, {(i, g + i): {z: 1} for i in range(g)})


def filiform(g: int) -> LieAlgebra:
    """f^g = span(Y, X_1..X_g) with [Y, X_i] = X_{i+1} for i < g."""
    if g < 1:
        raise ValueError("filiform parameter must be at least 1")
    names = ["Y"] + [f"X{i}" for i in range(1, g + 1)]
    return LieAlgebra(names, {(0, i): {i + 1: 1} for i in range(1, g)})


def free_nilpotent_2_3() -> LieAlgebra:
    """g_{2,3}: [X1, X2] = Z, [Z, X1] = Y1, [Z, X2] = Y2."""
    names = ["X1", "X2", "Z", "Y1", "Y2"]
    return LieAlgebra(names, {(0, 1): {2: 1}, (2, 0): {3: 1}, (2, 1): {4: 1}})


def direct_product(a: LieAlgebra, b: LieAlgebra) -> LieAlgebra:
    names = list(a.basis_names) + list(b.basis_names)
    if len(set(names)) != len(names):
        names = [f"{n}'" if i >= a.dim else n for i, n in enumerate(names)]
        names = [f"{n}_{i}" for i, n in enumerate(names)] if len(set(names)) != len(names) else names
    table = dict(a.nonzero_brackets)
    for (i, j), vec in b.nonzero_brackets.items():
        table[(i + a.dim, j + a.dim)] = {m + a.dim: c for m, c in vec.items()}
    return LieAlgebra(names, table)


def change_basis(g: LieAlgebra, new_basis: Matrix, names: Sequence[str] | None = None) -> LieAlgebra:
    """Rewrite g in the basis whose i-th element has old coordinates ``new_basis[i]``."""
    rows = [[to_fraction(x) for x in r] for r in new_basis]
    if len(rows) != g.dim or Q.rank(rows) != g.dim:
        raise LieAlgebraError("change of basis must be invertible")
    # old coordinates -> new coordinates: solve c^T rows = v, i.e. c = v rows^{-1}
    inv = Q.inverse(Q.transpose(rows))
    table = {}
    for i in range(g.dim):
        for j in range(i + 1, g.dim):
            new = Q.matvec(inv, g.bracket(rows[i], rows[j]))
            if any(new):
                table[(i, j)] = {m: c for m, c in enumerate(new) if c}
    return LieAlgebra(names or [f"b{i + 1}" for i in range(g.dim)], table)


# -- classification ----------------------------------------------------------


@dataclass(frozen=True)
class HeisenbergType:
    """g is isomorphic to h^g x R^n."""

    g: int
    n: int


def classify_2step_dim1(alg: LieAlgebra) -> HeisenbergType:
    """Identify a 2-step algebra with one-dimensional derived algebra as h^g x R^n."""
    derived = derived_subalgebra(alg)
    if derived.dim != 1:
        raise NotApplicable(f"derived algebra has dimension {derived.dim}, not 1")
    if step(alg) != 2:
        raise NotApplicable("algebra is not 2-step nilpotent")
    # skew form B(b_i, b_j) = coefficient of [b_i, b_j] along z
    form = [[derived.coordinates(alg.structure_constants(i, j))[0] for j in range(alg.dim)] for i in range(alg.dim)]
    r = Q.rank(form)
    assert r % 2 == 0, "a skew form has even rank"
    g = r // 2
    return HeisenbergType(g, alg.dim - 2 * g - 1)


def jordan_blocks_at(a: Matrix, eigenvalue=0) -> list[int]:
    """Sizes of the Jordan blocks for ``eigenvalue``, read off the ranks of (A - lambda)^m."""
    n = len(a)
    lam = to_fraction(eigenvalue)
    shifted = [[a[i][j] - (lam if i == j else 0) for j in range(n)] for i in range(n)]
    ranks = [n]
    power = Q.identity(n)
    while ranks[-1] > 0:
        power = Q.matmul(power, shifted)
        r = Q.rank(power)
        if r == ranks[-1]:
            break
        ranks.append(r)
    ranks.append(ranks[-1])
    # blocks of size >= m number ranks[m-1] - ranks[m]
    blocks = []
    for m in range(1, len(ranks) - 1):
        blocks.extend([m] * ((ranks[m - 1] - ranks[m]) - (ranks[m] - ranks[m + 1])))
    return sorted(blocks, reverse=True)


def nilpotent_jordan_blocks(a: Matrix) -> list[int]:
    blocks = jordan_blocks_at(a, 0)
    if sum(blocks) != len(a):
        raise ValueError("matrix is not nilpotent")
    return blocks


VERDICT_ABELIAN = "abelian"
VERDICT_FILIFORM = "filiform"
VERDICT_MULTI_BLOCK = "nilpotent multi-block"
VERDICT_NON_NILPOTENT = "solvable non-nilpotent"


@dataclass
class CodimOneProfile:
    matrix: Matrix
    charpoly: list[Fraction]
    eigenvalues: dict[Fraction, list[int]]
    irrational_part: list[Fraction] | None
    nilpotent: bool
    blocks: list[int]
    verdict: str
    filiform_g: int | None = None
    euclid_n: int | None = None

    def describe(self) -> str:
        if self.verdict == VERDICT_ABELIAN:
            return f"ad_Z = 0: abelian algebra (degenerate f^0 x R^{self.euclid_n})"
        if self.verdict == VERDICT_FILIFORM:
            return f"nilpotent, single nontrivial block of size {self.filiform_g}: f^{self.filiform_g} x R^{self.euclid_n}"
        if self.verdict == VERDICT_MULTI_BLOCK:
            return f"nilpotent, multi-block almost-abelian, blocks {self.blocks}"
        return "solvable non-nilpotent: ad_Z has a nonzero eigenvalue"


def _charpoly(a: Matrix) -> list[Fraction]:
    import sympy

    x = sympy.Symbol("x")
    poly = sympy.Matrix([[sympy.Rational(c.numerator, c.denominator) for c in row] for row in a]).charpoly(x)
    return [Fraction(int(c.p), int(c.q)) for c in poly.all_coeffs()]


def _rational_roots(coeffs: list[Fraction]) -> tuple[dict[Fraction, int], list[Fraction] | None]:
    import sympy

    x = sympy.Symbol("x")
    poly = sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in coeffs], x, domain="QQ")
    roots: dict[Fraction, int] = {}
    rest = sympy.Poly(1, x, domain="QQ")
    for factor, mult in poly.factor_list()[1]:
        if factor.degree() == 1:
            a, b = factor.all_coeffs()
            root = -b / a
            roots[Fraction(int(root.p), int(root.q))] = int(mult)
        else:
            rest = rest * factor**mult
    leftover = None
    if rest.degree() > 0:
        leftover = [Fraction(int(c.p), int(c.q)) for c in rest.monic().all_coeffs()]
    return roots, leftover


def classify_codim1_abelian(alg: LieAlgebra, a: Subspace, z: Sequence) -> CodimOneProfile:
    """Jordan data of A = ad_Z restricted to a codimension-one abelian ideal a."""
    z = [to_fraction(x) for x in z]
    if a.ambient != alg.dim:
        raise LieAlgebraError("subspace lives in the wrong ambient space")
    if a.dim != alg.dim - 1:
        raise LieAlgebraError(f"subspace has codimension {alg.dim - a.dim}, not 1")
    if z in a:
        raise LieAlgebraError("Z must not lie in the ideal")
    if not is_subalgebra_abelian(alg, a):
        raise LieAlgebraError("subspace is not abelian")
    if not is_ideal(alg, a):
        raise LieAlgebraError("subspace is not an ideal")

    cols = [a.coordinates(alg.bracket(z, b)) for b in a.basis]
    A = Q.transpose(cols) if cols else []
    m = len(A)
    coeffs = _charpoly(A) if m else [Fraction(1)]
    roots, leftover = _rational_roots(coeffs)
    eigen = {lam: jordan_blocks_at(A, lam) for lam in sorted(roots)}
    nilpotent = set(roots) <= {Fraction(0)} and leftover is None
    if not nilpotent:
        return CodimOneProfile(A, coeffs, eigen, leftover, False, [], VERDICT_NON_NILPOTENT)
    blocks = nilpotent_jordan_blocks(A) if m else []
    nontrivial = [b for b in blocks if b > 1]
    if not nontrivial:
        return CodimOneProfile(A, coeffs, eigen, None, True, blocks, VERDICT_ABELIAN, 0, m)
    if len(nontrivial) == 1:
        size = nontrivial[0]
        return CodimOneProfile(A, coeffs, eigen, None, True, blocks, VERDICT_FILIFORM, size, m - size)
    return CodimOneProfile(A, coeffs, eigen, None, True, blocks, VERDICT_MULTI_BLOCK)


# -- the g_{2,3} obstruction -------------------------------------------------


@dataclass(frozen=True)
class CounterexampleWitness:
    beta: Fraction
    r_lift: tuple[Fraction, ...]
    s_lift: tuple[Fraction, ...]
    bracket: tuple[Fraction, ...]

    @property
    def nonzero(self) -> bool:
        return any(self.bracket)


def counterexample_g23(beta, y: Sequence = (0, 0), y_prime: Sequence = (0, 0)) -> CounterexampleWitness:
    """[S', R'] for R' = X1 + beta X2 + Y and S' = Z + Y' with Y, Y' central.

    ``y`` and ``y_prime`` are coordinates along (Y1, Y2).
    """
    g = free_nilpotent_2_3()
    beta = to_fraction(beta)
    y1, y2 = (to_fraction(c) for c in y)
    w1, w2 = (to_fraction(c) for c in y_prime)
    r = g.vector({"X1": 1, "X2": beta, "Y1": y1, "Y2": y2})
    s = g.vector({"Z": 1, "Y1": w1, "Y2": w2})
    return CounterexampleWitness(beta, tuple(r), tuple(s), tuple(g.bracket(s, r)))
