"""Chevalley-Eilenberg cochains of a finite-dimensional representation.

A degree-l cochain assigns a vector in V to each increasing tuple of 0-based
basis indices of the Lie algebra; evaluation on any other tuple goes through
:func:`hypolab.exterior.canonical_order`.
"""

from __future__ import annotations

from random import Random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Sequence

from . import rational as Q
from .exterior import canonical_order
from .liealg import LieAlgebra
from .rational import Matrix, Vector, to_fraction


class RepresentationError(ValueError):
    pass


class Representation:
    """pi: g -> End(V) given by the matrices pi(b_i)."""

    def __init__(self, algebra: LieAlgebra, matrices: Sequence[Matrix], *, check: bool = True):
        if len(matrices) != algebra.dim:
            raise RepresentationError(f"need {algebra.dim} matrices, got {len(matrices)}")
        mats = [[[to_fraction(x) for x in row] for row in m] for m in matrices]
        dims = {len(m) for m in mats} | {len(row) for m in mats for row in m}
        if len(dims) != 1:
            raise RepresentationError("representation matrices must be square and of equal size")
        self.algebra = algebra
        self.dimV = dims.pop()
        self.matrices = mats
        if check:
            bad = self.homomorphism_defects()
            if bad:
                i, j = bad[0]
                raise RepresentationError(
                    f"pi([{algebra.basis_names[i]}, {algebra.basis_names[j]}]) differs from the commutator"
                )

    def act(self, x: Sequence, v: Sequence) -> Vector:
        """pi(x) v for x in algebra coordinates."""
        out = [Fraction(0)] * self.dimV
        for i, xi in enumerate(x):
            if xi:
                for r, val in enumerate(Q.matvec(self.matrices[i], v)):
                    out[r] += xi * val
        return out

    def homomorphism_defects(self) -> list[tuple[int, int]]:
        g = self.algebra
        bad = []
        for i in range(g.dim):
            for j in range(i + 1, g.dim):
                lhs = self._combine(g.structure_constants(i, j))
                a, b = self.matrices[i], self.matrices[j]
                ab, ba = Q.matmul(a, b), Q.matmul(b, a)
                rhs = [[x - y for x, y in zip(r1, r2)] for r1, r2 in zip(ab, ba)]
                if lhs != rhs:
                    bad.append((i, j))
        return bad

    def _combine(self, coeffs: Sequence[Fraction]) -> Matrix:
        out = Q.zeros(self.dimV, self.dimV)
        for m, c in enumerate(coeffs):
            if c:
                for r in range(self.dimV):
                    for s in range(self.dimV):
                        out[r][s] += c * self.matrices[m][r][s]
        return out


def trivial_rep(g: LieAlgebra, dimV: int = 1) -> Representation:
    return Representation(g, [Q.zeros(dimV, dimV) for _ in range(g.dim)], check=False)


def adjoint_rep(g: LieAlgebra) -> Representation:
    return Representation(g, [g.ad(g.basis_vector(i)) for i in range(g.dim)])


@dataclass
class AlgCochain:
    """Alternating map Lambda_degree(g) -> V keyed by increasing index tuples."""

    n: int
    dimV: int
    degree: int
    values: dict[tuple[int, ...], Vector] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for key, vec in self.values.items():
            key = tuple(key)
            if len(key) != self.degree or list(key) != sorted(set(key)) or any(not 0 <= i < self.n for i in key):
                raise ValueError(f"{key} is not a canonical degree-{self.degree} index over dim {self.n}")
            vec = [to_fraction(x) for x in vec]
            if len(vec) != self.dimV:
                raise ValueError(f"value at {key} has length {len(vec)}, expected {self.dimV}")
            if any(vec):
                clean[key] = vec
        self.values = clean

    def __call__(self, *indices: int) -> Vector:
        sign, key = canonical_order(indices)
        if sign == 0 or key not in self.values:
            return [Fraction(0)] * self.dimV
        return [sign * x for x in self.values[key]]

    def __eq__(self, other) -> bool:
        if not isinstance(other, AlgCochain):
            return NotImplemented
        return (self.n, self.dimV, self.degree, self.values) == (other.n, other.dimV, other.degree, other.values)

    def is_zero(self) -> bool:
        return not self.values

    def to_vector(self) -> Vector:
        out = []
        for key in combinations(range(self.n), self.degree):
            out.extend(self.values.get(key, [Fraction(0)] * self.dimV))
        return out

    @classmethod
    def from_vector(cls, n: int, dimV: int, degree: int, vec: Sequence) -> "AlgCochain":
        keys = list(combinations(range(n), degree))
        if len(vec) != len(keys) * dimV:
            raise ValueError("coordinate vector has the wrong length")
        return cls(n, dimV, degree, {key: list(vec[t * dimV:(t + 1) * dimV]) for t, key in enumerate(keys)})

    @classmethod
    def random(cls, rep: Representation, degree: int, rng: Random, height: int = 5) -> "AlgCochain":
        n = rep.algebra.dim
        size = comb(n, degree) * rep.dimV
        vec = [Fraction(rng.randint(-height, height), rng.randint(1, height)) for _ in range(size)]
        return cls.from_vector(n, rep.dimV, degree, vec)


def ce_differential(rep: Representation, omega: AlgCochain) -> AlgCochain:
    """(d omega)(Y_0..Y_l) on every canonical basis tuple of degree l + 1."""
    g = rep.algebra
    if omega.n != g.dim or omega.dimV != rep.dimV:
        raise RepresentationError("cochain does not match the representation")
    l = omega.degree
    if l >= g.dim:
        raise ValueError(f"degree {l} cochains have no differential in dimension {g.dim}")
    out: dict[tuple[int, ...], Vector] = {}
    for J in combinations(range(g.dim), l + 1):
        total = [Fraction(0)] * rep.dimV
        for i in range(l + 1):
            rest = J[:i] + J[i + 1:]
            val = omega(*rest)
            if any(val):
                image = Q.matvec(rep.matrices[J[i]], val)
                s = -1 if i % 2 else 1
                total = [t + s * x for t, x in zip(total, image)]
        for i in range(l + 1):
            for j in range(i + 1, l + 1):
                bracket = g.structure_constants(J[i], J[j])
                rest = J[:i] + J[i + 1:j] + J[j + 1:]
                s = -1 if (i + j) % 2 else 1
                for m, c in enumerate(bracket):
                    if c:
                        val = omega(m, *rest)
                        total = [t + s * c * x for t, x in zip(total, val)]
        if any(total):
            out[J] = total
    return AlgCochain(g.dim, rep.dimV, l + 1, out)


def differential_matrix(rep: Representation, degree: int) -> Matrix:
    """Matrix of d: C^degree -> C^(degree+1) in the canonical coordinates."""
    n, dimV = rep.algebra.dim, rep.dimV
    if not 0 <= degree < n:
        raise ValueError(f"d is defined on degrees 0..{n - 1}")
    src = comb(n, degree) * dimV
    cols = []
    for t in range(src):
        unit = [Fraction(0)] * src
        unit[t] = Fraction(1)
        cols.append(ce_differential(rep, AlgCochain.from_vector(n, dimV, degree, unit)).to_vector())
    return Q.transpose(cols)


@dataclass(frozen=True)
class CohomologyDims:
    degree: int
    cochains: int
    cocycles: int
    coboundaries: int

    @property
    def betti(self) -> int:
        return self.cocycles - self.coboundaries


def _rank_of_d(rep: Representation, degree: int) -> int:
    n = rep.algebra.dim
    if degree < 0 or degree >= n:
        return 0
    return Q.rank(differential_matrix(rep, degree))


def cohomology_dim(rep: Representation, degree: int) -> CohomologyDims:
    n = rep.algebra.dim
    if not 0 <= degree <= n:
        raise ValueError(f"degree must lie in 0..{n}")
    cochains = comb(n, degree) * rep.dimV
    cocycles = cochains - _rank_of_d(rep, degree)
    return CohomologyDims(degree, cochains, cocycles, _rank_of_d(rep, degree - 1))


def cohomology_table(rep: Representation) -> list[CohomologyDims]:
    return [cohomology_dim(rep, l) for l in range(rep.algebra.dim + 1)]
