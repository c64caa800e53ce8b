"""Exterior algebra of R^k with the orthonormal basis e^I.

Multi-indices are 1-based and strictly increasing, matching e^1, ..., e^k.
Coefficients are whatever scalar type the caller uses; exact work uses
:class:`fractions.Fraction`, the Fourier layer uses complex floats.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Iterator, Mapping, Union

Scalar = Union[int, Fraction, float, complex]


def canonical_order(indices) -> tuple[int, tuple[int, ...]]:
    """Sort ``indices`` and return ``(sign, sorted)`` of the permutation.

    Returns ``(0, ())`` when an index repeats (the wedge vanishes).
    """
    seq = list(indices)
    if len(set(seq)) != len(seq):
        return 0, ()
    # inversion count; sequences here are short
    inversions = sum(1 for a in range(len(seq)) for b in range(a + 1, len(seq)) if seq[a] > seq[b])
    return (-1 if inversions % 2 else 1), tuple(sorted(seq))


@dataclass(frozen=True, order=True)
class MultiIndex:
    indices: tuple[int, ...]
    k: int

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(int(i) for i in self.indices))
        if self.k < 0:
            raise ValueError(f"ambient dimension must be nonnegative, got {self.k}")
        if len(self.indices) > self.k:
            raise ValueError(f"degree {len(self.indices)} exceeds ambient dimension {self.k}")
        prev = 0
        for i in self.indices:
            if not 1 <= i <= self.k:
                raise ValueError(f"index {i} out of range 1..{self.k}")
            if i <= prev:
                raise ValueError(f"indices must be strictly increasing: {self.indices}")
            prev = i

    @property
    def degree(self) -> int:
        return len(self.indices)

    def __contains__(self, j: int) -> bool:
        return j in self.indices

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices)

    def __len__(self) -> int:
        return len(self.indices)

    def __repr__(self) -> str:
        return f"MultiIndex({self.indices}, k={self.k})"

    @classmethod
    def empty(cls, k: int) -> "MultiIndex":
        return cls((), k)

    @classmethod
    def all(cls, k: int, degree: int) -> list["MultiIndex"]:
        """Every I in P_degree, in lexicographic order."""
        return [cls(c, k) for c in combinations(range(1, k + 1), degree)]


def _check_generator(j: int, k: int) -> None:
    if not 1 <= j <= k:
        raise IndexError(f"generator index {j} out of range 1..{k}")


def tau(j: int, I: MultiIndex) -> int:
    """Number of elements of I smaller than j."""
    return sum(1 for i in I if i < j)


def wedge_basis(j: int, I: MultiIndex) -> tuple[int, MultiIndex] | None:
    """e^j ^ e^I as ``(sign, I u {j})``, or ``None`` when j is already in I."""
    _check_generator(j, I.k)
    if j in I:
        return None
    sign = -1 if tau(j, I) % 2 else 1
    return sign, MultiIndex(tuple(sorted(I.indices + (j,))), I.k)


def contract_basis(j: int, J: MultiIndex) -> tuple[int, MultiIndex] | None:
    """iota_j e^J as ``(sign, J minus {j})``, or ``None`` when j is not in J."""
    _check_generator(j, J.k)
    if J.degree == 0:
        raise ValueError("cannot contract a degree-0 element")
    if j not in J:
        return None
    pos = J.indices.index(j)
    return (-1 if pos % 2 else 1), MultiIndex(J.indices[:pos] + J.indices[pos + 1:], J.k)


@dataclass(frozen=True)
class ExtVector:
    """An element of Lambda^degree(R^k) in the basis e^I.

    Zero coefficients are dropped on construction so equality is structural.
    """

    k: int
    degree: int
    coeffs: Mapping[MultiIndex, Scalar] = field(default_factory=dict)

    def __post_init__(self):
        if not 0 <= self.degree <= self.k:
            raise ValueError(f"degree {self.degree} out of range for k={self.k}")
        clean = {}
        for I, c in self.coeffs.items():
            if I.k != self.k or I.degree != self.degree:
                raise ValueError(f"{I!r} does not belong to Lambda^{self.degree}(R^{self.k})")
            if c != 0:
                clean[I] = c
        object.__setattr__(self, "coeffs", clean)

    @classmethod
    def basis(cls, I: MultiIndex, coeff: Scalar = 1) -> "ExtVector":
        return cls(I.k, I.degree, {I: coeff})

    @classmethod
    def from_indices(cls, k: int, terms: Mapping[tuple[int, ...], Scalar]) -> "ExtVector":
        """Build from ``{(i1, ..., il): c}``; all keys must share one degree."""
        degrees = {len(t) for t in terms}
        if len(degrees) > 1:
            raise ValueError("mixed degrees")
        degree = degrees.pop() if degrees else 0
        out: dict[MultiIndex, Scalar] = {}
        for t, c in terms.items():
            sign, ordered = canonical_order(t)
            if sign == 0:
                continue
            I = MultiIndex(ordered, k)
            out[I] = out.get(I, 0) + sign * c
        return cls(k, degree, out)

    @classmethod
    def zero(cls, k: int, degree: int) -> "ExtVector":
        return cls(k, degree, {})

    @property
    def dimension(self) -> int:
        return comb(self.k, self.degree)

    def _compatible(self, other: "ExtVector") -> None:
        if (self.k, self.degree) != (other.k, other.degree):
            raise ValueError(
                f"mismatch: Lambda^{self.degree}(R^{self.k}) vs Lambda^{other.degree}(R^{other.k})"
            )

    def __add__(self, other: "ExtVector") -> "ExtVector":
        self._compatible(other)
        out = dict(self.coeffs)
        for I, c in other.coeffs.items():
            out[I] = out.get(I, 0) + c
        return ExtVector(self.k, self.degree, out)

    def __neg__(self) -> "ExtVector":
        return ExtVector(self.k, self.degree, {I: -c for I, c in self.coeffs.items()})

    def __sub__(self, other: "ExtVector") -> "ExtVector":
        return self + (-other)

    def __mul__(self, scalar: Scalar) -> "ExtVector":
        return ExtVector(self.k, self.degree, {I: scalar * c for I, c in self.coeffs.items()})

    __rmul__ = __mul__

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def wedge(self, j: int) -> "ExtVector":
        """E_j(omega) = e^j ^ omega."""
        if self.degree == self.k:
            _check_generator(j, self.k)
            return ExtVector.zero(self.k, self.k)
        out: dict[MultiIndex, Scalar] = {}
        for I, c in self.coeffs.items():
            hit = wedge_basis(j, I)
            if hit is not None:
                sign, J = hit
                out[J] = out.get(J, 0) + sign * c
        return ExtVector(self.k, self.degree + 1, out)

    def contract(self, j: int) -> "ExtVector":
        """iota_j(omega), the insertion of e_j in the first slot."""
        if self.degree == 0:
            raise ValueError("cannot contract a degree-0 element")
        out: dict[MultiIndex, Scalar] = {}
        for J, c in self.coeffs.items():
            hit = contract_basis(j, J)
            if hit is not None:
                sign, I = hit
                out[I] = out.get(I, 0) + sign * c
        return ExtVector(self.k, self.degree - 1, out)


def inner_product(omega: ExtVector, eta: ExtVector) -> Scalar:
    """sum_I omega_I * conj(eta_I) for the orthonormal basis e^I."""
    omega._compatible(eta)
    total: Scalar = 0
    for I, c in omega.coeffs.items():
        other = eta.coeffs.get(I)
        if other is not None:
            total += c * other.conjugate()
    return total
