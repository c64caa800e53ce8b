"""Cochains of a torus translation action, C^l = C^inf(T^d, Lambda^l(R^k)).

A cochain is a map from degree-l multi-indices to truncated Fourier series.
Every operator here is a Fourier multiplier, so it acts frequency by
frequency and never grows the support of its input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy.differentiate import derivative

from .exterior import ExtVector, MultiIndex, contract_basis, wedge_basis
from .torus import (
    FourierSeries,
    Frequency,
    ResonanceError,
    TranslationAction,
    canonical_sign,
    laplacian_symbol,
    sobolev_norm,
)

CLOSED_TOL = 1e-10
EXACT_TOL = 1e-10
TAYLOR_CUTOFF = 1e-8


class NotExactError(ValueError):
    """The input has a coexact or harmonic part, so it is not in Im d."""


class NotClosedError(ValueError):
    pass


class NonDifferentiableError(ArithmeticError):
    pass


def _index(I, k: int) -> MultiIndex:
    return I if isinstance(I, MultiIndex) else MultiIndex(tuple(I), k)


class Cochain:
    """Immutable degree-l cochain; missing components are zero."""

    __slots__ = ("action", "degree", "_components")

    def __init__(self, action: TranslationAction, degree: int, components: Mapping | None = None):
        k, d = action.k, action.d
        if not 0 <= degree <= k:
            raise ValueError(f"degree {degree} out of range 0..{k}")
        clean: dict[MultiIndex, FourierSeries] = {}
        for I, u in (components or {}).items():
            I = _index(I, k)
            if I.degree != degree:
                raise ValueError(f"component {I.indices} has degree {I.degree}, expected {degree}")
            if u.d != d:
                raise ValueError(f"component {I.indices} lives on T^{u.d}, action on T^{d}")
            u = clean[I] + u if I in clean else u
            if u:
                clean[I] = u
            else:
                clean.pop(I, None)
        self.action = action
        self.degree = degree
        self._components = clean

    @property
    def k(self) -> int:
        return self.action.k

    @property
    def d(self) -> int:
        return self.action.d

    def __getitem__(self, I) -> FourierSeries:
        return self._components.get(_index(I, self.k), FourierSeries.zero(self.d))

    def items(self):
        return sorted(self._components.items())

    def __bool__(self) -> bool:
        return bool(self._components)

    def __repr__(self) -> str:
        return f"Cochain(degree={self.degree}, k={self.k}, components={len(self._components)})"

    def _check(self, other: "Cochain") -> None:
        if self.action is not other.action and self.action.to_json() != other.action.to_json():
            raise ValueError("cochains belong to different actions")
        if self.degree != other.degree:
            raise ValueError(f"degree {self.degree} vs {other.degree}")

    def __add__(self, other: "Cochain") -> "Cochain":
        self._check(other)
        out = dict(self._components)
        for I, u in other._components.items():
            out[I] = out[I] + u if I in out else u
        return Cochain(self.action, self.degree, out)

    def __neg__(self) -> "Cochain":
        return self * -1

    def __sub__(self, other: "Cochain") -> "Cochain":
        return self + (-other)

    def __mul__(self, scalar: complex) -> "Cochain":
        return Cochain(self.action, self.degree, {I: u * scalar for I, u in self._components.items()})

    __rmul__ = __mul__

    @classmethod
    def zero(cls, action: TranslationAction, degree: int) -> "Cochain":
        return cls(action, degree)

    @classmethod
    def constant(cls, action: TranslationAction, form: ExtVector) -> "Cochain":
        if form.k != action.k:
            raise ValueError(f"form over R^{form.k}, action of R^{action.k}")
        return cls(action, form.degree, {I: FourierSeries.constant(action.d, c) for I, c in form.coeffs.items()})

    @classmethod
    def random(
        cls,
        action: TranslationAction,
        degree: int,
        radius: int,
        rng: np.random.Generator,
        *,
        terms: int = 6,
        include_mean: bool = True,
    ) -> "Cochain":
        comps = {
            I: FourierSeries.random(action.d, radius, terms, rng, include_mean=include_mean)
            for I in MultiIndex.all(action.k, degree)
        }
        return cls(action, degree, comps)

    @classmethod
    def random_closed(
        cls, action: TranslationAction, degree: int, radius: int, rng: np.random.Generator, *, terms: int = 6
    ) -> "Cochain":
        """A random constant form plus the differential of a random (degree-1)-cochain."""
        form = ExtVector(action.k, degree, {I: complex(rng.normal(), rng.normal()) for I in MultiIndex.all(action.k, degree)})
        out = cls.constant(action, form)
        if degree > 0:
            out = out + differential(cls.random(action, degree - 1, radius, rng, terms=terms))
        return out

    def harmonic(self) -> ExtVector:
        """The constant-coefficient part."""
        return ExtVector(self.k, self.degree, {I: u.mean for I, u in self._components.items()})

    def without_harmonic(self) -> "Cochain":
        return Cochain(self.action, self.degree, {I: u.without_mean() for I, u in self._components.items()})

    def map_series(self, fn: Callable[[FourierSeries], FourierSeries]) -> "Cochain":
        return Cochain(self.action, self.degree, {I: fn(u) for I, u in self._components.items()})

    def inner(self, other: "Cochain") -> complex:
        """Sum over I of the L^2(T^d) pairings of the components."""
        self._check(other)
        return sum((u.inner(other[I]) for I, u in self._components.items()), 0j)

    def norm(self, s: float = 0.0) -> float:
        return math.sqrt(sum(sobolev_norm(u, s) ** 2 for u in self._components.values()))

    @property
    def radius(self) -> int:
        return max((u.radius for u in self._components.values()), default=0)

    def support(self) -> list[Frequency]:
        return sorted({n for u in self._components.values() for n, _ in u})

    def evaluate(self, x) -> dict[MultiIndex, np.ndarray | complex]:
        return {I: u.evaluate(x) for I, u in self._components.items()}

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "degree": self.degree,
            "components": [{"index": list(I.indices), "series": u.to_json()} for I, u in self.items()],
        }

    @classmethod
    def from_json(cls, data, action: TranslationAction) -> "Cochain":
        if not isinstance(data, dict):
            raise ValueError("cochain must be a JSON object")
        for key in ("k", "degree", "components"):
            if key not in data:
                raise ValueError(f"cochain is missing field '{key}'")
        if int(data["k"]) != action.k:
            raise ValueError(f"cochain has k={data['k']} but the action has k={action.k}")
        comps = {}
        for pos, rec in enumerate(data["components"]):
            try:
                I = MultiIndex(tuple(rec["index"]), action.k)
                comps[I] = comps.get(I, FourierSeries.zero(action.d)) + FourierSeries.from_json(rec["series"], action.d)
            except (KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"components[{pos}]: {exc}") from exc
        return cls(action, int(data["degree"]), comps)


def _derivative_factors(action: TranslationAction) -> list[Callable[[Frequency], complex]]:
    return [
        (lambda n, X=action.column(j): 2j * math.pi * float(np.dot(X, n)))
        for j in range(1, action.k + 1)
    ]


def differential(omega: Cochain) -> Cochain:
    """d(u e^I) = sum_j (X_j u) e^j ^ e^I."""
    if omega.degree >= omega.k:
        raise ValueError(f"no differential out of top degree {omega.k}")
    factors = _derivative_factors(omega.action)
    out: dict[MultiIndex, FourierSeries] = {}
    for I, u in omega.items():
        for j in range(1, omega.k + 1):
            hit = wedge_basis(j, I)
            if hit is None:
                continue
            sign, J = hit
            term = u.multiply(factors[j - 1]) * sign
            out[J] = out[J] + term if J in out else term
    return Cochain(omega.action, omega.degree + 1, out)


def codifferential(omega: Cochain) -> Cochain:
    """d*(v e^J) = -sum_j (X_j v) iota_j e^J, the L^2 adjoint of d."""
    if omega.degree == 0:
        raise ValueError("no codifferential out of degree 0")
    factors = _derivative_factors(omega.action)
    out: dict[MultiIndex, FourierSeries] = {}
    for J, v in omega.items():
        for j in range(1, omega.k + 1):
            hit = contract_basis(j, J)
            if hit is None:
                continue
            sign, I = hit
            term = v.multiply(factors[j - 1]) * (-sign)
            out[I] = out[I] + term if I in out else term
    return Cochain(omega.action, omega.degree - 1, out)


def cochain_laplacian(omega: Cochain) -> Cochain:
    """d* d + d d*, built from the two compositions."""
    out = Cochain.zero(omega.action, omega.degree)
    if omega.degree < omega.k:
        out = out + codifferential(differential(omega))
    if omega.degree > 0:
        out = out + differential(codifferential(omega))
    return out


def diagonal_laplacian(omega: Cochain) -> Cochain:
    """Each component multiplied by the orbitwise laplacian symbol."""
    act = omega.action
    return omega.map_series(lambda u: u.multiply(lambda n: laplacian_symbol(act, n)))


def _invert_symbol(act: TranslationAction, n: Frequency) -> float:
    if not any(n):
        raise ResonanceError(n, "the zero frequency is harmonic and cannot be inverted")
    sym = laplacian_symbol(act, n)
    if sym == 0.0 or act.exact_zero(n):
        raise ResonanceError(canonical_sign(n))
    return 1.0 / sym


def inverse_laplacian(omega: Cochain) -> Cochain:
    """Delta^{-1} on a cochain with no constant part."""
    if omega.harmonic():
        raise ValueError("cochain has a harmonic part; remove it before inverting")
    act = omega.action
    return omega.map_series(lambda u: u.multiply(lambda n: _invert_symbol(act, n)))


@dataclass
class HodgeParts:
    exact: Cochain
    coexact: Cochain
    harmonic: ExtVector

    def reconstruct(self) -> Cochain:
        return self.exact + self.coexact + Cochain.constant(self.exact.action, self.harmonic)

    def orthogonality_defects(self) -> dict[str, float]:
        h = Cochain.constant(self.exact.action, self.harmonic)
        return {
            "exact.coexact": abs(self.exact.inner(self.coexact)),
            "exact.harmonic": abs(self.exact.inner(h)),
            "coexact.harmonic": abs(self.coexact.inner(h)),
        }

    def residuals(self, omega: Cochain) -> dict[str, float]:
        out = {"reconstruction": (self.reconstruct() - omega).norm()}
        out.update(self.orthogonality_defects())
        return out


def hodge_decompose(omega: Cochain) -> HodgeParts:
    harmonic = omega.harmonic()
    eta = inverse_laplacian(omega.without_harmonic())
    zero = Cochain.zero(omega.action, omega.degree)
    exact = differential(codifferential(eta)) if omega.degree > 0 else zero
    coexact = codifferential(differential(eta)) if omega.degree < omega.k else zero
    return HodgeParts(exact, coexact, harmonic)


def _koszul_matrix(w: np.ndarray, k: int, degree: int) -> np.ndarray:
    """Matrix of e^I -> sum_j w_j e^j ^ e^I from degree to degree + 1."""
    rows = {J: r for r, J in enumerate(MultiIndex.all(k, degree + 1))}
    src = MultiIndex.all(k, degree)
    mat = np.zeros((len(rows), len(src)), dtype=complex)
    for c, I in enumerate(src):
        for j in range(1, k + 1):
            hit = wedge_basis(j, I)
            if hit is not None:
                sign, J = hit
                mat[rows[J], c] += sign * w[j - 1]
    return mat


def cohomology_dims(action: TranslationAction, radius: int, *, tol: float = 1e-9) -> list[int]:
    """dim ker d / im d in each degree for cochains supported in |n|_inf <= radius.

    Computed from numerical ranks of d at each frequency separately; the
    answer is C(k, l) times the number of frequencies on which every X_j . n
    vanishes.
    """
    k = action.k
    ranks = {l: 0 for l in range(-1, k + 1)}
    axes = [range(-radius, radius + 1)] * action.d
    for n in np.array(np.meshgrid(*axes, indexing="ij")).reshape(action.d, -1).T:
        w = 2j * math.pi * action.pairings(n)
        if action.exact_zero(n):
            w = np.zeros(k, dtype=complex)
        for l in range(k):
            m = _koszul_matrix(w, k, l)
            ranks[l] += int(np.linalg.matrix_rank(m, tol=tol)) if m.size else 0
    size = (2 * radius + 1) ** action.d
    return [comb(k, l) * size - ranks[l] - ranks[l - 1] for l in range(k + 1)]


@dataclass
class DeltaResult:
    primitive: Cochain
    residual: float
    tame_ratio: float


def tame_inverse_delta(omega: Cochain, *, r: float = 0.0, tau: float = 1.0, tol: float = EXACT_TOL) -> DeltaResult:
    """delta(omega) = d* Delta^{-1} omega, a primitive of an exact cochain."""
    if omega.degree == 0:
        raise ValueError("degree-0 cochains are never exact")
    parts = hodge_decompose(omega)
    scale = max(1.0, omega.norm())
    harm = math.sqrt(sum(abs(c) ** 2 for c in parts.harmonic.coeffs.values()))
    if harm > tol * scale or parts.coexact.norm() > tol * scale:
        raise NotExactError(
            f"harmonic part {harm:.3e} and coexact part {parts.coexact.norm():.3e} must vanish"
        )
    primitive = codifferential(inverse_laplacian(omega.without_harmonic()))
    residual = (differential(primitive) - omega).norm()
    if residual > tol * scale:
        raise ArithmeticError(f"d(delta omega) misses omega by {residual:.3e}")
    denom = omega.norm(r + 2 * tau)
    ratio = 0.0 if denom == 0.0 else primitive.norm(r) / denom
    return DeltaResult(primitive, residual, ratio)


# -- cocycles and 1-forms ---------------------------------------------------------


def _segment_factor(theta: np.ndarray) -> np.ndarray:
    """(e^{2 pi i theta} - 1) / (2 pi i theta), with its Taylor expansion near 0."""
    theta = np.asarray(theta, dtype=float)
    small = np.abs(theta) < TAYLOR_CUTOFF
    safe = np.where(small, 1.0, theta)
    z = 2j * math.pi * safe
    exact = np.expm1(z) / z
    taylor = 1 + 1j * math.pi * theta - (2 / 3) * math.pi**2 * theta**2
    return np.where(small, taylor, exact)


def check_closed(omega: Cochain, tol: float = CLOSED_TOL) -> float:
    if omega.degree >= omega.k:
        return 0.0
    defect = differential(omega).norm()
    if defect > tol * max(1.0, omega.norm()):
        raise NotClosedError(f"d omega has norm {defect:.3e}")
    return defect


def _cocycle_values(omega: Cochain, t, x) -> np.ndarray:
    act = omega.action
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    shape = np.broadcast_shapes(t.shape[:-1], x.shape[:-1])
    rho = t @ act.generators.T
    total = np.zeros(shape, dtype=complex)
    modes: dict[Frequency, np.ndarray] = {}
    for I, u in omega.items():
        j = I.indices[0] - 1
        for n, c in u:
            modes.setdefault(n, np.zeros(act.k, dtype=complex))[j] += c
    for n, coeffs in modes.items():
        nv = np.array(n, dtype=float)
        weight = t @ coeffs
        total = total + weight * np.exp(2j * math.pi * (x @ nv)) * _segment_factor(rho @ nv)
    return total


def cocycle_from_form(omega: Cochain, t, x, *, check: bool = True):
    """S(omega)(t, x): integral of omega along the orbit segment s -> alpha(s t) x, s in [0, 1].

    ``t`` has shape (..., k) and ``x`` shape (..., d); they broadcast.
    """
    if omega.degree != 1:
        raise ValueError(f"cocycles come from degree-1 cochains, got degree {omega.degree}")
    if check:
        check_closed(omega)
    out = _cocycle_values(omega, t, x)
    return complex(out) if out.ndim == 0 else out


class AbelianCocycle:
    """A C^n-valued cocycle over R^k given by n closed 1-forms."""

    def __init__(self, action: TranslationAction, forms: Sequence[Cochain]):
        if not forms:
            raise ValueError("need at least one component")
        for pos, form in enumerate(forms):
            if form.degree != 1 or form.action is not action:
                raise ValueError(f"component {pos} is not a degree-1 cochain of this action")
            try:
                check_closed(form)
            except NotClosedError as exc:
                raise NotClosedError(f"component {pos}: {exc}") from exc
        self.action = action
        self.forms = tuple(forms)

    @property
    def n(self) -> int:
        return len(self.forms)

    def __call__(self, t, x) -> np.ndarray:
        """Values of shape (..., n)."""
        return np.stack([_cocycle_values(f, t, x) for f in self.forms], axis=-1)

    def component(self, i: int) -> Callable:
        return lambda t, x: _cocycle_values(self.forms[i], t, x)

    def identity_defect(self, t, s, x) -> float:
        """max |beta(t + s, x) - beta(t, alpha(s) x) - beta(s, x)|."""
        t, s, x = (np.asarray(a, dtype=float) for a in (t, s, x))
        moved = x + s @ self.action.generators.T
        return float(np.max(np.abs(self(t + s, x) - self(t, moved) - self(s, x))))


def form_from_cocycle(
    beta: Callable, X, x, *, atol: float = 1e-13, rtol: float = 1e-12, initial_step: float = 0.5
) -> np.ndarray:
    """d/ds beta(s X, x) at s = 0 for each point x of shape (m, d).

    Central differences with Richardson extrapolation; real and imaginary
    parts are differentiated separately. ``initial_step`` should be well
    below one period of the fastest oscillation of beta along X.
    """
    X = np.asarray(X, dtype=float)
    pts = np.atleast_2d(np.asarray(x, dtype=float))
    idx = np.arange(len(pts))

    def part(fn):
        def f(s, i):
            return fn(beta(s[..., None] * X, pts[i.astype(int)]))
        res = derivative(
            f,
            np.zeros(len(pts)),
            args=(idx,),
            tolerances={"atol": atol, "rtol": rtol},
            initial_step=initial_step,
            maxiter=15,
        )
        if not np.all(res.success):
            bad = int(np.argmin(res.success))
            raise NonDifferentiableError(
                f"extrapolated derivatives disagree at point {pts[bad].tolist()} (error estimate {res.error[bad]:.3e})"
            )
        return res.df

    return part(np.real) + 1j * part(np.imag)


def recover_form(beta: Callable, action: TranslationAction, radius: int, *, drop: float = 1e-12) -> Cochain:
    """T(beta): the degree-1 cochain X_j -> d/ds beta(s e_j, .) sampled on a grid and transformed back.

    Exact for cocycles whose derivative is supported in |n|_inf <= radius.
    """
    d, k = action.d, action.k
    M = 2 * radius + 2
    axes = np.arange(M) / M
    grid = np.stack(np.meshgrid(*([axes] * d), indexing="ij"), axis=-1).reshape(-1, d)
    comps = {}
    for j in range(k):
        # a mode n oscillates in s at rate |X_j . n| <= |X_j|_1 radius
        speed = float(np.sum(np.abs(action.column(j + 1)))) * radius
        step = min(0.5, 0.05 / max(speed, 1e-12))
        samples = form_from_cocycle(beta, np.eye(k)[j], grid, initial_step=step).reshape((M,) * d)
        coeffs = np.fft.fftn(samples) / M**d
        series = {}
        for n in np.ndindex(*coeffs.shape):
            freq = tuple(a if a <= M // 2 else a - M for a in n)
            if max(map(abs, freq)) <= radius and abs(coeffs[n]) > drop:
                series[freq] = coeffs[n]
        comps[MultiIndex((j + 1,), k)] = FourierSeries(d, series)
    return Cochain(action, 1, comps)
