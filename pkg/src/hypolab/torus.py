"""Translation actions on T^d and the small divisor problem in Fourier space.

Functions are finitely supported trigonometric polynomials, stored as
``{frequency: coefficient}``. Every operator here is a Fourier multiplier, so
nothing is sampled on a grid and truncation is exact.

Norms of frequencies are Euclidean everywhere (diophantine inequality and
Sobolev weights); exhaustive scans walk the sup-norm shells ``|n|_inf = R``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType
from typing import Mapping, Sequence

import numpy as np

from .rational import to_fraction

PHI = (1 + math.sqrt(5)) / 2
FOUR_PI_SQ = 4 * math.pi**2
NEAR_RESONANCE = 1e-14

Frequency = tuple[int, ...]


class ResonanceError(ArithmeticError):
    """A divisor vanishes at a frequency carried by the data."""

    def __init__(self, frequency: Sequence[int], message: str | None = None):
        self.frequency = tuple(int(x) for x in frequency)
        super().__init__(message or f"resonance at frequency {self.frequency}")


class NearResonanceWarning(RuntimeWarning):
    pass


# -- actions -----------------------------------------------------------------


class TranslationAction:
    """T(t)x = x + rho(t) on T^d, with rho(e_j) = X_j the j-th column.

    ``exact`` holds rational generators when they are known exactly; it turns
    resonance detection into integer arithmetic.
    """

    def __init__(self, generators, exact: Sequence[Sequence] | None = None, name: str = ""):
        gens = np.array(generators, dtype=float)
        if gens.ndim != 2 or gens.shape[0] < 1 or gens.shape[1] < 1:
            raise ValueError("generators must be a nonempty d x k matrix")
        if not np.all(np.isfinite(gens)):
            raise ValueError("generator entries must be finite")
        self.generators = gens
        self.generators.setflags(write=False)
        self.name = name
        self.exact: tuple[tuple[Fraction, ...], ...] | None = None
        self._integer = None
        if exact is not None:
            rows = tuple(tuple(to_fraction(x) for x in row) for row in exact)
            if np.array(rows, dtype=float).shape != gens.shape:
                raise ValueError("exact generators have the wrong shape")
            self.exact = rows
            denom = math.lcm(*(x.denominator for row in rows for x in row))
            self._integer = np.array([[int(x * denom) for x in row] for row in rows], dtype=object)

    @property
    def d(self) -> int:
        return self.generators.shape[0]

    @property
    def k(self) -> int:
        return self.generators.shape[1]

    def column(self, j: int) -> np.ndarray:
        """X_j for 1-based j."""
        if not 1 <= j <= self.k:
            raise IndexError(f"generator index {j} out of range 1..{self.k}")
        return self.generators[:, j - 1]

    def __repr__(self) -> str:
        label = f" {self.name!r}" if self.name else ""
        return f"TranslationAction{label}(d={self.d}, k={self.k})"

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], name: str = "") -> "TranslationAction":
        """Build from generator columns; all-rational input (ints, Fractions, strings) stays exact."""
        cols = [list(c) for c in columns]
        exact = None
        if all(isinstance(x, (int, Fraction, str)) and not isinstance(x, bool) for c in cols for x in c):
            exact_cols = [[to_fraction(x) for x in c] for c in cols]
            exact = [list(r) for r in zip(*exact_cols)]
            floats = [[float(x) for x in r] for r in exact]
        else:
            floats = [list(r) for r in zip(*[[float(x) for x in c] for c in cols])]
        return cls(floats, exact=exact, name=name)

    def pairings(self, n: Sequence[int]) -> np.ndarray:
        """(X_1 . n, ..., X_k . n)."""
        n = np.asarray(n, dtype=float)
        if n.shape != (self.d,):
            raise ValueError(f"frequency {tuple(n)} does not live in Z^{self.d}")
        return n @ self.generators

    def exact_zero(self, n: Sequence[int], j: int | None = None) -> bool | None:
        """Whether X_j . n (or every X_j . n) vanishes exactly; ``None`` if generators are not rational."""
        if self._integer is None:
            return None
        vals = [sum(int(a) * int(b) for a, b in zip(n, self._integer[:, c])) for c in range(self.k)]
        return vals[j - 1] == 0 if j is not None else not any(vals)

    def to_json(self) -> dict:
        if self.exact is not None:
            cols = [[_fraction_str(self.exact[r][c]) for r in range(self.d)] for c in range(self.k)]
        else:
            cols = [[float(x) for x in self.generators[:, c]] for c in range(self.k)]
        return {"d": self.d, "k": self.k, "generators": cols}

    @classmethod
    def from_json(cls, data) -> "TranslationAction":
        if not isinstance(data, dict) or not {"d", "k", "generators"} <= data.keys():
            raise ValueError("action file needs fields d, k, generators")
        d, k, cols = data["d"], data["k"], data["generators"]
        if not isinstance(cols, list) or len(cols) != k or any(not isinstance(c, list) or len(c) != d for c in cols):
            raise ValueError(f"field 'generators' must hold {k} columns of length {d}")
        return cls.from_columns(cols)


def _fraction_str(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def golden() -> TranslationAction:
    """The linear flow on T^2 in direction (1, phi)."""
    return TranslationAction([[1.0], [PHI]], name="golden")


def golden_2d() -> TranslationAction:
    """R^2 acting on T^2 by X_1 = (1, 0), X_2 = (0, phi)."""
    return TranslationAction([[1.0, 0.0], [0.0, PHI]], name="golden-2d")


def golden_type(k: int) -> TranslationAction:
    """R^k on T^k with X_j = e_j + phi e_{j+1 mod k}."""
    gens = np.eye(k)
    for j in range(k):
        gens[(j + 1) % k, j] += PHI
    return TranslationAction(gens, name=f"golden-type-{k}")


def rational_half() -> TranslationAction:
    return TranslationAction.from_columns([[1, Fraction(1, 2)]], name="rational-half")


def liouville_number(terms: int) -> float:
    return sum(10.0 ** (-math.factorial(j)) for j in range(1, terms + 1))


def liouville(terms: int = 4) -> TranslationAction:
    """The flow in direction (1, sum_{j <= terms} 10^{-j!})."""
    return TranslationAction([[1.0], [liouville_number(terms)]], name=f"liouville-{terms}")


# -- Fourier series --------------------------------------------------------


class FourierSeries:
    """A trigonometric polynomial sum_n c_n e^{2 pi i n.x} on T^d."""

    __slots__ = ("d", "_coeffs")

    def __init__(self, d: int, coeffs: Mapping[Sequence[int], complex] | None = None):
        if d < 1:
            raise ValueError("torus dimension must be positive")
        clean: dict[Frequency, complex] = {}
        for n, c in (coeffs or {}).items():
            key = tuple(int(x) for x in n)
            if len(key) != d:
                raise ValueError(f"frequency {key} does not live in Z^{d}")
            c = complex(c)
            if c != 0:
                clean[key] = clean.get(key, 0) + c
                if clean[key] == 0:
                    del clean[key]
        self.d = d
        self._coeffs = clean

    @property
    def coeffs(self) -> Mapping[Frequency, complex]:
        return MappingProxyType(self._coeffs)

    @classmethod
    def mode(cls, n: Sequence[int], c: complex = 1.0) -> "FourierSeries":
        return cls(len(n), {tuple(n): c})

    @classmethod
    def constant(cls, d: int, c: complex) -> "FourierSeries":
        return cls(d, {(0,) * d: c})

    @classmethod
    def zero(cls, d: int) -> "FourierSeries":
        return cls(d)

    def __getitem__(self, n: Sequence[int]) -> complex:
        return self._coeffs.get(tuple(n), 0j)

    def __len__(self) -> int:
        return len(self._coeffs)

    def __iter__(self):
        return iter(self._coeffs.items())

    def __bool__(self) -> bool:
        return bool(self._coeffs)

    def __repr__(self) -> str:
        return f"FourierSeries(d={self.d}, modes={len(self)})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, FourierSeries):
            return NotImplemented
        return self.d == other.d and self._coeffs == other._coeffs

    def _check(self, other: "FourierSeries") -> None:
        if self.d != other.d:
            raise ValueError(f"series on T^{self.d} and T^{other.d}")

    def __add__(self, other: "FourierSeries") -> "FourierSeries":
        self._check(other)
        out = dict(self._coeffs)
        for n, c in other._coeffs.items():
            out[n] = out.get(n, 0) + c
        return FourierSeries(self.d, out)

    def __neg__(self) -> "FourierSeries":
        return FourierSeries(self.d, {n: -c for n, c in self._coeffs.items()})

    def __sub__(self, other: "FourierSeries") -> "FourierSeries":
        return self + (-other)

    def __mul__(self, scalar: complex) -> "FourierSeries":
        return FourierSeries(self.d, {n: scalar * c for n, c in self._coeffs.items()})

    __rmul__ = __mul__

    @property
    def mean(self) -> complex:
        return self[(0,) * self.d]

    def without_mean(self) -> "FourierSeries":
        return FourierSeries(self.d, {n: c for n, c in self._coeffs.items() if any(n)})

    def support(self) -> list[Frequency]:
        return sorted(self._coeffs)

    @property
    def radius(self) -> int:
        return max((max(abs(x) for x in n) for n in self._coeffs), default=0)

    def multiply(self, symbol) -> "FourierSeries":
        """Apply the Fourier multiplier n -> symbol(n)."""
        return FourierSeries(self.d, {n: symbol(n) * c for n, c in self._coeffs.items()})

    def is_real(self, tol: float = 0.0) -> bool:
        for n, c in self._coeffs.items():
            partner = self[tuple(-x for x in n)]
            if abs(partner - c.conjugate()) > tol:
                return False
        return True

    def evaluate(self, x) -> np.ndarray | complex:
        """u(x) for points x of shape (..., d)."""
        x = np.asarray(x, dtype=float)
        if not self._coeffs:
            return np.zeros(x.shape[:-1], dtype=complex) if x.ndim > 1 else 0j
        freqs = np.array(list(self._coeffs), dtype=float)
        cs = np.array(list(self._coeffs.values()))
        vals = np.exp(2j * np.pi * (x @ freqs.T)) @ cs
        return vals if x.ndim > 1 else complex(vals)

    def inner(self, other: "FourierSeries") -> complex:
        """L^2(T^d) inner product by Plancherel, linear in the first slot."""
        self._check(other)
        return sum((c * other[n].conjugate() for n, c in self._coeffs.items()), 0j)

    def max_abs_coefficient(self) -> float:
        return max((abs(c) for c in self._coeffs.values()), default=0.0)

    def to_json(self) -> list[dict]:
        return [{"n": list(n), "re": c.real, "im": c.imag} for n, c in sorted(self._coeffs.items())]

    @classmethod
    def from_json(cls, data, d: int | None = None) -> "FourierSeries":
        if not isinstance(data, list):
            raise ValueError("Fourier series must be a JSON array of {n, re, im} records")
        coeffs: dict[Frequency, complex] = {}
        for pos, rec in enumerate(data):
            if not isinstance(rec, dict) or "n" not in rec:
                raise ValueError(f"record {pos}: expected object with field 'n'")
            n = tuple(int(x) for x in rec["n"])
            coeffs[n] = coeffs.get(n, 0) + complex(float(rec.get("re", 0.0)), float(rec.get("im", 0.0)))
        dims = {len(n) for n in coeffs}
        if d is None:
            if len(dims) != 1:
                raise ValueError("cannot infer the torus dimension of this series")
            d = dims.pop()
        elif dims - {d}:
            raise ValueError(f"series frequencies do not live in Z^{d}")
        return cls(d, coeffs)

    @classmethod
    def random(
        cls,
        d: int,
        radius: int,
        terms: int,
        rng: np.random.Generator,
        *,
        real: bool = False,
        include_mean: bool = True,
    ) -> "FourierSeries":
        """Random polynomial with up to ``terms`` modes in |n|_inf <= radius."""
        coeffs: dict[Frequency, complex] = {}
        for _ in range(terms):
            n = tuple(int(x) for x in rng.integers(-radius, radius + 1, size=d))
            if not include_mean and not any(n):
                continue
            c = complex(rng.normal(), rng.normal())
            coeffs[n] = coeffs.get(n, 0) + c
            if real:
                m = tuple(-x for x in n)
                coeffs[m] = coeffs.get(m, 0) + c.conjugate()
        return cls(d, coeffs)


# -- symbols and scans -------------------------------------------------------


def laplacian_symbol(act: TranslationAction, n: Sequence[int]) -> float:
    """4 pi^2 sum_j |X_j . n|^2, the eigenvalue of the orbitwise laplacian on e^{2 pi i n.x}."""
    vals = act.pairings(n)
    if act.exact_zero(n):
        return 0.0
    return FOUR_PI_SQ * float(np.dot(vals, vals))


def lattice_shell(radius: int, d: int, *, half: bool = False) -> np.ndarray:
    """All n in Z^d with |n|_inf == radius, one row each, in a fixed order.

    With ``half`` only one of each pair {n, -n} is returned.
    """
    if radius == 0:
        return np.zeros((1, d), dtype=np.int64)
    inner = np.arange(-radius + 1, radius, dtype=np.int64)
    full = np.arange(-radius, radius + 1, dtype=np.int64)
    faces = np.array([radius] if half else [-radius, radius], dtype=np.int64)
    blocks = []
    for i in range(d):
        axes = [inner] * i + [faces] + [full] * (d - i - 1)
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
        blocks.append(grid)
    return np.concatenate(blocks)


def canonical_sign(n: Sequence[int]) -> Frequency:
    """n or -n, whichever has a positive first nonzero entry."""
    n = tuple(int(x) for x in n)
    for x in n:
        if x:
            return n if x > 0 else tuple(-y for y in n)
    return n


def _shell_values(act: TranslationAction, pts: np.ndarray, tau: float) -> np.ndarray:
    proj = pts.astype(float) @ act.generators
    vals = np.sqrt(np.einsum("ij,ij->i", proj, proj))
    if act._integer is not None:
        ints = act._integer.astype(np.int64) if _fits_int64(act) else None
        if ints is not None:
            zero = ~np.any(pts @ ints, axis=1)
        else:
            zero = np.array([act.exact_zero(p) for p in pts])
        vals[zero] = 0.0
    norms = np.sqrt(np.einsum("ij,ij->i", pts, pts).astype(float))
    return vals * norms**tau


def _fits_int64(act: TranslationAction) -> bool:
    return all(abs(int(x)) < 2**40 for x in act._integer.ravel())


VERDICT_CONSISTENT = "diophantine-consistent"
VERDICT_FAILING = "failing"
VERDICT_RESONANT = "resonant"


@dataclass
class DiophantineReport:
    """Finite-scale evidence for sum_j |X_j.n|^2 >= K^2 / |n|^(2 tau); never a proof."""

    tau: float
    radius: int
    k_hat: float
    argmin: Frequency
    table: np.ndarray = field(repr=False)
    verdict: str
    decay_ratio: float

    def k_hat_at(self, R: int) -> float:
        """min over 0 < |n|_inf <= R."""
        if not 1 <= R <= self.radius:
            raise ValueError(f"R must lie in 1..{self.radius}")
        return float(self.table[R - 1])

    @property
    def passes(self) -> bool:
        return self.verdict == VERDICT_CONSISTENT

    def to_json(self, *, full_table: bool = True) -> dict:
        out = {
            "tau": self.tau,
            "radius": self.radius,
            "k_hat": self.k_hat,
            "argmin": list(self.argmin),
            "verdict": self.verdict,
            "decay_ratio": self.decay_ratio,
        }
        if full_table:
            out["table"] = [float(x) for x in self.table]
        return out


def diophantine_scan(act: TranslationAction, tau: float, radius: int, *, decay_factor: float = 10.0) -> DiophantineReport:
    """Exhaustive scan of 0 < |n|_inf <= radius for the constant K_hat.

    ``table[R-1]`` is K_hat restricted to |n|_inf <= R. The verdict is
    "failing" when K_hat drops by ``decay_factor`` or more between
    R = floor(sqrt(radius)) and R = radius, "resonant" on an exact zero.
    """
    if radius < 1:
        raise ValueError("scan radius must be at least 1")
    best = math.inf
    best_n: Frequency = ()
    table = np.empty(radius)
    for R in range(1, radius + 1):
        # K_hat is even in n, so half of each shell suffices
        pts = lattice_shell(R, act.d, half=True)
        vals = _shell_values(act, pts, tau)
        i = int(np.argmin(vals))
        if vals[i] < best:
            best = float(vals[i])
            best_n = canonical_sign(pts[i])
        table[R - 1] = best
    mid = max(1, math.isqrt(radius))
    if best == 0.0:
        verdict, ratio = VERDICT_RESONANT, math.inf
    else:
        ratio = float(table[mid - 1] / table[-1])
        verdict = VERDICT_FAILING if ratio >= decay_factor else VERDICT_CONSISTENT
    return DiophantineReport(float(tau), radius, best, best_n, table, verdict, ratio)


# -- solvers -----------------------------------------------------------------


@dataclass
class SolveResult:
    """u solving L u = v - mean(v); ``obstruction`` is the mean that cannot be reached."""

    solution: FourierSeries
    obstruction: complex


def _check_dim(act: TranslationAction, v: FourierSeries) -> None:
    if v.d != act.d:
        raise ValueError(f"series lives on T^{v.d}, action on T^{act.d}")


def _near_resonance(act: TranslationAction, n: Frequency, size: float) -> None:
    if act.exact is None and size < NEAR_RESONANCE * math.sqrt(sum(x * x for x in n)):
        warnings.warn(f"near-resonance at frequency {n}: divisor {size:.3e}", NearResonanceWarning, stacklevel=3)


def apply_laplacian(act: TranslationAction, u: FourierSeries) -> FourierSeries:
    """Delta_T u = -(X_1^2 + ... + X_k^2) u."""
    _check_dim(act, u)
    return u.multiply(lambda n: laplacian_symbol(act, n))


def apply_vectorfield(act: TranslationAction, j: int, u: FourierSeries) -> FourierSeries:
    """X_j u, the derivative along the j-th generator."""
    _check_dim(act, u)
    X = act.column(j)
    return u.multiply(lambda n: 2j * math.pi * float(np.dot(X, n)))


def solve_laplacian(act: TranslationAction, v: FourierSeries) -> SolveResult:
    _check_dim(act, v)
    out: dict[Frequency, complex] = {}
    for n, c in v:
        if not any(n):
            continue
        sym = laplacian_symbol(act, n)
        if sym == 0.0:
            raise ResonanceError(canonical_sign(n))
        _near_resonance(act, n, math.sqrt(sym) / (2 * math.pi))
        out[n] = c / sym
    return SolveResult(FourierSeries(act.d, out), v.mean)


def solve_vectorfield(act: TranslationAction, j: int, v: FourierSeries) -> SolveResult:
    _check_dim(act, v)
    X = act.column(j)
    out: dict[Frequency, complex] = {}
    for n, c in v:
        if not any(n):
            continue
        pairing = float(np.dot(X, n))
        if act.exact_zero(n, j) or pairing == 0.0:
            raise ResonanceError(canonical_sign(n), f"X_{j} . n vanishes at frequency {canonical_sign(n)}")
        _near_resonance(act, n, abs(pairing))
        out[n] = c / (2j * math.pi * pairing)
    return SolveResult(FourierSeries(act.d, out), v.mean)


def sobolev_norm(u: FourierSeries, s: float) -> float:
    """(sum_n (1 + |n|^2)^s |u_n|^2)^(1/2)."""
    total = 0.0
    for n, c in u:
        total += (1 + sum(x * x for x in n)) ** s * abs(c) ** 2
    return math.sqrt(total)


# -- tame estimates ------------------------------------------------------------


@dataclass
class TameEstimate:
    order: float
    loss: float
    empirical: float
    mode_sweep: float
    worst_mode: Frequency
    analytic_bound: float
    k_hat: float

    def to_json(self) -> dict:
        return {
            "r": self.order,
            "r0": self.loss,
            "empirical_C_r": self.empirical,
            "mode_sweep_C_r": self.mode_sweep,
            "worst_mode": list(self.worst_mode),
            "analytic_bound": self.analytic_bound,
            "k_hat": self.k_hat,
        }


def tame_ratio(act: TranslationAction, v: FourierSeries, tau: float, r: float) -> float:
    """||Delta_T^{-1} v||_r / ||v - mean||_{r + 2 tau}; 0 for constant v."""
    u = solve_laplacian(act, v).solution
    denom = sobolev_norm(v.without_mean(), r + 2 * tau)
    return 0.0 if denom == 0.0 else sobolev_norm(u, r) / denom


def single_mode_sweep(act: TranslationAction, tau: float, radius: int) -> tuple[float, Frequency]:
    """max over 0 < |n|_inf <= radius of the single-mode tame ratio (1 + |n|^2)^(-tau) / symbol(n).

    The ratio does not depend on the order r.
    """
    worst = 0.0
    worst_n: Frequency = ()
    for R in range(1, radius + 1):
        pts = lattice_shell(R, act.d, half=True)
        sym = FOUR_PI_SQ * _shell_values(act, pts, 0.0) ** 2
        if np.any(sym == 0.0):
            raise ResonanceError(canonical_sign(pts[int(np.argmin(sym))]))
        ratio = (1.0 + np.einsum("ij,ij->i", pts, pts)) ** (-tau) / sym
        i = int(np.argmax(ratio))
        if ratio[i] > worst:
            worst, worst_n = float(ratio[i]), canonical_sign(pts[i])
    return worst, worst_n


def tame_constant_estimate(
    act: TranslationAction,
    tau: float,
    r: float,
    trials: int,
    radius: int,
    rng: np.random.Generator,
    *,
    terms: int = 12,
) -> TameEstimate:
    """Empirical C_r in ||Delta_T^{-1} v||_r <= C_r ||v||_{r + 2 tau} against 1 / (4 pi^2 K_hat^2)."""
    scan = diophantine_scan(act, tau, radius)
    if scan.k_hat == 0.0:
        raise ResonanceError(scan.argmin)
    empirical = 0.0
    for _ in range(trials):
        v = FourierSeries.random(act.d, radius, terms, rng)
        empirical = max(empirical, tame_ratio(act, v, tau, r))
    sweep, worst = single_mode_sweep(act, tau, radius)
    return TameEstimate(
        order=float(r),
        loss=2 * float(tau),
        empirical=empirical,
        mode_sweep=sweep,
        worst_mode=worst,
        analytic_bound=1.0 / (FOUR_PI_SQ * scan.k_hat**2),
        k_hat=scan.k_hat,
    )

