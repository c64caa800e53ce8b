"""Quantitative acceptance checks, one test group per criterion.

Run ``pytest tests/test_acceptance.py`` to get one PASS/FAIL line per
criterion at the end of the session output.
"""

import math
import random
import time
from fractions import Fraction

import numpy as np
import pytest

from hypolab import dyncoh, heis, liealg, torus
from hypolab import rational as Q
from hypolab.cecoh import AlgCochain, adjoint_rep, ce_differential, trivial_rep
from hypolab.exterior import ExtVector, MultiIndex, inner_product
from hypolab.liealg import Subspace

criterion = pytest.mark.criterion


# 1 -----------------------------------------------------------------------------------


@criterion("1", "exterior identities, exhaustive k <= 5")
def test_exterior_identities_exhaustive():
    start = time.perf_counter()
    for k in range(1, 6):
        for l in range(k + 1):
            for I in MultiIndex.all(k, l):
                e = ExtVector.basis(I, Fraction(1))
                for i in range(1, k + 1):
                    for j in range(1, k + 1):
                        ej = e.wedge(j)
                        lhs = ej.contract(i) if l < k else ExtVector.zero(k, l)
                        rhs = e.contract(i).wedge(j) if l > 0 else ExtVector.zero(k, l)
                        if i == j and j not in I:
                            assert lhs == e and not rhs
                        elif i == j:
                            assert not lhs and rhs == e
                        else:
                            assert lhs == -rhs
                    if l < k:
                        for J in MultiIndex.all(k, l + 1):
                            f = ExtVector.basis(J, Fraction(1))
                            assert inner_product(e.wedge(i), f) == inner_product(e, f.contract(i))
    assert time.perf_counter() - start < 1.0


# 2 -----------------------------------------------------------------------------------

CE_ALGEBRAS = {
    "h1": liealg.heisenberg(1),
    "h2": liealg.heisenberg(2),
    "f3": liealg.filiform(3),
    "g23": liealg.free_nilpotent_2_3(),
    "ab4": liealg.abelian(4),
}


@criterion("2", "CE complex d^2 = 0 on random rational cochains")
def test_ce_d_squared():
    start = time.perf_counter()
    rng = random.Random(2024)
    for alg in CE_ALGEBRAS.values():
        for rep in (trivial_rep(alg), adjoint_rep(alg)):
            for _ in range(100):
                degree = rng.randrange(alg.dim - 1)
                w = AlgCochain.random(rep, degree, rng)
                assert ce_differential(rep, ce_differential(rep, w)).is_zero()
    assert time.perf_counter() - start < 5.0


# 3 -----------------------------------------------------------------------------------


def series(g):
    return [s.dim for s in liealg.lower_central_series(g)]


@criterion("3", "lower central series")
def test_lower_central_series():
    for g in range(1, 5):
        assert series(liealg.heisenberg(g)) == [2 * g + 1, 1, 0]
    for g in range(1, 6):
        assert series(liealg.filiform(g)) == [g + 1] + list(range(g - 1, -1, -1))
    assert series(liealg.free_nilpotent_2_3()) == [5, 3, 2, 0]


# 4 -----------------------------------------------------------------------------------


def random_invertible(n, rng):
    while True:
        m = [[Fraction(rng.randint(-4, 4), rng.randint(1, 4)) for _ in range(n)] for _ in range(n)]
        if Q.rank(m) == n:
            return m


@criterion("4", "classification round trips")
def test_heisenberg_round_trip():
    rng = random.Random(4)
    for g in range(1, 5):
        for n in range(0, 4):
            alg = liealg.direct_product(liealg.heisenberg(g), liealg.abelian(n)) if n else liealg.heisenberg(g)
            t = liealg.classify_2step_dim1(liealg.change_basis(alg, random_invertible(alg.dim, rng)))
            assert (t.g, t.n) == (g, n)


@criterion("4", "classification round trips")
def test_filiform_round_trip():
    rng = random.Random(44)
    for g in range(1, 6):
        for n in range(0, 4):
            alg = liealg.direct_product(liealg.filiform(g), liealg.abelian(n)) if n else liealg.filiform(g)
            perm = list(range(alg.dim))
            rng.shuffle(perm)
            rows = [[Fraction(int(c == perm[r])) for c in range(alg.dim)] for r in range(alg.dim)]
            moved = liealg.change_basis(alg, rows)
            zi = perm.index(0)  # new position of Y
            a = Subspace.span(moved.dim, [moved.basis_vector(i) for i in range(moved.dim) if i != zi])
            prof = liealg.classify_codim1_abelian(moved, a, moved.basis_vector(zi))
            if g == 1:
                # f^1 is abelian, ad_Y = 0
                assert prof.verdict == liealg.VERDICT_ABELIAN and prof.euclid_n == n + 1
            else:
                assert prof.verdict == liealg.VERDICT_FILIFORM
                assert (prof.filiform_g, prof.euclid_n) == (g, n)


# 5 -----------------------------------------------------------------------------------


@criterion("5", "diagonal laplacian on golden-type actions")
@pytest.mark.parametrize("k", [2, 3])
def test_diagonal_laplacian(k):
    start = time.perf_counter()
    act = torus.golden_type(k)
    rng = np.random.default_rng(50 + k)
    for l in range(k + 1):
        for _ in range(50):
            w = dyncoh.Cochain.random(act, l, 4, rng)
            comp = dyncoh.cochain_laplacian(w)
            diag = dyncoh.diagonal_laplacian(w)
            for I in MultiIndex.all(k, l):
                a, b = comp[I], diag[I]
                for n in set(a.coeffs) | set(b.coeffs):
                    # every term landing on (I, n) is bounded by symbol(n) max_J |u_J(n)|
                    scale = torus.laplacian_symbol(act, n) * max(abs(w[J][n]) for J in MultiIndex.all(k, l))
                    assert abs(a[n] - b[n]) <= 1e-12 * max(1.0, scale)
    assert time.perf_counter() - start < 10.0


# 6 -----------------------------------------------------------------------------------


@criterion("6", "Hodge decomposition")
@pytest.mark.parametrize("k", [2, 3])
def test_hodge(k):
    act = torus.golden_type(k)
    rng = np.random.default_rng(60 + k)
    for l in range(k + 1):
        for _ in range(20):
            w = dyncoh.Cochain.random(act, l, 4, rng)
            res = dyncoh.hodge_decompose(w).residuals(w)
            assert max(res.values()) <= 1e-11
    assert dyncoh.cohomology_dims(act, 3) == [math.comb(k, l) for l in range(k + 1)]


# 7 -----------------------------------------------------------------------------------


@criterion("7", "small-divisor solver")
def test_small_divisor_solver():
    act = torus.golden()
    rng = np.random.default_rng(7)
    for _ in range(100):
        v = torus.FourierSeries.random(2, 20, 15, rng)
        u = torus.solve_laplacian(act, v).solution
        assert (torus.apply_laplacian(act, u) - v.without_mean()).max_abs_coefficient() <= 1e-12
    with pytest.raises(torus.ResonanceError) as info:
        torus.solve_laplacian(torus.rational_half(), torus.FourierSeries.mode((1, -2)))
    assert info.value.frequency == (1, -2)


# 8 -----------------------------------------------------------------------------------


@criterion("8", "diophantine scans")
def test_golden_scan():
    start = time.perf_counter()
    rep = torus.diophantine_scan(torus.golden(), 1.0, 1000)
    assert rep.k_hat >= 0.8
    assert time.perf_counter() - start < 30


@criterion("8", "diophantine scans")
def test_liouville_decay():
    start = time.perf_counter()
    rep = torus.diophantine_scan(torus.liouville(4), 2.0, 10**4)
    assert time.perf_counter() - start < 30
    assert rep.k_hat_at(10) / rep.k_hat >= 10


# 9 -----------------------------------------------------------------------------------


@criterion("9", "cocycle bijection")
def test_cocycle_roundtrip():
    rng = np.random.default_rng(9)
    for act in (torus.golden_2d(), torus.golden_type(3)):
        for _ in range(25):
            om = dyncoh.Cochain.random_closed(act, 1, 3, rng)
            beta = dyncoh.AbelianCocycle(act, [om])
            back = dyncoh.recover_form(beta.component(0), act, 3)
            assert (back - om).norm() <= 1e-8
            t, s = rng.normal(size=(2, 5, act.k))
            x = rng.random(size=(5, act.d))
            assert beta.identity_defect(t, s, x) <= 1e-9


@criterion("9", "cocycle bijection")
def test_constant_covector_is_fixed():
    act = torus.golden_type(3)
    rng = np.random.default_rng(99)
    L = ExtVector(3, 1, {I: float(rng.normal()) for I in MultiIndex.all(3, 1)})
    om = dyncoh.Cochain.constant(act, L)
    t = rng.normal(size=(6, 3))
    x = rng.random(size=(6, 3))
    expected = sum(t[:, I.indices[0] - 1] * c for I, c in L.coeffs.items())
    assert np.max(np.abs(dyncoh.cocycle_from_form(om, t, x) - expected)) <= 1e-12
    back = dyncoh.recover_form(dyncoh.AbelianCocycle(act, [om]).component(0), act, 1)
    assert (back - om).norm() <= 1e-8


# 10 ----------------------------------------------------------------------------------


@criterion("10", "Heisenberg obstruction")
def test_heisenberg_obstruction():
    model = heis.SchrodingerModel(2, 2)
    w = heis.attempt_solve_multiplication(model, heis.gaussian)
    assert isinstance(w, heis.ObstructionWitness) and w.value == 1
    sol = heis.attempt_solve_multiplication(model, lambda x: heis.multiplication_symbol(model, x) * heis.gaussian(x))
    assert sol.residual <= 1e-8
    assert not heis.heisenberg_gh_check(heis.heis_xy(), 1.0, 1000).center_ok
    ok = heis.heisenberg_gh_check(heis.heis_golden(), 1.0, 1000)
    assert ok.center_ok and ok.passes
    assert ok.base.k_hat == pytest.approx(torus.diophantine_scan(torus.golden(), 1.0, 1000).k_hat, rel=1e-12)


# 11 ----------------------------------------------------------------------------------


@criterion("11", "g_{2,3} counterexample")
def test_counterexample():
    rng = random.Random(11)
    for _ in range(20):
        beta = Fraction(rng.randint(-50, 50), rng.randint(1, 50))
        y = [Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for _ in range(2)]
        yp = [Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for _ in range(2)]
        w = liealg.counterexample_g23(beta, y, yp)
        assert w.bracket == (0, 0, 0, 1, beta)
        assert w.nonzero
    g = liealg.free_nilpotent_2_3()
    assert liealg.center(g) == Subspace.span(5, [g.basis_vector("Y1"), g.basis_vector("Y2")])


# 12 ----------------------------------------------------------------------------------


@criterion("12", "tame inverse bound")
def test_tame_bound():
    act = torus.golden()
    est = torus.tame_constant_estimate(act, 1.0, 0, 50, 200, np.random.default_rng(12))
    assert est.loss == 2
    assert est.mode_sweep <= est.analytic_bound
    assert est.empirical <= est.analytic_bound
