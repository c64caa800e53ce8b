import json
import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from hypolab import liealg
from hypolab import rational as Q
from hypolab.liealg import (
    LieAlgebra,
    LieAlgebraError,
    NotApplicable,
    Subspace,
    abelian,
    center,
    change_basis,
    classify_2step_dim1,
    classify_codim1_abelian,
    counterexample_g23,
    direct_product,
    filiform,
    free_nilpotent_2_3,
    heisenberg,
    jacobi_check,
    jordan_blocks_at,
    lower_central_series,
    step,
)


def dims(g):
    return [s.dim for s in lower_central_series(g)]


def random_invertible(n, rng):
    while True:
        m = [[Fraction(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(n)] for _ in range(n)]
        if Q.rank(m) == n:
            return m


def test_bracket_is_antisymmetric_and_bilinear():
    h = heisenberg(1)
    X, Y, Z = (h.basis_vector(i) for i in range(3))
    assert h.bracket(X, Y) == Z
    assert h.bracket(Y, X) == [-c for c in Z]
    assert h.bracket([2, 1, 0], [0, 3, 5]) == [0, 0, 6]


def test_inconsistent_brackets_rejected():
    with pytest.raises(LieAlgebraError):
        LieAlgebra(["a", "b"], {(0, 0): {1: 1}})
    with pytest.raises(LieAlgebraError):
        LieAlgebra(["a", "b"], {(0, 1): {5: 1}})


def test_jacobi_failure_reported():
    bad = LieAlgebra(["a", "b", "c"], {(0, 1): {1: 1}, (1, 2): {0: 1}})
    report = jacobi_check(bad)
    assert not report.ok
    assert report.violations[0][:3] == (0, 1, 2)


@pytest.mark.parametrize("g", range(1, 5))
def test_heisenberg_series(g):
    assert dims(heisenberg(g)) == [2 * g + 1, 1, 0]
    assert center(heisenberg(g)).dim == 1


@pytest.mark.parametrize("g", range(2, 6))
def test_filiform_series(g):
    assert dims(filiform(g)) == [g + 1] + list(range(g - 1, -1, -1))
    assert step(filiform(g)) == g


def test_small_cases():
    assert dims(filiform(1)) == [2, 0]
    assert dims(abelian(3)) == [3, 0]
    assert step(abelian(3)) == 1
    assert dims(free_nilpotent_2_3()) == [5, 3, 2, 0]
    z = center(free_nilpotent_2_3())
    g = free_nilpotent_2_3()
    assert z == Subspace.span(5, [g.basis_vector("Y1"), g.basis_vector("Y2")])


def test_non_nilpotent_algebra():
    # the affine algebra [a, b] = b
    aff = LieAlgebra(["a", "b"], {(0, 1): {1: 1}})
    assert not liealg.is_nilpotent(aff)
    assert step(aff) is None


def test_subspace_membership():
    s = Subspace.span(3, [[1, 1, 0], [0, 1, 1]])
    assert [1, 2, 1] in s
    assert [1, 0, 0] not in s
    assert s.dim == 2
    with pytest.raises(ValueError):
        s.coordinates([1, 0, 0])


@given(g=st.integers(1, 4), n=st.integers(0, 3), seed=st.integers(0, 10**6))
@settings(max_examples=25, deadline=None)
def test_heisenberg_classification_survives_basis_change(g, n, seed):
    alg = direct_product(heisenberg(g), abelian(n)) if n else heisenberg(g)
    rotated = change_basis(alg, random_invertible(alg.dim, random.Random(seed)))
    assert jacobi_check(rotated).ok
    t = classify_2step_dim1(rotated)
    assert (t.g, t.n) == (g, n)


def test_classify_2step_rejects_other_algebras():
    with pytest.raises(NotApplicable):
        classify_2step_dim1(filiform(4))
    with pytest.raises(NotApplicable):
        classify_2step_dim1(abelian(3))


def filiform_ideal(alg):
    z = alg.basis_vector(0)
    a = Subspace.span(alg.dim, [alg.basis_vector(i) for i in range(1, alg.dim)])
    return a, z


@pytest.mark.parametrize("g", range(2, 6))
def test_codim1_filiform(g):
    alg = filiform(g)
    a, z = filiform_ideal(alg)
    prof = classify_codim1_abelian(alg, a, z)
    assert prof.verdict == liealg.VERDICT_FILIFORM
    assert prof.blocks == [g]
    assert (prof.filiform_g, prof.euclid_n) == (g, 0)


def test_codim1_abelian_and_nonnilpotent():
    alg = abelian(3)
    prof = classify_codim1_abelian(alg, Subspace.span(3, [[0, 1, 0], [0, 0, 1]]), [1, 0, 0])
    assert prof.verdict == liealg.VERDICT_ABELIAN
    assert prof.euclid_n == 2
    aff = LieAlgebra(["a", "b"], {(0, 1): {1: 2}})
    prof = classify_codim1_abelian(aff, Subspace.span(2, [[0, 1]]), [1, 0])
    assert prof.verdict == liealg.VERDICT_NON_NILPOTENT
    assert prof.eigenvalues == {Fraction(2): [1]}


def test_codim1_multi_block():
    # ad_Z with blocks of sizes 2 and 2
    alg = LieAlgebra(["Z", "a1", "a2", "b1", "b2"], {(0, 1): {2: 1}, (0, 3): {4: 1}})
    a = Subspace.span(5, [alg.basis_vector(i) for i in range(1, 5)])
    prof = classify_codim1_abelian(alg, a, alg.basis_vector(0))
    assert prof.verdict == liealg.VERDICT_MULTI_BLOCK
    assert prof.blocks == [2, 2]


def test_codim1_preconditions():
    h = heisenberg(1)
    with pytest.raises(LieAlgebraError):
        classify_codim1_abelian(h, Subspace.span(3, [[1, 0, 0], [0, 1, 0]]), [0, 0, 1])


def sympy_blocks(m):
    _, J = sympy.Matrix(m).jordan_form()
    sizes, run = [], 1
    for i in range(J.rows - 1):
        if J[i, i + 1] == 1:
            run += 1
        else:
            sizes.append(run)
            run = 1
    sizes.append(run)
    return sorted(sizes, reverse=True)


@given(st.lists(st.integers(1, 4), min_size=1, max_size=4), st.integers(0, 10**6))
@settings(max_examples=25, deadline=None)
def test_jordan_blocks_match_sympy(sizes, seed):
    n = sum(sizes)
    nil = Q.zeros(n, n)
    pos = 0
    for s in sizes:
        for i in range(s - 1):
            nil[pos + i][pos + i + 1] = Fraction(1)
        pos += s
    p = random_invertible(n, random.Random(seed))
    conj = Q.matmul(Q.matmul(p, nil), Q.inverse(p))
    assert jordan_blocks_at(conj) == sorted(sizes, reverse=True) == sympy_blocks(conj)


def test_counterexample_examples():
    g = free_nilpotent_2_3()
    assert g.format_vector(counterexample_g23(1).bracket) == "Y1 + Y2"
    assert g.format_vector(counterexample_g23(0).bracket) == "Y1"
    assert g.format_vector(counterexample_g23(Fraction(-2, 3)).bracket) == "Y1 - (2/3)Y2"


@given(
    st.fractions(max_denominator=50),
    st.tuples(st.fractions(max_denominator=9), st.fractions(max_denominator=9)),
    st.tuples(st.fractions(max_denominator=9), st.fractions(max_denominator=9)),
)
def test_counterexample_bracket_independent_of_central_terms(beta, y, yp):
    w = counterexample_g23(beta, y, yp)
    assert w.bracket == (0, 0, 0, 1, beta)
    assert w.nonzero


def test_json_round_trip_and_errors():
    g = free_nilpotent_2_3()
    again = LieAlgebra.loads(json.dumps(g.to_json()))
    assert again == g
    with pytest.raises(LieAlgebraError, match="line 1"):
        LieAlgebra.loads("{nope")
    with pytest.raises(LieAlgebraError, match="brackets\\[0\\]"):
        LieAlgebra.from_json({"dim": 2, "basis": ["a", "b"], "brackets": [{"i": 0}]})
    with pytest.raises(LieAlgebraError, match="dim"):
        LieAlgebra.from_json({"basis": ["a"], "brackets": []})
