import itertools
import random

import numpy as np
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st
from sympy.matrices.normalforms import invariant_factors

from vkampen.exactalg import (
    FgAbGroup,
    GroupHom,
    IntMatrix,
    check_functional,
    cokernel,
    det,
    gf2_kernel,
    gf2_rank,
    gf2_solve,
    image,
    kernel_basis,
    matmul,
    membership,
    separating_functional,
    snf,
    solve_linear,
    subquotient,
    vector_gcd,
)

from vkampen.acceptance import snf_postconditions


def matrices(max_rows=5, max_cols=5, lo=-6, hi=6):
    return st.integers(0, max_rows).flatmap(
        lambda r: st.integers(0, max_cols).flatmap(
            lambda c: st.lists(st.lists(st.integers(lo, hi), min_size=c, max_size=c), min_size=r, max_size=r).map(
                lambda rows: np.array(rows, dtype=object).reshape(r, c))))


def sympy_factors(M):
    if M.shape[0] == 0 or M.shape[1] == 0:
        return ()
    return tuple(abs(int(v)) for v in invariant_factors(sympy.Matrix(M.tolist())) if v != 0)


@given(matrices())
def test_snf_postconditions(M):
    assert snf_postconditions(M)


@given(matrices())
def test_snf_matches_sympy_invariant_factors(M):
    assert tuple(snf(M).invariant_factors) == sympy_factors(M)


def test_snf_known():
    dec = snf([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])
    assert tuple(dec.invariant_factors) == (2, 6, 12)
    assert snf(np.zeros((0, 3), dtype=object)).rank == 0
    assert snf([[0, 0], [0, 0]]).invariant_factors == ()


def test_snf_promotes_before_overflow():
    big = 2 ** 62
    M = [[big, big - 1], [big + 1, big + 3], [3, 5]]
    dec = snf(M)
    assert dec.verify(M)
    assert tuple(dec.invariant_factors) == sympy_factors(np.array(M, dtype=object))


@given(matrices(4, 4))
def test_det_matches_sympy(M):
    if M.shape[0] != M.shape[1]:
        return
    expected = 1 if M.shape[0] == 0 else int(sympy.Matrix(M.tolist()).det())
    assert det(M) == expected


def _box_solutions(M, b, box):
    n = M.shape[1]
    for x in itertools.product(range(-box, box + 1), repeat=n):
        if all(v == w for v, w in zip(M.dot(np.array(x, dtype=object)), b)):
            yield x


@pytest.mark.parametrize("seed", range(60))
def test_solve_linear_against_box_enumeration(seed):
    rng = random.Random(seed)
    r, c = rng.randint(1, 3), rng.randint(1, 3)
    M = np.array([[rng.randint(-3, 3) for _ in range(c)] for _ in range(r)], dtype=object)
    if rng.random() < 0.5:
        x0 = [rng.randint(-2, 2) for _ in range(c)]
        b = list(M.dot(np.array(x0, dtype=object)))
    else:
        b = [rng.randint(-5, 5) for _ in range(r)]
    sol = solve_linear(M, b)
    found = next(_box_solutions(M, b, 4), None)
    if sol is None:
        assert found is None
        f, d = separating_functional(M, b)
        assert check_functional(M, b, f, d)
    else:
        assert list(M.dot(np.array(sol.particular, dtype=object))) == list(b)
        for k in sol.kernel:
            assert not any(M.dot(np.array(k, dtype=object)))
    if found is not None:
        assert sol is not None


@given(matrices(4, 5))
def test_kernel_basis_spans_rational_kernel(M):
    K = kernel_basis(M)
    if K.size:
        assert not np.any(matmul(M, K))
    rank = 0 if M.size == 0 else sympy.Matrix(M.tolist()).rank()
    assert (K.shape[1] if K.ndim == 2 else 0) == M.shape[1] - rank


@given(matrices(4, 4))
def test_cokernel_matches_sympy(M):
    g = cokernel(M)
    factors = sympy_factors(M)
    assert g.free_rank == M.shape[0] - len(factors)
    assert tuple(g.torsion) == tuple(f for f in factors if f > 1)


def test_image_membership():
    L = image([[2, 0], [0, 3]])
    assert membership(L, [4, 9])
    assert not membership(L, [1, 0])


def test_group_basics():
    g = FgAbGroup(1, (2, 4))
    assert g.ngens == 3
    assert g.describe() == "Z/2 + Z/4 + Z"
    assert FgAbGroup(0, (2, 2, 4)).describe() == "(Z/2)^2 + Z/4"
    assert g.reduce([3, 5, -7]) == (1, 1, -7)
    assert FgAbGroup.from_json(g.to_json()).same_type(g)
    with pytest.raises(ValueError):
        FgAbGroup(0, (2, 3))


def test_group_hom_well_defined_check():
    z2 = FgAbGroup(0, (2,))
    z = FgAbGroup.free(1)
    with pytest.raises(ValueError):
        GroupHom(z2, z, IntMatrix([[1]]))
    h = GroupHom(z, z2, IntMatrix([[1]]))
    assert h.is_surjective() and not h.is_injective()


def test_subquotient_cyclic():
    L = np.eye(2, dtype=object)
    R = np.array([[2, 0], [0, 3]], dtype=object)
    g, reps, coord = subquotient(L, R)
    assert g.order == 6


def _gf2_span_size(M):
    rows, cols = M.shape
    seen = set()
    for coeffs in itertools.product((0, 1), repeat=cols):
        seen.add(tuple(int(v) % 2 for v in M.dot(np.array(coeffs, dtype=object))) if cols else ())
    return len(seen)


@given(matrices(4, 5, 0, 1))
def test_gf2_rank_against_span_enumeration(M):
    assert 2 ** gf2_rank(M) == _gf2_span_size(M)


@given(matrices(4, 4, 0, 1), st.lists(st.integers(0, 1), min_size=4, max_size=4))
def test_gf2_solve_and_kernel(M, b):
    b = b[:M.shape[0]]
    x, f = gf2_solve(M, b)
    if x is not None:
        assert all((v - w) % 2 == 0 for v, w in zip(M.dot(np.array(x, dtype=object)), b))
    else:
        assert sum(int(u) * int(v) for u, v in zip(f, b)) % 2 == 1
        assert all(v % 2 == 0 for v in np.array(f, dtype=object).dot(M))
    K = gf2_kernel(M)
    if K.size:
        assert all(v % 2 == 0 for v in matmul(M, K).ravel())


def test_vector_gcd():
    assert vector_gcd([4, -6, 10]) == 2
    assert vector_gcd([]) == 0
