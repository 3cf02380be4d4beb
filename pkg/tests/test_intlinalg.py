import itertools
import math
from fractions import Fraction

import pytest

from equilat.errors import BudgetExceeded
from equilat.indexvec import IndexedVector, IndexShape
from equilat.intlinalg import (
    LatticeHandle,
    hnf,
    hnf_rows,
    intersect_truncation,
    kernel_basis,
    lattice_ball,
    mat_vec,
    member,
    rank,
)

from lattices import dense_lattice, vec


# --- independent oracles -----------------------------------------------------


def det(m):
    m = [[Fraction(x) for x in row] for row in m]
    n, sign, out = len(m), 1, Fraction(1)
    for k in range(n):
        p = next((i for i in range(k, n) if m[i][k]), None)
        if p is None:
            return 0
        if p != k:
            m[k], m[p] = m[p], m[k]
            sign = -sign
        out *= m[k][k]
        for i in range(k + 1, n):
            f = m[i][k] / m[k][k]
            m[i] = [a - f * b for a, b in zip(m[i], m[k])]
    return int(sign * out)


def rational_rank(m):
    m = [[Fraction(x) for x in row] for row in m]
    r = 0
    cols = len(m[0]) if m else 0
    for c in range(cols):
        p = next((i for i in range(r, len(m)) if m[i][c]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c] / m[r][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        r += 1
    return r


def minor_gcd(m, r):
    """gcd of all r x r minors: an invariant of the row lattice."""
    g = 0
    cols = len(m[0])
    for rs in itertools.combinations(range(len(m)), r):
        for cs in itertools.combinations(range(cols), r):
            g = math.gcd(g, det([[m[i][j] for j in cs] for i in rs]))
    return g


def random_matrix(rng, rows, cols, lo=-4, hi=4):
    return [[rng.randint(lo, hi) for _ in range(cols)] for _ in range(rows)]


# --- hnf ---------------------------------------------------------------------


def test_hnf_examples():
    assert hnf([[1, 0], [0, 1]]) == [[1, 0], [0, 1]]
    assert hnf([[2, 4], [1, 2]]) == [[1, 2], [0, 0]]
    assert hnf([[0]]) == [[0]]


def _is_hermite(rows):
    piv = -1
    for k, row in enumerate(rows):
        p = next(i for i, x in enumerate(row) if x)
        assert p > piv and row[p] > 0
        for above in rows[:k]:
            assert 0 <= above[p] < row[p]
        piv = p


def test_hnf_random_against_minor_invariants(rng):
    for _ in range(60):
        rows, cols = rng.randint(1, 4), rng.randint(1, 4)
        m = random_matrix(rng, rows, cols)
        h = hnf_rows(m)
        if h:
            _is_hermite(h)
        r = rational_rank(m)
        assert len(h) == r == rank(m)
        L = LatticeHandle.from_dense(IndexShape(1, 1, cols), h)
        assert all(L.member_dense(row) for row in m)
        if r:
            assert minor_gcd(m, r) == minor_gcd(h, r)
        assert hnf_rows(h) == h


def test_lattice_equality_is_hnf_equality():
    s = IndexShape(1, 1, 3)
    a = LatticeHandle(s, [(1, 3, 5), (2, 4, 6)])
    b = LatticeHandle(s, [(1, 1, 1), (1, 3, 5), (3, 7, 11)])
    assert a == b and hash(a) == hash(b)
    assert a.contains(b) and b.contains(a)
    assert a.rank <= 2


# --- kernels -----------------------------------------------------------------


def test_kernel_examples():
    k = kernel_basis([[1, 1]])
    assert len(k) == 1 and k[0] in ((1, -1), (-1, 1))
    assert kernel_basis([[1, 0], [0, 1]]) == []
    indep = [[1, 1, 0, 0], [0, 0, 1, 1], [1, 0, 1, 0], [0, 1, 0, 1]]
    (v,) = kernel_basis(indep)
    assert v in ((1, -1, -1, 1), (-1, 1, 1, -1))


def test_kernel_random_properties(rng):
    for _ in range(40):
        rows, cols = rng.randint(1, 3), rng.randint(1, 4)
        m = random_matrix(rng, rows, cols, -3, 3)
        K = kernel_basis(m)
        assert len(K) == cols - rational_rank(m)
        for v in K:
            assert mat_vec(m, v) == [0] * rows
        L = LatticeHandle.from_dense(IndexShape(1, 1, cols), K) if K else LatticeHandle(IndexShape(1, 1, cols))
        # Saturation: every small kernel vector is an integer combination.
        for x in itertools.product(range(-2, 3), repeat=cols):
            if not any(mat_vec(m, x)):
                assert L.member_dense(x)
        for u in lattice_ball(L, 3):
            assert rank(list(K) + [u.dense()]) == len(K)


def test_kernel_of_empty_matrix_needs_cols():
    assert len(kernel_basis([], cols=2)) == 2
    with pytest.raises(ValueError):
        kernel_basis([])


# --- membership --------------------------------------------------------------


def test_member_examples():
    from lattices import worked_lattice

    L = worked_lattice(3)
    assert member(L, vec(3, 0, 0))
    assert member(L, vec(0, 0, 0))
    assert not member(dense_lattice([[2]]), vec(1))
    with pytest.raises(ValueError):
        member(L, vec(1, 2))


# --- truncation --------------------------------------------------------------


def test_truncation_examples():
    s = IndexShape(1, 1, 3)
    assert intersect_truncation(LatticeHandle.full(s), 2) == LatticeHandle.full(s.resized(2))
    T = intersect_truncation(dense_lattice([[1, -1, 0], [0, 1, -1]]), 2)
    assert T.hnf_basis == ((1, -1),)
    assert intersect_truncation(dense_lattice([[0, 0, 1]]), 2).rank == 0


def test_truncation_random_properties(rng):
    for _ in range(30):
        d = rng.choice([1, 2])
        n = 3 if d == 1 else 2
        shape = IndexShape(d, 1, n)
        gens = [[rng.randint(-2, 2) for _ in range(shape.size)] for _ in range(rng.randint(1, 3))]
        L = LatticeHandle.from_dense(shape, gens)
        T = intersect_truncation(L, n - 1)
        for u in T.basis_vectors():
            assert L.member(u.with_shape(shape))
        for u in lattice_ball(L, 5):
            if u.width() <= n - 1:
                assert T.member(u.with_shape(T.shape))


def test_truncation_d2_example():
    shape = IndexShape(2, 1, 3)
    L = LatticeHandle(shape, [IndexedVector(shape, {(1, 1, 1): 1, (3, 3, 1): -1}), IndexedVector(shape, {(2, 2, 1): 1, (3, 3, 1): -1})])
    T = intersect_truncation(L, 2)
    assert T.rank == 1
    assert T.member(IndexedVector(T.shape, {(1, 1, 1): 1, (2, 2, 1): -1}))


# --- norm balls --------------------------------------------------------------


def ball_oracle(L, bound):
    out = set()
    for x in itertools.product(range(-bound, bound + 1), repeat=L.dim):
        if 0 < sum(map(abs, x)) <= bound and L.member_dense(x):
            out.add(x)
    return out


def test_ball_examples():
    assert {u.dense() for u in lattice_ball(dense_lattice([[1, -1]]), 2)} == {(1, -1), (-1, 1)}
    full = LatticeHandle.full(IndexShape(1, 1, 2))
    assert {u.dense() for u in lattice_ball(full, 1)} == {(1, 0), (0, 1), (-1, 0), (0, -1)}
    ball = [u.dense() for u in lattice_ball(dense_lattice([[1, 3, 5], [2, 4, 6]]), 3)]
    assert ball == [(-1, -1, -1), (1, 1, 1)]


def test_ball_matches_box_oracle(rng):
    for _ in range(25):
        k = rng.randint(1, 4)
        gens = [[rng.randint(-3, 3) for _ in range(k)] for _ in range(rng.randint(1, 3))]
        L = dense_lattice(gens, k)
        b = rng.randint(0, 4)
        got = [u.dense() for u in lattice_ball(L, b)]
        assert len(got) == len(set(got))
        assert set(got) == ball_oracle(L, b)


def test_ball_budget_fails_loudly():
    L = LatticeHandle.full(IndexShape(1, 1, 4))
    with pytest.raises(BudgetExceeded):
        lattice_ball(L, 6, max_nodes=50)
    with pytest.raises(ValueError):
        lattice_ball(L, -1)


def test_lattice_json_shape():
    L = dense_lattice([[1, -1, 0]])
    out = L.to_json()
    assert out["shape"] == {"d": 1, "c": 1, "n": 3}
