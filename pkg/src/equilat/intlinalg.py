"""Exact integer linear algebra over Python integers.

Matrices are plain lists of integer rows.  Everything here works row-wise:
a lattice is the integer row span of a matrix.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .errors import BudgetExceeded, budget
from .indexvec import IndexedVector, IndexShape

IntMatrix = list[list[int]]
Dense = tuple[int, ...]


def hnf(m: Sequence[Sequence[int]]) -> IntMatrix:
    """Row-style Hermite normal form; zero rows are kept at the bottom.

    Pivots are positive and entries above a pivot lie in ``[0, pivot)``.
    """
    a = [[int(x) for x in row] for row in m]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    r = 0
    for col in range(cols):
        if r == rows:
            break
        while True:
            nz = [i for i in range(r, rows) if a[i][col]]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(a[i][col]))
            a[r], a[piv] = a[piv], a[r]
            p = a[r][col]
            clean = True
            prow = a[r]
            for i in range(r + 1, rows):
                x = a[i][col]
                if x:
                    q = x // p
                    if q:
                        a[i] = [u - q * v for u, v in zip(a[i], prow)]
                    if a[i][col]:
                        clean = False
            if clean:
                break
        if r < rows and a[r][col]:
            if a[r][col] < 0:
                a[r] = [-x for x in a[r]]
            p = a[r][col]
            prow = a[r]
            for i in range(r):
                q = a[i][col] // p
                if q:
                    a[i] = [u - q * v for u, v in zip(a[i], prow)]
            r += 1
    return a


def hnf_rows(m: Iterable[Sequence[int]]) -> list[Dense]:
    """Nonzero rows of the Hermite normal form."""
    return [tuple(row) for row in hnf(list(m)) if any(row)]


def rank(m: Sequence[Sequence[int]]) -> int:
    return len(hnf_rows(m))


def kernel_basis(m: Sequence[Sequence[int]], cols: int | None = None) -> list[Dense]:
    """Basis of the integer kernel {x : m x = 0}, in Hermite normal form."""
    rows = len(m)
    if cols is None:
        if not rows:
            raise ValueError("cols is required for an empty matrix")
        cols = len(m[0])
    aug = []
    for k in range(cols):
        aug.append([int(m[i][k]) for i in range(rows)] + [int(k == t) for t in range(cols)])
    red = hnf(aug)
    return [tuple(row[rows:]) for row in red if not any(row[:rows])]


def mat_vec(m: Sequence[Sequence[int]], x: Sequence[int]) -> list[int]:
    return [sum(a * b for a, b in zip(row, x)) for row in m]


def _pivots(basis: Sequence[Dense]) -> list[int]:
    return [next(k for k, x in enumerate(row) if x) for row in basis]


def reduce_dense(basis: Sequence[Dense], v: Sequence[int]) -> tuple[list[int], bool]:
    """Reduce v against an echelon basis; returns (remainder, exact)."""
    v = list(v)
    exact = True
    for row, p in zip(basis, _pivots(basis)):
        if v[p]:
            q, rem = divmod(v[p], row[p])
            if rem:
                exact = False
            if q:
                v = [a - q * b for a, b in zip(v, row)]
    return v, exact and not any(v)


class LatticeHandle:
    """A lattice in Z^(I_n) given by generators, with a cached HNF basis."""

    def __init__(self, shape: IndexShape, generators: Iterable[IndexedVector | Sequence[int]] = ()):
        gens = []
        dense = []
        for g in generators:
            if isinstance(g, IndexedVector):
                if g.shape != shape:
                    g = g.with_shape(shape)
                gens.append(g)
                dense.append(g.dense(shape))
            else:
                g = tuple(int(x) for x in g)
                if len(g) != shape.size:
                    raise ValueError("dense generator length does not match shape")
                dense.append(g)
                gens.append(IndexedVector.from_dense(shape, g))
        self.shape = shape
        self.generators = tuple(gens)
        self.hnf_basis: tuple[Dense, ...] = tuple(hnf_rows(dense))
        self.meta: dict = {}
        self._cache: dict = {}

    @classmethod
    def from_dense(cls, shape: IndexShape, rows: Iterable[Sequence[int]]) -> "LatticeHandle":
        return cls(shape, [tuple(r) for r in rows])

    @classmethod
    def full(cls, shape: IndexShape) -> "LatticeHandle":
        return cls(shape, [IndexedVector.unit(shape, idx) for idx in shape.universe])

    @property
    def rank(self) -> int:
        return len(self.hnf_basis)

    @property
    def dim(self) -> int:
        return self.shape.size

    def basis_vectors(self) -> list[IndexedVector]:
        return [IndexedVector.from_dense(self.shape, r) for r in self.hnf_basis]

    def member_dense(self, v: Sequence[int]) -> bool:
        return reduce_dense(self.hnf_basis, v)[1]

    def member(self, u: IndexedVector) -> bool:
        if u.shape != self.shape:
            raise ValueError(f"shape mismatch: {u.shape} vs {self.shape}")
        return self.member_dense(u.dense())

    def contains(self, other: "LatticeHandle") -> bool:
        if other.shape != self.shape:
            raise ValueError("shape mismatch")
        return all(self.member_dense(r) for r in other.hnf_basis)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LatticeHandle):
            return NotImplemented
        return self.shape == other.shape and self.hnf_basis == other.hnf_basis

    def __hash__(self) -> int:
        return hash((self.shape, self.hnf_basis))

    def __repr__(self) -> str:
        return f"LatticeHandle(shape={self.shape}, rank={self.rank})"

    def to_json(self) -> dict:
        return {
            "shape": self.shape.to_json(),
            "generators": [g.to_json()["entries"] for g in self.basis_vectors()],
        }


def member(lat: LatticeHandle, u: IndexedVector) -> bool:
    return lat.member(u)


def intersect_truncation(lat: LatticeHandle, n_small: int) -> LatticeHandle:
    """The sublattice of vectors supported inside [n_small]^d x [c]."""
    shape = lat.shape
    if n_small > shape.n:
        raise ValueError("n_small exceeds the lattice degree")
    small = shape.resized(n_small)
    if n_small == shape.n:
        return LatticeHandle.from_dense(small, lat.hnf_basis)
    inside = [shape.position[idx] for idx in small.universe]
    inside_set = set(inside)
    outside = [k for k in range(shape.size) if k not in inside_set]
    basis = lat.hnf_basis
    if not basis:
        return LatticeHandle(small)
    constraint = [[row[o] for row in basis] for o in outside]
    coeffs = kernel_basis(constraint, cols=len(basis))
    rows = []
    for a in coeffs:
        full = [sum(ai * row[k] for ai, row in zip(a, basis)) for k in inside]
        rows.append(full)
    return LatticeHandle.from_dense(small, rows)


def _ball_dense(basis: Sequence[Dense], bound: int, max_nodes: int) -> list[Dense]:
    if not basis:
        return []
    dim = len(basis[0])
    piv = _pivots(basis)
    r = len(basis)
    out: list[Dense] = []
    nodes = 0

    def region_norm(acc, lo, hi):
        return sum(abs(acc[k]) for k in range(lo, hi))

    def rec(t, acc, used):
        nonlocal nodes
        nodes += 1
        if nodes > max_nodes:
            raise BudgetExceeded("ball_nodes", max_nodes)
        if t == r:
            if any(acc):
                out.append(tuple(acc))
            return
        p = piv[t]
        hi = piv[t + 1] if t + 1 < r else dim
        row = basis[t]
        pv = row[p]
        room = bound - used
        # |acc[p] + a*pv| <= room
        lo_a = -((room + acc[p]) // pv)
        hi_a = (room - acc[p]) // pv
        for a in range(lo_a, hi_a + 1):
            if a:
                nxt = [x + a * y for x, y in zip(acc, row)]
            else:
                nxt = acc
            u = used + region_norm(nxt, p, hi)
            if u <= bound:
                rec(t + 1, nxt, u)

    rec(0, [0] * dim, 0)
    return out


def lattice_ball(lat: LatticeHandle, bound: int, max_nodes: int | None = None) -> list[IndexedVector]:
    """All nonzero lattice vectors of norm at most ``bound``."""
    if bound < 0:
        raise ValueError("bound must be nonnegative")
    pts = _ball_dense(lat.hnf_basis, bound, budget("ball_nodes", max_nodes))
    pts.sort(key=lambda v: (sum(abs(x) for x in v), v))
    return [IndexedVector.from_dense(lat.shape, v) for v in pts]
