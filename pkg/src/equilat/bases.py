"""Graver, Hilbert, Gröbner and Markov bases of lattices, computed exactly.

Binomials are never represented as polynomials: a lattice ideal element
x^a - x^b is stored as the exponent pair (a, b) and all reductions act on
those exponent vectors.
"""

from __future__ import annotations

import heapq
import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import BudgetExceeded, InfiniteFiberError, Refusal, budget
from .indexvec import (
    IndexedVector,
    IndexShape,
    TermOrderSpec,
    minimal_elements,
    sign_split,
)
from .intlinalg import LatticeHandle, lattice_ball
from .symmetry import canonical_form, is_sym_invariant, orbit

BASIS_KINDS = ("generating", "markov", "groebner", "universal-groebner-candidate", "graver", "hilbert")

# Entries above this size switch the completion arrays to Python integers.
_INT64_SAFE = 2**40


@dataclass
class BasisReport:
    kind: str
    elements: list[IndexedVector]
    order: TermOrderSpec | None = None
    certificate: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in BASIS_KINDS:
            raise ValueError(f"unknown basis kind {self.kind!r}")
        if len(set(self.elements)) != len(self.elements):
            raise ValueError("basis elements must be distinct")

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def as_set(self) -> set[IndexedVector]:
        return set(self.elements)

    def representatives(self, n: int | None = None) -> list[IndexedVector]:
        """Canonical Sym(n)-orbit representatives of the elements."""
        reps = {canonical_form(u, n) for u in self.elements}
        return sorted(reps, key=lambda v: (v.norm(), v.sort_key()))

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "order": self.order.kind if self.order else None,
            "elements": [u.to_json() for u in self.elements],
            "certificate": self.certificate,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "BasisReport":
        order = TermOrderSpec(obj["order"]) if obj.get("order") else None
        elems = [IndexedVector.from_json(e) for e in obj["elements"]]
        return cls(obj["kind"], elems, order, dict(obj.get("certificate", {})))


def _sorted(vs: Iterable[IndexedVector]) -> list[IndexedVector]:
    return sorted(vs, key=lambda v: (v.norm(), v.sort_key()))


# ---------------------------------------------------------------------------
# Graver bases by pair completion


class _RowStore:
    """Growable integer matrix with a dtype that widens on demand."""

    def __init__(self, dim: int):
        self.dim = dim
        self.arr = np.zeros((16, dim), dtype=np.int64)
        self.size = 0

    def view(self) -> np.ndarray:
        return self.arr[: self.size]

    def widen_if_needed(self, v: np.ndarray) -> None:
        if self.arr.dtype != object and v.size and int(np.max(np.abs(v.astype(object)))) > _INT64_SAFE:
            self.arr = self.arr.astype(object)

    def append(self, v: np.ndarray) -> None:
        self.widen_if_needed(v)
        if self.size == len(self.arr):
            grown = np.zeros((2 * len(self.arr), self.dim), dtype=self.arr.dtype)
            grown[: self.size] = self.arr
            self.arr = grown
        self.arr[self.size] = v
        self.size += 1


def _conformal_reduce(store: _RowStore, s: np.ndarray) -> np.ndarray:
    """Subtract stored h with h conformally below s until none applies."""
    while s.any():
        A = store.view()
        if not len(A):
            break
        mask = ((A * s) >= 0).all(axis=1) & (np.abs(A) <= np.abs(s)).all(axis=1)
        hits = np.flatnonzero(mask)
        if not len(hits):
            break
        s = s - A[hits[0]]
    return s


def _minimal_rows(A: np.ndarray) -> list[int]:
    keep = []
    for k in range(len(A)):
        g = A[k]
        mask = ((A * g) >= 0).all(axis=1) & (np.abs(A) <= np.abs(g)).all(axis=1)
        mask[k] = False
        if not mask.any():
            keep.append(k)
    return keep


def graver_basis(
    L: LatticeHandle,
    max_pairs: int | None = None,
    max_elements: int | None = None,
    symmetric: bool | None = None,
) -> BasisReport:
    """All conformally minimal nonzero elements of L, by pair completion.

    Starting from the HNF basis and its negative, every sum f + g whose
    summands have a sign clash is reduced conformally against the current
    set; nonzero remainders are adjoined with their negatives.  Pairs without
    a sign clash reduce to zero trivially and are never formed.

    For a Sym(n)-invariant lattice (detected when ``symmetric`` is None) the
    working set is kept closed under Sym(n) and only pairs whose first
    member is an orbit representative are formed: a pair and its image under
    a permutation reduce in lockstep.
    """
    cached = L._cache.get("graver")
    if cached is not None:
        return cached
    pair_cap = budget("graver_pairs", max_pairs)
    elem_cap = budget("graver_elements", max_elements)
    if symmetric is None:
        symmetric = L.shape.n >= 2 and bool(L.hnf_basis) and is_sym_invariant(L)
    run = _SymmetricCompletion if symmetric else _Completion
    comp = run(L, pair_cap, elem_cap)
    comp.run()
    A = comp.store.view()
    elems = [IndexedVector.from_dense(L.shape, [int(x) for x in A[k]]) for k in _minimal_rows(A)]
    report = BasisReport(
        "graver",
        _sorted(elems),
        certificate={
            "method": "pair-completion",
            "symmetric": symmetric,
            "pairs": comp.pairs,
            "stored": comp.store.size,
        },
    )
    L._cache["graver"] = report
    return report


class _Completion:
    def __init__(self, L: LatticeHandle, pair_cap: int, elem_cap: int):
        self.L = L
        self.pair_cap = pair_cap
        self.elem_cap = elem_cap
        self.store = _RowStore(L.dim)
        self.seen: set[tuple] = set()
        self.heap: list = []
        self.counter = itertools.count()
        self.pairs = 0

    def push(self, s: np.ndarray) -> None:
        self.pairs += 1
        if self.pairs > self.pair_cap:
            raise BudgetExceeded("graver_pairs", self.pair_cap, _partial(self.L, self.store))
        heapq.heappush(self.heap, (int(np.abs(s).sum()), next(self.counter), s))

    def add_rows(self, rows) -> None:
        for v in rows:
            self.seen.add(tuple(int(x) for x in v))
            self.store.append(v)
        if self.store.size > self.elem_cap:
            raise BudgetExceeded("graver_elements", self.elem_cap, _partial(self.L, self.store))

    def pair_with(self, f: np.ndarray, rows: np.ndarray) -> None:
        if not len(rows):
            return
        clash = ((rows * f) < 0).any(axis=1)
        for g in rows[clash]:
            s = g + f
            if s.any():
                self.push(s)

    def insert(self, r: np.ndarray) -> None:
        if tuple(int(x) for x in r) in self.seen:
            return
        self.pair_with(r, self.store.view())
        self.add_rows([r, -r])

    def run(self) -> None:
        for row in self.L.hnf_basis:
            r = _conformal_reduce(self.store, np.array(row, dtype=self.store.arr.dtype))
            if r.any():
                self.insert(r)
        while self.heap:
            _, _, s = heapq.heappop(self.heap)
            r = _conformal_reduce(self.store, s)
            if r.any():
                self.insert(r)


class _SymmetricCompletion(_Completion):
    def __init__(self, L: LatticeHandle, pair_cap: int, elem_cap: int):
        super().__init__(L, pair_cap, elem_cap)
        self.orbits: list[tuple[np.ndarray, int, int]] = []  # (rep, start row, stop row)
        self.pair_keys: set = set()

    def _pair_key(self, f: np.ndarray, g: np.ndarray):
        # For d = 1, Sym(n) permutes columns, so a pair is determined up to
        # symmetry by the multiset of its joint columns.
        shape = self.L.shape
        if shape.d != 1:
            return None
        n, c = shape.n, shape.c
        cols = sorted(
            tuple(int(f[(j * n) + i]) for j in range(c)) + tuple(int(g[(j * n) + i]) for j in range(c))
            for i in range(n)
        )
        return tuple(cols)

    def pair_with(self, f: np.ndarray, rows: np.ndarray) -> None:
        if not len(rows):
            return
        clash = ((rows * f) < 0).any(axis=1)
        for g in rows[clash]:
            key = self._pair_key(f, g)
            if key is not None:
                if key in self.pair_keys:
                    continue
                self.pair_keys.add(key)
            s = g + f
            if s.any():
                self.push(s)

    def insert(self, r: np.ndarray) -> None:
        shape = self.L.shape
        u = IndexedVector.from_dense(shape, [int(x) for x in r])
        for v in (u, -u):
            rep = canonical_form(v)
            dense = rep.dense()
            if dense in self.seen:
                continue
            members = [np.array(w.dense(), dtype=self.store.arr.dtype) for w in orbit(rep, shape.n)]
            start = self.store.size
            self.add_rows(members)
            f = np.array(dense, dtype=self.store.arr.dtype)
            self.orbits.append((f, start, self.store.size))
            self.pair_with(f, self.store.view())


def _partial(L: LatticeHandle, store: _RowStore) -> list[IndexedVector]:
    return [IndexedVector.from_dense(L.shape, [int(x) for x in row]) for row in store.view()]


def graver_oracle(L: LatticeHandle, bound: int, max_nodes: int | None = None) -> list[IndexedVector]:
    """Brute force: conformally minimal members of the norm ball."""
    return _sorted(minimal_elements(lattice_ball(L, bound, max_nodes)))


def hilbert_basis(
    L: LatticeHandle,
    method: str = "lift",
    max_pairs: int | None = None,
    max_elements: int | None = None,
) -> BasisReport:
    """Hilbert basis of the monoid L ∩ Z_{>=0}.

    This is the set of nonnegative Graver elements.  ``method="lift"``
    computes it by a sign-restricted project-and-lift completion that never
    builds the full Graver basis; ``method="graver"`` filters graver_basis.
    """
    if method == "graver":
        g = graver_basis(L, max_pairs=max_pairs, max_elements=max_elements)
        h = [u for u in g.elements if u.is_nonnegative()]
        return BasisReport("hilbert", h, certificate={"method": "graver-nonnegative", "graver_size": len(g)})
    if method != "lift":
        raise ValueError(f"unknown Hilbert basis method {method!r}")
    cached = L._cache.get("hilbert")
    if cached is not None:
        return cached
    pair_cap = budget("hilbert_pairs", max_pairs)
    elem_cap = budget("hilbert_elements", max_elements)
    rows, pairs = _project_and_lift(L, set(range(L.dim)), pair_cap, elem_cap)
    h = [IndexedVector.from_dense(L.shape, r) for r in rows]
    report = BasisReport("hilbert", _sorted(h), certificate={"method": "project-and-lift", "pairs": pairs})
    L._cache["hilbert"] = report
    return report


def _lift_from_pivots(basis: Sequence[tuple[int, ...]], piv: list[int], w: Sequence[int]) -> tuple[int, ...]:
    """The lattice vector whose pivot coordinates are w (back substitution)."""
    coeffs = []
    for t, p in enumerate(piv):
        rest = w[t] - sum(a * basis[s][p] for s, a in enumerate(coeffs))
        a, rem = divmod(rest, basis[t][p])
        if rem:
            raise ArithmeticError("pivot coordinates are not in the projected lattice")
        coeffs.append(a)
    return tuple(sum(a * row[k] for a, row in zip(coeffs, basis)) for k in range(len(basis[0])))


def _project_and_lift(
    L: LatticeHandle, constrained: set[int], pair_cap: int, elem_cap: int
) -> tuple[list[tuple[int, ...]], int]:
    """Conformally minimal nonzero u in L with u_k >= 0 for k in ``constrained``.

    Starts from the Graver basis of the projection onto the HNF pivot
    coordinates (injective on L) and lifts one coordinate k at a time.  The
    working set keeps the positive sum property on the lifted coordinates:
    every admissible u is a positive sum of members conformally below u
    there.  Restoring it after adding k only needs the sums f + g with f, g
    sign-compatible on the old coordinates and of opposite sign at k.  Once
    a constrained coordinate is lifted, members negative in it are dropped,
    since they can never sit conformally below an admissible vector.
    """
    basis = list(L.hnf_basis)
    if not basis:
        return [], 0
    piv = [next(k for k, x in enumerate(row) if x) for row in basis]
    r = len(basis)
    block = [tuple(row[p] for p in piv) for row in basis]
    if all(block[t][t] == 1 for t in range(r)):
        units = [tuple(int(t == s) for s in range(r)) for t in range(r)]
        start = units + [tuple(-x for x in u) for u in units]
    else:
        small = LatticeHandle.from_dense(IndexShape(1, 1, r), block)
        try:
            start = [u.dense() for u in graver_basis(small, max_pairs=pair_cap, max_elements=elem_cap, symmetric=False)]
        except BudgetExceeded as exc:
            raise BudgetExceeded(exc.what.replace("graver", "hilbert"), exc.limit) from None
    start = [w for w in start if all(w[t] >= 0 for t, p in enumerate(piv) if p in constrained)]
    store = _RowStore(L.dim)
    for w in start:
        store.append(np.array(_lift_from_pivots(basis, piv, w), dtype=np.int64))
    lifted = list(piv)
    pairs = 0
    for k in range(L.dim):
        if k in piv:
            continue
        old = np.array(lifted, dtype=np.intp)
        cols = np.array(lifted + [k], dtype=np.intp)
        heap: list = []
        counter = itertools.count()
        seen = {tuple(int(x) for x in row) for row in store.view()}

        def pair_with(f, upto):
            nonlocal pairs
            A = store.view()[:upto]
            if not len(A):
                return
            mask = (A[:, k] * f[k] < 0) & ((A[:, old] * f[old]) >= 0).all(axis=1)
            for g in A[mask]:
                pairs += 1
                if pairs > pair_cap:
                    raise BudgetExceeded("hilbert_pairs", pair_cap)
                s = f + g
                heapq.heappush(heap, (int(np.abs(s[cols]).sum()), next(counter), s))

        for i in range(store.size):
            pair_with(store.view()[i], i)
        while heap:
            _, _, s = heapq.heappop(heap)
            while s[cols].any():
                A = store.view()
                Ac, sc = A[:, cols], s[cols]
                hits = np.flatnonzero(((Ac * sc) >= 0).all(axis=1) & (np.abs(Ac) <= np.abs(sc)).all(axis=1))
                if not len(hits):
                    break
                s = s - A[hits[0]]
            if not s[cols].any():
                continue
            t = tuple(int(x) for x in s)
            if t in seen:
                continue
            seen.add(t)
            store.widen_if_needed(s)
            pair_with(s.astype(store.arr.dtype), store.size)
            store.append(s)
            if store.size > elem_cap:
                raise BudgetExceeded("hilbert_elements", elem_cap)
        if k in constrained:
            A = store.view()
            keep = A[A[:, k] >= 0]
            store = _RowStore(L.dim)
            for row in keep:
                store.append(row)
        lifted.append(k)
    A = store.view()
    A = A[(A[:, sorted(constrained)] >= 0).all(axis=1)] if constrained else A
    out = sorted({tuple(int(x) for x in A[i]) for i in _minimal_rows(A)})
    return out, pairs


# ---------------------------------------------------------------------------
# Lawrence lifting


def lawrence_shape(shape: IndexShape) -> IndexShape:
    return IndexShape(shape.d, 2 * shape.c, shape.n)


def lawrence_pair(u: IndexedVector, v: IndexedVector) -> IndexedVector:
    """The doubled vector (u, v): v sits on bounded indices c+1..2c."""
    if u.shape != v.shape:
        raise ValueError("shape mismatch")
    c = u.shape.c
    ent = list(u.items()) + [(k[:-1] + (k[-1] + c,), x) for k, x in v.items()]
    return IndexedVector(lawrence_shape(u.shape), ent)


def phi(w: IndexedVector, shape: IndexShape) -> IndexedVector:
    """The doubling map (u, v) -> u - v."""
    c = shape.c
    ent = [(k, x) if k[-1] <= c else (k[:-1] + (k[-1] - c,), -x) for k, x in w.items()]
    return IndexedVector(shape, ent)


def lawrence_lift(L: LatticeHandle) -> LatticeHandle:
    """phi^{-1}(L) in the doubled shape."""
    shape = L.shape
    zero = IndexedVector.zero(shape)
    gens = [lawrence_pair(b, zero) for b in L.basis_vectors()]
    for idx in shape.universe:
        e = IndexedVector.unit(shape, idx)
        gens.append(lawrence_pair(e, e))
    return LatticeHandle(lawrence_shape(shape), gens)


def hilbert_graver_crosscheck(L: LatticeHandle) -> bool:
    """Compare Graver(L) with the lifted Hilbert basis in both directions."""
    G = set(graver_basis(L).elements)
    lifted = lawrence_lift(L)
    H = set(hilbert_basis(lifted).elements)
    pushed = {phi(w, L.shape) for w in H}
    pushed.discard(IndexedVector.zero(L.shape))
    expected = {lawrence_pair(sign_split(u).plus, sign_split(u).minus) for u in G}
    for idx in L.shape.universe:
        e = IndexedVector.unit(L.shape, idx)
        expected.add(lawrence_pair(e, e))
    return pushed == G and H == expected


# ---------------------------------------------------------------------------
# Gröbner bases of lattice ideals


@dataclass(frozen=True)
class MonomialPair:
    """Exponent pair (a, b) of a binomial x^a - x^b."""

    a: IndexedVector
    b: IndexedVector

    def __post_init__(self):
        if not (self.a.is_nonnegative() and self.b.is_nonnegative()):
            raise ValueError("exponent vectors must be nonnegative")

    def vector(self) -> IndexedVector:
        return self.a - self.b


@dataclass(frozen=True)
class DirectedVector:
    """A nonzero lattice vector oriented so that its positive part leads."""

    vector: IndexedVector
    order: TermOrderSpec

    def __post_init__(self):
        if self.vector.is_zero():
            raise ValueError("directed vectors are nonzero")
        sp = sign_split(self.vector)
        if self.order.key(sp.plus) <= self.order.key(sp.minus):
            raise ValueError("positive part must lead under the term order")

    @classmethod
    def orient(cls, u: IndexedVector, order: TermOrderSpec) -> "DirectedVector":
        sp = sign_split(u)
        return cls(u if order.key(sp.plus) > order.key(sp.minus) else -u, order)

    @property
    def lead(self) -> IndexedVector:
        return sign_split(self.vector).plus

    @property
    def trail(self) -> IndexedVector:
        return sign_split(self.vector).minus


def _orient_dense(v: Sequence[int], key) -> tuple[tuple[int, ...], tuple[int, ...]]:
    plus = tuple(max(x, 0) for x in v)
    minus = tuple(max(-x, 0) for x in v)
    return (plus, minus) if key(plus) > key(minus) else (minus, plus)


class _Rewriter:
    """Monomial rewriting m -> m - a + b by stored pairs with a <= m."""

    def __init__(self, dim: int):
        self.leads = np.zeros((0, dim), dtype=object)
        self.trails = np.zeros((0, dim), dtype=object)
        self.pairs: list[tuple[tuple, tuple]] = []

    def add(self, a, b) -> None:
        self.pairs.append((a, b))
        self.leads = np.vstack([self.leads, np.array([a], dtype=object)])
        self.trails = np.vstack([self.trails, np.array([b], dtype=object)])

    def remove(self, k: int) -> None:
        del self.pairs[k]
        self.leads = np.delete(self.leads, k, axis=0)
        self.trails = np.delete(self.trails, k, axis=0)

    def normal_form(self, m) -> tuple:
        m = np.array(m, dtype=object)
        while len(self.leads):
            hits = np.flatnonzero((self.leads <= m).all(axis=1))
            if not len(hits):
                break
            k = hits[0]
            m = m - self.leads[k] + self.trails[k]
        return tuple(int(x) for x in m)


def _buchberger(gens: list[tuple[int, ...]], key, pair_cap: int, elem_cap: int) -> list[tuple[tuple, tuple]]:
    dim = len(gens[0]) if gens else 0
    rw = _Rewriter(dim)
    queue: deque = deque()
    pairs = 0

    def adjoin(v) -> None:
        a, b = _orient_dense(v, key)
        for f in range(len(rw.pairs)):
            queue.append((f, len(rw.pairs)))
        rw.add(a, b)
        if len(rw.pairs) > elem_cap:
            raise BudgetExceeded("groebner_elements", elem_cap)

    for g in gens:
        a, b = _orient_dense(g, key)
        na, nb = rw.normal_form(a), rw.normal_form(b)
        if na != nb:
            adjoin([x - y for x, y in zip(na, nb)])
    while queue:
        i, j = queue.popleft()
        (af, bf), (ag, bg) = rw.pairs[i], rw.pairs[j]
        if not any(x and y for x, y in zip(af, ag)):
            continue
        pairs += 1
        if pairs > pair_cap:
            raise BudgetExceeded("groebner_pairs", pair_cap)
        w = [max(x, y) for x, y in zip(af, ag)]
        m1 = [wi - x + y for wi, x, y in zip(w, af, bf)]
        m2 = [wi - x + y for wi, x, y in zip(w, ag, bg)]
        n1, n2 = rw.normal_form(m1), rw.normal_form(m2)
        if n1 != n2:
            adjoin([x - y for x, y in zip(n1, n2)])
    return _interreduce(rw, key)


def _interreduce(rw: _Rewriter, key) -> list[tuple[tuple, tuple]]:
    # Drop elements whose lead is divisible by another lead.
    pairs = list(rw.pairs)
    keep = []
    for k, (a, _) in enumerate(pairs):
        redundant = False
        for l, (a2, _) in enumerate(pairs):
            if l == k:
                continue
            if all(x <= y for x, y in zip(a2, a)) and (a2 != a or l < k):
                redundant = True
                break
        if not redundant:
            keep.append(k)
    base = _Rewriter(len(pairs[0][0]) if pairs else 0)
    for k in keep:
        base.add(*pairs[k])
    # A lead never divides its own trailing monomial, so reducing trails
    # against the whole minimal set is safe.
    return [(a, base.normal_form(b)) for a, b in base.pairs]


def groebner_basis(
    L: LatticeHandle,
    order: TermOrderSpec | str,
    markov: Iterable[IndexedVector] | None = None,
    max_pairs: int | None = None,
    max_elements: int | None = None,
) -> BasisReport:
    """Reduced Gröbner basis of the lattice ideal of L, as directed vectors.

    Without ``markov`` the ideal generated by the lattice basis is saturated
    by elimination: an extra variable t with binomial t*prod(x) - 1 is added
    under an order that compares the t-exponent first, and the t-free part of
    the result is kept.  With ``markov`` (any Markov basis of L, for instance
    the Graver basis) completion starts from it directly.
    """
    if isinstance(order, str):
        order = TermOrderSpec(order)
    pair_cap = budget("groebner_pairs", max_pairs)
    elem_cap = budget("groebner_elements", max_elements)
    dim = L.dim
    if markov is not None:
        gens = [u.dense(L.shape) for u in markov]
        gb = _buchberger(gens, order.dense_key, pair_cap, elem_cap) if gens else []
        method = "markov-seeded"
    else:
        gens = [tuple(r) + (0,) for r in L.hnf_basis]
        if gens:
            gens.append((1,) * (dim + 1))

            def key(v):
                return (v[-1], order.dense_key(v[:-1]))

            full = _buchberger(gens, key, pair_cap, elem_cap)
            gb = [(a[:-1], b[:-1]) for a, b in full if a[-1] == 0]
        else:
            gb = []
        method = "elimination"
    elems = [IndexedVector.from_dense(L.shape, [x - y for x, y in zip(a, b)]) for a, b in gb]
    elems = sorted(elems, key=lambda v: order.key(sign_split(v).plus))
    return BasisReport("groebner", elems, order, {"method": method, "size": len(elems)})


def normal_form(u: IndexedVector, basis: Iterable[IndexedVector], order: TermOrderSpec) -> IndexedVector:
    """Reduce a nonnegative vector by directed moves until none applies."""
    rw = _Rewriter(u.shape.size)
    for b in basis:
        rw.add(*_orient_dense(b.dense(), order.dense_key))
    return IndexedVector.from_dense(u.shape, rw.normal_form(u.dense()))


# ---------------------------------------------------------------------------
# Fibers and verification


@dataclass
class FiberGraph:
    root: IndexedVector
    vertices: list[IndexedVector]
    moves: list[IndexedVector]

    def __len__(self) -> int:
        return len(self.vertices)

    def connected(self) -> bool:
        """Whether the undirected graph with edges v - w in ±moves is connected."""
        verts = {v.dense() for v in self.vertices}
        return len(_closure(self.root.dense(), _signed_moves(self.moves), len(verts) + 1)) == len(verts)


def _signed_moves(moves: Iterable[IndexedVector]) -> list[tuple[int, ...]]:
    out = set()
    for m in moves:
        d = m.dense()
        out.add(d)
        out.add(tuple(-x for x in d))
    return sorted(out)


def _closure(start: tuple[int, ...], moves: list[tuple[int, ...]], cap: int) -> set[tuple[int, ...]]:
    seen = {start}
    todo = [start]
    M = np.array(moves, dtype=np.int64).reshape(len(moves), len(start))
    while todo:
        v = np.array(todo.pop(), dtype=np.int64)
        nxt = M + v
        ok = (nxt >= 0).all(axis=1)
        for w in nxt[ok]:
            t = tuple(int(x) for x in w)
            if t not in seen:
                seen.add(t)
                if len(seen) > cap:
                    raise BudgetExceeded("fiber_size", cap)
                todo.append(t)
    return seen


def certify_finite_fibers(L: LatticeHandle) -> None:
    """Refuse unless L meets the nonnegative orthant only in 0."""
    if hilbert_basis(L).elements:
        raise InfiniteFiberError(
            "the lattice contains a nonzero nonnegative vector, so fibers are infinite"
        )


def fiber(L: LatticeHandle, u: IndexedVector, max_size: int | None = None) -> FiberGraph:
    """The full fiber of u, closed under Graver moves."""
    if not u.is_nonnegative() and not u.is_zero():
        raise ValueError("fiber root must be nonnegative")
    certify_finite_fibers(L)
    moves = graver_basis(L).elements
    cap = budget("fiber_size", max_size)
    pts = _closure(u.dense(L.shape), _signed_moves(moves), cap) if moves else {u.dense(L.shape)}
    verts = [IndexedVector.from_dense(L.shape, p) for p in sorted(pts)]
    return FiberGraph(u, verts, list(moves))


def nonnegative_vectors(shape: IndexShape, bound: int) -> Iterable[tuple[int, ...]]:
    """All nonnegative dense vectors with coordinate sum at most ``bound``."""
    dim = shape.size

    def rec(k, left, acc):
        if k == dim:
            yield tuple(acc)
            return
        for x in range(left + 1):
            acc.append(x)
            yield from rec(k + 1, left - x, acc)
            acc.pop()

    yield from rec(0, bound, [])


def verify_markov(
    L: LatticeHandle,
    B: Iterable[IndexedVector],
    test_bound: int,
    symmetric: bool = False,
) -> bool:
    """Every fiber of a nonnegative u with norm <= test_bound is B-connected.

    With ``symmetric`` the lattice is assumed Sym(n)-invariant and only
    canonical orbit representatives are used as roots.
    """
    certify_finite_fibers(L)
    gmoves = _signed_moves(graver_basis(L).elements)
    bmoves = _signed_moves(B)
    cap = budget("fiber_size")
    done: set[tuple[int, ...]] = set()
    for u in nonnegative_vectors(L.shape, test_bound):
        if u in done:
            continue
        if symmetric:
            uv = IndexedVector.from_dense(L.shape, u)
            if canonical_form(uv) != uv:
                continue
        F = _closure(u, gmoves, cap) if gmoves else {u}
        reach = _closure(u, bmoves, cap) if bmoves else {u}
        if reach != F:
            return False
        done |= F
    return True


def verify_groebner(
    L: LatticeHandle,
    B: Iterable[IndexedVector],
    order: TermOrderSpec | str,
    test_bound: int,
) -> bool:
    """Every nonnegative u with norm <= test_bound has a descending B-path to its fiber minimum."""
    if isinstance(order, str):
        order = TermOrderSpec(order)
    certify_finite_fibers(L)
    key = order.dense_key
    gmoves = _signed_moves(graver_basis(L).elements)
    directed = [_orient_dense(b.dense(), key) for b in B]
    cap = budget("fiber_size")
    done: set[tuple[int, ...]] = set()
    for u in nonnegative_vectors(L.shape, test_bound):
        if u in done:
            continue
        F = _closure(u, gmoves, cap) if gmoves else {u}
        low = min(F, key=key)
        # Reverse search: predecessors of w are w - b + a for directed (a, b) with b <= w.
        good = {low}
        todo = [low]
        while todo:
            w = todo.pop()
            for a, b in directed:
                if all(x >= y for x, y in zip(w, b)):
                    p = tuple(x - y + z for x, y, z in zip(w, b, a))
                    if p not in good:
                        good.add(p)
                        todo.append(p)
        if not F <= good:
            return False
        done |= F
    return True


def generating_set_check(L: LatticeHandle, B: Iterable[IndexedVector]) -> bool:
    B = list(B)
    for b in B:
        if b.shape != L.shape:
            raise ValueError(f"shape mismatch: {b.shape} vs {L.shape}")
    return LatticeHandle(L.shape, B) == L


# ---------------------------------------------------------------------------
# Structural elements for d = c = 1


class NotMemberError(Refusal):
    reason = "not-member"


def _check_d1c1(L: LatticeHandle) -> None:
    if L.shape.d != 1 or L.shape.c != 1:
        raise ValueError("defined for d = 1, c = 1 only")


def gl_value(L: LatticeHandle) -> int:
    _check_d1c1(L)
    return math.gcd(*(x for row in L.hnf_basis for x in row)) if L.hnf_basis else 0


def sl_value(L: LatticeHandle) -> int:
    _check_d1c1(L)
    return math.gcd(*(sum(row) for row in L.hnf_basis)) if L.hnf_basis else 0


def gl_element(L: LatticeHandle) -> IndexedVector | None:
    """g_L (e_1 - e_2), or None for the zero lattice."""
    g = gl_value(L)
    if g == 0:
        return None
    if L.shape.n < 2:
        raise ValueError("g_L (e_1 - e_2) needs n >= 2")
    u = IndexedVector(L.shape, {(1, 1): g, (2, 1): -g})
    if not L.member(u):
        raise NotMemberError(f"{g}(e_1 - e_2) is not in the lattice; is the truncation Sym-saturated?")
    return u


def sl_element(L: LatticeHandle) -> IndexedVector:
    """s_L e_1; the zero vector when every coordinate sum vanishes."""
    s = sl_value(L)
    if s == 0:
        return IndexedVector.zero(L.shape)
    u = IndexedVector(L.shape, {(1, 1): s})
    if not L.member(u):
        raise NotMemberError(f"{s} e_1 is not in the lattice; is the truncation Sym-saturated?")
    if u not in graver_basis(L).as_set():
        raise AssertionError("s_L e_1 is missing from the Graver basis")
    return u


def thm_graver_envelope_check(L: LatticeHandle) -> bool:
    """Sym(n)(±H) ⊆ G ⊆ Sym(n)(±H ∪ {±g_L}) with H the nonnegative Graver part."""
    _check_d1c1(L)
    n = L.shape.n
    G = graver_basis(L).as_set()
    H = [u for u in G if u.is_nonnegative()]
    lower = set()
    for h in H:
        for s in (h, -h):
            lower.update(orbit(s, n))
    if not lower <= G:
        return False
    allowed = {canonical_form(u, n) for u in lower}
    gl = gl_element(L) if L.hnf_basis and n >= 2 else None
    if gl is not None:
        allowed.add(canonical_form(gl, n))
        allowed.add(canonical_form(-gl, n))
    return all(canonical_form(u, n) in allowed for u in G)


def conformal_decomposable(u: IndexedVector, L: LatticeHandle) -> IndexedVector | None:
    """A lattice vector v with 0 != v ⊑ u, v != u, found by exhaustive search."""
    items = list(u.items())
    ranges = [range(0, v + 1) if v > 0 else range(v, 1) for _, v in items]
    for vals in itertools.product(*ranges):
        cand = IndexedVector(u.shape, ((k, x) for (k, _), x in zip(items, vals)))
        if cand.is_zero() or cand == u:
            continue
        if L.member(cand):
            return cand
    return None
