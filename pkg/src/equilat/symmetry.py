"""Symmetric-group and Inc actions on indices and vectors.

Permutations always carry a finite degree and act as the identity beyond
it, so a permutation of degree 3 can be applied to a vector of degree 5.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import BudgetExceeded, budget
from .indexvec import Index, IndexedVector, IndexShape


@dataclass(frozen=True)
class PermutationWord:
    """A permutation of [n] stored in one-line notation (1-based images)."""

    images: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(int(x) for x in self.images))
        if sorted(self.images) != list(range(1, len(self.images) + 1)):
            raise ValueError(f"not a permutation: {self.images}")

    @property
    def n(self) -> int:
        return len(self.images)

    @classmethod
    def identity(cls, n: int) -> "PermutationWord":
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def transposition(cls, n: int, a: int, b: int) -> "PermutationWord":
        img = list(range(1, n + 1))
        img[a - 1], img[b - 1] = b, a
        return cls(tuple(img))

    @classmethod
    def cycle(cls, n: int) -> "PermutationWord":
        """The long cycle i -> i+1 (mod n)."""
        return cls(tuple(list(range(2, n + 1)) + [1]))

    @classmethod
    def from_mapping(cls, mapping: dict[int, int], n: int | None = None) -> "PermutationWord":
        """Extend an injective partial map to a permutation.

        Unmapped points receive the unused values in increasing order.
        """
        top = max([0, *mapping.keys(), *mapping.values()])
        n = max(n or 0, top)
        used = set(mapping.values())
        if len(used) != len(mapping):
            raise ValueError("mapping is not injective")
        free = iter(v for v in range(1, n + 1) if v not in used)
        return cls(tuple(mapping[i] if i in mapping else next(free) for i in range(1, n + 1)))

    def __call__(self, i: int) -> int:
        return self.images[i - 1] if 1 <= i <= len(self.images) else i

    def extended(self, n: int) -> "PermutationWord":
        if n <= self.n:
            return self
        return PermutationWord(self.images + tuple(range(self.n + 1, n + 1)))

    def compose(self, other: "PermutationWord") -> "PermutationWord":
        """self o other (apply ``other`` first)."""
        n = max(self.n, other.n)
        return PermutationWord(tuple(self(other(i)) for i in range(1, n + 1)))

    __mul__ = compose

    def inverse(self) -> "PermutationWord":
        inv = [0] * self.n
        for i, v in enumerate(self.images, start=1):
            inv[v - 1] = i
        return PermutationWord(tuple(inv))

    def is_identity(self) -> bool:
        return all(v == i for i, v in enumerate(self.images, start=1))

    def act_index(self, idx: Index) -> Index:
        return tuple(self(i) for i in idx[:-1]) + (idx[-1],)

    def to_json(self) -> list[int]:
        return list(self.images)

    @classmethod
    def from_json(cls, obj: Sequence[int]) -> "PermutationWord":
        return cls(tuple(obj))


def act(sigma: PermutationWord, u: IndexedVector, shape: IndexShape | None = None) -> IndexedVector:
    """sigma(u): permute the unbounded coordinates of every index."""
    if shape is None:
        shape = u.shape.resized(max(u.shape.n, sigma.n))
    return IndexedVector(shape, ((sigma.act_index(k), v) for k, v in u.items()))


def active_values(u: IndexedVector | Iterable[Index]) -> list[int]:
    """Sorted unbounded coordinate values touched by a support."""
    idxs = u.support() if isinstance(u, IndexedVector) else u
    return sorted({i for k in idxs for i in k[:-1]})


def _relabel(u: IndexedVector, mapping: dict[int, int], shape: IndexShape) -> IndexedVector:
    return IndexedVector(shape, ((tuple(mapping[i] for i in k[:-1]) + (k[-1],), v) for k, v in u.items()))


def orbit(u: IndexedVector, n: int, max_size: int | None = None) -> list[IndexedVector]:
    """The Sym(n)-orbit of u, sorted by entry-list order."""
    if n < u.shape.n and u.width() > n:
        raise ValueError("n is smaller than the vector's width")
    shape = u.shape.resized(n)
    vals = active_values(u)
    w = len(vals)
    cap = budget("orbit_size", max_size)
    if math.perm(n, w) > cap:
        raise BudgetExceeded("orbit_size", cap)
    seen = set()
    for img in itertools.permutations(range(1, n + 1), w):
        seen.add(_relabel(u, dict(zip(vals, img)), shape))
    return sorted(seen, key=IndexedVector.sort_key)


def _canonical_d1(u: IndexedVector, shape: IndexShape) -> IndexedVector:
    cols: dict[int, list[int]] = {}
    for k, v in u.items():
        cols.setdefault(k[0], [0] * shape.c)[k[1] - 1] = v
    key = {i: tuple((0, x) if x else (1, 0) for x in col) for i, col in cols.items()}
    order = sorted(cols, key=lambda i: (key[i], i))
    return _relabel(u, {i: r for r, i in enumerate(order, start=1)}, shape)


def canonical_form(u: IndexedVector, n: int | None = None, max_size: int | None = None) -> IndexedVector:
    """Smallest member of the Sym(n)-orbit of u in entry-list order.

    Relabelling the active values monotonically onto smaller ones never
    increases the entry list, so the minimum is attained by a bijection of
    the active values onto [w]; only those w! candidates are searched
    (d = 1 needs a single sort).
    """
    n = u.shape.n if n is None else n
    vals = active_values(u)
    w = len(vals)
    if w > n:
        raise ValueError("n is smaller than the vector's width")
    shape = u.shape.resized(n)
    if shape.d == 1:
        return _canonical_d1(u, shape)
    cap = budget("orbit_size", max_size)
    if math.factorial(w) > cap:
        raise BudgetExceeded("orbit_size", cap)
    best = None
    best_key = None
    for img in itertools.permutations(range(1, w + 1)):
        cand = _relabel(u, dict(zip(vals, img)), shape)
        k = cand.sort_key()
        if best_key is None or k < best_key:
            best, best_key = cand, k
    return best if best is not None else IndexedVector.zero(shape)


def canonical_form_bruteforce(u: IndexedVector, n: int) -> IndexedVector:
    """Reference minimum over the full orbit; used to test canonical_form."""
    return orbit(u, n)[0]


def reduce_width(S: Iterable[Index], shape: IndexShape) -> PermutationWord:
    """A permutation moving the index set S into [p]^d x [c], p = d|S| + 1.

    Follows the transposition loop: while some touched value k exceeds p,
    swap it with an untouched l in [p] (both chosen smallest).
    """
    S = set(tuple(s) for s in S)
    for s in S:
        shape.check_index(s)
    p = shape.d * len(S) + 1
    if shape.n < p:
        raise ValueError(f"reduce_width needs n >= d*m+1 = {p}, got n = {shape.n}")
    sigma = PermutationWord.identity(shape.n)
    while True:
        touched = set(active_values(sigma.act_index(s) for s in S))
        outside = sorted(k for k in touched if k > p)
        if not outside:
            return sigma
        k = outside[0]
        l = min(x for x in range(1, p + 1) if x not in touched)
        sigma = PermutationWord.transposition(shape.n, k, l).compose(sigma)


def pull_permutation(
    sigmas: Sequence[PermutationWord], m: int, n: int
) -> tuple[PermutationWord, list[PermutationWord]]:
    """Return sigma and tau_1..tau_h with sigma = id on D and sigma o sigma_j = tau_j on [m].

    D is the union of sigma_j([m]) inside [n].  Each step swaps the smallest
    value k of T = U sigma_j([m]) beyond n with the smallest l in [n] \\ T.
    """
    h = len(sigmas)
    if n < h * m + 1:
        raise ValueError(f"pull_permutation needs n >= h*m+1 = {h * m + 1}, got n = {n}")
    deg = max([n, m] + [s.n for s in sigmas])
    sigma = PermutationWord.identity(deg)
    while True:
        T = {sigma(s(i)) for s in sigmas for i in range(1, m + 1)}
        outside = sorted(k for k in T if k > n)
        if not outside:
            break
        k = outside[0]
        l = min(x for x in range(1, n + 1) if x not in T)
        sigma = PermutationWord.transposition(deg, k, l).compose(sigma)
    taus = []
    for s in sigmas:
        mapping = {i: sigma(s(i)) for i in range(1, m + 1)}
        taus.append(PermutationWord.from_mapping(mapping, n))
    return sigma, taus


@dataclass(frozen=True)
class IncEmbedding:
    """A strictly increasing partial map, given as sorted (i, pi(i)) pairs."""

    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple((int(a), int(b)) for a, b in self.pairs))
        for (a0, b0), (a1, b1) in zip(self.pairs, self.pairs[1:]):
            if not (a0 < a1 and b0 < b1):
                raise ValueError("embedding is not strictly increasing")

    def as_dict(self) -> dict[int, int]:
        return dict(self.pairs)

    def to_permutation(self, n: int | None = None) -> PermutationWord:
        """A permutation agreeing with the embedding on its domain."""
        return PermutationWord.from_mapping(self.as_dict(), n)


def _columns(u: IndexedVector) -> list[tuple[int, ...]]:
    if u.shape.d != 1:
        raise ValueError("the Inc embedding order is defined for d = 1 only")
    if not u.is_nonnegative():
        raise ValueError("the Inc embedding order compares nonnegative vectors")
    cols = [[0] * u.shape.c for _ in range(u.width())]
    for k, v in u.items():
        cols[k[0] - 1][k[1] - 1] = v
    return [tuple(c) for c in cols]


def _dominated(a: Sequence[int], b: Sequence[int]) -> bool:
    return all(x <= y for x, y in zip(a, b))


def higman_leq(u: IndexedVector, v: IndexedVector) -> IncEmbedding | None:
    """Greedy leftmost embedding of u's columns into v's columns, or None."""
    if u.shape.c != v.shape.c:
        raise ValueError("bounded ranges differ")
    cu, cv = _columns(u), _columns(v)
    pairs = []
    k = 0
    for i, col in enumerate(cu, start=1):
        k += 1
        if any(col):
            while k <= len(cv) and not _dominated(col, cv[k - 1]):
                k += 1
            if k > len(cv):
                return None
        pairs.append((i, k))
    return IncEmbedding(tuple(pairs))


def higman_leq_bruteforce(u: IndexedVector, v: IndexedVector) -> bool:
    """Exhaustive search over increasing maps [len u] -> [len v + len u]."""
    cu, cv = _columns(u), _columns(v)
    zero = (0,) * u.shape.c
    top = len(cv) + len(cu)
    for img in itertools.combinations(range(1, top + 1), len(cu)):
        if all(_dominated(col, cv[k - 1] if k <= len(cv) else zero) for col, k in zip(cu, img)):
            return True
    return False


def is_sym_invariant(L) -> bool:
    """Whether a lattice handle is stable under Sym(n), n = L.shape.n.

    Checking the transposition (1 2) and the long cycle suffices, since
    they generate Sym(n).
    """
    n = L.shape.n
    if n < 2:
        return True
    gens = [PermutationWord.transposition(n, 1, 2), PermutationWord.cycle(n)]
    return all(L.member(act(g, v, L.shape)) for g in gens for v in L.basis_vectors())
