"""Sparse integer vectors over the index set [n]^d x [c].

An index is a tuple ``(i_1, ..., i_d, j)`` with ``i_k`` in ``[n]`` (the
unbounded coordinates) and ``j`` in ``[c]`` (the bounded coordinate).  All
coordinates are 1-based.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

Index = tuple[int, ...]


def basis_key(idx: Index) -> tuple:
    """Sort key realizing the well-ordering of the standard basis.

    The bounded index is compared first; ties are broken by the largest
    unbounded component, then lexicographically on the unbounded part.
    """
    i = idx[:-1]
    return (idx[-1], max(i), i)


def basis_index_compare(a: Index, b: Index, shape: "IndexShape | None" = None) -> int:
    if shape is not None:
        shape.check_index(a)
        shape.check_index(b)
    ka, kb = basis_key(a), basis_key(b)
    return (ka > kb) - (ka < kb)


@dataclass(frozen=True)
class IndexShape:
    d: int
    c: int
    n: int

    def __post_init__(self):
        for name in ("d", "c", "n"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 1:
                raise ValueError(f"{name} must be a positive integer, got {v!r}")

    @property
    def size(self) -> int:
        return self.n**self.d * self.c

    @cached_property
    def universe(self) -> tuple[Index, ...]:
        """All indices of the shape, sorted by the basis order."""
        idx = [
            i + (j,)
            for j in range(1, self.c + 1)
            for i in itertools.product(range(1, self.n + 1), repeat=self.d)
        ]
        return tuple(sorted(idx, key=basis_key))

    @cached_property
    def position(self) -> dict[Index, int]:
        return {idx: k for k, idx in enumerate(self.universe)}

    def contains(self, idx: Index) -> bool:
        return (
            len(idx) == self.d + 1
            and all(1 <= i <= self.n for i in idx[:-1])
            and 1 <= idx[-1] <= self.c
        )

    def check_index(self, idx: Index) -> None:
        if not self.contains(idx):
            raise ValueError(f"index {idx} outside shape {self}")

    def resized(self, n: int) -> "IndexShape":
        return IndexShape(self.d, self.c, n)

    def compatible(self, other: "IndexShape") -> bool:
        return self.d == other.d and self.c == other.c

    def to_json(self) -> dict:
        return {"d": self.d, "c": self.c, "n": self.n}

    @classmethod
    def from_json(cls, obj: Mapping) -> "IndexShape":
        return cls(int(obj["d"]), int(obj["c"]), int(obj["n"]))


class IndexedVector:
    """Immutable finitely supported integer vector over ``shape``.

    Entries are kept sorted by the basis order; zero entries are never
    stored.
    """

    __slots__ = ("shape", "_entries", "_hash")

    def __init__(self, shape: IndexShape, entries: Mapping[Index, int] | Iterable[tuple[Index, int]] = ()):
        items = entries.items() if isinstance(entries, Mapping) else entries
        acc: dict[Index, int] = {}
        for idx, val in items:
            idx = tuple(int(x) for x in idx)
            shape.check_index(idx)
            acc[idx] = acc.get(idx, 0) + int(val)
        self.shape = shape
        self._entries = tuple(
            sorted(((k, v) for k, v in acc.items() if v != 0), key=lambda kv: basis_key(kv[0]))
        )
        self._hash = None

    # construction helpers

    @classmethod
    def zero(cls, shape: IndexShape) -> "IndexedVector":
        return cls(shape)

    @classmethod
    def unit(cls, shape: IndexShape, idx: Index, value: int = 1) -> "IndexedVector":
        return cls(shape, {tuple(idx): value})

    @classmethod
    def from_dense(cls, shape: IndexShape, values: Sequence[int]) -> "IndexedVector":
        if len(values) != shape.size:
            raise ValueError(f"dense vector of length {len(values)} does not match shape size {shape.size}")
        return cls(shape, ((idx, v) for idx, v in zip(shape.universe, values) if v))

    @classmethod
    def from_list(cls, values: Sequence[int], c: int = 1) -> "IndexedVector":
        """Vector in the d=1 shape whose k-th column is ``values[k]``.

        For ``c == 1`` the entries are plain integers, otherwise each item is
        a length-``c`` sequence.
        """
        n = max(len(values), 1)
        shape = IndexShape(1, c, n)
        ent = {}
        for i, col in enumerate(values, start=1):
            if c == 1:
                ent[(i, 1)] = col
            else:
                for j, v in enumerate(col, start=1):
                    ent[(i, j)] = v
        return cls(shape, ent)

    # accessors

    @property
    def entries(self) -> tuple[tuple[Index, int], ...]:
        return self._entries

    def items(self):
        return iter(self._entries)

    def __getitem__(self, idx: Index) -> int:
        for k, v in self._entries:
            if k == tuple(idx):
                return v
        return 0

    def as_dict(self) -> dict[Index, int]:
        return dict(self._entries)

    def support(self) -> frozenset[Index]:
        return frozenset(k for k, _ in self._entries)

    def support_size(self) -> int:
        return len(self._entries)

    def norm(self) -> int:
        return sum(abs(v) for _, v in self._entries)

    def is_zero(self) -> bool:
        return not self._entries

    def is_nonnegative(self) -> bool:
        return all(v > 0 for _, v in self._entries)

    def width(self) -> int:
        """Largest unbounded coordinate touched by the support (0 if empty)."""
        return max((max(k[:-1]) for k, _ in self._entries), default=0)

    def dense(self, shape: IndexShape | None = None) -> tuple[int, ...]:
        shape = shape or self.shape
        if not shape.compatible(self.shape):
            raise ValueError("incompatible shapes")
        out = [0] * shape.size
        pos = shape.position
        for k, v in self._entries:
            try:
                out[pos[k]] = v
            except KeyError:
                raise ValueError(f"index {k} does not fit in shape {shape}") from None
        return tuple(out)

    def with_shape(self, shape: IndexShape) -> "IndexedVector":
        if not shape.compatible(self.shape):
            raise ValueError("incompatible shapes")
        return IndexedVector(shape, self._entries)

    # arithmetic

    def _check(self, other: "IndexedVector") -> None:
        if not isinstance(other, IndexedVector):
            raise TypeError("expected IndexedVector")
        if other.shape != self.shape:
            raise ValueError(f"shape mismatch: {self.shape} vs {other.shape}")

    def __add__(self, other: "IndexedVector") -> "IndexedVector":
        self._check(other)
        return IndexedVector(self.shape, self._entries + other._entries)

    def __sub__(self, other: "IndexedVector") -> "IndexedVector":
        self._check(other)
        return IndexedVector(self.shape, self._entries + tuple((k, -v) for k, v in other._entries))

    def __neg__(self) -> "IndexedVector":
        return IndexedVector(self.shape, ((k, -v) for k, v in self._entries))

    def __mul__(self, scalar: int) -> "IndexedVector":
        return IndexedVector(self.shape, ((k, scalar * v) for k, v in self._entries))

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, IndexedVector):
            return NotImplemented
        return self.shape == other.shape and self._entries == other._entries

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.shape, self._entries))
        return self._hash

    def sort_key(self) -> tuple:
        """Entry-list key: basis keys of the sorted support, then values."""
        return tuple((basis_key(k), v) for k, v in self._entries)

    def __repr__(self) -> str:
        if not self._entries:
            return "0"
        terms = []
        for k, v in self._entries:
            name = "e" + ",".join(map(str, k)) if self.shape.c > 1 else "e" + ",".join(map(str, k[:-1]))
            terms.append(f"{v:+d}*{name}")
        return " ".join(terms)

    # serialization

    def to_json(self) -> dict:
        return {
            "shape": self.shape.to_json(),
            "entries": [[list(k), v] for k, v in self._entries],
        }

    @classmethod
    def from_json(cls, obj: Mapping, shape: IndexShape | None = None) -> "IndexedVector":
        if shape is None:
            shape = IndexShape.from_json(obj["shape"])
        return cls(shape, ((tuple(k), v) for k, v in obj["entries"]))


@dataclass(frozen=True)
class SignSplit:
    plus: IndexedVector
    minus: IndexedVector


def sign_split(u: IndexedVector) -> SignSplit:
    plus = IndexedVector(u.shape, ((k, v) for k, v in u.items() if v > 0))
    minus = IndexedVector(u.shape, ((k, -v) for k, v in u.items() if v < 0))
    return SignSplit(plus, minus)


def conformal_leq(u: IndexedVector, v: IndexedVector) -> bool:
    """u is conformally below v: same signs entrywise and |u_i| <= |v_i|."""
    if u.shape != v.shape:
        raise ValueError(f"shape mismatch: {u.shape} vs {v.shape}")
    vd = v.as_dict()
    for k, a in u.items():
        b = vd.get(k, 0)
        if a * b <= 0 or abs(a) > abs(b):
            return False
    return True


def dense_conformal_leq(u: Sequence[int], v: Sequence[int]) -> bool:
    return all(a == 0 or (a * b > 0 and abs(a) <= abs(b)) for a, b in zip(u, v))


def minimal_elements(vectors: Iterable[IndexedVector]) -> list[IndexedVector]:
    """The conformally minimal members of a finite set (duplicates dropped)."""
    vs = sorted(set(vectors), key=lambda x: (x.norm(), x.sort_key()))
    out: list[IndexedVector] = []
    for v in vs:
        if not any(conformal_leq(m, v) for m in out):
            out.append(v)
    return out


def first_last_coeff(u: IndexedVector) -> tuple[int, int]:
    """Coefficients of the first and last nonzero terms in basis order."""
    if u.is_zero():
        raise ValueError("first/last coefficients of the zero vector are undefined")
    ent = u.entries
    return ent[0][1], ent[-1][1]


TERM_ORDERS = ("lex", "dlex", "revlex")


@dataclass(frozen=True)
class TermOrderSpec:
    """One of the three term orders on nonnegative vectors.

    ``lex``: v < w iff the last nonzero coefficient of v - w is negative.
    ``dlex``: norm first, ties by ``lex``.
    ``revlex``: norm first, ties by the first nonzero coefficient of v - w
    being positive.
    """

    kind: str

    def __post_init__(self):
        if self.kind not in TERM_ORDERS:
            raise ValueError(f"unknown term order {self.kind!r}; expected one of {TERM_ORDERS}")

    def dense_key(self, v: Sequence[int]) -> tuple:
        # v is a dense vector in basis order.
        if self.kind == "lex":
            return tuple(reversed(v))
        if self.kind == "dlex":
            return (sum(v), tuple(reversed(v)))
        return (sum(v), tuple(-x for x in v))

    def key(self, v: IndexedVector) -> tuple:
        return self.dense_key(v.dense())


def term_compare(order: TermOrderSpec, v: IndexedVector, w: IndexedVector) -> int:
    """-1 if v precedes w, 0 if equal, 1 otherwise."""
    if v.shape != w.shape:
        raise ValueError(f"shape mismatch: {v.shape} vs {w.shape}")
    if not (v.is_nonnegative() and w.is_nonnegative()):
        raise ValueError("term orders compare nonnegative vectors only")
    if v == w:
        return 0
    diff = v - w
    f, l = first_last_coeff(diff)
    if order.kind in ("dlex", "revlex"):
        nv, nw = v.norm(), w.norm()
        if nv != nw:
            return -1 if nv < nw else 1
    if order.kind == "revlex":
        return -1 if f > 0 else 1
    return -1 if l < 0 else 1
