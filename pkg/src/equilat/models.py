"""Hierarchical models: marginal matrices, kernel lattices and scenarios.

Cells of a model with levels r are tuples in [r_1] x ... x [r_m], listed
in lexicographic order.  A scenario lets the coordinates in T range over
[n] and fixes the others; it identifies cells with indices of
[n]^|T| x [c] as follows: the T-coordinates (ascending) become the
unbounded slots, and the fixed coordinates are folded into the bounded
index j by a mixed-radix code whose most significant digit is the smallest
fixed coordinate.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .chains import ChainSpec
from .errors import BudgetExceeded, NotIndependentError, budget
from .indexvec import Index, IndexedVector, IndexShape
from .intlinalg import LatticeHandle, kernel_basis, rank

Cell = tuple[int, ...]


@dataclass(frozen=True)
class SimplicialComplex:
    """A complex on [m] given by its facets."""

    m: int
    facets: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be positive")
        facets = tuple(tuple(sorted(set(int(x) for x in f))) for f in self.facets)
        object.__setattr__(self, "facets", facets)
        if not facets:
            raise ValueError("a complex needs at least one facet")
        for f in facets:
            if not f:
                raise ValueError("facets must be nonempty")
            if f[0] < 1 or f[-1] > self.m:
                raise ValueError(f"facet {f} is not a subset of [{self.m}]")
        for a, b in itertools.permutations(facets, 2):
            if set(a) <= set(b):
                raise ValueError(f"facets {a} and {b} are not inclusion-incomparable")

    def to_json(self) -> dict:
        return {"m": self.m, "facets": [list(f) for f in self.facets]}


@dataclass(frozen=True)
class HierModel:
    complex: SimplicialComplex
    r: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "r", tuple(int(x) for x in self.r))
        if len(self.r) != self.complex.m:
            raise ValueError("level vector length must equal m")
        if any(x < 1 for x in self.r):
            raise ValueError("levels must be positive")

    @property
    def num_cells(self) -> int:
        return math.prod(self.r)

    def cells(self) -> list[Cell]:
        cap = budget("cells")
        if self.num_cells > cap:
            raise BudgetExceeded("cells", cap)
        return list(itertools.product(*(range(1, x + 1) for x in self.r)))

    def marginal_cells(self, facet: Sequence[int]) -> list[Cell]:
        return list(itertools.product(*(range(1, self.r[k - 1] + 1) for k in facet)))

    def to_json(self) -> dict:
        out = self.complex.to_json()
        out["r"] = list(self.r)
        return out

    @classmethod
    def from_json(cls, obj: Mapping) -> "HierModel":
        return cls(SimplicialComplex(int(obj["m"]), tuple(tuple(f) for f in obj["facets"])), tuple(obj["r"]))


def _matrix(model: HierModel, columns: Sequence[Cell]) -> list[list[int]]:
    rows = []
    for f in model.complex.facets:
        pos = {mc: k for k, mc in enumerate(model.marginal_cells(f))}
        block = [[0] * len(columns) for _ in pos]
        for col, cell in enumerate(columns):
            block[pos[tuple(cell[k - 1] for k in f)]][col] = 1
        rows.extend(block)
    return rows


def marginal_matrix(model: HierModel) -> list[list[int]]:
    """0/1 matrix of all facet marginals; columns are cells in lex order."""
    return _matrix(model, model.cells())


def flat_shape(model: HierModel) -> IndexShape:
    return IndexShape(1, 1, model.num_cells)


def kernel_lattice(model: HierModel) -> LatticeHandle:
    """ker of the marginal map over the flat labeling (cell k -> index (k, 1))."""
    cells = model.cells()
    M = _matrix(model, cells)
    L = LatticeHandle.from_dense(flat_shape(model), kernel_basis(M, cols=len(cells)))
    L.meta["cells"] = cells
    return L


@dataclass(frozen=True)
class VaryingLevels:
    """A model template whose coordinates in T have n levels.

    No independence condition is imposed; see IndependentSetScenario.
    """

    complex: SimplicialComplex
    T: tuple[int, ...]
    fixed: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self):
        T = tuple(sorted(set(int(t) for t in self.T)))
        object.__setattr__(self, "T", T)
        fixed = {int(k): int(v) for k, v in dict(self.fixed).items()}
        object.__setattr__(self, "fixed", fixed)
        if not T:
            raise ValueError("T must be nonempty (d = |T| >= 1)")
        m = self.complex.m
        if T[0] < 1 or T[-1] > m:
            raise ValueError("T must be a subset of [m]")
        rest = [k for k in range(1, m + 1) if k not in T]
        if sorted(fixed) != rest:
            raise ValueError(f"fixed levels must be given exactly for coordinates {rest}")
        if any(v < 1 for v in fixed.values()):
            raise ValueError("fixed levels must be positive")

    def __hash__(self):
        return hash((self.complex, self.T, tuple(sorted(self.fixed.items()))))

    @property
    def d(self) -> int:
        return len(self.T)

    @property
    def c(self) -> int:
        return math.prod(self.fixed.values())

    def rest(self) -> list[int]:
        return sorted(self.fixed)

    def model(self, n: int) -> HierModel:
        r = tuple(n if k in self.T else self.fixed[k] for k in range(1, self.complex.m + 1))
        return HierModel(self.complex, r)

    def shape(self, n: int) -> IndexShape:
        return IndexShape(self.d, self.c, n)

    def to_index(self, cell: Cell) -> Index:
        j = 0
        for k in self.rest():
            j = j * self.fixed[k] + (cell[k - 1] - 1)
        return tuple(cell[t - 1] for t in self.T) + (j + 1,)

    def to_cell(self, idx: Index) -> Cell:
        j = idx[-1] - 1
        digits = {}
        for k in reversed(self.rest()):
            j, digits[k] = divmod(j, self.fixed[k])
        slots = dict(zip(self.T, idx[:-1]))
        return tuple(slots[k] if k in slots else digits[k] + 1 for k in range(1, self.complex.m + 1))

    def columns(self, n: int) -> list[Cell]:
        """Cells ordered by the basis order of their identified indices."""
        return [self.to_cell(idx) for idx in self.shape(n).universe]

    def marginal_matrix(self, n: int) -> list[list[int]]:
        model = self.model(n)
        cap = budget("cells")
        if model.num_cells > cap:
            raise BudgetExceeded("cells", cap)
        return _matrix(model, self.columns(n))

    def kernel_lattice(self, n: int) -> LatticeHandle:
        M = self.marginal_matrix(n)
        shape = self.shape(n)
        return LatticeHandle.from_dense(shape, kernel_basis(M, cols=shape.size))

    def chain(self, min_level: int = 1) -> ChainSpec:
        return ChainSpec(self.d, self.c, mode="level", level=self.kernel_lattice, min_level=min_level)

    def to_json(self) -> dict:
        out = self.complex.to_json()
        out["T"] = list(self.T)
        out["fixed"] = {str(k): v for k, v in sorted(self.fixed.items())}
        return out

    @classmethod
    def from_json(cls, obj: Mapping) -> "VaryingLevels":
        cx = SimplicialComplex(int(obj["m"]), tuple(tuple(f) for f in obj["facets"]))
        return cls(cx, tuple(obj["T"]), {int(k): int(v) for k, v in obj.get("fixed", {}).items()})


def is_independent(complex: SimplicialComplex, T: Sequence[int]) -> bool:
    Ts = set(T)
    return all(len(Ts & set(f)) <= 1 for f in complex.facets)


class IndependentSetScenario(VaryingLevels):
    """Varying levels on an independent set T: |T ∩ F| <= 1 for every facet F."""

    def __post_init__(self):
        super().__post_init__()
        if not is_independent(self.complex, self.T):
            raise NotIndependentError(f"T = {list(self.T)} meets some facet in more than one coordinate")

    __hash__ = VaryingLevels.__hash__


def scenario_shape(s: VaryingLevels, n: int) -> tuple[IndexShape, dict[Cell, Index]]:
    """The identified shape and the cell -> index relabeling at level n."""
    if not is_independent(s.complex, s.T):
        raise NotIndependentError(f"T = {list(s.T)} is not independent")
    model = s.model(n)
    return s.shape(n), {cell: s.to_index(cell) for cell in model.cells()}


def scenario_chain(s: VaryingLevels) -> ChainSpec:
    """The chain n -> ker of the scenario's marginal map at level n."""
    if not is_independent(s.complex, s.T):
        raise NotIndependentError(f"T = {list(s.T)} is not independent")
    return s.chain()


# ---------------------------------------------------------------------------
# Named families


def independence_complex() -> SimplicialComplex:
    return SimplicialComplex(2, ((1,), (2,)))


def independence_scenario() -> IndependentSetScenario:
    """Two-way independence with both coordinates varying: d = 2, c = 1."""
    return IndependentSetScenario(independence_complex(), (1, 2), {})


def no3way_complex() -> SimplicialComplex:
    return SimplicialComplex(3, ((1, 2), (1, 3), (2, 3)))


def no3way_levels(c: int = 2) -> VaryingLevels:
    """No-3-way interaction with r_1 = r_2 = n and r_3 = c fixed."""
    return VaryingLevels(no3way_complex(), (1, 2), {3: c})


def no3way_chain(c: int = 2) -> ChainSpec:
    return no3way_levels(c).chain(min_level=2)


def no3way_witness(n: int, c: int = 2, check: bool = True) -> IndexedVector:
    """The cyclic element with support 4n in the level-n no-3-way kernel."""
    if n < 2 or c < 2:
        raise ValueError("needs n >= 2 and c >= 2")
    ent: dict[Index, int] = {}

    def add(idx, v):
        ent[idx] = ent.get(idx, 0) + v

    for i in range(1, n + 1):
        add((i, i, 1), 1)
        add((i, i, 2), -1)
    for i in range(1, n):
        add((i, i + 1, 2), 1)
        add((i, i + 1, 1), -1)
    add((n, 1, 2), 1)
    add((n, 1, 1), -1)
    u = IndexedVector(IndexShape(2, c, n), ent)
    if check:
        M = no3way_levels(c).marginal_matrix(n)
        if any(sum(a * b for a, b in zip(row, u.dense())) for row in M):
            raise AssertionError("witness has a nonzero marginal")
    return u


def marginal_rank(model: HierModel) -> int:
    return rank(marginal_matrix(model))
