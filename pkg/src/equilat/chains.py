"""Sym-invariant chains of lattices and stabilization scans."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

from .bases import BasisReport, graver_basis, groebner_basis
from .errors import BudgetExceeded
from .indexvec import IndexedVector, IndexShape
from .intlinalg import LatticeHandle, hnf_rows, intersect_truncation
from .symmetry import PermutationWord, act, canonical_form, orbit, reduce_width

CHAIN_MODES = ("span", "saturated-probe", "level")
SCAN_KINDS = ("generating", "markov", "graver", "groebner-lex", "groebner-dlex", "groebner-revlex")
THEOREM_BACKED = {"generating", "markov", "graver", "groebner-lex"}


def _generators(n: int) -> list[PermutationWord]:
    if n < 2:
        return []
    return [PermutationWord.transposition(n, 1, 2), PermutationWord.cycle(n)]


def sym_span(shape: IndexShape, vectors: Sequence[IndexedVector]) -> LatticeHandle:
    """The lattice spanned by Sym(n)(vectors), n = shape.n.

    Closes the HNF basis under the transposition (1 2) and the long cycle,
    which generate Sym(n), until the basis stops changing.
    """
    rows = hnf_rows(u.with_shape(shape).dense(shape) for u in vectors)
    gens = _generators(shape.n)
    while True:
        new = list(rows)
        for g in gens:
            for r in rows:
                new.append(act(g, IndexedVector.from_dense(shape, r), shape).dense())
        nxt = hnf_rows(new)
        if nxt == rows:
            return LatticeHandle.from_dense(shape, rows)
        rows = nxt


@dataclass
class ChainSpec:
    """A chain (L_n) described by seed vectors or by a per-level builder.

    ``span``: L_n is spanned by Sym(n)(seed).  ``saturated-probe``: L_n is
    approximated by intersecting spans at degrees N = n, n+1, ... with
    Z^(I_n) until two consecutive intersections agree.  ``level``: L_n is
    ``level(n)``.
    """

    d: int
    c: int
    seed: list[IndexedVector] = field(default_factory=list)
    mode: str = "span"
    level: Callable[[int], LatticeHandle] | None = None
    min_level: int | None = None
    name: str = ""

    def __post_init__(self):
        if self.mode not in CHAIN_MODES:
            raise ValueError(f"unknown chain mode {self.mode!r}")
        if self.mode == "level":
            if self.level is None:
                raise ValueError("level mode needs a level builder")
        else:
            if not self.seed:
                raise ValueError("seed must be nonempty")
            shapes = {u.shape for u in self.seed}
            if len(shapes) != 1:
                raise ValueError("seed vectors must share one shape")
            (s,) = shapes
            if (s.d, s.c) != (self.d, self.c):
                raise ValueError("seed shape does not match d, c")

    @property
    def start(self) -> int:
        if self.min_level is not None:
            return self.min_level
        if self.mode == "level":
            return 1
        return max(1, max(u.width() for u in self.seed))

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "c": self.c,
            "mode": self.mode,
            "seed": [u.to_json() for u in self.seed],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ChainSpec":
        seed = [IndexedVector.from_json(u) for u in obj["seed"]]
        return cls(int(obj["d"]), int(obj["c"]), seed, obj.get("mode", "span"))


def truncation(spec: ChainSpec, n: int, max_probe: int | None = None) -> LatticeHandle:
    """The level-n lattice of the chain."""
    if spec.mode == "level":
        return spec.level(n)
    shape = IndexShape(spec.d, spec.c, n)
    if n < max(u.width() for u in spec.seed):
        raise ValueError("n is smaller than the seed width")
    if spec.mode == "span":
        L = sym_span(shape, spec.seed)
        L.meta["mode"] = "span"
        return L
    top = max_probe if max_probe is not None else n + 8
    prev = intersect_truncation(sym_span(shape, spec.seed), n)
    for N in range(n + 1, top + 1):
        cur = intersect_truncation(sym_span(shape.resized(N), spec.seed), n)
        if cur == prev:
            cur.meta.update(mode="saturated-probe", probe_degree=N - 1, heuristic=True)
            return cur
        prev = cur
    raise BudgetExceeded("probe_degree", top)


def orbit_representative(u: IndexedVector) -> IndexedVector:
    """Canonical orbit representative, stored at the smallest degree that fits it."""
    n = u.shape.n
    v = u
    m = u.support_size()
    if m and n >= u.shape.d * m + 1:
        v = act(reduce_width(u.support(), u.shape), u, u.shape)
    v = canonical_form(v, n)
    return v.with_shape(u.shape.resized(max(1, v.width())))


def _rep_key(u: IndexedVector):
    return (u.norm(), u.shape.n, u.sort_key())


def equivariant_basis_extract(L_n: LatticeHandle, basis: BasisReport | Sequence[IndexedVector]) -> list[IndexedVector]:
    """Small-width representatives B' with basis ⊆ Sym(n)(B')."""
    shape = L_n.shape
    out = set()
    for u in basis:
        m = u.support_size()
        if m and shape.n < shape.d * m + 1:
            raise ValueError(f"support of size {m} is too wide for n = {shape.n}")
        out.add(orbit_representative(u))
    return sorted(out, key=_rep_key)


def support_bound_report(basis: BasisReport | Sequence[IndexedVector]) -> int:
    return max((u.support_size() for u in basis), default=0)


def orbit_span(shape: IndexShape, reps: Sequence[IndexedVector]) -> LatticeHandle:
    return sym_span(shape, [r.with_shape(shape) for r in reps])


def _greedy_generating(L: LatticeHandle) -> list[IndexedVector]:
    """Small equivariant generating set picked from Graver representatives."""
    reps = sorted({orbit_representative(u) for u in graver_basis(L).elements}, key=_rep_key)
    chosen: list[IndexedVector] = []
    current = LatticeHandle(L.shape)
    for r in reps:
        if current == L:
            break
        rv = r.with_shape(L.shape)
        if not current.member(rv):
            chosen.append(r)
            current = orbit_span(L.shape, chosen)
    if current != L:
        raise AssertionError("Graver representatives failed to generate the lattice")
    return chosen


def level_basis(L: LatticeHandle, kind: str) -> list[IndexedVector]:
    """The basis of the given kind at one level, as vectors of L.shape."""
    if kind == "graver":
        return list(graver_basis(L).elements)
    if kind == "generating":
        return [r.with_shape(L.shape) for r in _greedy_generating(L)]
    if kind == "markov":
        gb = groebner_basis(L, "dlex", markov=graver_basis(L).elements)
        closed = set()
        for u in gb.elements:
            closed.update(orbit(u, L.shape.n))
        return sorted(closed, key=lambda v: (v.norm(), v.sort_key()))
    if kind.startswith("groebner-"):
        return list(groebner_basis(L, kind.split("-", 1)[1]).elements)
    raise ValueError(f"unknown scan kind {kind!r}")


@dataclass
class StabilizationWitness:
    kind: str
    level: int
    representatives: list[IndexedVector]
    confirmed_through: int
    support_bound: int
    window: int = 2
    theorem_backed: bool = True
    levels: list[dict] = field(default_factory=list)

    def __post_init__(self):
        if self.confirmed_through < self.level:
            raise ValueError("confirmed_through must be at least the witness level")
        for r in self.representatives:
            if r.width() > self.level:
                raise ValueError("representatives must live inside I_p")

    @property
    def note(self) -> str:
        text = (
            f"witness: representatives unchanged on levels {self.level}..{self.confirmed_through};"
            " a finite-window observation, not a proof"
        )
        if not self.theorem_backed:
            text += "; stabilization for this kind is not theorem-backed (experimental)"
        return text

    def to_json(self) -> dict:
        return {
            "witness": {
                "kind": self.kind,
                "level": self.level,
                "confirmed_through": self.confirmed_through,
                "window": self.window,
                "support_bound": self.support_bound,
                "theorem_backed": self.theorem_backed,
                "representatives": [r.to_json() for r in self.representatives],
                "note": self.note,
            },
            "levels": self.levels,
        }


@dataclass
class ScanResult:
    """Outcome of a scan: the witness if one was observed, plus per-level data."""

    witness: StabilizationWitness | None
    levels: list[dict]
    reps: dict[int, list[IndexedVector]]
    error: str | None = None

    def to_json(self) -> dict:
        if self.witness is not None:
            out = self.witness.to_json()
        else:
            out = {"witness": None, "levels": self.levels}
        if self.error:
            out["error"] = self.error
        return out


def stabilization_scan(
    spec: ChainSpec,
    kind: str,
    n_max: int,
    window: int = 2,
    n_min: int | None = None,
) -> ScanResult:
    """Scan levels n_min..n_max for a level p whose representatives persist.

    The witness level is the smallest p such that the representative set at
    p equals the one at every computed level from p on, covering at least
    ``window`` levels.  A budget failure ends the scan; levels computed
    before it still count and the error is reported alongside.
    """
    if kind not in SCAN_KINDS:
        raise ValueError(f"unknown scan kind {kind!r}; expected one of {SCAN_KINDS}")
    if window < 1:
        raise ValueError("window must be positive")
    lo = spec.start if n_min is None else n_min
    reps: dict[int, list[IndexedVector]] = {}
    levels = []
    error = None
    for n in range(lo, n_max + 1):
        try:
            L = truncation(spec, n)
            basis = level_basis(L, kind)
        except BudgetExceeded as exc:
            error = f"level {n}: {exc}"
            levels.append({"n": n, "error": exc.reason})
            break
        r = sorted({orbit_representative(u) for u in basis}, key=_rep_key)
        reps[n] = r
        levels.append(
            {
                "n": n,
                "rank": L.rank,
                "basis_size": len(basis),
                "representatives": len(r),
                "support_bound": support_bound_report(basis),
            }
        )
    witness = None
    done = sorted(reps)
    if done:
        last = done[-1]
        p = last
        while p - 1 in reps and reps[p - 1] == reps[last]:
            p -= 1
        if last - p + 1 >= window:
            witness = StabilizationWitness(
                kind=kind,
                level=p,
                representatives=reps[p],
                confirmed_through=last,
                support_bound=support_bound_report(reps[p]),
                window=window,
                theorem_backed=kind in THEOREM_BACKED,
                levels=levels,
            )
    return ScanResult(witness, levels, reps, error)
