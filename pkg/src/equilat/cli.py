"""Command-line front end: JSON in, JSON (or a short text summary) out.

Exit codes: 0 success, 1 malformed input, 2 refusal, 3 budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from typing import Any

from . import __version__
from .bases import (
    BasisReport,
    gl_element,
    graver_basis,
    groebner_basis,
    hilbert_basis,
    hilbert_graver_crosscheck,
    sl_element,
    thm_graver_envelope_check,
    verify_groebner,
    verify_markov,
)
from .chains import ChainSpec, orbit_representative, stabilization_scan, sym_span, truncation
from .errors import BudgetExceeded, Refusal
from .indexvec import TERM_ORDERS, IndexedVector, IndexShape
from .intlinalg import LatticeHandle, rank
from .models import (
    HierModel,
    IndependentSetScenario,
    VaryingLevels,
    kernel_lattice,
    marginal_matrix,
    no3way_levels,
    no3way_witness,
)
from .symmetry import canonical_form, is_sym_invariant, orbit

COMMANDS = (
    "graver",
    "hilbert",
    "groebner",
    "markov-verify",
    "groebner-verify",
    "orbit",
    "canon",
    "lift-check",
    "stabilize",
    "model-kernel",
    "no3way",
    "envelope-check",
)


class MalformedInput(ValueError):
    reason = "malformed-input"


# ---------------------------------------------------------------------------
# input parsing


def _load(arg: str | None, what: str) -> Any:
    if arg is None:
        raise MalformedInput(f"missing {what}")
    text = arg if arg.lstrip().startswith(("{", "[")) else None
    if text is None:
        try:
            with open(arg, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise MalformedInput(f"cannot read {what}: {exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"{what} is not valid JSON: {exc}") from None


def parse_vector(obj: Any, shape: IndexShape | None = None) -> IndexedVector:
    """A vector given canonically, as an entry list, or as a dense list."""
    if isinstance(obj, dict):
        if "shape" in obj:
            return IndexedVector.from_json(obj)
        if shape is None:
            raise MalformedInput("vector without a shape")
        return IndexedVector.from_json(obj, shape)
    if isinstance(obj, list):
        if shape is None:
            if all(isinstance(x, int) for x in obj):
                return IndexedVector.from_list(obj)
            raise MalformedInput("vector without a shape")
        if all(isinstance(x, int) for x in obj):
            return IndexedVector.from_dense(shape, obj)
        return IndexedVector(shape, ((tuple(k), v) for k, v in obj))
    raise MalformedInput(f"cannot parse vector from {obj!r}")


def parse_lattice(obj: Any) -> LatticeHandle:
    """Lattice JSON: {"shape": ..., "generators": [...], "closure": none|span|saturated}."""
    if not isinstance(obj, dict) or "shape" not in obj:
        raise MalformedInput("lattice JSON needs a shape")
    shape = IndexShape.from_json(obj["shape"])
    gens = [parse_vector(g, shape) for g in obj.get("generators", [])]
    closure = obj.get("closure", "none")
    if closure == "none":
        return LatticeHandle(shape, gens)
    if closure == "span":
        return sym_span(shape, gens)
    if closure == "saturated":
        gens = [g for g in gens if not g.is_zero()]
        if not gens:
            return LatticeHandle(shape)
        narrow = [g.with_shape(shape.resized(max(1, max(x.width() for x in gens)))) for g in gens]
        return truncation(ChainSpec(shape.d, shape.c, narrow, "saturated-probe"), shape.n)
    raise MalformedInput(f"unknown closure {closure!r}")


def parse_basis(obj: Any, shape: IndexShape) -> list[IndexedVector]:
    if isinstance(obj, dict):
        obj = obj.get("elements", obj.get("generators"))
    if not isinstance(obj, list):
        raise MalformedInput("basis JSON must be a list or have an 'elements' field")
    out = [parse_vector(v, shape) for v in obj]
    for v in out:
        if v.shape != shape:
            raise MalformedInput("basis vector shape differs from the lattice shape")
    return out


def parse_chain(obj: Any) -> ChainSpec:
    if isinstance(obj, dict) and "facets" in obj:
        return _scenario(obj).chain(min_level=int(obj.get("min_level", 1)))
    if isinstance(obj, list):
        seed = [parse_vector(v) for v in obj]
        n = max(v.shape.n for v in seed)
        seed = [v.with_shape(v.shape.resized(n)) for v in seed]
        return ChainSpec(1, 1, seed, "span")
    if isinstance(obj, dict):
        d, c = int(obj.get("d", 1)), int(obj.get("c", 1))
        seed = [parse_vector(v) for v in obj["seed"]]
        n = max(v.shape.n for v in seed)
        seed = [v.with_shape(v.shape.resized(n)) for v in seed]
        return ChainSpec(d, c, seed, obj.get("mode", "span"))
    raise MalformedInput("cannot parse chain description")


def _scenario(obj: dict) -> VaryingLevels:
    cls = VaryingLevels if obj.get("independent") is False else IndependentSetScenario
    return cls.from_json(obj)


# ---------------------------------------------------------------------------
# commands


def _report_json(report: BasisReport, L: LatticeHandle) -> dict:
    out = report.to_json()
    if L.shape.n >= 1 and is_sym_invariant(L):
        reps = sorted({orbit_representative(u) for u in report.elements}, key=lambda v: (v.norm(), v.shape.n, v.sort_key()))
        out["representatives"] = [r.to_json() for r in reps]
    out["size"] = len(report)
    return out


def cmd_graver(a) -> dict:
    L = parse_lattice(_load(a.input, "--in"))
    return _report_json(graver_basis(L), L)


def cmd_hilbert(a) -> dict:
    L = parse_lattice(_load(a.input, "--in"))
    return _report_json(hilbert_basis(L), L)


def cmd_groebner(a) -> dict:
    L = parse_lattice(_load(a.input, "--in"))
    return _report_json(groebner_basis(L, a.order), L)


def cmd_markov_verify(a) -> dict:
    L = parse_lattice(_load(a.input, "--in"))
    B = parse_basis(_load(a.basis, "--basis"), L.shape)
    return {"verified_up_to": a.bound, "result": verify_markov(L, B, a.bound)}


def cmd_groebner_verify(a) -> dict:
    L = parse_lattice(_load(a.input, "--in"))
    B = parse_basis(_load(a.basis, "--basis"), L.shape)
    return {"verified_up_to": a.bound, "order": a.order, "result": verify_groebner(L, B, a.order, a.bound)}


def cmd_orbit(a) -> dict:
    u = parse_vector(_load(a.input, "--in"))
    n = a.n or u.shape.n
    return {"n": n, "orbit": [v.to_json() for v in orbit(u, n)]}


def cmd_canon(a) -> dict:
    u = parse_vector(_load(a.input, "--in"))
    n = a.n or u.shape.n
    return {"n": n, "canonical": canonical_form(u, n).to_json()}


def cmd_lift_check(a) -> dict:
    L = parse_lattice(_load(a.input, "--in"))
    return {"result": hilbert_graver_crosscheck(L)}


def cmd_stabilize(a) -> dict:
    src = a.seed if a.seed is not None else a.input
    spec = parse_chain(_load(src, "--seed"))
    if a.mode:
        spec.mode = a.mode
    if a.n_max is None:
        raise MalformedInput("stabilize needs --n-max")
    return stabilization_scan(spec, a.kind, a.n_max, a.window).to_json()


def cmd_model_kernel(a) -> dict:
    obj = _load(a.input, "--in")
    if "T" in obj:
        s = _scenario(obj)
        if a.n is None:
            raise MalformedInput("a scenario needs --n")
        M = s.marginal_matrix(a.n)
        L = s.kernel_lattice(a.n)
    else:
        model = HierModel.from_json(obj)
        M = marginal_matrix(model)
        L = kernel_lattice(model)
    return {
        "shape": L.shape.to_json(),
        "matrix": {"rows": len(M), "cols": len(M[0]) if M else 0, "rank": rank(M)},
        "rank": L.rank,
        "generators": [v.to_json()["entries"] for v in L.basis_vectors()],
    }


def cmd_no3way(a) -> dict:
    n = a.n
    if n is None:
        raise MalformedInput("no3way needs --n")
    c = a.c
    u = no3way_witness(n, c)
    L = no3way_levels(c).kernel_lattice(n)
    return {"n": n, "c": c, "member": L.member(u), "support_size": u.support_size(), "vector": u.to_json()}


def cmd_envelope_check(a) -> dict:
    L = parse_lattice(_load(a.input, "--in"))
    gl = gl_element(L) if L.hnf_basis and L.shape.n >= 2 else None
    sl = sl_element(L)
    return {
        "result": thm_graver_envelope_check(L),
        "g_L": gl.to_json() if gl is not None else None,
        "s_L": sl.to_json(),
    }


HANDLERS = {
    "graver": cmd_graver,
    "hilbert": cmd_hilbert,
    "groebner": cmd_groebner,
    "markov-verify": cmd_markov_verify,
    "groebner-verify": cmd_groebner_verify,
    "orbit": cmd_orbit,
    "canon": cmd_canon,
    "lift-check": cmd_lift_check,
    "stabilize": cmd_stabilize,
    "model-kernel": cmd_model_kernel,
    "no3way": cmd_no3way,
    "envelope-check": cmd_envelope_check,
}


# ---------------------------------------------------------------------------
# output


def _is_vector(obj: Any) -> bool:
    return isinstance(obj, dict) and "shape" in obj and "entries" in obj


def _text(obj: Any) -> str:
    if isinstance(obj, dict):
        lines = []
        for k, v in obj.items():
            if isinstance(v, list) and v and all(_is_vector(x) for x in v) and len(v) <= 50:
                lines.append(f"{k}:")
                lines.extend(f"  {IndexedVector.from_json(x)!r}" for x in v)
            elif _is_vector(v):
                lines.append(f"{k}: {IndexedVector.from_json(v)!r}")
            elif isinstance(v, list):
                lines.append(f"{k}: {len(v)} item(s)")
            elif isinstance(v, dict):
                lines.append(f"{k}: {{{', '.join(sorted(v))}}}")
            else:
                lines.append(f"{k}: {v}")
        return "\n".join(lines) + "\n"
    return f"{obj}\n"


def render(obj: Any, fmt: str) -> str:
    if fmt == "text":
        return _text(obj)
    return json.dumps(obj, sort_keys=True) + "\n"


def write_atomic(path: str, data: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".equilat-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="equilat", description="Exact bases of symmetric integer lattices.")
    p.add_argument("--version", action="version", version=f"equilat {__version__}")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--in", dest="input", help="input JSON file (or inline JSON)")
    p.add_argument("--basis", help="basis JSON file for verify commands")
    p.add_argument("--order", choices=TERM_ORDERS, default="lex")
    p.add_argument("--bound", type=int, default=4)
    p.add_argument("--budget", type=int, help="override every enumeration/completion cap")
    p.add_argument("--n-max", dest="n_max", type=int)
    p.add_argument("--window", type=int, default=2)
    p.add_argument("--seed", help="chain seed JSON for stabilize")
    p.add_argument("--kind", default="graver", help="basis kind for stabilize")
    p.add_argument("--mode", choices=("span", "saturated-probe"), help="chain mode for stabilize")
    p.add_argument("--n", type=int, help="degree for orbit, canon, model-kernel, no3way")
    p.add_argument("--c", type=int, default=2, help="bounded range for no3way")
    p.add_argument("--out", help="write output here instead of stdout")
    p.add_argument("--format", choices=("json", "text"), default="json")
    return p


def run(argv: list[str] | None = None) -> tuple[int, dict]:
    args = build_parser().parse_args(argv)
    saved = os.environ.get("EQUILAT_BUDGET")
    if args.budget is not None:
        if args.budget <= 0:
            return 1, {"error": "malformed-input", "reason": "malformed-input", "message": "budgets must be positive"}
        os.environ["EQUILAT_BUDGET"] = str(args.budget)
    try:
        return 0, HANDLERS[args.command](args)
    except Refusal as exc:
        return 2, {"error": "refused", "reason": exc.reason, "message": str(exc)}
    except BudgetExceeded as exc:
        return 3, {"error": "budget", "reason": exc.reason, "message": str(exc)}
    except (MalformedInput, ValueError, KeyError, TypeError) as exc:
        return 1, {"error": "malformed-input", "reason": "malformed-input", "message": str(exc)}
    finally:
        if args.budget is not None:
            if saved is None:
                os.environ.pop("EQUILAT_BUDGET", None)
            else:
                os.environ["EQUILAT_BUDGET"] = saved


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    code, report = run(argv)
    data = render(report, args.format)
    if args.out:
        write_atomic(args.out, data)
    else:
        sys.stdout.write(data)
    if code:
        sys.stderr.write(f"equilat: {report.get('message', '')}\n")
    return code


if __name__ == "__main__":
    raise SystemExit(main())
