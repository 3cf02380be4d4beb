import json
import os


class BudgetExceeded(RuntimeError):
    """A configured enumeration or completion cap was hit."""

    def __init__(self, what: str, limit: int, partial=None):
        super().__init__(f"{what} budget of {limit} exceeded")
        self.what = what
        self.limit = limit
        self.partial = partial
        self.reason = f"budget:{what}"


class Refusal(ValueError):
    """The request is well formed but cannot be answered soundly."""

    reason = "refused"


class InfiniteFiberError(Refusal):
    reason = "infinite-fiber"


class NotIndependentError(Refusal):
    reason = "not-independent"


DEFAULT_BUDGETS = {
    "ball_nodes": 10**7,
    "orbit_size": 10**6,
    "graver_pairs": 200_000,
    "graver_elements": 50_000,
    "hilbert_pairs": 200_000,
    "hilbert_elements": 50_000,
    "groebner_pairs": 200_000,
    "groebner_elements": 50_000,
    "fiber_size": 200_000,
    "cells": 20_000,
}


def budget(name: str, override: int | None = None) -> int:
    """Resolve a cap: explicit argument, then EQUILAT_BUDGET, then default.

    EQUILAT_BUDGET is either a single integer applied to every cap or a JSON
    object mapping cap names to integers.
    """
    if override is not None:
        if override <= 0:
            raise ValueError("budgets must be positive")
        return override
    env = os.environ.get("EQUILAT_BUDGET")
    if env:
        env = env.strip()
        if env.startswith("{"):
            table = json.loads(env)
            if name in table:
                return int(table[name])
        else:
            return int(env)
    return DEFAULT_BUDGETS[name]
