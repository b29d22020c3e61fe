"""Exact minimum hitting set by exhaustive search in increasing size."""

from __future__ import annotations

from itertools import combinations

from .errors import OracleScaleError


def min_hitting_set(sets, universe, budget: int = 5_000_000):
    """Smallest subset of ``universe`` meeting every set in ``sets``.

    ``universe`` fixes the candidate order; among hitting sets of minimum
    size the lexicographically first (in that order) is returned, as a list.
    Raises ValueError if some set is empty.
    """
    pos = {u: i for i, u in enumerate(universe)}
    family = {frozenset(pos[u] for u in s) for s in sets}
    if frozenset() in family:
        raise ValueError("cannot hit an empty set")
    # supersets of other members are implied
    family = [s for s in family if not any(t < s for t in family)]
    if not family:
        return []
    forced = sorted({next(iter(s)) for s in family if len(s) == 1})
    forced_set = set(forced)
    rest = [s for s in family if not (s & forced_set)]
    if not rest:
        return [universe[i] for i in forced]
    cand = sorted(set().union(*rest))
    work = 0
    for k in range(1, len(cand) + 1):
        for combo in combinations(cand, k):
            work += 1
            if work > budget:
                raise OracleScaleError(f"hitting-set search exceeded budget {budget}")
            chosen = set(combo)
            if all(s & chosen for s in rest):
                return [universe[i] for i in sorted(forced_set | chosen)]
    raise AssertionError("unreachable: the union of all sets always hits")  # pragma: no cover
