"""Uniform truth-table view of proof lines of every system.

A :class:`BoolFn` is a Boolean function stored as a flat numpy bool array
over a sorted tuple of variables (first variable most significant, the same
order as :func:`qbflab.core.enumerate_assignments`).  Every line kind
(clause, formula, linear inequality, polynomial) exposes ``vars``, ``fn()``
and ``to_text()``; semantic operations go through ``BoolFn``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .core import sorted_lits
from .errors import OracleScaleError
from .formula import Formula

LINE_VAR_CAP = 22


def columns(vs, cap: int = LINE_VAR_CAP) -> dict:
    """Bool column per variable over all 2^k assignments of ``vs``."""
    k = len(vs)
    if k > cap:
        raise OracleScaleError(f"truth table over {k} variables exceeds cap {cap}")
    idx = np.arange(1 << k, dtype=np.int64)
    return {v: ((idx >> (k - 1 - j)) & 1).astype(bool) for j, v in enumerate(vs)}


@dataclass(frozen=True, eq=False)
class BoolFn:
    vars: tuple
    table: np.ndarray

    @classmethod
    def const(cls, value: bool) -> "BoolFn":
        return cls((), np.array([bool(value)]))

    def cube(self):
        return self.table.reshape((2,) * len(self.vars))

    def restrict(self, tau) -> "BoolFn":
        idx = tuple(int(tau[v]) if v in tau else slice(None) for v in self.vars)
        rest = tuple(v for v in self.vars if v not in tau)
        return BoolFn(rest, np.ascontiguousarray(self.cube()[idx]).reshape(-1))

    def expand(self, vs) -> np.ndarray:
        """Table over the sorted superset ``vs``."""
        vs = tuple(vs)
        if vs == self.vars:
            return self.table
        own = set(self.vars)
        shape = [2 if v in own else 1 for v in vs]
        full = np.broadcast_to(self.table.reshape(shape), (2,) * len(vs))
        return full.reshape(-1)

    def value(self, tau) -> bool:
        i = 0
        for v in self.vars:
            i = (i << 1) | int(tau[v])
        return bool(self.table[i])

    def is_tautology(self) -> bool:
        return bool(self.table.all())

    def is_falsum(self) -> bool:
        return not self.table.any()

    def support(self) -> tuple:
        """Variables the function actually depends on."""
        out = []
        c = self.cube()
        for i, v in enumerate(self.vars):
            a = np.take(c, 0, axis=i)
            b = np.take(c, 1, axis=i)
            if not np.array_equal(a, b):
                out.append(v)
        return tuple(out)


def joint_vars(*fns) -> tuple:
    return tuple(sorted(set().union(*(f.vars for f in fns))))


def equivalent(f: BoolFn, g: BoolFn, cap: int = LINE_VAR_CAP) -> bool:
    vs = joint_vars(f, g)
    if len(vs) > cap:
        raise OracleScaleError(f"equivalence over {len(vs)} variables exceeds cap {cap}")
    return bool(np.array_equal(f.expand(vs), g.expand(vs)))


def entails(premises, g: BoolFn, cap: int = LINE_VAR_CAP) -> bool:
    """Every assignment satisfying all premises satisfies g."""
    vs = joint_vars(g, *premises)
    if len(vs) > cap:
        raise OracleScaleError(f"entailment over {len(vs)} variables exceeds cap {cap}")
    acc = np.ones(1 << len(vs), dtype=bool)
    for p in premises:
        acc &= p.expand(vs)
    return not bool((acc & ~g.expand(vs)).any())


# ---------------------------------------------------------------------------
# clause and formula lines


@dataclass(frozen=True)
class ClauseLine:
    clause: frozenset
    kind = "cl"

    @cached_property
    def vars(self) -> tuple:
        return tuple(sorted({abs(l) for l in self.clause}))

    def fn(self) -> BoolFn:
        vs = self.vars
        cols = columns(vs)
        out = np.zeros(1 << len(vs), dtype=bool)
        for l in self.clause:
            out |= cols[l] if l > 0 else ~cols[-l]
        return BoolFn(vs, out)

    def to_text(self) -> str:
        return " ".join([*map(str, sorted_lits(self.clause)), "0"])


@dataclass(frozen=True)
class FormulaLine:
    formula: Formula
    kind = "bf"

    @cached_property
    def vars(self) -> tuple:
        return tuple(sorted(self.formula.vars))

    def fn(self) -> BoolFn:
        vs = self.vars
        t = self.formula.table(columns(vs))
        return BoolFn(vs, np.broadcast_to(t, (1 << len(vs),)).copy())

    def to_text(self) -> str:
        return self.formula.to_text()
