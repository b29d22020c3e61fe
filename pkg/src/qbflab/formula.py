"""Boolean formulas over {true, false, literal, and, or, not}.

Formulas are immutable trees built from :class:`Formula` nodes.  The text
form is a prefix notation: ``true``, ``false``, ``v3``, ``-v3``,
``(not F)``, ``(and F G ...)``, ``(or F G ...)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import FormatError

CONST = "const"
LIT = "lit"
AND = "and"
OR = "or"
NOT = "not"


@dataclass(frozen=True)
class Formula:
    op: str
    args: tuple = ()
    value: int = 0

    @cached_property
    def vars(self) -> frozenset:
        if self.op == CONST:
            return frozenset()
        if self.op == LIT:
            return frozenset((abs(self.value),))
        return frozenset().union(*(a.vars for a in self.args))

    def evaluate(self, tau) -> bool:
        op = self.op
        if op == CONST:
            return bool(self.value)
        if op == LIT:
            v = tau[abs(self.value)]
            return bool(v) if self.value > 0 else not v
        if op == NOT:
            return not self.args[0].evaluate(tau)
        if op == AND:
            return all(a.evaluate(tau) for a in self.args)
        return any(a.evaluate(tau) for a in self.args)

    def table(self, columns: dict) -> np.ndarray:
        """Vectorised evaluation; ``columns`` maps var -> bool array."""
        op = self.op
        if op == CONST:
            n = len(next(iter(columns.values()))) if columns else 1
            return np.full(n, bool(self.value))
        if op == LIT:
            col = columns[abs(self.value)]
            return col if self.value > 0 else ~col
        if op == NOT:
            return ~self.args[0].table(columns)
        parts = [a.table(columns) for a in self.args]
        fn = np.logical_and if op == AND else np.logical_or
        out = parts[0]
        for p in parts[1:]:
            out = fn(out, p)
        return out

    def restrict(self, tau) -> "Formula":
        """Substitute assigned variables and fold constants."""
        op = self.op
        if op == CONST:
            return self
        if op == LIT:
            v = tau.get(abs(self.value))
            if v is None:
                return self
            return TRUE if (v == 1) == (self.value > 0) else FALSE
        if op == NOT:
            return neg(self.args[0].restrict(tau))
        parts = [a.restrict(tau) for a in self.args]
        return conj(*parts) if op == AND else disj(*parts)

    def to_text(self) -> str:
        op = self.op
        if op == CONST:
            return "true" if self.value else "false"
        if op == LIT:
            return f"v{self.value}" if self.value > 0 else f"-v{-self.value}"
        return "(" + " ".join([op, *(a.to_text() for a in self.args)]) + ")"

    def __str__(self):
        return self.to_text()


TRUE = Formula(CONST, value=1)
FALSE = Formula(CONST, value=0)


def lit(l: int) -> Formula:
    return Formula(LIT, value=l)


def neg(f: Formula) -> Formula:
    if f.op == CONST:
        return FALSE if f.value else TRUE
    if f.op == LIT:
        return lit(-f.value)
    if f.op == NOT:
        return f.args[0]
    return Formula(NOT, (f,))


def conj(*fs: Formula) -> Formula:
    parts = []
    for f in fs:
        if f.op == CONST:
            if not f.value:
                return FALSE
            continue
        parts.append(f)
    if not parts:
        return TRUE
    if len(parts) == 1:
        return parts[0]
    return Formula(AND, tuple(parts))


def disj(*fs: Formula) -> Formula:
    parts = []
    for f in fs:
        if f.op == CONST:
            if f.value:
                return TRUE
            continue
        parts.append(f)
    if not parts:
        return FALSE
    if len(parts) == 1:
        return parts[0]
    return Formula(OR, tuple(parts))


def from_clause(c) -> Formula:
    from .core import sorted_lits

    return disj(*(lit(l) for l in sorted_lits(c)))


def parse_formula(text: str) -> Formula:
    toks = text.replace("(", " ( ").replace(")", " ) ").split()
    pos = 0

    def parse():
        nonlocal pos
        if pos >= len(toks):
            raise FormatError(f"truncated formula {text!r}")
        t = toks[pos]
        pos += 1
        if t == "(":
            if pos >= len(toks):
                raise FormatError(f"truncated formula {text!r}")
            op = toks[pos]
            pos += 1
            args = []
            while pos < len(toks) and toks[pos] != ")":
                args.append(parse())
            if pos >= len(toks):
                raise FormatError(f"unbalanced parentheses in {text!r}")
            pos += 1
            if op == NOT:
                if len(args) != 1:
                    raise FormatError("not takes one argument")
                return Formula(NOT, tuple(args))
            if op in (AND, OR):
                if not args:
                    raise FormatError(f"{op} needs arguments")
                return Formula(op, tuple(args))
            raise FormatError(f"unknown connective {op!r}")
        if t == "true":
            return TRUE
        if t == "false":
            return FALSE
        sign = 1
        if t.startswith("-"):
            sign, t = -1, t[1:]
        if t.startswith("v") and t[1:].isdigit() and int(t[1:]) > 0:
            return lit(sign * int(t[1:]))
        raise FormatError(f"bad formula token {t!r}")

    f = parse()
    if pos != len(toks):
        raise FormatError(f"trailing tokens in formula {text!r}")
    return f
