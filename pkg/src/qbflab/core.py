"""QCNF data model: literals, clauses, prefixes, assignments and QDIMACS I/O.

Literals are signed integers in the DIMACS convention (``3`` is x3, ``-3``
is its negation).  A clause is a ``frozenset`` of literals and an assignment
is a plain ``dict`` from variable id to 0/1.  Everything here is immutable
or treated as such, so values can be shared freely between workers.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping

from .errors import FormatError, OracleScaleError, QBFError

EXISTS = "e"
FORALL = "a"

DEFAULT_VAR_CAP = 24

Clause = frozenset
Assignment = Mapping[int, int]


class _Satisfied:
    """Marker returned by :func:`restrict_clause` for satisfied clauses."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "SATISFIED"


SATISFIED = _Satisfied()


def lit_key(lit: int):
    """Canonical literal order: by variable id, positive before negative."""
    return (abs(lit), lit < 0)


def sorted_lits(clause: Iterable[int]) -> list[int]:
    return sorted(clause, key=lit_key)


def clause(*lits: int) -> frozenset:
    return frozenset(lits)


def is_tautology(c: Iterable[int]) -> bool:
    s = set(c)
    return any(-l in s for l in s)


def clause_vars(c: Iterable[int]) -> frozenset:
    return frozenset(abs(l) for l in c)


def lit_value(lit: int, tau: Assignment):
    """Truth value of ``lit`` under ``tau`` or ``None`` when unassigned."""
    v = tau.get(abs(lit))
    if v is None:
        return None
    return v if lit > 0 else 1 - v


def restrict_clause(c: frozenset, tau: Assignment):
    """Restrict a clause; returns :data:`SATISFIED` or the reduced clause."""
    kept = []
    for l in c:
        v = lit_value(l, tau)
        if v is None:
            kept.append(l)
        elif v == 1:
            return SATISFIED
    return frozenset(kept)


def falsifying_assignment(c: Iterable[int]) -> dict[int, int]:
    """The unique assignment to vars(c) that falsifies every literal of c."""
    return {abs(l): (0 if l > 0 else 1) for l in c}


@dataclass(frozen=True)
class Block:
    quant: str
    vars: frozenset

    def __post_init__(self):
        if self.quant not in (EXISTS, FORALL):
            raise QBFError(f"bad quantifier {self.quant!r}")
        object.__setattr__(self, "vars", frozenset(self.vars))

    @property
    def is_universal(self):
        return self.quant == FORALL


@dataclass(frozen=True)
class QCNF:
    """A closed prenex QBF with a CNF matrix."""

    prefix: tuple
    matrix: tuple
    names: Mapping[int, str] | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        prefix = tuple(b if isinstance(b, Block) else Block(*b) for b in self.prefix)
        matrix = tuple(frozenset(c) for c in self.matrix)
        object.__setattr__(self, "prefix", prefix)
        object.__setattr__(self, "matrix", matrix)
        seen: set[int] = set()
        for b in prefix:
            if seen & b.vars:
                raise QBFError(f"variables {sorted(seen & b.vars)} quantified twice")
            if any(v < 1 for v in b.vars):
                raise QBFError("variable ids must be positive")
            seen |= b.vars
        for c in matrix:
            free = clause_vars(c) - seen
            if free:
                raise QBFError(f"free variables {sorted(free)} in matrix")

    @cached_property
    def level(self) -> dict[int, int]:
        """Map each variable to the index of its prefix block."""
        return {v: i for i, b in enumerate(self.prefix) for v in b.vars}

    @cached_property
    def vars(self) -> frozenset:
        return frozenset(self.level)

    @cached_property
    def exists_vars(self) -> frozenset:
        return frozenset(v for b in self.prefix if not b.is_universal for v in b.vars)

    @cached_property
    def forall_vars(self) -> frozenset:
        return frozenset(v for b in self.prefix if b.is_universal for v in b.vars)

    def is_universal(self, var: int) -> bool:
        return self.prefix[self.level[var]].is_universal

    def left_of(self, a: int, b: int) -> bool:
        """``a <_Q b``."""
        return self.level[a] < self.level[b]

    def rightmost_block(self, variables: Iterable[int]):
        """Index of the rightmost block meeting ``variables`` (None if empty)."""
        levels = [self.level[v] for v in variables]
        return max(levels) if levels else None

    def universal_blocks(self) -> list[int]:
        return [i for i, b in enumerate(self.prefix) if b.is_universal]

    def has_empty_clause(self) -> bool:
        return frozenset() in self.matrix

    def normalize(self) -> "QCNF":
        """Drop empty blocks and merge adjacent same-quantifier blocks."""
        blocks: list[Block] = []
        for b in self.prefix:
            if not b.vars:
                continue
            if blocks and blocks[-1].quant == b.quant:
                blocks[-1] = Block(b.quant, blocks[-1].vars | b.vars)
            else:
                blocks.append(b)
        return QCNF(tuple(blocks), self.matrix, self.names)

    def restrict(self, tau: Assignment) -> "QCNF":
        return restrict_qcnf(self, tau)

    def name(self, var: int) -> str:
        if self.names and var in self.names:
            return self.names[var]
        return f"v{var}"


def restrict_qcnf(phi: QCNF, tau: Assignment) -> QCNF:
    """``phi[tau]``: assigned variables and emptied blocks leave the prefix."""
    unknown = set(tau) - phi.vars
    if unknown:
        raise QBFError(f"assignment mentions unknown variables {sorted(unknown)}")
    if not tau:
        return phi
    prefix = []
    for b in phi.prefix:
        rest = b.vars - tau.keys()
        if rest:
            prefix.append(Block(b.quant, rest))
    matrix = []
    for c in phi.matrix:
        r = restrict_clause(c, tau)
        if r is not SATISFIED:
            matrix.append(r)
    return QCNF(tuple(prefix), tuple(matrix), phi.names)


def eval_matrix(matrix: Iterable[frozenset], tau: Assignment) -> bool:
    """True iff every clause is satisfied; ``tau`` must cover the matrix."""
    for c in matrix:
        sat = False
        for l in c:
            v = lit_value(l, tau)
            if v is None:
                raise QBFError(f"assignment is partial: variable {abs(l)} unassigned")
            if v == 1:
                sat = True
        if not sat:
            return False
    return True


def enumerate_assignments(variables: Iterable[int], cap: int = DEFAULT_VAR_CAP) -> Iterator[dict]:
    """All total assignments to ``variables``, binary-counter order.

    The smallest variable id is the most significant bit, so the sequence
    is lexicographic over the sorted variable tuple.
    """
    vs = sorted(variables)
    if len(vs) > cap:
        raise OracleScaleError(f"{len(vs)} variables exceeds enumeration cap {cap}")
    return (dict(zip(vs, bits)) for bits in itertools.product((0, 1), repeat=len(vs)))


def project(tau: Assignment, variables: Iterable[int]) -> dict:
    return {v: tau[v] for v in variables if v in tau}


def assignment_key(tau: Assignment, variables) -> tuple:
    """Bit tuple of ``tau`` over the given (ordered) variables."""
    return tuple(tau[v] for v in variables)


# ---------------------------------------------------------------------------
# QDIMACS


def write_qdimacs(phi: QCNF) -> str:
    """Canonical QDIMACS text: merged blocks, sorted variables and literals."""
    norm = phi.normalize()
    nvars = max(phi.vars, default=0)
    out = [f"p cnf {nvars} {len(phi.matrix)}"]
    for b in norm.prefix:
        out.append(" ".join([b.quant, *map(str, sorted(b.vars)), "0"]))
    for c in phi.matrix:
        out.append(" ".join([*map(str, sorted_lits(c)), "0"]))
    return "\n".join(out) + "\n"


def parse_qdimacs(text: str) -> QCNF:
    header = None
    blocks: list[Block] = []
    matrix: list[frozenset] = []
    in_matrix = False
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        toks = line.split()
        if toks[0] == "p":
            if header is not None:
                raise FormatError("duplicate header", no)
            if len(toks) != 4 or toks[1] != "cnf":
                raise FormatError(f"malformed header {line!r}", no)
            try:
                header = (int(toks[2]), int(toks[3]))
            except ValueError:
                raise FormatError(f"malformed header {line!r}", no) from None
            if header[0] < 0 or header[1] < 0:
                raise FormatError("negative counts in header", no)
            continue
        if header is None:
            raise FormatError("content before header", no)
        nvars = header[0]
        if toks[0] in (EXISTS, FORALL):
            if in_matrix:
                raise FormatError("quantifier line after clauses", no)
            nums = _int_tokens(toks[1:], no)
            if not nums or nums[-1] != 0:
                raise FormatError("unterminated quantifier line", no)
            vs = nums[:-1]
            if any(v <= 0 or v > nvars for v in vs) or 0 in vs:
                raise FormatError("variable out of range in prefix", no)
            if blocks and blocks[-1].quant == toks[0]:
                blocks[-1] = Block(toks[0], blocks[-1].vars | frozenset(vs))
            else:
                blocks.append(Block(toks[0], frozenset(vs)))
            continue
        in_matrix = True
        nums = _int_tokens(toks, no)
        if nums[-1] != 0:
            raise FormatError("unterminated clause line", no)
        lits = nums[:-1]
        if 0 in lits:
            raise FormatError("embedded 0 in clause line", no)
        if any(abs(l) > nvars for l in lits):
            raise FormatError("variable out of range in clause", no)
        matrix.append(frozenset(lits))
    if header is None:
        raise FormatError("missing header")
    if len(matrix) != header[1]:
        raise FormatError(f"header announces {header[1]} clauses, found {len(matrix)}")
    quantified = set().union(*(b.vars for b in blocks)) if blocks else set()
    for c in matrix:
        free = clause_vars(c) - quantified
        if free:
            raise FormatError(f"free variables {sorted(free)} are not supported")
    return QCNF(tuple(blocks), tuple(matrix))


def _int_tokens(toks, no):
    try:
        return [int(t) for t in toks]
    except ValueError:
        raise FormatError(f"non-integer token in {' '.join(toks)!r}", no) from None
