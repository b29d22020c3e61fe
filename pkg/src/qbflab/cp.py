"""Cutting Planes with universal reduction.

Lines are integer linear inequalities ``sum a_v * v >= A`` over 0/1
variables.  Proof trace format, one step per line::

    <id> <rule> <args> : <c>*v<k> ... >= <A>

with rules ``ax k``, ``bl v`` (v >= 0), ``bu v`` (-v >= -1), ``triv``
(0 >= -1), ``lin i c1 j c2``, ``div i c`` and ``red i <lit>*`` where a
positive literal sets the variable to 1 and a negative one to 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .core import QCNF, is_tautology, sorted_lits
from .errors import FormatError, ProofError, QBFError
from .lines import BoolFn, columns

AX, BL, BU, TRIV, LIN, DIV, RED = "ax", "bl", "bu", "triv", "lin", "div", "red"


@dataclass(frozen=True)
class LinearInequality:
    """``sum coeffs[v] * v >= const``; coefficients stored without zeros."""

    terms: tuple  # sorted (var, coef) pairs, coef != 0
    const: int

    @classmethod
    def make(cls, coeffs: dict, const: int) -> "LinearInequality":
        return cls(tuple(sorted((v, int(c)) for v, c in coeffs.items() if c != 0)), int(const))

    @cached_property
    def coeffs(self) -> dict:
        return dict(self.terms)

    @property
    def vars(self) -> tuple:
        return tuple(v for v, _ in self.terms)

    def combine(self, c1: int, other: "LinearInequality", c2: int) -> "LinearInequality":
        d = {v: c1 * a for v, a in self.terms}
        for v, a in other.terms:
            d[v] = d.get(v, 0) + c2 * a
        return LinearInequality.make(d, c1 * self.const + c2 * other.const)

    def divide(self, c: int) -> "LinearInequality":
        if c <= 0 or any(a % c for _, a in self.terms):
            raise QBFError(f"{c} does not divide every coefficient")
        return LinearInequality(tuple((v, a // c) for v, a in self.terms), -((-self.const) // c))

    def substitute(self, beta) -> "LinearInequality":
        d = {}
        const = self.const
        for v, a in self.terms:
            if v in beta:
                const -= a * beta[v]
            else:
                d[v] = a
        return LinearInequality.make(d, const)

    def holds(self, tau) -> bool:
        return sum(a * tau[v] for v, a in self.terms) >= self.const

    def is_contradiction(self) -> bool:
        return not self.terms and self.const > 0

    def to_text(self) -> str:
        lhs = " ".join(f"{a}*v{v}" for v, a in self.terms)
        return f"{lhs} >= {self.const}" if lhs else f">= {self.const}"


def encode_clause_cp(c) -> LinearInequality:
    """Clause as ``sum x - sum y >= 1 - #negative literals``."""
    c = frozenset(c)
    if is_tautology(c):
        raise QBFError("tautological clause has no CP encoding")
    neg = sum(1 for l in c if l < 0)
    return LinearInequality.make({abs(l): (1 if l > 0 else -1) for l in c}, 1 - neg)


@dataclass(frozen=True)
class CPLine:
    ineq: LinearInequality
    kind = "cp"

    @property
    def vars(self) -> tuple:
        return self.ineq.vars

    def fn(self) -> BoolFn:
        vs = self.vars
        cols = columns(vs)
        bound = sum(abs(a) for _, a in self.ineq.terms) + abs(self.ineq.const)
        dtype = np.int64 if bound < 2**62 else object
        acc = np.zeros(1 << len(vs), dtype=dtype)
        for v, a in self.ineq.terms:
            acc = acc + cols[v].astype(dtype) * a
        return BoolFn(vs, np.asarray(acc >= self.ineq.const, dtype=bool))

    def to_text(self) -> str:
        return self.ineq.to_text()


def cp_line_eval(L: LinearInequality, tau) -> bool:
    return L.holds(tau)


@dataclass(frozen=True)
class CPStep:
    id: int
    line: LinearInequality
    rule: str
    args: tuple = ()


@dataclass
class CPProof:
    steps: list = field(default_factory=list)

    def __len__(self):
        return len(self.steps)

    def size(self) -> int:
        return len(self.steps)


def _reduce_ok(phi: QCNF, L: LinearInequality, beta: dict):
    """beta assigns variables of one universal block that is rightmost in L.

    A partial assignment to the block is allowed: variables inside one block
    can be reordered freely, so the assigned part may be taken as rightmost.
    """
    if not beta:
        raise QBFError("empty reduction")
    blocks = {phi.level.get(v) for v in beta}
    if None in blocks:
        raise QBFError("reduction assigns an unknown variable")
    if len(blocks) != 1:
        raise QBFError("reduction spans several blocks")
    (b,) = blocks
    if not phi.prefix[b].is_universal:
        raise QBFError("reduction assigns an existential block")
    if phi.rightmost_block(L.vars) != b:
        raise QBFError("reduced block is not rightmost in the line")


def check_cp(phi: QCNF, proof: CPProof, refutation: bool = True) -> bool:
    lines: dict[int, LinearInequality] = {}
    last = None
    for s in proof.steps:
        if last is not None and s.id <= last:
            raise ProofError("step ids must be strictly increasing", s.id)
        last = s.id
        a = s.args
        try:
            if s.rule == AX:
                (k,) = a
                if not 0 <= k < len(phi.matrix):
                    raise QBFError(f"no matrix clause {k}")
                want = encode_clause_cp(phi.matrix[k])
            elif s.rule == BL:
                want = LinearInequality.make({a[0]: 1}, 0)
            elif s.rule == BU:
                want = LinearInequality.make({a[0]: -1}, -1)
            elif s.rule == TRIV:
                want = LinearInequality((), -1)
            elif s.rule == LIN:
                i, c1, j, c2 = a
                if c1 < 0 or c2 < 0:
                    raise QBFError("negative multiplier")
                want = _get(lines, i).combine(c1, _get(lines, j), c2)
            elif s.rule == DIV:
                i, c = a
                want = _get(lines, i).divide(c)
            elif s.rule == RED:
                i, beta = a[0], dict(a[1])
                src = _get(lines, i)
                _reduce_ok(phi, src, beta)
                want = src.substitute(beta)
            else:
                raise QBFError(f"unknown rule {s.rule!r}")
        except (QBFError, ValueError, TypeError) as e:
            raise ProofError(str(e), s.id) from None
        if s.rule in (BL, BU) and a[0] not in phi.level:
            raise ProofError("Boolean axiom on an unknown variable", s.id)
        if want != s.line:
            raise ProofError(f"line does not match rule result {want.to_text()}", s.id)
        lines[s.id] = s.line
    if refutation:
        if not proof.steps or not proof.steps[-1].line.is_contradiction():
            raise ProofError("conclusion is not a contradiction", proof.steps[-1].id if proof.steps else None)
    return True


def _get(lines, i):
    if i not in lines:
        raise QBFError(f"dangling reference {i}")
    return lines[i]


def cp_response(phi: QCNF, L: LinearInequality) -> dict:
    """Sign rule: u -> 0 when its coefficient is >= 0, else 1, on the rightmost block."""
    b = phi.rightmost_block(L.vars)
    if b is None or not phi.prefix[b].is_universal:
        raise QBFError("line is not reducible")
    return {v: (0 if a >= 0 else 1) for v, a in L.terms if phi.level[v] == b}


# ---------------------------------------------------------------------------
# simulation of QU-Res


def from_qures(phi: QCNF, proof) -> CPProof:
    """Line-by-line CP+red simulation of a QU-Res refutation.

    Resolution becomes a sum, Boolean axioms on the literals that occur in
    only one antecedent, and division by 2.  A reduction is split per
    universal block, rightmost first.
    """
    from .qures import AXIOM, REDUCE, RESOLVE, WEAKEN

    out: list[CPStep] = []
    ref: dict[int, int] = {}

    def add(line, rule, *args):
        sid = len(out) + 1
        out.append(CPStep(sid, line, rule, tuple(args)))
        return sid

    def line(i):
        return out[i - 1].line

    def bool_ax(lit):
        v = abs(lit)
        return add(LinearInequality.make({v: 1}, 0), BL, v) if lit > 0 else add(LinearInequality.make({v: -1}, -1), BU, v)

    def lin(i, j):
        return add(line(i).combine(1, line(j), 1), LIN, i, 1, j, 1)

    clause = {s.id: s.clause for s in proof.steps}
    index_of = {}
    for k, c in enumerate(phi.matrix):
        index_of.setdefault(c, k)
    for s in proof.steps:
        if s.rule == AXIOM:
            k = s.index if s.index is not None else index_of[s.clause]
            ref[s.id] = add(encode_clause_cp(phi.matrix[k]), AX, k)
        elif s.rule == RESOLVE:
            ida, idb = s.ante
            ca, cb = clause[ida], clause[idb]
            cur = lin(ref[ida], ref[idb])
            piv = s.pivot if s.pivot is not None else next(abs(l) for l in ca if -l in cb)
            for l in sorted_lits((ca ^ cb) - {piv, -piv}):
                cur = lin(cur, bool_ax(l))
            ref[s.id] = add(line(cur).divide(2), DIV, cur, 2)
        elif s.rule == WEAKEN:
            cur = ref[s.ante[0]]
            for l in sorted_lits(s.clause - clause[s.ante[0]]):
                cur = lin(cur, bool_ax(l))
            ref[s.id] = cur
        elif s.rule == REDUCE:
            removed = clause[s.ante[0]] - s.clause
            cur = ref[s.ante[0]]
            for b in sorted({phi.level[abs(l)] for l in removed}, reverse=True):
                beta = {abs(l): (0 if l > 0 else 1) for l in removed if phi.level[abs(l)] == b}
                lits = tuple(sorted(beta.items()))
                cur = add(line(cur).substitute(beta), RED, cur, lits)
            ref[s.id] = cur
    return CPProof(out)


# ---------------------------------------------------------------------------
# text format


def write_cp(proof: CPProof) -> str:
    rows = []
    for s in proof.steps:
        if s.rule == RED:
            i, beta = s.args
            args = [str(i)] + [str(v if x else -v) for v, x in beta]
        else:
            args = [str(x) for x in s.args]
        rows.append(" ".join([str(s.id), s.rule, *args, ":", s.line.to_text()]))
    return "\n".join(rows) + "\n"


def _parse_ineq(text: str, no: int) -> LinearInequality:
    toks = text.split()
    if len(toks) < 2 or toks[-2] != ">=":
        raise FormatError("inequality must end with '>= <A>'", no)
    coeffs = {}
    for t in toks[:-2]:
        c, sep, v = t.partition("*")
        if not sep or not v.startswith("v"):
            raise FormatError(f"bad term {t!r}", no)
        try:
            var, coef = int(v[1:]), int(c)
        except ValueError:
            raise FormatError(f"bad term {t!r}", no) from None
        if var in coeffs or coef == 0 or var <= 0:
            raise FormatError(f"duplicate, zero or invalid term {t!r}", no)
        coeffs[var] = coef
    try:
        const = int(toks[-1])
    except ValueError:
        raise FormatError(f"bad constant {toks[-1]!r}", no) from None
    return LinearInequality.make(coeffs, const)


_ARITY = {AX: 1, BL: 1, BU: 1, TRIV: 0, LIN: 4, DIV: 2}


def parse_cp(text: str) -> CPProof:
    steps = []
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c "):
            continue
        head, sep, body = line.partition(":")
        if not sep:
            raise FormatError("missing ':' separator", no)
        toks = head.split()
        if len(toks) < 2:
            raise FormatError("missing id or rule", no)
        try:
            sid = int(toks[0])
            nums = [int(t) for t in toks[2:]]
        except ValueError:
            raise FormatError("non-integer argument", no) from None
        rule = toks[1]
        if rule == RED:
            if not nums:
                raise FormatError("red needs a source id", no)
            args = (nums[0], tuple(sorted((abs(l), int(l > 0)) for l in nums[1:])))
        elif rule in _ARITY:
            if len(nums) != _ARITY[rule]:
                raise FormatError(f"{rule} takes {_ARITY[rule]} arguments", no)
            args = tuple(nums)
        else:
            raise FormatError(f"unknown rule {rule!r}", no)
        steps.append(CPStep(sid, _parse_ineq(body, no), rule, args))
    return CPProof(steps)
