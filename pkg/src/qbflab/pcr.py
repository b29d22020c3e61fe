"""Polynomial Calculus with Resolution plus universal reduction.

Algebraic variables are signed ints: ``v`` is x_v and ``-v`` its twin
x̄_v.  A Boolean assignment tau evaluates x_v as 1 - tau(v) and x̄_v as
tau(v), so a line holds when it evaluates to zero and a clause {l1..lk}
is the single monomial l1*...*lk.

Trace format: a header ``p pcr field=Q`` (or ``field=GF(p)``), then::

    <id> <rule> <args> : <coef> * v3 * ~v5^2 + ...

with rules ``ax k``, ``boolax a``, ``compax v``, ``lin i a j b``,
``mul i a`` and ``red i <lit>*``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import lcm

import numpy as np

from .core import QCNF, lit_key, sorted_lits
from .errors import FormatError, ProofError, QBFError
from .lines import BoolFn, columns

AX, BOOLAX, COMPAX, LIN, MUL, RED = "ax", "boolax", "compax", "lin", "mul", "red"


class Field:
    """The rationals (``p=None``) or GF(p)."""

    def __init__(self, p: int | None = None):
        if p is not None and (p < 2 or any(p % d == 0 for d in range(2, int(p**0.5) + 1))):
            raise QBFError(f"{p} is not prime")
        self.p = p

    @property
    def name(self) -> str:
        return "Q" if self.p is None else f"GF({self.p})"

    def __eq__(self, other):
        return isinstance(other, Field) and other.p == self.p

    def __hash__(self):
        return hash(self.p)

    def __repr__(self):
        return f"Field({self.name})"

    def __call__(self, x):
        if self.p is None:
            return Fraction(x)
        x = Fraction(x)
        if x.denominator % self.p == 0:
            raise QBFError(f"{x} has no image in {self.name}")
        return x.numerator * pow(x.denominator, -1, self.p) % self.p

    def fmt(self, x) -> str:
        return str(x)

    def parse(self, s: str):
        try:
            return self(Fraction(s))
        except (ValueError, ZeroDivisionError):
            raise QBFError(f"bad field element {s!r}") from None

    @classmethod
    def from_name(cls, name: str) -> "Field":
        if name == "Q":
            return cls()
        if name.startswith("GF(") and name.endswith(")"):
            return cls(int(name[3:-1]))
        raise QBFError(f"unknown field {name!r}")


QQ = Field()


def _mono_key(m):
    return tuple((*lit_key(a), e) for a, e in m)


def _mono_mul(m, a, e=1):
    d = dict(m)
    d[a] = d.get(a, 0) + e
    return tuple(sorted(d.items(), key=lambda t: lit_key(t[0])))


@dataclass(frozen=True)
class Polynomial:
    """Terms are ``(monomial, coef)`` with monomial a sorted tuple of ``(avar, exp)``."""

    terms: tuple
    field: Field = QQ

    @classmethod
    def make(cls, d: dict, field: Field = QQ) -> "Polynomial":
        items = [(m, field(c)) for m, c in d.items()]
        items = [(m, c) for m, c in items if c != 0]
        items.sort(key=lambda t: _mono_key(t[0]))
        return cls(tuple(items), field)

    @classmethod
    def const(cls, c, field: Field = QQ) -> "Polynomial":
        return cls.make({(): c}, field)

    @classmethod
    def var(cls, a: int, field: Field = QQ) -> "Polynomial":
        return cls.make({((a, 1),): 1}, field)

    @cached_property
    def as_dict(self) -> dict:
        return dict(self.terms)

    @cached_property
    def vars(self) -> tuple:
        """Underlying Boolean variables."""
        return tuple(sorted({abs(a) for m, _ in self.terms for a, _ in m}))

    def __len__(self):
        return len(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def combine(self, a, other: "Polynomial", b) -> "Polynomial":
        f = self.field
        d = {m: f(a) * c for m, c in self.terms}
        for m, c in other.terms:
            d[m] = d.get(m, 0) + f(b) * c
        return Polynomial.make(d, f)

    def times_var(self, a: int) -> "Polynomial":
        return Polynomial.make({_mono_mul(m, a): c for m, c in self.terms}, self.field)

    def substitute(self, beta) -> "Polynomial":
        """Restrict by a Boolean assignment (x := 1 - b, x̄ := b)."""
        d: dict = {}
        for m, c in self.terms:
            kept = []
            dead = False
            for a, e in m:
                v = abs(a)
                if v in beta:
                    if (1 - beta[v] if a > 0 else beta[v]) == 0:
                        dead = True
                        break
                else:
                    kept.append((a, e))
            if not dead:
                k = tuple(kept)
                d[k] = d.get(k, 0) + c
        return Polynomial.make(d, self.field)

    def evaluate(self, tau):
        total = self.field(0)
        for m, c in self.terms:
            prod = 1
            for a, _ in m:
                prod *= (1 - tau[abs(a)]) if a > 0 else tau[abs(a)]
            total += c * prod
        return self.field(total)

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.terms:
            factors = [self.field.fmt(c)]
            for a, e in m:
                name = f"v{a}" if a > 0 else f"~v{-a}"
                factors.append(name if e == 1 else f"{name}^{e}")
            parts.append(" * ".join(factors))
        return " + ".join(parts)


def encode_clause_pcr(c, field: Field = QQ) -> Polynomial:
    return Polynomial.make({tuple((l, 1) for l in sorted_lits(c)): 1}, field)


def pcr_line_eval(P: Polynomial, tau):
    """Value of P under the Boolean assignment tau; the line holds iff it is 0."""
    return P.evaluate(tau)


@dataclass(frozen=True)
class PCRLine:
    poly: Polynomial
    kind = "pcr"

    @property
    def vars(self) -> tuple:
        return self.poly.vars

    def fn(self) -> BoolFn:
        P = self.poly
        vs = P.vars
        cols = columns(vs)
        f = P.field
        if f.p is None:
            den = lcm(*(c.denominator for _, c in P.terms)) if P.terms else 1
            coefs = [int(c * den) for _, c in P.terms]
        else:
            coefs = [int(c) for _, c in P.terms]
        bound = sum(abs(c) for c in coefs)
        dtype = np.int64 if bound < 2**62 else object
        acc = np.zeros(1 << len(vs), dtype=dtype)
        for (m, _), c in zip(P.terms, coefs):
            term = np.ones(1 << len(vs), dtype=bool)
            for a, _e in m:
                term &= ~cols[a] if a > 0 else cols[-a]
            acc = acc + term.astype(dtype) * c
        if f.p is not None:
            acc = acc % f.p
        return BoolFn(vs, np.asarray(acc == 0, dtype=bool))

    def to_text(self) -> str:
        return self.poly.to_text()


@dataclass(frozen=True)
class PCRStep:
    id: int
    poly: Polynomial
    rule: str
    args: tuple = ()


@dataclass
class PCRProof:
    steps: list = field(default_factory=list)
    field: Field = QQ

    def __len__(self):
        return len(self.steps)

    def size(self) -> int:
        """Total number of monomials."""
        return sum(len(s.poly) for s in self.steps)


def _reduce_ok(phi: QCNF, P: Polynomial, beta: dict):
    if not beta:
        raise QBFError("empty reduction")
    blocks = {phi.level.get(v) for v in beta}
    if None in blocks or len(blocks) != 1:
        raise QBFError("reduction must assign variables of a single known block")
    (b,) = blocks
    if not phi.prefix[b].is_universal:
        raise QBFError("reduction assigns an existential block")
    if phi.rightmost_block(P.vars) != b:
        raise QBFError("reduced block is not rightmost in the line")


def check_pcr(phi: QCNF, proof: PCRProof, refutation: bool = True) -> bool:
    f = proof.field
    lines: dict[int, Polynomial] = {}
    last = None
    for s in proof.steps:
        if last is not None and s.id <= last:
            raise ProofError("step ids must be strictly increasing", s.id)
        last = s.id
        if s.poly.field != f:
            raise ProofError(f"line over {s.poly.field.name}, proof over {f.name}", s.id)
        a = s.args
        try:
            if s.rule == AX:
                (k,) = a
                if not 0 <= k < len(phi.matrix):
                    raise QBFError(f"no matrix clause {k}")
                want = encode_clause_pcr(phi.matrix[k], f)
            elif s.rule == BOOLAX:
                (v,) = a
                _known(phi, abs(v))
                want = Polynomial.make({((v, 2),): 1, ((v, 1),): -1}, f)
            elif s.rule == COMPAX:
                (v,) = a
                _known(phi, v)
                want = Polynomial.make({((v, 1),): 1, ((-v, 1),): 1, (): -1}, f)
            elif s.rule == LIN:
                i, x, j, y = a
                want = _get(lines, i).combine(x, _get(lines, j), y)
            elif s.rule == MUL:
                i, v = a
                _known(phi, abs(v))
                want = _get(lines, i).times_var(v)
            elif s.rule == RED:
                i, beta = a[0], dict(a[1])
                src = _get(lines, i)
                _reduce_ok(phi, src, beta)
                want = src.substitute(beta)
            else:
                raise QBFError(f"unknown rule {s.rule!r}")
        except (QBFError, ValueError, TypeError) as e:
            raise ProofError(str(e), s.id) from None
        if want != s.poly:
            raise ProofError(f"line does not match rule result {want.to_text()}", s.id)
        lines[s.id] = s.poly
    if refutation:
        if not proof.steps or proof.steps[-1].poly != Polynomial.const(1, f):
            raise ProofError("conclusion is not the constant 1", proof.steps[-1].id if proof.steps else None)
    return True


def _known(phi, v):
    if v not in phi.level:
        raise QBFError(f"unknown variable {v}")


def _get(lines, i):
    if i not in lines:
        raise QBFError(f"dangling reference {i}")
    return lines[i]


# ---------------------------------------------------------------------------
# simulation of QU-Res


def from_qures(phi: QCNF, proof, field: Field = QQ) -> PCRProof:
    """PCR+red simulation of a QU-Res refutation.

    For a resolvent M of p*A and p̄*B: lift both antecedents to p*M and p̄*M,
    multiply the complement axiom by M, and cancel with two linear steps.
    """
    from .qures import AXIOM, REDUCE, RESOLVE, WEAKEN

    out: list[PCRStep] = []
    ref: dict[int, int] = {}
    clause = {s.id: s.clause for s in proof.steps}

    def add(poly, rule, *args):
        sid = len(out) + 1
        out.append(PCRStep(sid, poly, rule, tuple(args)))
        return sid

    def poly(i):
        return out[i - 1].poly

    def lift(i, have, want):
        for a in sorted_lits(want - have):
            i = add(poly(i).times_var(a), MUL, i, a)
        return i

    index_of = {}
    for k, c in enumerate(phi.matrix):
        index_of.setdefault(c, k)
    one, minus = field(1), field(-1)
    for s in proof.steps:
        if s.rule == AXIOM:
            k = s.index if s.index is not None else index_of[s.clause]
            ref[s.id] = add(encode_clause_pcr(phi.matrix[k], field), AX, k)
        elif s.rule == RESOLVE:
            ida, idb = s.ante
            ca, cb = clause[ida], clause[idb]
            piv = s.pivot if s.pivot is not None else next(abs(l) for l in ca if -l in cb)
            if -piv in ca:
                ida, idb, ca, cb = idb, ida, cb, ca
            m = s.clause
            pa = lift(ref[ida], ca, m | {piv})
            pb = lift(ref[idb], cb, m | {-piv})
            comp = add(Polynomial.make({((piv, 1),): 1, ((-piv, 1),): 1, (): -1}, field), COMPAX, piv)
            comp = lift(comp, frozenset(), m)
            both = add(poly(pa).combine(one, poly(pb), one), LIN, pa, one, pb, one)
            ref[s.id] = add(poly(both).combine(one, poly(comp), minus), LIN, both, one, comp, minus)
        elif s.rule == WEAKEN:
            ref[s.id] = lift(ref[s.ante[0]], clause[s.ante[0]], s.clause)
        elif s.rule == REDUCE:
            removed = clause[s.ante[0]] - s.clause
            cur = ref[s.ante[0]]
            for b in sorted({phi.level[abs(l)] for l in removed}, reverse=True):
                beta = {abs(l): (0 if l > 0 else 1) for l in removed if phi.level[abs(l)] == b}
                cur = add(poly(cur).substitute(beta), RED, cur, tuple(sorted(beta.items())))
            ref[s.id] = cur
    return PCRProof(out, field)


# ---------------------------------------------------------------------------
# text format


def _avar_text(a: int) -> str:
    return f"v{a}" if a > 0 else f"~v{-a}"


def _parse_avar(t: str, no) -> int:
    neg = t.startswith("~")
    body = t[1:] if neg else t
    if not body.startswith("v") or not body[1:].isdigit() or int(body[1:]) == 0:
        raise FormatError(f"bad algebraic variable {t!r}", no)
    v = int(body[1:])
    return -v if neg else v


def write_pcr(proof: PCRProof) -> str:
    f = proof.field
    rows = [f"p pcr field={f.name}"]
    for s in proof.steps:
        a = s.args
        if s.rule == RED:
            args = [str(a[0])] + [str(v if x else -v) for v, x in a[1]]
        elif s.rule == LIN:
            args = [str(a[0]), f.fmt(a[1]), str(a[2]), f.fmt(a[3])]
        elif s.rule in (MUL,):
            args = [str(a[0]), _avar_text(a[1])]
        elif s.rule == BOOLAX:
            args = [_avar_text(a[0])]
        else:
            args = [str(x) for x in a]
        rows.append(" ".join([str(s.id), s.rule, *args, ":", s.poly.to_text()]))
    return "\n".join(rows) + "\n"


def parse_poly(text: str, field: Field = QQ, no=None) -> Polynomial:
    text = text.strip()
    if text == "0":
        return Polynomial((), field)
    d: dict = {}
    for part in text.split(" + "):
        toks = [t.strip() for t in part.split("*")]
        if not toks or not toks[0]:
            raise FormatError(f"bad monomial {part!r}", no)
        try:
            c = field.parse(toks[0])
        except QBFError as e:
            raise FormatError(str(e), no) from None
        m: tuple = ()
        for t in toks[1:]:
            name, _, exp = t.partition("^")
            e = 1
            if exp:
                if not exp.isdigit() or int(exp) < 1:
                    raise FormatError(f"bad exponent in {t!r}", no)
                e = int(exp)
            m = _mono_mul(m, _parse_avar(name, no), e)
        if m in d:
            raise FormatError(f"repeated monomial {part!r}", no)
        d[m] = c
    return Polynomial.make(d, field)


def parse_pcr(text: str) -> PCRProof:
    rows = [(no, r.strip()) for no, r in enumerate(text.splitlines(), 1)]
    rows = [(no, r) for no, r in rows if r and not r.startswith("c ")]
    if not rows or not rows[0][1].startswith("p pcr field="):
        raise FormatError("missing 'p pcr field=...' header", rows[0][0] if rows else None)
    try:
        f = Field.from_name(rows[0][1][len("p pcr field=") :])
    except (QBFError, ValueError) as e:
        raise FormatError(str(e), rows[0][0]) from None
    steps = []
    for no, line in rows[1:]:
        head, sep, body = line.partition(":")
        if not sep:
            raise FormatError("missing ':' separator", no)
        toks = head.split()
        if len(toks) < 2:
            raise FormatError("missing id or rule", no)
        rule, rest = toks[1], toks[2:]
        try:
            sid = int(toks[0])
            if rule == AX:
                (k,) = rest
                args = (int(k),)
            elif rule == BOOLAX:
                (t,) = rest
                args = (_parse_avar(t, no),)
            elif rule == COMPAX:
                (t,) = rest
                args = (int(t),)
            elif rule == LIN:
                i, x, j, y = rest
                args = (int(i), f.parse(x), int(j), f.parse(y))
            elif rule == MUL:
                i, t = rest
                args = (int(i), _parse_avar(t, no))
            elif rule == RED:
                args = (int(rest[0]), tuple(sorted((abs(int(l)), int(int(l) > 0)) for l in rest[1:])))
            else:
                raise FormatError(f"unknown rule {rule!r}", no)
        except (ValueError, IndexError, QBFError):
            raise FormatError(f"bad arguments for {rule!r}", no) from None
        steps.append(PCRStep(sid, parse_poly(body, f, no), rule, args))
    return PCRProof(steps, f)
