"""Semantic P+red refutations over arbitrary line kinds.

A step is an axiom (Boolean function of a matrix clause), a consequence
(truth-table entailment from a declared premise set) or a reduction
(equivalent to an earlier line restricted on its rightmost universal
block).  Text format, one step per line::

    <id> <kind> <line> ; <just> <args>

with kinds ``cl`` (DIMACS clause ending in 0), ``bf`` (prefix formula),
``cp`` (linear inequality) and ``pcr`` (polynomial over Q), and
justifications ``ax``, ``cons <id>*`` and ``red <id> <lit>*``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import QCNF, SATISFIED, enumerate_assignments, restrict_clause
from .errors import FormatError, OracleScaleError, ProofError, QBFError
from .formula import FALSE, TRUE, Formula, conj, disj, lit, parse_formula
from .lines import LINE_VAR_CAP, BoolFn, ClauseLine, FormulaLine, entails, equivalent

AX, CONS, RED = "ax", "cons", "red"


@dataclass(frozen=True)
class SemStep:
    id: int
    line: object  # any line view
    just: str
    args: tuple = ()  # cons: premise ids; red: (id, ((var, bit), ...))


@dataclass
class SemanticProof:
    steps: list = field(default_factory=list)

    def __len__(self):
        return len(self.steps)

    def size(self) -> int:
        return len(self.steps)

    def by_id(self) -> dict:
        return {s.id: s for s in self.steps}


def _block_of(phi: QCNF, beta) -> int:
    blocks = {phi.level.get(v) for v in beta}
    if not beta or None in blocks or len(blocks) != 1:
        raise QBFError("reduction must assign variables of a single known block")
    (b,) = blocks
    if not phi.prefix[b].is_universal:
        raise QBFError("reduction assigns an existential block")
    return b


def check_semantic(phi: QCNF, proof: SemanticProof, cap: int = LINE_VAR_CAP) -> bool:
    fns: dict[int, BoolFn] = {}
    lines: dict[int, object] = {}
    clause_fns: dict = {}
    last = None
    for s in proof.steps:
        if last is not None and s.id <= last:
            raise ProofError("step ids must be strictly increasing", s.id)
        last = s.id
        vs = s.line.vars
        if any(v not in phi.level for v in vs):
            raise ProofError("line mentions a variable outside the prefix", s.id)
        try:
            f = s.line.fn()
            if s.just == AX:
                sup = f.support()
                if sup not in clause_fns:
                    clause_fns[sup] = [ClauseLine(c).fn() for c in phi.matrix if tuple(sorted({abs(l) for l in c})) == sup]
                if not any(equivalent(f, g, cap) for g in clause_fns[sup]):
                    raise QBFError("line is not equivalent to any matrix clause")
            elif s.just == CONS:
                prem = []
                for i in s.args:
                    if i not in fns:
                        raise QBFError(f"dangling premise {i}")
                    prem.append(fns[i])
                if not entails(prem, f, cap):
                    raise QBFError("declared premises do not entail the line")
            elif s.just == RED:
                j, beta = s.args[0], dict(s.args[1])
                if j not in fns:
                    raise QBFError(f"dangling reference {j}")
                b = _block_of(phi, beta)
                if phi.rightmost_block(lines[j].vars) != b:
                    raise QBFError("reduced block is not rightmost in the source line")
                if not equivalent(f, fns[j].restrict(beta), cap):
                    raise QBFError("line is not equivalent to the restricted source")
            else:
                raise QBFError(f"unknown justification {s.just!r}")
        except OracleScaleError:
            raise
        except QBFError as e:
            raise ProofError(str(e), s.id) from None
        fns[s.id] = f
        lines[s.id] = s.line
    if not proof.steps or not fns[proof.steps[-1].id].is_falsum():
        raise ProofError("last line is not falsum", proof.steps[-1].id if proof.steps else None)
    return True


# ---------------------------------------------------------------------------
# conversions and constructions


def from_qures(phi: QCNF, proof) -> SemanticProof:
    """Re-justify a QU-Res proof: resolution and weakening become consequences."""
    from .qures import AXIOM, REDUCE

    out: list[SemStep] = []
    ref: dict[int, int] = {}
    clause = {s.id: s.clause for s in proof.steps}
    for s in proof.steps:
        if s.rule == AXIOM:
            out.append(SemStep(len(out) + 1, ClauseLine(s.clause), AX))
        elif s.rule == REDUCE:
            removed = clause[s.ante[0]] - s.clause
            cur, cl = ref[s.ante[0]], clause[s.ante[0]]
            for b in sorted({phi.level[abs(l)] for l in removed}, reverse=True):
                beta = {abs(l): (0 if l > 0 else 1) for l in removed if phi.level[abs(l)] == b}
                cl = frozenset(l for l in cl if abs(l) not in beta)
                out.append(SemStep(len(out) + 1, ClauseLine(cl), RED, (cur, tuple(sorted(beta.items())))))
                cur = len(out)
            ref[s.id] = cur
            continue
        else:
            ante = tuple(ref[a] for a in s.ante)
            out.append(SemStep(len(out) + 1, ClauseLine(s.clause), CONS, ante))
        ref[s.id] = len(out)
    return SemanticProof(out)


def _xor_part(x: int, u: int) -> Formula:
    return conj(disj(lit(x), lit(u)), disj(lit(-x), lit(-u)))


def frege_eq_refutation(n: int) -> SemanticProof:
    """Linear-size refutation of EQ(n) with formula lines.

    L collects every (x_i xor u_i); reducing u_m both ways and resolving on
    x_m peels one disjunct at a time down to falsum.
    """
    if n < 1:
        raise QBFError("n must be positive")
    if 3 * n > LINE_VAR_CAP:
        raise OracleScaleError(f"EQ({n}) needs {3 * n} variables in one consequence step")
    xs = list(range(1, n + 1))
    us = list(range(n + 1, 2 * n + 1))
    ts = list(range(2 * n + 1, 3 * n + 1))
    steps: list[SemStep] = []

    def add(line, just, *args):
        steps.append(SemStep(len(steps) + 1, line, just, tuple(args)))
        return len(steps)

    ax = []
    for x, u, t in zip(xs, us, ts):
        a = add(ClauseLine(frozenset((x, u, -t))), AX)
        b = add(ClauseLine(frozenset((-x, -u, -t))), AX)
        ax.append((a, b))
    li = []
    for (a, b), x, u, t in zip(ax, xs, us, ts):
        li.append(add(FormulaLine(disj(_xor_part(x, u), lit(-t))), CONS, a, b))
    long_clause = add(ClauseLine(frozenset(ts)), AX)

    def K(m):
        return disj(*(_xor_part(x, u) for x, u in zip(xs[:m], us[:m])))

    cur = add(FormulaLine(K(n)), CONS, long_clause, *li)
    for m in range(n, 0, -1):
        u = us[m - 1]
        r0 = add(FormulaLine(K(m).restrict({u: 0})), RED, cur, ((u, 0),))
        r1 = add(FormulaLine(K(m).restrict({u: 1})), RED, cur, ((u, 1),))
        cur = add(FormulaLine(K(m - 1) if m > 1 else FALSE), CONS, r0, r1)
    return SemanticProof(steps)


def _maxterms(vs, table_fn) -> list[frozenset]:
    """One clause per assignment of vs where the function is 0."""
    out = []
    for row in enumerate_assignments(vs):
        if not table_fn(row):
            out.append(frozenset(-v if row[v] else v for v in vs))
    return out


def completeness_refutation(phi: QCNF, strategy, cap: int = 12) -> SemanticProof:
    """Semantic refutation built from a winning universal strategy.

    B_i is 0 exactly when u_1..u_i follow the strategy.  Its maxterm CNF
    follows from the matrix for the last universal variable, and each CNF
    for u_i yields the one for u_{i-1} by reducing u_i and a consequence
    step.  The CNF for no universals is the empty clause.
    """
    from .semantics import verify_strategy

    if len(phi.vars) > cap:
        raise OracleScaleError(f"{len(phi.vars)} variables exceeds completeness cap {cap}")
    steps: list[SemStep] = []

    def add(line, just, *args):
        steps.append(SemStep(len(steps) + 1, line, just, tuple(args)))
        return len(steps)

    if frozenset() in phi.matrix:
        add(ClauseLine(frozenset()), AX)
        return SemanticProof(steps)
    if not verify_strategy(phi, strategy):
        raise QBFError("strategy is not winning")
    lvl = phi.level
    uvars = sorted(phi.forall_vars, key=lambda v: (lvl[v], v))
    proj = {}
    for u in uvars:
        left = sorted(v for v in phi.exists_vars if lvl[v] < lvl[u])
        tab = {}
        for key, val in strategy.table.items():
            alpha = dict(zip(strategy.evars, key))
            tab[tuple(alpha[v] for v in left)] = val[strategy.uvars.index(u)]
        proj[u] = (left, tab)

    def B(i):
        """Variables and predicate of B_i (i universals followed)."""
        vs = sorted(set().union(*(proj[u][0] for u in uvars[:i])) | set(uvars[:i])) if i else []

        def value(row):
            for u in uvars[:i]:
                left, tab = proj[u]
                if row[u] != tab[tuple(row[v] for v in left)]:
                    return True
            return False

        return vs, value

    axioms = [add(ClauseLine(c), AX) for c in phi.matrix]
    k = len(uvars)
    vs, val = B(k)
    cur = [add(ClauseLine(c), CONS, *axioms) for c in _maxterms(vs, val)]
    for i in range(k, 0, -1):
        u = uvars[i - 1]
        reduced = []
        for sid in cur:
            c = steps[sid - 1].line.clause
            for bit in (0, 1):
                r = restrict_clause(c, {u: bit})
                if r is not SATISFIED:
                    reduced.append(add(ClauseLine(r), RED, sid, ((u, bit),)))
        vs, val = B(i - 1)
        cur = [add(ClauseLine(c), CONS, *reduced) for c in _maxterms(vs, val)]
    return SemanticProof(steps)


# ---------------------------------------------------------------------------
# restriction of semantic refutations


def restrict_line(line, tau):
    """Line restricted by tau, in the same kind where possible."""
    from .cp import CPLine
    from .pcr import PCRLine

    if isinstance(line, ClauseLine):
        r = restrict_clause(line.clause, tau)
        return FormulaLine(TRUE) if r is SATISFIED else ClauseLine(r)
    if isinstance(line, FormulaLine):
        return FormulaLine(line.formula.restrict(tau))
    if isinstance(line, CPLine):
        return CPLine(line.ineq.substitute({v: b for v, b in tau.items() if v in line.ineq.coeffs}))
    if isinstance(line, PCRLine):
        return PCRLine(line.poly.substitute(tau))
    raise QBFError(f"cannot restrict line of type {type(line).__name__}")


def restrict_semantic(phi: QCNF, proof: SemanticProof, tau: dict, first_line: int | None = None) -> SemanticProof:
    """pi[tau] as a refutation of phi[tau].

    For existential tau every step keeps its justification, except that a
    satisfied axiom becomes an empty consequence and a reduction whose block
    vanished becomes a consequence of its source.  For tau on the first
    (universal) block, ``first_line`` is the id of the first line over that
    block that tau falsifies; reductions on the block before it are
    tautologies and those after it follow from it.
    """
    sub = phi.restrict(tau)
    out = []
    tb = None
    if first_line is not None:
        tb = _block_of(phi, tau)
    lines = {}
    for s in proof.steps:
        line = restrict_line(s.line, tau)
        just, args = s.just, s.args
        if just == AX and line.fn().is_tautology():
            just, args = CONS, ()
        elif just == RED:
            j, beta = args[0], dict(args[1])
            b = phi.level[next(iter(beta))]
            if tb is not None and b == tb:
                just, args = (CONS, ()) if s.id < first_line else (CONS, (first_line,))
            elif not any(sub.level.get(v) is not None and phi.level[v] == b for v in lines[j].vars):
                just, args = CONS, (j,)
        lines[s.id] = line
        out.append(SemStep(s.id, line, just, args))
    return SemanticProof(out)


def first_eligible_line(phi: QCNF, proof: SemanticProof):
    """First line over the leading universal block that is not a tautology."""
    if not phi.prefix or not phi.prefix[0].is_universal:
        return None
    U = phi.prefix[0].vars
    for s in proof.steps:
        if set(s.line.vars) <= U and not s.line.fn().is_tautology():
            return s.id
    return None


# ---------------------------------------------------------------------------
# text format


def _line_text(line) -> str:
    return f"{line.kind} {line.to_text()}"


def write_semantic(proof: SemanticProof) -> str:
    rows = []
    for s in proof.steps:
        if s.just == RED:
            j, beta = s.args
            args = [str(j)] + [str(v if b else -v) for v, b in beta]
        else:
            args = [str(a) for a in s.args]
        rows.append(" ".join([str(s.id), _line_text(s.line), ";", s.just, *args]))
    return "\n".join(rows) + "\n"


def _parse_line(kind: str, body: str, no):
    from .cp import CPLine, _parse_ineq
    from .pcr import PCRLine, parse_poly

    if kind == "cl":
        try:
            nums = [int(t) for t in body.split()]
        except ValueError:
            raise FormatError("non-integer literal", no) from None
        if not nums or nums[-1] != 0 or 0 in nums[:-1]:
            raise FormatError("clause line must end with a single 0", no)
        return ClauseLine(frozenset(nums[:-1]))
    if kind == "bf":
        return FormulaLine(parse_formula(body))
    if kind == "cp":
        return CPLine(_parse_ineq(body, no))
    if kind == "pcr":
        return PCRLine(parse_poly(body, no=no))
    raise FormatError(f"unknown line kind {kind!r}", no)


def parse_semantic(text: str) -> SemanticProof:
    steps = []
    for no, raw in enumerate(text.splitlines(), 1):
        row = raw.strip()
        if not row or row.startswith("c "):
            continue
        head, sep, just = row.partition(" ; ")
        if not sep:
            raise FormatError("missing ' ; ' separator", no)
        parts = head.split(None, 2)
        if len(parts) < 2:
            raise FormatError("missing id or line kind", no)
        try:
            sid = int(parts[0])
        except ValueError:
            raise FormatError("bad step id", no) from None
        line = _parse_line(parts[1], parts[2] if len(parts) > 2 else "", no)
        jt = just.split()
        if not jt:
            raise FormatError("missing justification", no)
        try:
            nums = [int(t) for t in jt[1:]]
        except ValueError:
            raise FormatError("non-integer justification argument", no) from None
        if jt[0] == AX:
            if nums:
                raise FormatError("ax takes no arguments", no)
            args = ()
        elif jt[0] == CONS:
            args = tuple(nums)
        elif jt[0] == RED:
            if len(nums) < 2:
                raise FormatError("red needs a source id and literals", no)
            args = (nums[0], tuple(sorted((abs(l), int(l > 0)) for l in nums[1:])))
        else:
            raise FormatError(f"unknown justification {jt[0]!r}", no)
        steps.append(SemStep(sid, line, jt[0], args))
    return SemanticProof(steps)


__all__ = [
    "SemStep",
    "SemanticProof",
    "check_semantic",
    "from_qures",
    "frege_eq_refutation",
    "completeness_refutation",
    "restrict_semantic",
    "first_eligible_line",
    "write_semantic",
    "parse_semantic",
]
