"""QU-Resolution proofs: representation, checking, normal form and search.

Trace format, one step per line::

    <id> <lit>* 0 <antecedent-id>* 0

No antecedents means an axiom, two mean resolution (the pivot is recomputed
and must be unique), one means universal reduction when the clause is a
proper subset of the antecedent and weakening when it is a proper superset.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field, replace

from .core import (
    DEFAULT_VAR_CAP,
    QCNF,
    SATISFIED,
    is_tautology,
    lit_key,
    restrict_clause,
    sorted_lits,
)
from .errors import FormatError, OracleScaleError, ProofError

AXIOM = "axiom"
RESOLVE = "resolve"
REDUCE = "reduce"
WEAKEN = "weaken"

SATURATION_VAR_CAP = 14
SATURATION_CLAUSE_CAP = 200_000


@dataclass(frozen=True)
class QUResStep:
    id: int
    clause: frozenset
    rule: str
    ante: tuple = ()
    pivot: int | None = None
    index: int | None = None  # matrix index for axioms


@dataclass
class QUResProof:
    steps: list = field(default_factory=list)
    conclusion: int | None = None

    def __post_init__(self):
        if self.conclusion is None and self.steps:
            self.conclusion = self.steps[-1].id

    def __len__(self):
        return len(self.steps)

    def by_id(self) -> dict:
        return {s.id: s for s in self.steps}

    def clauses(self) -> list[frozenset]:
        return [s.clause for s in self.steps]


def _resolvent_pivot(a: frozenset, b: frozenset):
    clashes = [abs(l) for l in a if -l in b]
    return clashes


def max_reduce(phi: QCNF, c: frozenset) -> frozenset:
    """Remove every universal literal that is right of all existentials in c."""
    level = phi.level
    ex = max((level[abs(l)] for l in c if not phi.is_universal(abs(l))), default=-1)
    return frozenset(l for l in c if not (phi.is_universal(abs(l)) and level[abs(l)] > ex))


def check_qures(phi: QCNF, proof: QUResProof, refutation: bool = True, strict: bool = False) -> bool:
    """Check every step of ``proof`` against ``phi``; raise ProofError on failure.

    ``strict`` forbids universal pivots (Q-Res instead of QU-Res).
    """
    seen: dict[int, frozenset] = {}
    matrix = set(phi.matrix)
    last_id = None
    for s in proof.steps:
        if last_id is not None and s.id <= last_id:
            raise ProofError("step ids must be strictly increasing", s.id)
        last_id = s.id
        c = s.clause
        if any(abs(l) not in phi.level for l in c):
            raise ProofError("clause mentions a variable outside the prefix", s.id)
        if is_tautology(c):
            raise ProofError("tautological clause", s.id)
        for a in s.ante:
            if a not in seen:
                raise ProofError(f"dangling antecedent {a}", s.id)
        if s.rule == AXIOM:
            if s.index is not None:
                if not 0 <= s.index < len(phi.matrix) or phi.matrix[s.index] != c:
                    raise ProofError(f"axiom does not match matrix clause {s.index}", s.id)
            elif c not in matrix:
                raise ProofError("axiom is not a matrix clause", s.id)
        elif s.rule == RESOLVE:
            if len(s.ante) != 2:
                raise ProofError("resolution needs two antecedents", s.id)
            a, b = seen[s.ante[0]], seen[s.ante[1]]
            if s.pivot is None:
                clashes = _resolvent_pivot(a, b)
                if len(clashes) != 1:
                    raise ProofError(f"antecedents clash on {len(clashes)} variables, need exactly one", s.id)
                p = clashes[0]
            else:
                p = s.pivot
                if not ((p in a and -p in b) or (-p in a and p in b)):
                    raise ProofError(f"pivot {p} missing from antecedents", s.id)
            if strict and phi.is_universal(p):
                raise ProofError(f"universal pivot {p} not allowed in Q-Res", s.id)
            r = (a | b) - {p, -p}
            if is_tautology(r):
                raise ProofError("resolvent is tautological", s.id)
            if r != c:
                raise ProofError("clause is not the resolvent of its antecedents", s.id)
        elif s.rule == REDUCE:
            if len(s.ante) != 1:
                raise ProofError("reduction needs one antecedent", s.id)
            a = seen[s.ante[0]]
            if not c < a:
                raise ProofError("reduced clause must be a proper subset", s.id)
            removed = a - c
            ex = [phi.level[abs(l)] for l in c if not phi.is_universal(abs(l))]
            top = max(ex, default=-1)
            for l in removed:
                v = abs(l)
                if not phi.is_universal(v):
                    raise ProofError(f"reduced literal {l} is existential", s.id)
                if phi.level[v] <= top:
                    raise ProofError(f"reduction of {l} blocked by an existential to its right", s.id)
        elif s.rule == WEAKEN:
            if len(s.ante) != 1:
                raise ProofError("weakening needs one antecedent", s.id)
            if not c > seen[s.ante[0]]:
                raise ProofError("weakened clause must be a proper superset", s.id)
        else:
            raise ProofError(f"unknown rule {s.rule!r}", s.id)
        seen[s.id] = c
    if refutation:
        if proof.conclusion not in seen:
            raise ProofError("missing conclusion")
        if seen[proof.conclusion]:
            raise ProofError("conclusion is not the empty clause", proof.conclusion)
    return True


def _subderivation(steps: list[QUResStep], target: int) -> QUResProof:
    """Keep only ancestors of ``target`` and renumber them 1..k."""
    by_id = {s.id: s for s in steps}
    keep = set()
    stack = [target]
    while stack:
        i = stack.pop()
        if i in keep:
            continue
        keep.add(i)
        stack.extend(by_id[i].ante)
    order = [s for s in steps if s.id in keep]
    renum = {s.id: k for k, s in enumerate(order, 1)}
    out = [replace(s, id=renum[s.id], ante=tuple(renum[a] for a in s.ante)) for s in order]
    return QUResProof(out, renum[target])


def normalize(phi: QCNF, proof: QUResProof) -> QUResProof:
    """Normal form: maximal reductions, first empty clause, no redundancy.

    Every clause of the result is a subset of the clause it replaces, and
    the result is never longer than the input.
    """
    check_qures(phi, proof)
    rep: dict[int, int] = {}
    new: list[QUResStep] = []
    known: dict[frozenset, int] = {}

    def emit(c, rule, ante=(), pivot=None, index=None):
        if c in known:
            return known[c]
        sid = len(new) + 1
        new.append(QUResStep(sid, c, rule, tuple(ante), pivot, index))
        known[c] = sid
        return sid

    clause_of = lambda sid: new[sid - 1].clause  # noqa: E731
    orig = proof.by_id()
    for s in proof.steps:
        if s.rule == AXIOM:
            rep[s.id] = emit(s.clause, AXIOM, index=s.index)
        elif s.rule == REDUCE:
            a = rep[s.ante[0]]
            r = max_reduce(phi, clause_of(a))
            rep[s.id] = a if r == clause_of(a) else emit(r, REDUCE, (a,))
        elif s.rule == WEAKEN:
            rep[s.id] = rep[s.ante[0]]
        else:
            a, b = rep[s.ante[0]], rep[s.ante[1]]
            ca, cb = clause_of(a), clause_of(b)
            clashes = _resolvent_pivot(ca, cb)
            p = s.pivot if s.pivot is not None else _resolvent_pivot(orig[s.ante[0]].clause, orig[s.ante[1]].clause)[0]
            if p in clashes:
                rep[s.id] = emit((ca | cb) - {p, -p}, RESOLVE, (a, b), p)
            elif p not in ca and -p not in ca:
                rep[s.id] = a
            else:
                rep[s.id] = b
        if not clause_of(rep[s.id]):
            return _subderivation(new, rep[s.id])
    raise ProofError("normalisation lost the empty clause")


def prove_qures_saturate(
    phi: QCNF,
    var_cap: int = SATURATION_VAR_CAP,
    clause_cap: int = SATURATION_CLAUSE_CAP,
    strict: bool = False,
) -> QUResProof | None:
    """Given-clause saturation under resolution and maximal reduction.

    Clauses are processed shortest first, ties broken lexicographically, so
    the output is deterministic.  Returns ``None`` when the closure contains
    no empty clause (the formula is true).
    """
    if len(phi.vars) > var_cap:
        raise OracleScaleError(f"{len(phi.vars)} variables exceeds saturation cap {var_cap}")
    steps: list[QUResStep] = []
    known: dict[frozenset, int] = {}
    heap: list = []

    def key(c):
        return (len(c), tuple(lit_key(l) for l in sorted_lits(c)))

    def add(c, rule, ante=(), pivot=None, index=None):
        sid = len(steps) + 1
        steps.append(QUResStep(sid, c, rule, ante, pivot, index))
        known[c] = sid
        return sid

    def add_reduced(c, sid):
        r = max_reduce(phi, c)
        if r != c:
            if r in known:
                return
            sid = add(r, REDUCE, (sid,))
        heapq.heappush(heap, (key(r), r))

    for i, c in enumerate(phi.matrix):
        if c in known or is_tautology(c):
            continue
        add_reduced(c, add(c, AXIOM, index=i))

    processed: list[frozenset] = []
    done: set = set()
    by_lit: dict[int, list] = {}
    while heap:
        _, c = heapq.heappop(heap)
        if c in done:
            continue
        done.add(c)
        if not c:
            return _subderivation(steps, known[c])
        if any(d <= c for d in processed):
            continue
        processed.append(c)
        for l in sorted_lits(c):
            by_lit.setdefault(l, []).append(c)
        for l in sorted_lits(c):
            if strict and phi.is_universal(abs(l)):
                continue
            for d in list(by_lit.get(-l, ())):
                r = (c | d) - {l, -l}
                if is_tautology(r) or r in known:
                    continue
                first, second = (c, d) if l > 0 else (d, c)
                sid = add(r, RESOLVE, (known[first], known[second]), abs(l))
                add_reduced(r, sid)
                if len(steps) > clause_cap:
                    raise OracleScaleError(f"saturation exceeded {clause_cap} clauses")
    return None


def restrict_proof(phi: QCNF, proof: QUResProof, delta: dict):
    """Replay ``proof`` under ``delta``; returns the restricted sub-derivation.

    Satisfied lines disappear, and a step whose antecedent lost the relevant
    literals collapses onto that antecedent.  The result is checked against
    ``phi.restrict(delta)`` by the caller; ``None`` means the conclusion
    became satisfied (possible only for universal restrictions).
    """
    sub = phi.restrict(delta)
    index_of = {}
    for i, c in enumerate(sub.matrix):
        index_of.setdefault(c, i)
    rep: dict[int, int | None] = {}
    new: list[QUResStep] = []
    known: dict[frozenset, int] = {}

    def emit(c, rule, ante=(), pivot=None, index=None):
        if c in known:
            return known[c]
        sid = len(new) + 1
        new.append(QUResStep(sid, c, rule, tuple(ante), pivot, index))
        known[c] = sid
        return sid

    cl = lambda sid: new[sid - 1].clause  # noqa: E731
    orig = proof.by_id()
    for s in proof.steps:
        if s.rule == AXIOM:
            r = restrict_clause(s.clause, delta)
            rep[s.id] = None if r is SATISFIED else emit(r, AXIOM, index=index_of[r])
        elif s.rule == WEAKEN:
            a = rep[s.ante[0]]
            r = restrict_clause(s.clause, delta)
            rep[s.id] = None if a is None or r is SATISFIED else a
        elif s.rule == REDUCE:
            a = rep[s.ante[0]]
            if a is None:
                rep[s.id] = None
            else:
                r = cl(a) - (orig[s.ante[0]].clause - s.clause)
                rep[s.id] = a if r == cl(a) else emit(r, REDUCE, (a,))
        else:
            p = s.pivot
            if p is None:
                p = _resolvent_pivot(orig[s.ante[0]].clause, orig[s.ante[1]].clause)[0]
            a, b = rep[s.ante[0]], rep[s.ante[1]]
            if p in delta:
                # keep the antecedent whose pivot literal is falsified
                pos_first = p in orig[s.ante[0]].clause
                falsified_first = (delta[p] == 0) == pos_first
                rep[s.id] = a if falsified_first else b
            elif a is None or b is None:
                rep[s.id] = None
            else:
                ca, cb = cl(a), cl(b)
                if p in _resolvent_pivot(ca, cb):
                    rep[s.id] = emit((ca | cb) - {p, -p}, RESOLVE, (a, b), p)
                elif p not in ca and -p not in ca:
                    rep[s.id] = a
                else:
                    rep[s.id] = b
        if rep[s.id] is not None and not cl(rep[s.id]):
            return _subderivation(new, rep[s.id])
    return None


# ---------------------------------------------------------------------------
# text format


def write_trace(proof: QUResProof) -> str:
    lines = []
    for s in proof.steps:
        lits = " ".join(map(str, sorted_lits(s.clause)))
        ante = " ".join(map(str, s.ante))
        lits = f"{lits} 0" if lits else "0"
        ante = f"{ante} 0" if ante else "0"
        lines.append(f"{s.id} {lits} {ante}")
    return "\n".join(lines) + "\n"


def parse_trace(text: str) -> QUResProof:
    steps = []
    clauses: dict[int, frozenset] = {}
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        try:
            nums = [int(t) for t in line.split()]
        except ValueError:
            raise FormatError(f"non-integer token in {line!r}", no) from None
        if len(nums) < 3 or nums[-1] != 0 or 0 not in nums[1:-1]:
            raise FormatError("step must be '<id> <lit>* 0 <id>* 0'", no)
        sid = nums[0]
        z = nums.index(0, 1)
        lits, ante = nums[1:z], nums[z + 1 : -1]
        if 0 in ante:
            raise FormatError("embedded 0 in antecedent list", no)
        if steps and sid <= steps[-1].id:
            raise FormatError("step ids must be strictly increasing", no)
        c = frozenset(lits)
        if len(c) != len(lits):
            raise FormatError("duplicate literal", no)
        for a in ante:
            if a not in clauses:
                raise FormatError(f"unknown antecedent {a}", no)
        if not ante:
            rule = AXIOM
        elif len(ante) == 2:
            rule = RESOLVE
        elif len(ante) == 1:
            a = clauses[ante[0]]
            if c < a:
                rule = REDUCE
            elif c > a:
                rule = WEAKEN
            else:
                raise FormatError("single-antecedent step must shrink or grow the clause", no)
        else:
            raise FormatError(f"{len(ante)} antecedents not supported", no)
        steps.append(QUResStep(sid, c, rule, tuple(ante)))
        clauses[sid] = c
    return QUResProof(steps)


def prefix_all_exists(clauses) -> QCNF:
    """A purely existential QCNF wrapping a propositional clause list."""
    from .core import EXISTS, Block

    vs = sorted({abs(l) for c in clauses for l in c})
    prefix = (Block(EXISTS, vs),) if vs else ()
    return QCNF(prefix, tuple(frozenset(c) for c in clauses))


__all__ = [
    "QUResStep",
    "QUResProof",
    "check_qures",
    "normalize",
    "prove_qures_saturate",
    "restrict_proof",
    "max_reduce",
    "prefix_all_exists",
    "write_trace",
    "parse_trace",
    "DEFAULT_VAR_CAP",
]
