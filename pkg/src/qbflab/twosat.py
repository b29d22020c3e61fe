"""2-SAT by implication graph and strongly connected components.

Also builds linear-size resolution refutations from implication paths, and
QU-Res refutations of Sigma-2 components ``exists Y forall X . psi`` whose
existential parts form an unsatisfiable 2-CNF.
"""

from __future__ import annotations

from collections import deque

from .core import QCNF, sorted_lits
from .errors import FormulaTrueError, QBFError
from .qures import AXIOM, REDUCE, RESOLVE, QUResProof, QUResStep


def _graph(clauses):
    """Implication edges ``lit -> (lit', clause)`` in clause order."""
    adj: dict[int, list] = {}
    for c in clauses:
        lits = sorted_lits(c)
        if len(lits) == 1:
            (a,) = lits
            adj.setdefault(-a, []).append((a, c))
        elif len(lits) == 2:
            a, b = lits
            adj.setdefault(-a, []).append((b, c))
            adj.setdefault(-b, []).append((a, c))
        elif lits:
            raise QBFError(f"clause {lits} is wider than 2")
    return adj


def _scc(nodes, adj):
    """Iterative Tarjan; returns node -> component id (reverse topological)."""
    index, low, comp = {}, {}, {}
    stack, on = [], set()
    counter = 0
    ncomp = 0
    for root in nodes:
        if root in index:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on.add(root)
        while work:
            v, i = work[-1]
            succ = adj.get(v, ())
            if i < len(succ):
                work[-1] = (v, i + 1)
                w = succ[i][0]
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on.add(w)
                    work.append((w, 0))
                elif w in on:
                    low[v] = min(low[v], index[w])
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                while True:
                    w = stack.pop()
                    on.discard(w)
                    comp[w] = ncomp
                    if w == v:
                        break
                ncomp += 1
    return comp


def solve_2sat(clauses):
    """Decide a 2-CNF (unit clauses allowed).

    Returns ``(True, model)`` or ``(False, x)`` where ``x`` is the smallest
    variable with x and -x in one component (``None`` for an empty clause).
    """
    clauses = [frozenset(c) for c in clauses]
    if any(not c for c in clauses):
        return False, None
    adj = _graph(clauses)
    vs = sorted({abs(l) for c in clauses for l in c})
    nodes = [l for v in vs for l in (v, -v)]
    comp = _scc(nodes, adj)
    for v in vs:
        if comp[v] == comp[-v]:
            return False, v
    # Tarjan numbers components in reverse topological order
    model = {v: int(comp[v] < comp[-v]) for v in vs}
    return True, model


def _next(node, c):
    """Head of the implication edge leaving ``node`` labelled by clause c."""
    if len(c) == 1:
        return next(iter(c))
    return next(l for l in c if l != -node)


def _path(adj, src, dst):
    """Shortest implication path as a list of clauses (BFS, first-edge order)."""
    prev = {src: None}
    q = deque([src])
    while q:
        v = q.popleft()
        if v == dst:
            break
        for w, c in adj.get(v, ()):
            if w not in prev:
                prev[w] = (v, c)
                q.append(w)
    if dst not in prev:
        raise QBFError(f"no implication path {src} -> {dst}")
    out = []
    v = dst
    while prev[v] is not None:
        v, c = prev[v]
        out.append(c)
    return out[::-1]


class _Builder:
    def __init__(self, steps=None):
        self.steps = list(steps or [])
        self.known: dict[frozenset, int] = {}

    def add(self, clause, rule, ante=(), pivot=None, index=None):
        sid = len(self.steps) + 1
        self.steps.append(QUResStep(sid, frozenset(clause), rule, tuple(ante), pivot, index))
        return sid


def _refute_into(b: _Builder, clauses, source):
    """Append an implication-path refutation of ``clauses`` to ``b``.

    ``source(clause)`` returns the step id deriving that clause (adding an
    axiom the first time it is called).
    """
    clauses = [frozenset(c) for c in clauses]
    if frozenset() in clauses:
        return source(frozenset())
    sat, x = solve_2sat(clauses)
    if sat:
        raise FormulaTrueError("2-CNF is satisfiable")
    adj = _graph(clauses)

    def unit(start, goal):
        # walk start -> ... -> goal (goal == -start), resolving off each
        # intermediate literal until only {goal} is left
        path = _path(adj, start, goal)
        cl = path[0]
        cur = source(cl)
        node = _next(start, cl)
        for c in path[1:]:
            if cl == frozenset((goal,)):
                break
            cur = b.add((cl | c) - {node, -node}, RESOLVE, (cur, source(c)), abs(node))
            cl = b.steps[cur - 1].clause
            node = _next(node, c)
        if cl != frozenset((goal,)):
            raise QBFError("implication chain did not close")  # pragma: no cover
        return cur

    neg = unit(x, -x)
    pos = unit(-x, x)
    return b.add(frozenset(), RESOLVE, (pos, neg), x)


def refute_2sat(clauses) -> QUResProof:
    """Resolution refutation of an unsatisfiable 2-CNF (axiom index = list position)."""
    clauses = [frozenset(c) for c in clauses]
    b = _Builder()
    first = {}
    for i, c in enumerate(clauses):
        first.setdefault(c, i)

    def source(c):
        if c not in b.known:
            b.known[c] = b.add(c, AXIOM, index=first[c])
        return b.known[c]

    _refute_into(b, clauses, source)
    return QUResProof(b.steps)


def refute_sigma2(phi: QCNF) -> QUResProof:
    """QU-Res refutation of ``exists Y forall X . psi`` via its 2-SAT projection.

    Every used clause enters as an axiom followed by a reduction that drops
    its universal literals.
    """
    xvars = phi.forall_vars
    reduced = []
    origin = {}
    for i, c in enumerate(phi.matrix):
        ys = frozenset(l for l in c if abs(l) not in xvars)
        if any(phi.level[abs(l)] < phi.level[abs(y)] for l in c if abs(l) in xvars for y in ys):
            raise QBFError("universal literals must be right of the existential ones")
        if ys not in origin:
            origin[ys] = i
            reduced.append(ys)
    b = _Builder()

    def source(ys):
        if ys not in b.known:
            i = origin[ys]
            c = phi.matrix[i]
            sid = b.add(c, AXIOM, index=i)
            if c != ys:
                sid = b.add(ys, REDUCE, (sid,))
            b.known[ys] = sid
        return b.known[ys]

    try:
        _refute_into(b, reduced, source)
    except FormulaTrueError:
        raise FormulaTrueError("the existential 2-CNF projection is satisfiable") from None
    return QUResProof(b.steps)
