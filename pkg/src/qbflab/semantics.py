"""Exhaustive semantic oracles: game value, winning strategies and cost.

Everything here enumerates assignments, so every entry point takes a cap
and raises :class:`OracleScaleError` beyond it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations, product

from .core import (
    DEFAULT_VAR_CAP,
    FORALL,
    QCNF,
    SATISFIED,
    enumerate_assignments,
    eval_matrix,
    restrict_clause,
)
from .cover import min_hitting_set
from .errors import FormulaTrueError, OracleScaleError, QBFError
from .twosat import solve_2sat

DEFAULT_STRATEGY_BUDGET = 200_000


def _restrict_set(clauses: frozenset, tau) -> frozenset:
    out = []
    for c in clauses:
        r = restrict_clause(c, tau)
        if r is not SATISFIED:
            out.append(r)
    return frozenset(out)


class _Game:
    """Evaluation game, one variable per move.

    ``options`` maps a universal block index to an explicit list of block
    assignments; such a block becomes a single move restricted to them.
    """

    def __init__(self, phi: QCNF, options=None):
        self.phi = phi
        self.moves = []
        self.block_start = []
        for b, blk in enumerate(phi.prefix):
            self.block_start.append(len(self.moves))
            if options is not None and b in options:
                self.moves.append(("opt", options[b]))
            else:
                self.moves.extend((blk.quant, v) for v in sorted(blk.vars))
        self.block_start.append(len(self.moves))
        self.memo: dict = {}

    def value(self, i: int, clauses: frozenset) -> bool:
        """True iff the existential player wins from move ``i``."""
        if frozenset() in clauses:
            return False
        if not clauses:
            return True
        key = (i, clauses)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        q, arg = self.moves[i]
        if q == "opt":
            res = all(self.value(i + 1, _restrict_set(clauses, beta)) for beta in arg)
        elif not any(arg == abs(l) for c in clauses for l in c):
            res = self.value(i + 1, clauses)
        else:
            branches = (self.value(i + 1, _restrict_set(clauses, {arg: b})) for b in (0, 1))
            res = all(branches) if q == FORALL else any(branches)
        self.memo[key] = res
        return res

    def after_block(self, b: int, tau) -> bool:
        return self.value(self.block_start[b + 1], _restrict_set(frozenset(self.phi.matrix), tau))


def _check_cap(phi: QCNF, cap: int):
    if len(phi.vars) > cap:
        raise OracleScaleError(f"{len(phi.vars)} variables exceeds oracle cap {cap}")


def truth(phi: QCNF, cap: int = DEFAULT_VAR_CAP) -> bool:
    """Game value of ``phi`` (True means the existential player wins)."""
    _check_cap(phi, cap)
    return _Game(phi).value(0, frozenset(phi.matrix))


# ---------------------------------------------------------------------------
# strategies


@dataclass
class Strategy:
    """A universal-player strategy stored as a total table.

    Keys are bit tuples over ``evars`` (sorted existential variables), values
    bit tuples over ``uvars`` (sorted universal variables).
    """

    phi: QCNF
    table: dict
    player: str = FORALL
    evars: tuple = field(init=False)
    uvars: tuple = field(init=False)

    def __post_init__(self):
        self.evars = tuple(sorted(self.phi.exists_vars))
        self.uvars = tuple(sorted(self.phi.forall_vars))

    def response(self, alpha) -> dict:
        key = tuple(alpha[v] for v in self.evars)
        return dict(zip(self.uvars, self.table[key]))

    def _left_exists(self, b: int):
        lvl = self.phi.level
        return [i for i, v in enumerate(self.evars) if lvl[v] < b]

    def projection(self, b: int) -> dict:
        """S_b as a map (outer existential bits) -> block bits.

        Raises QBFError if the table violates the dependency condition.
        """
        left = self._left_exists(b)
        cols = [i for i, v in enumerate(self.uvars) if self.phi.level[v] == b]
        out: dict = {}
        for key, val in self.table.items():
            k = tuple(key[i] for i in left)
            v = tuple(val[i] for i in cols)
            if out.setdefault(k, v) != v:
                raise QBFError(f"strategy for block {b} depends on existentials to its right")
        return out

    def is_staircase(self) -> bool:
        try:
            for b in self.phi.universal_blocks():
                self.projection(b)
        except QBFError:
            return False
        return True

    def ranges(self) -> dict:
        """|rng(S_b)| per universal block index."""
        return {b: len(set(self.projection(b).values())) for b in self.phi.universal_blocks()}

    def cost(self) -> int:
        return max(self.ranges().values(), default=1)

    def to_rows(self):
        """Rows ``(alpha bits, beta bits)`` in canonical order."""
        return sorted(self.table.items())

    @classmethod
    def from_function(cls, phi: QCNF, fn, cap: int = DEFAULT_VAR_CAP) -> "Strategy":
        """Tabulate ``fn(alpha) -> universal assignment`` over all alpha."""
        evars = sorted(phi.exists_vars)
        uvars = sorted(phi.forall_vars)
        table = {}
        for alpha in enumerate_assignments(evars, cap):
            beta = fn(alpha)
            table[tuple(alpha[v] for v in evars)] = tuple(int(beta.get(u, 0)) for u in uvars)
        return cls(phi, table)


def verify_strategy(phi: QCNF, s: Strategy, cap: int = DEFAULT_VAR_CAP) -> bool:
    """True when ``s`` respects the prefix order and falsifies the matrix on every play."""
    if len(phi.exists_vars) > cap:
        raise OracleScaleError(f"{len(phi.exists_vars)} existential variables exceeds cap {cap}")
    evars = tuple(sorted(phi.exists_vars))
    if s.evars != evars or s.uvars != tuple(sorted(phi.forall_vars)):
        return False
    if len(s.table) != 2 ** len(evars) or not s.is_staircase():
        return False
    for key, val in s.table.items():
        tau = dict(zip(evars, key))
        tau.update(zip(s.uvars, val))
        if eval_matrix(phi.matrix, tau):
            return False
    return True


def _synthesize(phi: QCNF, game: _Game, choices, cap: int) -> Strategy:
    """Walk blocks left to right picking the first response that stays losing."""
    if len(phi.exists_vars) > cap:
        raise OracleScaleError(f"{len(phi.exists_vars)} existential variables exceeds cap {cap}")
    if game.value(0, frozenset(phi.matrix)):
        raise FormulaTrueError("formula is true; no winning universal strategy")
    ublocks = phi.universal_blocks()
    lvl = phi.level
    memo: dict = {}

    def fn(alpha):
        out: dict = {}
        for b in ublocks:
            outer = tuple(sorted((v, x) for v, x in alpha.items() if lvl[v] < b))
            key = (b, outer)
            if key not in memo:
                base = dict(outer)
                base.update({u: x for u, x in out.items() if lvl[u] < b})
                for beta in choices(b):
                    if not game.after_block(b, {**base, **beta}):
                        memo[key] = beta
                        break
                else:  # pragma: no cover - excluded by the invariant
                    raise QBFError("lost the losing-position invariant")
            out.update(memo[key])
        return out

    return Strategy.from_function(phi, fn, cap)


def synthesize_winning_forall(phi: QCNF, cap: int = DEFAULT_VAR_CAP) -> Strategy:
    _check_cap(phi, cap)
    blocks = {b: list(enumerate_assignments(phi.prefix[b].vars, cap)) for b in phi.universal_blocks()}
    return _synthesize(phi, _Game(phi), blocks.__getitem__, cap)


# ---------------------------------------------------------------------------
# cost


@dataclass
class CostReport:
    cost: int
    strategy: Strategy | None
    ranges: dict
    method: str = ""

    def to_dict(self):
        return {"cost": self.cost, "ranges": {str(k): v for k, v in sorted(self.ranges.items())}, "method": self.method}


def cost_exact_single_block(phi: QCNF, cap: int = DEFAULT_VAR_CAP) -> CostReport:
    """Cost of a QCNF with one universal block, as a minimum hitting set.

    W(alpha) collects the block responses that leave phi false after the
    outer existential assignment alpha; the cost is the smallest response
    set meeting every W(alpha).
    """
    _check_cap(phi, cap)
    ublocks = phi.universal_blocks()
    if len(ublocks) > 1:
        raise QBFError("cost_exact_single_block needs at most one universal block")
    game = _Game(phi)
    if game.value(0, frozenset(phi.matrix)):
        raise FormulaTrueError("cost is defined for false formulas only")
    if not ublocks:
        s = Strategy.from_function(phi, lambda a: {}, cap)
        return CostReport(1, s, {}, "single-block")
    (b,) = ublocks
    U = sorted(phi.prefix[b].vars)
    outer = sorted(v for v in phi.exists_vars if phi.level[v] < b)
    responses = list(enumerate_assignments(U, cap))
    rkeys = [tuple(r[u] for u in U) for r in responses]
    W = {}
    for alpha in enumerate_assignments(outer, cap):
        key = tuple(alpha[v] for v in outer)
        W[key] = [rk for rk, beta in zip(rkeys, responses) if not game.after_block(b, {**alpha, **beta})]
    B = min_hitting_set(W.values(), rkeys)
    pick = {}
    for key, ws in W.items():
        pick[key] = next(rk for rk in B if rk in ws)

    def fn(alpha):
        return dict(zip(U, pick[tuple(alpha[v] for v in outer)]))

    s = Strategy.from_function(phi, fn, cap)
    return CostReport(len(B), s, s.ranges(), "single-block")


def cost_exact_general(phi: QCNF, cap: int = DEFAULT_VAR_CAP, budget: int = DEFAULT_STRATEGY_BUDGET) -> CostReport:
    """Exact cost by searching response sets B_b of growing size c.

    Universal blocks restricted to B_b form a smaller game; the cost is the
    least c for which some choice of sets leaves the formula false.
    ``budget`` bounds the number of candidate tuples tried.
    """
    _check_cap(phi, cap)
    if _Game(phi).value(0, frozenset(phi.matrix)):
        raise FormulaTrueError("cost is defined for false formulas only")
    ublocks = phi.universal_blocks()
    if not ublocks:
        s = Strategy.from_function(phi, lambda a: {}, cap)
        return CostReport(1, s, {}, "general")
    full = {b: list(enumerate_assignments(phi.prefix[b].vars, cap)) for b in ublocks}
    top = max(len(v) for v in full.values())
    tried = 0
    for c in range(1, top + 1):
        per_block = [list(combinations(full[b], min(c, len(full[b])))) for b in ublocks]
        for combo in product(*per_block):
            tried += 1
            if tried > budget:
                raise OracleScaleError(f"cost search exceeded strategy budget {budget}")
            options = dict(zip(ublocks, (list(x) for x in combo)))
            game = _Game(phi, options)
            if not game.value(0, frozenset(phi.matrix)):
                s = _synthesize(phi, game, options.__getitem__, cap)
                return CostReport(c, s, s.ranges(), "general")
    raise QBFError("unrestricted game is false yet no restriction was")  # pragma: no cover


def cost(phi: QCNF, cap: int = DEFAULT_VAR_CAP, budget: int = DEFAULT_STRATEGY_BUDGET) -> CostReport:
    if len(phi.universal_blocks()) <= 1:
        return cost_exact_single_block(phi, cap)
    return cost_exact_general(phi, cap, budget)


# ---------------------------------------------------------------------------
# (1,2)-components of the random family


def _existential_parts(psi, xvars) -> list[frozenset]:
    xvars = set(xvars)
    out = []
    for c in psi:
        xs = [l for l in c if abs(l) in xvars]
        ys = frozenset(l for l in c if abs(l) not in xvars)
        if len(xs) != 1 or len(ys) != 2 or len({abs(l) for l in ys}) != 2:
            raise QBFError(f"clause {sorted(c)} is not a (1,2)-clause")
        out.append(ys)
    return out


def psi_false(psi, xvars) -> bool:
    """exists Y forall X . psi is false iff its existential 2-CNF is unsatisfiable."""
    sat, _ = solve_2sat(_existential_parts(psi, xvars))
    return not sat


def psi_nonconstant(psi, xvars, cap: int = 16) -> bool:
    """No constant universal response wins: psi[beta] is satisfiable for every beta."""
    _existential_parts(psi, xvars)
    xvars = sorted(xvars)
    if len(xvars) > cap:
        raise OracleScaleError(f"{len(xvars)} universal variables exceeds cap {cap}")
    for beta in enumerate_assignments(xvars, cap):
        rest = [r for c in psi if (r := restrict_clause(frozenset(c), beta)) is not SATISFIED]
        if not solve_2sat(rest)[0]:
            return False
    return True


@dataclass
class QBoundReport:
    status: str  # "certified" or "truth uncertified"
    all_false: bool
    k: int
    N: int
    bound: float
    log2_bound: float

    def to_dict(self):
        return dict(self.__dict__)


def cost_lower_bound_q(meta) -> QBoundReport:
    """Counting bound (N/(N-1))^k on cost(Q(n,m,c)), N = 2^m.

    k counts components with no constant winning response.  The bound is
    certified only when every component is false.
    """
    N = 2**meta.m
    false_flags = []
    k = 0
    for i in range(meta.n):
        psi = meta.component_clauses(i)
        xv = meta.x_blocks[i]
        false_flags.append(psi_false(psi, xv))
        if psi_nonconstant(psi, xv):
            k += 1
    all_false = all(false_flags)
    log2_bound = k * (math.log2(N) - math.log2(N - 1))
    status = "certified" if all_false else "truth uncertified"
    return QBoundReport(status, all_false, k, N, 2.0**log2_bound, log2_bound)
