"""Constructors for the formula families studied by the library.

Variable numbering is fixed per family so generated files are stable:

* ``EQ(n)``: x1..xn = 1..n, u = n+1..2n, t = 2n+1..3n.
* ``Q(n, m, cn)``: all Y blocks (component-major), then all X blocks, then t.
* KBKF: y0 = 1, then per k the group (y_k, y_k', u_k[, v_k]), then
  y_{n+1}..y_{2n}.
* (1,2)-QCNF: X = 1..m, Y = m+1..m+n.
* 2-SAT: 1..n.

Random families draw from SplitMix64 with one substream per component.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import comb

from .core import EXISTS, FORALL, Block, QCNF, sorted_lits
from .errors import QBFError

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def _mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class SplitMix64:
    """The standard SplitMix64 generator (Steele, Lea, Flood)."""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next(self) -> int:
        self.state = (self.state + GOLDEN) & MASK64
        return _mix64(self.state)

    def below(self, bound: int) -> int:
        """Uniform integer in [0, bound) by rejection (no modulo bias)."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        limit = (1 << 64) - ((1 << 64) % bound)
        while True:
            r = self.next()
            if r < limit:
                return r % bound

    @classmethod
    def substream(cls, seed: int, index: int) -> "SplitMix64":
        """Stream for component ``index``: seed XOR index, mixed once."""
        return cls(_mix64(((seed ^ index) + GOLDEN) & MASK64))


def sample_distinct(rng: SplitMix64, universe: int, count: int) -> list[int]:
    """``count`` distinct indices from range(universe), in draw order."""
    if count > universe:
        raise QBFError(f"cannot draw {count} distinct clauses from a universe of {universe}")
    seen: set[int] = set()
    out = []
    while len(out) < count:
        i = rng.below(universe)
        if i not in seen:
            seen.add(i)
            out.append(i)
    return out


# ---------------------------------------------------------------------------
# fixed families


def gen_equality(n: int) -> QCNF:
    if n < 1:
        raise QBFError("EQ(n) needs n >= 1")
    xs = list(range(1, n + 1))
    us = list(range(n + 1, 2 * n + 1))
    ts = list(range(2 * n + 1, 3 * n + 1))
    matrix = []
    for x, u, t in zip(xs, us, ts):
        matrix.append(frozenset((x, u, -t)))
        matrix.append(frozenset((-x, -u, -t)))
    matrix.append(frozenset(ts))
    names = {}
    for i in range(n):
        names[xs[i]] = f"x{i + 1}"
        names[us[i]] = f"u{i + 1}"
        names[ts[i]] = f"t{i + 1}"
    prefix = (Block(EXISTS, xs), Block(FORALL, us), Block(EXISTS, ts))
    return QCNF(prefix, tuple(matrix), names)


def _kbkf(n: int, doubled: bool, weak: bool) -> QCNF:
    if n < 1:
        raise QBFError("KBKF formulas need n >= 1")
    names = {}
    nxt = iter(range(1, 10 * n + 10))
    y0 = next(nxt)
    names[y0] = "y0"
    y, yp, u, v = {}, {}, {}, {}
    for k in range(1, n + 1):
        y[k], yp[k], u[k] = next(nxt), next(nxt), next(nxt)
        names[y[k]], names[yp[k]], names[u[k]] = f"y{k}", f"y{k}'", f"u{k}"
        if doubled:
            v[k] = next(nxt)
            names[v[k]] = f"v{k}"
    tail = {}
    for t in range(1, n + 1):
        tail[t] = next(nxt)
        names[tail[t]] = f"y{n + t}"

    def U(k, positive):
        lits = [u[k] if positive else -u[k]]
        if doubled:
            lits.append(v[k] if positive else -v[k])
        return lits

    tail_neg = [-tail[t] for t in range(1, n + 1)]
    matrix = [frozenset((-y0,)), frozenset((y0, -y[1], -yp[1]))]
    for k in range(1, n):
        nxt_pair = [-y[k + 1], -yp[k + 1]]
        matrix.append(frozenset([y[k], *U(k, False), *nxt_pair]))
        matrix.append(frozenset([yp[k], *U(k, True), *nxt_pair]))
    matrix.append(frozenset([y[n], *U(n, False), *tail_neg]))
    matrix.append(frozenset([yp[n], *U(n, True), *tail_neg]))
    for t in range(1, n + 1):
        matrix.append(frozenset([*U(t, False), tail[t]]))
        matrix.append(frozenset([*U(t, True), tail[t]]))

    prefix = []
    for k in range(1, n + 1):
        ex = [y[k], yp[k]] + ([y0] if k == 1 else [])
        prefix.append(Block(EXISTS, ex))
        uni = [u[k]]
        if doubled and not weak:
            uni.append(v[k])
        if doubled and weak and k == n:
            uni.extend(v[j] for j in range(1, n + 1))
        prefix.append(Block(FORALL, uni))
    prefix.append(Block(EXISTS, tail.values()))
    return QCNF(tuple(prefix), tuple(matrix), names)


def gen_kbkf(n: int) -> QCNF:
    """kappa(n)."""
    return _kbkf(n, doubled=False, weak=False)


def gen_kbkf_doubled(n: int) -> QCNF:
    """lambda(n): each u_k doubled by v_k in the same block."""
    return _kbkf(n, doubled=True, weak=False)


def gen_kbkf_weak(n: int) -> QCNF:
    """lambda'(n): lambda(n)'s matrix with every v_k in the last universal block."""
    return _kbkf(n, doubled=True, weak=True)


# ---------------------------------------------------------------------------
# clause universes


def pair_universe(nvars: int) -> int:
    """Number of two-literal clauses on distinct variables out of ``nvars``."""
    return 4 * comb(nvars, 2)


def decode_pair(index: int, yvars: list[int]) -> tuple[int, int]:
    """Canonical pair index -> two literals.

    Ordered pairs i < j are enumerated lexicographically; the low two bits
    pick signs (bit 1 negates the first literal, bit 0 the second).
    """
    pair, signs = divmod(index, 4)
    n = len(yvars)
    i = 0
    while pair >= n - 1 - i:
        pair -= n - 1 - i
        i += 1
    j = i + 1 + pair
    a, b = yvars[i], yvars[j]
    return (-a if signs & 2 else a), (-b if signs & 1 else b)


def decode_12(index: int, xvars: list[int], yvars: list[int]) -> frozenset:
    """Clause with one X-literal and two Y-literals.

    Existential pair index is major, universal literal index minor; the
    universal literal index k encodes variable k // 2, negated when odd.
    """
    pair, ul = divmod(index, 2 * len(xvars))
    a, b = decode_pair(pair, yvars)
    x = xvars[ul // 2]
    return frozenset((-x if ul % 2 else x, a, b))


def universe_12(n_exist: int, m_univ: int) -> int:
    return pair_universe(n_exist) * 2 * m_univ


@dataclass
class RandomQMeta:
    n: int
    m: int
    cn: int
    seed: int
    y_blocks: list = field(default_factory=list)
    x_blocks: list = field(default_factory=list)
    t_vars: list = field(default_factory=list)
    components: list = field(default_factory=list)  # per component: list of clauses (sorted literal lists)

    def component_clauses(self, i: int) -> list[frozenset]:
        return [frozenset(c) for c in self.components[i]]

    def to_json(self) -> str:
        return json.dumps(
            {
                "family": "Q(n,m,c)",
                "n": self.n,
                "m": self.m,
                "cn": self.cn,
                "seed": self.seed,
                "y_blocks": self.y_blocks,
                "x_blocks": self.x_blocks,
                "t_vars": self.t_vars,
                "components": self.components,
            },
            indent=1,
        )

    @classmethod
    def from_json(cls, text: str) -> "RandomQMeta":
        d = json.loads(text)
        return cls(d["n"], d["m"], d["cn"], d["seed"], d["y_blocks"], d["x_blocks"], d["t_vars"], d["components"])


def gen_random_q(n: int, m: int, cn: int, seed: int) -> tuple[QCNF, RandomQMeta]:
    """Q(n, m, c) with ``cn`` clauses per component."""
    if n < 2:
        raise QBFError("Q(n,m,c) needs n >= 2")
    if m < 1:
        raise QBFError("Q(n,m,c) needs m >= 1")
    universe = universe_12(n, m)
    if not 1 <= cn <= universe:
        raise QBFError(f"clause count {cn} outside 1..{universe}")
    ys = [[i * n + j + 1 for j in range(n)] for i in range(n)]
    base = n * n
    xs = [[base + i * m + k + 1 for k in range(m)] for i in range(n)]
    base += n * m
    ts = [base + i + 1 for i in range(n)]
    names = {}
    for i in range(n):
        for j, v in enumerate(ys[i]):
            names[v] = f"y{i + 1}_{j + 1}"
        for k, v in enumerate(xs[i]):
            names[v] = f"x{i + 1}_{k + 1}"
        names[ts[i]] = f"t{i + 1}"
    meta = RandomQMeta(n, m, cn, seed, ys, xs, ts)
    matrix = []
    for i in range(n):
        rng = SplitMix64.substream(seed, i)
        comp = [decode_12(k, xs[i], ys[i]) for k in sample_distinct(rng, universe, cn)]
        meta.components.append([sorted_lits(c) for c in comp])
        matrix.extend(c | {-ts[i]} for c in comp)
    matrix.append(frozenset(ts))
    prefix = (
        Block(EXISTS, [v for b in ys for v in b]),
        Block(FORALL, [v for b in xs for v in b]),
        Block(EXISTS, ts),
    )
    return QCNF(prefix, tuple(matrix), names), meta


def component_sigma2(meta: RandomQMeta, i: int) -> QCNF:
    """Component i of Q(n, m, c) as exists Y_i forall X_i . psi_i."""
    prefix = (Block(EXISTS, meta.y_blocks[i]), Block(FORALL, meta.x_blocks[i]))
    return QCNF(prefix, tuple(meta.component_clauses(i)))


def gen_random_12qcnf(m: int, n: int, clause_count: int, seed: int) -> QCNF:
    """Random (1,2)-QCNF forall X exists Y with |X| = m, |Y| = n."""
    if m < 1 or n < 2:
        raise QBFError("(1,2)-QCNF needs m >= 1 and n >= 2")
    xs = list(range(1, m + 1))
    ys = list(range(m + 1, m + n + 1))
    universe = universe_12(n, m)
    if not 0 <= clause_count <= universe:
        raise QBFError(f"clause count {clause_count} outside 0..{universe}")
    rng = SplitMix64.substream(seed, 0)
    matrix = tuple(decode_12(k, xs, ys) for k in sample_distinct(rng, universe, clause_count))
    return QCNF((Block(FORALL, xs), Block(EXISTS, ys)), matrix)


def gen_random_2sat(n: int, clause_count: int, seed: int) -> list[frozenset]:
    """Distinct random 2-clauses over variables 1..n."""
    if n < 2:
        raise QBFError("2-SAT needs n >= 2")
    universe = pair_universe(n)
    if not 0 <= clause_count <= universe:
        raise QBFError(f"clause count {clause_count} outside 0..{universe}")
    rng = SplitMix64.substream(seed, 0)
    vs = list(range(1, n + 1))
    return [frozenset(decode_pair(k, vs)) for k in sample_distinct(rng, universe, clause_count)]


def write_cnf(clauses, nvars: int | None = None) -> str:
    """Plain DIMACS for a propositional CNF."""
    if nvars is None:
        nvars = max((abs(l) for c in clauses for l in c), default=0)
    lines = [f"p cnf {nvars} {len(clauses)}"]
    lines += [" ".join([*map(str, sorted_lits(c)), "0"]) for c in clauses]
    return "\n".join(lines) + "\n"
