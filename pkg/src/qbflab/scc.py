"""Response maps, capacity, round-based strategy extraction and the
size/cost/capacity check, for proofs of any supported system.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .core import DEFAULT_VAR_CAP, QCNF
from .cover import min_hitting_set
from .errors import OracleScaleError, QBFError
from .lines import ClauseLine

RESPONSE_VAR_CAP = 16


# ---------------------------------------------------------------------------
# proof adapters


def proof_lines(proof) -> list:
    """Line views of a proof, in order."""
    from .cp import CPLine, CPProof
    from .pcr import PCRLine, PCRProof
    from .qures import QUResProof
    from .semantic import SemanticProof

    if isinstance(proof, QUResProof):
        return [ClauseLine(s.clause) for s in proof.steps]
    if isinstance(proof, CPProof):
        return [CPLine(s.line) for s in proof.steps]
    if isinstance(proof, PCRProof):
        return [PCRLine(s.poly) for s in proof.steps]
    if isinstance(proof, SemanticProof):
        return [s.line for s in proof.steps]
    raise QBFError(f"unsupported proof type {type(proof).__name__}")


def per_block(phi: QCNF, proof):
    """QU-Res proofs with each reduction split per universal block, so every
    reduced block is the rightmost block of some line.  Other proofs as is."""
    from .qures import QUResProof
    from .semantic import from_qures

    return from_qures(phi, proof) if isinstance(proof, QUResProof) else proof


def system_of(proof) -> str:
    from .cp import CPProof
    from .pcr import PCRProof
    from .qures import QUResProof
    from .semantic import SemanticProof

    for cls, name in ((QUResProof, "qures"), (CPProof, "cp"), (PCRProof, "pcr"), (SemanticProof, "semantic")):
        if isinstance(proof, cls):
            return name
    raise QBFError(f"unsupported proof type {type(proof).__name__}")


def check_proof(phi: QCNF, proof) -> bool:
    from .cp import check_cp
    from .pcr import check_pcr
    from .qures import check_qures
    from .semantic import check_semantic

    checker = {"qures": check_qures, "cp": check_cp, "pcr": check_pcr, "semantic": check_semantic}
    return checker[system_of(proof)](phi, proof)


def proof_size(proof) -> int:
    """Monomial count for PCR, line count otherwise."""
    return proof.size() if system_of(proof) == "pcr" else len(proof)


def reducible_block(phi: QCNF, line):
    """Index of the line's rightmost block when it is universal, else None."""
    b = phi.rightmost_block(line.vars)
    if b is None or not phi.prefix[b].is_universal:
        return None
    return b


# ---------------------------------------------------------------------------
# response maps


@dataclass
class ResponseMap:
    """Map from outer assignments of a line to responses on its rightmost block.

    ``uvars`` are the block variables occurring in the line; a response is
    zero-extended to the rest of the block by the caller.
    """

    line: int
    block: int
    xvars: tuple
    uvars: tuple
    constant: tuple | None = None
    table: dict | None = None

    def key(self, tau) -> tuple:
        return tuple(int(tau[v]) for v in self.xvars)

    def __call__(self, tau) -> dict:
        bits = self.constant if self.constant is not None else self.table[self.key(tau)]
        return dict(zip(self.uvars, bits))

    def range(self) -> set:
        if self.constant is not None:
            return {self.constant}
        return set(self.table.values())

    @property
    def range_size(self) -> int:
        return len(self.range())


def _split(phi: QCNF, line, block: int):
    xvars = tuple(v for v in line.vars if phi.level[v] != block)
    uvars = tuple(v for v in line.vars if phi.level[v] == block)
    return xvars, uvars


def holds_matrix(phi: QCNF, line, block: int, cap: int = RESPONSE_VAR_CAP) -> np.ndarray:
    """``M[a, b]``: line holds under outer row a and block row b (canonical orders)."""
    xvars, uvars = _split(phi, line, block)
    if len(line.vars) > cap:
        raise OracleScaleError(f"line over {len(line.vars)} variables exceeds response cap {cap}")
    fn = line.fn()
    perm = [fn.vars.index(v) for v in xvars + uvars]
    cube = fn.cube() if fn.vars else fn.table.reshape(())
    return np.transpose(cube, perm).reshape(1 << len(xvars), 1 << len(uvars))


def _bits(k: int, n: int) -> tuple:
    return tuple((k >> (n - 1 - j)) & 1 for j in range(n))


def audit_response_map(phi: QCNF, line, R: ResponseMap) -> bool:
    """Every non-tautological restriction L[alpha] is falsified by R(alpha)."""
    M = holds_matrix(phi, line, R.block)
    nx, nu = len(R.xvars), len(R.uvars)
    index = {_bits(j, nu): j for j in range(1 << nu)}
    for i in range(1 << nx):
        row = M[i]
        if row.all():
            continue
        beta = R(dict(zip(R.xvars, _bits(i, nx))))
        if row[index[tuple(beta[u] for u in R.uvars)]]:
            return False
    return True


def min_response_range(phi: QCNF, line, line_id: int = 0):
    """(minimum range, witness map) by exhaustive hitting-set search."""
    block = reducible_block(phi, line)
    if block is None:
        raise QBFError("line is not reducible")
    xvars, uvars = _split(phi, line, block)
    M = holds_matrix(phi, line, block)
    nx, nu = len(xvars), len(uvars)
    W = {i: [j for j in range(1 << nu) if not M[i, j]] for i in range(1 << nx)}
    B = min_hitting_set([w for w in W.values() if w], list(range(1 << nu)))
    if not B:
        B = [0]
    table = {}
    for i, w in W.items():
        pick = next((j for j in B if j in w), B[0])
        table[_bits(i, nx)] = _bits(pick, nu)
    R = ResponseMap(line_id, block, xvars, uvars, table=table)
    return len(B), R


def greedy_response_map(phi: QCNF, line, line_id: int = 0) -> ResponseMap:
    """Reuse an already chosen falsifying response when one exists,
    otherwise take the first fresh one; tautological rows get the first choice."""
    block = reducible_block(phi, line)
    if block is None:
        raise QBFError("line is not reducible")
    xvars, uvars = _split(phi, line, block)
    M = holds_matrix(phi, line, block)
    nx, nu = len(xvars), len(uvars)
    chosen: list[int] = []
    pick: dict[int, int | None] = {}
    for i in range(1 << nx):
        row = M[i]
        if row.all():
            pick[i] = None
            continue
        j = next((c for c in chosen if not row[c]), None)
        if j is None:
            j = int(np.argmin(row))  # first falsifying column
            chosen.append(j)
        pick[i] = j
    first = chosen[0] if chosen else 0
    table = {_bits(i, nx): _bits(first if j is None else j, nu) for i, j in pick.items()}
    return ResponseMap(line_id, block, xvars, uvars, table=table)


def pcr_response_map(phi: QCNF, poly, line_id: int = 0) -> ResponseMap:
    from .pcr import PCRLine

    return greedy_response_map(phi, PCRLine(poly), line_id)


def u_monomial_count(phi: QCNF, poly) -> int:
    """Distinct block parts v_j of the monomials of a PCR line."""
    from .pcr import PCRLine

    block = reducible_block(phi, PCRLine(poly))
    if block is None:
        raise QBFError("line is not reducible")
    return len({tuple((a, e) for a, e in m if phi.level[abs(a)] == block) for m, _ in poly.terms})


def _constant_clause_map(phi, line, block, line_id):
    xvars, uvars = _split(phi, line, block)
    pos = {abs(l): (0 if l > 0 else 1) for l in line.clause}
    return ResponseMap(line_id, block, xvars, uvars, constant=tuple(pos[u] for u in uvars))


def _constant_cp_map(phi, line, block, line_id):
    from .cp import cp_response

    xvars, uvars = _split(phi, line, block)
    beta = cp_response(phi, line.ineq)
    return ResponseMap(line_id, block, xvars, uvars, constant=tuple(beta[u] for u in uvars))


def default_response_maps(phi: QCNF, proof) -> dict:
    """Per reducible line: constant maps for clauses, the sign rule for CP,
    the greedy map for PCR and a minimum-range map for formula lines."""
    from .cp import CPLine
    from .pcr import PCRLine

    maps = {}
    for i, line in enumerate(proof_lines(per_block(phi, proof))):
        block = reducible_block(phi, line)
        if block is None:
            continue
        if isinstance(line, ClauseLine):
            if any(-l in line.clause for l in line.clause):
                maps[i] = min_response_range(phi, line, i)[1]
            else:
                maps[i] = _constant_clause_map(phi, line, block, i)
        elif isinstance(line, CPLine):
            maps[i] = _constant_cp_map(phi, line, block, i)
        elif isinstance(line, PCRLine):
            maps[i] = greedy_response_map(phi, line, i)
        else:
            maps[i] = min_response_range(phi, line, i)[1]
    return maps


def minimal_response_maps(phi: QCNF, proof) -> dict:
    return {
        i: min_response_range(phi, line, i)[1]
        for i, line in enumerate(proof_lines(per_block(phi, proof)))
        if reducible_block(phi, line) is not None
    }


def capacity(phi: QCNF, proof) -> int:
    """Max over reducible lines of the least range a response map can have."""
    best = 1
    for i, line in enumerate(proof_lines(per_block(phi, proof))):
        if reducible_block(phi, line) is not None:
            best = max(best, min_response_range(phi, line, i)[0])
    return best


def capacity_min_of_max(phi: QCNF, proof) -> int:
    """Capacity read literally: the least c such that every reducible line has
    some response map with range at most c (searched directly, per c)."""
    rows = []
    for line in proof_lines(per_block(phi, proof)):
        block = reducible_block(phi, line)
        if block is None:
            continue
        M = holds_matrix(phi, line, block)
        rows.append([frozenset(np.flatnonzero(~r).tolist()) for r in M if not r.all()])
    c = 1
    while True:
        if all(_has_cover(ws, c) for ws in rows):
            return c
        c += 1


def _has_cover(ws, c) -> bool:
    if not ws:
        return True
    cols = sorted(set().union(*ws))
    for k in range(1, min(c, len(cols)) + 1):
        for combo in combinations(cols, k):
            s = set(combo)
            if all(w & s for w in ws):
                return True
    return False


# ---------------------------------------------------------------------------
# strategy extraction


def rounds_of(phi: QCNF) -> list[tuple]:
    """Prefix as rounds ``(E_i vars, universal block index or None)``."""
    out: list[list] = []
    for b, blk in enumerate(phi.prefix):
        if blk.is_universal:
            if not out or out[-1][1] is not None:
                out.append([frozenset(), b])
            else:
                out[-1][1] = b
        else:
            if not out or out[-1][1] is not None:
                out.append([frozenset(blk.vars), None])
            else:
                out[-1][0] = out[-1][0] | blk.vars
    return [tuple(r) for r in out]


@dataclass
class ExtractionReport:
    fallbacks: int = 0  # responses read from the first line of the block
    zero_defaults: int = 0  # blocks with no line to read from
    lines_used: set = field(default_factory=set)


class Extractor:
    """Round-based extraction over a fixed proof and response map set.

    QU-Res proofs are read through :func:`per_block`, and ``maps`` is keyed
    by line index in that view.  ``respond(i, sigma)`` gives the block response of round i given the
    assignment ``sigma`` to every variable of rounds < i and E_i.
    """

    def __init__(self, phi: QCNF, proof, maps=None, audit: bool = True):
        self.phi = phi
        self.lines = proof_lines(per_block(phi, proof))
        self.fns = [l.fn() for l in self.lines]
        self.maps = default_response_maps(phi, proof) if maps is None else maps
        if audit:
            for i, R in self.maps.items():
                if not audit_response_map(phi, self.lines[i], R):
                    raise QBFError(f"response map for line {i} fails the falsification audit")
        self.rounds = rounds_of(phi)
        self.report = ExtractionReport()
        seen: set = set()
        self.eligible = []
        for E, b in self.rounds:
            seen |= E
            if b is not None:
                seen |= phi.prefix[b].vars
            self.eligible.append([j for j, l in enumerate(self.lines) if set(l.vars) <= seen])
        self.first_for_block = {}
        for j, l in enumerate(self.lines):
            b = reducible_block(phi, l)
            if b is not None and j in self.maps:
                self.first_for_block.setdefault(b, j)
        self._memo: dict = {}

    def respond(self, i: int, sigma: dict) -> dict:
        _, b = self.rounds[i]
        if b is None:
            return {}
        block = sorted(self.phi.prefix[b].vars)
        F = None
        for j in self.eligible[i]:
            if not self.fns[j].restrict(sigma).is_tautology():
                F = j
                break
        if F is not None and F in self.maps and self.maps[F].block == b:
            R = self.maps[F]
        elif b in self.first_for_block:
            R = self.maps[self.first_for_block[b]]
            self.report.fallbacks += 1
        else:
            self.report.zero_defaults += 1
            return {u: 0 for u in block}
        self.report.lines_used.add(R.line)
        beta = {u: 0 for u in block}
        beta.update(R(sigma))
        return beta

    def play(self, alpha: dict) -> dict:
        """Universal assignment produced against the existential assignment alpha."""
        sigma: dict = {}
        out: dict = {}
        for i, (E, _) in enumerate(self.rounds):
            sigma.update({v: alpha[v] for v in E})
            key = (i, tuple(sorted(sigma.items())))
            if key not in self._memo:
                self._memo[key] = self.respond(i, sigma)
            beta = self._memo[key]
            sigma.update(beta)
            out.update(beta)
        return out


def extract_strategy(phi: QCNF, proof, maps=None, cap: int = DEFAULT_VAR_CAP):
    """Tabulated extracted strategy plus an extraction report."""
    from .semantics import Strategy

    ex = Extractor(phi, proof, maps)
    return Strategy.from_function(phi, ex.play, cap), ex.report


class GameSession:
    """Interactive extraction: feed one existential block at a time."""

    def __init__(self, phi: QCNF, proof, maps=None):
        self.ex = Extractor(phi, proof, maps)
        self.round = 0
        self.sigma: dict = {}

    @property
    def done(self) -> bool:
        return self.round >= len(self.ex.rounds)

    def play_round(self, alpha_i: dict) -> dict:
        if self.done:
            raise QBFError("game is over")
        E, _ = self.ex.rounds[self.round]
        if set(alpha_i) != set(E):
            raise QBFError(f"round {self.round + 1} expects an assignment to {sorted(E)}")
        self.sigma.update(alpha_i)
        beta = self.ex.respond(self.round, dict(self.sigma))
        self.sigma.update(beta)
        self.round += 1
        return beta


# ---------------------------------------------------------------------------
# size / cost / capacity


@dataclass
class SCCReport:
    system: str
    size: int
    cost: int
    capacity: int
    ratio: float
    holds: bool
    cost_bound_holds: bool | None
    witnesses: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(self.__dict__, sort_keys=True, indent=1)


def verify_scc(phi: QCNF, proof, cost_report=None, cap: int = DEFAULT_VAR_CAP) -> SCCReport:
    """Check the proof, compute size, cost and capacity, and test
    size >= cost / capacity.  QU-Res and CP also get size >= cost, PCR
    size >= sqrt(cost)."""
    from .semantics import cost as exact_cost

    check_proof(phi, proof)
    system = system_of(proof)
    size = proof_size(proof)
    if cost_report is None:
        cost_report = exact_cost(phi, cap)
    c = cost_report.cost
    cap_ = capacity(phi, proof)
    holds = size * cap_ >= c
    extra = None
    if system in ("qures", "cp"):
        extra = size >= c
    elif system == "pcr":
        extra = size >= math.sqrt(c)
    return SCCReport(
        system,
        size,
        c,
        cap_,
        size / (c / cap_),
        bool(holds),
        extra,
        {"cost_ranges": {str(k): v for k, v in cost_report.ranges.items()}},
    )


__all__ = [
    "proof_lines",
    "per_block",
    "system_of",
    "check_proof",
    "proof_size",
    "reducible_block",
    "ResponseMap",
    "holds_matrix",
    "audit_response_map",
    "min_response_range",
    "greedy_response_map",
    "pcr_response_map",
    "u_monomial_count",
    "default_response_maps",
    "minimal_response_maps",
    "capacity",
    "capacity_min_of_max",
    "rounds_of",
    "Extractor",
    "ExtractionReport",
    "extract_strategy",
    "GameSession",
    "SCCReport",
    "verify_scc",
]
