"""``qbflab`` command line.

Exit codes: 0 success, 1 verification failure, 2 usage or input errors,
3 oracle cap exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import subprocess
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import cp, generators as gen, pcr, qures, semantic
from .core import DEFAULT_VAR_CAP, parse_qdimacs, write_qdimacs
from .errors import FormatError, FormulaTrueError, OracleScaleError, ProofError, QBFError
from .semantics import DEFAULT_STRATEGY_BUDGET, cost, cost_lower_bound_q, truth, verify_strategy

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3

SYSTEMS = ("qures", "cp", "pcr", "sem")
READERS = {
    "qures": qures.parse_trace,
    "cp": cp.parse_cp,
    "pcr": pcr.parse_pcr,
    "sem": semantic.parse_semantic,
}
CHECKERS = {
    "qures": qures.check_qures,
    "cp": cp.check_cp,
    "pcr": pcr.check_pcr,
    "sem": semantic.check_semantic,
}
STUDY_FIELDS = ["trial", "seed", "n", "m", "cn", "all_components_false", "k_nonconstant", "bound", "exact_cost", "runtime_ms"]


class UsageError(QBFError):
    pass


def _read(path) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _emit(text: str, out=None):
    if out and out != "-":
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1) + "\n"


def _formula(path):
    return parse_qdimacs(_read(path))


def _proof(system, path):
    return READERS[system](_read(path))


# ---------------------------------------------------------------------------
# subcommands


def cmd_gen(a):
    meta = None
    fam = a.family
    if fam == "eq":
        phi = gen.gen_equality(a.n)
    elif fam == "kbkf":
        phi = gen.gen_kbkf(a.n)
    elif fam == "kbkf-d":
        phi = gen.gen_kbkf_doubled(a.n)
    elif fam == "kbkf-w":
        phi = gen.gen_kbkf_weak(a.n)
    elif fam == "randq":
        phi, meta = gen.gen_random_q(a.n, a.m, _need(a, "cn"), a.seed)
    elif fam == "12qcnf":
        phi = gen.gen_random_12qcnf(a.m, a.n, _need(a, "count"), a.seed)
    else:
        _emit(gen.write_cnf(gen.gen_random_2sat(a.n, _need(a, "count"), a.seed), a.n), a.output)
        return EXIT_OK
    _emit(write_qdimacs(phi), a.output)
    if meta is not None and a.meta:
        Path(a.meta).write_text(meta.to_json() + "\n")
    return EXIT_OK


def _need(a, name):
    v = getattr(a, name)
    if v is None:
        raise UsageError(f"--{name} is required for family {a.family}")
    return v


def cmd_check(a):
    phi = _formula(a.formula)
    proof = _proof(a.system, a.proof)
    kw = {"strict": True} if a.system == "qures" and a.strict else {}
    try:
        CHECKERS[a.system](phi, proof, **kw)
    except ProofError as e:
        _emit(_json({"accepted": False, **e.as_dict()}))
        return EXIT_FAIL
    _emit(_json({"accepted": True, "steps": len(proof)}))
    return EXIT_OK


def cmd_prove(a):
    from .twosat import refute_sigma2

    phi = _formula(a.formula)
    if a.mode == "sigma2":
        proof = refute_sigma2(phi)
    else:
        proof = qures.prove_qures_saturate(phi, var_cap=a.var_cap)
        if proof is None:
            raise FormulaTrueError("saturation found no refutation: the formula is true")
    if a.emit == "qures":
        text = qures.write_trace(proof)
    elif a.emit == "cp":
        text = cp.write_cp(cp.from_qures(phi, proof))
    elif a.emit == "pcr":
        text = pcr.write_pcr(pcr.from_qures(phi, proof, pcr.Field.from_name(a.field)))
    else:
        text = semantic.write_semantic(semantic.from_qures(phi, proof))
    _emit(text, a.output)
    return EXIT_OK


def cmd_truth(a):
    phi = _formula(a.formula)
    _emit(_json({"true": truth(phi, a.var_cap)}))
    return EXIT_OK


def cmd_cost(a):
    phi = _formula(a.formula)
    rep = cost(phi, a.var_cap, a.strategy_budget)
    _emit(_json(rep.to_dict()))
    return EXIT_OK


def cmd_capacity(a):
    from .scc import capacity, capacity_min_of_max

    phi = _formula(a.formula)
    proof = _proof(a.system, a.proof)
    CHECKERS[a.system](phi, proof)
    _emit(_json({"capacity": capacity(phi, proof), "min_of_max": capacity_min_of_max(phi, proof)}))
    return EXIT_OK


def cmd_extract(a):
    from .scc import extract_strategy

    phi = _formula(a.formula)
    proof = _proof(a.system, a.proof)
    CHECKERS[a.system](phi, proof)
    s, rep = extract_strategy(phi, proof, cap=a.var_cap)
    rows = io.StringIO()
    rows.write("c e " + " ".join(map(str, s.evars)) + "\n")
    rows.write("c a " + " ".join(map(str, s.uvars)) + "\n")
    for alpha, beta in s.to_rows():
        rows.write("".join(map(str, alpha)) + " " + "".join(map(str, beta)) + "\n")
    _emit(rows.getvalue(), a.output)
    ok = verify_strategy(phi, s, a.var_cap)
    sys.stderr.write(_json({"winning": ok, "fallbacks": rep.fallbacks, "zero_defaults": rep.zero_defaults}))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_scc(a):
    from .scc import verify_scc

    phi = _formula(a.formula)
    proof = _proof(a.system, a.proof)
    try:
        rep = verify_scc(phi, proof, cost(phi, a.var_cap, a.strategy_budget), a.var_cap)
    except ProofError as e:
        _emit(_json({"accepted": False, **e.as_dict()}))
        return EXIT_FAIL
    _emit(rep.to_json() + "\n", a.output)
    return EXIT_OK if rep.holds else EXIT_FAIL


def trial_seed(seed: int, trial: int) -> int:
    return gen.SplitMix64.substream(seed, trial).next()


def study_row(args) -> dict:
    trial, seed, n, m, cn, var_cap, exact, timing = args
    t0 = time.perf_counter()
    s = trial_seed(seed, trial)
    phi, meta = gen.gen_random_q(n, m, cn, s)
    rep = cost_lower_bound_q(meta)
    exact_cost = ""
    if exact and rep.all_false and len(phi.vars) <= var_cap:
        exact_cost = cost(phi, var_cap).cost
    ms = round((time.perf_counter() - t0) * 1000) if timing else ""
    return {
        "trial": trial,
        "seed": s,
        "n": n,
        "m": m,
        "cn": cn,
        "all_components_false": int(rep.all_false),
        "k_nonconstant": rep.k,
        "bound": f"{rep.bound:.6g}" if rep.all_false else "",
        "exact_cost": exact_cost,
        "runtime_ms": ms,
    }


def cmd_random_study(a):
    jobs = [(t, a.seed, a.n, a.m, a.cn, a.var_cap, a.exact_cost, a.timing) for t in range(a.trials)]
    if a.jobs > 1:
        with ProcessPoolExecutor(a.jobs) as ex:
            rows = list(ex.map(study_row, jobs))
    else:
        rows = [study_row(j) for j in jobs]
    rows.sort(key=lambda r: r["trial"])
    buf = io.StringIO()
    w = csv.DictWriter(buf, STUDY_FIELDS, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    _emit(buf.getvalue(), a.output)
    return EXIT_OK


def cmd_self_test(a):
    tests = Path(__file__).resolve().parents[2] / "tests" / "test_acceptance.py"
    if not tests.exists():
        raise UsageError("acceptance suite not found next to the package source")
    r = subprocess.run([sys.executable, "-m", "pytest", "-q", "-s", str(tests)])
    return EXIT_OK if r.returncode == 0 else EXIT_FAIL


# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qbflab", description="QBF proof checking, cost and capacity oracles")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def caps(sp):
        sp.add_argument("--var-cap", type=int, default=DEFAULT_VAR_CAP)
        sp.add_argument("--strategy-budget", type=int, default=DEFAULT_STRATEGY_BUDGET)

    g = sub.add_parser("gen", help="generate a formula")
    g.add_argument("family", choices=["eq", "kbkf", "kbkf-d", "kbkf-w", "randq", "12qcnf", "2sat"])
    g.add_argument("-n", type=int, required=True)
    g.add_argument("-m", type=int, default=1)
    g.add_argument("--cn", type=int)
    g.add_argument("--count", type=int)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--output")
    g.add_argument("--meta", help="sidecar JSON path (randq)")
    g.set_defaults(func=cmd_gen)

    c = sub.add_parser("check", help="check a proof")
    c.add_argument("system", choices=SYSTEMS)
    c.add_argument("formula")
    c.add_argument("proof")
    c.add_argument("--strict", action="store_true", help="Q-Res only (no universal pivots)")
    c.set_defaults(func=cmd_check)

    pr = sub.add_parser("prove", help="find a QU-Res refutation")
    pr.add_argument("system", choices=["qures"])
    pr.add_argument("formula")
    pr.add_argument("--mode", choices=["saturate", "sigma2"], default="saturate")
    pr.add_argument("--emit", choices=SYSTEMS, default="qures", help="translate the refutation")
    pr.add_argument("--field", default="Q", help="PCR field: Q or GF(p)")
    pr.add_argument("--var-cap", type=int, default=14)
    pr.add_argument("-o", "--output")
    pr.set_defaults(func=cmd_prove)

    for name, fn in (("truth", cmd_truth), ("cost", cmd_cost)):
        sp = sub.add_parser(name)
        sp.add_argument("formula")
        caps(sp)
        sp.set_defaults(func=fn)

    for name, fn in (("capacity", cmd_capacity), ("extract", cmd_extract), ("scc", cmd_scc)):
        sp = sub.add_parser(name)
        sp.add_argument("system", choices=SYSTEMS)
        sp.add_argument("formula")
        sp.add_argument("proof")
        sp.add_argument("-o", "--output")
        caps(sp)
        sp.set_defaults(func=fn)

    rs = sub.add_parser("random-study", help="CSV of Q(n,m,c) bound ingredients")
    rs.add_argument("--trials", type=int, required=True)
    rs.add_argument("--seed", type=int, required=True)
    rs.add_argument("--n", type=int, required=True)
    rs.add_argument("--m", type=int, required=True)
    rs.add_argument("--cn", type=int, required=True)
    rs.add_argument("--exact-cost", action="store_true", help="run the cost oracle on small all-false instances")
    rs.add_argument("--timing", action="store_true", help="fill runtime_ms (output no longer byte-stable)")
    rs.add_argument("--jobs", type=int, default=1)
    rs.add_argument("--format", choices=["csv"], default="csv")
    rs.add_argument("-o", "--output")
    rs.add_argument("--var-cap", type=int, default=DEFAULT_VAR_CAP)
    rs.set_defaults(func=cmd_random_study)

    st = sub.add_parser("self-test", help="run the acceptance suite")
    st.set_defaults(func=cmd_self_test)
    return p


def main(argv=None) -> int:
    try:
        a = build_parser().parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    try:
        return a.func(a)
    except OracleScaleError as e:
        sys.stderr.write(f"qbflab: cap exceeded: {e}\n")
        return EXIT_CAP
    except ProofError as e:
        sys.stderr.write(_json({"accepted": False, **e.as_dict()}))
        return EXIT_FAIL
    except FormulaTrueError as e:
        sys.stderr.write(f"qbflab: {e}\n")
        return EXIT_FAIL
    except (FormatError, UsageError, QBFError) as e:
        sys.stderr.write(f"qbflab: {e}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
