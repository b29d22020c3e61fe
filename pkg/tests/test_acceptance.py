"""Acceptance criteria 1-12.  Each test prints one PASS/FAIL line (run with -s to see them)."""
import math
import random
import time

from qbflab import cp, pcr
from qbflab.core import EXISTS, FORALL, QCNF, Block, parse_qdimacs, write_qdimacs
from qbflab.generators import (
    component_sigma2,
    gen_equality,
    gen_kbkf,
    gen_kbkf_doubled,
    gen_kbkf_weak,
    gen_random_12qcnf,
    gen_random_2sat,
    gen_random_q,
    write_cnf,
)
from qbflab.pcr import PCRLine, Polynomial
from qbflab.qures import check_qures, parse_trace, prove_qures_saturate, restrict_proof, write_trace
from qbflab.scc import (
    audit_response_map,
    capacity,
    extract_strategy,
    greedy_response_map,
    min_response_range,
    proof_size,
    reducible_block,
    u_monomial_count,
    verify_scc,
)
from qbflab.semantic import (
    _xor_part,
    check_semantic,
    completeness_refutation,
    first_eligible_line,
    frege_eq_refutation,
    parse_semantic,
    restrict_semantic,
    write_semantic,
)
from qbflab.semantic import from_qures as sem_from_qures
from qbflab.semantics import cost, cost_lower_bound_q, psi_false, synthesize_winning_forall, truth, verify_strategy
from qbflab.twosat import refute_sigma2, solve_2sat
from qbflab.formula import disj
from qbflab.lines import FormulaLine

from oracles import assignments, naive_min_range, naive_truth, random_false_qbfs

# pinned thresholds
C9_ALL_FALSE_MIN = 0.5
C9_MEAN_K_MIN = 0.5
C9_UNSAT_MIN = 0.9


def report(n, ok, detail):
    print(f"[criterion {n:2d}] {'PASS' if ok else 'FAIL'}  {detail}")
    return ok


def _four(phi, proof):
    return {
        "qures": proof,
        "cp": cp.from_qures(phi, proof),
        "pcr": pcr.from_qures(phi, proof),
        "sem": sem_from_qures(phi, proof),
    }


CHECK = {"qures": check_qures, "cp": cp.check_cp, "pcr": pcr.check_pcr, "sem": check_semantic}


def test_c01_cost_equality():
    t = time.perf_counter()
    got = {n: cost(gen_equality(n)).cost for n in (1, 2, 3)}
    dt = time.perf_counter() - t
    ok = all(got[n] == 2**n for n in got) and dt < 10
    assert report(1, ok, f"cost(EQ(n)) = {got}, {dt:.2f}s (limit 10s)")


def test_c02_qures_equality():
    t = time.perf_counter()
    rows = []
    for n in (1, 2, 3):
        phi = gen_equality(n)
        p = prove_qures_saturate(phi)
        r = verify_scc(phi, p)
        rows.append((n, check_qures(phi, p), len(p), capacity(phi, p), r.holds))
    dt = time.perf_counter() - t
    ok = all(acc and size >= 2**n and cap == 1 and holds for n, acc, size, cap, holds in rows) and dt < 60
    assert report(2, ok, f"(n, accepted, size, capacity, scc) = {rows}, {dt:.2f}s")


def test_c03_kbkf():
    t = time.perf_counter()
    got = {n: cost(gen_kbkf_weak(n)).cost for n in (1, 2)}
    falses = [not truth(f(n)) for n in (1, 2) for f in (gen_kbkf, gen_kbkf_weak)]
    dt = time.perf_counter() - t
    ok = all(got[n] == 2**n for n in got) and all(falses) and dt < 60
    assert report(3, ok, f"cost(lambda'(n)) = {got}, false = {falses}, {dt:.2f}s")


def _c04_proofs():
    out = []
    for n in (1, 2, 3):
        phi = gen_equality(n)
        out += [(f"EQ({n})/{k}", phi, p) for k, p in _four(phi, prove_qures_saturate(phi)).items()]
        out.append((f"EQ({n})/frege", phi, frege_eq_refutation(n)))
    phi = gen_kbkf_weak(1)
    out += [(f"kbkf-w(1)/{k}", phi, p) for k, p in _four(phi, prove_qures_saturate(phi)).items()]
    seed, psis = 0, []
    while len(psis) < 20:
        _, meta = gen_random_q(6, 1, 9, seed)
        seed += 1
        psis += [component_sigma2(meta, i) for i in range(meta.n) if psi_false(meta.component_clauses(i), meta.x_blocks[i])]
    for j, psi in enumerate(psis[:20]):
        p = refute_sigma2(psi)
        out += [(f"psi{j}/qures", psi, p), (f"psi{j}/cp", psi, cp.from_qures(psi, p))]
    for j, phi in enumerate(random_false_qbfs(10, 404)):
        out += [(f"rand{j}/{k}", phi, p) for k, p in _four(phi, prove_qures_saturate(phi)).items()]
        out.append((f"rand{j}/complete", phi, completeness_refutation(phi, synthesize_winning_forall(phi))))
    return out


def test_c04_extraction_soundness():
    proofs = _c04_proofs()
    bad = []
    for name, phi, p in proofs:
        kind = name.split("/")[1]
        checker = CHECK.get(kind, check_semantic)
        if not checker(phi, p):
            bad.append(name)
            continue
        s, _ = extract_strategy(phi, p)
        if not verify_strategy(phi, s):
            bad.append(name)
    ok = len(proofs) >= 50 and not bad
    assert report(4, ok, f"{len(proofs) - len(bad)}/{len(proofs)} extracted strategies win (need >= 50, all)")


def test_c05_cutting_planes():
    phi = gen_equality(2)
    p = cp.from_qures(phi, prove_qures_saturate(phi))
    acc = cp.check_cp(phi, p)
    cap = capacity(phi, p)
    c = cost(phi).cost
    r = verify_scc(phi, p)
    ok = acc and cap == 1 and len(p) >= c and r.cost_bound_holds and r.holds
    assert report(5, ok, f"EQ(2) CP refutation accepted={acc}, lines={len(p)}, capacity={cap}, cost={c}")


def test_c06_pcr_response_maps():
    t = time.perf_counter()
    rng = random.Random(6)
    phi = QCNF((Block(EXISTS, [1, 2, 3, 4]), Block(FORALL, [5, 6, 7, 8])), [])
    n = bad = 0
    while n < 200:
        d = {}
        for _ in range(rng.randint(1, 8)):
            vs = rng.sample(range(1, 9), rng.randint(1, 3))
            m = tuple(sorted(((v if rng.random() < 0.5 else -v), 1) for v in vs))
            d[tuple(sorted(m, key=lambda t: (abs(t[0]), t[0] < 0)))] = rng.choice([1, -1, 2, 3])
        P = Polynomial.make(d)
        line = PCRLine(P)
        if reducible_block(phi, line) is None:
            continue
        n += 1
        g = greedy_response_map(phi, line)
        xv = [v for v in line.vars if v <= 4]
        uv = [v for v in line.vars if v > 4]
        brute = naive_min_range(xv, uv, lambda tau: P.evaluate(tau) == 0)
        if not (audit_response_map(phi, line, g) and brute <= g.range_size <= u_monomial_count(phi, P) <= len(P)):
            bad += 1
    ex = Polynomial.make({((1, 1), (-2, 1)): 1, ((-1, 1), (2, 1)): 1})
    k, _ = min_response_range(QCNF((Block(EXISTS, [1]), Block(FORALL, [2])), []), PCRLine(ex))
    dt = time.perf_counter() - t
    ok = bad == 0 and k == 2 and dt < 60
    assert report(6, ok, f"{n - bad}/{n} lines satisfy brute <= greedy <= monomials; example line range {k}; {dt:.2f}s")


def test_c07_frege():
    rows = []
    for n in (1, 2, 3):
        p = frege_eq_refutation(n)
        rows.append((n, check_semantic(gen_equality(n), p), len(p), 6 * n + 4))
    ranges = {}
    for n in (1, 2, 3, 4):
        L = disj(*(_xor_part(i, n + i) for i in range(1, n + 1)))
        ranges[n] = min_response_range(gen_equality(n), FormulaLine(L))[0]
    ok = all(a and ln <= lim for _, a, ln, lim in rows) and all(ranges[n] == 2**n for n in ranges)
    assert report(7, ok, f"(n, accepted, lines, limit) = {rows}; L-line ranges {ranges}")


def test_c08_completeness():
    phis = [gen_equality(1)] + random_false_qbfs(10, 808)
    good = 0
    for phi in phis:
        assert len(phi.vars) <= 8 and not naive_truth(phi)
        if check_semantic(phi, completeness_refutation(phi, synthesize_winning_forall(phi))):
            good += 1
    assert report(8, good == len(phis), f"{good}/{len(phis)} completeness refutations accepted")


def test_c09_random_family():
    from qbflab.cli import trial_seed

    trials, n = 200, 30
    fracs, ks = [], []
    for t in range(trials):
        _, meta = gen_random_q(n, 3, 45, trial_seed(1, t))
        r = cost_lower_bound_q(meta)
        fracs.append(r.all_false)
        ks.append(r.k / n)
    all_false = sum(fracs) / trials
    mean_k = sum(ks) / trials
    unsat = sum(not solve_2sat(gen_random_2sat(200, 300, s))[0] for s in range(500)) / 500
    parts = [
        (all_false >= C9_ALL_FALSE_MIN, f"all-false fraction {all_false:.3f} (>= {C9_ALL_FALSE_MIN})"),
        (mean_k >= C9_MEAN_K_MIN, f"mean k/n {mean_k:.4f} (>= {C9_MEAN_K_MIN})"),
        (unsat >= C9_UNSAT_MIN, f"2-SAT unsat fraction {unsat:.3f} (>= {C9_UNSAT_MIN})"),
    ]
    ok = all(p for p, _ in parts)
    detail = "; ".join(("ok " if p else "MISS ") + s for p, s in parts)
    report(9, ok, detail)
    assert ok, detail


def test_c10_counting_bound():
    t = time.perf_counter()
    rows, seed = [], 0
    while len(rows) < 30:
        cn = 5 + seed % 2
        phi, meta = gen_random_q(3, 1, cn, seed)
        seed += 1
        r = cost_lower_bound_q(meta)
        if not r.all_false:
            continue
        bound = math.ceil((r.N / (r.N - 1)) ** r.k)
        rows.append((cost(phi).cost, bound))
    dt = time.perf_counter() - t
    ok = all(c >= b for c, b in rows) and dt < 300
    assert report(10, ok, f"{sum(c >= b for c, b in rows)}/30 all-false instances with cost >= bound (seeds 0..{seed - 1}); {dt:.1f}s")


def test_c11_closure():
    rng = random.Random(11)
    passed = total = 0
    # existential restrictions of QU-Res refutations
    for phi in random_false_qbfs(35, 1101):
        p = prove_qures_saturate(phi)
        ev = sorted(phi.exists_vars)
        tau = {v: rng.randint(0, 1) for v in rng.sample(ev, rng.randint(1, len(ev)))}
        r = restrict_proof(phi, p, tau)
        total += 1
        passed += bool(r is not None and check_qures(phi.restrict(tau), r))
    # existential restrictions of semantic refutations
    for phi in random_false_qbfs(35, 1102):
        sem = sem_from_qures(phi, prove_qures_saturate(phi))
        ev = sorted(phi.exists_vars)
        tau = {v: rng.randint(0, 1) for v in rng.sample(ev, rng.randint(1, len(ev)))}
        total += 1
        passed += bool(check_semantic(phi.restrict(tau), restrict_semantic(phi, sem, tau)))
    # eligible universal restrictions
    seed = 1103
    while total < 100:
        for phi in random_false_qbfs(10, seed):
            if total >= 100 or not phi.prefix[0].is_universal:
                continue
            sem = sem_from_qures(phi, prove_qures_saturate(phi))
            f = first_eligible_line(phi, sem)
            line = next(s.line for s in sem.steps if s.id == f)
            U = sorted(phi.prefix[0].vars)
            beta = rng.choice([b for b in assignments(U) if not line.fn().restrict(b).table.any()])
            total += 1
            passed += bool(check_semantic(phi.restrict(beta), restrict_semantic(phi, sem, beta, f)))
        seed += 1
    assert report(11, passed == total, f"{passed}/{total} restricted refutations accepted")


def test_c12_formats():
    fails = []
    formulas = [gen_equality(2), gen_kbkf(2), gen_kbkf_doubled(1), gen_random_q(4, 2, 6, 5)[0], gen_random_12qcnf(3, 6, 12, 7)]
    for phi in formulas:
        text = write_qdimacs(phi)
        if write_qdimacs(parse_qdimacs(text)) != text:
            fails.append("qdimacs")
    for phi in [gen_equality(2), gen_kbkf_weak(1)] + random_false_qbfs(5, 1200):
        for kind, p in _four(phi, prove_qures_saturate(phi)).items():
            w, r = {
                "qures": (write_trace, parse_trace),
                "cp": (cp.write_cp, cp.parse_cp),
                "pcr": (pcr.write_pcr, pcr.parse_pcr),
                "sem": (write_semantic, parse_semantic),
            }[kind]
            text = w(p)
            if w(r(text)) != text:
                fails.append(kind)
    runs = [
        lambda: write_qdimacs(gen_random_q(5, 2, 8, 99)[0]),
        lambda: gen_random_q(5, 2, 8, 99)[1].to_json(),
        lambda: write_qdimacs(gen_random_12qcnf(4, 8, 20, 99)),
        lambda: write_cnf(gen_random_2sat(50, 60, 99), 50),
    ]
    for j, f in enumerate(runs):
        if f() != f():
            fails.append(f"seed-run{j}")
    assert report(12, not fails, f"round-trip and reseed failures: {fails or 'none'}")


def test_proof_size_measure():
    # PCR size is the monomial count, the other systems count lines
    phi = gen_equality(1)
    p = prove_qures_saturate(phi)
    q = pcr.from_qures(phi, p)
    assert proof_size(q) == sum(len(s.poly) for s in q.steps)
    assert proof_size(p) == len(p)
