"""Acceptance criteria 1-14. Each test records one PASS/FAIL line; the lines are
printed in the terminal summary, or directly when run as a script."""

import math
import random
import time
from collections import deque
from itertools import product

import numpy as np

from bowlab.brane_core import (charges, dimension, dualize, format_diagram, hw_move, legal_moves,
                               normalize, parse)
from bowlab.fixed_points import BCT, count_bcts, crossings, enumerate_bcts, epsilon_sign, margins
from bowlab.fusion_mirror import (d5_lemma_chain_check, intro_mirror_check, epsilon_ratio_check,
                                  mirror_check_family, ns5_point_fusion_check)
from bowlab.line_calculus import random_hw_trials
from bowlab.stab_matrices import (COSEPARATED, SEPARATED, duality_check, envelope_section_check,
                                  family_contexts, sigma_equivariance_check, stab_tp1_elliptic,
                                  stab_tpn, tp1_printed_restrictions, yang_check, ybe_check)
from bowlab.theta_engine import EvalContext, evaluate, resolve_seed, theta

BIG = "/1/2\\2/2/3\\3\\3/2\\2/1\\1/"
SEED = resolve_seed(None)
RESULTS: dict[int, str] = {}


def record(number: int, title: str, ok: bool, detail: str, started: float) -> None:
    line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail} [{time.perf_counter() - started:.2f}s]"
    RESULTS[number] = line
    print(line)


def test_criterion_01_fixed_point_count():
    t0 = time.perf_counter()
    D = parse(BIG)
    r, c = margins(D)
    rd, cd = margins(dualize(D))
    counts = (len(enumerate_bcts(r, c)), count_bcts(r, c), len(enumerate_bcts(rd, cd)), count_bcts(rd, cd))
    elapsed = time.perf_counter() - t0
    ok = counts == (1055,) * 4 and elapsed <= 1.0
    record(1, "fixed-point count", ok, f"counts={counts}", t0)
    assert ok


def test_criterion_02_dimensions():
    t0 = time.perf_counter()
    dims = (dimension(parse(BIG)), dimension(dualize(parse(BIG))))
    ok = dims == (16, 22)
    record(2, "dimensions", ok, f"{dims}", t0)
    assert ok


def hw_connected(start, target, limit=20000):
    seen = {start}
    queue = deque([start])
    while queue and len(seen) < limit:
        D = queue.popleft()
        if D == target:
            return True
        for site in legal_moves(D):
            E = hw_move(D, site)
            if E not in seen:
                seen.add(E)
                queue.append(E)
    return False


def test_criterion_03_hw_normalization():
    t0 = time.perf_counter()
    src, dst = parse("/1/3/3\\1\\"), parse("/1\\1/2\\2/")
    N = normalize(src)
    ok = hw_connected(N, dst) and charges(N) == charges(dst) == charges(src)
    ok = ok and normalize(dst) == src
    record(3, "HW normalization", ok, f"{format_diagram(N)} ~ {format_diagram(dst)}", t0)
    assert ok


def test_criterion_04_qform_hw_invariance():
    t0 = time.perf_counter()
    reports = random_hw_trials(500, seed=SEED)
    bad = [r for r in reports if not r.delta.is_zero()]
    ok = len(reports) == 500 and not bad and all(r.ok for r in reports)
    record(4, "Q(alpha)+QU HW invariance", ok, f"{len(reports)} moves, {len(bad)} nonzero deltas", t0)
    assert ok


def test_criterion_05_section_membership():
    t0 = time.perf_counter()
    results = [envelope_section_check(stab_tpn(n, form), q, strict=True)
               for n in range(2, 6) for form in (SEPARATED, COSEPARATED) for q in range(n)]
    ok = all(results)
    record(5, "section membership", ok, f"{sum(results)}/{len(results)} envelopes", t0)
    assert ok


def test_criterion_06_intro_table():
    t0 = time.perf_counter()
    worst, zeros = 0.0, 0
    for chamber in ((1, 2), (2, 1)):
        S = stab_tp1_elliptic(chamber)
        printed = tp1_printed_restrictions(chamber)
        for ctx in family_contexts(100, 2, seed=SEED):
            M = S.evaluate(ctx)
            for p in range(2):
                for q in range(2):
                    ref = evaluate(printed[p][q], ctx)
                    if ref == 0:
                        err = abs(M[p, q])
                    else:
                        err = abs(M[p, q] - ref) / abs(ref)
                    worst = max(worst, err)
        zeros += sum(evaluate(e, family_contexts(1, 2, seed=SEED)[0]) == 0 for row in printed for e in row)
    ok = worst <= 1e-10 and zeros == 2
    record(6, "T*P^1 intro table", ok, f"8 entries x 100 contexts, max rel err {worst:.2e}", t0)
    assert ok


def test_criterion_07_intro_mirror_identity():
    t0 = time.perf_counter()
    rep = intro_mirror_check(count=100, seed=SEED, tol=1e-10)
    record(7, "intro mirror identity", rep.ok, f"max err {rep.max_error:.2e}", t0)
    assert rep.ok


def test_criterion_08_yang():
    t0 = time.perf_counter()
    rep = yang_check(count=100, seed=SEED, tol=1e-12)
    record(8, "Yang's R-matrix", rep.ok, f"max err {rep.max_error:.2e}", t0)
    assert rep.ok


def test_criterion_09_duality():
    t0 = time.perf_counter()
    reps = [duality_check(n, form, count=10, seed=SEED, tol=1e-9)
            for n in (2, 3, 4) for form in (SEPARATED, COSEPARATED)]
    ok = all(r.ok for r in reps)
    record(9, "duality inversion", ok, f"max rel err {max(r.max_error for r in reps):.2e}", t0)
    assert ok


def test_criterion_10_mirror():
    t0 = time.perf_counter()
    rep = mirror_check_family("tpn", count=10, seed=SEED, tol=1e-9)
    pairs = len(rep.details["deviation"]) ** 2
    ok = rep.ok and pairs == 4
    record(10, "mirror symmetry", ok, f"{pairs} pairs, signs {rep.details['signs']}, max err {rep.max_error:.2e}", t0)
    assert ok


def test_criterion_11_ns5_fusion():
    t0 = time.perf_counter()
    good = [ns5_point_fusion_check(n, 1, count=10, seed=SEED, tol=1e-9) for n in range(2, 6)]
    bad = [ns5_point_fusion_check(n, -1, count=10, seed=SEED, tol=1e-9) for n in range(2, 6)]
    ok = all(r.ok and r.max_error <= 1e-9 for r in good)
    ok = ok and all(not r.ok and r.max_error >= 1e-2 for r in bad)
    record(11, "NS5 point fusion", ok,
           f"residual {max(r.max_error for r in good):.2e}, control gap {min(r.max_error for r in bad):.2e}", t0)
    assert ok


def test_criterion_12_coefficient_lemmas():
    t0 = time.perf_counter()
    signs = epsilon_ratio_check(max_branes=5, max_charge=3)
    reps = [d5_lemma_chain_check(w, count=10, seed=SEED, tol=1e-10, signs=signs) for w in range(1, 6)]
    ok = signs.ok and all(r.ok for r in reps)
    record(12, "coefficient lemmas", ok,
           f"{signs.details['cases']} sign cases, max err {max(r.max_error for r in reps):.2e}", t0)
    assert ok


def test_criterion_13_ybe():
    t0 = time.perf_counter()
    reps = [ybe_check(f, count=10, seed=SEED, tol=1e-8, exact_tol=1e-12)
            for f in ("tpn-separated", "tpn-co-separated")]
    ok = all(r.ok for r in reps)
    record(13, "dynamical YBE on T*P^2", ok,
           f"residual {max(r.details['ybe_residual'] for r in reps):.2e}, "
           f"path {max(r.details['path_independence'] for r in reps):.2e}", t0)
    assert ok


def _theta_properties(rng) -> float:
    worst = 0.0
    for _ in range(200):
        q = rng.uniform(0.05, 0.5)
        ctx = EvalContext({}, math.log(q))
        lx = complex(rng.uniform(-0.3, 0.3), rng.uniform(-math.pi, math.pi))
        v = theta(lx, ctx)
        worst = max(worst, abs(theta(-lx, ctx) + v) / max(1.0, abs(v)))
        expected = -np.exp(-math.log(q) / 2 - lx) * v
        worst = max(worst, abs(theta(lx + math.log(q), ctx) - expected) / max(1.0, abs(expected)))
    return worst


def _bct_counting(rng) -> bool:
    # every margin pair up to 3x3, then sampled margins up to 6x6
    for m, n in product(range(1, 4), repeat=2):
        for r in product(range(n + 1), repeat=m):
            for c in product(range(m + 1), repeat=n):
                if len(enumerate_bcts(r, c)) != count_bcts(r, c):
                    return False
    for _ in range(300):
        m, n = rng.randint(1, 6), rng.randint(1, 6)
        r = [rng.randint(0, n) for _ in range(m)]
        c = [rng.randint(0, m) for _ in range(n)]
        if sum(r) != sum(c):
            c[-1] += sum(r) - sum(c)
            if not 0 <= c[-1] <= m:
                continue
        if len(enumerate_bcts(r, c)) != count_bcts(r, c):
            return False
    return True


def _epsilon_transpose() -> int:
    checked = 0
    for m, n in product(range(1, 5), repeat=2):
        for bits in product((0, 1), repeat=m * n):
            f = BCT([bits[i * n:(i + 1) * n] for i in range(m)], ncols=n)
            if epsilon_sign(f) != epsilon_sign(f.transpose()) or crossings(f) != crossings(f.transpose()):
                return -1
            checked += 1
    return checked


def test_criterion_14_property_suites():
    t0 = time.perf_counter()
    rng = random.Random(SEED)
    theta_err = _theta_properties(np.random.default_rng(SEED))
    counting = _bct_counting(rng)
    eps = _epsilon_transpose()
    sigma = [sigma_equivariance_check(n, form, count=2, seed=SEED)
             for n in (2, 3, 4) for form in (SEPARATED, COSEPARATED)]
    ok = theta_err <= 1e-10 and counting and eps > 0 and all(r.ok for r in sigma)
    record(14, "property suites", ok,
           f"theta {theta_err:.1e}, counting {counting}, eps on {eps} tables, "
           f"sigma {max(r.max_error for r in sigma):.1e}", t0)
    assert ok


if __name__ == "__main__":
    for name, func in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                func()
            except AssertionError:
                pass
