"""Fusion coefficients, NS5 point fusion, the D5 coefficient lemmas and the
3d mirror symmetry checker."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .char_calc import base_tangent_tgr, chamber_split, standard_chamber, tangent_tgr
from .fixed_points import BCT, enumerate_bcts, epsilon_sign, mirror_point, ns5_resolutions, ns5_sharp
from .stab_matrices import (COSEPARATED, SEPARATED, Report, StabMatrix, family_contexts,
                            stab_tp1_elliptic, stab_tpn, theta_of)
from .theta_engine import (Const, EvalContext, Expr, a, cancel, contexts, evaluate, has_pole, hb,
                           prod, resolve_seed, substitute, swap_mirror, th, variables, z)


# Coefficients -----------------------------------------------------------------------

@dataclass(frozen=True)
class FusionCoefficient:
    kind: str
    i: int
    w: int
    expr: Expr


def _check_index(i: int, w: int) -> None:
    if not 1 <= i <= w:
        raise IndexError(f"index {i} out of range 1..{w}")


def coeff_d(i: int, w: int) -> Expr:
    """prod_{j>i} theta(a_i h / a_j) / theta(a_j / a_i)."""
    _check_index(i, w)
    num = [th(a(i) * hb() / a(j)) for j in range(i + 1, w + 1)]
    den = [th(a(j) / a(i)) for j in range(i + 1, w + 1)]
    return prod(num) / prod(den) if den else Const(1)


def coeff_c(i: int, w: int) -> Expr:
    """(-1)^(w-i) coeff_d(i, w), the value c_i(a, h^-1)."""
    _check_index(i, w)
    return Const((-1) ** (w - i)) * coeff_d(i, w)


def coefficient(kind: str, i: int, w: int) -> FusionCoefficient:
    expr = coeff_d(i, w) if kind == "d" else coeff_c(i, w)
    return FusionCoefficient(kind, i, w, expr)


def d_from_characters(i: int, w: int, ctx: EvalContext) -> complex:
    """theta(N^-_{g_i/Y}) / theta(T_{g_i} Y^h) for Y = T*Gr(w-1, w), g_i omitting slot i."""
    V = [v for v in range(1, w + 1) if v != i]
    _, _, minus = chamber_split(tangent_tgr(w, V), standard_chamber(w))
    return theta_of(minus, ctx) / theta_of(base_tangent_tgr(w, V), ctx)


# Fixed-point labels of the explicit families ------------------------------------------

def tpn_point(n: int, k: int, form: str = SEPARATED) -> BCT:
    """f_k ties Z_1 to A_k (separated) or Z_2 to A_k (co-separated)."""
    single = [1 if j == k - 1 else 0 for j in range(n)]
    rest = [1 - x for x in single]
    return BCT([single, rest] if form == SEPARATED else [rest, single], ncols=n)


def family_points(S: StabMatrix) -> list[BCT]:
    form = COSEPARATED if S.family == "tpn-co-separated" else SEPARATED
    return [tpn_point(S.size, k, form) for k in range(1, S.size + 1)]


def mirror_bijection(points: Sequence[BCT], dual_points: Sequence[BCT]) -> list[int]:
    """Index of f^! = transpose(f) among the dual points."""
    where = {p: i for i, p in enumerate(dual_points)}
    try:
        return [where[mirror_point(p)] for p in points]
    except KeyError as exc:
        raise ValueError(f"no dual point for {exc}") from None


# c_i from T*P^(w-1) envelopes ------------------------------------------------------------

def envelope_c_ratio(i: int, w: int) -> Expr:
    """Stab(f_w)|f_i / Stab(f_i)|f_i of separated T*P^(w-1) at (a^-1, z h^(1-w), z, h)."""
    S = stab_tpn(w, SEPARATED)
    mapping = {f"a{j}": a(j, -1) for j in range(1, w + 1)}
    mapping.update({"z1": z(1) * hb(1 - w), "z2": z(1)})
    num = substitute(S.entries[i - 1][w - 1], mapping, partial=True)
    den = substitute(S.entries[i - 1][i - 1], mapping, partial=True)
    return cancel(num / den)


def envelope_c_sign(i: int, w: int) -> int:
    return epsilon_sign(tpn_point(w, i)) * epsilon_sign(tpn_point(w, w))


# Epsilon ratios by brute force -------------------------------------------------------------

def _compositions(total_max: int, length: int, top: int) -> Iterable[tuple[int, ...]]:
    if length == 0:
        yield ()
        return
    for x in range(1, top + 1):
        for rest in _compositions(total_max, length - 1, top):
            yield (x,) + rest


def separated_diagrams(max_branes: int = 5, max_charge: int = 3):
    """Charge vectors (r, c) of all separated diagrams with positive charges."""
    for m in range(1, max_branes):
        for n in range(1, max_branes - m + 1):
            for r in _compositions(0, m, max_charge):
                for c in _compositions(0, n, max_charge):
                    if sum(r) == sum(c) and enumerate_bcts(r, c):
                        yield r, c


def _row_resolution(f: BCT, row: int, pick: int) -> BCT:
    """Split ``row`` into (w-1, 1) putting its pick-th tie (1-based) on the new lower row."""
    cols = [j for j, x in enumerate(f[row]) if x]
    j = cols[pick - 1]
    upper = tuple(x if c != j else 0 for c, x in enumerate(f[row]))
    lower = tuple(1 if c == j else 0 for c in range(f.n))
    return BCT(f[:row] + (upper, lower) + f[row + 1:], ncols=f.n)


def epsilon_ratio_check(max_branes: int = 5, max_charge: int = 3) -> Report:
    """eps(f) eps(g) / (eps(f_w) eps(g_i)) = (-1)^(w-i) over all (X, Z, f, g, i)."""
    cases = failures = 0
    observed: dict[tuple[int, int], set[int]] = {}
    for r, c in separated_diagrams(max_branes, max_charge):
        points = enumerate_bcts(r, c)
        for row, w in enumerate(r):
            if w < 2:
                continue
            for f in points:
                f_w = _row_resolution(f, row, w)
                if f_w != ns5_sharp(f, row, w - 1, 1, SEPARATED):
                    failures += 1
                for g in points:
                    for i in range(1, w + 1):
                        g_i = _row_resolution(g, row, i)
                        assert g_i in ns5_resolutions(g, row, w - 1, 1)
                        ratio = (epsilon_sign(f) * epsilon_sign(g)
                                 * epsilon_sign(f_w) * epsilon_sign(g_i))
                        observed.setdefault((i, w), set()).add(ratio)
                        cases += 1
                        if ratio != (-1) ** (w - i):
                            failures += 1
    return Report("epsilon-ratios", failures == 0, float(failures),
                  {"cases": cases, "observed": {f"{i},{w}": sorted(s)
                                                for (i, w), s in sorted(observed.items())}})


def d5_lemma_chain_check(w: int, count: int = 10, seed: int | None = None, tol: float = 1e-10,
                         max_branes: int = 5, max_charge: int = 3,
                         signs: Report | None = None) -> Report:
    """Full chain: eps-ratio * c_i = d_i for i = 1..w."""
    if w < 1:
        raise ValueError("w must be positive")
    signs = signs or epsilon_ratio_check(max_branes, max_charge)
    observed = signs.details["observed"]
    worst = 0.0
    bad = []
    for i in range(1, w + 1):
        d, c = coeff_d(i, w), coeff_c(i, w)
        ratio2 = envelope_c_ratio(i, w)
        sign2 = envelope_c_sign(i, w)
        eps = observed.get(f"{i},{w}", [(-1) ** (w - i)])
        if len(eps) != 1:
            bad.append({"i": i, "reason": "epsilon ratio not constant", "observed": eps})
            continue
        for ctx in family_contexts(count, w, seed):
            dv, cv = evaluate(d, ctx), evaluate(c, ctx)
            errs = {
                "d_vs_characters": abs(dv - d_from_characters(i, w, ctx)),
                "c_vs_envelopes": abs(cv - sign2 * evaluate(ratio2, ctx)),
                "c_vs_d": abs(cv - (-1) ** (w - i) * dv),
                "chain": abs(eps[0] * cv - dv),
            }
            scale = max(1.0, abs(dv))
            for name, err in errs.items():
                err /= scale
                worst = max(worst, err)
                if err > tol:
                    bad.append({"i": i, "identity": name, "error": err})
    ok = not bad and signs.ok
    return Report("d5-lemmas", ok, worst, {"w": w, "failures": bad[:20],
                                           "sign_cases": signs.details["cases"]})


# NS5 point fusion --------------------------------------------------------------------------

def ns5_point_fusion_check(n: int, shift_sign: int = 1, count: int = 10,
                           seed: int | None = None, tol: float = 1e-9) -> Report:
    """Point variety /n\\n-1\\...\\1\\ against separated T*P^(n-1), split n = 1 + (n-1).

    For each candidate sharp point, Stab(candidate) is specialised at
    z'' = z' h^(shift_sign * w') with w' = 1, and
    sum_g theta(N^-_g)/theta(T_g Y^h) * Stab(candidate)|_g / Stab(g)|_g is compared
    with 1. A candidate whose specialisation hits a pole is rejected.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    w1 = 1
    S = stab_tpn(n, SEPARATED)
    chamber = standard_chamber(n)
    ctxs = family_contexts(count, n, seed)
    residuals: dict[int, float] = {}
    for cand in range(n):
        entries = [substitute(S.entries[k][cand], {"z2": z(1) * hb(shift_sign * w1)}, partial=True)
                   for k in range(n)]
        if any(has_pole(e) for e in entries):
            residuals[cand] = float("inf")
            continue
        entries = [cancel(e) for e in entries]
        worst = 0.0
        for ctx in ctxs:
            total = 0j
            for k in range(n):
                _, _, minus = chamber_split(tangent_tgr(n, [k + 1]), chamber)
                coeff = theta_of(minus, ctx) / theta_of(base_tangent_tgr(n, [k + 1]), ctx)
                total += coeff * evaluate(entries[k], ctx) / theta_of(minus, ctx)
            worst = max(worst, abs(total - 1))
        residuals[cand] = worst
    survivors = [k for k, v in residuals.items() if v <= tol]
    sharp = ns5_sharp(BCT([[1] * n], ncols=n), 0, 1, n - 1, SEPARATED)
    sharp_label = tpn_point_labels(n).index(sharp)
    ok = survivors == [sharp_label]
    # best residual over all candidates; poles are reported as null
    best = min(residuals.values())
    return Report("ns5-fusion", ok, best,
                  {"n": n, "shift_sign": shift_sign, "survivors": [s + 1 for s in survivors],
                   "ns5_sharp": sharp_label + 1,
                   "residuals": {str(k + 1): (v if v != float("inf") else None)
                                 for k, v in residuals.items()}})


def tpn_point_labels(n: int) -> list[BCT]:
    return [tpn_point(n, k) for k in range(1, n + 1)]


# Mirror symmetry --------------------------------------------------------------------------

def normalized(M: np.ndarray) -> np.ndarray:
    """[g][f] = Stab(f)|_g / Stab(g)|_g."""
    return M / np.diag(M)[:, None]


def mirror_check(S_X: StabMatrix, S_dual: StabMatrix, bijection: Sequence[int],
                 signs: Sequence[int], a_to_z: Mapping[int, int] | None = None,
                 z_to_a: Mapping[int, int] | None = None,
                 ctxs: Sequence[EvalContext] | None = None, tol: float = 1e-9,
                 count: int = 10, seed: int | None = None) -> Report:
    """Stab(f)|g/Stab(g)|g (a,z,h) = eps(f) eps(g) Stab(g!)|f!/Stab(f!)|f! (z,a,1/h).

    ``a_to_z`` maps the dual's a-slots to this side's z-slots and ``z_to_a`` the
    dual's z-slots to this side's a-slots (identity by default).
    """
    size = S_X.size
    if S_dual.size != size or sorted(bijection) != list(range(size)):
        raise ValueError("incompatible sizes or bijection")
    n_a_dual, n_z_dual = S_dual.size, S_dual.n_z
    if S_dual.family == "tp1":
        n_a_dual = 2
    swapped = [[swap_mirror(e, n_a_dual, n_z_dual, a_to_z, z_to_a) for e in row]
               for row in S_dual.entries]
    ctxs = ctxs or family_contexts(count, max(size, 2), seed)
    dev = np.zeros((size, size))
    for ctx in ctxs:
        lhs = normalized(S_X.evaluate(ctx))
        rhs_raw = np.array([[evaluate(e, ctx) for e in row] for row in swapped])
        rhs_n = normalized(rhs_raw)
        for g in range(size):
            for f in range(size):
                rhs = signs[f] * signs[g] * rhs_n[bijection[f], bijection[g]]
                err = abs(lhs[g, f] - rhs) / max(1.0, abs(lhs[g, f]))
                dev[g, f] = max(dev[g, f], err)
    worst = float(dev.max())
    return Report("mirror", worst <= tol, worst,
                  {"bijection": [b + 1 for b in bijection], "signs": list(signs),
                   "deviation": dev.tolist()})


def mirror_check_family(family: str = "tp1", count: int = 10, seed: int | None = None,
                        tol: float = 1e-9, swap_roles: bool = False) -> Report:
    """tp1: the intro matrices against themselves with f1 <-> f2.
    tpn: separated against co-separated T*P^1, the dual diagrams /1/2\\1\\ and \\1\\2/1/."""
    if family == "tp1":
        S, D = stab_tp1_elliptic((1, 2)), stab_tp1_elliptic((1, 2))
        points = [tpn_point(2, k) for k in (1, 2)]
        dual_points = [tpn_point(2, k, COSEPARATED) for k in (1, 2)]
    elif family == "tpn":
        S, D = stab_tpn(2, SEPARATED), stab_tpn(2, COSEPARATED)
        points, dual_points = family_points(S), family_points(D)
    else:
        raise ValueError(f"unknown mirror family {family!r}")
    if swap_roles:
        S, D = D, S
        points, dual_points = dual_points, points
    bijection = mirror_bijection(points, dual_points)
    signs = [epsilon_sign(p) for p in points]
    report = mirror_check(S, D, bijection, signs, count=count, seed=seed, tol=tol)
    report.details["family"] = family
    return report


def intro_cross_ratio() -> Expr:
    """theta(a1/a2 z1/z2) theta(h) / (theta(a1/a2) theta(z1/z2))."""
    x, y = a(1) / a(2), z(1) / z(2)
    return th(x * y) * th(hb()) / (th(x) * th(y))


def intro_mirror_check(count: int = 100, seed: int | None = None, tol: float = 1e-10) -> Report:
    e = intro_cross_ratio()
    swapped = swap_mirror(e, 2, 2)
    worst = 0.0
    for ctx in family_contexts(count, 2, seed):
        v, w = evaluate(e, ctx), evaluate(swapped, ctx)
        worst = max(worst, abs(w + v) / max(1.0, abs(v)))
    return Report("intro-mirror", worst <= tol, worst, {"contexts": count})


def zero_charge_check(count: int = 10, seed: int | None = None, trials: int = 3) -> Report:
    """Mirror deviations of the T*P^1 family are unchanged when the Kahler variable
    of an extra charge-zero NS5 brane (slot z3) is resampled; the one-point family
    /1/1\\, whose second NS5 has charge zero, has envelope 1 for every z2."""
    S = stab_tp1_elliptic((1, 2))
    points = [tpn_point(2, k) for k in (1, 2)]
    dual_points = [tpn_point(2, k, COSEPARATED) for k in (1, 2)]
    bijection = mirror_bijection(points, dual_points)
    signs = [epsilon_sign(p) for p in points]
    base = contexts(count, 2, 3, seed=seed)
    rng = np.random.default_rng(resolve_seed(seed) + 1)
    reference = mirror_check(S, S, bijection, signs, ctxs=base).details["deviation"]
    spread = 0.0
    for _ in range(trials):
        moved = [c.with_logs({"z3": complex(rng.uniform(-0.2, 0.2), rng.uniform(-3, 3))})
                 for c in base]
        dev = mirror_check(S, S, bijection, signs, ctxs=moved).details["deviation"]
        spread = max(spread, float(np.max(np.abs(np.array(dev) - np.array(reference)))))
    point = stab_tpn(1, SEPARATED)
    constant = all(variables(cancel(e)) <= {"h"} for row in point.entries for e in row)
    return Report("zero-charge", spread == 0.0 and constant, spread,
                  {"trials": trials, "point_envelope_z_free": constant})
