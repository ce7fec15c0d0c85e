"""Elliptic stable-envelope restriction matrices for T*P^1 and T*P^(n-1).

Matrices are indexed by fixed-point label: ``entries[p][q]`` is the
restriction of Stab(f_q) to f_p, both 0-based. A chamber is a permutation
listing a-slots from smallest to largest; chamber order only enters through
:meth:`StabMatrix.order`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations
from typing import Callable, Mapping, Sequence

import numpy as np

from .brane_core import charges, parse
from .char_calc import (Character, chamber_split, mon, restrict_tpn,
                        tangent_tpn)
from .line_calculus import QForm, required_form, section_check
from .theta_engine import (Const, EvalContext, EvaluationError, Expr, Mono, a, contexts,
                           evaluate, hb, prod, resolve_seed, substitute, th, theta, theta_factors, var, z)

T = var("t")
SEPARATED, COSEPARATED = "separated", "co-separated"
FAMILIES = ("tp1", "tpn-separated", "tpn-co-separated")


def tpn_diagram(n: int, form: str = SEPARATED) -> str:
    """/1/n\\n-1\\...\\1\\ or \\1\\2\\...\\n/1/."""
    if form == SEPARATED:
        return "/1/" + "".join(f"{k}\\" for k in range(n, 0, -1))
    return "\\" + "".join(f"{k}\\" for k in range(1, n)) + f"{n}/1/"


def family_charges(family: str, n: int = 2) -> tuple[int, ...]:
    if family == "tp1":
        return charges(parse(tpn_diagram(2))).r
    form = SEPARATED if family == "tpn-separated" else COSEPARATED
    return charges(parse(tpn_diagram(n, form))).r


# Printed formulas --------------------------------------------------------------

def tp1_stab_expr(chamber: Sequence[int], k: int) -> Expr:
    """Intro T*P^1 elliptic envelope of f_k (1-based) in chamber (1,2)=C1 or (2,1)=C2."""
    zz = z(1) / z(2)
    h = hb()
    if tuple(chamber) == (1, 2):
        if k == 1:
            return th(T / a(1) / h * zz) * th(T / a(2)) / th(zz / h)
        return th(T / a(2) * zz) * th(a(1) / T * h) / th(zz)
    if tuple(chamber) == (2, 1):
        if k == 1:
            return th(T / a(1) * zz) * th(a(2) / T * h) / th(zz)
        return th(T / a(2) / h * zz) * th(T / a(1)) / th(zz / h)
    raise ValueError(f"T*P^1 chambers are (1,2) and (2,1), got {chamber}")


def tp1_printed_restrictions(chamber: Sequence[int]) -> list[list[Expr]]:
    """The printed fixed-point restrictions, [point][envelope]."""
    zz = z(1) / z(2)
    h = hb()
    zero = Const(0)
    if tuple(chamber) == (1, 2):
        return [[th(a(1) / a(2)), th(a(1) / a(2) * zz) * th(h) / th(zz)],
                [zero, th(a(1) / a(2) * h)]]
    return [[th(a(2) / a(1) * h), zero],
            [th(a(2) / a(1) * zz) * th(h) / th(zz), th(a(2) / a(1))]]


def tp1_restriction(k: int) -> Mono:
    """Intro presentation restricts t to a_k."""
    return a(k)


def tpn_stab_expr(n: int, k: int, form: str = SEPARATED) -> Expr:
    """Standard-chamber envelope of f_k (1-based) as an expression in t."""
    zz = z(1) / z(2)
    h = hb()
    if form == SEPARATED:
        left = [th(a(i) / T) for i in range(1, k)]
        mid = th(T / a(k) * zz * h ** (k - 1)) / th(zz * h ** (k - 2))
        right = [th(T / a(i) * h) for i in range(k + 1, n + 1)]
    elif form == COSEPARATED:
        left = [th(a(i) / T * h ** 2) for i in range(1, k)]
        mid = th(T / a(k) * zz * h ** (k - 3)) / th(zz * h ** (k - 2))
        right = [th(T / a(i) / h) for i in range(k + 1, n + 1)]
    else:
        raise ValueError(f"unknown form {form!r}")
    return prod(left + [mid] + right)


def relabel(e: Expr, sigma: Sequence[int]) -> Expr:
    """Substitute a_i -> a_sigma(i)."""
    return substitute(e, {f"a{i}": a(s) for i, s in enumerate(sigma, start=1)}, partial=True)


def _inverse(sigma: Sequence[int]) -> list[int]:
    inv = [0] * len(sigma)
    for k, s in enumerate(sigma, start=1):
        inv[s - 1] = k
    return inv


def check_chamber(chamber: Sequence[int], n: int) -> tuple[int, ...]:
    chamber = tuple(int(x) for x in chamber)
    if sorted(chamber) != list(range(1, n + 1)):
        raise ValueError(f"chamber must be a permutation of 1..{n}, got {chamber}")
    return chamber


# The matrix type ---------------------------------------------------------------

@dataclass(frozen=True)
class StabMatrix:
    family: str
    chamber: tuple[int, ...]
    entries: tuple[tuple[Expr, ...], ...]
    r: tuple[int, ...]
    envelopes: tuple[Expr, ...] = field(default=(), compare=False)
    restrictions: tuple[Mono, ...] = field(default=(), compare=False)

    @property
    def size(self) -> int:
        return len(self.entries)

    @property
    def n_z(self) -> int:
        return len(self.r)

    def order(self) -> tuple[int, ...]:
        """Fixed-point labels (0-based) in attracting order: the chamber read as labels."""
        return tuple(s - 1 for s in self.chamber)

    def negative_normal(self, p: int) -> Character:
        _, _, minus = chamber_split(tangent_tpn(self.size, p + 1), self.chamber)
        return minus

    def evaluate(self, ctx: EvalContext) -> np.ndarray:
        return np.array([[evaluate(e, ctx) for e in row] for row in self.entries], dtype=complex)

    def chamber_view(self, ctx: EvalContext) -> np.ndarray:
        """Entries re-indexed by chamber order: row j, column k = Stab(f_sigma(k))|f_sigma(j)."""
        M = self.evaluate(ctx)
        idx = list(self.order())
        return M[np.ix_(idx, idx)]

    def with_entry(self, p: int, q: int, e: Expr) -> "StabMatrix":
        rows = [list(row) for row in self.entries]
        rows[p][q] = e
        return StabMatrix(self.family, self.chamber, tuple(map(tuple, rows)), self.r,
                          self.envelopes, self.restrictions)

    def to_json(self, ctx: EvalContext | None = None) -> dict:
        out = {"family": self.family, "chamber": list(self.chamber), "size": self.size,
               "r": list(self.r)}
        if ctx is None:
            out["entries"] = [[str(e) for e in row] for row in self.entries]
        else:
            M = self.evaluate(ctx)
            out["entries"] = [[[float(x.real), float(x.imag)] for x in row] for row in M]
        return out


def _assemble(family: str, chamber: tuple[int, ...], envelopes: Sequence[Expr],
              restrictions: Sequence[Mono], r: tuple[int, ...]) -> StabMatrix:
    entries = tuple(tuple(substitute(env, {"t": res}, partial=True) for env in envelopes)
                    for res in restrictions)
    return StabMatrix(family, chamber, entries, r, tuple(envelopes), tuple(restrictions))


def stab_tp1_elliptic(chamber: Sequence[int] | str = (1, 2)) -> StabMatrix:
    if isinstance(chamber, str):
        chamber = {"C1": (1, 2), "C2": (2, 1)}[chamber.upper()]
    chamber = check_chamber(chamber, 2)
    envs = [tp1_stab_expr(chamber, k) for k in (1, 2)]
    return _assemble("tp1", chamber, envs, [tp1_restriction(1), tp1_restriction(2)],
                     family_charges("tp1"))


def stab_tpn(n: int, form: str = SEPARATED, chamber: Sequence[int] | None = None) -> StabMatrix:
    """Envelopes in chamber sigma: Stab(f_sigma(k)) = formula_k with a_i -> a_sigma(i)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    sigma = check_chamber(chamber or range(1, n + 1), n)
    inv = _inverse(sigma)
    envs = [relabel(tpn_stab_expr(n, inv[q], form), sigma) for q in range(n)]
    res = [restrict_tpn(n, p + 1, form).to_mono() * T ** 0 for p in range(n)]
    family = "tpn-separated" if form == SEPARATED else "tpn-co-separated"
    return _assemble(family, sigma, envs, res, family_charges(family, n))


def build(family: str, n: int = 2, chamber: Sequence[int] | None = None) -> StabMatrix:
    if family == "tp1":
        return stab_tp1_elliptic(chamber or (1, 2))
    if family == "tpn-separated":
        return stab_tpn(n, SEPARATED, chamber)
    if family == "tpn-co-separated":
        return stab_tpn(n, COSEPARATED, chamber)
    raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")


def family_size(family: str, n: int) -> int:
    return 2 if family == "tp1" else n


def theta_of(chi: Character, ctx: EvalContext) -> complex:
    value = 1 + 0j
    for m, k in chi.items():
        value *= theta(m.to_mono().log(ctx), ctx) ** k
    return value


def family_contexts(count: int, n: int, seed: int | None = None, **kw) -> list[EvalContext]:
    return contexts(count, n, 2, seed=seed, **kw)


# Axioms ------------------------------------------------------------------------

@dataclass
class Report:
    name: str
    ok: bool
    max_error: float = 0.0
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"check": self.name, "ok": self.ok, "max_error": self.max_error,
                "details": self.details}


def _scale(M: np.ndarray) -> float:
    return max(1.0, float(np.max(np.abs(M))))


def family_form(S: StabMatrix, q: int) -> QForm:
    """Required quadratic form of the envelope of f_q (0-based)."""
    n = S.size
    if S.family == "tpn-separated":
        qa = sum((QForm.square(T / a(i) * hb()) for i in range(1, n + 1)), QForm())
        qu = QForm.product(T, z(1) / z(2) / hb(), 2)
    elif S.family == "tpn-co-separated":
        qa = sum((QForm.square(a(i) / T * hb() ** 2) for i in range(1, n + 1)), QForm())
        qu = QForm.product(T, z(1) / z(2) * hb() ** (n - 1), 2)
    else:
        # the intro presentation restricts t to a_k, i.e. t is shifted by h
        qa = sum((QForm.square(T / a(i)) for i in (1, 2)), QForm())
        qu = QForm.product(T, z(1) / z(2) / hb(), 2)
    normal = [m.to_mono() for m, k in S.negative_normal(q).items() for _ in range(k)]
    return required_form(qa + qu, "t", S.restrictions[q], normal)


def envelope_section_check(S: StabMatrix, q: int, strict: bool = False) -> bool:
    """Does Stab(f_q) have the quadratic form of Q(alpha)+QU at its own point?"""
    env = S.envelopes[q]
    # family_form uses the chamber only through N^-; the formula is relabeled in a-slots
    return section_check(env, family_form(S, q), strict)


def axioms_check(S: StabMatrix, ctxs: Sequence[EvalContext] | None = None,
                 tol: float = 1e-10, sections: bool = True) -> Report:
    """Support (triangularity in chamber order), diagonal = theta(N^-), sections."""
    ctxs = ctxs or family_contexts(10, S.size)
    order = S.order()
    rank = {p: i for i, p in enumerate(order)}
    bad: list[dict] = []
    worst = 0.0
    for ctx in ctxs:
        M = S.evaluate(ctx)
        scale = _scale(M)
        for p in range(S.size):
            for q in range(S.size):
                if rank[p] > rank[q]:
                    err = abs(M[p, q]) / scale
                    kind = "support"
                elif p == q:
                    expected = theta_of(S.negative_normal(p), ctx)
                    err = abs(M[p, p] - expected) / max(1.0, abs(expected))
                    kind = "diagonal"
                else:
                    continue
                worst = max(worst, err)
                if err > tol:
                    bad.append({"point": p, "envelope": q, "axiom": kind, "error": err})
    if sections and S.envelopes:
        for q in range(S.size):
            if not envelope_section_check(S, q):
                bad.append({"point": q, "envelope": q, "axiom": "section", "error": None})
    unique = {(b["point"], b["envelope"], b["axiom"]): b for b in bad}
    return Report("axioms", not bad, worst, {"violations": list(unique.values())})


# Duality, R-matrices -----------------------------------------------------------

def shift_kahler(e: Expr, r: Sequence[int], shifts: Sequence[int] | None = None,
                 invert: bool = False) -> Expr:
    """z_i -> z_i^(+-1) h^(shift_i)."""
    shifts = shifts if shifts is not None else [0] * len(r)
    mapping = {f"z{i}": z(i, -1 if invert else 1) * hb(s) for i, s in enumerate(shifts, start=1)}
    return substitute(e, mapping, partial=True)


def dual_kahler(S: StabMatrix) -> StabMatrix:
    """The matrix at Kahler arguments z_i^-1 h^(r_i)."""
    entries = tuple(tuple(shift_kahler(e, S.r, S.r, invert=True) for e in row)
                    for row in S.entries)
    return StabMatrix(S.family, S.chamber, entries, S.r)


def opposite(chamber: Sequence[int]) -> tuple[int, ...]:
    return tuple(reversed(tuple(chamber)))


def tangent_theta(S: StabMatrix, ctx: EvalContext) -> np.ndarray:
    return np.array([theta_of(tangent_tpn(S.size, p + 1), ctx) for p in range(S.size)])


def duality_check(n: int, form: str = SEPARATED, count: int = 10, seed: int | None = None,
                  tol: float = 1e-9, chamber: Sequence[int] | None = None) -> Report:
    """S_C^-1 = S_Copp(a, z^-1 h^r, h)^T diag(1/theta(T_f X))."""
    S = stab_tpn(n, form, chamber)
    Sopp = dual_kahler(stab_tpn(n, form, opposite(S.chamber)))
    worst = 0.0
    identity_err = 0.0
    for ctx in family_contexts(count, n, seed):
        M = S.evaluate(ctx)
        if np.linalg.cond(M) > 1e8:
            continue
        inv = np.linalg.inv(M)
        rhs = Sopp.evaluate(ctx).T / tangent_theta(S, ctx)[None, :]
        worst = max(worst, float(np.max(np.abs(inv - rhs)) / _scale(inv)))
        identity_err = max(identity_err, float(np.max(np.abs(M @ rhs - np.eye(n)))))
    return Report("duality", worst <= tol, worst, {"n": n, "form": form,
                                                   "identity_error": identity_err})


def r_matrix_values(S: StabMatrix, S2: StabMatrix, ctx: EvalContext) -> np.ndarray:
    """R with S_C' = S_C R; entry [g][f] is the coefficient of Stab_C(g) in Stab_C'(f)."""
    return np.linalg.solve(S.evaluate(ctx), S2.evaluate(ctx))


def r_matrix(family: str, n: int, C: Sequence[int], C2: Sequence[int],
             ctx: EvalContext) -> np.ndarray:
    return r_matrix_values(build(family, n, C), build(family, n, C2), ctx)


def localized_relation_error(family: str, n: int, C: Sequence[int], C2: Sequence[int],
                             ctx: EvalContext) -> float:
    """sum_g Stab_C(g)|_h R_gf = Stab_C'(f)|_h, checked on the assembled matrices."""
    S, S2 = build(family, n, C).evaluate(ctx), build(family, n, C2).evaluate(ctx)
    R = np.linalg.solve(S, S2)
    return float(np.max(np.abs(S @ R - S2)) / _scale(S2))


def r_symmetry_check(n: int, form: str = SEPARATED, count: int = 10, seed: int | None = None,
                     tol: float = 1e-9) -> Report:
    """(R_{C,Copp})_{fg}(z) = (R_{C,Copp})_{gf}(z^-1 h^r)."""
    family = "tpn-separated" if form == SEPARATED else "tpn-co-separated"
    S = stab_tpn(n, form)
    Sopp = stab_tpn(n, form, opposite(S.chamber))
    Sd, Soppd = dual_kahler(S), dual_kahler(Sopp)
    worst = 0.0
    for ctx in family_contexts(count, n, seed):
        R = r_matrix_values(S, Sopp, ctx)
        Rd = r_matrix_values(Sd, Soppd, ctx)
        worst = max(worst, float(np.max(np.abs(R - Rd.T)) / _scale(R)))
    return Report("r-symmetry", worst <= tol, worst, {"n": n, "form": form, "family": family})


# Cohomological limit and Yang's R-matrix -----------------------------------------

def cohomological_limit(e: Expr, values: Mapping[str, float]) -> float:
    """theta(x) -> c1(x) for z-free arguments; z-dependent thetas -> 1.

    Valid for the intro envelopes, whose z-dependent factors pair up as
    theta(x z)/theta(y z) and tend to 1 as the equivariant variables shrink.
    """
    num, den, monos, const = theta_factors(e)
    if monos:
        raise ValueError("monomial prefactors have no cohomological limit here")
    value = complex(const)

    def linear(m: Mono) -> float:
        return sum(k * values[v] for v, k in m.exps.items())

    zs = lambda m: any(v.startswith("z") for v in m.variables())
    if sum(map(zs, num)) != sum(map(zs, den)):
        raise ValueError("unbalanced z-dependent factors")
    for m in num:
        if not zs(m):
            value *= linear(m)
    for m in den:
        if not zs(m):
            value /= linear(m)
    return value.real if value.imag == 0 else value


def tp1_cohomological(chamber: Sequence[int], a1: float, a2: float, h: float,
                      polarized: bool = False) -> np.ndarray:
    """Cohomological limit of the intro matrix, optionally with polarization signs."""
    S = stab_tp1_elliptic(chamber)
    vals = {"a1": a1, "a2": a2, "h": h}
    M = np.zeros((2, 2))
    for p in range(2):
        for q in range(2):
            e = S.entries[p][q]
            M[p, q] = 0.0 if e == Const(0) else cohomological_limit(e, vals)
    if polarized:
        M = M * np.array([polarization_sign(S.chamber, q + 1) for q in range(2)])[None, :]
    return M


def tp1_cohomological_printed(chamber: Sequence[int], a1: float, a2: float, h: float
                              ) -> np.ndarray:
    """The printed cohomological table, [point][envelope]."""
    u = a1 - a2
    if tuple(chamber) == (1, 2):
        return np.array([[u, h], [0.0, u + h]])
    return np.array([[-u + h, 0.0], [h, -u]])


def polarization_sign(chamber: Sequence[int], k: int, n: int = 2) -> int:
    """(-1)^(number of chamber-positive weights of T^1/2 = h S^dual) at f_k,
    with S the h-free half of the tangent character."""
    half = Character({mon(n, {j: 1, k: -1}, 1): 1 for j in range(1, n + 1) if j != k})
    plus, _, _ = chamber_split(half, chamber)
    return -1 if plus.rank() % 2 else 1


def yang_r(u: float, h: float) -> np.ndarray:
    P = np.array([[0.0, 1.0], [1.0, 0.0]])
    return (u * np.eye(2) + h * P) / (u + h)


def yang_check(count: int = 100, seed: int | None = None, tol: float = 1e-12,
               polarized: bool = True) -> Report:
    rng = np.random.default_rng(resolve_seed(seed))
    worst = 0.0
    for _ in range(count):
        a1, a2, h = rng.uniform(-2, 2, size=3)
        if min(abs(a1 - a2), abs(a1 - a2 + h), abs(a1 - a2 - h)) < 1e-3:
            continue
        M1 = tp1_cohomological((1, 2), a1, a2, h, polarized)
        M2 = tp1_cohomological((2, 1), a1, a2, h, polarized)
        R = np.linalg.solve(M1, M2)
        worst = max(worst, float(np.max(np.abs(R - yang_r(a1 - a2, h)))))
    return Report("yang", worst <= tol, worst, {"polarized": polarized})


# Dynamical Yang-Baxter on T*P^2 ---------------------------------------------------

def tp2_column_weight(point: int, column: int) -> tuple[int, int]:
    """NS5 charge vector carried by D5 column ``column`` at fixed point f_point (0-based)."""
    return (1, 0) if point == column else (0, 1)


def _single_wall(family: str, ctx_shifted: Callable[[Sequence[int]], EvalContext],
                 i: int, j: int, l: int, n: int = 3) -> Callable[[Sequence[int]], np.ndarray]:
    """R^(ij)(z) = R_{(i,j,l),(j,i,l)}(z) as a function of a z-shift vector."""
    def at(shift: Sequence[int]) -> np.ndarray:
        return r_matrix(family, n, (i, j, l), (j, i, l), ctx_shifted(shift))
    return at


def _shift_ctx(ctx: EvalContext, shift: Sequence[int]) -> EvalContext:
    """z_a -> z_a h^(-shift_a)."""
    h = ctx.log("h")
    return ctx.with_logs({f"z{k}": ctx.log(f"z{k}") - s * h for k, s in enumerate(shift, start=1)})


def blockwise(wall: Callable[[Sequence[int]], np.ndarray], spectator: int | None,
              n: int = 3) -> np.ndarray:
    """Evaluate a single-wall matrix with the z-shift of the spectator column.

    Entry [p][q] is taken from the matrix at z h^(-r^(spectator)(p)); entries
    between points that differ in the spectator column must vanish.
    """
    if spectator is None:
        return wall((0, 0))
    out = np.zeros((n, n), dtype=complex)
    cache: dict[tuple[int, int], np.ndarray] = {}
    for p in range(n):
        w = tp2_column_weight(p, spectator - 1)
        if w not in cache:
            cache[w] = wall(w)
        for q in range(n):
            if tp2_column_weight(q, spectator - 1) == w:
                out[p, q] = cache[w][p, q]
            elif abs(cache[w][p, q]) > 1e-9 * _scale(cache[w]):
                raise EvaluationError("single-wall matrix mixes spectator states")
    return out


def ybe_check(family: str = "tpn-separated", count: int = 10, seed: int | None = None,
              tol: float = 1e-8, exact_tol: float = 1e-12) -> Report:
    """Single-wall extraction plus the dynamical Yang-Baxter equation on T*P^2.

    With R[g][f] defined by S_C' = S_C R, products along a chamber path compose
    left to right, so the equation holds in its usual order for the transposes.
    """
    n = 3
    worst_path = worst_wall = worst_ybe = 0.0
    for ctx in family_contexts(count, n, seed):
        def wall(i: int, j: int, l: int):
            return _single_wall(family, lambda s: _shift_ctx(ctx, s), i, j, l)

        R12, R13, R23 = wall(1, 2, 3), wall(1, 3, 2), wall(2, 3, 1)
        Rx = lambda C, C2: r_matrix(family, n, C, C2, ctx)
        path_a = Rx((1, 2, 3), (2, 1, 3)) @ Rx((2, 1, 3), (2, 3, 1)) @ Rx((2, 3, 1), (3, 2, 1))
        path_b = Rx((1, 2, 3), (1, 3, 2)) @ Rx((1, 3, 2), (3, 1, 2)) @ Rx((3, 1, 2), (3, 2, 1))
        direct = Rx((1, 2, 3), (3, 2, 1))
        worst_path = max(worst_path, float(np.max(np.abs(path_a - direct)) / _scale(direct)),
                         float(np.max(np.abs(path_b - direct)) / _scale(direct)))
        # second-position walls equal first-position walls shifted by the prefix column
        walls = [(Rx((2, 1, 3), (2, 3, 1)), blockwise(R13, 2)),
                 (Rx((1, 2, 3), (1, 3, 2)), blockwise(R23, 1)),
                 (Rx((3, 1, 2), (3, 2, 1)), blockwise(R12, 3))]
        for raw, extracted in walls:
            worst_wall = max(worst_wall, float(np.max(np.abs(raw - extracted)) / _scale(raw)))
        # operator form X = R^T: X12(z-r3 h) X13(z) X23(z-r1 h) = X23(z) X13(z-r2 h) X12(z)
        lhs = blockwise(R12, 3).T @ blockwise(R13, None).T @ blockwise(R23, 1).T
        rhs = blockwise(R23, None).T @ blockwise(R13, 2).T @ blockwise(R12, None).T
        worst_ybe = max(worst_ybe, float(np.max(np.abs(lhs - rhs)) / _scale(lhs)))
    ok = worst_path <= exact_tol and worst_wall <= tol and worst_ybe <= tol
    return Report("ybe", ok, max(worst_wall, worst_ybe),
                  {"family": family, "path_independence": worst_path,
                   "wall_extraction": worst_wall, "ybe_residual": worst_ybe})


# HW invariance and sigma-equivariance ------------------------------------------------

def hw_qform_check(trials: int = 500, seed: int | None = None) -> Report:
    """Reduced Q(alpha) + QU unchanged under random HW moves."""
    from .line_calculus import random_hw_trials

    reports = random_hw_trials(trials, seed=resolve_seed(seed))
    bad = [r.to_json() for r in reports if not r.ok]
    return Report("hw-qform", not bad, float(len(bad)), {"trials": len(reports), "failures": bad[:5]})


def ratio_matrix(M: np.ndarray) -> np.ndarray:
    """Normalized restrictions Stab(f)|_g / Stab(g)|_g, indexed [g][f]."""
    return M / np.diag(M)[:, None]


def hw_ratio_check(n: int, count: int = 10, seed: int | None = None, tol: float = 1e-9,
                   chamber: Sequence[int] | None = None) -> Report:
    """Separated and co-separated T*P^(n-1) give the same normalized matrices."""
    S1, S2 = stab_tpn(n, SEPARATED, chamber), stab_tpn(n, COSEPARATED, chamber)
    worst = 0.0
    for ctx in family_contexts(count, n, seed):
        R1, R2 = ratio_matrix(S1.evaluate(ctx)), ratio_matrix(S2.evaluate(ctx))
        worst = max(worst, float(np.max(np.abs(R1 - R2)) / _scale(R1)))
    return Report("hw-ratio", worst <= tol, worst, {"n": n})


def sigma_equivariance_check(n: int, form: str = SEPARATED, count: int = 3,
                             seed: int | None = None, tol: float = 1e-9) -> Report:
    """Ratio matrices in chamber sigma, at sigma.a and relabeled points, equal the standard ones."""
    base = stab_tpn(n, form)
    worst = 0.0
    for ctx in family_contexts(count, n, seed):
        R0 = ratio_matrix(base.evaluate(ctx))
        for sigma in permutations(range(1, n + 1)):
            S = stab_tpn(n, form, sigma)
            moved = ctx.with_logs({f"a{s}": ctx.log(f"a{i}") for i, s in enumerate(sigma, 1)})
            R = ratio_matrix(S.evaluate(moved))
            idx = [s - 1 for s in sigma]
            worst = max(worst, float(np.max(np.abs(R[np.ix_(idx, idx)] - R0)) / _scale(R0)))
    return Report("sigma-equivariance", worst <= tol, worst, {"n": n, "form": form})
