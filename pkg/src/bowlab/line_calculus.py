"""Integer quadratic forms attached to line bundles.

Linear forms are written additively but stored as :class:`Mono` exponent
maps, so the multiplicative monomial ``a1 * h^-1`` is the linear form
``a1 - h``. Variables starting with ``t`` are Chern roots; ``a*``, ``z*`` and
``h`` are base variables.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .brane_core import (D5, NS5, BraneDiagram, DiagramError, charges, ell, hw_move,
                         legal_moves, normalize)
from .char_calc import HomBlock, alpha_class, evaluate_blocks
from .theta_engine import Expr, Mono, theta_factors

H = Mono.var("h")


def is_base(name: str) -> bool:
    return not name.startswith("t")


class QForm:
    """Symmetric integer quadratic form, keyed by sorted variable pairs.

    ``squares`` counts signed squared linear forms used to build the form; it
    is bookkeeping for degree balance and is ignored by equality.
    """

    __slots__ = ("coeffs", "squares")

    def __init__(self, coeffs: Mapping[tuple[str, str], int] | None = None,
                 squares: int | None = 0):
        self.coeffs: dict[tuple[str, str], int] = {}
        for (u, v), c in (coeffs or {}).items():
            key = (u, v) if u <= v else (v, u)
            self.coeffs[key] = self.coeffs.get(key, 0) + c
        self.coeffs = {k: c for k, c in self.coeffs.items() if c}
        self.squares = squares

    @classmethod
    def square(cls, lin: Mono, mult: int = 1) -> "QForm":
        return cls.product(lin, lin, mult, squares=mult)

    @classmethod
    def product(cls, lin1: Mono, lin2: Mono, mult: int = 1, squares: int = 0) -> "QForm":
        out: dict[tuple[str, str], int] = {}
        for u, cu in lin1.exps.items():
            for v, cv in lin2.exps.items():
                key = (u, v) if u <= v else (v, u)
                out[key] = out.get(key, 0) + mult * cu * cv
        return cls(out, squares)

    def __add__(self, other: "QForm") -> "QForm":
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, 0) + c
        sq = None if self.squares is None or other.squares is None else self.squares + other.squares
        return QForm(out, sq)

    def __neg__(self) -> "QForm":
        return QForm({k: -c for k, c in self.coeffs.items()},
                     None if self.squares is None else -self.squares)

    def __sub__(self, other: "QForm") -> "QForm":
        return self + (-other)

    def scale(self, k: int) -> "QForm":
        return QForm({key: k * c for key, c in self.coeffs.items()},
                     None if self.squares is None else k * self.squares)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, QForm) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(tuple(sorted(self.coeffs.items())))

    def is_zero(self) -> bool:
        return not self.coeffs

    def variables(self) -> set[str]:
        return {v for key in self.coeffs for v in key}

    def substitute(self, mapping: Mapping[str, Mono]) -> "QForm":
        """Replace variables by linear forms."""
        out = QForm(squares=self.squares)
        for (u, v), c in self.coeffs.items():
            lu = mapping.get(u, Mono.var(u))
            lv = mapping.get(v, Mono.var(v))
            out = out + QForm.product(lu, lv, c)
        out.squares = self.squares
        return out

    def to_json(self) -> dict[str, int]:
        return {f"{u}*{v}": c for (u, v), c in sorted(self.coeffs.items())}

    def __repr__(self) -> str:
        if not self.coeffs:
            return "QForm(0)"
        terms = []
        for (u, v), c in sorted(self.coeffs.items()):
            mono = f"{u}^2" if u == v else f"{u}*{v}"
            terms.append(f"{c:+d}*{mono}")
        return "QForm(" + " ".join(terms) + ")"


def reduce_mod_base(Q: QForm, strict: bool = False) -> QForm:
    """Drop all base-base entries, keeping the t-t and t-base blocks.

    With ``strict`` only pure (a, h) and pure (z, h) entries are dropped, so
    mixed a-z entries survive.
    """
    def negligible(u: str, v: str) -> bool:
        if not (is_base(u) and is_base(v)):
            return False
        if not strict:
            return True
        kinds = {u[0], v[0]} - {"h"}
        return kinds != {"a", "z"}

    return QForm({k: c for k, c in Q.coeffs.items() if not negligible(*k)}, Q.squares)


def equivalent(Q1: QForm, Q2: QForm, strict: bool = False) -> bool:
    return reduce_mod_base(Q1 - Q2, strict).is_zero()


def q_of_lines(lines: Mapping[Mono, int]) -> QForm:
    """Sum of mult * c1(L)^2 over a virtual sum of line bundles."""
    out = QForm()
    for lin, mult in lines.items():
        out = out + QForm.square(lin, mult)
    return out


def q_of_class(blocks: Iterable[HomBlock], roots: Mapping[tuple[str, int], Counter]) -> QForm:
    for blk in blocks:
        for end in (blk.source, blk.target):
            if end not in roots:
                raise KeyError(f"undeclared roots for {end}")
    return q_of_lines(evaluate_blocks(blocks, roots))


def first_chern(roots: Mapping[Mono, int]) -> Mono:
    out = Mono()
    for lin, mult in roots.items():
        out = out * lin ** mult
    return out


# Roots of D3 bundles --------------------------------------------------------------
#
# Every diagram is modelled through its separated representative: the bundle
# between the k-th and (k+1)-th NS5 branes has independent roots t{k}_{i}, the
# bundles right of the last NS5 brane are trivial with
# xi(A-) = xi(A+) + {a, a h^-1, ..., a h^(1-w)}, and the D5 lines are C = a.
# Other diagrams are reached by transporting these classes along the moves.

Roots = dict


def separated_roots(S: BraneDiagram) -> Roots:
    if not S.is_separated():
        raise DiagramError("separated diagram expected")
    m = S.m
    roots: Roots = {}
    d = S.d3
    for g in range(m):
        k = g  # gap g lies right of the g-th NS5
        if 1 <= k <= m - 1:
            roots[("xi", g)] = Counter({Mono.var(f"t{k}_{i}"): 1 for i in range(1, d[g] + 1)})
        elif d[g]:
            raise DiagramError("nonzero multiplicity left of the first NS5 brane")
        else:
            roots[("xi", g)] = Counter()
    last = len(S.branes)
    roots[("xi", last)] = Counter()
    for j, p in enumerate(range(last - 1, m - 1, -1)):
        slot = S.n - j
        w = d[p] - d[p + 1]
        if w < 0:
            raise DiagramError(f"negative charge at D5 brane {slot}")
        below = Counter(roots[("xi", p + 1)])
        for s in range(w):
            below[Mono({f"a{slot}": 1, "h": -s})] += 1
        roots[("xi", p)] = below
        roots[("C", p)] = Counter({Mono.var(f"a{slot}"): 1})
    if m and d[m] != sum(roots[("xi", m)].values()):
        raise DiagramError("inconsistent multiplicities right of the last NS5 brane")
    return roots


def _sub(x: Counter, y: Counter) -> Counter:
    out = Counter(x)
    for k, v in y.items():
        out[k] -= v
    return Counter({k: v for k, v in out.items() if v})


def _add(x: Counter, y: Counter) -> Counter:
    out = Counter(x)
    for k, v in y.items():
        out[k] += v
    return Counter({k: v for k, v in out.items() if v})


def transport_roots(roots: Roots, D: BraneDiagram, site: int) -> Roots:
    """Roots of hw_move(D, site) in terms of the roots of D."""
    hw_move(D, site)
    left, mid, right = ("xi", site), ("xi", site + 1), ("xi", site + 2)
    if D.branes[site] == NS5:  # D5 moves left
        c_old = roots[("C", site + 1)]
        c_new = Counter({lin / H: v for lin, v in c_old.items()})
        middle_line = c_old
        new_pos = site
    else:
        c_old = roots[("C", site)]
        c_new = Counter({lin * H: v for lin, v in c_old.items()})
        middle_line = c_new
        new_pos = site + 1
    out = {k: v for k, v in roots.items() if k[0] != "C" or k[1] not in (site, site + 1)}
    out[mid] = _add(_sub(_add(roots[left], roots[right]), roots[mid]), middle_line)
    out[("C", new_pos)] = c_new
    return out


def normalization_path(D: BraneDiagram) -> list[int]:
    """Sites of the leftmost-first moves taking D to its separated form."""
    path = []
    current = D
    while True:
        sites = [k for k in range(len(current.branes) - 1)
                 if current.branes[k] == D5 and current.branes[k + 1] == NS5]
        if not sites:
            return path
        path.append(sites[0])
        current = hw_move(current, sites[0])


def diagram_roots(D: BraneDiagram) -> Roots:
    path = normalization_path(D)
    S = normalize(D)
    roots = separated_roots(S)
    current = S
    for site in reversed(path):
        roots = transport_roots(roots, current, site)
        current = hw_move(current, site)
    assert current == D
    return roots


def qu_form(D: BraneDiagram, roots: Roots | None = None, eta: Sequence[int] | None = None) -> QForm:
    """2 sum_k c1(eta_k) (z_k - z_{k+1} + (ell(Z_{k+1}) - ch(Z_k)) h).

    ``eta`` optionally picks the gap used between consecutive NS5 branes; the
    default is the leftmost one.
    """
    roots = diagram_roots(D) if roots is None else roots
    pos = D.ns5_positions
    r = charges(D).r
    ells = ell(D)
    out = QForm()
    for k in range(len(pos) - 1):
        gap = pos[k] + 1 if eta is None else eta[k]
        if not pos[k] < gap <= pos[k + 1]:
            raise ValueError(f"gap {gap} is not between NS5 branes {k + 1} and {k + 2}")
        c1 = first_chern(roots[("xi", gap)])
        shift = Mono({f"z{k + 1}": 1, f"z{k + 2}": -1, "h": ells[k + 1] - r[k]})
        out = out + QForm.product(c1, shift, 2)
    return out


def q_alpha(D: BraneDiagram, roots: Roots | None = None) -> QForm:
    roots = diagram_roots(D) if roots is None else roots
    return q_of_class(alpha_class(D), roots)


def total_form(D: BraneDiagram, roots: Roots | None = None) -> QForm:
    roots = diagram_roots(D) if roots is None else roots
    return q_alpha(D, roots) + qu_form(D, roots)


@dataclass
class HWReport:
    diagram: str
    site: int
    delta: QForm
    delta_alpha: QForm
    delta_qu: QForm
    expected_alpha: QForm
    ok: bool

    def to_json(self) -> dict:
        return {"diagram": self.diagram, "site": self.site, "ok": self.ok,
                "delta": self.delta.to_json(), "delta_alpha": self.delta_alpha.to_json(),
                "delta_qu": self.delta_qu.to_json()}


def hw_invariance_check(D: BraneDiagram, site: int | None = None, roots: Roots | None = None
                        ) -> HWReport:
    """Compare reduced Q(alpha) + QU before and after the move at ``site``.

    ``site=None`` is the identity move. The alpha part must change by
    -2h c1(xi_1) for a move of the D5 brane to the left (the opposite sign for
    the reverse move) and the QU part by the negative of that.
    """
    from .brane_core import format_diagram

    roots = diagram_roots(D) if roots is None else roots
    if site is None:
        zero = QForm()
        return HWReport(format_diagram(D), -1, zero, zero, zero, zero, True)
    after = hw_move(D, site)
    new_roots = transport_roots(roots, D, site)
    d_alpha = reduce_mod_base(q_alpha(after, new_roots) - q_alpha(D, roots))
    d_qu = reduce_mod_base(qu_form(after, new_roots) - qu_form(D, roots))
    sign = -1 if D.branes[site] == NS5 else 1
    expected = reduce_mod_base(QForm.product(first_chern(roots[("xi", site)]), H, 2 * sign))
    delta = reduce_mod_base(d_alpha + d_qu)
    ok = delta.is_zero() and d_alpha == expected and (d_qu + expected).is_zero()
    return HWReport(format_diagram(D), site, delta, d_alpha, d_qu, expected, ok)


def random_hw_trials(count: int, seed: int = 0, max_branes: int = 6, max_charge: int = 3
                     ) -> list[HWReport]:
    """Random diagrams with positive charges, each followed by a random legal move."""
    from .brane_core import separated_from_charges
    from .fixed_points import gale_ryser_feasible

    rng = random.Random(seed)
    reports = []
    while len(reports) < count:
        m = rng.randint(1, max_branes - 1)
        n = rng.randint(1, max_branes - m)
        r = [rng.randint(0, max_charge) for _ in range(m)]
        c = [rng.randint(0, max_charge) for _ in range(n)]
        if not gale_ryser_feasible(r, c):
            continue
        D = separated_from_charges(r, c)
        for _ in range(rng.randint(0, 8)):
            sites = legal_moves(D)
            if not sites:
                break
            D = hw_move(D, rng.choice(sites))
        sites = legal_moves(D)
        if not sites:
            continue
        reports.append(hw_invariance_check(D, rng.choice(sites)))
    return reports


# Section check ---------------------------------------------------------------------

def form_of_product(e: Expr) -> QForm:
    """Sum of squared theta arguments, numerators minus denominators."""
    num, den, _, _ = theta_factors(e)
    out = QForm()
    for arg in num:
        out = out + QForm.square(arg)
    for arg in den:
        out = out - QForm.square(arg)
    return out


def section_check(e: Expr, required: QForm, strict: bool = False) -> bool:
    """Does the theta product e have the quadratic form ``required``?

    Degree balance is compared when ``required.squares`` is tracked.
    """
    try:
        num, den, _, _ = theta_factors(e)
    except TypeError as exc:
        raise TypeError(f"section_check needs a product expression: {exc}") from None
    if required.squares is not None and len(num) - len(den) != required.squares:
        return False
    return equivalent(form_of_product(e), required, strict)


def required_form(q_total: QForm, root: str, restriction: Mono, normal: Iterable[Mono]) -> QForm:
    """Form of a section of L_X boxtimes L_F at an isolated fixed point.

    ``q_total`` is Q(alpha) + QU in the Chern root ``root``; the fixed-point
    factor is its value at ``restriction`` with the sign flipped, plus Q of
    the repelling normal weights.
    """
    at_point = q_total.substitute({root: restriction})
    out = q_total - at_point
    for w in normal:
        out = out + QForm.square(w)
    return out
