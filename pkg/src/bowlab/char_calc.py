"""Characters: signed multisets of Laurent monomials in a, z and hbar."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .brane_core import D5, BraneDiagram
from .theta_engine import Mono


@dataclass(frozen=True, order=True)
class Monomial:
    a_exp: tuple[int, ...] = ()
    z_exp: tuple[int, ...] = ()
    h_exp: int = 0

    def __mul__(self, other: "Monomial") -> "Monomial":
        return Monomial(_add(self.a_exp, other.a_exp), _add(self.z_exp, other.z_exp),
                        self.h_exp + other.h_exp)

    def dual(self) -> "Monomial":
        return Monomial(tuple(-x for x in self.a_exp), tuple(-x for x in self.z_exp), -self.h_exp)

    def to_mono(self) -> Mono:
        exps = {f"a{i + 1}": e for i, e in enumerate(self.a_exp)}
        exps.update({f"z{i + 1}": e for i, e in enumerate(self.z_exp)})
        exps["h"] = self.h_exp
        return Mono(exps)

    @classmethod
    def from_mono(cls, mono: Mono, n_a: int, n_z: int = 0) -> "Monomial":
        extra = mono.variables() - {f"a{i}" for i in range(1, n_a + 1)} \
            - {f"z{i}" for i in range(1, n_z + 1)} - {"h"}
        if extra:
            raise ValueError(f"monomial has variables outside a, z, h: {extra}")
        return cls(tuple(mono.get(f"a{i}") for i in range(1, n_a + 1)),
                   tuple(mono.get(f"z{i}") for i in range(1, n_z + 1)), mono.get("h"))

    def to_json(self) -> dict:
        return {"a": list(self.a_exp), "z": list(self.z_exp), "h": self.h_exp}

    def __repr__(self) -> str:
        return repr(self.to_mono())


def _add(u: Sequence[int], v: Sequence[int]) -> tuple[int, ...]:
    size = max(len(u), len(v))
    u = tuple(u) + (0,) * (size - len(u))
    v = tuple(v) + (0,) * (size - len(v))
    return tuple(x + y for x, y in zip(u, v))


def mon(n: int, a: Mapping[int, int] | None = None, h: int = 0) -> Monomial:
    """Monomial in n a-slots from a 1-based exponent map."""
    exps = [0] * n
    for i, e in (a or {}).items():
        exps[i - 1] += e
    return Monomial(tuple(exps), (), h)


class Character(Counter):
    """Virtual character: Monomial -> integer multiplicity."""

    def dual(self) -> "Character":
        return Character({m.dual(): k for m, k in self.items()})

    def twist(self, m: Monomial) -> "Character":
        return Character({x * m: k for x, k in self.items()})

    def rank(self) -> int:
        return sum(self.values())

    def clean(self) -> "Character":
        return Character({m: k for m, k in self.items() if k})

    def __add__(self, other: "Character") -> "Character":
        out = Character(self)
        for m, k in other.items():
            out[m] += k
        return out.clean()

    def __sub__(self, other: "Character") -> "Character":
        out = Character(self)
        for m, k in other.items():
            out[m] -= k
        return out.clean()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Counter):
            return NotImplemented
        return dict(Character(self).clean()) == dict(Character(other).clean())

    __hash__ = None

    def to_json(self) -> list[dict]:
        return [dict(m.to_json(), mult=k) for m, k in sorted(self.items())]


def character(monomials: Iterable[Monomial]) -> Character:
    return Character(Counter(monomials))


def restrict_tpn(n: int, k: int, form: str = "separated") -> Monomial:
    """Restriction of the tautological root at the k-th fixed point."""
    if not 1 <= k <= n:
        raise IndexError(f"fixed point {k} out of range 1..{n}")
    return mon(n, {k: 1}, -1 if form == "separated" else 1)


def negative_normal_tpn(n: int, k: int) -> Character:
    below = [mon(n, {i: 1, k: -1}, 1) for i in range(1, k)]
    above = [mon(n, {k: 1, i: -1}) for i in range(k + 1, n + 1)]
    return character(below + above)


def tangent_tpn(n: int, k: int) -> Character:
    return tangent_tgr(n, [k])


def base_tangent_tgr(n: int, subspace: Iterable[int]) -> Character:
    """h-free half S = {a_v / a_q : v in V, q not in V} at the point V of T*Gr(|V|, n)."""
    V = set(subspace)
    return character(mon(n, {v: 1, q: -1}) for v in sorted(V)
                     for q in range(1, n + 1) if q not in V)


def tangent_tgr(n: int, subspace: Iterable[int]) -> Character:
    """S + h S^dual; for V = {k} this is the T*P^(n-1) tangent character."""
    S = base_tangent_tgr(n, subspace)
    return S + S.dual().twist(mon(n, h=1))


def chamber_sign(m: Monomial, chamber: Sequence[int]) -> int:
    """+1, 0 or -1: sign of the last nonzero a-exponent in chamber order.

    ``chamber`` lists a-slots (1-based) from smallest to largest.
    """
    for slot in reversed(chamber):
        e = m.a_exp[slot - 1] if slot - 1 < len(m.a_exp) else 0
        if e:
            return 1 if e > 0 else -1
    return 0


def chamber_split(chi: Character, chamber: Sequence[int]) -> tuple[Character, Character, Character]:
    parts = {1: Character(), 0: Character(), -1: Character()}
    for m, k in chi.items():
        parts[chamber_sign(m, chamber)][m] += k
    return parts[1].clean(), parts[0].clean(), parts[-1].clean()


def standard_chamber(n: int) -> tuple[int, ...]:
    return tuple(range(1, n + 1))


# Alpha class ------------------------------------------------------------------

@dataclass(frozen=True)
class HomBlock:
    """sign * hbar * Hom(source, target)^dual; endpoints are ("xi", gap) or ("C", position)."""

    source: tuple[str, int]
    target: tuple[str, int]
    sign: int = 1


def alpha_class(D: BraneDiagram) -> list[HomBlock]:
    blocks = []
    for p, b in enumerate(D.branes):
        minus, plus = ("xi", p), ("xi", p + 1)
        if b == D5:
            blocks.append(HomBlock(plus, minus))
            blocks.append(HomBlock(("C", p), minus))
        else:
            blocks.append(HomBlock(minus, plus))
    for g in range(len(D.d3)):
        blocks.append(HomBlock(("xi", g), ("xi", g), -1))
    return blocks


def evaluate_blocks(blocks: Iterable[HomBlock], roots: Mapping[tuple[str, int], Counter]) -> Counter:
    """Line-bundle decomposition of sum sign*hbar*Hom(V, W)^dual.

    ``roots`` maps each endpoint to a Counter of additive linear forms (Mono);
    a summand with roots v of V and w of W contributes v - w + hbar.
    """
    h = Mono.var("h")
    out: Counter = Counter()
    for blk in blocks:
        for v, sv in roots[blk.source].items():
            for w, sw in roots[blk.target].items():
                out[v / w * h] += blk.sign * sv * sw
    return Counter({k: x for k, x in out.items() if x})


def alpha_character(D: BraneDiagram, roots: Mapping[tuple[str, int], Counter]) -> Counter:
    return evaluate_blocks(alpha_class(D), roots)


def alpha_rank(D: BraneDiagram) -> int:
    d = D.d3
    total = 0
    for p, b in enumerate(D.branes):
        if b == D5:
            total += d[p + 1] * d[p] + d[p]
        else:
            total += d[p] * d[p + 1]
    return total - sum(x * x for x in d)


# Fixed-point data ---------------------------------------------------------------

def example_restriction_table() -> dict[int, list[Monomial]]:
    """Chern-root restrictions of the ten D3 bundles at the sample fixed point of
    the diagram /2\\2/2\\4/3/3/4\\3/2\\2\\ (multiplicative notation)."""
    n = 5

    def m(i: int, h: int = 0) -> Monomial:
        return mon(n, {i: 1}, h)

    return {
        1: [m(1), m(2, -1)],
        2: [m(1), m(2, -1)],
        3: [m(1), m(2)],
        4: [m(1), m(2), m(2, 1), m(2, 2)],
        5: [m(2, 1), m(2, 2), m(3, -2)],
        6: [m(2, 2), m(3, -2), m(3, -1)],
        7: [m(2, 2), m(3, -1), m(3), m(5, -1)],
        8: [m(2, 2), m(3, -1), m(5, -1)],
        9: [m(5), m(5, -1)],
        10: [m(5), m(5, -1)],
    }


def tpn_bundle_restrictions(n: int, k: int, form: str = "separated") -> list[Character]:
    """Restrictions of all D3 bundles of T*P^(n-1), gap by gap, at point k.

    Separated diagram /1/n\\n-1\\...\\1\\: gap 1 is the tautological line, gaps
    right of the second NS5 hold {a_j, ..., a_n}. Co-separated \\1\\2...\\n/1/:
    gap j < n+1 holds {a_1 h, ..., a_j h}, then the tautological line.
    """
    taut = character([restrict_tpn(n, k, form)])
    if form == "separated":
        gaps = [Character(), taut]
        gaps += [character(mon(n, {i: 1}) for i in range(j, n + 1)) for j in range(1, n + 1)]
        return gaps + [Character()]
    gaps = [Character()]
    gaps += [character(mon(n, {i: 1}, 1) for i in range(1, j + 1)) for j in range(1, n + 1)]
    gaps += [taut, Character()]
    return gaps
