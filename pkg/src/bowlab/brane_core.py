"""Brane diagrams: parsing, charges, Hanany-Witten moves, duality and dimension."""

from __future__ import annotations

import json
import re
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping

NS5 = "Z"
D5 = "A"

_SYMBOL = {"/": NS5, "s": NS5, "\\": D5, "b": D5}
_GLYPH = {NS5: "/", D5: "\\"}
_TOKEN = re.compile(r"\s*(?:(\d+)|([/\\sb])|(-\d+))")


class DiagramError(ValueError):
    """Invalid brane diagram or illegal move."""


@dataclass(frozen=True)
class BraneDiagram:
    branes: tuple[str, ...]
    d3: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "branes", tuple(self.branes))
        object.__setattr__(self, "d3", tuple(int(x) for x in self.d3))
        if any(b not in (NS5, D5) for b in self.branes):
            raise DiagramError(f"unknown brane tag in {self.branes}")
        if len(self.d3) != len(self.branes) + 1:
            raise DiagramError("need exactly one D3 multiplicity per gap")
        if self.d3[0] != 0 or self.d3[-1] != 0:
            raise DiagramError("boundary multiplicities must be 0")
        if any(x < 0 for x in self.d3):
            raise DiagramError(f"negative multiplicity in {self.d3}")

    @property
    def ns5_positions(self) -> list[int]:
        return [p for p, b in enumerate(self.branes) if b == NS5]

    @property
    def d5_positions(self) -> list[int]:
        return [p for p, b in enumerate(self.branes) if b == D5]

    @property
    def m(self) -> int:
        return self.branes.count(NS5)

    @property
    def n(self) -> int:
        return self.branes.count(D5)

    def left(self, p: int) -> int:
        """D3 multiplicity just left of brane p."""
        return self.d3[p]

    def right(self, p: int) -> int:
        return self.d3[p + 1]

    def is_separated(self) -> bool:
        return list(self.branes) == sorted(self.branes, key=lambda b: b != NS5)

    def is_coseparated(self) -> bool:
        return list(self.branes) == sorted(self.branes, key=lambda b: b != D5)

    def __str__(self) -> str:
        return format_diagram(self)

    def to_json(self) -> dict:
        return {"branes": list(self.branes), "d3": list(self.d3)}

    @classmethod
    def from_json(cls, data: Mapping | str) -> "BraneDiagram":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(tuple(data["branes"]), tuple(data["d3"]))


@dataclass(frozen=True)
class ChargeVector:
    r: tuple[int, ...]
    c: tuple[int, ...]

    def to_json(self) -> dict:
        return {"r": list(self.r), "c": list(self.c)}


def parse(text: str) -> BraneDiagram:
    """Read a diagram such as ``/1/2\\1\\``; boundary zeros may be omitted.

    ``s`` and ``b`` are accepted in place of ``/`` and ``\\``.
    """
    branes: list[str] = []
    d3: list[int | None] = [None]
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if match is None:
            raise DiagramError(f"syntax error at position {pos}: {text[pos:pos + 8]!r}")
        number, symbol, negative = match.groups()
        if negative is not None:
            raise DiagramError(f"negative multiplicity {negative} at position {match.start(3)}")
        if number is not None:
            if d3[-1] is not None:
                raise DiagramError(f"two multiplicities in a row at position {match.start(1)}")
            d3[-1] = int(number)
        else:
            branes.append(_SYMBOL[symbol])
            d3.append(None)
        pos = match.end()
    for k in (0, len(d3) - 1):
        if d3[k] is None:
            d3[k] = 0
    missing = [k for k, x in enumerate(d3) if x is None]
    if missing:
        raise DiagramError(f"missing multiplicity after brane {missing[0]}")
    return BraneDiagram(tuple(branes), tuple(d3))


def format_diagram(D: BraneDiagram) -> str:
    """Inverse of :func:`parse`, omitting the two boundary zeros."""
    out = []
    for k, b in enumerate(D.branes):
        if k > 0:
            out.append(str(D.d3[k]))
        out.append(_GLYPH[b])
    if not D.branes:
        return ""
    return "".join(out)


def as_diagram(D: BraneDiagram | str) -> BraneDiagram:
    return parse(D) if isinstance(D, str) else D


def ns5_left_count(D: BraneDiagram, p: int) -> int:
    return D.branes[:p].count(NS5)


def d5_left_count(D: BraneDiagram, p: int) -> int:
    return D.branes[:p].count(D5)


def charges(D: BraneDiagram) -> ChargeVector:
    r, c = [], []
    for p, b in enumerate(D.branes):
        if b == NS5:
            r.append(D.right(p) - D.left(p) + d5_left_count(D, p))
        else:
            c.append(D.left(p) - D.right(p) + D.branes[p + 1:].count(NS5))
    return ChargeVector(tuple(r), tuple(c))


def ell(D: BraneDiagram) -> tuple[int, ...]:
    """Number of D5 branes left of each NS5 brane."""
    return tuple(d5_left_count(D, p) for p in D.ns5_positions)


def local_charge(D: BraneDiagram, p: int) -> int:
    return abs(D.right(p) - D.left(p))


def _swap(D: BraneDiagram, site: int) -> BraneDiagram:
    d1, d2, d3 = D.d3[site], D.d3[site + 1], D.d3[site + 2]
    middle = d1 + d3 - d2 + 1
    if middle < 0:
        raise DiagramError(
            f"move at site {site} gives negative multiplicity {d1}+{d3}-{d2}+1={middle}"
        )
    branes = list(D.branes)
    branes[site], branes[site + 1] = branes[site + 1], branes[site]
    d3s = list(D.d3)
    d3s[site + 1] = middle
    return BraneDiagram(tuple(branes), tuple(d3s))


def hw_move(D: BraneDiagram, site: int, direction: str | None = None) -> BraneDiagram:
    """Swap the adjacent branes at positions ``site`` and ``site + 1``.

    ``direction`` is ``"ZA"`` (NS5 then D5, moving the D5 left), ``"AZ"`` (the
    reverse), or None to accept either pattern.
    """
    if not 0 <= site < len(D.branes) - 1:
        raise DiagramError(f"site {site} out of range")
    pair = D.branes[site] + D.branes[site + 1]
    if pair not in ("ZA", "AZ"):
        raise DiagramError(f"no NS5/D5 pair at site {site}")
    if direction is not None and pair != direction:
        raise DiagramError(f"pattern {pair} at site {site} does not match {direction}")
    return _swap(D, site)


def legal_moves(D: BraneDiagram) -> list[int]:
    """Sites where a move exists and keeps all multiplicities non-negative."""
    sites = []
    for k in range(len(D.branes) - 1):
        if D.branes[k] != D.branes[k + 1]:
            if D.d3[k] + D.d3[k + 2] - D.d3[k + 1] + 1 >= 0:
                sites.append(k)
    return sites


def separated_from_charges(r: Iterable[int], c: Iterable[int]) -> BraneDiagram:
    """The unique separated diagram with the given charges."""
    r, c = list(r), list(c)
    d3 = [0]
    for x in r:
        d3.append(d3[-1] + x)
    for x in c:
        d3.append(d3[-1] - x)
    return BraneDiagram((NS5,) * len(r) + (D5,) * len(c), tuple(d3))


def coseparated_from_charges(r: Iterable[int], c: Iterable[int]) -> BraneDiagram:
    r, c = list(r), list(c)
    m, n = len(r), len(c)
    d3 = [0]
    for x in c:
        d3.append(d3[-1] - x + m)
    for x in r:
        d3.append(d3[-1] + x - n)
    return BraneDiagram((D5,) * n + (NS5,) * m, tuple(d3))


def normalize(D: BraneDiagram, target: str = "separated") -> BraneDiagram:
    """Bring D to separated or co-separated form by leftmost-first moves."""
    if target not in ("separated", "co-separated"):
        raise ValueError(f"unknown target {target!r}")
    bad = "AZ" if target == "separated" else "ZA"
    current = D
    while True:
        sites = [k for k in range(len(current.branes) - 1)
                 if current.branes[k] + current.branes[k + 1] == bad]
        if not sites:
            break
        current = _swap(current, sites[0])
    ch = charges(D)
    build = separated_from_charges if target == "separated" else coseparated_from_charges
    expected = build(ch.r, ch.c)
    assert current == expected, f"{target} representative not unique: {current} vs {expected}"
    return current


def dualize(D: BraneDiagram) -> BraneDiagram:
    """Swap NS5 and D5 branes in place, keeping all multiplicities."""
    swap = {NS5: D5, D5: NS5}
    return BraneDiagram(tuple(swap[b] for b in D.branes), D.d3)


def reverse(D: BraneDiagram) -> BraneDiagram:
    """Read the diagram right to left (brane types kept)."""
    return BraneDiagram(D.branes[::-1], D.d3[::-1])


def strip_zero_charge(D: BraneDiagram) -> BraneDiagram:
    """HW-equivalent-up-to-extra-brane diagram with all charges positive.

    A zero-charge D5 is removed by appending an NS5 after the separated form,
    which adds 1 to every D5 charge; zero-charge NS5 branes are treated the
    same way with an extra D5 in front of the co-separated form.
    """
    ch = charges(D)
    if all(x > 0 for x in ch.r + ch.c):
        return D
    r, c = list(ch.r), list(ch.c)
    if any(x == 0 for x in c):
        r = r + [len(c)]
        c = [x + 1 for x in c]
    if any(x == 0 for x in r):
        c = [len(r)] + c
        r = [x + 1 for x in r]
    return separated_from_charges(r, c)


def dimension(D: BraneDiagram) -> int:
    dim_m = 0
    for p in D.d5_positions:
        dm, dp = D.left(p), D.right(p)
        dim_m += dp * dm + dp + dm + dm * dm + dp * dp
    for p in D.ns5_positions:
        dim_m += 2 * D.left(p) * D.right(p)
    squares = sum(x * x for x in D.d3)
    dim_n = sum(D.left(p) * D.right(p) for p in D.d5_positions) + squares
    dim = dim_m - dim_n - squares
    if dim < 0 or dim % 2:
        raise DiagramError(f"diagram {format_diagram(D)} has invalid dimension {dim}")
    return dim


# K-class transport. Segment bundle k sits in gap k (0..len(branes)); the
# line bundle of the D5 brane at position p is ("C", p). A class is a Counter
# keyed by (symbol, hbar_power).

def xi(k: int, h: int = 0) -> Counter:
    return Counter({(("xi", k), h): 1})


def line(p: int, h: int = 0) -> Counter:
    return Counter({(("C", p), h): 1})


def _clean(expr: Counter) -> Counter:
    return Counter({k: v for k, v in expr.items() if v != 0})


def hw_transport_kclass(expr: Mapping, D: BraneDiagram, site: int) -> Counter:
    """Rewrite a class of D into the class of hw_move(D, site).

    After the move the middle segment is xi1 + xi3 - xi2 + C_A and C_A picks up
    a factor hbar^-1 when the D5 moves left; the reverse move undoes both.
    """
    hw_move(D, site)
    left, mid, right = site, site + 1, site + 2
    d5_before = site if D.branes[site] == D5 else site + 1
    d5_after = site + 1 if d5_before == site else site
    moving_left = D.branes[site] == NS5
    out: Counter = Counter()
    for (sym, h), coeff in expr.items():
        kind, idx = sym
        if kind == "xi" and idx == mid:
            for s, sign in ((("xi", left), 1), (("xi", right), 1), (("xi", mid), -1)):
                out[(s, h)] += sign * coeff
            out[(("C", d5_after), h + (0 if moving_left else 1))] += coeff
        elif kind == "C" and idx == d5_before:
            out[(("C", d5_after), h - 1 if moving_left else h + 1)] += coeff
        elif kind in ("xi", "C"):
            if kind == "xi" and not 0 <= idx <= len(D.branes):
                raise KeyError(f"unknown segment {sym}")
            if kind == "C" and D.branes[idx] != D5:
                raise KeyError(f"no D5 at position {idx}")
            out[(sym, h)] += coeff
        else:
            raise KeyError(f"unknown symbol {sym}")
    return _clean(out)
