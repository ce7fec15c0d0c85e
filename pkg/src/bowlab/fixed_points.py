"""Torus fixed points as binary contingency tables (BCTs).

Row i is the i-th NS5 brane from the left, column j the j-th D5 brane.
"""

from __future__ import annotations

import json
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .brane_core import BraneDiagram, charges


class BCT(tuple):
    """Immutable 0/1 matrix stored as a tuple of row tuples."""

    def __new__(cls, rows: Iterable[Iterable[int]], ncols: int | None = None):
        rows = tuple(tuple(int(x) for x in row) for row in rows)
        obj = super().__new__(cls, rows)
        obj._ncols = len(rows[0]) if rows else (ncols or 0)
        if any(len(row) != obj._ncols for row in rows):
            raise ValueError("ragged BCT")
        if any(x not in (0, 1) for row in rows for x in row):
            raise ValueError("BCT entries must be 0 or 1")
        return obj

    @property
    def m(self) -> int:
        return len(self)

    @property
    def n(self) -> int:
        return self._ncols

    @property
    def row_sums(self) -> tuple[int, ...]:
        return tuple(sum(row) for row in self)

    @property
    def col_sums(self) -> tuple[int, ...]:
        return tuple(sum(row[j] for row in self) for j in range(self.n))

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(row[j] for row in self)

    def ties(self) -> list[tuple[int, int]]:
        """Positions of ones, 0-based (row, column)."""
        return [(i, j) for i, row in enumerate(self) for j, x in enumerate(row) if x]

    def transpose(self) -> "BCT":
        return BCT(zip(*self), ncols=self.m) if self.m and self.n else BCT([()] * self.n, ncols=self.m)

    def to_json(self) -> dict:
        return {"rows": self.m, "cols": self.n, "ones": [list(p) for p in self.ties()]}

    @classmethod
    def from_json(cls, data: Mapping | str) -> "BCT":
        if isinstance(data, str):
            data = json.loads(data)
        return from_ties(data["rows"], data["cols"], data["ones"])

    def __repr__(self) -> str:
        return "BCT(" + "/".join("".join(map(str, row)) for row in self) + ")"


def from_ties(m: int, n: int, ties: Iterable[Sequence[int]]) -> BCT:
    rows = [[0] * n for _ in range(m)]
    for i, j in ties:
        rows[i][j] = 1
    return BCT(rows, ncols=n)


def margins(D: BraneDiagram) -> tuple[tuple[int, ...], tuple[int, ...]]:
    ch = charges(D)
    return ch.r, ch.c


def gale_ryser_feasible(r: Sequence[int], c: Sequence[int]) -> bool:
    """Dominance test: sorted c is dominated by the conjugate of r."""
    r, c = list(r), list(c)
    if any(x < 0 for x in r + c) or sum(r) != sum(c):
        return False
    if any(x > len(c) for x in r) or any(x > len(r) for x in c):
        return False
    c_sorted = sorted(c, reverse=True)
    conj = [sum(1 for x in r if x > k) for k in range(len(c))]
    total_c = total_conj = 0
    for k in range(len(c)):
        total_c += c_sorted[k]
        total_conj += conj[k]
        if total_c > total_conj:
            return False
    return True


def enumerate_bcts(r: Sequence[int], c: Sequence[int]) -> list[BCT]:
    """All BCTs with margins (r, c), lexicographic in the row-major reading."""
    r, c = tuple(r), tuple(c)
    m, n = len(r), len(c)
    if not gale_ryser_feasible(r, c):
        return []
    columns: list[tuple[int, ...]] = []
    out: list[tuple[tuple[int, ...], ...]] = []

    def fill(j: int, remaining: tuple[int, ...]) -> None:
        if j == n:
            if not any(remaining):
                out.append(tuple(zip(*columns)) if columns else ((),) * m)
            return
        if not gale_ryser_feasible(remaining, c[j:]):
            return
        for chosen in combinations(range(m), c[j]):
            if any(remaining[i] == 0 for i in chosen):
                continue
            col = tuple(1 if i in chosen else 0 for i in range(m))
            columns.append(col)
            fill(j + 1, tuple(x - y for x, y in zip(remaining, col)))
            columns.pop()

    fill(0, r)
    result = [BCT(rows, ncols=n) for rows in out]
    result.sort()
    return result


def count_bcts(r: Sequence[int], c: Sequence[int]) -> int:
    """Count BCTs by a DP over columns on the multiset of remaining row sums."""
    r, c = tuple(r), tuple(c)
    if any(x < 0 for x in r + c) or sum(r) != sum(c):
        return 0
    return _count(tuple(sorted(r)), c)


@lru_cache(maxsize=None)
def _count(rows: tuple[int, ...], cols: tuple[int, ...]) -> int:
    if not cols:
        return int(not any(rows))
    k = cols[0]
    # group rows by remaining value; choose how many from each group get a 1
    values = sorted(set(rows))
    groups = [(v, rows.count(v)) for v in values]
    total = 0

    def choose(g: int, left: int, weight: int, new_rows: list[int]) -> None:
        nonlocal total
        if g == len(groups):
            if left == 0:
                total += weight * _count(tuple(sorted(new_rows)), cols[1:])
            return
        v, size = groups[g]
        top = min(size, left) if v > 0 else 0
        for take in range(top + 1):
            choose(g + 1, left - take, weight * _binom(size, take),
                   new_rows + [v - 1] * take + [v] * (size - take))

    choose(0, k, 1, [])
    return total


@lru_cache(maxsize=None)
def _binom(n: int, k: int) -> int:
    from math import comb
    return comb(n, k)


def fixed_points(D: BraneDiagram) -> list[BCT]:
    return enumerate_bcts(*margins(D))


def crossings(f: BCT) -> int:
    total = 0
    m, n = f.m, f.n
    # suffix[i][j] = number of ones at (k, l) with k >= i, l >= j
    suffix = [[0] * (n + 1) for _ in range(m + 1)]
    for i in range(m - 1, -1, -1):
        for j in range(n - 1, -1, -1):
            suffix[i][j] = f[i][j] + suffix[i + 1][j] + suffix[i][j + 1] - suffix[i + 1][j + 1]
    for i in range(m):
        for j in range(n):
            if f[i][j]:
                total += suffix[i + 1][j + 1]
    return total


def epsilon_sign(f: BCT) -> int:
    return -1 if crossings(f) % 2 else 1


def tie_crossings_geometric(f: BCT) -> int:
    """Count crossing arcs in the tie diagram of a separated diagram.

    NS5 branes sit at positions 0..m-1 and D5 branes at m..m+n-1 on a line;
    ties are arcs drawn above the line, two arcs cross iff their endpoints
    interleave.
    """
    arcs = [(i, f.m + j) for i, j in f.ties()]
    count = 0
    for (p1, q1), (p2, q2) in combinations(arcs, 2):
        if p1 < p2 < q1 < q2 or p2 < p1 < q2 < q1:
            count += 1
    return count


def mirror_point(f: BCT) -> BCT:
    return f.transpose()


def split_subtorus(f: BCT, block: Iterable[int]) -> tuple[BCT, BCT]:
    """Restrict f to the columns in ``block`` and to the remaining columns."""
    block = sorted(set(block))
    rest = [j for j in range(f.n) if j not in block]
    first = BCT([[row[j] for j in block] for row in f], ncols=len(block))
    second = BCT([[row[j] for j in rest] for row in f], ncols=len(rest))
    return first, second


def _check_split(total: int, w1: int, w2: int) -> None:
    if w1 < 0 or w2 < 0 or w1 + w2 != total:
        raise ValueError(f"split {w1}+{w2} does not match charge {total}")


def d5_resolutions(f: BCT, j: int, w1: int, w2: int) -> list[BCT]:
    """Replace column j by two columns with sums w1, w2 in every possible way."""
    col = f.column(j)
    rows = [i for i, x in enumerate(col) if x]
    _check_split(len(rows), w1, w2)
    out = []
    for left in combinations(rows, w1):
        new = []
        for i, row in enumerate(f):
            a = 1 if i in left else 0
            b = row[j] - a
            new.append(row[:j] + (a, b) + row[j + 1:])
        out.append(BCT(new, ncols=f.n + 1))
    return sorted(out)


def ns5_resolutions(f: BCT, i: int, w1: int, w2: int) -> list[BCT]:
    """Replace row i by two rows with sums w1, w2 in every possible way."""
    return sorted(mirror_point(g) for g in d5_resolutions(mirror_point(f), i, w1, w2))


def _pair_crossings(first: Sequence[int], second: Sequence[int]) -> int:
    """Crossings between two adjacent lines whose ties are listed in order."""
    return sum(1 for p in range(len(first)) for q in range(p + 1, len(second))
               if first[p] and second[q])


def d5_sharp(f: BCT, j: int, w1: int, w2: int, form: str = "separated") -> BCT:
    """The resolution with no crossings between the new columns (separated)
    or with all w1*w2 of them (co-separated)."""
    target = 0 if form == "separated" else w1 * w2
    found = [g for g in d5_resolutions(f, j, w1, w2)
             if _pair_crossings(g.column(j), g.column(j + 1)) == target]
    assert len(found) == 1
    return found[0]


def ns5_sharp(f: BCT, i: int, w1: int, w2: int, form: str = "separated") -> BCT:
    """The resolution with all w1*w2 crossings between the new rows (separated)
    or none (co-separated)."""
    target = w1 * w2 if form == "separated" else 0
    found = [g for g in ns5_resolutions(f, i, w1, w2)
             if _pair_crossings(g[i], g[i + 1]) == target]
    assert len(found) == 1
    return found[0]


def gamma_index(f: BCT, i: int) -> tuple[int, ...]:
    """Per D5 brane, the number of its ties to NS5 branes strictly above row i."""
    return tuple(sum(f[k][j] for k in range(i)) for j in range(f.n))


def gamma_index_d5(f: BCT, j: int) -> tuple[int, ...]:
    """Per NS5 brane, the number of its ties to D5 branes left of column j."""
    return tuple(sum(row[:j]) for row in f)
