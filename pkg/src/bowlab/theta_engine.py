"""Odd Jacobi theta function and evaluable theta-expression trees.

Monomials are products of named variables (``a1``, ``z2``, ``h``, ``t``...)
with integer exponents. Every variable carries a chosen logarithm in an
:class:`EvalContext`, so square roots inside theta are branch-free.
"""

from __future__ import annotations

import cmath
import json
import math
import os
from dataclasses import dataclass
from typing import Iterable, Mapping, Union

import numpy as np

DEFAULT_Q = 0.3
DEFAULT_TOL = 1e-15
# The nominal seed label "0xB0WLAB" is not a hex literal; its ASCII bytes are used.
DEFAULT_SEED = int.from_bytes(b"0xB0WLAB", "big")


class EvaluationError(ArithmeticError):
    pass


class Mono:
    """Laurent monomial: immutable map from variable name to integer exponent."""

    __slots__ = ("_items", "_hash")

    def __init__(self, exps: Mapping[str, int] | Iterable[tuple[str, int]] = ()):
        items = dict(exps)
        self._items = tuple(sorted((k, int(v)) for k, v in items.items() if v))
        self._hash = hash(self._items)

    @classmethod
    def var(cls, name: str, power: int = 1) -> "Mono":
        return cls({name: power})

    @property
    def exps(self) -> dict[str, int]:
        return dict(self._items)

    def get(self, name: str) -> int:
        return self.exps.get(name, 0)

    def variables(self) -> set[str]:
        return {k for k, _ in self._items}

    def __mul__(self, other: "Mono") -> "Mono":
        out = self.exps
        for k, v in other._items:
            out[k] = out.get(k, 0) + v
        return Mono(out)

    def __truediv__(self, other: "Mono") -> "Mono":
        return self * other.inv()

    def __pow__(self, k: int) -> "Mono":
        return Mono({v: e * k for v, e in self._items})

    def inv(self) -> "Mono":
        return self ** -1

    def is_one(self) -> bool:
        return not self._items

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Mono) and self._items == other._items

    def __hash__(self) -> int:
        return self._hash

    def __lt__(self, other: "Mono") -> bool:
        return self._items < other._items

    def substitute(self, mapping: Mapping[str, "Mono"], partial: bool = False) -> "Mono":
        out = Mono()
        for v, e in self._items:
            if v in mapping:
                out = out * mapping[v] ** e
            elif partial:
                out = out * Mono({v: e})
            else:
                raise KeyError(f"unmapped variable {v!r}")
        return out

    def log(self, ctx: "EvalContext") -> complex:
        return sum((e * ctx.log(v) for v, e in self._items), 0j)

    def __repr__(self) -> str:
        if not self._items:
            return "1"
        return "*".join(v if e == 1 else f"{v}^{e}" for v, e in self._items)


ONE = Mono()


def a(i: int, power: int = 1) -> Mono:
    return Mono.var(f"a{i}", power)


def z(i: int, power: int = 1) -> Mono:
    return Mono.var(f"z{i}", power)


def hb(power: int = 1) -> Mono:
    return Mono.var("h", power)


def var(name: str, power: int = 1) -> Mono:
    return Mono.var(name, power)


@dataclass(frozen=True)
class EvalContext:
    logs: Mapping[str, complex]
    log_q: complex = math.log(DEFAULT_Q)
    tol: float = DEFAULT_TOL
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.log_q.real >= 0:
            raise EvaluationError("theta needs |q| < 1")
        object.__setattr__(self, "logs", dict(self.logs))

    @property
    def q(self) -> complex:
        return cmath.exp(self.log_q)

    def log(self, name: str) -> complex:
        try:
            return self.logs[name]
        except KeyError:
            raise KeyError(f"context has no value for {name!r}") from None

    def with_logs(self, updates: Mapping[str, complex]) -> "EvalContext":
        logs = dict(self.logs)
        logs.update(updates)
        return EvalContext(logs, self.log_q, self.tol, self.seed)

    def to_json(self) -> dict:
        def pair(x: complex) -> list[float]:
            return [float(x.real), float(x.imag)]

        a_names = sorted((k for k in self.logs if k.startswith("a")), key=lambda s: int(s[1:]))
        z_names = sorted((k for k in self.logs if k.startswith("z")), key=lambda s: int(s[1:]))
        return {
            "q": pair(self.q),
            "a": [pair(self.logs[k]) for k in a_names],
            "z": [pair(self.logs[k]) for k in z_names],
            "hbar": pair(self.logs.get("h", 0j)),
            "tol": self.tol,
            "seed": self.seed,
        }

    @classmethod
    def from_json(cls, data: Mapping | str) -> "EvalContext":
        """Inverse of :meth:`to_json`; a, z, hbar entries are logarithms."""
        if isinstance(data, str):
            data = json.loads(data)

        def cx(p) -> complex:
            return complex(*p) if isinstance(p, (list, tuple)) else complex(p)

        logs = {f"a{i + 1}": cx(p) for i, p in enumerate(data.get("a", []))}
        logs.update({f"z{i + 1}": cx(p) for i, p in enumerate(data.get("z", []))})
        logs["h"] = cx(data.get("hbar", 0))
        q = cx(data.get("q", DEFAULT_Q))
        return cls(logs, cmath.log(q), float(data.get("tol", DEFAULT_TOL)), data.get("seed"))


def random_context(rng: np.random.Generator, n_a: int, n_z: int, q: complex = DEFAULT_Q,
                   tol: float = DEFAULT_TOL, extra: Iterable[str] = (), seed: int | None = None
                   ) -> EvalContext:
    """Logs with real parts in [-0.2, 0.2] and imaginary parts in (-pi, pi]."""
    names = [f"a{i}" for i in range(1, n_a + 1)] + [f"z{i}" for i in range(1, n_z + 1)]
    names += ["h", *extra]
    logs = {}
    for name in names:
        re = rng.uniform(-0.2, 0.2)
        im = math.pi - rng.uniform(0.0, 2 * math.pi)
        logs[name] = complex(re, im)
    return EvalContext(logs, cmath.log(q), tol, seed)


def contexts(count: int, n_a: int, n_z: int, seed: int | None = None, **kw) -> list[EvalContext]:
    seed = resolve_seed(seed)
    rng = np.random.default_rng(seed)
    return [random_context(rng, n_a, n_z, seed=seed, **kw) for _ in range(count)]


def resolve_seed(seed: int | None) -> int:
    if seed is not None:
        return int(seed)
    env = os.environ.get("BOWLAB_SEED")
    return int(env, 0) if env else DEFAULT_SEED


def theta(log_x: complex, ctx: EvalContext) -> complex:
    """theta(x) = (x^1/2 - x^-1/2) prod_k (1 - q^k x)(1 - q^k / x)."""
    if ctx.log_q.real >= 0:
        raise EvaluationError("theta diverges for |q| >= 1")
    half = cmath.exp(log_x / 2)
    x = half * half
    value = half - 1 / half
    qk = ctx.q
    while True:
        factor = (1 - qk * x) * (1 - qk / x)
        value *= factor
        if abs(factor - 1) < ctx.tol:
            break
        qk *= ctx.q
    return value


# Expression trees -------------------------------------------------------------

Number = Union[int, float, complex]


class Expr:
    def __mul__(self, other: "Expr | Number") -> "Expr":
        return Prod((self, _wrap(other)))

    __rmul__ = __mul__

    def __truediv__(self, other: "Expr | Number") -> "Expr":
        return Quot(self, _wrap(other))

    def __rtruediv__(self, other: Number) -> "Expr":
        return Quot(_wrap(other), self)

    def __add__(self, other: "Expr | Number") -> "Expr":
        return Sum(((1, self), (1, _wrap(other))))

    __radd__ = __add__

    def __sub__(self, other: "Expr | Number") -> "Expr":
        return Sum(((1, self), (-1, _wrap(other))))

    def __neg__(self) -> "Expr":
        return Sum(((-1, self),))

    def __pow__(self, k: int) -> "Expr":
        return Pow(self, k)


def _wrap(x: "Expr | Number") -> Expr:
    return x if isinstance(x, Expr) else Const(complex(x))


@dataclass(frozen=True)
class Theta(Expr):
    arg: Mono

    def __str__(self) -> str:
        return f"th({self.arg!r})"


@dataclass(frozen=True)
class MonoFactor(Expr):
    mono: Mono

    def __str__(self) -> str:
        return repr(self.mono)


@dataclass(frozen=True)
class Const(Expr):
    value: complex

    def __str__(self) -> str:
        v = complex(self.value)
        return f"{v.real:g}" if v.imag == 0 else f"({v:g})"


@dataclass(frozen=True)
class Prod(Expr):
    factors: tuple[Expr, ...]

    def __str__(self) -> str:
        return "*".join(_paren(f) for f in self.factors) or "1"


@dataclass(frozen=True)
class Quot(Expr):
    num: Expr
    den: Expr

    def __str__(self) -> str:
        return f"{_paren(self.num)}/{_paren(self.den)}"


@dataclass(frozen=True)
class Sum(Expr):
    terms: tuple[tuple[complex, Expr], ...]

    def __str__(self) -> str:
        return " + ".join(str(e) if c == 1 else f"{Const(c)}*{_paren(e)}" for c, e in self.terms) or "0"


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    k: int

    def __str__(self) -> str:
        return f"{_paren(self.base)}^{self.k}"


def _paren(e: Expr) -> str:
    return f"({e})" if isinstance(e, (Sum, Quot, Prod)) else str(e)


def prod(factors: Iterable[Expr]) -> Expr:
    factors = tuple(factors)
    return Prod(factors) if factors else Const(1)


def th(arg: Mono) -> Theta:
    return Theta(arg)


def evaluate(e: Expr, ctx: EvalContext) -> complex:
    if isinstance(e, Theta):
        return theta(e.arg.log(ctx), ctx)
    if isinstance(e, MonoFactor):
        return cmath.exp(e.mono.log(ctx))
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Prod):
        value = 1 + 0j
        for f in e.factors:
            value *= evaluate(f, ctx)
        return value
    if isinstance(e, Quot):
        den = evaluate(e.den, ctx)
        num = evaluate(e.num, ctx)
        if abs(den) <= ctx.tol * max(1.0, abs(num)):
            raise EvaluationError(f"denominator vanishes: {e.den!r}")
        return num / den
    if isinstance(e, Sum):
        return sum((c * evaluate(t, ctx) for c, t in e.terms), 0j)
    if isinstance(e, Pow):
        base = evaluate(e.base, ctx)
        if e.k < 0 and abs(base) <= ctx.tol:
            raise EvaluationError(f"negative power of vanishing {e.base!r}")
        return base ** e.k
    raise TypeError(f"not an expression: {e!r}")


def substitute(e: Expr, mapping: Mapping[str, Mono], partial: bool = False) -> Expr:
    """Replace variables inside every theta argument and monomial factor."""
    if isinstance(e, Theta):
        return Theta(e.arg.substitute(mapping, partial))
    if isinstance(e, MonoFactor):
        return MonoFactor(e.mono.substitute(mapping, partial))
    if isinstance(e, Const):
        return e
    if isinstance(e, Prod):
        return Prod(tuple(substitute(f, mapping, partial) for f in e.factors))
    if isinstance(e, Quot):
        return Quot(substitute(e.num, mapping, partial), substitute(e.den, mapping, partial))
    if isinstance(e, Sum):
        return Sum(tuple((c, substitute(t, mapping, partial)) for c, t in e.terms))
    if isinstance(e, Pow):
        return Pow(substitute(e.base, mapping, partial), e.k)
    raise TypeError(f"not an expression: {e!r}")


def variables(e: Expr) -> set[str]:
    if isinstance(e, (Theta, MonoFactor)):
        return (e.arg if isinstance(e, Theta) else e.mono).variables()
    if isinstance(e, Const):
        return set()
    if isinstance(e, Prod):
        return set().union(*(variables(f) for f in e.factors))
    if isinstance(e, Quot):
        return variables(e.num) | variables(e.den)
    if isinstance(e, Sum):
        return set().union(*(variables(t) for _, t in e.terms))
    if isinstance(e, Pow):
        return variables(e.base)
    raise TypeError(f"not an expression: {e!r}")


def theta_factors(e: Expr) -> tuple[list[Mono], list[Mono], list[Mono], complex]:
    """Flatten a product/quotient into (numerator thetas, denominator thetas,
    monomial factors with sign, constant). Raises on sums."""
    num: list[Mono] = []
    den: list[Mono] = []
    monos: list[Mono] = []
    const = [1 + 0j]

    def walk(node: Expr, sign: int) -> None:
        if isinstance(node, Theta):
            (num if sign > 0 else den).append(node.arg)
        elif isinstance(node, MonoFactor):
            monos.append(node.mono ** sign)
        elif isinstance(node, Const):
            const[0] *= node.value ** sign
        elif isinstance(node, Prod):
            for f in node.factors:
                walk(f, sign)
        elif isinstance(node, Quot):
            walk(node.num, sign)
            walk(node.den, -sign)
        elif isinstance(node, Pow):
            for _ in range(abs(node.k)):
                walk(node.base, sign if node.k > 0 else -sign)
        else:
            raise TypeError(f"not a product of theta factors: {node!r}")

    walk(e, 1)
    return num, den, monos, const[0]


def swap_mirror(e: Expr, n_a: int, n_z: int, a_to_z: Mapping[int, int] | None = None,
                z_to_a: Mapping[int, int] | None = None) -> Expr:
    """Substitute a_i -> z_{a_to_z[i]}, z_k -> a_{z_to_a[k]}, h -> h^-1."""
    a_to_z = a_to_z or {i: i for i in range(1, n_a + 1)}
    z_to_a = z_to_a or {k: k for k in range(1, n_z + 1)}
    mapping = {f"a{i}": z(j) for i, j in a_to_z.items()}
    mapping.update({f"z{k}": a(j) for k, j in z_to_a.items()})
    mapping["h"] = hb(-1)
    return substitute(e, mapping, partial=True)


def scaled_error(lhs: complex, rhs: complex) -> float:
    return abs(lhs - rhs) / max(1.0, abs(lhs), abs(rhs))


def _orient(arg: Mono) -> tuple[Mono, int]:
    """Canonical representative of {x, 1/x} and the sign theta(x) = sign * theta(rep)."""
    inv = arg.inv()
    return (arg, 1) if not inv < arg else (inv, -1)


def cancel(e: Expr) -> Expr:
    """Cancel equal theta factors between numerator and denominator, using
    theta(1/x) = -theta(x). Expressions with sums are returned unchanged."""
    try:
        num, den, monos, const = theta_factors(e)
    except TypeError:
        return e
    counts: dict[Mono, int] = {}
    sign = 1
    for args, k in ((num, 1), (den, -1)):
        for arg in args:
            rep, s = _orient(arg)
            sign *= s
            counts[rep] = counts.get(rep, 0) + k
    top = [Theta(m) for m, k in sorted(counts.items(), key=lambda x: x[0]._items) for _ in range(max(k, 0))]
    bottom = [Theta(m) for m, k in sorted(counts.items(), key=lambda x: x[0]._items) for _ in range(max(-k, 0))]
    mono = ONE
    for m in monos:
        mono = mono * m
    factors = top + ([MonoFactor(mono)] if not mono.is_one() else [])
    value = const * sign
    if value != 1:
        factors = [Const(value)] + factors
    out = prod(factors)
    return Quot(out, prod(bottom)) if bottom else out


def has_pole(e: Expr) -> bool:
    """True if a denominator theta has argument identically 1."""
    try:
        _, den, _, _ = theta_factors(e)
    except TypeError:
        return False
    return any(arg.is_one() for arg in den)
