"""The threefold X = P(O(c) + O(d)) over the plane, in its tautological embedding.

A point of X is ``[a1 * l^c, a2 * l^d]`` for a linear form ``l`` (the base
coordinate ``u``) and fiber coordinates ``(a1, a2)``. Points with ``a1 = 0``
form the section Z.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .forms import monomial_basis, multinomials, n_monomials
from .linalg import ScalarDomain, rank


class InvalidPointError(ValueError):
    pass


@dataclass(frozen=True)
class BundlePoint:
    u: tuple
    a: tuple

    def __post_init__(self):
        object.__setattr__(self, "u", tuple(self.u))
        object.__setattr__(self, "a", tuple(self.a))
        if len(self.u) != 3 or len(self.a) != 2:
            raise InvalidPointError("a bundle point needs 3 base and 2 fiber coordinates")

    def on_section(self) -> bool:
        return self.a[0] == 0


def ambient_dim(c: int, d: int) -> int:
    """N, with X inside P^N."""
    return n_monomials(c) + n_monomials(d) - 1


def _domain_ops(domain: ScalarDomain):
    if domain.kind == "prime":
        p = domain.p
        return (lambda x: int(x) % p), (lambda x: x % p), (lambda x, e: pow(x, e, p))
    if domain.kind == "rational":
        return Fraction, (lambda x: x), (lambda x, e: x**e)
    return float, (lambda x: x), (lambda x, e: x**e)


def _check_point(pt: BundlePoint, conv):
    u = [conv(x) for x in pt.u]
    a = [conv(x) for x in pt.a]
    if all(x == 0 for x in u):
        raise InvalidPointError("base coordinate u must be nonzero")
    if all(x == 0 for x in a):
        raise InvalidPointError("fiber coordinate a must be nonzero")
    return u, a


def _power_and_partials(u, m, conv, red, pw):
    """Coefficients of ``l^m`` and of its three partials in ``u``."""
    power, partials = [], [[], [], []]
    for mult, e in zip(multinomials(m), monomial_basis(m)):
        power.append(red(mult * pw(u[0], e[0]) * pw(u[1], e[1]) * pw(u[2], e[2])))
        for i in range(3):
            if e[i] == 0:
                partials[i].append(conv(0))
                continue
            low = list(e)
            low[i] -= 1
            partials[i].append(red(mult * e[i] * pw(u[0], low[0]) * pw(u[1], low[1]) * pw(u[2], low[2])))
    return power, partials


def embed(pt: BundlePoint, c: int, d: int, domain: ScalarDomain | None = None) -> list:
    """Affine representative ``(a1 l^c | a2 l^d)`` of the point, length N+1."""
    domain = ScalarDomain.prime_field() if domain is None else domain
    conv, red, pw = _domain_ops(domain)
    u, a = _check_point(pt, conv)
    pc, _ = _power_and_partials(u, c, conv, red, pw)
    pd, _ = _power_and_partials(u, d, conv, red, pw)
    return [red(a[0] * x) for x in pc] + [red(a[1] * x) for x in pd]


def tangent_frame(pt: BundlePoint, c: int, d: int, domain: ScalarDomain | None = None) -> list[list]:
    """The five partials of ``(u, a) -> (a1 l^c, a2 l^d)`` at ``pt``.

    Order: d/da1, d/da2, d/du0, d/du1, d/du2. They span the affine cone over
    the embedded tangent space; generic rank is 4.
    """
    domain = ScalarDomain.prime_field() if domain is None else domain
    conv, red, pw = _domain_ops(domain)
    u, a = _check_point(pt, conv)
    zero = conv(0)
    pc, dc = _power_and_partials(u, c, conv, red, pw)
    pd, dd = _power_and_partials(u, d, conv, red, pw)
    frame = [pc + [zero] * len(pd), [zero] * len(pc) + pd]
    for i in range(3):
        frame.append([red(a[0] * x) for x in dc[i]] + [red(a[1] * x) for x in dd[i]])
    return frame


def trial_rng(seed: int, index: int) -> np.random.Generator:
    """Independent generator for trial/start ``index`` of a run seeded with ``seed``."""
    return np.random.default_rng([int(seed), int(index)])


def random_point(rng: np.random.Generator, p: int, on_section: bool = False) -> BundlePoint:
    """Uniform point of X over F_p (resampled until valid); ``on_section`` forces ``a = (0, 1)``."""
    while True:
        u = tuple(int(x) for x in rng.integers(0, p, size=3))
        if on_section:
            a = (0, 1)
        else:
            a = tuple(int(x) for x in rng.integers(0, p, size=2))
        if any(u) and any(a):
            return BundlePoint(u, a)


def terracini_rank(c: int, d: int, points, domain: ScalarDomain | None = None) -> int:
    """Rank of the stacked tangent frames at ``points``."""
    rows = []
    for pt in points:
        rows.extend(tangent_frame(pt, c, d, domain))
    if not rows:
        return 0
    return rank(rows, domain)


def secant_dimension(c: int, d: int, k: int, trials: int = 3, seed: int = 0, p: int | None = None) -> int:
    """Projective dimension of the k-th secant variety of X, by Terracini's lemma.

    Each trial stacks the tangent frames at k random points over F_p; the
    maximum rank over trials, minus one, is returned. Special points can only
    lower the rank, so the value is a lower bound that is exact with
    probability at least ``1 - deg/p`` per trial.
    """
    if k < 1 or trials < 1:
        raise ValueError("need k >= 1 and trials >= 1")
    domain = ScalarDomain.prime_field(p)
    best = 0
    for t in range(trials):
        rng = trial_rng(seed, t)
        pts = [random_point(rng, domain.p) for _ in range(k)]
        best = max(best, terracini_rank(c, d, pts, domain))
    return best - 1


def expected_secant_dimension(c: int, d: int, k: int) -> int:
    return min(4 * k - 1, ambient_dim(c, d))


def is_defective(c: int, d: int, k: int, trials: int = 3, seed: int = 0, p: int | None = None) -> bool:
    return secant_dimension(c, d, k, trials, seed, p) < expected_secant_dimension(c, d, k)


# ---------------------------------------------------------------------------
# Chow ring of X: generated by T (tautological) and H (pullback of a line),
# with H^3 = 0 and T^2 = (c+d) T H - c d H^2. T H^2 is the class of a point.

CHOW_BASIS = ((0, 0), (1, 0), (0, 1), (1, 1), (0, 2), (1, 2))

Poly = dict  # {(deg_T, deg_H): int}


def _poly_add(p: Poly, q: Poly, sign: int = 1) -> Poly:
    out = dict(p)
    for m, v in q.items():
        out[m] = out.get(m, 0) + sign * v
    return {m: v for m, v in out.items() if v}


def _poly_mul(p: Poly, q: Poly) -> Poly:
    out: Poly = {}
    for (a1, b1), v1 in p.items():
        for (a2, b2), v2 in q.items():
            m = (a1 + a2, b1 + b2)
            out[m] = out.get(m, 0) + v1 * v2
    return {m: v for m, v in out.items() if v}


def _poly_pow(p: Poly, n: int) -> Poly:
    out: Poly = {(0, 0): 1}
    for _ in range(n):
        out = _poly_mul(out, p)
    return out


_TOKEN = re.compile(r"\s*(?:(\d+)|(\*\*|[-+*^()TH]))")


class ChowParseError(ValueError):
    pass


def parse_chow_expr(text: str) -> Poly:
    """Parse an integer polynomial in ``T`` and ``H``.

    Accepts ``+ - * ^ **``, parentheses and implicit products such as ``4H``
    or ``(T-H)(T+H)``.
    """
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ChowParseError(f"unexpected character at {pos}: {text[pos:]!r}")
        tokens.append(m.group(1) or ("^" if m.group(2) == "**" else m.group(2)))
        pos = m.end()
    tokens.append(None)
    i = 0

    def peek():
        return tokens[i]

    def take(expected=None):
        nonlocal i
        tok = tokens[i]
        if expected is not None and tok != expected:
            raise ChowParseError(f"expected {expected!r}, got {tok!r}")
        i += 1
        return tok

    def expr():
        out = term()
        while peek() in ("+", "-"):
            sign = 1 if take() == "+" else -1
            out = _poly_add(out, term(), sign)
        return out

    def term():
        out = unary()
        while True:
            if peek() == "*":
                take()
            elif peek() is None or not (peek().isdigit() or peek() in ("T", "H", "(")):
                return out
            out = _poly_mul(out, unary())

    def unary():
        if peek() == "-":
            take()
            return _poly_mul({(0, 0): -1}, unary())
        if peek() == "+":
            take()
            return unary()
        return power()

    def power():
        base = atom()
        if peek() == "^":
            take()
            tok = take()
            if tok is None or not tok.isdigit():
                raise ChowParseError("exponent must be a non-negative integer")
            base = _poly_pow(base, int(tok))
        return base

    def atom():
        tok = take()
        if tok is None:
            raise ChowParseError("unexpected end of expression")
        if tok.isdigit():
            return {(0, 0): int(tok)} if int(tok) else {}
        if tok == "T":
            return {(1, 0): 1}
        if tok == "H":
            return {(0, 1): 1}
        if tok == "(":
            out = expr()
            take(")")
            return out
        raise ChowParseError(f"unexpected token {tok!r}")

    result = expr()
    if peek() is not None:
        raise ChowParseError(f"trailing input starting at {peek()!r}")
    return result


@lru_cache(maxsize=None)
def _reduce_monomial(a: int, b: int, c: int, d: int) -> tuple:
    if b >= 3 or a + b > 3:
        return ()
    if a <= 1:
        return (((a, b), 1),)
    # T^a H^b = T^(a-2) H^b * ((c+d) T H - c d H^2)
    out: Poly = {}
    for m, v in _reduce_monomial(a - 1, b + 1, c, d):
        out[m] = out.get(m, 0) + (c + d) * v
    for m, v in _reduce_monomial(a - 2, b + 2, c, d):
        out[m] = out.get(m, 0) - c * d * v
    return tuple((m, v) for m, v in out.items() if v)


@dataclass(frozen=True)
class ChowClass:
    """Element of the intersection ring of X over the basis 1; T, H; TH, H^2; TH^2."""

    c: int
    d: int
    coeffs: tuple  # aligned with CHOW_BASIS

    @classmethod
    def from_poly(cls, poly: Poly, c: int, d: int) -> "ChowClass":
        acc = dict.fromkeys(CHOW_BASIS, 0)
        for (a, b), v in poly.items():
            for m, w in _reduce_monomial(a, b, c, d):
                acc[m] += v * w
        return cls(c, d, tuple(acc[m] for m in CHOW_BASIS))

    def as_dict(self) -> dict:
        return {m: v for m, v in zip(CHOW_BASIS, self.coeffs) if v}

    def __add__(self, other: "ChowClass") -> "ChowClass":
        return ChowClass(self.c, self.d, tuple(x + y for x, y in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "ChowClass") -> "ChowClass":
        return ChowClass(self.c, self.d, tuple(x - y for x, y in zip(self.coeffs, other.coeffs)))

    def __mul__(self, other: "ChowClass") -> "ChowClass":
        if (self.c, self.d) != (other.c, other.d):
            raise ValueError("classes live on different bundles")
        return ChowClass.from_poly(_poly_mul(self.as_dict(), other.as_dict()), self.c, self.d)

    def is_top(self) -> bool:
        return all(v == 0 for m, v in zip(CHOW_BASIS, self.coeffs) if m != (1, 2))

    def degree(self) -> int:
        """Integer value of a top-dimensional class (T H^2 counts 1)."""
        if not self.is_top():
            raise ValueError("class is not top-dimensional")
        return self.coeffs[-1]

    def __str__(self) -> str:
        names = {(0, 0): "1", (1, 0): "T", (0, 1): "H", (1, 1): "T*H", (0, 2): "H^2", (1, 2): "T*H^2"}
        parts = [f"{v}*{names[m]}" if m != (0, 0) else str(v) for m, v in zip(CHOW_BASIS, self.coeffs) if v]
        return " + ".join(parts).replace("+ -", "- ") if parts else "0"


def chow_reduce(expr, c: int, d: int) -> ChowClass:
    """Reduce a polynomial in T, H (string or ``{(i, j): coeff}``) in the Chow ring of X."""
    poly = parse_chow_expr(expr) if isinstance(expr, str) else expr
    return ChowClass.from_poly(poly, c, d)


def chow_degree(expr, c: int, d: int) -> int:
    return chow_reduce(expr, c, d).degree()
