"""Homogeneous ternary forms stored as dense coefficient vectors.

Coefficients are plain monomial coefficients, indexed in graded-lex order with
``x0 > x1 > x2``: degree 2 is ``x0^2, x0x1, x0x2, x1^2, x1x2, x2^2``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from numbers import Integral, Real
from pathlib import Path

import numpy as np

from .linalg import DomainMismatchError, ScalarDomain

Monomial = tuple[int, int, int]


@lru_cache(maxsize=None)
def monomial_basis(degree: int) -> tuple[Monomial, ...]:
    if degree < 0:
        raise ValueError("degree must be non-negative")
    return tuple(
        (e0, e1, degree - e0 - e1)
        for e0 in range(degree, -1, -1)
        for e1 in range(degree - e0, -1, -1)
    )


@lru_cache(maxsize=None)
def monomial_position(degree: int) -> dict[Monomial, int]:
    return {e: i for i, e in enumerate(monomial_basis(degree))}


def n_monomials(degree: int) -> int:
    return comb(degree + 2, 2)


@lru_cache(maxsize=None)
def multinomials(degree: int) -> tuple[int, ...]:
    f = factorial(degree)
    return tuple(f // (factorial(a) * factorial(b) * factorial(c)) for a, b, c in monomial_basis(degree))


@lru_cache(maxsize=None)
def exponent_array(degree: int) -> np.ndarray:
    return np.array(monomial_basis(degree), dtype=np.int64).reshape(-1, 3)


def _check_scalar(x, domain: ScalarDomain):
    if domain.kind == "float64":
        if not isinstance(x, Real):
            raise DomainMismatchError(f"{x!r} is not a real number")
        return float(x)
    if isinstance(x, bool) or not isinstance(x, (Integral, Fraction)):
        raise DomainMismatchError(f"{x!r} is not an exact scalar for the {domain.kind} domain")
    if domain.kind == "prime":
        if isinstance(x, Fraction):
            if x.denominator != 1:
                return x.numerator * pow(x.denominator, -1, domain.p) % domain.p
            x = x.numerator
        return int(x) % domain.p
    return Fraction(x)


def _reduce(x, domain: ScalarDomain):
    return x % domain.p if domain.kind == "prime" else x


def _monomial_value(u, e: Monomial, domain: ScalarDomain):
    if domain.kind == "prime":
        p = domain.p
        return pow(u[0], e[0], p) * pow(u[1], e[1], p) % p * pow(u[2], e[2], p) % p
    return u[0] ** e[0] * u[1] ** e[1] * u[2] ** e[2]


@dataclass
class TernaryForm:
    degree: int
    coeffs: list
    domain: ScalarDomain = field(default_factory=ScalarDomain.rational)

    def __post_init__(self):
        if len(self.coeffs) != n_monomials(self.degree):
            raise ValueError(
                f"degree {self.degree} form needs {n_monomials(self.degree)} coefficients, got {len(self.coeffs)}"
            )
        self.coeffs = [_check_scalar(x, self.domain) for x in self.coeffs]

    @classmethod
    def from_terms(cls, degree: int, terms: dict, domain: ScalarDomain | None = None) -> "TernaryForm":
        """Build a form from ``{(e0, e1, e2): coeff}``."""
        domain = ScalarDomain.rational() if domain is None else domain
        coeffs = [0] * n_monomials(degree)
        pos = monomial_position(degree)
        for e, value in terms.items():
            coeffs[pos[tuple(e)]] = value
        return cls(degree, coeffs, domain)

    def __call__(self, u):
        return evaluate(self, u)


def evaluate(F: TernaryForm, u):
    """Value of ``F`` at the point ``u = (u0, u1, u2)``."""
    u = [_check_scalar(x, F.domain) for x in u]
    total = 0
    for coeff, e in zip(F.coeffs, monomial_basis(F.degree)):
        if coeff:
            total = _reduce(total + coeff * _monomial_value(u, e, F.domain), F.domain)
    return total


def gradient(F: TernaryForm, u) -> tuple:
    """``(dF/du0, dF/du1, dF/du2)`` at ``u``."""
    if F.degree < 1:
        raise ValueError("gradient needs a form of degree >= 1")
    u = [_check_scalar(x, F.domain) for x in u]
    grad = [0, 0, 0]
    for coeff, e in zip(F.coeffs, monomial_basis(F.degree)):
        if not coeff:
            continue
        for i in range(3):
            if e[i]:
                lowered = tuple(e[j] - (j == i) for j in range(3))
                term = coeff * e[i] * _monomial_value(u, lowered, F.domain)
                grad[i] = _reduce(grad[i] + term, F.domain)
    return tuple(grad)


def power_of_linear(l, m: int, domain: ScalarDomain | None = None) -> TernaryForm:
    """The form ``(l0 x0 + l1 x1 + l2 x2)^m``."""
    if m < 0:
        raise ValueError("power must be non-negative")
    domain = ScalarDomain.rational() if domain is None else domain
    l = [_check_scalar(x, domain) for x in l]
    coeffs = [
        _reduce(mult * _monomial_value(l, e, domain), domain)
        for mult, e in zip(multinomials(m), monomial_basis(m))
    ]
    return TernaryForm(m, coeffs, domain)


# Row builders for interpolation matrices. These work on raw residues mod p
# and skip the per-entry domain checks of the public API.

def value_row(u, degree: int, p: int) -> list[int]:
    """``[u^e for e in basis]``: the linear functional ``F -> F(u)`` on coefficients."""
    return [pow(u[0], a, p) * pow(u[1], b, p) % p * pow(u[2], c, p) % p for a, b, c in monomial_basis(degree)]


def gradient_rows(u, degree: int, p: int) -> list[list[int]]:
    """The three functionals ``F -> dF/du_i (u)`` on coefficients."""
    rows = []
    for i in range(3):
        row = []
        for e in monomial_basis(degree):
            if e[i] == 0:
                row.append(0)
                continue
            low = [e[0], e[1], e[2]]
            low[i] -= 1
            val = e[i] * pow(u[0], low[0], p) * pow(u[1], low[1], p) % p * pow(u[2], low[2], p) % p
            row.append(val)
        rows.append(row)
    return rows


def power_coeffs_mod_p(l, m: int, p: int) -> list[int]:
    """Coefficient vector of ``l^m`` mod ``p``."""
    return [mult * pow(l[0], a, p) * pow(l[1], b, p) % p * pow(l[2], c, p) % p
            for mult, (a, b, c) in zip(multinomials(m), monomial_basis(m))]


def power_coeffs_float(l, m: int) -> np.ndarray:
    """Coefficient vector of ``l^m`` for a real linear form ``l``.

    ``l`` may also be a ``(k, 3)`` array, giving one row per form.
    """
    l = np.asarray(l, dtype=float)
    powers = l[..., None, :] ** exponent_array(m)
    return np.asarray(multinomials(m), dtype=float) * powers.prod(axis=-1)


def power_coeffs_jacobian(l, m: int) -> np.ndarray:
    """``d(l^m)/d l_i``, shape ``(..., n_monomials(m), 3)``; ``l`` as in :func:`power_coeffs_float`."""
    l = np.asarray(l, dtype=float)
    E = exponent_array(m)
    mult = np.asarray(multinomials(m), dtype=float)
    out = np.zeros(l.shape[:-1] + (len(E), 3))
    for i in range(3):
        lowered = E.copy()
        lowered[:, i] = np.maximum(lowered[:, i] - 1, 0)
        out[..., i] = mult * E[:, i] * (l[..., None, :] ** lowered).prod(axis=-1)
    return out


@dataclass
class FormPair:
    """A pair ``(f, g)`` of degrees ``c <= d``; its concatenated coefficients are a point of P^N."""

    c: int
    d: int
    f: list
    g: list

    def __post_init__(self):
        if len(self.f) != n_monomials(self.c) or len(self.g) != n_monomials(self.d):
            raise ValueError(
                f"coefficient counts {len(self.f)}, {len(self.g)} do not match degrees ({self.c}, {self.d})"
            )

    @property
    def N(self) -> int:
        return n_monomials(self.c) + n_monomials(self.d) - 1

    def vector(self) -> np.ndarray:
        return np.concatenate([np.asarray(self.f, dtype=float), np.asarray(self.g, dtype=float)])

    def to_json(self) -> dict:
        def enc(x):
            if isinstance(x, Fraction):
                return str(x)
            if isinstance(x, Integral):
                return str(int(x))
            return float(x)

        return {"c": self.c, "d": self.d, "f": [enc(x) for x in self.f], "g": [enc(x) for x in self.g]}

    @classmethod
    def from_json(cls, obj: dict) -> "FormPair":
        def dec(x):
            if isinstance(x, str):
                return Fraction(x)
            if isinstance(x, bool) or not isinstance(x, (int, float)):
                raise ValueError(f"bad coefficient {x!r}")
            return x

        return cls(int(obj["c"]), int(obj["d"]), [dec(x) for x in obj["f"]], [dec(x) for x in obj["g"]])

    @classmethod
    def load(cls, path) -> "FormPair":
        return cls.from_json(json.loads(Path(path).read_text()))

    def dump(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2) + "\n")
