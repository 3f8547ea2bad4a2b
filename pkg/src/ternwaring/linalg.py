"""Exact dense linear algebra over prime fields and the rationals.

Every dimension count in the package goes through :func:`rank` or
:func:`kernel_basis`. Prime-field matrices are held as ``int64`` numpy arrays;
with ``p < 2**31`` a product of two residues stays below ``2**62``, so one
elimination step never overflows.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Integral

import numpy as np

DEFAULT_PRIME = 2_147_483_629
PRIME_ENV_VAR = "WARING_PRIME"


class DomainMismatchError(TypeError):
    """Matrix entries do not belong to the requested scalar domain."""


class SingularMatrixError(ValueError):
    """A square system has no unique solution."""


@lru_cache(maxsize=None)
def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class ScalarDomain:
    """Where matrix entries live: ``prime`` (with modulus ``p``), ``rational`` or ``float64``."""

    kind: str
    p: int | None = None

    def __post_init__(self):
        if self.kind not in ("prime", "rational", "float64"):
            raise ValueError(f"unknown scalar domain {self.kind!r}")
        if self.kind == "prime":
            if self.p is None or not is_prime(self.p) or self.p <= 10**6:
                raise ValueError(f"prime-field modulus must be a prime > 10^6, got {self.p}")
            if self.p >= 2**31:
                raise ValueError("prime-field modulus must be below 2^31 for int64 elimination")
        elif self.p is not None:
            raise ValueError(f"{self.kind} domain takes no modulus")

    @classmethod
    def prime_field(cls, p: int | None = None) -> "ScalarDomain":
        return cls("prime", default_prime() if p is None else int(p))

    @classmethod
    def rational(cls) -> "ScalarDomain":
        return cls("rational")

    @classmethod
    def float64(cls) -> "ScalarDomain":
        return cls("float64")


def default_prime() -> int:
    """The field modulus in effect: ``$WARING_PRIME`` if set, else :data:`DEFAULT_PRIME`."""
    value = os.environ.get(PRIME_ENV_VAR)
    return int(value) if value else DEFAULT_PRIME


def _resolve(domain: ScalarDomain | None) -> ScalarDomain:
    return ScalarDomain.prime_field() if domain is None else domain


def _as_prime_array(m, p: int) -> np.ndarray:
    arr = np.asarray(m)
    if arr.dtype == object:
        flat = arr.ravel()
        for x in flat:
            if isinstance(x, bool) or not isinstance(x, Integral):
                raise DomainMismatchError(f"entry {x!r} is not an integer residue mod {p}")
        arr = np.array([int(x) % p for x in flat], dtype=np.int64).reshape(arr.shape)
    elif np.issubdtype(arr.dtype, np.integer):
        arr = np.mod(arr.astype(np.int64), p)
    elif arr.size == 0:
        arr = arr.astype(np.int64)
    else:
        raise DomainMismatchError(f"{arr.dtype} entries cannot be used in the prime field F_{p}")
    if arr.ndim != 2:
        raise ValueError("expected a 2-d matrix")
    return arr


def _as_fraction_rows(m) -> list[list[Fraction]]:
    rows = []
    for row in m:
        out = []
        for x in row:
            if isinstance(x, bool) or not isinstance(x, (Integral, Fraction)):
                raise DomainMismatchError(f"entry {x!r} is not an exact rational")
            out.append(Fraction(x))
        rows.append(out)
    return rows


def _rref_mod_p(a: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    a = a.copy()
    nrows, ncols = a.shape
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        if r == nrows:
            break
        nz = np.flatnonzero(a[r:, col])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        inv = pow(int(a[r, col]), -1, p)
        a[r] = (a[r] * inv) % p
        factors = a[:, col].copy()
        factors[r] = 0
        rows = np.flatnonzero(factors)
        if rows.size:
            a[rows] = (a[rows] - (factors[rows, None] * a[r]) % p) % p
        pivots.append(col)
        r += 1
    return a[:r], pivots


def _rref_fraction(rows: list[list[Fraction]], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    a = [row[:] for row in rows]
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        if r == len(a):
            break
        piv = next((i for i in range(r, len(a)) if a[i][col] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][col]
        a[r] = [x * inv for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][col] != 0:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(col)
        r += 1
    return a[:r], pivots


def rref(m, domain: ScalarDomain | None = None):
    """Reduced row echelon form and pivot columns of ``m``."""
    domain = _resolve(domain)
    if domain.kind == "prime":
        return _rref_mod_p(_as_prime_array(m, domain.p), domain.p)
    if domain.kind == "rational":
        rows = _as_fraction_rows(m)
        ncols = len(rows[0]) if rows else 0
        return _rref_fraction(rows, ncols)
    raise DomainMismatchError("exact elimination is not available over float64")


def rank(m, domain: ScalarDomain | None = None) -> int:
    """Row rank of ``m`` by exact elimination (prime field by default)."""
    _, pivots = rref(m, domain)
    return len(pivots)


def _ncols(m) -> int:
    arr = np.asarray(m, dtype=object)
    return arr.shape[1] if arr.ndim == 2 else 0


def kernel_basis(m, domain: ScalarDomain | None = None) -> list:
    """Basis of the right kernel ``{v : m v = 0}``.

    Returns ``cols - rank(m)`` vectors, one per free column, each with a 1 in
    its free slot. Prime-field vectors are ``int64`` arrays of residues,
    rational vectors are lists of :class:`~fractions.Fraction`.
    """
    domain = _resolve(domain)
    ncols = _ncols(m)
    reduced, pivots = rref(m, domain)
    free = [j for j in range(ncols) if j not in set(pivots)]
    basis = []
    if domain.kind == "prime":
        p = domain.p
        for j in free:
            v = np.zeros(ncols, dtype=np.int64)
            v[j] = 1
            for row, pc in zip(reduced, pivots):
                v[pc] = (-row[j]) % p
            basis.append(v)
    else:
        for j in free:
            v = [Fraction(0)] * ncols
            v[j] = Fraction(1)
            for row, pc in zip(reduced, pivots):
                v[pc] = -row[j]
            basis.append(v)
    return basis


def solve_linear(m, b, domain: ScalarDomain | None = None):
    """Solve the square system ``m x = b``.

    Raises :class:`SingularMatrixError` when ``m`` is singular. Over float64
    a matrix whose condition number exceeds ``1/eps`` counts as singular.
    """
    domain = _resolve(domain)
    if domain.kind == "float64":
        a = np.asarray(m, dtype=float)
        rhs = np.asarray(b, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("solve_linear needs a square matrix")
        if a.size == 0 or not np.all(np.isfinite(a)) or np.linalg.cond(a) > 1.0 / np.finfo(float).eps:
            raise SingularMatrixError("matrix is numerically singular")
        return np.linalg.solve(a, rhs)

    n = len(m)
    if any(len(row) != n for row in m):
        raise ValueError("solve_linear needs a square matrix")
    if domain.kind == "prime":
        p = domain.p
        aug = np.concatenate([_as_prime_array(m, p), _as_prime_array([[x] for x in b], p)], axis=1)
        reduced, pivots = _rref_mod_p(aug, p)
        if pivots != list(range(n)):
            raise SingularMatrixError("matrix is singular mod p")
        return reduced[:, n].copy()
    rows = _as_fraction_rows(m)
    rhs = _as_fraction_rows([[x] for x in b])
    reduced, pivots = _rref_fraction([r + s for r, s in zip(rows, rhs)], n + 1)
    if pivots != list(range(n)):
        raise SingularMatrixError("matrix is singular")
    return [row[n] for row in reduced]


def matvec(m, v, domain: ScalarDomain | None = None):
    """``m @ v`` in the given exact domain (used to check kernel vectors)."""
    domain = _resolve(domain)
    if domain.kind == "prime":
        p = domain.p
        a = _as_prime_array(m, p)
        x = np.mod(np.asarray(v, dtype=np.int64), p)
        out = np.zeros(a.shape[0], dtype=np.int64)
        for j in range(a.shape[1]):
            out = (out + (a[:, j] * x[j]) % p) % p
        return out
    rows = _as_fraction_rows(m)
    return [sum((x * Fraction(y) for x, y in zip(row, v)), Fraction(0)) for row in rows]
