"""Linear systems with assigned double and simple points, on the plane and on X.

All matrices are built over F_p from random points ("general position" with
failure probability of order deg/p), and dimensions are vector-space
dimensions of the kernel.

Plane rows: a double point at ``u`` gives ``F(u)`` and the three partials of
``F`` at ``u`` (generic rank 3, the extra row is the Euler relation); a simple
point gives ``F(u)``.

Bundle rows: a section of the tautological bundle is a pair ``(F, G)`` of
degrees ``(c, d)``, taking the value ``a1 F(u) + a2 G(u)`` at ``(u, a)``. A
double point gives ``F(u)``, ``G(u)`` and ``a1 dF/du_i + a2 dG/du_i``
(generic rank 4); a simple point gives ``a1 F(u) + a2 G(u)``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from math import comb

import numpy as np

from .bundle import BundlePoint, random_point, trial_rng
from .classifier import is_perfect, s_value, variant_for
from .forms import gradient_rows, n_monomials, value_row
from .linalg import ScalarDomain, kernel_basis, rank

AH_EXCEPTIONS = {(2, 2): 1, (4, 5): 1}


class InconsistentVariantError(ValueError):
    """The requested degeneration does not match the case's residue class."""


@dataclass
class ConditionScheme:
    """Double and simple base points, either on the plane (``c`` unused) or on X."""

    ambient: str
    d: int
    c: int | None = None
    double_points: list = field(default_factory=list)
    simple_points: list = field(default_factory=list)

    def __post_init__(self):
        if self.ambient not in ("plane", "bundle"):
            raise ValueError(f"unknown ambient {self.ambient!r}")
        if self.ambient == "bundle" and self.c is None:
            raise ValueError("a bundle scheme needs both degrees")


@dataclass
class SplitReport:
    dim_total: int
    dim_residual: int
    dim_restricted: int

    @property
    def surjective(self) -> bool:
        return self.dim_total == self.dim_residual + self.dim_restricted

    def triple(self) -> tuple[int, int, int]:
        return (self.dim_total, self.dim_residual, self.dim_restricted)

    def to_json(self) -> dict:
        return {**asdict(self), "surjective": self.surjective}


def _prime(p: int | None) -> ScalarDomain:
    return ScalarDomain.prime_field(p)


def _random_plane_point(rng, p):
    while True:
        u = tuple(int(x) for x in rng.integers(0, p, size=3))
        if any(u):
            return u


def plane_conditions(d: int, doubles, simples, p: int) -> list[list[int]]:
    rows = []
    for u in doubles:
        rows.append(value_row(u, d, p))
        if d >= 1:
            rows.extend(gradient_rows(u, d, p))
    for u in simples:
        rows.append(value_row(u, d, p))
    return rows


def _kernel_dim(rows, ncols: int, domain: ScalarDomain) -> int:
    return ncols - (rank(rows, domain) if rows else 0)


def plane_system_dim(d: int, r: int, t: int, seed: int = 0, p: int | None = None) -> int:
    """dim of the space of degree-d forms singular at r and vanishing at t random points."""
    if d < 0 or r < 0 or t < 0:
        raise ValueError("d, r, t must be non-negative")
    domain = _prime(p)
    rng = trial_rng(seed, 0)
    pts = [_random_plane_point(rng, domain.p) for _ in range(r + t)]
    rows = plane_conditions(d, pts[:r], pts[r:], domain.p)
    return _kernel_dim(rows, n_monomials(d), domain)


def ah_expected_dim(d: int, r: int, t: int) -> int:
    """Dimension predicted for the plane system with r double and t simple general points."""
    base = AH_EXCEPTIONS.get((d, r), max(0, comb(d + 2, 2) - 3 * r))
    return max(0, base - t)


def nodal_hypotheses_ok(d: int, r: int, t: int) -> bool:
    """Arithmetic hypotheses under which a general member has exactly r nodes."""
    return (d, r, t) != (6, 9, 0) and comb(d - 1, 2) >= r and comb(d + 2, 2) - 1 >= 3 * r + t


def taut_conditions(c: int, d: int, doubles, simples, p: int) -> list[list[int]]:
    nc = n_monomials(c)
    nd = n_monomials(d)
    rows = []
    for pt in doubles:
        u, (a1, a2) = pt.u, pt.a
        rows.append(value_row(u, c, p) + [0] * nd)
        rows.append([0] * nc + value_row(u, d, p))
        for gc, gd in zip(gradient_rows(u, c, p), gradient_rows(u, d, p)):
            rows.append([a1 * x % p for x in gc] + [a2 * x % p for x in gd])
    for pt in simples:
        u, (a1, a2) = pt.u, pt.a
        rows.append([a1 * x % p for x in value_row(u, c, p)] + [a2 * x % p for x in value_row(u, d, p)])
    return rows


def _taut_matrix(c, d, scheme: ConditionScheme, p: int):
    if scheme.ambient != "bundle":
        raise ValueError("tautological systems need a bundle scheme")
    if (scheme.c, scheme.d) != (c, d):
        raise ValueError(f"scheme is for ({scheme.c},{scheme.d}), not ({c},{d})")
    return taut_conditions(c, d, scheme.double_points, scheme.simple_points, p)


def taut_system_dim(c: int, d: int, scheme: ConditionScheme, p: int | None = None) -> int:
    """dim of the space of sections (F, G) satisfying the scheme's conditions."""
    domain = _prime(p)
    rows = _taut_matrix(c, d, scheme, domain.p)
    return _kernel_dim(rows, n_monomials(c) + n_monomials(d), domain)


def taut_kernel(c: int, d: int, scheme: ConditionScheme, p: int | None = None) -> list[np.ndarray]:
    """Basis of the sections; each vector is ``F``'s coefficients followed by ``G``'s."""
    domain = _prime(p)
    rows = _taut_matrix(c, d, scheme, domain.p)
    if not rows:
        return [np.eye(n_monomials(c) + n_monomials(d), dtype=np.int64)[i]
                for i in range(n_monomials(c) + n_monomials(d))]
    return kernel_basis(rows, domain)


def section_value(section, c: int, d: int, pt: BundlePoint, p: int) -> int:
    """``a1 F(u) + a2 G(u)`` mod p for a section vector ``(F | G)``."""
    nc = n_monomials(c)
    fv = sum(int(x) * y for x, y in zip(section[:nc], value_row(pt.u, c, p))) % p
    gv = sum(int(x) * y for x, y in zip(section[nc:], value_row(pt.u, d, p))) % p
    return (pt.a[0] * fv + pt.a[1] * gv) % p


def general_scheme(c: int, d: int, n_doubles: int, seed: int = 0, p: int | None = None,
                   n_simples: int = 0) -> ConditionScheme:
    """Random double (and simple) points on X."""
    domain = _prime(p)
    rng = trial_rng(seed, 0)
    doubles = [random_point(rng, domain.p) for _ in range(n_doubles)]
    simples = [random_point(rng, domain.p) for _ in range(n_simples)]
    return ConditionScheme("bundle", d, c, doubles, simples)


def specialized_scheme(c: int, d: int, variant: str, seed: int = 0, p: int | None = None) -> ConditionScheme:
    """k-1 double points, the first s of them on the section Z (``a = (0, 1)``)."""
    if variant not in ("first", "second"):
        raise ValueError(f"variant must be 'first' or 'second', got {variant!r}")
    perfect, k = is_perfect(c, d)
    if not perfect:
        raise InconsistentVariantError(f"({c},{d}) is not a perfect case")
    expected = variant_for(c, d)
    if variant != expected:
        raise InconsistentVariantError(
            f"({c},{d}) is in residue class {'0' if expected == 'first' else '8'} and needs the {expected} variant"
        )
    s = s_value(c, d)
    domain = _prime(p)
    rng = trial_rng(seed, 0)
    on_z = [random_point(rng, domain.p, on_section=True) for _ in range(s)]
    general = [random_point(rng, domain.p) for _ in range(k - 1 - s)]
    return ConditionScheme("bundle", d, c, on_z + general, [])


def castelnuovo_split(c: int, d: int, variant: str, seed: int = 0, p: int | None = None) -> SplitReport:
    """Dimensions in ``0 -> L ∩ I_Z -> L -> L_Z`` for the specialized scheme.

    The residual part is cut out by ``G = 0`` (a section contains Z exactly
    when its degree-d block vanishes). The target ``L_Z`` is the plane system
    of degree d double at the Z-supported base points and simple at the traces
    ``(u, (0, 1))`` of the fibers through the other points.
    """
    domain = _prime(p)
    scheme = specialized_scheme(c, d, variant, seed, p)
    nc, nd = n_monomials(c), n_monomials(d)
    rows = taut_conditions(c, d, scheme.double_points, [], domain.p)
    total = _kernel_dim(rows, nc + nd, domain)

    contain_z = [[0] * nc + [int(j == i) for j in range(nd)] for i in range(nd)]
    residual = _kernel_dim(rows + contain_z, nc + nd, domain)

    on_z = [pt.u for pt in scheme.double_points if pt.on_section()]
    off_z = [pt.u for pt in scheme.double_points if not pt.on_section()]
    restricted = _kernel_dim(plane_conditions(d, on_z, off_z, domain.p), nd, domain)
    return SplitReport(total, residual, restricted)
