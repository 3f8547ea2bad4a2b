"""Case arithmetic for pairs of ternary forms of degrees c <= d.

Perfect cases, the decomposition length k, the Waring-rank and hyperbola
bounds, the residue class mod 16, the number s of base points moved onto the
section Z, the genus of the restricted curves, and the final verdict.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from math import comb
from typing import NamedTuple

IDENTIFIABLE = "identifiable"
NOT_IDENTIFIABLE = "not-identifiable"
EXCLUDED = "excluded-by-citation"

CSV_FIELDS = (
    "c", "d", "perfect", "k", "N", "rank_bound_defective", "hyperbola_ok",
    "residue_mod_16", "s", "s_in_range", "genus", "verdict", "provenance",
)


class OrderError(ValueError):
    """Degrees must satisfy 1 <= c <= d."""


class NotPerfectError(ValueError):
    pass


class RangeError(ValueError):
    """s falls outside {0, ..., k-1}."""


def _check_order(c: int, d: int) -> None:
    if not (1 <= c <= d):
        raise OrderError(f"need 1 <= c <= d, got c={c}, d={d}")


def is_perfect(c: int, d: int) -> tuple[bool, int | None]:
    """Whether the decomposition system is square, and its length k if so."""
    _check_order(c, d)
    total = comb(c + 2, 2) + comb(d + 2, 2)
    return (True, total // 4) if total % 4 == 0 else (False, None)


def _k(c: int, d: int) -> int:
    perfect, k = is_perfect(c, d)
    if not perfect:
        raise NotPerfectError(f"({c},{d}) is not a perfect case")
    return k


def perfect_cases_upto(bound: int) -> list[tuple[int, int]]:
    if bound < 1:
        raise ValueError("bound must be >= 1")
    return [(c, d) for c in range(1, bound + 1) for d in range(c, bound + 1) if is_perfect(c, d)[0]]


def generic_waring_rank(d: int) -> int:
    """Waring rank of a general ternary form of degree d."""
    if d == 2:
        return 3
    if d == 4:
        return 6
    return -(-comb(d + 2, 2) // 3)


def rank_bound_defective(c: int, d: int) -> bool:
    """True when the degree-d form alone already needs more than k summands."""
    return generic_waring_rank(d) > _k(c, d)


def hyperbola_ok(c: int, d: int) -> bool:
    return d * d + 3 * d <= 3 * c * c + 9 * c + 4


def _residue_value(c: int, d: int) -> int:
    return 3 * d * d + 9 * d - c * c - 3 * c - 12


def residue_class(c: int, d: int) -> int:
    """``3d^2 + 9d - c^2 - 3c - 12 mod 16``; always 0 or 8 for perfect cases."""
    _k(c, d)
    r = _residue_value(c, d) % 16
    assert r in (0, 8), f"residue {r} for perfect case ({c},{d}) is not 0 or 8 mod 16"
    return r


def variant_for(c: int, d: int) -> str:
    """Degeneration used for the case: ``first`` (class 0) or ``second`` (class 8)."""
    return "first" if residue_class(c, d) == 0 else "second"


def s_raw(c: int, d: int) -> int:
    """s before the range check. Class 0 subtracts 12, class 8 subtracts 4."""
    offset = 12 if residue_class(c, d) == 0 else 4
    num = 3 * d * d + 9 * d - c * c - 3 * c - offset
    assert num % 16 == 0
    return num // 16


def s_value(c: int, d: int) -> int:
    """Number of double points specialized onto Z; must lie in ``0..k-1``."""
    s = s_raw(c, d)
    k = _k(c, d)
    if not 0 <= s <= k - 1:
        why = "" if hyperbola_ok(c, d) else " (the bound d^2+3d <= 3c^2+9c+4 fails)"
        raise RangeError(f"s = {s} is outside 0..{k - 1} for ({c},{d}){why}")
    return s


class Genus(NamedTuple):
    genus: int
    positive: bool  # the positivity the non-rationality argument needs


def genus_of_restriction(c: int, d: int) -> Genus:
    """Arithmetic genus of a general nodal curve in the restricted system.

    Class 0: degree d with s double points. Class 8: degree c with
    ``k-1-s`` double points.
    """
    if c < 3:
        raise ValueError("genus is only used for c >= 3")
    k = _k(c, d)
    s = s_raw(c, d)
    if residue_class(c, d) == 0:
        g = comb(d - 1, 2) - s
        return Genus(g, g > 0 and c >= 4 and d >= 6)
    g = comb(c - 1, 2) - (k - 1 - s)
    return Genus(g, g >= 1 and c >= 8)


@dataclass
class CaseReport:
    c: int
    d: int
    perfect: bool
    k: int | None
    N: int
    rank_bound_defective: bool
    hyperbola_ok: bool
    residue_mod_16: int | None
    s: int | None
    s_in_range: bool
    genus: int | None
    verdict: str
    provenance: str
    witnesses: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = asdict(self)
        if not self.witnesses:
            out.pop("witnesses")
        return out

    def csv_row(self) -> list:
        return ["" if getattr(self, f) is None else getattr(self, f) for f in CSV_FIELDS]


def classify(c: int, d: int) -> CaseReport:
    """Identifiability verdict for general pairs of degrees (c, d), with the arithmetic behind it."""
    _check_order(c, d)
    perfect, k = is_perfect(c, d)
    rep = CaseReport(
        c=c, d=d, perfect=perfect, k=k, N=comb(c + 2, 2) + comb(d + 2, 2) - 1,
        rank_bound_defective=False, hyperbola_ok=hyperbola_ok(c, d),
        residue_mod_16=None, s=None, s_in_range=False, genus=None,
        verdict=NOT_IDENTIFIABLE, provenance="",
    )
    if not perfect:
        rep.provenance = "not perfect: the decomposition system is not square, so general fibers are not finite"
        return rep

    rep.rank_bound_defective = rank_bound_defective(c, d)
    rep.residue_mod_16 = residue_class(c, d)
    s = s_raw(c, d)
    rep.s = s
    rep.s_in_range = 0 <= s <= k - 1
    if c >= 3 and rep.s_in_range:
        rep.genus = genus_of_restriction(c, d).genus

    if rep.rank_bound_defective:
        rep.provenance = (
            f"k-defective: generic Waring rank {generic_waring_rank(d)} of the degree-{d} form exceeds k = {k}"
        )
    elif (c, d) == (2, 2):
        rep.verdict = IDENTIFIABLE
        rep.provenance = "two general quadrics have a unique simultaneous diagonalization"
    elif (c, d) == (2, 3):
        rep.verdict = IDENTIFIABLE
        rep.provenance = "general conic and cubic: classical unique 4-term decomposition"
    elif (c, d) == (3, 3):
        rep.provenance = "X is 5-defective: dim Sec_5(X) < 19 for two plane cubics"
    elif d == c + 1:
        rep.verdict = EXCLUDED
        rep.provenance = "d = c+1: not identifiable by a previously published result, not re-derived here"
    else:
        g = genus_of_restriction(c, d)
        if not (rep.s_in_range and g.positive):
            raise AssertionError(f"case ({c},{d}) falls outside every known argument")
        which = "first degeneration (class 0)" if rep.residue_mod_16 == 0 else "second degeneration (class 8)"
        rep.provenance = (
            f"{which}: s = {s} points on Z, restricted curve has genus {g.genus} > 0, "
            "so the tangential projection is not birational"
        )
    return rep


def attach_witnesses(rep: CaseReport, trials: int = 3, seed: int = 0, p: int | None = None) -> CaseReport:
    """Run the numeric engines that back the report's claims (the ``--verify`` path)."""
    from .bundle import expected_secant_dimension, secant_dimension
    from .interpolation import castelnuovo_split, general_scheme, taut_system_dim

    if not rep.perfect:
        return rep
    c, d, k = rep.c, rep.d, rep.k
    sec = secant_dimension(c, d, k, trials, seed, p)
    rep.witnesses["secant_k"] = {
        "k": k, "dim": sec, "expected": expected_secant_dimension(c, d, k),
        "defective": sec < expected_secant_dimension(c, d, k),
    }
    if k >= 2:
        rep.witnesses["taut_dim_k_minus_1"] = taut_system_dim(c, d, general_scheme(c, d, k - 1, seed, p), p)
    if c >= 3 and d != c + 1 and rep.s_in_range:
        split = castelnuovo_split(c, d, variant_for(c, d), seed, p)
        rep.witnesses["castelnuovo_split"] = split.to_json()
    return rep


def classify_sweep(cmax: int):
    """Reports for every 1 <= c <= d <= cmax, in lexicographic order."""
    if cmax < 1:
        raise ValueError("cmax must be >= 1")
    for c in range(1, cmax + 1):
        for d in range(c, cmax + 1):
            yield classify(c, d)
