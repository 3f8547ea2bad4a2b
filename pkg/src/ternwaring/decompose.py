"""Numeric simultaneous Waring decompositions ``f = sum lam_i l_i^c``, ``g = sum mu_i l_i^d``.

Decompositions are compared in gauge-normal form: each ``l_i`` is scaled so
its largest-modulus coordinate is 1 (``lam_i``, ``mu_i`` absorb the scale)
and triples are sorted by ``l``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.linalg import eig
from scipy.optimize import linear_sum_assignment

from .classifier import is_perfect
from .forms import FormPair, n_monomials, power_coeffs_float, power_coeffs_jacobian
from .linalg import ScalarDomain, SingularMatrixError, solve_linear

CLUSTER_TOL = 1e-6
MAX_UNKNOWNS = 64


class DegeneratePencilError(ValueError):
    """The pencil <f, g> has repeated roots, so the diagonalization is not unique."""


class ComplexPencilError(DegeneratePencilError):
    """The pencil's roots are not all real; no real diagonalization exists."""


class NewtonFailure(RuntimeError):
    def __init__(self, reason: str, message: str = ""):
        super().__init__(message or reason)
        self.reason = reason


class TooLargeError(ValueError):
    pass


@dataclass
class Decomposition:
    """k triples ``(l, lam, mu)``; ``ls`` has shape ``(k, 3)``."""

    ls: np.ndarray
    lams: np.ndarray
    mus: np.ndarray

    def __post_init__(self):
        self.ls = np.asarray(self.ls, dtype=float).reshape(-1, 3)
        self.lams = np.asarray(self.lams, dtype=float).reshape(-1)
        self.mus = np.asarray(self.mus, dtype=float).reshape(-1)
        if not (len(self.ls) == len(self.lams) == len(self.mus)):
            raise ValueError("ls, lams and mus must have the same length")

    @property
    def k(self) -> int:
        return len(self.ls)

    def triples(self):
        return [(tuple(l), lam, mu) for l, lam, mu in zip(self.ls, self.lams, self.mus)]

    def rescaled(self, t, c: int, d: int) -> "Decomposition":
        """``(t l, lam / t^c, mu / t^d)`` per triple; ``t`` scalar or length-k."""
        t = np.broadcast_to(np.asarray(t, dtype=float), (self.k,))
        return Decomposition(self.ls * t[:, None], self.lams / t**c, self.mus / t**d)

    def normalized(self, c: int, d: int) -> "Decomposition":
        idx = np.argmax(np.abs(self.ls), axis=1)
        out = self.rescaled(1.0 / self.ls[np.arange(self.k), idx], c, d)
        order = np.lexsort(out.ls.T[::-1])
        return Decomposition(out.ls[order], out.lams[order], out.mus[order])

    def as_rows(self) -> np.ndarray:
        return np.column_stack([self.ls, self.lams, self.mus])

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "triples": [
                {"l": [float(x) for x in l], "lambda": float(lam), "mu": float(mu)}
                for l, lam, mu in zip(self.ls, self.lams, self.mus)
            ],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Decomposition":
        triples = obj["triples"]
        if int(obj["k"]) != len(triples):
            raise ValueError("k does not match the number of triples")
        return cls([t["l"] for t in triples], [t["lambda"] for t in triples], [t["mu"] for t in triples])

    @classmethod
    def load(cls, path) -> "Decomposition":
        return cls.from_json(json.loads(Path(path).read_text()))


def reconstruct(dec: Decomposition, c: int, d: int) -> tuple[np.ndarray, np.ndarray]:
    return dec.lams @ power_coeffs_float(dec.ls, c), dec.mus @ power_coeffs_float(dec.ls, d)


def pair_from_decomposition(dec: Decomposition, c: int, d: int) -> FormPair:
    f, g = reconstruct(dec, c, d)
    return FormPair(c, d, [float(x) for x in f], [float(x) for x in g])


def _block_residual(recon: np.ndarray, target: np.ndarray) -> float:
    denom = float(recon @ recon)
    scale = float(recon @ target) / denom if denom > 0 else 0.0
    return float(np.max(np.abs(scale * recon - target), initial=0.0))


def verify_decomposition(pair: FormPair, dec: Decomposition) -> float:
    """Max-norm coefficient residual, each block first rescaled by least squares."""
    f, g = reconstruct(dec, pair.c, pair.d)
    return max(
        _block_residual(f, np.asarray(pair.f, dtype=float)),
        _block_residual(g, np.asarray(pair.g, dtype=float)),
    )


# -- degree (2, 2): simultaneous diagonalization ---------------------------

def quadric_matrix(coeffs) -> np.ndarray:
    """Symmetric 3x3 matrix ``A`` with ``x^T A x`` equal to the quadric."""
    q = [float(x) for x in coeffs]
    if len(q) != 6:
        raise ValueError("a ternary quadric has 6 coefficients")
    a00, a01, a02, a11, a12, a22 = q
    return np.array([[a00, a01 / 2, a02 / 2], [a01 / 2, a11, a12 / 2], [a02 / 2, a12 / 2, a22]])


def simultaneous_diagonalize(f, g, sep_tol: float = 1e-7) -> Decomposition:
    """The 3-term decomposition of a nondegenerate pair of ternary quadrics.

    With ``A v = t B v`` and eigenvector matrix ``V``, both ``V^T A V`` and
    ``V^T B V`` are diagonal, so the ``l_i`` are the rows of ``V^{-1}``.
    """
    A, B = quadric_matrix(f), quadric_matrix(g)
    work = B
    if np.linalg.cond(B) > 1e8:
        # same eigenvectors for (A, B + sA); s drawn from a fixed stream
        rng = np.random.default_rng(0)
        for _ in range(10):
            work = B + rng.normal() * A
            if np.linalg.cond(work) < 1e8:
                break
        else:
            raise DegeneratePencilError("every member of the pencil is singular")
    w, V = eig(A, work)
    scale = max(1.0, float(np.max(np.abs(w))))
    if np.any(~np.isfinite(w)) or np.max(np.abs(w.imag)) > 1e-9 * scale:
        raise ComplexPencilError("the pencil has non-real roots")
    t = np.sort(w.real)
    gaps = np.diff(t) / np.maximum(1.0, np.maximum(np.abs(t[1:]), np.abs(t[:-1])))
    if np.min(gaps) < sep_tol:
        raise DegeneratePencilError(f"pencil roots {t} are not separated (tolerance {sep_tol})")
    V = V.real
    ls = np.linalg.inv(V)
    lams = np.diag(V.T @ A @ V)
    mus = np.diag(V.T @ B @ V)
    return Decomposition(ls, lams, mus).normalized(2, 2)


# -- Newton on the square system -------------------------------------------

class _System:
    """Gauge-fixed decomposition system: per term two free coordinates of l, lam, mu."""

    def __init__(self, pair: FormPair, pinned: np.ndarray):
        self.c, self.d = pair.c, pair.d
        self.f = np.asarray(pair.f, dtype=float)
        self.g = np.asarray(pair.g, dtype=float)
        self.pinned = pinned
        self.free = [[j for j in range(3) if j != p] for p in pinned]
        self.k = len(pinned)
        self._rows = np.repeat(np.arange(self.k), 2)
        self._cols = np.array(self.free, dtype=int).ravel()

    def unpack(self, x):
        x = x.reshape(self.k, 4)
        ls = np.ones((self.k, 3))
        ls[self._rows, self._cols] = x[:, :2].ravel()
        return Decomposition(ls, x[:, 2], x[:, 3])

    def pack(self, dec: Decomposition):
        return np.concatenate([[*dec.ls[i, self.free[i]], dec.lams[i], dec.mus[i]] for i in range(self.k)])

    def residual(self, x):
        f, g = reconstruct(self.unpack(x), self.c, self.d)
        return np.concatenate([f - self.f, g - self.g])

    def jacobian(self, x):
        dec = self.unpack(x)
        nc = n_monomials(self.c)
        jc = power_coeffs_jacobian(dec.ls, self.c) * dec.lams[:, None, None]
        jd = power_coeffs_jacobian(dec.ls, self.d) * dec.mus[:, None, None]
        J = np.zeros((nc + n_monomials(self.d), 4 * self.k))
        for i, free in enumerate(self.free):
            J[:nc, 4 * i:4 * i + 2] = jc[i][:, free]
            J[nc:, 4 * i:4 * i + 2] = jd[i][:, free]
        J[:nc, 2::4] = power_coeffs_float(dec.ls, self.c).T
        J[nc:, 3::4] = power_coeffs_float(dec.ls, self.d).T
        return J


def newton_solve(pair: FormPair, start: Decomposition, max_iter: int = 100, tol: float = 1e-10) -> Decomposition:
    """Damped Newton from ``start``; returns the gauge-normal solution.

    Raises :class:`NewtonFailure` with reason ``singular`` or ``max-iter``.
    """
    perfect, k = is_perfect(pair.c, pair.d)
    if not perfect:
        raise ValueError(f"({pair.c},{pair.d}) is not a perfect case; the system is not square")
    if start.k != k:
        raise ValueError(f"start has {start.k} terms, the square system needs k = {k}")
    c, d = pair.c, pair.d
    start = start.rescaled(1.0, c, d)
    pinned = np.argmax(np.abs(start.ls), axis=1)
    start = start.rescaled(1.0 / start.ls[np.arange(k), pinned], c, d)
    system = _System(pair, pinned)
    x = system.pack(start)
    r = system.residual(x)
    norm = float(np.linalg.norm(r))
    f64 = ScalarDomain.float64()
    for _ in range(max_iter):
        dec = system.unpack(x)
        if verify_decomposition(pair, dec) < tol:
            return dec.normalized(c, d)
        try:
            dx = solve_linear(system.jacobian(x), -r, f64)
        except SingularMatrixError:
            raise NewtonFailure("singular", "Jacobian is singular") from None
        step = 1.0
        for _ in range(21):
            trial = x + step * dx
            r_trial = system.residual(trial)
            n_trial = float(np.linalg.norm(r_trial))
            if np.isfinite(n_trial) and n_trial < norm:
                break
            step /= 2
        else:
            break
        x, r, norm = trial, r_trial, n_trial
    dec = system.unpack(x)
    if np.all(np.isfinite(x)) and verify_decomposition(pair, dec) < tol:
        return dec.normalized(c, d)
    raise NewtonFailure("max-iter", f"no convergence within {max_iter} iterations")


# -- fibers of the secant map ----------------------------------------------

def decomposition_distance(a: Decomposition, b: Decomposition, c: int, d: int) -> float:
    """Max-norm distance between gauge-normal forms, minimized over the order of terms."""
    ra, rb = a.normalized(c, d).as_rows(), b.normalized(c, d).as_rows()
    if ra.shape != rb.shape:
        return float("inf")
    cost = np.max(np.abs(ra[:, None, :] - rb[None, :, :]), axis=2)
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max(initial=0.0))


def cluster(decs, c: int, d: int, tol: float = CLUSTER_TOL) -> list[Decomposition]:
    reps: list[Decomposition] = []
    for dec in decs:
        if all(decomposition_distance(dec, rep, c, d) > tol for rep in reps):
            reps.append(dec.normalized(c, d))
    return reps


def random_decomposition(rng: np.random.Generator, k: int) -> Decomposition:
    """Gaussian linear forms; scalars of modulus in [0.5, 2] with random sign."""
    def scalars():
        return rng.choice([-1.0, 1.0], size=k) * rng.uniform(0.5, 2.0, size=k)

    return Decomposition(rng.normal(size=(k, 3)), scalars(), scalars())


def random_pair(rng: np.random.Generator, c: int, d: int) -> FormPair:
    return FormPair(c, d, list(rng.normal(size=n_monomials(c))), list(rng.normal(size=n_monomials(d))))


def fit_scalars(pair: FormPair, ls: np.ndarray) -> Decomposition:
    """Least-squares ``lam``, ``mu`` for fixed linear forms."""
    Pc = power_coeffs_float(ls, pair.c).T
    Pd = power_coeffs_float(ls, pair.d).T
    lams = np.linalg.lstsq(Pc, np.asarray(pair.f, dtype=float), rcond=None)[0]
    mus = np.linalg.lstsq(Pd, np.asarray(pair.g, dtype=float), rcond=None)[0]
    return Decomposition(ls, lams, mus)


@dataclass
class FiberResult:
    c: int
    d: int
    mode: str
    n_starts: int
    n_success: int
    distinct: list = field(default_factory=list)
    pair: FormPair | None = None
    planted: Decomposition | None = None

    @property
    def success_rate(self) -> float:
        return self.n_success / self.n_starts if self.n_starts else 0.0

    def to_json(self) -> dict:
        out = {
            "c": self.c, "d": self.d, "mode": self.mode,
            "starts": self.n_starts, "successes": self.n_success,
            "success_rate": self.success_rate, "distinct": len(self.distinct),
            "decompositions": [dec.to_json() for dec in self.distinct],
        }
        if self.planted is not None:
            out["planted"] = self.planted.normalized(self.c, self.d).to_json()
        return out


def start_point(pair: FormPair, k: int, rng: np.random.Generator, planted: Decomposition | None = None) -> Decomposition:
    """A Newton start: the planted decomposition perturbed, or random forms with fitted scalars."""
    if planted is not None:
        sigma = 10.0 ** rng.uniform(-3, -1)
        p = planted.normalized(pair.c, pair.d)
        return Decomposition(
            p.ls + sigma * rng.normal(size=p.ls.shape),
            p.lams * (1 + sigma * rng.normal(size=k)),
            p.mus * (1 + sigma * rng.normal(size=k)),
        )
    return fit_scalars(pair, rng.normal(size=(k, 3)))


def fiber_sample(c: int, d: int, mode: str = "planted", n_starts: int = 200, seed: int = 0,
                 tol: float = 1e-8, max_iter: int = 100) -> FiberResult:
    """Multistart Newton on one pair; distinct solutions up to gauge and the success rate.

    ``planted`` builds the pair from a random decomposition and alternates
    perturbed-planted starts (even indices) with random starts (odd);
    ``random`` draws the pair's coefficients directly and uses random starts.
    """
    if mode not in ("planted", "random"):
        raise ValueError(f"mode must be 'planted' or 'random', got {mode!r}")
    perfect, k = is_perfect(c, d)
    if not perfect:
        raise ValueError(f"({c},{d}) is not a perfect case")
    if 4 * k > MAX_UNKNOWNS:
        raise TooLargeError(f"4k = {4 * k} unknowns exceeds the float64 guard of {MAX_UNKNOWNS}")
    data_rng = np.random.default_rng([int(seed), 0])
    planted = random_decomposition(data_rng, k) if mode == "planted" else None
    pair = pair_from_decomposition(planted, c, d) if planted is not None else random_pair(data_rng, c, d)

    successes = []
    for i in range(n_starts):
        rng = np.random.default_rng([int(seed), 1, i])
        use_planted = planted if (mode == "planted" and i % 2 == 0) else None
        start = start_point(pair, k, rng, use_planted)
        try:
            successes.append(newton_solve(pair, start, max_iter=max_iter, tol=tol))
        except NewtonFailure:
            continue
    return FiberResult(c, d, mode, n_starts, len(successes), cluster(successes, c, d), pair, planted)
