"""Acceptance suite: one test per criterion, each at its stated tolerance and time budget."""

import csv
import io
import random
import time
from math import comb

import numpy as np
import pytest

from ternwaring.bundle import BundlePoint, chow_degree, secant_dimension, trial_rng
from ternwaring.classifier import is_perfect, perfect_cases_upto
from ternwaring.cli import main
from ternwaring.decompose import (
    decomposition_distance,
    fiber_sample,
    pair_from_decomposition,
    random_decomposition,
    simultaneous_diagonalize,
    verify_decomposition,
)
from ternwaring.interpolation import (
    ah_expected_dim,
    castelnuovo_split,
    general_scheme,
    plane_system_dim,
    section_value,
    taut_kernel,
    taut_system_dim,
)
from ternwaring.linalg import DEFAULT_PRIME

PERFECT_UP_TO_10 = {(1, 5), (1, 8), (2, 2), (2, 3), (2, 10), (3, 3), (3, 10), (4, 5), (4, 8),
                    (5, 9), (6, 6), (6, 7), (7, 7), (8, 9), (10, 10)}


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


@pytest.mark.criterion(1, "classify --cmax 10: identifiable only at (2,2),(2,3); the 15 perfect cases")
def test_criterion_1_classification_sweep():
    buf = io.StringIO()
    with Timer() as t:
        code = main(["classify", "--cmax", "10"], out=buf)
    rows = list(csv.DictReader(io.StringIO(buf.getvalue())))
    assert code == 0
    assert {(int(r["c"]), int(r["d"])) for r in rows if r["verdict"] == "identifiable"} == {(2, 2), (2, 3)}
    assert {(int(r["c"]), int(r["d"])) for r in rows if r["perfect"] == "True"} == PERFECT_UP_TO_10
    assert t.elapsed < 1.0, f"{t.elapsed:.2f}s"


@pytest.mark.criterion(2, "dim Sec_5(X_{3,3}) < 19 in 5 trials, stable across 3 seeds")
def test_criterion_2_london_defectivity():
    with Timer() as t:
        per_trial = [secant_dimension(3, 3, 5, trials=1, seed=s) for s in range(5)]
        seeds = {secant_dimension(3, 3, 5, seed=s) for s in (0, 1, 2)}
    assert all(v < 19 for v in per_trial), per_trial
    assert len(seeds) == 1, seeds
    assert t.elapsed < 5.0, f"{t.elapsed:.2f}s"


@pytest.mark.criterion(3, "taut_system_dim on k-1 general double points = 4 for perfect 3<=c<=d<=10, d!=c+1")
def test_criterion_3_not_k_minus_1_defective():
    cases = [(c, d) for c, d in perfect_cases_upto(10) if c >= 3 and d != c + 1]
    dims = {}
    with Timer() as t:
        for c, d in cases:
            k = is_perfect(c, d)[1]
            dims[(c, d)] = taut_system_dim(c, d, general_scheme(c, d, k - 1))
    bad = {case: v for case, v in dims.items() if v != 4}
    assert not bad, f"dimension != 4 at {bad}"
    assert t.elapsed < 60.0, f"{t.elapsed:.2f}s"


@pytest.mark.criterion(4, "castelnuovo_split(4,8) and (5,9) = (4,1,3), surjective")
def test_criterion_4_first_degeneration():
    for c, d in [(4, 8), (5, 9)]:
        with Timer() as t:
            rep = castelnuovo_split(c, d, "first")
        assert rep.triple() == (4, 1, 3) and rep.surjective, (c, d, rep)
        assert t.elapsed < 10.0, f"{t.elapsed:.2f}s"


@pytest.mark.criterion(5, "castelnuovo_split(10,10) = (4,2,2), surjective")
def test_criterion_5_second_degeneration():
    with Timer() as t:
        rep = castelnuovo_split(10, 10, "second")
    assert rep.triple() == (4, 2, 2) and rep.surjective, rep
    assert t.elapsed < 20.0, f"{t.elapsed:.2f}s"


@pytest.mark.criterion(6, "plane_system_dim = ah_expected_dim on 100 random (d,r,t), d <= 12")
def test_criterion_6_ah_agreement():
    rnd = random.Random(2024)
    triples = [(2, 2, 0), (4, 5, 0)]
    while len(triples) < 100:
        d = rnd.randint(1, 12)
        n = comb(d + 2, 2)
        r = rnd.randint(0, (n + 5) // 3)
        t_ = rnd.randint(0, n + 5 - 3 * r)
        triples.append((d, r, t_))
    with Timer() as t:
        got = [plane_system_dim(d, r, s, seed=i) for i, (d, r, s) in enumerate(triples)]
    assert got[0] == 1 and got[1] == 1
    bad = [(tr, g) for tr, g in zip(triples, got) if g != ah_expected_dim(*tr)]
    assert not bad, bad
    assert t.elapsed < 30.0, f"{t.elapsed:.2f}s"


@pytest.mark.criterion(7, "kernel sections vanish on 5 random points of the fiber through a double point")
def test_criterion_7_fiber_containment():
    rnd = random.Random(7)
    with Timer() as t:
        for trial in range(20):
            c = rnd.randint(1, 5)
            d = rnd.randint(c, 8)
            n = rnd.randint(1, max(1, (comb(c + 2, 2) + comb(d + 2, 2)) // 4 - 1))
            sch = general_scheme(c, d, n, seed=trial)
            x = sch.double_points[0]
            ker = taut_kernel(c, d, sch)
            assert ker
            rng = trial_rng(trial, 1)
            for _ in range(5):
                pt = BundlePoint(x.u, tuple(int(v) for v in rng.integers(1, DEFAULT_PRIME, size=2)))
                assert all(section_value(s, c, d, pt, DEFAULT_PRIME) == 0 for s in ker), (c, d, n)
    assert t.elapsed < 10.0, f"{t.elapsed:.2f}s"


def stepwise(c, d):
    # H^3 = 0 and T H^2 = 1; T^2 H = (c+d) T H^2 - cd H^3; T^3 = (c+d) T^2 H - cd T H^2
    th2 = 1
    t2h = (c + d) * th2
    return (c + d) * t2h - c * d * th2, t2h - c * th2


@pytest.mark.criterion(8, "T^3 = c^2+cd+d^2 and (T-cH)TH = d for 20 random (c,d) <= 20")
def test_criterion_8_chow_identities():
    rnd = random.Random(8)
    with Timer() as t:
        for _ in range(20):
            c, d = sorted((rnd.randint(1, 20), rnd.randint(1, 20)))
            t3, z_t_h = stepwise(c, d)
            assert chow_degree("T^3", c, d) == c * c + c * d + d * d == t3
            assert chow_degree(f"(T-{c}H)*T*H", c, d) == d == z_t_h
    assert t.elapsed < 1.0, f"{t.elapsed:.2f}s"


@pytest.mark.criterion(9, "100 planted (2,2) pencils round-trip, residual < 1e-9, unique recovery")
def test_criterion_9_pencils():
    rng = np.random.default_rng(99)
    with Timer() as t:
        for _ in range(100):
            dec = random_decomposition(rng, 3)
            pair = pair_from_decomposition(dec, 2, 2)
            out = simultaneous_diagonalize(pair.f, pair.g)
            assert verify_decomposition(pair, out) < 1e-9
            assert decomposition_distance(out, dec, 2, 2) < 1e-6
    assert t.elapsed < 5.0, f"{t.elapsed:.2f}s"


@pytest.mark.criterion(10, "(2,3) planted: >= 30% converge, 1 distinct; (3,3) random: success rate 0")
def test_criterion_10_fiber_experiments():
    with Timer() as t:
        ident = fiber_sample(2, 3, "planted", n_starts=200, seed=0)
        defect = fiber_sample(3, 3, "random", n_starts=200, seed=0, tol=1e-8)
    assert ident.success_rate >= 0.30, ident.success_rate
    assert len(ident.distinct) == 1
    assert decomposition_distance(ident.distinct[0], ident.planted, 2, 3) < 1e-6
    assert defect.success_rate == 0
    assert t.elapsed < 60.0, f"{t.elapsed:.2f}s"
