import random
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ternwaring.bundle import BundlePoint, ambient_dim, terracini_rank, trial_rng
from ternwaring.classifier import RangeError
from ternwaring.interpolation import (
    ConditionScheme,
    InconsistentVariantError,
    ah_expected_dim,
    castelnuovo_split,
    general_scheme,
    nodal_hypotheses_ok,
    plane_system_dim,
    section_value,
    specialized_scheme,
    taut_kernel,
    taut_system_dim,
)
from ternwaring.linalg import DEFAULT_PRIME, ScalarDomain

P = DEFAULT_PRIME


def test_plane_examples():
    assert plane_system_dim(2, 2, 0) == 1
    assert plane_system_dim(4, 5, 0) == 1
    assert plane_system_dim(8, 14, 0) == 3
    for d in range(0, 7):
        assert plane_system_dim(d, 0, 0) == comb(d + 2, 2)


def test_ah_examples():
    assert ah_expected_dim(6, 9, 1) == 0
    assert ah_expected_dim(4, 5, 0) == 1
    assert ah_expected_dim(10, 16, 16) == 2
    assert ah_expected_dim(2, 2, 1) == 0
    assert ah_expected_dim(5, 0, 30) == 0


def test_nodal_examples():
    assert nodal_hypotheses_ok(8, 14, 0)
    assert not nodal_hypotheses_ok(6, 9, 0)
    assert not nodal_hypotheses_ok(4, 7, 0)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 9), st.data())
def test_ah_agreement(d, data):
    n = comb(d + 2, 2)
    r = data.draw(st.integers(0, (n + 5) // 3))
    t = data.draw(st.integers(0, n + 5 - 3 * r))
    assert plane_system_dim(d, r, t, seed=data.draw(st.integers(0, 99))) == ah_expected_dim(d, r, t)


def test_taut_examples():
    assert taut_system_dim(4, 8, general_scheme(4, 8, 14)) == 4
    assert taut_system_dim(2, 3, general_scheme(2, 3, 3)) == 4
    for c, d in [(1, 1), (2, 5), (3, 3)]:
        assert taut_system_dim(c, d, ConditionScheme("bundle", d, c)) == ambient_dim(c, d) + 1


def test_specialized_counts():
    for (c, d, variant), (on_z, general) in {
        (4, 8, "first"): (14, 0),
        (10, 10, "second"): (16, 16),
        (5, 9, "first"): (17, 1),
    }.items():
        sch = specialized_scheme(c, d, variant)
        z = sum(pt.on_section() for pt in sch.double_points)
        assert (z, len(sch.double_points) - z) == (on_z, general)
        assert sch.simple_points == []
    assert specialized_scheme(4, 8, "first", seed=3) == specialized_scheme(4, 8, "first", seed=3)


def test_inconsistent_variant():
    with pytest.raises(InconsistentVariantError):
        specialized_scheme(4, 8, "second")
    with pytest.raises(InconsistentVariantError):
        specialized_scheme(10, 10, "first")
    with pytest.raises(InconsistentVariantError):
        specialized_scheme(3, 4, "first")
    with pytest.raises(ValueError):
        specialized_scheme(4, 8, "third")


def test_castelnuovo_examples():
    for c, d, variant, triple in [(4, 8, "first", (4, 1, 3)), (10, 10, "second", (4, 2, 2)), (5, 9, "first", (4, 1, 3))]:
        rep = castelnuovo_split(c, d, variant)
        assert rep.triple() == triple
        assert rep.surjective
        assert rep.to_json() == {"dim_total": triple[0], "dim_residual": triple[1],
                                 "dim_restricted": triple[2], "surjective": True}


def test_castelnuovo_out_of_range():
    with pytest.raises(RangeError):
        castelnuovo_split(3, 10, "second")


@pytest.mark.parametrize("c,d,variant", [(6, 6, "first"), (7, 7, "first"), (3, 3, "second")])
def test_castelnuovo_additivity(c, d, variant):
    for seed in (0, 1):
        rep = castelnuovo_split(c, d, variant, seed)
        assert rep.dim_total <= rep.dim_residual + rep.dim_restricted


def test_fiber_containment():
    rnd = random.Random(1)
    for trial in range(8):
        c = rnd.randint(1, 4)
        d = rnd.randint(c, 6)
        n = max(1, (ambient_dim(c, d) + 1) // 4 - 1)
        sch = general_scheme(c, d, rnd.randint(1, n), seed=trial)
        x = sch.double_points[0]
        ker = taut_kernel(c, d, sch)
        assert ker
        rng = trial_rng(trial, 1)
        for _ in range(5):
            a = tuple(int(v) for v in rng.integers(1, P, size=2))
            for sec in ker:
                assert section_value(sec, c, d, BundlePoint(x.u, a), P) == 0


def test_sections_need_not_vanish_off_fiber():
    sch = general_scheme(2, 3, 2)
    ker = taut_kernel(2, 3, sch)
    other = BundlePoint((3, 5, 7), (11, 13))
    assert any(section_value(sec, 2, 3, other, P) for sec in ker)


@pytest.mark.parametrize("c,d", [(2, 3), (4, 8), (3, 5)])
def test_each_double_point_costs_four(c, d):
    top = ambient_dim(c, d) + 1
    for n in range(1, top // 4):
        assert taut_system_dim(c, d, general_scheme(c, d, n)) == top - 4 * n


@pytest.mark.parametrize("c,d,n", [(2, 3, 3), (3, 3, 5), (4, 8, 14), (2, 10, 17)])
def test_duality_with_terracini(c, d, n):
    sch = general_scheme(c, d, n, seed=2)
    assert taut_system_dim(c, d, sch) == ambient_dim(c, d) + 1 - terracini_rank(
        c, d, sch.double_points, ScalarDomain.prime_field())


@pytest.mark.parametrize("c,d,variant", [(4, 8, "first"), (10, 10, "second"), (6, 6, "first")])
def test_semicontinuity(c, d, variant):
    sch = specialized_scheme(c, d, variant)
    n = len(sch.double_points)
    assert taut_system_dim(c, d, sch) >= taut_system_dim(c, d, general_scheme(c, d, n))


def test_three_ten_sections_with_f_zero():
    # for (3,10) the pairs (0, G) with G double at the 18 base points already give 12 sections
    sch = general_scheme(3, 10, 18)
    assert taut_system_dim(3, 10, sch) == 12 == plane_system_dim(10, 18, 0)
