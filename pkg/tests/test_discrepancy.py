import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lebesgue_ud import sequences as seq
from lebesgue_ud.discrepancy import equidistribution_defect, is_ud_verdict, star_discrepancy, uniform_grid
from lebesgue_ud.errors import DiscrepancyError
from lebesgue_ud.sequences import Prng, Weyl

import oracles


def test_examples():
    assert star_discrepancy([0.5]).d_star == 0.5
    assert star_discrepancy([0.25, 0.75]).d_star == 0.25
    assert star_discrepancy([0.25, 0.75]).d_star == oracles.star_discrepancy_brute([0.25, 0.75])


def test_defect_examples():
    deciles = [i / 10 for i in range(1, 10)]
    assert equidistribution_defect(deciles, [(0.0, 0.5)]) == [pytest.approx(1 / 18, abs=1e-15)]
    assert equidistribution_defect(deciles, [(0.0, 1.0)]) == [0.0]
    assert equidistribution_defect(deciles, [(0.41, 0.43)]) == [pytest.approx(0.02, abs=1e-15)]


def test_brute_force_oracle_on_random_sets():
    rng = np.random.default_rng(20260101)
    worst = 0.0
    for _ in range(1000):
        n = int(rng.integers(1, 65))
        pts = rng.random(n)
        pts = pts[pts > 0]
        if rng.random() < 0.2 and len(pts) > 1:  # exercise ties
            pts[: len(pts) // 2] = pts[0]
        worst = max(worst, abs(star_discrepancy(pts).d_star - oracles.star_discrepancy_brute(pts)))
    assert worst <= 1e-12


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(1e-9, 1 - 1e-9), min_size=1, max_size=64), st.randoms(use_true_random=False))
def test_permutation_invariance_and_bounds(pts, rnd):
    report = star_discrepancy(pts)
    shuffled = list(pts)
    rnd.shuffle(shuffled)
    assert star_discrepancy(shuffled).d_star == report.d_star
    assert 1 / (2 * len(pts)) <= report.d_star <= 1.0


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(1e-9, 1 - 1e-9), min_size=1, max_size=64))
def test_argmax_interval_attains_the_discrepancy(pts):
    report = star_discrepancy(pts)
    c, t = report.argmax_interval
    assert c == 0.0
    count = sum(1 for p in pts if (p <= t if report.argmax_closed else p < t))
    assert abs(count / len(pts) - t) == pytest.approx(report.d_star, abs=1e-12)


@pytest.mark.parametrize("n", [10**3, 10**4, 10**5, 10**6])
def test_golden_weyl_low_discrepancy_law(n):
    d = star_discrepancy(seq.values(Weyl.golden(), n)).d_star
    assert n * d / math.log(n) <= 3


@pytest.mark.parametrize("n", [10, 100, 1000, 10**4])
def test_interleaving_a_second_prng_prefix(n):
    a = seq.values(Prng(1), n)
    b = seq.values(Prng(2), n)
    both = np.empty(2 * n)
    both[0::2], both[1::2] = a, b
    assert star_discrepancy(both).d_star <= (2 + 1 / n) * star_discrepancy(a).d_star


def test_defect_grid_attached():
    x = seq.values(Weyl.golden(), 1000)
    report = star_discrepancy(x, grid=uniform_grid(10))
    assert len(report.defect_grid) == 10
    assert report.to_json()["defect_grid"][0]["interval"] == [0.0, 0.1]


def test_is_ud_verdict():
    assert not is_ud_verdict(star_discrepancy([0.5]), 0.02)
    assert is_ud_verdict(star_discrepancy(seq.values(Weyl.golden(), 10**5)), 0.02)
    constant = [0.5] * 1000
    report = star_discrepancy(constant)
    assert report.d_star == pytest.approx(oracles.star_discrepancy_brute(constant), abs=1e-12)
    assert not is_ud_verdict(report, 0.02)
    with pytest.raises(DiscrepancyError):
        is_ud_verdict(report, 0.0)


@pytest.mark.parametrize("bad", [[], [0.0], [0.5, 1.0], [float("nan")]])
def test_rejects_bad_points(bad):
    with pytest.raises(DiscrepancyError):
        star_discrepancy(bad)


@pytest.mark.parametrize("iv", [(0.5, 0.5), (-0.1, 0.2), (0.2, 1.1), ("a", 1), (0.3,)])
def test_rejects_bad_intervals(iv):
    with pytest.raises(DiscrepancyError):
        equidistribution_defect([0.5], [iv])
