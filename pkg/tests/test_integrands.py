from fractions import Fraction
from math import pi

import numpy as np
import pytest
from scipy import integrate

from lebesgue_ud import integrands as ig
from lebesgue_ud import sequences as seq
from lebesgue_ud.errors import IntegrandError
from lebesgue_ud.estimator import integrate as run_integral
from lebesgue_ud.sequences import FromFile, HybridPi, Prng, Rationality, SequencePoint, VanDerCorput, Weyl

CATALOG = ig.CATALOG


def point(x, rationality=Rationality.UNKNOWN, index=1):
    return SequencePoint(x, index, None, rationality)


def test_evaluate_examples():
    assert ig.evaluate(CATALOG["x"], point(0.5)) == 0.5
    assert ig.evaluate(CATALOG["x^-1/2"], point(0.25)) == 2.0
    vdc = seq.vdc_point(2, 3)
    assert ig.evaluate(CATALOG["irrational_indicator"], vdc) == 0.0
    assert ig.evaluate(CATALOG["irrational_indicator"], seq.weyl_point(seq.GOLDEN_FIXED, 3)) == 1.0
    assert ig.evaluate(CATALOG["irrational_indicator"], seq.prng_point(0, 3)) == 1.0


@pytest.mark.parametrize("x", [0.0, 1.0, -0.5, 1.5])
def test_evaluate_rejects_points_outside_open_interval(x):
    with pytest.raises(IntegrandError):
        ig.evaluate(CATALOG["x"], point(x))


def test_exact_integral_examples():
    assert ig.exact_integral(CATALOG["x^-1/2"]) == 2.0
    assert ig.exact_integral(CATALOG["ln(1/x)"]) == 1.0
    assert ig.exact_integral(CATALOG["irrational_indicator"]) == 1.0
    assert ig.exact_integral(CATALOG["arcsine"]) == pi


def test_catalog_completeness():
    required = {"x", "x^2", "x^-1/4", "x^-1/2", "x^-3/4", "ln(1/x)", "arcsine", "irrational_indicator"}
    assert required <= set(CATALOG)
    assert callable(ig.complement_indicator)


@pytest.mark.parametrize("f", list(CATALOG.values()), ids=lambda f: f.id)
def test_exact_integral_against_quadrature(f):
    func = lambda t: float(f.ae_func(np.array([t]))[0])
    points = [float(b) for b in f.singular_set if 0 < b < 1] or None
    with np.errstate(divide="ignore"):
        value, _ = integrate.quad(func, 0, 1, points=points, limit=500, epsabs=1e-11, epsrel=1e-11)
    assert value == pytest.approx(f.exact_integral, abs=1e-6)


def test_compensator_examples():
    assert ig.compensator(CATALOG["x^-1/2"], 1).value == 0.0
    assert ig.compensator(CATALOG["x^-1/2"], 2).value == pytest.approx(1.0, abs=1e-15)
    assert ig.compensator(CATALOG["x"], 1).value == 0.5


def test_compensator_rejects_signed_and_bad_level():
    with pytest.raises(IntegrandError):
        ig.compensator(CATALOG["2x-1"], 3)
    with pytest.raises(IntegrandError):
        ig.compensator(CATALOG["x"], 0)


def test_generic_truncation_for_quadratic():
    f = CATALOG["3x^2-2x+1"]
    # f < 1 exactly on (0, 2/3): 8/27 - 4/9 + 2/3 = 14/27
    assert ig.compensator(f, 1).value == pytest.approx(14 / 27, abs=1e-9)
    assert ig.compensator(f, 2).value == pytest.approx(1.0, abs=1e-9)


CLOSED_FORM = [f for f in CATALOG.values() if f.truncated is not None and f.id != "irrational_indicator"]


@pytest.mark.parametrize("f", CLOSED_FORM, ids=lambda f: f.id)
@pytest.mark.parametrize("k", [1, 2, 3, 5, 17, 64])
def test_closed_form_truncation_matches_quadrature(f, k):
    closed = float(f.truncated(np.array([float(k)]))[0])
    assert closed == pytest.approx(ig._truncated_quadrature(f, k), abs=1e-8)


@pytest.mark.parametrize("f", [f for f in CATALOG.values() if f.nonnegative], ids=lambda f: f.id)
def test_compensator_monotone_and_bounded(f):
    values = ig.compensators(f, np.arange(1, 65))
    assert np.all(np.diff(values) >= -1e-12)
    assert values[-1] <= f.exact_integral + 1e-12


@pytest.mark.parametrize("f", [f for f in CATALOG.values() if f.truncated is not None], ids=lambda f: f.id)
def test_compensator_tends_to_integral(f):
    assert ig.compensators(f, [1e30])[0] == pytest.approx(f.exact_integral, abs=1e-8)


@pytest.mark.parametrize("f", [f for f in CATALOG.values() if f.singular_set], ids=lambda f: f.id)
def test_monotone_near_singularities(f):
    assert f.flags.monotone_near_singularities
    assert not f.flags.bounded
    for beta in map(float, f.singular_set):
        for lo, hi in ((beta - f.neighborhood, beta), (beta, beta + f.neighborhood)):
            lo, hi = max(lo, 0.0), min(hi, 1.0)
            if hi <= lo:
                continue
            grid = np.linspace(lo, hi, 1002)[1:-1]
            diffs = np.diff(f.ae_func(grid))
            assert np.all(diffs > 0) or np.all(diffs < 0), (f.id, beta, lo, hi)


def test_singular_sets_are_rational():
    assert all(f.singular_set_rational for f in CATALOG.values())
    assert CATALOG["arcsine"].singular_set == (Fraction(0), Fraction(1))


def test_flags():
    assert not CATALOG["irrational_indicator"].flags.riemann_integrable
    assert not CATALOG["x^-1/2"].flags.finite_variance
    assert CATALOG["x^-1/4"].flags.finite_variance
    assert CATALOG["x"].variation == 1.0


def test_evaluation_is_deterministic():
    batch = seq.generate_batch(Prng(3), 1, 1000)
    for f in CATALOG.values():
        assert np.array_equal(f.evaluate_batch(batch), f.evaluate_batch(batch))


# -- complement indicator -----------------------------------------------------


@pytest.mark.parametrize("spec", [Weyl.golden(), VanDerCorput(2), VanDerCorput(3), HybridPi()], ids=seq.describe)
def test_complement_indicator_zero_on_own_points(spec):
    f = ig.complement_indicator(spec, 1000)
    assert f.exact_integral == 1.0
    assert f.evaluate(seq.point(spec, 3)) == 0.0
    assert f.evaluate(point(0.123456789)) == 1.0
    assert f.evaluate(seq.point(spec, 1001)) == 1.0  # beyond the horizon
    run = run_integral(spec, f, 1000)
    assert all(mean == 0.0 for _, mean in run.trace)


def test_complement_indicator_uses_value_bits_without_fixed_repr():
    f = ig.complement_indicator(Weyl.golden(), 100)
    x3 = seq.weyl_point(seq.GOLDEN_FIXED, 3)
    assert f.evaluate(SequencePoint(x3.value, 1, None, Rationality.UNKNOWN)) == 0.0


def test_complement_indicator_from_file(tmp_path):
    path = tmp_path / "s.txt"
    path.write_text("0.5\n0.125\n0.3\n")
    f = ig.complement_indicator(FromFile(str(path)), 3)
    assert f.evaluate(point(0.125)) == 0.0
    assert f.evaluate(point(0.126)) == 1.0
    path.write_text("0.5\n0.5\n")
    with pytest.raises(IntegrandError):
        ig.complement_indicator(FromFile(str(path)), 2)


def test_complement_indicator_refuses_prng():
    with pytest.raises(IntegrandError):
        ig.complement_indicator(Prng(1), 100)


def test_get_unknown():
    with pytest.raises(IntegrandError):
        ig.get("sin")


def test_upper_bound_shortcut_agrees_with_quadrature():
    f = CATALOG["3x^2-2x+1"]
    for k in (2.0, 2.5, 1e5):
        assert ig.compensators(f, [k])[0] == pytest.approx(ig._truncated_quadrature(f, k), abs=1e-9)
