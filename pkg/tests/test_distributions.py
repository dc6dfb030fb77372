import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shockcop.distributions import (
    EfgmMargin,
    EfgmShock,
    Exponential,
    NegExponential,
    Product,
    SurvivalProduct,
    TabulatedCdf,
    Uniform,
    image_brackets,
    load_tabulated_csv,
    negated,
    point_mass,
    product_cdf,
)
from shockcop.errors import TableFormatError
from shockcop.extreal import NEG_INF, POS_INF

STEP = TabulatedCdf([0.0, 1.0], [0.4, 1.0], "step")

ALL_DISTS = [
    Uniform(),
    Uniform(-2.0, 3.0),
    Exponential(2.0),
    NegExponential(1.5),
    EfgmMargin(0.95),
    EfgmShock(0.95),
    STEP,
    TabulatedCdf([0.0, 0.5, 2.0], [0.0, 0.25, 1.0], "linear"),
    Product(Uniform(), Exponential(1.0)),
    SurvivalProduct(Exponential(1.0), Exponential(3.0)),
    negated(Exponential(1.0)),
]


def test_uniform_cdf_is_identity_on_unit_interval():
    assert Uniform().cdf(0.3) == 0.3


def test_exponential_cdf_half_life():
    # solve 1 - exp(-2x) = 0.5 by hand: x = ln(2)/2
    assert Exponential(2.0).cdf(math.log(2.0) / 2.0) == pytest.approx(0.5, abs=1e-15)


def test_efgm_margin_closed_form_value():
    # substitute into the explicit root formula and cross-check the numeric
    # inverse of the quantile quadratic (a+1)t - a t^2 = x
    d = EfgmMargin(1.0)
    expected = (2.0 - math.sqrt(2.0)) / 2.0
    assert d.cdf(0.5) == pytest.approx(expected, abs=1e-15)
    t = expected
    assert (1.0 + 1.0) * t - 1.0 * t * t == pytest.approx(0.5, abs=1e-12)


def test_cdf_at_sentinels():
    for d in ALL_DISTS:
        assert d.cdf(NEG_INF) == 0.0
        assert d.cdf(POS_INF) == 1.0


def test_cdf_left_of_continuous_families_equals_cdf():
    assert Uniform().cdf_left(0.5) == 0.5


def test_cdf_left_single_jump():
    d = point_mass(0.0)
    assert d.cdf_left(0.0) == 0.0
    assert d.cdf(0.0) == 1.0


def test_cdf_left_of_step_table():
    assert STEP.cdf_left(1.0) == 0.4
    assert STEP.cdf(1.0) == 1.0
    assert STEP.cdf_left(0.0) == 0.0


def test_quantile_identity_for_uniform():
    assert Uniform().quantile(0.3) == 0.3


def test_quantile_at_zero_is_negative_infinity():
    # inf over the whole line: F >= 0 everywhere
    assert Exponential(3.0).quantile(0.0) == NEG_INF
    assert Uniform().quantile(0.0) == NEG_INF


def test_quantile_of_step_table_at_jump_level():
    assert STEP.quantile(0.4) == 0.0
    assert STEP.quantile(0.41) == 1.0
    assert STEP.quantile(1.0) == 1.0


def test_quantile_beyond_reach_is_positive_infinity():
    assert Exponential(1.0).quantile(1.0) == POS_INF


def test_image_brackets_continuous():
    assert image_brackets(Uniform(), 0.7) == (0.7, 0.7, True)


def test_image_brackets_in_gap():
    under, over, attained = image_brackets(STEP, 0.2)
    assert (under, over, attained) == (0.0, 0.4, False)


def test_image_brackets_at_attained_jump_top():
    under, over, attained = image_brackets(STEP, 0.4)
    assert (under, over, attained) == (0.0, 0.4, True)


def test_product_of_uniforms():
    assert product_cdf(Uniform(), Uniform()).cdf(0.5) == 0.25


def test_product_of_exponentials_spot_value():
    d = product_cdf(Exponential(1.0), Exponential(1.0))
    assert d.cdf(1.0) == pytest.approx((1.0 - math.exp(-1.0)) ** 2, abs=1e-15)


def test_product_reproduces_efgm_margin():
    # the closed-form margin factors exactly through the closed-form shock
    a = 1.0
    prod = product_cdf(Uniform(), EfgmShock(a))
    margin = EfgmMargin(a)
    assert prod.cdf(0.5) == pytest.approx(0.5 * 2.0 / (2.0 + math.sqrt(2.0)), abs=1e-15)
    for x in np.linspace(-0.5, 1.5, 41):
        assert prod.cdf(x) == pytest.approx(margin.cdf(x), abs=1e-12)


def test_product_is_same_floating_point_expression():
    d1, d2 = Exponential(1.0), Uniform(0.0, 2.0)
    prod = product_cdf(d1, d2)
    for x in np.linspace(-1.0, 3.0, 23):
        assert prod.cdf(x) == d1.cdf(x) * d2.cdf(x)


def test_survival_product_is_min_law():
    d = SurvivalProduct(Exponential(1.0), Exponential(3.0))
    # min of independent exponentials is exponential with the rate sum
    ref = Exponential(4.0)
    for x in np.linspace(0.0, 3.0, 31):
        assert d.cdf(x) == pytest.approx(ref.cdf(x), abs=1e-12)


def test_negated_round_trip_unwraps():
    d = Exponential(1.0)
    assert negated(negated(d)) is d


def test_negated_cdf_matches_reflection():
    d = negated(Exponential(2.0))
    for x in np.linspace(-3.0, 0.5, 29):
        assert d.cdf(x) == pytest.approx(1.0 - Exponential(2.0).cdf(-x), abs=1e-15)


def test_neg_exponential_quantile_closed_form():
    d = NegExponential(2.0)
    for u in (0.1, 0.5, 0.9):
        assert d.cdf(d.quantile(u)) == pytest.approx(u, abs=1e-12)
    assert d.quantile(1.0) == 0.0


@pytest.mark.parametrize("d", ALL_DISTS, ids=lambda d: d.describe())
def test_quantile_inverse_properties(d):
    rng = np.random.default_rng(7)
    for u in rng.random(1000):
        if u == 0.0:
            continue
        q = d.quantile(float(u))
        if q == POS_INF:
            assert d.cdf(1e12) < u
            continue
        assert q != NEG_INF
        assert d.cdf(q) >= u - 1e-12


@pytest.mark.parametrize("d", ALL_DISTS, ids=lambda d: d.describe())
def test_quantile_of_cdf_stays_left(d):
    xs = d.quantile_array(np.linspace(1e-6, 1.0 - 1e-6, 41))
    for x in xs:
        q = d.quantile(d.cdf(float(x)))
        if q in (NEG_INF, POS_INF):
            continue
        # levels u = 1-eps lose relative precision in eps; allow for it
        assert q <= x + 1e-9 + 1e-7 * abs(x)


@pytest.mark.parametrize("d", ALL_DISTS, ids=lambda d: d.describe())
def test_quantile_nondecreasing(d):
    us = np.linspace(0.01, 0.99, 99)
    qs = d.quantile_array(us)
    assert np.all(np.diff(qs) >= -1e-12)


@pytest.mark.parametrize("d", ALL_DISTS, ids=lambda d: d.describe())
def test_cdf_axioms_on_grid(d):
    lo, hi = d.support_hint()
    xs = np.linspace(lo - 1.0, hi + 1.0, 101)
    vals = d.cdf_array(xs)
    assert np.all(np.diff(vals) >= -1e-12)
    assert d.cdf(-1e300) <= 1e-9
    assert d.cdf(1e300) >= 1.0 - 1e-9


@given(st.floats(min_value=1e-6, max_value=1.0 - 1e-6))
@settings(max_examples=200, deadline=None)
def test_generalized_inverse_property_for_products(u):
    d = Product(Uniform(), Exponential(1.0))
    q = d.quantile(u)
    assert d.cdf(q) >= u - 1e-10


def test_quantile_array_rejects_boundary_levels():
    with pytest.raises(ValueError):
        Uniform().quantile_array(np.array([0.0, 0.5]))


def test_tabulated_rejects_bad_tables():
    with pytest.raises(TableFormatError):
        TabulatedCdf([0.0, 0.0], [0.1, 0.2])
    with pytest.raises(TableFormatError):
        TabulatedCdf([0.0, 1.0], [0.5, 0.2])
    with pytest.raises(TableFormatError):
        TabulatedCdf([0.0, 1.0], [0.5, 1.2])


def test_csv_loader_round_trip(tmp_path):
    path = tmp_path / "table.csv"
    path.write_text("x,p\n0.0,0.4\n1.0,1.0\n")
    d = load_tabulated_csv(path, "step")
    assert d.cdf(0.5) == 0.4
    assert d.describe() == f"step:file={path}"


def test_csv_loader_rejects_unsorted(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("x,p\n1.0,0.4\n0.0,1.0\n")
    with pytest.raises(TableFormatError):
        load_tabulated_csv(path)


def test_csv_loader_rejects_out_of_range(tmp_path):
    path = tmp_path / "bad2.csv"
    path.write_text("x,p\n0.0,0.4\n1.0,1.4\n")
    with pytest.raises(TableFormatError):
        load_tabulated_csv(path)
