"""Unit-system and dimension-vector algebra."""

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from ridgelaw.dimensions import (
    DimensionVector,
    QuantityDecl,
    UnitSystem,
    as_fraction,
    combine,
    is_dimensionless,
    make_dimension,
)
from ridgelaw.errors import ModelError

MSK = UnitSystem(("m", "s", "kg"))
KMS = UnitSystem(("kg", "m", "s"))


def frac_vec(v):
    return tuple(Fraction(x) for x in v)


class TestMakeDimension:
    def test_velocity_in_m_s_kg(self):
        v = make_dimension(MSK, [("m", 1), ("s", -1)])
        assert v.exponents == frac_vec([1, -1, 0])

    def test_empty_pairs_is_dimensionless(self):
        v = make_dimension(MSK, [])
        assert v.exponents == frac_vec([0, 0, 0])

    def test_density_in_kg_m_s(self):
        v = make_dimension(KMS, [("kg", 1), ("m", -3)])
        assert v.exponents == frac_vec([1, -3, 0])

    def test_unknown_label_is_named_in_error(self):
        with pytest.raises(ModelError, match="furlong"):
            make_dimension(MSK, [("furlong", 1)])

    def test_repeated_labels_accumulate(self):
        v = make_dimension(MSK, [("m", 1), ("m", 2)])
        assert v.exponents[0] == 3

    def test_rational_string_exponents(self):
        v = make_dimension(MSK, [("m", "3/2")])
        assert v.exponents[0] == Fraction(3, 2)


class TestCombine:
    def test_quantity_over_itself_is_dimensionless(self):
        v = DimensionVector(frac_vec([1, -1, 0]), MSK)
        assert combine(v, v, 1, -1).exponents == frac_vec([0, 0, 0])

    def test_density_times_diameter(self):
        rho = DimensionVector(frac_vec([1, -3, 0]), KMS)
        diam = DimensionVector(frac_vec([0, 1, 0]), KMS)
        assert combine(rho, diam, 1, 1).exponents == frac_vec([1, -2, 0])

    def test_pure_scaling(self):
        mu = DimensionVector(frac_vec([1, -1, -1]), KMS)
        assert combine(mu, mu, 0, 2).exponents == frac_vec([2, -2, -2])

    def test_mismatched_systems_rejected(self):
        a = DimensionVector(frac_vec([1, 0, 0]), MSK)
        b = DimensionVector(frac_vec([1, 0, 0]), KMS)
        with pytest.raises(ModelError):
            combine(a, b, 1, 1)


class TestIsDimensionless:
    def test_zero_vector(self):
        assert is_dimensionless(DimensionVector(frac_vec([0, 0, 0]), MSK))

    def test_velocity_is_not(self):
        assert not is_dimensionless(DimensionVector(frac_vec([1, -1, 0]), MSK))

    def test_reynolds_combination_is_dimensionless(self):
        rho = DimensionVector(frac_vec([1, -3, 0]), KMS)
        vel = DimensionVector(frac_vec([0, 1, -1]), KMS)
        diam = DimensionVector(frac_vec([0, 1, 0]), KMS)
        mu = DimensionVector(frac_vec([1, -1, -1]), KMS)
        re = combine(combine(rho, vel, 1, 1), combine(diam, mu, 1, -1), 1, 1)
        assert is_dimensionless(re)


rationals = st.fractions(min_value=-5, max_value=5, max_denominator=6)


@given(
    a=st.lists(rationals, min_size=3, max_size=3),
    b=st.lists(rationals, min_size=3, max_size=3),
    c=rationals,
    d=rationals,
    alpha=rationals,
)
def test_combine_is_bilinear_in_powers(a, b, c, d, alpha):
    va = DimensionVector(tuple(a), MSK)
    vb = DimensionVector(tuple(b), MSK)
    scaled = combine(va, vb, alpha * c, alpha * d)
    base = combine(va, vb, c, d)
    assert scaled.exponents == tuple(alpha * e for e in base.exponents)


@given(v=st.lists(rationals, min_size=3, max_size=3))
def test_self_cancellation_is_dimensionless(v):
    vec = DimensionVector(tuple(v), MSK)
    assert is_dimensionless(combine(vec, vec, 1, -1))


@given(exps=st.lists(rationals, min_size=3, max_size=3))
def test_make_dimension_round_trips(exps):
    pairs = list(zip(MSK.unit_names, exps))
    v = make_dimension(MSK, pairs)
    assert v.exponents == tuple(as_fraction(e) for e in exps)


class TestUnitSystem:
    def test_duplicate_labels_rejected(self):
        with pytest.raises(ModelError):
            UnitSystem(("m", "m"))

    def test_empty_label_rejected(self):
        with pytest.raises(ModelError):
            UnitSystem(("m", ""))

    def test_more_than_seven_units_rejected(self):
        with pytest.raises(ModelError):
            UnitSystem(tuple(f"u{i}" for i in range(8)))

    def test_seven_units_allowed(self):
        assert UnitSystem(tuple(f"u{i}" for i in range(7))).k == 7


class TestQuantityDecl:
    def test_valid_range(self):
        q = QuantityDecl("rho", make_dimension(KMS, [("kg", 1), ("m", -3)]), 0.1, 0.14)
        assert q.has_range

    def test_negative_range_rejected(self):
        with pytest.raises(ModelError, match="rho"):
            QuantityDecl("rho", make_dimension(KMS, []), -1.0, 2.0)

    def test_inverted_range_rejected(self):
        with pytest.raises(ModelError):
            QuantityDecl("rho", make_dimension(KMS, []), 2.0, 1.0)

    def test_range_is_optional(self):
        assert not QuantityDecl("rho", make_dimension(KMS, [])).has_range

    def test_half_range_rejected(self):
        with pytest.raises(ModelError):
            QuantityDecl("rho", make_dimension(KMS, []), 1.0, None)
