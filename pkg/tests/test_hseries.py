from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from rmx.hseries import HSeries
from rmx.ratfunc import RatFunc

Z = RatFunc.var("Z")
H2 = {"h": 2}
H3 = {"h": 3}
H4 = {"h": 4}


def h(caps):
    return HSeries.capped_var("h", caps)


def test_mul_truncates():
    a = 1 + h(H2)
    b = 1 - h(H2)
    # h^2 term falls outside the cap (L=2 keeps h^0, h^1)
    assert a * b == HSeries.one(H2)


def test_mul_with_ratfunc_coeffs():
    a = HSeries.const(1 / (1 - Z), H3)
    assert a * HSeries.const(1 - Z, H3) == 1


def test_inv_geometric():
    a = 1 - h(H3)
    assert a.inv() == 1 + h(H3) + h(H3) * h(H3)
    assert (a * a.inv()).is_one()


def test_inv_requires_unit():
    with pytest.raises(ZeroDivisionError):
        h(H3).inv()


def test_exp_shift_basic():
    assert HSeries.exp_shift({}, H3).is_one()
    e = HSeries.exp_shift({"h": -2}, H3)
    assert e == 1 - 2 * h(H3) + 2 * h(H3) ** 2


def test_exp_shift_half_integer():
    e = HSeries.exp_shift({"h": Fraction(1, 2)}, H3)
    assert e.coeff({"h": 1}) == Fraction(1, 2)
    assert e.coeff({"h": 2}) == Fraction(1, 8)


def test_exp_shift_multivar():
    caps = {"h": 2, "u": 2, "v": 2}
    e = HSeries.exp_shift({"u": 1, "v": -1, "h": Fraction(1, 2)}, caps)
    assert e.coeff({}) == 1
    assert e.coeff({"u": 1}) == 1
    assert e.coeff({"v": 1}) == -1
    assert e.coeff({"u": 1, "v": 1}) == -1
    assert e.coeff({"u": 1, "h": 1}) == Fraction(1, 2)


def test_exp_shift_inverse_pair():
    caps = {"h": 4, "u": 3}
    f = {"h": Fraction(3, 2), "u": -2}
    g = {k: -v for k, v in f.items()}
    assert (HSeries.exp_shift(f, caps) * HSeries.exp_shift(g, caps)).is_one()


def test_subst_mult_identity():
    a = HSeries.const(1 / (1 - Z), H2)
    assert a.subst_mult("Z", HSeries.one(H2)) == a


def test_subst_mult_exp():
    # 1/(1 - Z e^{-h}) = 1/(1-Z) - h Z/(1-Z)^2 + O(h^2)
    a = HSeries.const(1 / (1 - Z), H2)
    out = a.subst_mult("Z", HSeries.exp_shift({"h": -1}, H2))
    assert out.coeff({}) == 1 / (1 - Z)
    assert out.coeff({"h": 1}) == -Z / ((1 - Z) ** 2)


def test_subst_mult_plain_var():
    a = HSeries.const(Z, H2)
    out = a.subst_mult("Z", HSeries.exp_shift({"h": Fraction(-1, 2)}, H2))
    assert out == HSeries.const(Z, H2) - HSeries.const(Z, H2) * h(H2) * Fraction(1, 2)


def test_coeff_cap_errors():
    a = HSeries.one(H3)
    with pytest.raises(ValueError):
        a.coeff({"h": 3})
    with pytest.raises(KeyError):
        a.coeff({"u": 1})


def test_diff_capped_reduces_cap():
    caps = {"h": 2, "u": 3}
    e = HSeries.exp_shift({"u": 2}, caps)
    d = e.diff_capped("u")
    assert d.caps == {"h": 2, "u": 2}
    assert d.coeff({}) == 2
    assert d.coeff({"u": 1}) == 4


def test_diff_ring_var():
    a = HSeries.const(1 / (1 - Z), H2)
    assert a.diff_ring_var("Z") == HSeries.const(1 / ((1 - Z) ** 2), H2)


def test_subs_ring_var():
    a = HSeries.const(1 / (1 - Z), H2) * h(H2)
    out = a.subs_ring_var("Z", Z ** -1)
    assert out.coeff({"h": 1}) == Z / (Z - 1)


def test_serialization_roundtrip():
    a = HSeries.const(1 / (1 - Z), H3) + h(H3) * (Z / (1 + Z))
    assert HSeries.from_data(a.to_data()) == a


def small_series(caps):
    consts = st.fractions(min_value=-6, max_value=6, max_denominator=4)

    @st.composite
    def build(draw):
        acc = HSeries.const(draw(consts), caps)
        for _ in range(draw(st.integers(0, 3))):
            c = draw(consts) * Z ** draw(st.integers(0, 2))
            m = HSeries.const(c, caps)
            for n in caps:
                m = m * HSeries.capped_var(n, caps) ** draw(st.integers(0, 1))
            acc = acc + m
        return acc

    return build()


CAPS = {"h": 3, "u": 2}


@settings(max_examples=25, deadline=None)
@given(small_series(CAPS), small_series(CAPS), small_series(CAPS))
def test_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a


@settings(max_examples=25, deadline=None)
@given(small_series(CAPS))
def test_inverse_two_sided(a):
    u = a + 1 - HSeries.const(a.coeff({}), CAPS)  # force unit constant term
    assert (u * u.inv()).is_one()
    assert (u.inv() * u).is_one()


@settings(max_examples=20, deadline=None)
@given(small_series(CAPS), small_series(CAPS))
def test_subst_mult_is_homomorphism(a, b):
    f = HSeries.exp_shift({"h": -1, "u": Fraction(1, 2)}, CAPS)
    lhs = (a * b).subst_mult("Z", f)
    rhs = a.subst_mult("Z", f) * b.subst_mult("Z", f)
    assert lhs == rhs
