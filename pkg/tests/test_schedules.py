import numpy as np
import pytest
from hypothesis import given, strategies as st

from proxpoint import schedules as sch
from proxpoint.exceptions import ParameterError

V = np.array


def test_scalar_examples():
    assert sch.value_at(sch.Poly(1.0, 1.0), 4) == 5.0
    assert sch.value_at(sch.Inv(1.0), 3) == 0.25
    h = sch.HalpernForm(V([2.0]), V([0.0]), sch.OneMinus(sch.Inv(1.0)))
    np.testing.assert_array_equal(h.value_at(1), [1.0])


def test_error_examples():
    np.testing.assert_array_equal(sch.error_at(sch.ZeroError(), 17, 3), np.zeros(3))
    np.testing.assert_array_equal(sch.error_at(sch.Growing(V([1.0, 0.0]), 0.5), 3, 2), [2.0, 0.0])
    m = sch.BoundedRandom(1.0, seed=42)
    a, b = sch.error_at(m, 5, 4), sch.error_at(m, 5, 4)
    np.testing.assert_array_equal(a, b)
    assert np.linalg.norm(a) <= 1.0


def test_bounded_random_streams_differ():
    a = sch.BoundedRandom(1.0, seed=1)
    b = sch.BoundedRandom(1.0, seed=2)
    assert not np.array_equal(a.error_at(3, 5), b.error_at(3, 5))
    assert not np.array_equal(a.error_at(3, 5), a.error_at(4, 5))


def test_limits():
    assert sch.Poly(1.0, 1.0).limit() == np.inf
    assert sch.Inv(2.0).limit() == 0.0
    assert sch.OneMinus(sch.Inv(1.0)).limit() == 1.0
    assert sch.Geom(1.0, 0.5).limit() == 0.0
    u = V([1.0, 2.0])
    np.testing.assert_array_equal(sch.ConstVec(u).limit(), u)
    np.testing.assert_array_equal(sch.Converging(u, V([5.0, 5.0]), 1.0).limit(), u)
    np.testing.assert_array_equal(sch.HalpernForm(u, V([0.0, 0.0]), sch.OneMinus(sch.Inv(1.0))).limit(), u)


def test_validator_examples():
    u = sch.ConstVec(V([1.0, 1.0]))
    r = sch.validate(sch.H_GENERAL, sch.Poly(1.0, 1.0), sch.Inv(1.0), u, sch.BoundedRandom(1.0, 0))
    assert r.passed

    r = sch.validate(sch.H_GENERAL, sch.Const(1.0), sch.Inv(1.0), u, sch.ZeroError())
    assert not r.passed
    assert [c.name for c in r.failures()] == ["β_n → ∞"]

    r = sch.validate(sch.H_GENERAL, sch.Poly(1.0, 1.0), sch.Inv(1.0), u, sch.Growing(V([1.0, 0.0]), 0.5))
    assert r.passed


def test_validator_growing_error_needs_q_below_one():
    u = sch.ConstVec(V([1.0, 1.0]))
    r = sch.validate(sch.H_GENERAL, sch.Poly(1.0, 1.0), sch.Inv(1.0), u, sch.Growing(V([1.0, 0.0]), 1.0))
    assert [c.name for c in r.failures()] == ["α_n e_n → 0"]


def test_validator_negative_alpha_allowed():
    u = sch.ConstVec(V([1.0]))
    assert sch.validate(sch.H_GENERAL, sch.Poly(1.0, 1.0), sch.Inv(-1.0), u, sch.ZeroError()).passed


def test_wang_cui():
    u = sch.ConstVec(V([1.0]))
    ok = sch.validate(sch.WANG_CUI, sch.Const(1.0), sch.Inv(0.5), u, sch.Summable(V([1.0]), 0.5))
    assert ok.passed
    # square-summable lambda fails sum = infinity
    r = sch.validate(sch.WANG_CUI, sch.Const(1.0), sch.Poly(0.5, -2.0), u, sch.ZeroError())
    assert "Σλ_n = ∞" in [c.name for c in r.failures()]
    # bounded non-summable errors fail the error condition
    r = sch.validate(sch.WANG_CUI, sch.Const(1.0), sch.Inv(0.5), u, sch.BoundedRandom(1.0))
    assert [c.name for c in r.failures()] == ["Σ‖e_n‖ < ∞ or ‖e_n‖/λ_n → 0"]


def test_unknown_hypothesis_set():
    with pytest.raises(ValueError):
        sch.validate("NOPE", sch.Const(1.0), sch.Inv(1.0), sch.ConstVec(V([1.0])), sch.ZeroError())


def test_parsers_roundtrip():
    for text in ("const:2", "poly:1:1", "geom:3:0.5", "inv:1", "oneminus:inv:1", "oneminus:poly:1:-0.5"):
        s = sch.parse_scalar(text)
        assert sch.parse_scalar(s.literal()) == s
    for text in ("zero", "bounded:1:42", "growing:1 0:0.5", "summable:1 1:0.5"):
        m = sch.parse_error(text)
        again = sch.parse_error(m.literal())
        for n in (0, 7):
            np.testing.assert_array_equal(m.error_at(n, 2), again.error_at(n, 2))
    u = sch.parse_vector_schedule("halpern:2:0:oneminus:inv:1")
    np.testing.assert_array_equal(u.value_at(1), [1.0])
    u = sch.parse_vector_schedule("converging:1 2:4 4:1")
    np.testing.assert_array_equal(u.value_at(3), [2.0, 3.0])


@pytest.mark.parametrize("bad", ["", "poly:1", "geom:1:-1", "wat:1", "inv:x"])
def test_parse_scalar_errors(bad):
    with pytest.raises((ValueError, ParameterError)):
        sch.parse_scalar(bad)


# -- properties ---------------------------------------------------------------

coef = st.floats(0.1, 10.0)
scalars = st.one_of(
    st.builds(sch.Const, coef),
    st.builds(sch.Poly, coef, st.sampled_from([-2.0, -1.0, -0.5, 0.5, 1.0, 2.0])),
    st.builds(sch.Geom, coef, st.sampled_from([0.5, 0.9, 1.5])),
    st.builds(sch.Inv, coef),
)


@given(scalars)
def test_tag_matches_probes(s):
    order = s.order()
    a, b = abs(s.value_at(10**3)), abs(s.value_at(10**6))
    if order.diverges:
        assert b >= 10 * a
    elif order.vanishes:
        assert b <= a / 10
    else:
        assert a == b


@given(st.integers(0, 2**32), st.integers(0, 10**9), st.integers(1, 20))
def test_error_determinism(seed, n, dim):
    m = sch.BoundedRandom(0.5, seed=seed)
    a, b = m.error_at(n, dim), m.error_at(n, dim)
    assert a.tobytes() == b.tobytes()
    assert np.linalg.norm(a) <= 0.5


unit = st.floats(0.0, 1.0)
unit_scalars = st.one_of(
    st.builds(sch.Const, unit),
    st.builds(sch.Inv, unit),
    st.builds(sch.Poly, unit, st.floats(-3.0, 0.0)),
    st.builds(sch.Geom, unit, st.floats(0.01, 1.0)),
)


# ONE_MINUS is meant for weights in [0, 1]; far outside it 1 - s rounds
@given(unit_scalars, st.integers(0, 10**6))
def test_one_minus_complements(s, n):
    om = sch.OneMinus(s)
    assert om.value_at(n) + s.value_at(n) == 1.0
