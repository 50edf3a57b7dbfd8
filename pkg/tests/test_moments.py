import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from guegap import hp
from guegap.hp import HPReal
from guegap.moments import (MomentTable, WeightParams, build_table, moment,
                            tail_integral)

# mpmath quadrature oracles (dps=90):
#   I0(1)  = int_1^inf e^(-x^2) dx
#   I2(1)  = int_1^inf x^4 e^(-x^2) dx
#   mu0 at (A=0,B=1,a=1) = 2 I0(1)
I0_1 = "0.1394027926403309882496163055387195860442750412485872350792493959678503"
I2_1 = "0.5644013959445511431816169418558657738404701947261502194442330490977146"
MU0_011 = "0.2788055852806619764992326110774391720885500824971744701584987919357006"

# mu_{2m} at (A=0,B=1,a=0.5) for m = 0..4, same quadrature oracle
MU_0105 = [
    "0.8498918380799311297867616098602389766300312781938048348528626579829435",
    "0.8143463105756679990159659384192798119634017843099731545470900121255946",
    "1.318869563747427607054595191001209798857199212768227416100799688971923",
    "3.321511433839550419769149548346097017371022165996385461322040390125689",
    "11.63137439955617181972518881192210769085558361450630334489465165736388",
]


def test_tail_integral_collapses_to_half_gaussian():
    prec = 256
    v = tail_integral(0, HPReal("1e-40", prec), prec)
    ref = hp.sqrt_pi(prec) / 2
    assert abs(v - ref) / ref < HPReal("1e-35", 64)


def test_tail_integral_seed_matches_quadrature():
    prec = 192
    v = tail_integral(0, HPReal(1, prec), prec)
    assert abs(v - HPReal(I0_1, 256)) < HPReal("1e-55", 64)


def test_tail_integral_recursion_matches_quadrature():
    prec = 192
    v = tail_integral(2, HPReal(1, prec), prec)
    assert abs(v - HPReal(I2_1, 256)) < HPReal("1e-55", 64)


def test_tail_integral_rejects_negative_order():
    with pytest.raises(ValueError):
        tail_integral(-1, HPReal(1, 128), 128)


def test_moment_gaussian_normalisation():
    params = WeightParams(A=1, B=0, a=1, prec=256)
    v = moment(0, params)
    ref = hp.sqrt_pi(256)
    assert abs(v - ref) / ref < HPReal(2, 64) ** (8 - 256)


def test_odd_moments_exactly_zero():
    params = WeightParams(A="0.7", B="0.1", a="1.3", prec=128)
    for k in (1, 3, 11):
        assert moment(k, params) == 0


def test_moment_pure_jump_matches_quadrature():
    params = WeightParams(A=0, B=1, a=1, prec=192)
    v = moment(0, params)
    assert abs(v - HPReal(MU0_011, 256)) < HPReal("1e-55", 64)


def test_build_table_pure_gaussian_first_three():
    params = WeightParams(A=1, B=0, a=1, prec=256)
    table = build_table(params, 2)
    sp = hp.sqrt_pi(256)
    tol = HPReal(2, 64) ** (8 - 256)
    assert abs(table.mu(0) - sp) / sp < tol
    assert abs(table.mu(2) - sp / 2) / sp < tol
    assert abs(table.mu(4) - 3 * sp / 4) / sp < tol


def test_bulk_weight_approaches_gaussian_for_large_a():
    prec = 512
    far = build_table(WeightParams(A=1, B=-1, a=20, prec=prec), 6)
    pure = build_table(WeightParams(A=1, B=0, a=1, prec=prec), 6)
    for m in range(7):
        rel = abs(far.mu(2 * m) - pure.mu(2 * m)) / pure.mu(2 * m)
        assert rel < HPReal("1e-100", 64)


def test_jump_moments_match_quadrature_to_declared_tolerance():
    prec = 192
    params = WeightParams(A=0, B=1, a="0.5", prec=prec)
    table = build_table(params, 4)
    tol = HPReal(10, 64) ** (-int(prec * 0.3))
    for m in range(5):
        ref = HPReal(MU_0105[m], 256)
        assert abs(table.mu(2 * m) - ref) / ref < tol


def test_recursion_agrees_with_quadrature_up_to_m12():
    mp.mp.dps = 45
    a = mp.mpf("0.7")
    params = WeightParams(A=0, B=1, a="0.7", prec=256)
    table = build_table(params, 12)
    for m in range(13):
        ref = 2 * mp.quad(lambda x: x ** (2 * m) * mp.e ** (-x * x), [a, mp.inf])
        got = mp.mpf(hp.to_decimal(table.mu(2 * m)))
        assert abs(got - ref) / ref < mp.mpf("1e-30")


def test_bulk_route_agrees_with_quadrature():
    mp.mp.dps = 45
    a = mp.mpf("0.8")
    params = WeightParams(A=1, B=-1, a="0.8", prec=256)
    table = build_table(params, 10)
    for m in range(11):
        ref = 2 * mp.quad(lambda x: x ** (2 * m) * mp.e ** (-x * x), [0, a])
        got = mp.mpf(hp.to_decimal(table.mu(2 * m)))
        assert abs(got - ref) / ref < mp.mpf("1e-30")


@given(A=st.floats(min_value=0, max_value=4),
       B=st.floats(min_value=-1, max_value=4),
       a=st.floats(min_value=0.05, max_value=2.5),
       m=st.integers(min_value=0, max_value=8))
@settings(max_examples=30, deadline=None)
def test_moment_linear_in_weight(A, B, a, m):
    prec = 128
    if A + B < 0 or (A + B == 0 and A == 0):
        return
    params = WeightParams(A=A, B=B, a=a, prec=prec)
    base_g = moment(2 * m, WeightParams(A=1, B=0, a=a, prec=prec))
    base_j = moment(2 * m, WeightParams(A=0, B=1, a=a, prec=prec))
    combo = A * base_g + B * base_j
    got = moment(2 * m, params)
    scale = abs(combo) + abs(got) + 1
    assert abs(got - combo) / scale < HPReal(2, 64) ** (20 - prec)


def test_jump_moment_decreasing_in_a():
    prec = 128
    for m in (0, 2, 5):
        vals = [moment(2 * m, WeightParams(A=0, B=1, a=a, prec=prec))
                for a in ("0.2", "0.6", "1.0", "1.5", "2.2")]
        assert all(x > y for x, y in zip(vals, vals[1:]))


def test_weight_params_validation():
    with pytest.raises(ValueError):
        WeightParams(A=-1, B=0, a=1, prec=128)
    with pytest.raises(ValueError):
        WeightParams(A=1, B=-2, a=1, prec=128)
    with pytest.raises(ValueError):
        WeightParams(A=0, B=0, a=1, prec=128)
    with pytest.raises(ValueError):
        WeightParams(A=1, B=-1, a=0, prec=128)  # zero weight in the a=0 limit
    with pytest.raises(ValueError):
        WeightParams(A=1, B=0, a=1, prec=32)
    with pytest.raises(ValueError):
        WeightParams(A=1, B=0, a=-1, prec=128)


def test_a_zero_limit_is_scaled_gaussian():
    prec = 192
    collapsed = build_table(WeightParams(A="0.5", B="1.5", a=0, prec=prec), 4)
    pure = build_table(WeightParams(A=2, B=0, a=1, prec=prec), 4)
    for m in range(5):
        rel = abs(collapsed.mu(2 * m) - pure.mu(2 * m)) / pure.mu(2 * m)
        assert rel < HPReal(2, 64) ** (16 - prec)


def test_table_rejects_order_out_of_range():
    table = build_table(WeightParams(A=1, B=0, a=1, prec=128), 3)
    with pytest.raises(ValueError):
        table.mu(8)
