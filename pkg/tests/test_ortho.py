import mpmath as mp
import pytest

from guegap import hp
from guegap.errors import PrecisionExhausted
from guegap.hp import HPReal
from guegap.moments import WeightParams, build_table
from guegap.ortho import (build_recurrence, build_recurrence_adaptive,
                          eval_poly, eval_poly_derivs, hankel_logdet,
                          hankel_logdet_direct)

# closed form for the jump weight: beta_1 = 1/2 + a e^(-a^2)/mu_0, evaluated
# with the mpmath quadrature mu_0 at a=1 (dps=90)
BETA1_011 = "1.819483757117395630235750576035780564418843279456476575048707465086304"


def _table(A, B, a, n_max, prec):
    params = WeightParams(A=A, B=B, a=a, prec=prec)
    return build_recurrence(build_table(params, n_max), n_max)


def test_pure_gaussian_recurrence_is_half_integers():
    table = _table(1, 0, 1, 20, 512)
    for n in range(1, 21):
        ref = HPReal(n, 512) / 2
        assert abs(table.beta[n] - ref) / ref < HPReal("1e-100", 64)


def test_beta_zero_is_exactly_zero():
    table = _table(0, 1, "0.8", 5, 256)
    assert table.beta[0] == 0


def test_beta_one_closed_form():
    table = _table(0, 1, 1, 3, 256)
    assert abs(table.beta[1] - HPReal(BETA1_011, 256)) < HPReal("1e-60", 64)


def test_eval_poly_low_degrees():
    table = _table(1, 0, 1, 6, 256)
    z = HPReal("0.37", 256)
    p1, p0 = eval_poly(table, 1, z)
    assert p1 == z and p0 == 1
    p2, _ = eval_poly(table, 2, z)
    ref = z * z - HPReal("0.5", 256)
    assert abs(p2 - ref) < HPReal(2, 64) ** (8 - 256)


def test_eval_poly_parity_is_exact():
    table = _table(0, 1, "0.6", 9, 256)
    for z in ("0.91", "2.7", "0.05"):
        zz = HPReal(z, 256)
        for n in (3, 6, 9):
            plus, _ = eval_poly(table, n, zz)
            minus, _ = eval_poly(table, n, -zz)
            assert minus == (plus if n % 2 == 0 else -plus)


def test_poly_derivative_recurrences():
    # d/dz of the degree-2 pure-Gaussian polynomial z^2 - 1/2 is 2z
    table = _table(1, 0, 1, 4, 256)
    z = HPReal("1.3", 256)
    p, dp, d2p, _, _, _ = eval_poly_derivs(table, 2, z)
    assert abs(dp - 2 * z) < HPReal(2, 64) ** (8 - 256)
    assert abs(d2p - 2) < HPReal(2, 64) ** (8 - 256)


def test_hankel_logdet_first_two():
    prec = 256
    table = _table(1, 0, 1, 4, prec)
    assert abs(hankel_logdet(table, 1) - hp.log(table.h[0])) == 0
    ref = hp.log(hp.pi(prec) / 2, prec)
    assert abs(hankel_logdet(table, 2) - ref) < HPReal(2, 64) ** (16 - prec)


def test_hankel_logdet_product_vs_direct_elimination():
    prec = 512
    params = WeightParams(A=0, B=1, a="0.5", prec=prec)
    moments = build_table(params, 12)
    table = build_recurrence(moments, 12)
    via_product = hankel_logdet(table, 6)
    via_direct = hankel_logdet_direct(moments, 6)
    assert abs(via_product - via_direct) / abs(via_direct) < HPReal("1e-40", 64)
    for n in range(1, 13):
        rel = abs(hankel_logdet(table, n) - hankel_logdet_direct(moments, n)) \
            / abs(hankel_logdet_direct(moments, n))
        assert rel < HPReal("1e-30", 64)


def test_direct_determinant_matches_mpmath():
    mp.mp.dps = 60
    prec = 256
    params = WeightParams(A=0, B=1, a="0.7", prec=prec)
    moments = build_table(params, 6)
    for n in (2, 4, 6):
        m = mp.matrix(n)
        for i in range(n):
            for j in range(n):
                m[i, j] = mp.mpf(hp.to_decimal(moments.mu(i + j)))
        ref = mp.log(mp.det(m))
        got = mp.mpf(hp.to_decimal(hankel_logdet_direct(moments, n)))
        assert abs(got - ref) / abs(ref) < mp.mpf("1e-45")


def test_orthogonality_quadrature_spot_check():
    mp.mp.dps = 80
    prec = 256
    a = mp.mpf("0.6")
    table = _table(0, 1, "0.6", 6, prec)
    betas = [mp.mpf(hp.to_decimal(b)) for b in table.beta]

    def poly(n, x):
        p0, p1 = mp.mpf(1), x
        if n == 0:
            return p0
        for k in range(1, n):
            p0, p1 = p1, x * p1 - betas[k] * p0
        return p1

    def w(x):
        return mp.e ** (-x * x) if abs(x) > a else mp.mpf(0)

    h_max = mp.mpf(hp.to_decimal(table.h[6]))
    for m in range(7):
        for k in range(m):
            val = mp.quad(lambda x: poly(m, x) * poly(k, x) * w(x),
                          [-mp.inf, -a, a, mp.inf])
            assert abs(val) / h_max < mp.mpf(10) ** (-prec // 4)


def test_beta_positive_and_below_n():
    for (A, B, a) in [(1, 0, 1), (0, 1, "0.5"), (1, -1, "0.8"), (2, 3, "1.2")]:
        table = _table(A, B, a, 25, 512)
        for n in range(1, 26):
            assert 0 < table.beta[n] < n


def test_log_determinant_is_cumulative_sum():
    table = _table(0, 1, "0.9", 8, 256)
    acc = HPReal(0, 256)
    for n in range(1, 9):
        acc = acc + hp.log(table.h[n - 1], 256)
        assert abs(table.logD[n] - acc) < abs(acc) * HPReal(2, 64) ** (16 - 256)


def test_subleading_coefficient_is_minus_beta_sum():
    table = _table(1, -1, "0.8", 10, 256)
    assert table.p_coeff[0] == 0 and table.p_coeff[1] == 0
    acc = HPReal(0, 256)
    for n in range(1, 10):
        acc = acc - table.beta[n]
        diff = abs(table.p_coeff[n + 1] - acc)
        assert diff <= abs(acc) * HPReal(2, 64) ** (16 - 256)


def test_precision_exhaustion_at_64_bits():
    params = WeightParams(A=0, B=1, a="0.5", prec=64)
    moments = build_table(params, 40)
    with pytest.raises(PrecisionExhausted) as err:
        build_recurrence(moments, 40)
    assert err.value.n is not None and err.value.n <= 40


def test_same_sweep_completes_at_512_bits():
    table = _table(0, 1, "0.5", 40, 512)
    assert table.n_max == 40
    assert max(table.h_relerr) < 1e-60


def test_adaptive_escalation_recovers():
    params = WeightParams(A=0, B=1, a="0.5", prec=64)
    table = build_recurrence_adaptive(params, 40)
    assert table.params.prec > 64
    ref = _table(0, 1, "0.5", 40, 512)
    rel = abs(table.beta[40] - ref.beta[40]) / ref.beta[40]
    assert rel < HPReal("1e-10", 64)


def test_moment_table_too_short_rejected():
    params = WeightParams(A=1, B=0, a=1, prec=128)
    moments = build_table(params, 4)
    with pytest.raises(ValueError):
        build_recurrence(moments, 6)
