"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest -v -s tests/test_acceptance.py`` to see the per-criterion
lines as they complete.
"""

import pytest

from guegap.errors import PrecisionExhausted
from guegap.hp import HPReal
from guegap.ladder import (build_aux, check_difference_relations,
                           check_lowering, check_ode_P, check_raising,
                           check_supplementary, p_from_aux)
from guegap.mc import determinant_probability, gap_estimate
from guegap.moments import WeightParams, build_table
from guegap.ortho import build_recurrence
from guegap.painleve import (AGrid, build_grid, diff_relations_in_a,
                             iterate_beta, r_sigma_residuals,
                             riccati_residuals, second_order_residuals,
                             sigma_ode_residual, sigma_series)
from guegap.scaling import (build_profile, cauchy_gaps, limit_ode_residuals,
                            pv_residual)

Z_SAMPLE = ("0.31", "0.77", "1.39", "2.23", "3.11")


def _pipeline(A, B, a, n_max, prec):
    params = WeightParams(A=A, B=B, a=a, prec=prec)
    table = build_recurrence(build_table(params, n_max), n_max)
    return table, build_aux(table)


def _report(num, desc, detail=""):
    tail = f"  [{detail}]" if detail else ""
    print(f"\nACCEPTANCE {num:2d}: {desc}: PASS{tail}")


def _fail(num, desc, exc):
    print(f"\nACCEPTANCE {num:2d}: {desc}: FAIL ({exc})")


def _criterion(num, desc):
    def wrap(fn):
        def run():
            try:
                detail = fn()
            except BaseException as exc:
                _fail(num, desc, exc)
                raise
            _report(num, desc, detail or "")
        run.__name__ = fn.__name__
        return run
    return wrap


@_criterion(1, "classical reduction at B=0 (beta_n = n/2, aux identically 0)")
def test_criterion_01_classical_reduction():
    prec = 512
    table, aux = _pipeline(1, 0, 1, 40, prec)
    worst = 0.0
    for n in range(1, 41):
        ref = HPReal(n, prec) / 2
        worst = max(worst, float(abs(table.beta[n] - ref) / ref))
    assert worst < 1e-60
    assert all(R == 0 for R in aux.R)
    assert all(r == 0 for r in aux.r)
    sigma = -table.params.a * sum(aux.R[:40], HPReal(0, prec))
    assert sigma == 0
    return f"max rel dev {worst:.2e}"


@_criterion(2, "cross-route beta: moment orthogonalisation vs iteration")
def test_criterion_02_cross_route_beta():
    prec = 512
    worst = 0.0
    for (A, B) in ((0, 1), (1, -1)):
        for a in ("0.4", "0.8"):
            params = WeightParams(A=A, B=B, a=a, prec=prec)
            table = build_recurrence(build_table(params, 30), 30)
            betas = iterate_beta(params, 30)
            for n in range(1, 31):
                rel = float(abs(betas[n] - table.beta[n]) / table.beta[n])
                worst = max(worst, rel)
    assert worst < 1e-25
    return f"max rel dev {worst:.2e}"


@_criterion(3, "ladder and supplementary identities below 1e-40 at 512 bits")
def test_criterion_03_ladder_identities():
    prec = 512
    worst = 0.0
    for (A, B, a) in ((0, 1, "0.5"), (1, -1, "0.8")):
        table, aux = _pipeline(A, B, a, 21, prec)
        zs = [HPReal(z, prec) for z in Z_SAMPLE]
        for n in range(1, 21):
            for z in zs:
                worst = max(worst, float(check_lowering(table, aux, n, z)))
                worst = max(worst, float(check_raising(table, aux, n, z)))
                for res in check_supplementary(aux, table, n, z):
                    worst = max(worst, float(res))
                if n >= 2:
                    worst = max(worst, float(check_ode_P(table, aux, n, z)))
    assert worst < 1e-40
    return f"max residual {worst:.2e}"


@_criterion(4, "difference relations and subleading-coefficient cross-check")
def test_criterion_04_difference_relations():
    prec = 512
    worst = 0.0
    for (A, B, a) in ((0, 1, "0.5"), (1, -1, "0.8")):
        table, aux = _pipeline(A, B, a, 31, prec)
        for n in range(1, 31):
            for res in check_difference_relations(aux, table, n):
                worst = max(worst, float(res))
            if aux.R[n] != 0 and n >= 2:
                rel = abs(p_from_aux(aux, table, n) - table.p_coeff[n]) \
                    / abs(table.p_coeff[n])
                worst = max(worst, float(rel))
    assert worst < 1e-40
    return f"max residual {worst:.2e}"


@_criterion(5, "differential and Riccati relations are O(h^2) in a")
def test_criterion_05_first_order_fd():
    prec = 320

    def residuals(h):
        data = build_grid(0, 1, AGrid.centered("0.5", h, 2, prec), 6, prec)
        c = len(data.grid.values) // 2 - 1  # centre of the interior tuple
        res_lnh, res_p = diff_relations_in_a(data, 5)
        res_r, res_R = riccati_residuals(data, 4)
        return [float(res_lnh[c]), float(res_p[c]), float(res_r[c]),
                float(res_R[c])]

    base = residuals("1e-4")
    half = residuals("5e-5")
    ratios = [b / v for b, v in zip(base, half)]
    assert all(3.5 < r < 4.5 for r in ratios)
    assert all(v < 1e-6 for v in base)
    return f"ratios {['%.2f' % r for r in ratios]}"


@_criterion(6, "second-order ODE residuals are O(h^2) and below 1e-6")
def test_criterion_06_second_order_fd():
    prec = 320

    def residuals(h):
        data = build_grid(0, 1, AGrid.centered("0.5", h, 2, prec), 8, prec)
        res_R, res_r, res_b = second_order_residuals(data, 6)
        return [float(res_R[0]), float(res_r[0]), float(res_b[0])]

    base = residuals("1e-4")
    half = residuals("5e-5")
    ratios = [b / v for b, v in zip(base, half)]
    assert all(v < 1e-6 for v in base)
    assert all(3.5 < r < 4.5 for r in ratios)
    return f"residuals {['%.1e' % v for v in base]}, ratios {['%.2f' % r for r in ratios]}"


@_criterion(7, "sigma machinery: route agreement, r-sigma identity, sigma ODE")
def test_criterion_07_sigma():
    prec = 512
    details = []
    for (A, B, a) in ((0, 1, "0.5"), (1, -1, "0.8")):
        data = build_grid(A, B, AGrid.centered(a, "1e-4", 2, prec), 8, prec)
        series = sigma_series(data, 8)
        route = max(float(abs(s1 - s2) / (abs(s1) + 1e-300))
                    for s1, s2 in zip(series.sigma, series.sigma_alt))
        assert route < 1e-40
        ident = max(float(x) for x in r_sigma_residuals(data, 8, series))
        assert ident < 1e-100  # rounding level at 512 bits
        ode = max(float(r) for r in sigma_ode_residual(series) if r is not None)
        assert ode < 1e-6
        details.append(f"({A},{B}): ode {ode:.1e}")
    return "; ".join(details)


@_criterion(8, "double scaling: Cauchy contraction and decreasing residuals")
def test_criterion_08_double_scaling():
    profile = build_profile(0, 1, ["0.5", "1", "2"], [64, 128, 256])
    for tau in ("0.5", "1", "2"):
        gaps = cauchy_gaps(profile, tau)
        assert gaps[1] < gaps[0]
        pv = [float(pv_residual(profile, tau, L)) for L in (1, 2, 3)]
        assert pv[2] < pv[1] < pv[0]
        ode = [limit_ode_residuals(profile, tau, L) for L in (1, 2, 3)]
        res_R = [float(x[0]) for x in ode]
        res_r = [float(x[1]) for x in ode]
        assert res_R[2] < res_R[1] < res_R[0]
        assert res_r[2] < res_r[1] < res_r[0]
    return f"pv trend at tau=2: {['%.1e' % v for v in pv]}"


@_criterion(9, "Monte Carlo matches the determinant route within 4 sigma")
def test_criterion_09_monte_carlo():
    details = []
    first = {}
    for case, seed in (("complement", 7), ("bulk", 20260809)):
        est = gap_estimate(4, 0.8, case, 1_000_000, seed=seed, workers=4)
        first[case] = est
        det = float(determinant_probability(4, "0.8", case, prec=256))
        dev = abs(est.p_hat - det)
        assert dev < 4 * est.std_err
        details.append(f"{case}: z={dev / est.std_err:.2f}")
    again = gap_estimate(4, 0.8, "complement", 1_000_000, seed=7, workers=4)
    assert again.p_hat == first["complement"].p_hat
    return "; ".join(details)


@_criterion(10, "fixed 64-bit precision exhausts by n = 40; 512 bits completes")
def test_criterion_10_conditioning():
    params = WeightParams(A=0, B=1, a="0.5", prec=64)
    moments = build_table(params, 40)
    with pytest.raises(PrecisionExhausted) as err:
        build_recurrence(moments, 40)
    assert err.value.n is not None and err.value.n <= 40
    table = build_recurrence(
        build_table(WeightParams(A=0, B=1, a="0.5", prec=512), 40), 40)
    assert table.n_max == 40
    return f"exhausted at n={err.value.n} with 64 bits"
