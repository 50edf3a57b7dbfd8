"""Auxiliary boundary quantities and residual checks of the ladder relations.

The two auxiliary sequences packaged here are boundary values of the monic
polynomials at the jump point, weighted by the norms:

    R_n = 2 B P_n(a)^2 e^(-a^2) / h_n,
    r_n = 2 B P_n(a) P_{n-1}(a) e^(-a^2) / h_{n-1},   r_0 = 0.

They parameterise the coefficient functions of the lowering/raising pair

    A_n(z) = a R_n / (z^2 - a^2) + 2,
    B_n(z) = z r_n / (z^2 - a^2),

and satisfy a family of algebraic identities (the supplementary conditions
S1, S2, S2' and four difference relations) that every check_* routine
evaluates pointwise, returning a relative residual.  Residuals are
diagnostics: thresholds live in the callers and the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import hp
from .errors import AnZero, AuxDegenerate, PoleAtJump
from .hp import HPReal
from .moments import WeightParams
from .ortho import RecurrenceTable, eval_poly_derivs

#: default exclusion radius around z = +/-a, as a multiple of max(1, a)
POLE_RADIUS = 1e-6


@dataclass(frozen=True)
class AuxSequence:
    """R_n and r_n for n = 0..n_max at one weight configuration.

    sign(R_n) = sign(B) whenever P_n(a) != 0, and r_n^2 = beta_n R_n R_{n-1}
    holds exactly by construction.
    """

    params: WeightParams
    n_max: int
    R: tuple[HPReal, ...]
    r: tuple[HPReal, ...]


def build_aux(table: RecurrenceTable) -> AuxSequence:
    params = table.params
    p = params.prec
    a = params.a
    w0a = hp.exp(-(a * a), p)
    twoB = 2 * params.B
    R = tuple(twoB * table.Pa[n] * table.Pa[n] * w0a / table.h[n]
              for n in range(table.n_max + 1))
    r = (HPReal(0, p),) + tuple(
        twoB * table.Pa[n] * table.Pa[n - 1] * w0a / table.h[n - 1]
        for n in range(1, table.n_max + 1))
    return AuxSequence(params=params, n_max=table.n_max, R=R, r=r)


def _check_z(params, z, pole_radius):
    z = hp.hp(z, params.prec) if isinstance(z, str) else hp.hp(z)
    a = params.a
    radius = pole_radius if pole_radius is not None else POLE_RADIUS * max(1.0, float(a))
    if abs(z - a) < radius or abs(z + a) < radius:
        raise PoleAtJump(f"z = {float(z)} lies within {radius} of a jump at +/-{float(a)}")
    return z


def An_Bn(aux: AuxSequence, n: int, z, pole_radius: float | None = None
          ) -> tuple[HPReal, HPReal]:
    """Pointwise values of the ladder coefficient functions (A_n(z), B_n(z))."""
    if not 0 <= n <= aux.n_max:
        raise ValueError(f"n must lie in [0, {aux.n_max}]")
    z = _check_z(aux.params, z, pole_radius)
    a = aux.params.a
    den = z * z - a * a
    return aux.R[n] * a / den + 2, z * aux.r[n] / den


def check_lowering(table: RecurrenceTable, aux: AuxSequence, n: int, z,
                   pole_radius: float | None = None) -> HPReal:
    """|P_n' + B_n P_n - beta_n A_n P_{n-1}| / max(1, |P_n'|) at z."""
    if not 1 <= n <= table.n_max:
        raise ValueError(f"n must lie in [1, {table.n_max}]")
    z = _check_z(table.params, z, pole_radius)
    pn, dpn, _, pn1, _, _ = eval_poly_derivs(table, n, z)
    an, bn = An_Bn(aux, n, z, pole_radius)
    rhs = -bn * pn + table.beta[n] * an * pn1
    return abs(dpn - rhs) / max(HPReal(1, table.params.prec), abs(dpn))


def check_raising(table: RecurrenceTable, aux: AuxSequence, n: int, z,
                  pole_radius: float | None = None) -> HPReal:
    """Residual of (d/dz - 2z - B_n) P_{n-1} = -A_{n-1} P_n at z."""
    if not 1 <= n <= table.n_max:
        raise ValueError(f"n must lie in [1, {table.n_max}]")
    z = _check_z(table.params, z, pole_radius)
    pn, _, _, pn1, dpn1, _ = eval_poly_derivs(table, n, z)
    _, bn = An_Bn(aux, n, z, pole_radius)
    an1, _ = An_Bn(aux, n - 1, z, pole_radius)
    lhs = dpn1 - 2 * z * pn1 - bn * pn1
    rhs = -an1 * pn
    return abs(lhs - rhs) / max(HPReal(1, table.params.prec), abs(lhs))


def check_supplementary(aux: AuxSequence, table: RecurrenceTable, n: int, z,
                        pole_radius: float | None = None
                        ) -> tuple[HPReal, HPReal, HPReal]:
    """Relative residuals of the three supplementary conditions at z.

    S1 :  B_n + B_{n+1} = z A_n - 2z
    S2 :  1 + z (B_{n+1} - B_n) = beta_{n+1} A_{n+1} - beta_n A_{n-1}
    S2':  sum_{j<n} A_j + B_n^2 + 2z B_n = beta_n A_n A_{n-1}
    """
    if not 1 <= n <= aux.n_max - 1:
        raise ValueError(f"n must lie in [1, {aux.n_max - 1}]")
    z = _check_z(aux.params, z, pole_radius)
    an, bn = An_Bn(aux, n, z, pole_radius)
    anp1, bnp1 = An_Bn(aux, n + 1, z, pole_radius)
    anm1, _ = An_Bn(aux, n - 1, z, pole_radius)

    l1 = bn + bnp1
    r1 = z * an - 2 * z
    res1 = abs(l1 - r1) / (abs(l1) + abs(r1) + 1)

    l2 = 1 + z * (bnp1 - bn)
    r2 = table.beta[n + 1] * anp1 - table.beta[n] * anm1
    res2 = abs(l2 - r2) / (abs(l2) + abs(r2) + 1)

    suma = HPReal(0, aux.params.prec)
    for j in range(n):
        aj, _ = An_Bn(aux, j, z, pole_radius)
        suma = suma + aj
    l3 = suma + bn * bn + 2 * z * bn
    r3 = table.beta[n] * an * anm1
    res3 = abs(l3 - r3) / (abs(l3) + abs(r3) + 1)
    return res1, res2, res3


def check_difference_relations(aux: AuxSequence, table: RecurrenceTable, n: int
                               ) -> tuple[HPReal, HPReal, HPReal, HPReal]:
    """Relative residuals of the four difference relations at index n.

    (d):  r_n + r_{n+1} = a R_n
    (c):  r_n^2 = beta_n R_n R_{n-1}
    (b):  a sum_{j<n} R_j + r_n^2 + 2 a^2 r_n = 2 a beta_n (R_n + R_{n-1})
    (a):  2 beta_n = n + r_n
    """
    if not 1 <= n <= aux.n_max - 1:
        raise ValueError(f"n must lie in [1, {aux.n_max - 1}]")
    a = aux.params.a
    R, r, beta = aux.R, aux.r, table.beta

    ld = r[n] + r[n + 1]
    rd = a * R[n]
    res_d = abs(ld - rd) / (abs(ld) + abs(rd) + 1)

    lc = r[n] * r[n]
    rc = beta[n] * R[n] * R[n - 1]
    res_c = abs(lc - rc) / (abs(lc) + abs(rc) + 1)

    sumR = HPReal(0, aux.params.prec)
    for j in range(n):
        sumR = sumR + R[j]
    lb = a * sumR + r[n] * r[n] + 2 * a * a * r[n]
    rb = 2 * a * beta[n] * (R[n] + R[n - 1])
    res_b = abs(lb - rb) / (abs(lb) + abs(rb) + 1)

    la = 2 * beta[n]
    ra = n + r[n]
    res_a = abs(la - ra) / (abs(la) + abs(ra) + 1)
    return res_d, res_c, res_b, res_a


def p_from_aux(aux: AuxSequence, table: RecurrenceTable, n: int) -> HPReal:
    """The subleading coefficient p(n, a) reconstructed from (R_n, r_n).

    p(n,a) = -(a/4)(n + r_n) R_n - a r_n^2/(2 R_n) + r_n^2/4 + a^2 r_n/2
             + r_n/4 - (n^2 - n)/4.

    Raises :class:`AuxDegenerate` if R_n = 0 (B = 0 or a zero of P_n at a),
    which makes the 1/R_n term singular.
    """
    if not 1 <= n <= aux.n_max:
        raise ValueError(f"n must lie in [1, {aux.n_max}]")
    a = aux.params.a
    R, r = aux.R[n], aux.r[n]
    if R == 0:
        raise AuxDegenerate(f"R_{n} = 0: the closed form for p(n, a) is singular")
    return (-(a / 4) * (n + r) * R - a * r * r / (2 * R) + r * r / 4
            + a * a * r / 2 + r / 4 - HPReal(n * n - n, aux.params.prec) / 4)


def check_ode_P(table: RecurrenceTable, aux: AuxSequence, n: int, z,
                pole_radius: float | None = None) -> HPReal:
    """Residual of the second-order ODE P_n'' + Q_n P_n' + S_n P_n = 0.

    Q_n = -A_n'/A_n - 2z and
    S_n = B_n' - (A_n'/A_n) B_n - 2z B_n - B_n^2 + beta_n A_n A_{n-1},
    with A_n', B_n' taken from the closed rational forms.  Raises
    :class:`AnZero` where A_n(z) vanishes (possible only for B < 0, at
    z^2 = a^2 - a R_n / 2).
    """
    if not 2 <= n <= table.n_max - 1:
        raise ValueError(f"n must lie in [2, {table.n_max - 1}]")
    z = _check_z(table.params, z, pole_radius)
    prec = table.params.prec
    a = table.params.a
    den = z * z - a * a
    an, bn = An_Bn(aux, n, z, pole_radius)
    anm1, _ = An_Bn(aux, n - 1, z, pole_radius)
    scale = abs(a * aux.R[n] / den) + 2
    if abs(an) <= scale * HPReal(2.0, prec) ** (-(prec // 2)):
        raise AnZero(f"A_{n}({float(z)}) = 0 within rounding; Q_n is undefined")
    dan = -2 * a * aux.R[n] * z / (den * den)
    dbn = -aux.r[n] * (z * z + a * a) / (den * den)
    qn = -dan / an - 2 * z
    sn = dbn - (dan / an) * bn - 2 * z * bn - bn * bn + table.beta[n] * an * anm1
    pn, dpn, d2pn, _, _, _ = eval_poly_derivs(table, n, z)
    t1, t2, t3 = d2pn, qn * dpn, sn * pn
    return abs(t1 + t2 + t3) / (abs(t1) + abs(t2) + abs(t3) + 1)
