"""Double-scaling limit tau = 2 sqrt(2n) a with tau fixed as n grows.

At fixed tau the finite-n quantities converge (empirically at rate ~1/n) to
limit functions of tau:

    sigma_n(tau / (2 sqrt(2n)))          -> sigma(tau),
    r_n(tau / (2 sqrt(2n)))              -> r(tau),
    sqrt(n) R_n(tau / (2 sqrt(2n)))      -> R(tau),

and the limits satisfy closed second-order ODEs in tau, among them the
Jimbo-Miwa-Okamoto sigma-form of Painleve V with all four parameters zero:

    (tau sigma'')^2 = -4 (sigma - tau sigma' - (sigma')^2)(sigma - tau sigma').

A :class:`ScalingProfile` samples the three columns on small tau-stencils at
a doubling ladder of n values, so that limits can be Richardson-extrapolated
in 1/n (the order is fitted from the data, not assumed) and tau-derivatives
of the extrapolated functions can be formed by finite differences.  Residual
routines verify the limiting ODEs and are expected to decrease as more n
levels enter the extrapolation.

Each level runs at its own precision, growing linearly in n: the
moment-orthogonalisation loses ~1.6 bits per degree and its conservative
error envelope must stay satisfied too, hence the default 6 bits per degree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import hp
from .errors import PoleInODE, PrecisionExhausted
from .hp import HPReal
from .ladder import build_aux
from .moments import WeightParams, build_table
from .ortho import build_recurrence

DEFAULT_PREC_BASE = 384
DEFAULT_PREC_PER_N = 6


@dataclass(frozen=True)
class ScalingProfile:
    """sigma_n, r_n and sqrt(n) R_n sampled on tau-stencils at several n.

    ``tau_grid`` holds ``stencil`` consecutive points (spacing ``h_tau``) per
    requested tau centre, flattened; ``*_vals[level][idx]`` follows that
    layout.  Columns are named "sigma", "r" and "R".
    """

    A: HPReal
    B: HPReal
    tau_centers: tuple[HPReal, ...]
    h_tau: HPReal
    stencil: int
    n_list: tuple[int, ...]
    prec_list: tuple[int, ...]
    tau_grid: tuple[HPReal, ...]
    sigma_vals: tuple[tuple[HPReal, ...], ...]
    r_vals: tuple[tuple[HPReal, ...], ...]
    Rs_vals: tuple[tuple[HPReal, ...], ...]

    def center_index(self, tau) -> int:
        """Flattened index of the stencil centre for a requested tau."""
        t = float(tau)
        for ci, center in enumerate(self.tau_centers):
            if math.isclose(float(center), t, rel_tol=1e-12, abs_tol=1e-15):
                return ci * self.stencil + self.stencil // 2
        raise ValueError(f"tau = {t} is not one of the profile's centres")

    def column(self, name: str) -> tuple[tuple[HPReal, ...], ...]:
        try:
            return {"sigma": self.sigma_vals, "r": self.r_vals,
                    "R": self.Rs_vals}[name]
        except KeyError:
            raise ValueError(f"unknown column {name!r}") from None


def scaled_a(tau, n: int, prec: int) -> HPReal:
    """The jump location a = tau / (2 sqrt(2n)) for a given level."""
    tau = hp.hp(tau, prec)
    return tau / (2 * hp.sqrt(HPReal(2 * n, prec), prec))


def build_profile(A, B, tau_centers, n_list, *, h_tau="1e-3", stencil: int = 5,
                  prec_base: int = DEFAULT_PREC_BASE,
                  prec_per_n: int = DEFAULT_PREC_PER_N,
                  a_cap: float = 2.0) -> ScalingProfile:
    """Run the full pipeline per (n, tau) cell and collect the scaled columns.

    ``n_list`` must double at each step (>= 3 levels recommended, so the
    extrapolation order can be fitted).  Every tau centre needs room for its
    stencil, i.e. tau >= 2 h_tau; the tau = 0 column is trivial (a = 0
    collapses the jump and sigma_n vanishes identically) and can be evaluated
    directly via :func:`scaled_a` without a profile.  Precision for level n
    is ``prec_base + prec_per_n * n``.
    """
    n_list = tuple(int(n) for n in n_list)
    if len(n_list) < 2:
        raise ValueError("need at least two n levels")
    for lo, hi in zip(n_list, n_list[1:]):
        if hi != 2 * lo:
            raise ValueError("n_list must double at each step")
    stencil = int(stencil)
    if stencil < 5 or stencil % 2 == 0:
        raise ValueError("stencil must be an odd count >= 5")
    prec0 = prec_base + prec_per_n * n_list[-1]
    h_tau = hp.hp(h_tau, prec0)
    centers = tuple(hp.hp(t, prec0) for t in tau_centers)
    half = stencil // 2
    tau_grid = tuple(c + (i - half) * h_tau for c in centers for i in range(stencil))
    if any(t < 0 for t in tau_grid):
        raise ValueError("tau stencils must stay nonnegative")

    prec_list = []
    sigma_vals = []
    r_vals = []
    Rs_vals = []
    for n in n_list:
        p = prec_base + prec_per_n * n
        prec_list.append(p)
        sqrt_n = hp.sqrt(HPReal(n, p), p)
        sig_row = []
        r_row = []
        Rs_row = []
        for tau in tau_grid:
            a = scaled_a(tau, n, p)
            if not a < a_cap:
                raise ValueError(f"a = {float(a)} exceeds the cap {a_cap}")
            params = WeightParams(A=A, B=B, a=a, prec=p)
            try:
                table = build_recurrence(build_table(params, n), n)
            except PrecisionExhausted as exc:
                raise PrecisionExhausted(
                    f"scaling cell n = {n}, tau = {float(tau)}: {exc}",
                    n=exc.n, prec=exc.prec) from exc
            aux = build_aux(table)
            s = HPReal(0, p)
            for j in range(n):
                s = s + aux.R[j]
            sig_row.append(-a * s)
            r_row.append(aux.r[n])
            Rs_row.append(sqrt_n * aux.R[n])
        sigma_vals.append(tuple(sig_row))
        r_vals.append(tuple(r_row))
        Rs_vals.append(tuple(Rs_row))
    return ScalingProfile(
        A=hp.hp(A, prec0) if isinstance(A, str) else hp.hp(A),
        B=hp.hp(B, prec0) if isinstance(B, str) else hp.hp(B),
        tau_centers=centers, h_tau=h_tau, stencil=stencil,
        n_list=n_list, prec_list=tuple(prec_list), tau_grid=tau_grid,
        sigma_vals=tuple(sigma_vals), r_vals=tuple(r_vals),
        Rs_vals=tuple(Rs_vals))


# -- Richardson extrapolation in 1/n ------------------------------------------


def fit_order(v1, v2, v3) -> float | None:
    """log2 of the gap ratio across a doubling; None if not contracting."""
    d1 = float(v2 - v1)
    d2 = float(v3 - v2)
    if d2 == 0 or d1 == 0:
        return None
    ratio = d1 / d2
    if ratio <= 1.1:
        return None
    return math.log2(ratio)


def extrapolate(level_values, levels: int | None = None
                ) -> tuple[HPReal, HPReal | None, float | None]:
    """Richardson-extrapolate a column across the n ladder.

    Uses the first ``levels`` entries (default: all).  The order is fitted
    from the three finest levels in use when available, otherwise 1/n decay
    is assumed.  Returns (limit, error estimate, fitted order); the error
    estimate is the magnitude of the final correction and empirically
    brackets the distance to the next (uncomputed) level.
    """
    use = list(level_values if levels is None else level_values[:levels])
    if not use:
        raise ValueError("no levels to extrapolate from")
    if len(use) == 1:
        return use[0], None, None
    order = None
    if len(use) >= 3:
        order = fit_order(use[-3], use[-2], use[-1])
    p = order if order is not None else 1.0
    denom = 2.0 ** p - 1.0
    corr = (use[-1] - use[-2]) / denom
    return use[-1] + corr, abs(corr), order


def _stencil_limits(profile: ScalingProfile, tau, column: str,
                    levels: int | None):
    """Extrapolated column on the 5 stencil points around a tau centre."""
    ci = profile.center_index(tau)
    half = profile.stencil // 2
    vals = profile.column(column)
    out = []
    for idx in range(ci - half, ci + half + 1):
        limit, _, _ = extrapolate([row[idx] for row in vals], levels)
        out.append(limit)
    return out


def _nres(lhs, rhs):
    return abs(lhs - rhs) / (abs(lhs) + abs(rhs) + 1)


def pv_residual(profile: ScalingProfile, tau, levels: int | None = None) -> HPReal:
    """Residual of the sigma-form of Painleve V on the extrapolated limit.

    (tau sigma'')^2 + 4 (sigma - tau sigma' - (sigma')^2)(sigma - tau sigma')
    evaluated at the stencil centre, normalised; decreasing in ``levels``.
    """
    s = _stencil_limits(profile, tau, "sigma", levels)
    h = profile.h_tau
    c = profile.stencil // 2
    t = profile.tau_grid[profile.center_index(tau)]
    s1 = (s[c + 1] - s[c - 1]) / (2 * h)
    s2 = (-s[c - 2] + 16 * s[c - 1] - 30 * s[c] + 16 * s[c + 1] - s[c + 2]) / (12 * h * h)
    lhs = (t * s2) ** 2
    rhs = -4 * (s[c] - t * s1 - s1 * s1) * (s[c] - t * s1)
    return _nres(lhs, rhs)


def limit_ode_residuals(profile: ScalingProfile, tau,
                        levels: int | None = None) -> tuple[HPReal, HPReal]:
    """Residuals of the limiting ODEs for R(tau) and r(tau).

    R'' = (1/(2R) + sqrt(2)/(2 (sqrt(2) R - tau))) (R')^2
          - (1/tau + 1/(sqrt(2) R - tau)) R' + sqrt(2) R^2 / (2 tau) - R/2,
    4 r^2 ((r')^2 + r^2) - tau^2 (r'' + r)^2 = 0.
    """
    t = profile.tau_grid[profile.center_index(tau)]
    if t == 0:
        raise PoleInODE("the limiting R-equation is singular at tau = 0")
    h = profile.h_tau
    c = profile.stencil // 2

    Rv = _stencil_limits(profile, tau, "R", levels)
    R = Rv[c]
    prec = R.precision
    sqrt2 = hp.sqrt(HPReal(2, prec), prec)
    if R == 0 or sqrt2 * R - t == 0:
        raise PoleInODE("the limiting R-equation is singular at this tau")
    Rp = (Rv[c + 1] - Rv[c - 1]) / (2 * h)
    Rpp = (-Rv[c - 2] + 16 * Rv[c - 1] - 30 * Rv[c] + 16 * Rv[c + 1] - Rv[c + 2]) / (12 * h * h)
    rhs = ((1 / (2 * R) + sqrt2 / (2 * (sqrt2 * R - t))) * Rp * Rp
           - (1 / t + 1 / (sqrt2 * R - t)) * Rp
           + sqrt2 * R * R / (2 * t) - R / 2)
    res_R = _nres(Rpp, rhs)

    rv = _stencil_limits(profile, tau, "r", levels)
    r = rv[c]
    rp = (rv[c + 1] - rv[c - 1]) / (2 * h)
    rpp = (-rv[c - 2] + 16 * rv[c - 1] - 30 * rv[c] + 16 * rv[c + 1] - rv[c + 2]) / (12 * h * h)
    res_r = _nres(4 * r * r * (rp * rp + r * r), t * t * (rpp + r) ** 2)
    return res_R, res_r


def limit_branch(profile: ScalingProfile, tau, levels: int | None = None
                 ) -> tuple[int, HPReal]:
    """Sign branch of r(tau) = +/- sqrt(sigma - tau sigma') and its residual.

    Returns (sign of the extrapolated r at the centre, normalised residual of
    r^2 = sigma - tau sigma').  The branch is determined empirically per
    configuration.
    """
    s = _stencil_limits(profile, tau, "sigma", levels)
    rv = _stencil_limits(profile, tau, "r", levels)
    h = profile.h_tau
    c = profile.stencil // 2
    t = profile.tau_grid[profile.center_index(tau)]
    s1 = (s[c + 1] - s[c - 1]) / (2 * h)
    r = rv[c]
    sign = 1 if r > 0 else (-1 if r < 0 else 0)
    return sign, _nres(r * r, s[c] - t * s1)


def cauchy_gaps(profile: ScalingProfile, tau, column: str = "sigma"
                ) -> tuple[HPReal, ...]:
    """|v_{n_{k+1}} - v_{n_k}| at the stencil centre, per ladder step."""
    ci = profile.center_index(tau)
    vals = [row[ci] for row in profile.column(column)]
    return tuple(abs(b - a) for a, b in zip(vals, vals[1:]))


def level_ratios(profile: ScalingProfile, tau, column: str
                 ) -> tuple[float, ...]:
    """v_{n_{k+1}} / v_{n_k} at the centre (boundedness diagnostics)."""
    ci = profile.center_index(tau)
    vals = [row[ci] for row in profile.column(column)]
    return tuple(float(b / a) for a, b in zip(vals, vals[1:]) if a != 0)
