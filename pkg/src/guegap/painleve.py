"""Finite-n dynamical structure in the jump location a.

Everything here verifies identities on computed data rather than integrating
ODEs: tables are built on a uniform a-grid, derivatives in a come from
central finite differences (3-point for first derivatives, 5-point for
second), and the residual of each identity is returned per interior grid
point as the normalised quantity |lhs - rhs| / (|lhs| + |rhs| + 1), which
stays meaningful near zeros of either side.  The finite-difference residuals
carry an O(h^2) truncation contract: halving the grid step must shrink them
by a factor close to 4.

The one genuinely iterative operation is :func:`iterate_beta`, which runs the
second-order difference equation

    a^2 (2 beta_n - n)^2
        = beta_n (2 beta_n + 2 beta_{n+1} - 2n - 1)(2 beta_n + 2 beta_{n-1} - 2n + 1)

forward from beta_0 = 0 and the closed-form beta_1, giving a moment-free
route to the recurrence coefficients.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from . import hp, moments
from .errors import AuxDegenerate, DivisionBreakdown, PoleInODE
from .hp import HPReal
from .ladder import AuxSequence, build_aux
from .moments import WeightParams, build_table
from .ortho import RecurrenceTable, build_recurrence

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AGrid:
    """Uniform grid in the jump location a, with a_min > 0.

    The step must be small enough that the O(h^2) truncation of the
    finite-difference stencils dominates rounding at the working precision
    (h well above 2**(-prec/5) is a safe guideline).
    """

    a_min: HPReal
    h: HPReal
    values: tuple[HPReal, ...]

    @property
    def a_max(self) -> HPReal:
        return self.values[-1]

    @classmethod
    def from_range(cls, a_min, a_max, h, prec: int) -> "AGrid":
        a_min = hp.hp(a_min, prec)
        a_max = hp.hp(a_max, prec)
        h = hp.hp(h, prec)
        if not a_min > 0:
            raise ValueError("a_min must be positive")
        if not h > 0:
            raise ValueError("h must be positive")
        count = int(float((a_max - a_min) / h) + 0.5) + 1
        if count < 3:
            raise ValueError("grid needs at least 3 points")
        return cls(a_min=a_min, h=h,
                   values=tuple(a_min + i * h for i in range(count)))

    @classmethod
    def centered(cls, center, h, halfwidth: int, prec: int) -> "AGrid":
        """2*halfwidth + 1 points around ``center`` (halfwidth >= 1)."""
        center = hp.hp(center, prec)
        h = hp.hp(h, prec)
        a_min = center - halfwidth * h
        if not a_min > 0:
            raise ValueError("grid extends to nonpositive a")
        return cls(a_min=a_min, h=h,
                   values=tuple(a_min + i * h for i in range(2 * halfwidth + 1)))


@dataclass(frozen=True)
class GridData:
    """Recurrence tables and auxiliary sequences over an a-grid."""

    grid: AGrid
    n_max: int
    tables: tuple[RecurrenceTable, ...]
    aux: tuple[AuxSequence, ...]

    @property
    def params(self) -> WeightParams:
        return self.tables[0].params

    def center_index(self) -> int:
        return len(self.grid.values) // 2


def _grid_point(args):
    A, B, a, n_max, prec = args
    params = WeightParams(A=A, B=B, a=a, prec=prec)
    table = build_recurrence(build_table(params, n_max), n_max)
    return table, build_aux(table)


def build_grid(A, B, grid: AGrid, n_max: int, prec: int,
               workers: int = 1) -> GridData:
    """Build the moments -> recurrence -> aux pipeline at every grid point.

    Grid points are independent; ``workers > 1`` maps them over a process
    pool (results are identical to the sequential order).
    """
    jobs = [(A, B, a, n_max, prec) for a in grid.values]
    if workers > 1 and len(jobs) > 2:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=workers) as pool:
            pairs = list(pool.map(_grid_point, jobs, chunksize=8))
    else:
        pairs = [_grid_point(job) for job in jobs]
    return GridData(grid=grid, n_max=n_max,
                    tables=tuple(t for t, _ in pairs),
                    aux=tuple(x for _, x in pairs))


# -- finite differences -------------------------------------------------------


def _d1(vals, i, h):
    """Central 3-point first derivative at index i."""
    return (vals[i + 1] - vals[i - 1]) / (2 * h)


def _d2(vals, i, h):
    """5-point second derivative at index i."""
    return (-vals[i - 2] + 16 * vals[i - 1] - 30 * vals[i] + 16 * vals[i + 1]
            - vals[i + 2]) / (12 * h * h)


def _nres(lhs, rhs):
    return abs(lhs - rhs) / (abs(lhs) + abs(rhs) + 1)


def _interior1(data: GridData) -> range:
    return range(1, len(data.grid.values) - 1)


def _interior2(data: GridData) -> range:
    return range(2, len(data.grid.values) - 2)


# -- difference-equation iteration -------------------------------------------


def beta_one(params: WeightParams) -> HPReal:
    """Closed-form beta_1 = 1/2 + B a e^(-a^2) / mu_0."""
    a = params.a
    mu0 = moments.moment(0, params)
    return HPReal("0.5", params.prec) + params.B * a * hp.exp(-(a * a), params.prec) / mu0


def iterate_beta(params: WeightParams, N: int) -> tuple[HPReal, ...]:
    """beta_0..beta_N by iterating the second-order difference equation.

    Solving the relation for beta_{n+1} is linear:

        beta_{n+1} = [a^2 (2 beta_n - n)^2 / (beta_n (2 beta_n + 2 beta_{n-1}
                      - 2n + 1)) - 2 beta_n + 2n + 1] / 2.

    When the numerator a^2 (2 beta_n - n)^2 vanishes exactly, the relation
    degenerates (both sides are zero) and the vanishing-first-factor branch
    beta_{n+1} = (2n + 1 - 2 beta_n)/2 is taken; this reproduces the
    classical B = 0 coefficients n/2 exactly.  A vanishing denominator with a
    nonvanishing numerator is a genuine breakdown and raises
    :class:`DivisionBreakdown` with the offending index.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    p = params.prec
    a2 = params.a * params.a
    betas = [HPReal(0, p), beta_one(params)]
    for n in range(1, N):
        bn, bnm1 = betas[n], betas[n - 1]
        num = a2 * (2 * bn - n) * (2 * bn - n)
        if num == 0:
            betas.append((2 * n + 1 - 2 * bn) / 2)
            continue
        den = bn * (2 * bn + 2 * bnm1 - (2 * n - 1))
        if den == 0:
            raise DivisionBreakdown(
                f"difference-equation denominator vanished at n = {n}", index=n)
        betas.append((num / den - 2 * bn + 2 * n + 1) / 2)
    return tuple(betas)


# -- differential relations in a ----------------------------------------------


def diff_relations_in_a(data: GridData, n: int
                        ) -> tuple[tuple[HPReal, ...], tuple[HPReal, ...]]:
    """Residuals of d/da ln h_n = -R_n and d/da p(n,a) = a r_n - beta_n R_n.

    Finite differences against the closed forms, one residual per interior
    grid point; both are O(h^2).
    """
    if not 1 <= n <= data.n_max:
        raise ValueError(f"n must lie in [1, {data.n_max}]")
    h = data.grid.h
    prec = data.params.prec
    lnh = [hp.log(t.h[n], prec) for t in data.tables]
    pc = [t.p_coeff[n] for t in data.tables]
    res_lnh = []
    res_p = []
    for i in _interior1(data):
        a = data.grid.values[i]
        res_lnh.append(_nres(_d1(lnh, i, h), -data.aux[i].R[n]))
        res_p.append(_nres(_d1(pc, i, h),
                           a * data.aux[i].r[n] - data.tables[i].beta[n] * data.aux[i].R[n]))
    return tuple(res_lnh), tuple(res_p)


def _require_nondegenerate(data: GridData, n: int):
    if any(aux.R[n] == 0 for aux in data.aux):
        raise AuxDegenerate(f"R_{n} vanishes on the grid (B = 0 or P_{n}(a) = 0)")


def riccati_residuals(data: GridData, n: int
                      ) -> tuple[tuple[HPReal, ...], tuple[HPReal, ...]]:
    """Residuals of the two first-order (Riccati) equations in a:

        r_n' = 2 r_n^2 / R_n - (n + r_n) R_n,
        R_n' = R_n^2 + 4 r_n - 2 a R_n - 2 r_n R_n / a.
    """
    if not 1 <= n <= data.n_max:
        raise ValueError(f"n must lie in [1, {data.n_max}]")
    _require_nondegenerate(data, n)
    h = data.grid.h
    rv = [aux.r[n] for aux in data.aux]
    Rv = [aux.R[n] for aux in data.aux]
    res_r = []
    res_R = []
    for i in _interior1(data):
        a = data.grid.values[i]
        r, R = rv[i], Rv[i]
        res_r.append(_nres(_d1(rv, i, h), 2 * r * r / R - (n + r) * R))
        res_R.append(_nres(_d1(Rv, i, h), R * R + 4 * r - 2 * a * R - 2 * r * R / a))
    return tuple(res_r), tuple(res_R)


def r_from_R_residuals(data: GridData, n: int) -> tuple[HPReal, ...]:
    """Residual of the inversion r_n = a R_n' / (2 (2a - R_n)) + a R_n / 2."""
    if not 1 <= n <= data.n_max:
        raise ValueError(f"n must lie in [1, {data.n_max}]")
    h = data.grid.h
    Rv = [aux.R[n] for aux in data.aux]
    out = []
    for i in _interior1(data):
        a = data.grid.values[i]
        R = Rv[i]
        if 2 * a - R == 0:
            raise PoleInODE(f"2a - R_{n} vanished at a = {float(a)}")
        out.append(_nres(a * _d1(Rv, i, h) / (2 * (2 * a - R)) + a * R / 2,
                         data.aux[i].r[n]))
    return tuple(out)


def second_order_residuals(data: GridData, n: int
                           ) -> tuple[tuple[HPReal, ...], tuple[HPReal, ...],
                                      tuple[HPReal, ...]]:
    """Residuals of the three second-order ODEs in a at index n.

    R-equation:
        R'' = (a - R)/((2a - R) R) (R')^2 + R/(a (2a - R)) R'
              + (2a - R)(a^2 - 2n - 1 - a R) R / a
    r-equation:
        4 (a^2 + r)^2 ((r')^2 + 8 r^2 (n + r)) - a^2 (r'' + 8 n r + 12 r^2)^2 = 0
    beta-equation:
        4 (2b + a^2 - n)^2 ((b')^2 + 4 b (2b - n)^2)
            - a^2 (b'' + 2 (2b - n)(6b - n))^2 = 0

    First derivatives use the 3-point stencil, second derivatives the 5-point
    one; residuals are reported on the doubly-interior points.
    """
    if not 1 <= n <= data.n_max:
        raise ValueError(f"n must lie in [1, {data.n_max}]")
    _require_nondegenerate(data, n)
    h = data.grid.h
    rv = [aux.r[n] for aux in data.aux]
    Rv = [aux.R[n] for aux in data.aux]
    bv = [t.beta[n] for t in data.tables]
    res_R = []
    res_r = []
    res_b = []
    for i in _interior2(data):
        a = data.grid.values[i]
        r, R, b = rv[i], Rv[i], bv[i]
        if R == 0 or 2 * a - R == 0:
            raise PoleInODE(f"R-equation pole at a = {float(a)}")
        Rp, Rpp = _d1(Rv, i, h), _d2(Rv, i, h)
        rhs = ((a - R) / ((2 * a - R) * R) * Rp * Rp
               + R / (a * (2 * a - R)) * Rp
               + (2 * a - R) * (a * a - 2 * n - 1 - a * R) * R / a)
        res_R.append(_nres(Rpp, rhs))

        rp, rpp = _d1(rv, i, h), _d2(rv, i, h)
        lhs = 4 * (a * a + r) ** 2 * (rp * rp + 8 * r * r * (n + r))
        rhs = a * a * (rpp + 8 * n * r + 12 * r * r) ** 2
        res_r.append(_nres(lhs, rhs))

        bp, bpp = _d1(bv, i, h), _d2(bv, i, h)
        lhs = 4 * (2 * b + a * a - n) ** 2 * (bp * bp + 4 * b * (2 * b - n) ** 2)
        rhs = a * a * (bpp + 2 * (2 * b - n) * (6 * b - n)) ** 2
        res_b.append(_nres(lhs, rhs))
    return tuple(res_R), tuple(res_r), tuple(res_b)


def branch_signs(data: GridData, n: int
                 ) -> tuple[tuple[int, ...], tuple[HPReal, ...]]:
    """Which root branch of the quadratic R_n(r_n, r_n') matches the data.

    R_n = (-r_n' +/- sqrt((r_n')^2 + 8 r_n^2 (n + r_n))) / (2 (n + r_n));
    per interior point the sign minimising the mismatch with the directly
    computed R_n is reported, together with that mismatch.  Branch flips
    along the grid are logged.
    """
    if not 1 <= n <= data.n_max:
        raise ValueError(f"n must lie in [1, {data.n_max}]")
    _require_nondegenerate(data, n)
    h = data.grid.h
    rv = [aux.r[n] for aux in data.aux]
    signs = []
    residuals = []
    prev = None
    for i in _interior1(data):
        r = rv[i]
        rp = _d1(rv, i, h)
        disc = hp.sqrt(rp * rp + 8 * r * r * (n + r))
        denom = 2 * (n + r)
        best_sign, best_res = None, None
        for sign in (1, -1):
            cand = (-rp + sign * disc) / denom
            res = abs(cand - data.aux[i].R[n]) / (abs(data.aux[i].R[n]) + 1)
            if best_res is None or res < best_res:
                best_sign, best_res = sign, res
        if prev is not None and best_sign != prev:
            logger.info("root-branch flip at a = %s (n = %d)",
                        float(data.grid.values[i]), n)
        prev = best_sign
        signs.append(best_sign)
        residuals.append(best_res)
    return tuple(signs), tuple(residuals)


# -- the log-derivative of the Hankel determinant -----------------------------


@dataclass(frozen=True)
class SigmaSeries:
    """sigma_n = a d/da ln D_n and its first two derivatives on an a-grid.

    ``sigma`` comes from the aux-sum route -a sum_{j<n} R_j and ``sigma_alt``
    from the subleading-coefficient route 4 p(n,a) + n(n-1) - r_n; the two
    agree up to rounding.  ``sigma1`` is the closed form
    4 a r_n - R_n (n + r_n) - 2 r_n^2 / R_n where R_n != 0 (finite
    differences of sigma otherwise), ``sigma2`` a central difference of
    sigma1 (None at grid edges).  ``route_tags`` records which formula
    produced each column.
    """

    params: WeightParams
    n: int
    a_grid: tuple[HPReal, ...]
    sigma: tuple[HPReal, ...]
    sigma_alt: tuple[HPReal, ...]
    sigma1: tuple[HPReal | None, ...]
    sigma2: tuple[HPReal | None, ...]
    route_tags: dict


def sigma_series(data: GridData, n: int) -> SigmaSeries:
    """Assemble sigma_n, sigma_n', sigma_n'' on the grid at fixed n."""
    if not 1 <= n <= data.n_max:
        raise ValueError(f"n must lie in [1, {data.n_max}]")
    h = data.grid.h
    prec = data.params.prec
    npts = len(data.grid.values)
    sigma = []
    sigma_alt = []
    for i, a in enumerate(data.grid.values):
        aux = data.aux[i]
        table = data.tables[i]
        s = HPReal(0, prec)
        for j in range(n):
            s = s + aux.R[j]
        sigma.append(-a * s)
        sigma_alt.append(4 * table.p_coeff[n] + n * (n - 1) - aux.r[n])
    closed_ok = all(aux.R[n] != 0 for aux in data.aux)
    sigma1: list[HPReal | None]
    if closed_ok:
        sigma1 = [4 * a * aux.r[n] - aux.R[n] * (n + aux.r[n])
                  - 2 * aux.r[n] * aux.r[n] / aux.R[n]
                  for a, aux in zip(data.grid.values, data.aux)]
    else:
        sigma1 = [None] * npts
        for i in range(1, npts - 1):
            sigma1[i] = _d1(sigma, i, h)
    sigma2: list[HPReal | None] = [None] * npts
    for i in range(1, npts - 1):
        if sigma1[i - 1] is not None and sigma1[i + 1] is not None:
            sigma2[i] = (sigma1[i + 1] - sigma1[i - 1]) / (2 * h)
    return SigmaSeries(
        params=data.params, n=n, a_grid=data.grid.values,
        sigma=tuple(sigma), sigma_alt=tuple(sigma_alt),
        sigma1=tuple(sigma1), sigma2=tuple(sigma2),
        route_tags={
            "sigma": "aux-sum",
            "sigma_alt": "subleading-coefficient",
            "sigma1": "closed-form" if closed_ok else "finite-difference",
            "sigma2": "fd-of-sigma1",
        })


def r_sigma_residuals(data: GridData, n: int,
                      series: SigmaSeries | None = None) -> tuple[HPReal, ...]:
    """Residual of r_n^2 = 2 a^2 r_n + sigma_n - a sigma_n' per point."""
    series = series if series is not None else sigma_series(data, n)
    out = []
    for i, a in enumerate(data.grid.values):
        s1 = series.sigma1[i]
        if s1 is None:
            continue
        r = data.aux[i].r[n]
        out.append(_nres(r * r, 2 * a * a * r + series.sigma[i] - a * s1))
    return tuple(out)


def sigma_ode_residual(series: SigmaSeries) -> tuple[HPReal | None, ...]:
    """Residual of the second-order fourth-degree ODE for sigma_n.

    With u = a^4 + sigma - a sigma', the identity reads

        [16 a^6 - a^2 (sigma'')^2 - 4 u (4 a^2 + 8 n (sigma - a sigma')
                                          - (sigma')^2)]^2
        = 16 [4 u (a sigma' - 2 sigma)^2 + 4 a^2 sigma'' (a sigma' - sigma)
              - a^4 (sigma'')^2]
          * [4 (2 a^2 n + sigma) u + 4 a^4 - a^2 sigma''].

    Entries are None where sigma'' is unavailable (grid edges); the O(h^2)
    contract of the sigma'' column carries over to the residual.
    """
    n = series.n
    out: list[HPReal | None] = []
    for i, a in enumerate(series.a_grid):
        s, s1, s2 = series.sigma[i], series.sigma1[i], series.sigma2[i]
        if s1 is None or s2 is None:
            out.append(None)
            continue
        u = a ** 4 + s - a * s1
        lhs = (16 * a ** 6 - a * a * s2 * s2
               - 4 * u * (4 * a * a + 8 * n * (s - a * s1) - s1 * s1)) ** 2
        rhs = (16 * (4 * u * (a * s1 - 2 * s) ** 2 + 4 * a * a * s2 * (a * s1 - s)
                     - a ** 4 * s2 * s2)
               * (4 * (2 * a * a * n + s) * u + 4 * a ** 4 - a * a * s2))
        out.append(_nres(lhs, rhs))
    return tuple(out)
