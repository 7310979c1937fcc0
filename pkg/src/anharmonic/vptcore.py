"""Variational reexpansion of the weak-coupling series.

The harmonic term (omega^2/2) x^2 is split as (Omega^2/2) x^2 plus a
remainder proportional to r = (2/g)(omega^2 - Omega^2), the remainder is
counted as one power of the coupling, and the energy series is re-truncated
at order N.  In the reduced variables

    lambda = (g/4) / Omega^3,      omega_hat^2 = omega^2 / Omega^2,

the reexpanded coefficients are

    e_l(rho) = sum_{j=0}^{l} e_j * C((1-3j)/2, l-j) * rho^(l-j),
    rho = (omega_hat^2 - 1) / lambda,

and the truncated variational energy is

    W_N(g, Omega) = Omega * sum_{l=0}^{N} e_l(rho) * lambda^l.

W_N depends on the trial frequency Omega only through the truncation; the
optimal Omega_N is the point of least sensitivity (stationary point of
W_N(Omega), or failing that a turning point).  Exact rational evaluation is
used whenever every input is rational, which keeps the re-truncation
identities bit-exact and testable with zero tolerance.

Convention note: lambda = (g/4)/Omega^3 is the single expansion parameter
throughout the package; the equivalent forms rho = 2 r Omega and
rho = 4(omega_hat^2 - 1)/(g/Omega^3) follow from the definitions above.
"""

from __future__ import annotations

from dataclasses import dataclass

from gmpy2 import mpq
from mpmath import mp, mpf

from .numerics import (
    DEFAULT_CONTEXT,
    CompensatedSum,
    PrecisionContext,
    as_real,
    binomial_half,
    is_rational,
    to_real,
)

__all__ = [
    "PhysicalPoint",
    "ReducedPoint",
    "VariationalEnergy",
    "FrequencySearchError",
    "reexpansion_coefficient",
    "variational_energy",
    "frequency_derivative",
    "optimal_frequency",
    "raw_partial_sum",
    "optimal_truncation_order",
]

#: Geometric scan resolution used to bracket stationary points of W_N(Omega).
SCAN_POINTS = 512


class FrequencySearchError(ValueError):
    """No stationary or turning point of W_N on the scanned bracket."""


@dataclass(frozen=True)
class PhysicalPoint:
    """Coupling g > 0, physical frequency omega >= 0, trial frequency Omega > 0."""

    g: object
    omega: object
    trial_omega: object

    def __post_init__(self):
        if not self.g > 0:
            raise ValueError("g must be positive")
        if not self.trial_omega > 0:
            raise ValueError("trial frequency must be positive")
        if self.omega < 0:
            raise ValueError("omega must be non-negative")

    @property
    def r(self):
        """Remainder strength r = (2/g)(omega^2 - Omega^2); never stored."""
        return 2 * (self.omega ** 2 - self.trial_omega ** 2) / self.g

    def reduced(self) -> "ReducedPoint":
        g, w, om = self.g, self.omega, self.trial_omega
        return ReducedPoint(lam=(g / 4) / om ** 3, omega_hat_sq=w ** 2 / om ** 2)


@dataclass(frozen=True)
class ReducedPoint:
    """Dimensionless expansion point (lambda, omega_hat^2)."""

    lam: object
    omega_hat_sq: object

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("lambda must be positive")
        if self.omega_hat_sq < 0:
            raise ValueError("omega_hat^2 must be non-negative")

    @property
    def rho(self):
        return (self.omega_hat_sq - 1) / self.lam

    @property
    def is_rational(self) -> bool:
        return is_rational(self.lam) and is_rational(self.omega_hat_sq)


@dataclass(frozen=True)
class VariationalEnergy:
    """Truncated variational energy W_N at a given trial frequency."""

    order: int
    trial_omega: object
    value: object


def reexpansion_coefficient(bw, l: int, point: ReducedPoint,
                            ctx: PrecisionContext = DEFAULT_CONTEXT):
    """Reexpanded coefficient e_l(lambda, omega_hat^2).

    Exact rational when the point is rational, otherwise mpf at working
    precision.  Collapses to the raw e_l when omega_hat^2 = 1 (rho = 0).
    """
    if l < 0 or l > bw.max_order:
        raise ValueError(f"order {l} outside the generated series (max {bw.max_order})")
    if point.is_rational:
        rho = mpq(point.omega_hat_sq - 1) / mpq(point.lam)
        acc = mpq(0)
        p = mpq(1)
        for k in range(l + 1):  # k = l - j
            acc += bw[l - k] * binomial_half(l - k, k) * p
            p *= rho
        return acc
    with ctx.guard():
        rho = (as_real(point.omega_hat_sq, ctx) - 1) / as_real(point.lam, ctx)
        total = CompensatedSum()
        p = mpf(1)
        for k in range(l + 1):
            total.add(to_real(bw[l - k] * binomial_half(l - k, k), ctx) * p)
            p *= rho
        return total.total


def _series_coefficients(bw, N: int):
    """Rows (e_j, [C((1-3j)/2, k) for k <= N-j]) shared by the evaluators."""
    rows = []
    for j in range(N + 1):
        a_twice = 1 - 3 * j
        crow = [mpq(1)]
        c = mpq(1)
        for k in range(1, N - j + 1):
            c = c * mpq(a_twice - 2 * (k - 1), 2 * k)
            crow.append(c)
        rows.append((bw[j], crow))
    return rows


def _check_wn_args(bw, g, omega, trial_omega, N):
    if N < 0 or N > bw.max_order:
        raise ValueError(f"order {N} outside the generated series (max {bw.max_order})")
    if not g > 0:
        raise ValueError("g must be positive")
    if not trial_omega > 0:
        raise ValueError("trial frequency must be positive")
    if omega < 0:
        raise ValueError("omega must be non-negative")


def variational_energy(bw, g, omega, trial_omega, N: int,
                       ctx: PrecisionContext = DEFAULT_CONTEXT) -> VariationalEnergy:
    """W_N(g, Omega) = Omega * sum_{l<=N} e_l(lambda, omega_hat^2) lambda^l.

    All-rational inputs give an exact rational value (W_N is a polynomial in
    g with rational coefficients once Omega, omega are rational); otherwise
    the sum is accumulated in mpf at working precision.  At Omega = omega the
    value coincides with raw_partial_sum by construction.
    """
    _check_wn_args(bw, g, omega, trial_omega, N)
    rows = _series_coefficients(bw, N)
    if is_rational(g) and is_rational(omega) and is_rational(trial_omega):
        g, omega, trial_omega = mpq(g), mpq(omega), mpq(trial_omega)
        lam = (g / 4) / trial_omega ** 3
        beta = omega ** 2 / trial_omega ** 2 - 1
        acc = mpq(0)
        lj = mpq(1)
        for j, (ej, crow) in enumerate(rows):
            s = mpq(0)
            bk = mpq(1)
            for c in crow:
                s += c * bk
                bk *= beta
            acc += ej * lj * s
            lj *= lam
        return VariationalEnergy(order=N, trial_omega=trial_omega, value=trial_omega * acc)
    with ctx.guard():
        g = as_real(g, ctx)
        omega = as_real(omega, ctx)
        om = as_real(trial_omega, ctx)
        lam = (g / 4) / om ** 3
        beta = omega ** 2 / om ** 2 - 1
        total = CompensatedSum()
        lj = mpf(1)
        for j, (ej, crow) in enumerate(rows):
            s = CompensatedSum()
            bk = mpf(1)
            for c in crow:
                s.add(to_real(ej * c, ctx) * bk)
                bk *= beta
            total.add(s.total * lj)
            lj *= lam
        return VariationalEnergy(order=N, trial_omega=om, value=om * total.total)


def frequency_derivative(bw, g, omega, trial_omega, N: int,
                         ctx: PrecisionContext = DEFAULT_CONTEXT, second: bool = False):
    """dW_N/dOmega (optionally d2W_N/dOmega2) in closed form.

    With S_j(beta) = sum_k C((1-3j)/2, k) beta^k truncated at k = N-j and
    beta = omega^2/Omega^2 - 1:

        dW/dOmega   = sum_j e_j lambda^j [ (1-3j) S_j - 2(beta+1) S_j' ]
        d2W/dOmega2 = (1/Omega) sum_j e_j lambda^j [ -3j(1-3j) S_j
                        + (12j+2)(beta+1) S_j' + 4(beta+1)^2 S_j'' ]
    """
    _check_wn_args(bw, g, omega, trial_omega, N)
    rows = _series_coefficients(bw, N)
    with ctx.guard():
        g = as_real(g, ctx)
        omega = as_real(omega, ctx)
        om = as_real(trial_omega, ctx)
        lam = (g / 4) / om ** 3
        beta = omega ** 2 / om ** 2 - 1
        total = CompensatedSum()
        lj = mpf(1)
        for j, (ej, crow) in enumerate(rows):
            s = CompensatedSum()
            sp = CompensatedSum()
            spp = CompensatedSum()
            bk = mpf(1)          # beta^k
            bk1 = mpf(1)         # beta^(k-1)
            bk2 = mpf(1)         # beta^(k-2)
            for k, c in enumerate(crow):
                cv = to_real(ej * c, ctx)
                s.add(cv * bk)
                if k >= 1:
                    sp.add(k * cv * bk1)
                    bk1 *= beta
                if k >= 2:
                    spp.add(k * (k - 1) * cv * bk2)
                    bk2 *= beta
                bk *= beta
            if second:
                term = (-3 * j * (1 - 3 * j)) * s.total \
                    + (12 * j + 2) * (beta + 1) * sp.total \
                    + 4 * (beta + 1) ** 2 * spp.total
            else:
                term = (1 - 3 * j) * s.total - 2 * (beta + 1) * sp.total
            total.add(term * lj)
            lj *= lam
        return total.total / om if second else total.total


def raw_partial_sum(bw, g, omega, N: int,
                    ctx: PrecisionContext = DEFAULT_CONTEXT):
    """Partial sum of the raw series: omega * sum_{l<=N} e_l ((g/4)/omega^3)^l."""
    if N < 0 or N > bw.max_order:
        raise ValueError(f"order {N} outside the generated series (max {bw.max_order})")
    if not g > 0:
        raise ValueError("g must be positive")
    if not omega > 0:
        raise ValueError("omega must be positive for the raw series")
    if is_rational(g) and is_rational(omega):
        g, omega = mpq(g), mpq(omega)
        lam = (g / 4) / omega ** 3
        acc = mpq(0)
        lj = mpq(1)
        for l in range(N + 1):
            acc += bw[l] * lj
            lj *= lam
        return omega * acc
    with ctx.guard():
        g = as_real(g, ctx)
        omega = as_real(omega, ctx)
        lam = (g / 4) / omega ** 3
        total = CompensatedSum()
        lj = mpf(1)
        for l in range(N + 1):
            total.add(to_real(bw[l], ctx) * lj)
            lj *= lam
        return omega * total.total


def optimal_truncation_order(g, omega) -> int:
    """Best raw-series truncation: the integer nearest 3 omega^3 / (4g), >= 0.

    The order must grow as the coupling shrinks; the omega^3 factor restores
    the dimensionless combination used by the series.
    """
    if not g > 0:
        raise ValueError("g must be positive")
    if not omega > 0:
        raise ValueError("omega must be positive")
    with mp.workdps(30):
        x = 3 * as_real(omega, PrecisionContext(30, 10)) ** 3 \
            / (4 * as_real(g, PrecisionContext(30, 10)))
        return max(0, int(mp.nint(x)))


def _refine_stationary(dfun, a, b, fa, fb, ctx: PrecisionContext):
    """Bisection to locate, then secant to polish, a sign change of dfun."""
    with ctx.guard():
        for _ in range(8):
            mid = (a + b) / 2
            fm = dfun(mid)
            if fm == 0:
                return mid
            if mp.sign(fm) == mp.sign(fa):
                a, fa = mid, fm
            else:
                b, fb = mid, fm
        x0, f0, x1, f1 = a, fa, b, fb
        tol = mpf(10) ** (-(ctx.working_digits - 8))
        for _ in range(ctx.working_digits):
            if f1 == f0:
                break
            x2 = x1 - f1 * (x1 - x0) / (f1 - f0)
            if not (a <= x2 <= b):
                x2 = (a + b) / 2
            f2 = dfun(x2)
            if f2 == 0 or abs(x2 - x1) <= abs(x2) * tol:
                return x2
            if mp.sign(f2) == mp.sign(fa):
                a, fa = x2, f2
            else:
                b, fb = x2, f2
            x0, f0, x1, f1 = x1, f1, x2, f2
        return x1


def optimal_frequency(bw, g, omega, N: int,
                      ctx: PrecisionContext = DEFAULT_CONTEXT,
                      schedule=None):
    """Least-sensitivity trial frequency Omega_N for W_N(g, Omega).

    Scans a geometric grid for sign changes of dW_N/dOmega and refines each
    root to working precision.  Among several stationary points the one
    nearest the large-N frequency schedule is returned; if none exists the
    same search runs on the second derivative (turning points).  Raises
    FrequencySearchError when both searches come up empty.
    """
    if N < 1:
        raise ValueError("optimal_frequency requires N >= 1")
    _check_wn_args(bw, g, omega, 1, N)
    from .strongcoupling import DEFAULT_SCHEDULE, schedule_frequency

    sched = schedule if schedule is not None else DEFAULT_SCHEDULE
    with ctx.guard():
        gv = as_real(g, ctx)
        wv = as_real(omega, ctx)
        target = schedule_frequency(N, gv, sched, ctx)
        c = to_real(sched.c, ctx)
        lo = max(wv, (gv * c * N / 4) ** (mpf(1) / 3)) / 10
        hi = 10 * max(wv, (2 * gv * N) ** (mpf(1) / 3))

        scan_ctx = PrecisionContext(max(ctx.output_digits + 20, 40), ctx.output_digits)

        def refine_roots(second: bool):
            def d_scan(x):
                return frequency_derivative(bw, gv, wv, x, N, scan_ctx, second=second)

            def d_full(x):
                return frequency_derivative(bw, gv, wv, x, N, ctx, second=second)

            ratio = (hi / lo) ** (mpf(1) / (SCAN_POINTS - 1))
            xs = lo
            prev_x = None
            prev_f = None
            roots = []
            for _ in range(SCAN_POINTS):
                f = d_scan(xs)
                if f == 0:
                    roots.append(+xs)
                elif prev_f is not None and mp.sign(f) != mp.sign(prev_f):
                    roots.append(_refine_stationary(d_full, prev_x, xs,
                                                    d_full(prev_x), d_full(xs), ctx))
                prev_x, prev_f = +xs, f
                xs = xs * ratio
            return roots

        roots = refine_roots(second=False)
        if not roots:
            roots = refine_roots(second=True)
        if not roots:
            raise FrequencySearchError(
                f"no stationary or turning point of W_{N} on "
                f"[{mp.nstr(lo, 8)}, {mp.nstr(hi, 8)}]"
            )
        return min(roots, key=lambda x: abs(x - target))
