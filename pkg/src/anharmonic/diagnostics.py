"""Convergence diagnostics for the strong-coupling extraction.

The error of the order-N approximant,

    Delta_N = |(alpha_n)_N - alpha_n|,

approaches zero through oscillations whose upper envelope follows the
exponential law

    Delta_N = exp(-kappa_0 - kappa_1 N^(1/3)),

so ln Delta_N against N^(1/3) is fitted by ordinary least squares.  The
reference alpha_n is the order-251 extraction (the best available), which
makes Delta_251 identically zero by construction.

The sampled Delta_N carries two superimposed oscillations: slow sign-changing
arcs and an even/odd parity wiggle.  Plain nearest-neighbour local maxima
therefore include points well below the true envelope (inside sign-change
dips).  The fitting pipeline consequently refines the local maxima to their
upper convex hull in the (N^(1/3), ln Delta) plane -- a deterministic stand-in
for fitting "the top of the data" by eye -- and falls back to the unrefined
maxima when fewer than three hull vertices remain.
"""

from __future__ import annotations

from dataclasses import dataclass

from mpmath import mp, mpf

from .numerics import DEFAULT_CONTEXT, PrecisionContext, pow_rational_exponent
from .strongcoupling import DEFAULT_SCHEDULE, alpha, alpha_across_orders

__all__ = [
    "ConvergenceSample",
    "EnvelopeFit",
    "reference_alpha",
    "convergence_series",
    "envelope",
    "upper_hull",
    "fit_envelope",
    "kappa_estimate",
    "export_fig_data",
    "FIG_DATA_COLUMNS",
    "DEFAULT_REFERENCE_ORDER",
    "DEFAULT_N_MIN",
]

DEFAULT_REFERENCE_ORDER = 251
DEFAULT_N_MIN = 65


@dataclass(frozen=True)
class ConvergenceSample:
    """One point of the approach: order, approximant, |error|, error sign."""

    N: int
    approx: object
    delta: object
    sign: int


@dataclass(frozen=True)
class EnvelopeFit:
    """Least-squares parameters of ln Delta = -kappa_0 - kappa_1 N^(1/3)."""

    kappa0: object
    kappa1: object
    rms_residual: object
    points_used: int


def reference_alpha(bw, n: int, reference_order: int = DEFAULT_REFERENCE_ORDER,
                    sched=DEFAULT_SCHEDULE, ctx: PrecisionContext = DEFAULT_CONTEXT):
    """alpha_n at the reference order (defaults to the order-251 extraction)."""
    return alpha(bw, reference_order, n, sched, ctx).value


def convergence_series(bw, n: int, N_from: int, N_to: int, reference,
                       sched=DEFAULT_SCHEDULE,
                       ctx: PrecisionContext = DEFAULT_CONTEXT):
    """Samples (N, (alpha_n)_N, Delta_N, sign) for N in [N_from, N_to]."""
    if not mp.isfinite(reference):
        raise ValueError("reference value must be finite")
    records = alpha_across_orders(bw, n, N_from, N_to, sched, ctx)
    samples = []
    with ctx.guard():
        for rec in records:
            resid = rec.value - reference
            samples.append(ConvergenceSample(N=rec.N, approx=rec.value,
                                             delta=abs(resid),
                                             sign=int(mp.sign(resid))))
    return samples


def envelope(samples):
    """Interior samples whose delta strictly exceeds both neighbours."""
    if len(samples) < 5:
        raise ValueError("envelope extraction needs at least 5 samples")
    out = []
    for i in range(1, len(samples) - 1):
        if samples[i].delta > samples[i - 1].delta and samples[i].delta > samples[i + 1].delta:
            out.append(samples[i])
    return out


def _fit_coordinates(sample, ctx):
    x = pow_rational_exponent(sample.N, 1, 3, ctx)
    with ctx.guard():
        return x, mp.log(sample.delta)


def upper_hull(points, ctx: PrecisionContext = DEFAULT_CONTEXT):
    """Subset of points on the upper convex hull in (N^(1/3), ln delta).

    Points must be ordered by N and have nonzero delta.  Between consecutive
    hull vertices every sample lies below the connecting chord, which is the
    deterministic version of the envelope "dominating" the oscillation dips.
    """
    coords = [(_fit_coordinates(p, ctx), p) for p in points]
    hull = []
    with ctx.guard():
        for (x, y), p in coords:
            while len(hull) >= 2:
                (x1, y1), _ = hull[-2]
                (x2, y2), _ = hull[-1]
                if (x2 - x1) * (y - y1) - (x - x1) * (y2 - y1) >= 0:
                    hull.pop()
                else:
                    break
            hull.append(((x, y), p))
    return [p for _, p in hull]


def fit_envelope(points, N_min: int,
                 ctx: PrecisionContext = DEFAULT_CONTEXT) -> EnvelopeFit:
    """OLS of ln Delta_N on N^(1/3) over envelope points with N >= N_min."""
    pts = [p for p in points if p.N >= N_min]
    if len(pts) < 3:
        raise ValueError("envelope fit needs at least 3 points with N >= N_min")
    if len({p.N for p in pts}) == 1:
        raise ValueError("degenerate design: all envelope points share one N")
    with ctx.guard():
        xs, ys = [], []
        for p in pts:
            x, y = _fit_coordinates(p, ctx)
            xs.append(x)
            ys.append(y)
        m = len(xs)
        xm = sum(xs) / m
        ym = sum(ys) / m
        sxx = sum((x - xm) ** 2 for x in xs)
        sxy = sum((x - xm) * (y - ym) for x, y in zip(xs, ys))
        slope = sxy / sxx
        intercept = ym - slope * xm
        rss = sum((y - (intercept + slope * x)) ** 2 for x, y in zip(xs, ys))
        return EnvelopeFit(kappa0=-intercept, kappa1=-slope,
                           rms_residual=mp.sqrt(rss / m), points_used=m)


def kappa_estimate(bw, n: int, N_from: int = DEFAULT_N_MIN, N_to: int = DEFAULT_REFERENCE_ORDER,
                   N_min: int = DEFAULT_N_MIN,
                   reference_order: int = DEFAULT_REFERENCE_ORDER,
                   sched=DEFAULT_SCHEDULE, ctx: PrecisionContext = DEFAULT_CONTEXT):
    """Full pipeline: sweep, envelope, hull refinement, exponential-law fit.

    Returns (fit, samples, fit_points).
    """
    ref = reference_alpha(bw, n, reference_order, sched, ctx)
    samples = convergence_series(bw, n, N_from, N_to, ref, sched, ctx)
    env = [p for p in envelope(samples) if p.N >= N_min and p.delta > 0]
    hull = upper_hull(env, ctx)
    pts = hull if len(hull) >= 3 else env
    fit = fit_envelope(pts, N_min, ctx)
    return fit, samples, pts


FIG_DATA_COLUMNS = ("N", "N_cuberoot", "delta", "ln_delta", "sign")


def export_fig_data(bw, n: int, N_from: int, N_to: int,
                    reference_order: int = DEFAULT_REFERENCE_ORDER,
                    sched=DEFAULT_SCHEDULE, ctx: PrecisionContext = DEFAULT_CONTEXT):
    """Plot-ready rows (N, N^(1/3), Delta_N, ln Delta_N, sign), ordered by N.

    ln Delta_N is -inf on the self-referential row (Delta = 0 at the
    reference order).
    """
    ref = reference_alpha(bw, n, reference_order, sched, ctx)
    samples = convergence_series(bw, n, N_from, N_to, ref, sched, ctx)
    rows = []
    with ctx.guard():
        for s in samples:
            x = pow_rational_exponent(s.N, 1, 3, ctx)
            ln_delta = mp.log(s.delta) if s.delta > 0 else mp.ninf
            rows.append((s.N, x, s.delta, ln_delta, s.sign))
    return rows
