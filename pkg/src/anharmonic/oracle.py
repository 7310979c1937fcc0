"""Independent ground-state energies by Rayleigh-Ritz diagonalisation.

The Hamiltonian H = p^2/2 + (omega^2/2) x^2 + (g/4) x^4 is projected onto
the first `basis_size` EVEN eigenstates |2m> of a harmonic oscillator with
adjustable basis frequency (the ground state is even, so the odd sector is
dropped; this halves the matrix and removes odd-state contamination).  With
ladder formulas, writing s1(k) = sqrt((k+1)(k+2)) and k = 2m:

    kinetic      <k|p^2/2|k>   =  (Ob/4)(2k+1),   <k+2|p^2/2|k>  = -(Ob/4) s1
    harmonic     <k|x^2|k>     =  (2k+1)/(2 Ob),  <k+2|x^2|k>    =  s1/(2 Ob)
    quartic      <k|x^4|k>     =  (6k^2+6k+3)/(4 Ob^2)
                 <k+2|x^4|k>   =  (4k+6) s1/(4 Ob^2)
                 <k+4|x^4|k>   =  sqrt((k+1)(k+2)(k+3)(k+4))/(4 Ob^2)

so the matrix is symmetric pentadiagonal: the x^2 terms couple even indices
at distance <= 1 (in m) and x^4 at distance <= 2.  The integer parts of all
elements are exact; only the square roots and the powers of the basis
frequency are evaluated in mpf.

The smallest eigenvalue is located by Sturm bisection (counting negative
pivots of the banded LDL^T factorisation of H - sigma) and refined by
shifted inverse iteration with Rayleigh-quotient updates.  Every Ritz value
is a rigorous upper bound that decreases monotonically with basis size.
"""

from __future__ import annotations

from dataclasses import dataclass

from mpmath import mp, mpf

from .numerics import as_real, PrecisionContext
from .strongcoupling import DEFAULT_SCHEDULE, schedule_frequency

__all__ = [
    "RitzConfig",
    "RitzConvergenceError",
    "default_basis_frequency",
    "ritz_ground_energy",
    "ritz_convergence_scan",
]

#: Inverse-iteration budget; refinement converges cubically, so a handful
#: of steps suffices once bisection has pinned ~40% of the digits.
MAX_REFINE_ITERATIONS = 60


class RitzConvergenceError(RuntimeError):
    """Eigenvalue refinement failed to converge within the iteration budget."""


@dataclass(frozen=True)
class RitzConfig:
    """Basis size (even states), basis frequency and working precision.

    basis_frequency None selects a coupling-adapted default; see
    default_basis_frequency.
    """

    basis_size: int = 80
    basis_frequency: object = None
    working_digits: int = 60

    def __post_init__(self):
        if self.basis_size < 4:
            raise ValueError("basis_size must be at least 4")
        if self.basis_frequency is not None and not self.basis_frequency > 0:
            raise ValueError("basis_frequency must be positive")
        if self.working_digits < 15:
            raise ValueError("working_digits must be at least 15")


def default_basis_frequency(g, omega, ctx: PrecisionContext) -> mpf:
    """Frequency-schedule value at order 10, floored by omega.

    Scaling the basis like the optimal trial frequency keeps the basis
    functions matched to the quartic-dominated ground state, which converges
    markedly faster than an omega-frequency basis at strong coupling.
    """
    with ctx.guard():
        sched = schedule_frequency(10, as_real(g, ctx), DEFAULT_SCHEDULE, ctx)
        om = as_real(omega, ctx)
        return sched if sched > om else om


def _bands(g, omega, basis_freq, size):
    """Diagonal and first/second off-diagonal bands of the even-sector matrix."""
    diag, off1, off2 = [], [], []
    w2 = omega ** 2
    ob = basis_freq
    for m in range(size):
        k = 2 * m
        diag.append(ob / 4 * (2 * k + 1) + w2 / (4 * ob) * (2 * k + 1)
                    + g / (16 * ob ** 2) * (6 * k * k + 6 * k + 3))
        if m + 1 < size:
            s1 = mp.sqrt((k + 1) * (k + 2))
            off1.append(-ob / 4 * s1 + w2 / (4 * ob) * s1
                        + g / (16 * ob ** 2) * (4 * k + 6) * s1)
        if m + 2 < size:
            s2 = mp.sqrt((k + 1) * (k + 2) * (k + 3) * (k + 4))
            off2.append(g / (16 * ob ** 2) * s2)
    return diag, off1, off2


def _factorize(diag, off1, off2, sigma):
    """Banded LDL^T pivots and multipliers of (H - sigma); zero pivots clamped."""
    size = len(diag)
    D = [mpf(0)] * size
    L1 = [mpf(0)] * size
    L2 = [mpf(0)] * size
    tiny = mpf(10) ** (-2 * mp.dps)
    for i in range(size):
        di = diag[i] - sigma
        if i >= 1:
            di -= L1[i - 1] ** 2 * D[i - 1]
        if i >= 2:
            di -= L2[i - 2] ** 2 * D[i - 2]
        if di == 0:
            di = tiny
        D[i] = di
        if i + 1 < size:
            t = off1[i]
            if i >= 1:
                t -= L2[i - 1] * L1[i - 1] * D[i - 1]
            L1[i] = t / di
        if i + 2 < size:
            L2[i] = off2[i] / di
    return D, L1, L2


def _count_below(diag, off1, off2, sigma) -> int:
    """Number of eigenvalues below sigma (Sturm count: negative pivots)."""
    D, _, _ = _factorize(diag, off1, off2, sigma)
    return sum(1 for d in D if d < 0)


def _solve_shifted(D, L1, L2, rhs):
    """Solve (H - sigma) x = rhs from a prepared LDL^T factorisation."""
    size = len(D)
    y = list(rhs)
    for i in range(size):
        if i >= 1:
            y[i] -= L1[i - 1] * y[i - 1]
        if i >= 2:
            y[i] -= L2[i - 2] * y[i - 2]
    for i in range(size):
        y[i] /= D[i]
    for i in range(size - 1, -1, -1):
        if i + 1 < size:
            y[i] -= L1[i] * y[i + 1]
        if i + 2 < size:
            y[i] -= L2[i] * y[i + 2]
    return y


def _matvec(diag, off1, off2, x):
    size = len(diag)
    out = []
    for i in range(size):
        v = diag[i] * x[i]
        if i >= 1:
            v += off1[i - 1] * x[i - 1]
        if i + 1 < size:
            v += off1[i] * x[i + 1]
        if i >= 2:
            v += off2[i - 2] * x[i - 2]
        if i + 2 < size:
            v += off2[i] * x[i + 2]
        out.append(v)
    return out


def ritz_ground_energy(g, omega, config: RitzConfig = RitzConfig()) -> mpf:
    """Smallest eigenvalue of the projected Hamiltonian at working precision."""
    if not g > 0:
        raise ValueError("g must be positive")
    if omega < 0:
        raise ValueError("omega must be non-negative")
    digits = config.working_digits
    ctx = PrecisionContext(digits + 30, digits)
    with ctx.guard():
        gv = as_real(g, ctx)
        wv = as_real(omega, ctx)
        ob = config.basis_frequency
        ob = default_basis_frequency(gv, wv, ctx) if ob is None else as_real(ob, ctx)
        diag, off1, off2 = _bands(gv, wv, ob, config.basis_size)

        # The (0,0) element is itself a one-dimensional Ritz value, hence an
        # upper bound for the ground state; 0 is a lower bound (H > 0).
        lo, hi = mpf(0), diag[0] * (1 + mpf(10) ** -10)
        if _count_below(diag, off1, off2, hi) < 1:
            raise RitzConvergenceError("initial bracket contains no eigenvalue")
        bisect_steps = int(0.45 * digits * 3.33) + 10
        for _ in range(bisect_steps):
            mid = (lo + hi) / 2
            if _count_below(diag, off1, off2, mid) >= 1:
                hi = mid
            else:
                lo = mid

        sigma = (lo + hi) / 2
        size = config.basis_size
        x = [mpf(1)] * size
        norm = mp.sqrt(mpf(size))
        x = [v / norm for v in x]
        tol = mpf(10) ** (-(digits + 10))
        previous = None
        for _ in range(MAX_REFINE_ITERATIONS):
            D, L1, L2 = _factorize(diag, off1, off2, sigma)
            y = _solve_shifted(D, L1, L2, x)
            ny = mp.sqrt(sum(v * v for v in y))
            x = [v / ny for v in y]
            hx = _matvec(diag, off1, off2, x)
            rho = sum(a * b for a, b in zip(x, hx))
            if previous is not None and abs(rho - previous) <= abs(rho) * tol:
                return +rho
            previous = rho
            sigma = rho
        raise RitzConvergenceError(
            f"inverse iteration did not stabilise within {MAX_REFINE_ITERATIONS} steps"
        )


def ritz_convergence_scan(g, omega, sizes, config: RitzConfig = RitzConfig()):
    """Energies for ascending basis sizes (non-increasing by the variational principle)."""
    sizes = list(sizes)
    if sizes != sorted(sizes):
        raise ValueError("sizes must be ascending")
    out = []
    for size in sizes:
        cfg = RitzConfig(basis_size=size, basis_frequency=config.basis_frequency,
                         working_digits=config.working_digits)
        out.append((size, ritz_ground_energy(g, omega, cfg)))
    return out
