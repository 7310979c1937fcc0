"""Exact weak-coupling perturbation coefficients of the ground-state energy.

For the potential V(x) = (omega^2/2) x^2 + (g/4) x^4 the Rayleigh-Schrödinger
series of the ground-state energy reads

    E(g) = omega * sum_l e_l * ((g/4) / omega^3)^l,
    e_0, e_1, ... = 1/2, 3/4, -21/8, 333/16, -30885/128, ...

The e_l are rational and are generated here exactly by the Bender-Wu
recursion for the even polynomial part of the wavefunction.  Writing the
order-n wavefunction correction as sum_k B[n][k] x^(2k) times the Gaussian
ground state (at omega = 1, expansion parameter g/4), the coefficients obey,
for each n >= 1 and k from 2n down to 1,

    B[n][k] = [ (2k+2)(2k+1) B[n][k+1] - (1/4) B[n-1][k-2]
                + sum_{m=1}^{n-1} A[m] B[n-m][k] ] / (2k),

with B[0][0] = 1, B[n][0] = 0 for n >= 1, B[n][k] = 0 for k > 2n, and the
energy coefficients A[0] = 1/2, A[n] = -2 B[n][1] = e_n.  Everything runs in
exact rational arithmetic so the generated series doubles as a ground-truth
fixture; general omega follows from the omega^(1-3l) scaling of the series.

The cache format is line-oriented ASCII so that a cached series can be
audited by eye and diffed:

    bw-series v1 order=<L>
    <l> <numerator>/<denominator>        (L+1 lines)
    checksum=<hex>

The checksum is SHA-256 over the raw bytes of the data lines (each including
its trailing newline).  Loading is bit-exact and re-validates the series
invariants before trusting the file.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from gmpy2 import mpq

__all__ = [
    "BWSeries",
    "BWWorkspace",
    "CacheFormatError",
    "REFERENCE_HEAD",
    "generate",
    "verify_head",
    "save_cache",
    "load_cache",
    "load_or_generate",
]

#: First five coefficients, used by verify_head as an exact fingerprint.
REFERENCE_HEAD = (
    mpq(1, 2),
    mpq(3, 4),
    mpq(-21, 8),
    mpq(333, 16),
    mpq(-30885, 128),
)

CACHE_MAGIC = "bw-series v1"


class CacheFormatError(ValueError):
    """Raised when a series cache file is malformed or inconsistent."""


@dataclass(frozen=True)
class BWSeries:
    """Immutable sequence of exact series coefficients e_0 .. e_L.

    ``validate()`` checks the series invariants (e_0 = 1/2 and the sign
    alternation sign(e_l) = (-1)^(l+1) for l >= 1).  Construction itself does
    not validate, so that checkers like :func:`verify_head` can be exercised
    against deliberately corrupted series.
    """

    coefficients: tuple

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(self.coefficients))
        if not self.coefficients:
            raise ValueError("series must contain at least e_0")

    def validate(self) -> "BWSeries":
        cs = self.coefficients
        if cs[0] != mpq(1, 2):
            raise ValueError("invariant violation: e0 must equal 1/2")
        for l in range(1, len(cs)):
            if (cs[l] > 0) != (l % 2 == 1):
                raise ValueError(f"invariant violation: sign of e_{l}")
        return self

    @property
    def max_order(self) -> int:
        return len(self.coefficients) - 1

    def __getitem__(self, l: int) -> mpq:
        return self.coefficients[l]

    def __len__(self) -> int:
        return len(self.coefficients)


@dataclass
class BWWorkspace:
    """Triangular recursion state: wavefunction table B and energies A.

    Row n holds B[n][k] for 0 <= k <= 2n.  The k-sweep inside one order is a
    strict downward recursion and each order needs every previous A[m], so
    extension is inherently sequential; concurrent generators must use
    separate workspaces.
    """

    rows: list = field(default_factory=lambda: [[mpq(1)]])
    energies: list = field(default_factory=lambda: [mpq(1, 2)])

    @property
    def order(self) -> int:
        return len(self.energies) - 1

    def b(self, n: int, k: int) -> mpq:
        """Table entry B[n][k], honouring the zero padding outside the triangle."""
        if k < 0 or k > 2 * n:
            return mpq(0)
        return self.rows[n][k]

    def extend_to(self, order: int) -> "BWWorkspace":
        while self.order < order:
            self._step()
        return self

    def _step(self):
        n = self.order + 1
        prev = self.rows[n - 1]
        ener = self.energies
        row = [mpq(0)] * (2 * n + 1)
        for k in range(2 * n, 0, -1):
            acc = mpq(0)
            if k + 1 <= 2 * n:
                acc += (2 * k + 2) * (2 * k + 1) * row[k + 1]
            if 0 <= k - 2 <= 2 * (n - 1):
                acc -= mpq(1, 4) * prev[k - 2]
            for m in range(1, n):
                if k <= 2 * (n - m):
                    acc += ener[m] * self.rows[n - m][k]
            row[k] = acc / (2 * k)
        self.rows.append(row)
        self.energies.append(-2 * row[1])

    def series(self) -> BWSeries:
        return BWSeries(tuple(self.energies))


def generate(L_max: int) -> BWSeries:
    """Generate e_0 .. e_L exactly.  Cost at L = 251 is well under a minute."""
    if L_max < 0:
        raise ValueError("L_max must be non-negative")
    return BWWorkspace().extend_to(L_max).series().validate()


def verify_head(series: BWSeries) -> bool:
    """True iff the first five coefficients match the known exact values."""
    if series.max_order < 4:
        raise ValueError("verify_head needs a series of order >= 4")
    return tuple(series.coefficients[:5]) == REFERENCE_HEAD


def _data_lines(series: BWSeries):
    for l, c in enumerate(series.coefficients):
        yield f"{l} {c.numerator}/{c.denominator}\n"


def _checksum(lines) -> str:
    h = hashlib.sha256()
    for line in lines:
        h.update(line.encode("ascii"))
    return h.hexdigest()


def save_cache(series: BWSeries, path) -> None:
    """Write the cache file (header, one line per coefficient, checksum)."""
    series.validate()
    lines = list(_data_lines(series))
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"{CACHE_MAGIC} order={series.max_order}\n")
        fh.writelines(lines)
        fh.write(f"checksum={_checksum(lines)}\n")


def load_cache(path) -> BWSeries:
    """Load and fully validate a cache file; round-trips save_cache exactly."""
    with open(path, "r", encoding="ascii") as fh:
        raw = fh.read().splitlines(keepends=True)
    if not raw:
        raise CacheFormatError("empty cache file")
    header = raw[0].strip()
    if not header.startswith(CACHE_MAGIC + " order="):
        raise CacheFormatError(f"bad header: {header!r}")
    try:
        order = int(header.split("order=", 1)[1])
    except ValueError as exc:
        raise CacheFormatError(f"bad header: {header!r}") from exc
    if order < 0:
        raise CacheFormatError(f"bad header: negative order {order}")

    body = raw[1:]
    if body and body[-1].startswith("checksum="):
        checksum_line = body.pop()
        stated = checksum_line.strip().split("=", 1)[1]
    else:
        raise CacheFormatError("missing checksum line")
    if len(body) < order + 1:
        raise CacheFormatError("truncated cache")
    if len(body) > order + 1:
        raise CacheFormatError(f"expected {order + 1} data lines, found {len(body)}")

    coeffs = []
    for expected_l, line in enumerate(body):
        parts = line.split()
        if len(parts) != 2:
            raise CacheFormatError(f"malformed line: {line.strip()!r}")
        try:
            l = int(parts[0])
            value = mpq(parts[1])
        except (ValueError, ZeroDivisionError) as exc:
            raise CacheFormatError(f"malformed line: {line.strip()!r}") from exc
        if l != expected_l:
            raise CacheFormatError(f"out-of-order line index {l}, expected {expected_l}")
        coeffs.append(value)

    # Series invariants are checked before the checksum so a tampered value
    # is reported for what it violates rather than as a generic mismatch.
    if coeffs[0] != mpq(1, 2):
        raise CacheFormatError("invariant violation: e0")
    for l in range(1, len(coeffs)):
        if (coeffs[l] > 0) != (l % 2 == 1):
            raise CacheFormatError("invariant violation: sign")

    if _checksum(body) != stated:
        raise CacheFormatError("checksum mismatch")
    return BWSeries(tuple(coeffs))


def load_or_generate(path, order: int) -> tuple:
    """Return (series, from_cache); generates and saves when no valid cache fits."""
    try:
        series = load_cache(path)
        if series.max_order == order:
            return series, True
    except (OSError, CacheFormatError):
        pass
    series = generate(order)
    save_cache(series, path)
    return series, False
