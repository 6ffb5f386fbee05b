"""Finiteness classification of sizes and orientations, plus exact
orientation bookkeeping.

Two independent dichotomies govern a shape: the number of tile sizes is
finite exactly when z = alpha/beta is rational (and then equals
max(p, q) once past the startup transient), while the number of tile
orientations is finite exactly when theta is a rational multiple of pi.
Among the rational-z shapes only (p, q) = (1, 3), the theta = pi/4
triangle, has both.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import ArgumentError
from .geometry import TWO_PI, TriangleShape, wrap_angle
from .substitution import Tiling, _min_key_pairs

# The theta = pi/4 shape, the unique doubly-finite case.
EXCEPTIONAL_PQ = Fraction(1, 3)

ANGLE_TOL = 1e-9


@dataclass(frozen=True)
class ClassificationReport:
    z: float
    rationality: Fraction | None
    theta_over_pi_rational: bool | None
    size_count_predicted: int | None       # None: grows without bound
    orientation_count_predicted: str       # "finite" | "infinite" | "unknown"
    is_pinwheel: bool
    is_exceptional_13: bool
    z_convergents: tuple[tuple[int, int], ...]

    def to_json(self) -> dict:
        rat = None
        if self.rationality is not None:
            rat = {"p": self.rationality.numerator,
                   "q": self.rationality.denominator}
        return {
            "z": self.z,
            "rationality": rat,
            "theta_over_pi_rational": self.theta_over_pi_rational,
            "size_count_predicted": (
                self.size_count_predicted
                if self.size_count_predicted is not None else "infinite"),
            "orientation_count_predicted": self.orientation_count_predicted,
            "is_pinwheel": self.is_pinwheel,
            "is_exceptional_13": self.is_exceptional_13,
            "z_convergents": [list(pq) for pq in self.z_convergents],
        }


def convergents(x: float, count: int = 3, max_den: int = 10 ** 6) -> list[tuple[int, int]]:
    """The last ``count`` continued-fraction convergents p/q of ``x``
    with q below ``max_den`` (closest approximations first dropped)."""
    if count < 1:
        raise ArgumentError("count must be positive")
    h_prev, h = 0, 1
    k_prev, k = 1, 0
    out = []
    rest = x
    for _ in range(64):
        a = math.floor(rest)
        h_prev, h = h, a * h + h_prev
        k_prev, k = k, a * k + k_prev
        if k > max_den:
            break
        out.append((h, k))
        frac = rest - a
        if frac < 1e-15:
            break
        rest = 1.0 / frac
    return out[-count:]


def nearest_pi_fraction(theta: float, max_den: int = 100) -> tuple[int, int, float]:
    """Best approximation of theta by k*pi/n with n <= max_den.

    Returns (k, n, error).  A falsification device: error above a strict
    tolerance rules the shape out of the finite-orientation class up to
    that denominator, it never certifies rationality.
    """
    best = (0, 1, abs(theta))
    for n in range(1, max_den + 1):
        k = round(theta * n / math.pi)
        err = abs(theta - k * math.pi / n)
        if err < best[2]:
            best = (k, n, err)
    return best


def classify(shape: TriangleShape,
             theta_pi_rational: bool | None = None) -> ClassificationReport:
    """Classification invariants of a shape.

    Rationality of z is taken from the shape (an input fact, never
    inferred from floats).  Rationality of theta/pi cannot be decided
    numerically either, so it is caller-asserted; without an assertion it
    is deduced where possible: among rational-z shapes only (1, 3) has it.
    """
    rat = shape.rationality
    if rat is not None:
        p, q = rat.numerator, rat.denominator
        size_count = max(p, q)
        conv: tuple[tuple[int, int], ...] = ()
    else:
        size_count = None
        conv = tuple(convergents(shape.z))

    is_13 = abs(shape.theta - math.pi / 4.0) <= ANGLE_TOL
    tpr = theta_pi_rational
    if tpr is None:
        if is_13:
            tpr = True
        elif rat is not None:
            tpr = False       # the (1,3) shape is the only rational-z exception

    if tpr is True:
        orient = "finite"
    elif tpr is False:
        orient = "infinite"
    else:
        orient = "unknown"

    return ClassificationReport(
        z=shape.z,
        rationality=rat,
        theta_over_pi_rational=tpr,
        size_count_predicted=size_count,
        orientation_count_predicted=orient,
        is_pinwheel=abs(shape.b - 2.0 * shape.a) <= ANGLE_TOL * shape.c,
        is_exceptional_13=is_13,
        z_convergents=conv,
    )


def verify_size_count(t: Tiling) -> int:
    """Number of distinct size classes present in the tiling."""
    return len(t.size_keys())


def verify_orientation_count(t: Tiling, tol: float = ANGLE_TOL) -> int:
    """Number of distinct (handedness, heading) pairs in the tiling.

    Headings within ``tol`` of each other (on the circle) count once.
    """
    total = 0
    for hand in (1, -1):
        phis = sorted({t_.placement.phi for t_ in t.tiles
                       if t_.placement.handedness == hand})
        if not phis:
            continue
        clusters = 1
        for prev, cur in zip(phis, phis[1:]):
            if cur - prev > tol:
                clusters += 1
        if clusters > 1 and (phis[0] + TWO_PI) - phis[-1] <= tol:
            clusters -= 1  # first and last meet across the 0/2pi seam
        total += clusters
    return total


# -- exact orientation census -------------------------------------------------

# Relative pose of the five daughters: handedness factor, the heading
# increment k*theta + l*(pi/2) as an integer pair, and the exponent step.
_DAUGHTER_DELTAS = (
    (-1, (1, 0), (0, 1)),
    (-1, (1, 0), (0, 1)),
    (+1, (1, 0), (0, 1)),
    (+1, (1, 2), (0, 1)),
    (-1, (1, 1), (1, 0)),
)


@dataclass
class OrientationCensus:
    """Exact tile counts keyed by exponents and orientation.

    ``counts`` maps ``(i, j, sign, angle_key)`` to an integer count.  When
    theta/pi is irrational the angle key is ``(k, l)`` with the heading
    k*theta + l*(pi/2), l reduced mod 4 (distinct keys are then distinct
    headings).  When theta = (u/v)*pi the key is the single residue
    ``(m,)`` with heading m*pi/(2v), m reduced mod 4v.
    """

    shape: TriangleShape
    n: int
    theta_pi: Fraction | None
    counts: dict

    def angle(self, key: tuple) -> float:
        if self.theta_pi is None:
            k, l = key
            return wrap_angle(k * self.shape.theta + l * (math.pi / 2.0))
        v = self.theta_pi.denominator
        return wrap_angle(key[0] * math.pi / (2.0 * v))

    def by_orientation(self) -> dict:
        """Counts marginalized over size: (sign, angle_key) -> count."""
        out: dict = {}
        for (i, j, sign, key), cnt in self.counts.items():
            out[(sign, key)] = out.get((sign, key), 0) + cnt
        return out

    def total(self) -> int:
        return sum(self.counts.values())


def _canon_angle(k: int, l: int, theta_pi: Fraction | None) -> tuple:
    if theta_pi is None:
        return (k, l % 4)
    u, v = theta_pi.numerator, theta_pi.denominator
    return ((2 * k * u + l * v) % (4 * v),)


def orientation_census(shape: TriangleShape, n: int,
                       theta_pi: Fraction | None = None) -> OrientationCensus:
    """Evolve exact orientation-and-size counts through ``n`` deflations.

    Pure integer bookkeeping, no geometry: feasible far beyond the point
    where materializing tiles is.  Cross-checked against built tilings in
    the tests.
    """
    if n < 0:
        raise ArgumentError(f"generation must be non-negative, got {n}")
    counts: dict = {(0, 0, 1, _canon_angle(0, 0, theta_pi)): 1}
    # Increments compose with the reductions (l mod 4, m mod 4v), so the
    # canonical keys can be evolved directly.
    if theta_pi is None:
        for _ in range(n):
            pairs = {(i, j) for (i, j, _, _) in counts}
            winners = _min_key_pairs(shape, pairs)
            nxt: dict = {}
            for (i, j, sign, key), cnt in counts.items():
                if (i, j) not in winners:
                    nxt[(i, j, sign, key)] = nxt.get((i, j, sign, key), 0) + cnt
                    continue
                k, l = key
                for dsign, (dk, dl), (di, dj) in _DAUGHTER_DELTAS:
                    nk = (i + di, j + dj, sign * dsign,
                          (k + sign * dk, (l + sign * dl) % 4))
                    nxt[nk] = nxt.get(nk, 0) + cnt
            counts = nxt
    else:
        u, v = theta_pi.numerator, theta_pi.denominator
        mod = 4 * v
        for _ in range(n):
            pairs = {(i, j) for (i, j, _, _) in counts}
            winners = _min_key_pairs(shape, pairs)
            nxt = {}
            for (i, j, sign, key), cnt in counts.items():
                if (i, j) not in winners:
                    nxt[(i, j, sign, key)] = nxt.get((i, j, sign, key), 0) + cnt
                    continue
                m = key[0]
                for dsign, (dk, dl), (di, dj) in _DAUGHTER_DELTAS:
                    dm = 2 * dk * u + dl * v
                    nk = (i + di, j + dj, sign * dsign, ((m + sign * dm) % mod,))
                    nxt[nk] = nxt.get(nk, 0) + cnt
            counts = nxt
    return OrientationCensus(shape=shape, n=n, theta_pi=theta_pi, counts=counts)
