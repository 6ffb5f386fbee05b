"""Size and orientation statistics of supertiles against their predicted
limit distributions.

Empirical data comes from three interchangeable sources: built tilings
(geometry), the exact exponent census (integer bookkeeping, reaches far
larger generations), and population-matrix powers (per-class counts
only).  Predictions come from the eigenvector distributions (rational
shapes), the closed-form window densities (irrational shapes), and the
binomial lattice-path oracle for individual exponent classes.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from .classify import orientation_census
from .errors import ArgumentError, DomainError
from .geometry import TriangleShape
from .spectral import eigen, population_matrix
from .substitution import Tiling, census_counts

DEFAULT_SIZE_BINS = 64
DEFAULT_ORIENTATION_BINS = 64


@dataclass(frozen=True)
class Histogram:
    """Mass per size bin; bins are class ranks (rational shapes) or
    left-closed intervals over the size window (irrational shapes)."""

    weighting: str  # "count" or "area"
    labels: tuple
    masses: tuple[float, ...]
    edges: tuple[float, ...] | None = None  # interval bins only

    def total(self) -> float:
        return float(sum(self.masses))

    def to_json(self) -> dict:
        out = {"weighting": self.weighting,
               "labels": list(self.labels),
               "masses": list(self.masses)}
        if self.edges is not None:
            out["edges"] = list(self.edges)
        return out


@dataclass(frozen=True)
class OrientationHistogram:
    """Heading distribution split by size class and handedness.

    ``cells`` maps (size_rank, handedness) to that cell's share of all
    tiles; ``phi_bins`` holds the cell's own heading distribution over
    ``bins`` equal arcs of [0, 2pi).
    """

    bins: int
    cells: dict[tuple[int, int], float]
    phi_bins: dict[tuple[int, int], tuple[float, ...]]

    def pooled(self) -> tuple[float, ...]:
        acc = np.zeros(self.bins)
        for cell, weight in self.cells.items():
            acc += weight * np.asarray(self.phi_bins[cell])
        return tuple(acc.tolist())

    def max_deviation(self) -> float:
        """Largest pooled-bin departure from the uniform heading law."""
        pooled = np.asarray(self.pooled())
        return float(np.abs(pooled - 1.0 / self.bins).max())

    def to_json(self) -> dict:
        return {
            "bins": self.bins,
            "cells": [{"size_rank": r, "handedness": h,
                       "weight": w, "phi": list(self.phi_bins[(r, h)])}
                      for (r, h), w in sorted(self.cells.items())],
            "max_deviation": self.max_deviation(),
        }


def _normalize(values: np.ndarray) -> np.ndarray:
    total = values.sum()
    if total <= 0:
        raise ArgumentError("empty distribution")
    return values / total


def _phi_bin(phi: float, bins: int) -> int:
    # headings like pi/2 sit exactly on bin edges; the nudge makes the
    # geometric and census paths agree there despite float noise
    return int((phi / (2.0 * math.pi) + 1e-9) * bins) % bins


def _rank_by_key(shape: TriangleShape, pairs) -> dict:
    """Exponent pair -> size rank, 1 = geometrically largest present."""
    keys = sorted({shape.size_key(i, j) for i, j in pairs})
    key_rank = {k: r + 1 for r, k in enumerate(keys)}
    return {(i, j): key_rank[shape.size_key(i, j)] for i, j in pairs}


def _relative_area(shape: TriangleShape, i: int, j: int) -> float:
    return (shape.A ** i * shape.B ** j) ** 2


def _size_histogram_from_counts(shape: TriangleShape, counts: dict,
                                weighting: str, bins: int) -> Histogram:
    if weighting not in ("count", "area"):
        raise ArgumentError(f"unknown weighting {weighting!r}")
    pairs = list(counts)
    if shape.rationality is not None:
        ranks = _rank_by_key(shape, pairs)
        m = max(ranks.values())
        masses = np.zeros(m)
        for (i, j), cnt in counts.items():
            w = cnt if weighting == "count" else cnt * _relative_area(shape, i, j)
            masses[ranks[(i, j)] - 1] += w
        return Histogram(weighting=weighting,
                         labels=tuple(range(1, m + 1)),
                         masses=tuple(_normalize(masses).tolist()))
    # irrational: left-closed bins of width mu/bins over the size window
    keys = {(i, j): float(shape.size_key(i, j)) for i, j in pairs}
    lo = min(keys.values())
    width = shape.mu / bins
    masses = np.zeros(bins)
    for (i, j), cnt in counts.items():
        s = keys[(i, j)] - lo
        b = min(int(s / width), bins - 1)
        w = cnt if weighting == "count" else cnt * _relative_area(shape, i, j)
        masses[b] += w
    edges = tuple((lo - lo) + width * k for k in range(bins + 1))
    return Histogram(weighting=weighting,
                     labels=tuple(range(bins)),
                     masses=tuple(_normalize(masses).tolist()),
                     edges=edges)


def size_histogram(t: Tiling, weighting: str = "count",
                   bins: int = DEFAULT_SIZE_BINS) -> Histogram:
    """Empirical size distribution of a built tiling."""
    counts: dict = {}
    for tile in t.tiles:
        e = tile.placement.size_exp
        counts[e] = counts.get(e, 0) + 1
    return _size_histogram_from_counts(t.shape, counts, weighting, bins)


def census_size_histogram(shape: TriangleShape, n: int,
                          weighting: str = "count",
                          bins: int = DEFAULT_SIZE_BINS) -> Histogram:
    """Same distribution from the exact census; no tiles are built."""
    counts, _ = census_counts(shape, n)
    return _size_histogram_from_counts(shape, counts, weighting, bins)


def matrix_power_counts(shape: TriangleShape, n: int) -> tuple[int, ...]:
    """Per-size-rank tile counts of T_n from the population matrix (exact
    integers at any n)."""
    if shape.rationality is None:
        raise DomainError("population matrix needs a rational shape")
    z = shape.rationality
    M = population_matrix(z.numerator, z.denominator).tolist()
    m = len(M)
    v = [1] + [0] * (m - 1)
    for _ in range(n):
        v = [sum(M[r][c] * v[c] for c in range(m)) for r in range(m)]
    return tuple(v)


def orientation_histogram(t: Tiling, bins: int = DEFAULT_ORIENTATION_BINS
                          ) -> OrientationHistogram:
    """Heading distribution of a built tiling, split by size and hand."""
    rank_of = t.class_rank()
    total = len(t.tiles)
    cells: dict = {}
    raw: dict = {}
    for tile in t.tiles:
        key = (rank_of[tile.placement.size_exp], tile.placement.handedness)
        b = _phi_bin(tile.placement.phi, bins)
        raw.setdefault(key, np.zeros(bins))[b] += 1
    phi_bins = {}
    for key, arr in raw.items():
        cells[key] = float(arr.sum()) / total
        phi_bins[key] = tuple(_normalize(arr).tolist())
    return OrientationHistogram(bins=bins, cells=cells, phi_bins=phi_bins)


def census_orientation_histogram(shape: TriangleShape, n: int,
                                 bins: int = DEFAULT_ORIENTATION_BINS,
                                 theta_pi: Fraction | None = None
                                 ) -> OrientationHistogram:
    """Heading distribution from the exact orientation census."""
    census = orientation_census(shape, n, theta_pi)
    pairs = {(i, j) for (i, j, _, _) in census.counts}
    ranks = _rank_by_key(shape, pairs)
    total = census.total()
    raw: dict = {}
    for (i, j, sign, key), cnt in census.counts.items():
        cell = (ranks[(i, j)], sign)
        b = _phi_bin(census.angle(key), bins)
        raw.setdefault(cell, np.zeros(bins))[b] += cnt
    cells = {}
    phi_bins = {}
    for cell, arr in raw.items():
        cells[cell] = float(arr.sum()) / total
        phi_bins[cell] = tuple(_normalize(arr).tolist())
    return OrientationHistogram(bins=bins, cells=cells, phi_bins=phi_bins)


# -- exact lattice-path counts ------------------------------------------------


def count_oracle(shape: TriangleShape, t_cut, ij: tuple[int, int]) -> int:
    """Exact number of tiles with exponents (i, j) in the cut at t_cut.

    A tile instance is one lattice path of A and B steps; it is present
    exactly when its own size key is at or past the cut but its parent's
    is before it.  In the lower part of the window both parent types
    qualify; in the upper part only the larger step does, which pins the
    path's final step.
    """
    i, j = ij
    if i < 0 or j < 0:
        raise ArgumentError(f"exponents must be non-negative, got {ij}")
    # compare in the key's own arithmetic: integers on the rational
    # lattice, extended precision otherwise (boundary hits are exact
    # lattice coincidences, snapped rather than left to rounding)
    alpha = shape.size_key(1, 0)
    beta = shape.size_key(0, 1)
    mu = max(alpha, beta)
    eps = 0 if shape.rationality is not None else mpmath.mpf("1e-30")
    s = shape.size_key(i, j) - t_cut
    if s < -eps or s >= mu - eps:
        raise DomainError(f"size offset {float(s)} outside the window [0, {float(mu)})")
    if s < min(alpha, beta) - eps:
        return math.comb(i + j, i) * 4 ** j
    if alpha < beta:
        # upper window: the path must have arrived by a B step
        return (math.comb(i + j - 1, i) * 4 ** j) if j >= 1 else 0
    return (math.comb(i + j - 1, j) * 4 ** j) if i >= 1 else 0


def area_fraction_limit(shape: TriangleShape, interval) -> float:
    """Limiting area fraction of tiles whose size offset lies in the
    interval: the two-term window density integrated in closed form."""
    s0, s1 = interval
    if not (0.0 <= s0 <= s1 <= shape.mu + 1e-12):
        raise ArgumentError(f"interval {interval} not inside [0, {shape.mu}]")
    a2, b2 = shape.a ** 2, shape.b ** 2

    def overlap(hi):
        return max(0.0, min(s1, hi) - min(s0, hi))

    num = a2 * overlap(shape.alpha) + b2 * overlap(shape.beta)
    return num / (a2 * shape.alpha + b2 * shape.beta)


def count_fraction_limit(shape: TriangleShape, interval) -> float:
    """Limiting count fraction over a size-offset interval (the density
    carries e^{2s}: smaller tiles dominate by number)."""
    s0, s1 = interval
    if not (0.0 <= s0 <= s1 <= shape.mu + 1e-12):
        raise ArgumentError(f"interval {interval} not inside [0, {shape.mu}]")
    a2, b2 = shape.a ** 2, shape.b ** 2

    def piece(hi):
        lo_c, hi_c = min(s0, hi), min(s1, hi)
        return math.exp(2.0 * hi_c) - math.exp(2.0 * lo_c)

    return (a2 * piece(shape.alpha) + b2 * piece(shape.beta)) / (4.0 * shape.c ** 2)


def empirical_size_fraction(shape: TriangleShape, n: int, interval,
                            weighting: str = "area") -> float:
    """Weight fraction of T_n tiles whose size offset lies in the
    interval (census counts; offsets measured from the generation's cut)."""
    if weighting not in ("count", "area"):
        raise ArgumentError(f"unknown weighting {weighting!r}")
    s0, s1 = interval
    counts, _ = census_counts(shape, n)
    keys = {ij: float(shape.size_key(*ij)) for ij in counts}
    cut = min(keys.values())
    total = 0.0
    inside = 0.0
    for ij, cnt in counts.items():
        w = cnt if weighting == "count" else cnt * _relative_area(shape, *ij)
        total += w
        if s0 <= keys[ij] - cut < s1:
            inside += w
    return inside / total


def equidistribution_frequency(ratio: float, lo: float, hi: float,
                               n_samples: int = 10 ** 5) -> float:
    """Visit frequency of (k*ratio mod 1) in [lo, hi) for k = 1..N."""
    if not (0.0 <= lo < hi <= 1.0):
        raise ArgumentError(f"need 0 <= lo < hi <= 1, got ({lo}, {hi})")
    k = np.arange(1, n_samples + 1, dtype=np.float64)
    frac = np.mod(k * ratio, 1.0)
    return float(((frac >= lo) & (frac < hi)).mean())


# -- analytic-vs-empirical reports --------------------------------------------


@dataclass(frozen=True)
class ComparisonReport:
    """Per-bin table plus a single verdict.

    Rational shapes are judged by per-bin L1 distance.  Irrational
    shapes carry atomic empirical distributions (finitely many exact
    sizes per generation), which no per-bin metric can reconcile with a
    continuous density; there the cumulative distributions are compared
    instead (sup norm).
    """

    name: str
    weighting: str
    labels: tuple
    analytic: tuple[float, ...]
    empirical: tuple[float, ...]
    tolerance: float
    metric: str = "l1"

    @property
    def l1(self) -> float:
        return float(sum(abs(a - e) for a, e in
                         zip(self.analytic, self.empirical)))

    @property
    def value(self) -> float:
        if self.metric == "l1":
            return self.l1
        if self.metric == "cdf_sup":
            ca = np.cumsum(self.analytic)
            ce = np.cumsum(self.empirical)
            return float(np.abs(ca - ce).max())
        raise ArgumentError(f"unknown metric {self.metric!r}")

    @property
    def passed(self) -> bool:
        return self.value < self.tolerance

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("bin,analytic,empirical,abs_error\n")
        for lab, a, e in zip(self.labels, self.analytic, self.empirical):
            buf.write(f"{lab},{a:.12g},{e:.12g},{abs(a - e):.12g}\n")
        return buf.getvalue()

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "weighting": self.weighting,
            "labels": list(self.labels),
            "analytic": list(self.analytic),
            "empirical": list(self.empirical),
            "metric": self.metric,
            "value": self.value,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


def size_comparison(shape: TriangleShape, n: int, weighting: str = "area",
                    tolerance: float = 0.02,
                    bins: int = DEFAULT_SIZE_BINS) -> ComparisonReport:
    """Census distribution of T_n against the predicted limit."""
    hist = census_size_histogram(shape, n, weighting, bins)
    if shape.rationality is not None:
        report = eigen(shape)
        full = report.rho if weighting == "area" else report.nu
        # early generations may not exhibit every class yet
        analytic = tuple(full[k - 1] for k in hist.labels)
        metric = "l1"
    else:
        width = shape.mu / bins
        limit = area_fraction_limit if weighting == "area" else count_fraction_limit
        analytic = tuple(limit(shape, (k * width, min((k + 1) * width, shape.mu)))
                         for k in hist.labels)
        metric = "cdf_sup"
    return ComparisonReport(name="size", weighting=weighting,
                            labels=hist.labels, analytic=analytic,
                            empirical=hist.masses, tolerance=tolerance,
                            metric=metric)


def orientation_comparison(shape: TriangleShape, n: int,
                           bins: int = DEFAULT_ORIENTATION_BINS,
                           tolerance: float = 0.05,
                           theta_pi: Fraction | None = None) -> ComparisonReport:
    """Pooled heading distribution of T_n against the uniform law."""
    hist = census_orientation_histogram(shape, n, bins, theta_pi)
    uniform = tuple([1.0 / bins] * bins)
    return ComparisonReport(name="orientation", weighting="count",
                            labels=tuple(range(bins)), analytic=uniform,
                            empirical=hist.pooled(), tolerance=tolerance)
