"""Prototile metric data, similarity placements, and vertex realization.

The prototile is a right triangle: altitude leg ``a``, base ("long") leg
``b``, hypotenuse ``c``, and ``theta = asin(a/c)`` the acute angle between
base and hypotenuse.  Derived quantities:

* ``A = a/c`` and ``B = b/2c`` are the two linear contraction factors of
  the subdivision rule (one daughter scaled by ``A``, four by ``B``).
* ``alpha = -ln A`` and ``beta = -ln B`` turn scales into an additive size
  parameter: a tile with exponent pair ``(i, j)`` has linear scale
  ``exp(-(i*alpha + j*beta))`` relative to the root.
* ``z = alpha/beta``.  When ``z = p/q`` in lowest terms all tile sizes lie
  on the arithmetic lattice generated by ``r = A**(1/p) = B**(1/q)`` and at
  most ``max(p, q)`` sizes coexist; such shapes carry
  ``rationality = Fraction(p, q)``.  Otherwise sizes never repeat.

A placement records handedness (reflection class), the heading ``phi`` of
the ray from the small-angle vertex to the right-angle vertex, the position
of the small-angle vertex, and the exact exponent pair.  In the canonical
pose (handedness ``+1``, ``phi = 0``, origin ``(0, 0)``) the vertices are
``(0, 0)``, ``(b, 0)`` and ``(b, a)``; handedness ``-1`` mirrors across the
reference ray before rotating.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath

from .errors import ArgumentError, DomainError, GeometryError, NumericError

TWO_PI = 2.0 * math.pi

# Working precision (decimal digits) for exact-intent size comparisons of
# irrational shapes.  80-bit floats would give ~19 digits; 40 is generous.
MP_DPS = 40


def wrap_angle(phi: float) -> float:
    """Reduce an angle to [0, 2*pi)."""
    phi = math.fmod(phi, TWO_PI)
    if phi < 0.0:
        phi += TWO_PI
    if phi >= TWO_PI:  # fmod rounding can land exactly on 2*pi
        phi -= TWO_PI
    return phi


@lru_cache(maxsize=64)
def _mp_alpha_beta(theta: float) -> tuple[mpmath.mpf, mpmath.mpf]:
    with mpmath.workdps(MP_DPS):
        t = mpmath.mpf(theta)
        alpha = -mpmath.log(mpmath.sin(t))
        beta = mpmath.log(2 / mpmath.cos(t))
    return alpha, beta


@dataclass(frozen=True)
class DaughterFrame:
    """Pose of one daughter relative to an upright, unit-scale parent.

    ``phi = k*theta + l*(pi/2)`` is kept in integer form so orientation
    bookkeeping can stay exact; ``origin`` is the daughter's small-angle
    vertex in the parent's canonical frame.
    """

    handedness: int
    k: int
    l: int
    origin: tuple[float, float]
    exp_delta: tuple[int, int]

    def phi(self, theta: float) -> float:
        return wrap_angle(self.k * theta + self.l * (math.pi / 2.0))


@dataclass(frozen=True)
class TriangleShape:
    a: float
    b: float
    c: float
    theta: float
    A: float
    B: float
    alpha: float
    beta: float
    z: float
    mu: float
    rationality: Fraction | None = None
    r: float | None = None

    def __post_init__(self) -> None:
        if not (0.0 < self.theta < math.pi / 2.0):
            raise DomainError(f"theta must lie strictly inside (0, pi/2), got {self.theta}")
        if self.c <= 0.0 or self.a <= 0.0 or self.b <= 0.0:
            raise GeometryError("degenerate triangle: all sides must be positive")

    # -- size bookkeeping ------------------------------------------------

    def size_value(self, i: int, j: int) -> float:
        """Additive size parameter of a tile with exponents (i, j)."""
        return i * self.alpha + j * self.beta

    def size_key(self, i: int, j: int):
        """Exactly comparable key ordering tiles by size (small key = big tile).

        Rational shapes compare on the integer lattice i*p + j*q; irrational
        shapes fall back to extended-precision reals.
        """
        if self.rationality is not None:
            return i * self.rationality.numerator + j * self.rationality.denominator
        alpha, beta = _mp_alpha_beta(self.theta)
        with mpmath.workdps(MP_DPS):
            return i * alpha + j * beta

    @property
    def lattice_unit(self) -> float:
        """Size-parameter step per unit of the rational key (alpha/p)."""
        if self.rationality is None:
            raise DomainError("size lattice exists only for rational shapes")
        return self.alpha / self.rationality.numerator

    def scale(self, i: int, j: int) -> float:
        s = self.A**i * self.B**j
        if s <= 0.0:
            raise GeometryError(f"tile scale underflowed at exponents ({i}, {j})")
        return s

    # -- the five-daughter frame table -----------------------------------

    def daughter_frames(self) -> tuple[DaughterFrame, ...]:
        """Relative poses of the five daughters.

        Dropping the altitude foot F from the right-angle vertex onto the
        hypotenuse cuts the tile into a piece whose hypotenuse is the a-leg
        (the lone A-daughter) and a piece whose hypotenuse is the b-leg.
        The latter splits into four half-scale copies: two corner copies,
        plus the mid rectangle cut along the diagonal from F to the b-leg
        midpoint.  Emission order: corner at the right angle, corner at the
        small angle, the two rectangle halves, then the A-daughter.
        """
        frames = getattr(self, "_frames", None)
        if frames is None:
            a, b, c = self.a, self.b, self.c
            foot = (b * b * b / (c * c), a * b * b / (c * c))
            frames = (
                DaughterFrame(-1, 1, 0, (b / 2.0, 0.0), (0, 1)),
                DaughterFrame(-1, 1, 0, (0.0, 0.0), (0, 1)),
                DaughterFrame(+1, 1, 0, (b / 2.0, 0.0), (0, 1)),
                DaughterFrame(+1, 1, 2, foot, (0, 1)),
                DaughterFrame(-1, 1, 1, (b, 0.0), (1, 0)),
            )
            object.__setattr__(self, "_frames", frames)
        return frames

    def to_json(self) -> dict:
        data = {
            "a": self.a,
            "b": self.b,
            "c": self.c,
            "theta": self.theta,
            "A": self.A,
            "B": self.B,
            "alpha": self.alpha,
            "beta": self.beta,
            "z": self.z,
            "mu": self.mu,
            "rationality": None,
            "r": self.r,
        }
        if self.rationality is not None:
            data["rationality"] = {
                "p": self.rationality.numerator,
                "q": self.rationality.denominator,
            }
        return data


def shape_from_theta(theta: float, c: float = 1.0,
                     rationality: Fraction | None = None) -> TriangleShape:
    """Build the shape with the given small angle and hypotenuse length.

    ``rationality`` is a caller assertion that alpha/beta equals the given
    fraction exactly; it is not (and cannot be) inferred from the float.
    """
    if not (0.0 < theta < math.pi / 2.0):
        raise DomainError(f"theta must lie strictly inside (0, pi/2), got {theta}")
    if c <= 0.0:
        raise DomainError(f"hypotenuse must be positive, got {c}")
    big_a = math.sin(theta)
    big_b = math.cos(theta) / 2.0
    alpha = -math.log(big_a)
    beta = -math.log(big_b)
    r = None
    if rationality is not None:
        if rationality.numerator <= 0 or rationality.denominator <= 0:
            raise ArgumentError("rationality must be a positive fraction")
        r = math.exp(-alpha / rationality.numerator)
    return TriangleShape(
        a=c * big_a,
        b=c * math.cos(theta),
        c=c,
        theta=theta,
        A=big_a,
        B=big_b,
        alpha=alpha,
        beta=beta,
        z=alpha / beta,
        mu=max(alpha, beta),
        rationality=rationality,
        r=r,
    )


def shape_from_pq(p: int, q: int, c: float = 1.0) -> TriangleShape:
    """Shape whose size-ratio exponent z = alpha/beta equals p/q exactly.

    Solved by bisection on theta: q*ln(sin t) - p*ln(cos(t)/2) is strictly
    increasing on (0, pi/2) and changes sign, so the root is unique.
    """
    if not (isinstance(p, int) and isinstance(q, int)):
        raise ArgumentError("p and q must be integers")
    if p <= 0 or q <= 0:
        raise ArgumentError(f"p and q must be positive, got ({p}, {q})")
    if math.gcd(p, q) != 1:
        raise ArgumentError(f"p/q must be in lowest terms, got ({p}, {q})")

    def g(t: float) -> float:
        return q * math.log(math.sin(t)) - p * math.log(math.cos(t) / 2.0)

    lo, hi = 1e-9, math.pi / 2.0 - 1e-9
    if g(lo) >= 0.0 or g(hi) <= 0.0:
        raise NumericError(f"bisection bracket failed for p/q = {p}/{q}")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if g(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    theta = 0.5 * (lo + hi)
    return shape_from_theta(theta, c, rationality=Fraction(p, q))


@dataclass(frozen=True)
class Similarity:
    """Orientation-preserving-or-reversing similarity of the plane.

    Applies as ``p -> translation + scale * R(phi) * H(handedness) * p``
    where H(-1) mirrors across the x axis.
    """

    handedness: int = 1
    phi: float = 0.0
    scale: float = 1.0
    translation: tuple[float, float] = (0.0, 0.0)

    def apply(self, point: tuple[float, float]) -> tuple[float, float]:
        x, y = point
        if self.handedness < 0:
            y = -y
        cphi = math.cos(self.phi)
        sphi = math.sin(self.phi)
        return (
            self.translation[0] + self.scale * (x * cphi - y * sphi),
            self.translation[1] + self.scale * (x * sphi + y * cphi),
        )

    def inverse(self) -> "Similarity":
        inv_scale = 1.0 / self.scale
        inv_phi = wrap_angle(-self.handedness * self.phi)
        tx, ty = self.translation
        probe = Similarity(self.handedness, inv_phi, inv_scale, (0.0, 0.0))
        mx, my = probe.apply((-tx, -ty))
        return Similarity(self.handedness, inv_phi, inv_scale, (mx, my))


def compose(outer: Similarity, inner: Similarity) -> Similarity:
    """The similarity acting as ``outer`` after ``inner``.

    Headings add through the reflection: mirroring first negates the inner
    rotation, so the composed heading is ``outer.phi + s_outer * inner.phi``
    and handedness signs multiply.
    """
    return Similarity(
        handedness=outer.handedness * inner.handedness,
        phi=wrap_angle(outer.phi + outer.handedness * inner.phi),
        scale=outer.scale * inner.scale,
        translation=outer.apply(inner.translation),
    )


@dataclass(frozen=True)
class Placement:
    handedness: int
    phi: float
    origin: tuple[float, float]
    size_exp: tuple[int, int]


@dataclass(frozen=True)
class Tile:
    shape: TriangleShape
    placement: Placement
    id: int
    parent: int | None = None

    def similarity(self) -> Similarity:
        i, j = self.placement.size_exp
        return Similarity(
            handedness=self.placement.handedness,
            phi=self.placement.phi,
            scale=self.shape.scale(i, j),
            translation=self.placement.origin,
        )


def vertices(tile: Tile) -> tuple[tuple[float, float], ...]:
    """Marked boundary points: small-angle vertex, right-angle vertex,
    remaining vertex, and the long-leg midpoint (in that order)."""
    sim = tile.similarity()
    b, a = tile.shape.b, tile.shape.a
    return (
        sim.apply((0.0, 0.0)),
        sim.apply((b, 0.0)),
        sim.apply((b, a)),
        sim.apply((b / 2.0, 0.0)),
    )


def tile_area(tile: Tile) -> float:
    i, j = tile.placement.size_exp
    s = tile.shape.scale(i, j)
    return 0.5 * tile.shape.a * tile.shape.b * s * s
