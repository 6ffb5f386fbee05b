"""One-dimensional substitution systems on fault-line edge words, the
half-word imbalance f(n), and exact slippage measurements.

A fault line is an edge both of whose sides keep subdividing without
interlocking.  Two subdivisions of the shape act on the edge word as a
letter substitution; laying the word out with its geometric segment
lengths and mirroring it (the opposite side is the same pattern rotated
by pi) turns adjacency questions into questions about vertex offsets.
All offset arithmetic is exact: positions are integer pairs (u, v)
valued u + v*sqrt(D), so equality and ordering never depend on floats.
"""

from __future__ import annotations

import functools
import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, InternalError, ResourceError
from .geometry import TriangleShape, shape_from_pq
from .substitution import build_Tn, trace_edge

DEFAULT_LETTER_CAP = 10 ** 8

SQRT5 = math.sqrt(5.0)


@dataclass(frozen=True)
class Word:
    """Letters over a tiny alphabet, stored one character per letter."""

    letters: str
    alphabet: tuple[str, ...]
    chars: str  # chars[i] encodes alphabet[i]

    def __len__(self) -> int:
        return len(self.letters)

    def counts(self) -> dict[str, int]:
        return {name: self.letters.count(ch)
                for name, ch in zip(self.alphabet, self.chars)}

    def tokens(self) -> list[str]:
        names = dict(zip(self.chars, self.alphabet))
        return [names[ch] for ch in self.letters]


@dataclass(frozen=True)
class SubstitutionRule1D:
    name: str
    alphabet: tuple[str, ...]
    chars: str
    images: dict[str, str]  # char -> encoded image

    def __post_init__(self) -> None:
        pool = set(self.chars)
        if set(self.images) != pool:
            raise ArgumentError(f"{self.name}: images must cover {self.chars!r}")
        for ch, img in self.images.items():
            if not set(img) <= pool:
                raise ArgumentError(
                    f"{self.name}: image of {ch!r} uses letters outside the alphabet")

    def word(self, letters: str) -> Word:
        return Word(letters=letters, alphabet=self.alphabet, chars=self.chars)

    def abelianization(self) -> list[list[int]]:
        """Column j counts the letters in the image of alphabet[j]."""
        return [[self.images[cj].count(ci) for cj in self.chars]
                for ci in self.chars]

    def image_lengths(self) -> dict[str, int]:
        return {c: len(self.images[c]) for c in self.chars}


def _predict_length(rule: SubstitutionRule1D, seed: str, n: int) -> int:
    counts = {c: seed.count(c) for c in rule.chars}
    for _ in range(n):
        nxt = {c: 0 for c in rule.chars}
        for c, k in counts.items():
            for ch in rule.images[c]:
                nxt[ch] += k
        counts = nxt
    return sum(counts.values())


def iterate(rule: SubstitutionRule1D, seed: str | Word, n: int,
            cap: int = DEFAULT_LETTER_CAP) -> Word:
    """n-fold substitution of ``seed``; refuses to materialize past ``cap``."""
    letters = seed.letters if isinstance(seed, Word) else seed
    if n < 0:
        raise ArgumentError(f"iteration count must be non-negative, got {n}")
    bad = set(letters) - set(rule.chars)
    if bad:
        raise ArgumentError(f"letters {bad} are not in the {rule.name} alphabet")
    final_len = _predict_length(rule, letters, n)
    if final_len > cap:
        raise ResourceError(
            f"{rule.name}: sigma^{n} would have {final_len} letters, cap is {cap}")
    table = {ord(c): img for c, img in rule.images.items()}
    for _ in range(n):
        letters = letters.translate(table)
    return rule.word(letters)


# -- the Til(1/2) systems -----------------------------------------------------

# Four-letter system: one application is two subdivisions of the shape,
# acting on hypotenuse (H) and long-leg (L) edge letters signed by whether
# the owning tile's edge direction follows the fault line.
_T12_ALPHABET4 = ("H+", "H-", "L+", "L-")
_T12_CHARS4 = "HhLl"

# Three-letter contraction: adjacent L+L- pairs fuse into a single L
# spanning two legs.
_T12_ALPHABET3 = ("H+", "H-", "L")
_T12_CHARS3 = "HhL"


def sigma0_til12() -> SubstitutionRule1D:
    return SubstitutionRule1D(
        name="til12-signed",
        alphabet=_T12_ALPHABET4,
        chars=_T12_CHARS4,
        images={"H": "LlH", "h": "hLl", "L": "HH", "l": "hh"},
    )


def sigma_til12() -> SubstitutionRule1D:
    return SubstitutionRule1D(
        name="til12",
        alphabet=_T12_ALPHABET3,
        chars=_T12_CHARS3,
        images={"H": "LH", "h": "hL", "L": "HHhh"},
    )


# -- exact prefix counting ----------------------------------------------------


class _PrefixCounter:
    """Letter counts over prefixes of sigma^n(seed) without materializing.

    Walks the expansion tree: at each level at most one child is entered,
    the others contribute their (memoized) whole-subtree counts.
    """

    def __init__(self, rule: SubstitutionRule1D):
        self.rule = rule
        self._tables: list[dict[str, dict[str, int]]] = [
            {c: {d: int(c == d) for d in rule.chars} for c in rule.chars}]

    def _level(self, k: int) -> dict[str, dict[str, int]]:
        while len(self._tables) <= k:
            prev = self._tables[-1]
            nxt = {}
            for c in self.rule.chars:
                acc = {d: 0 for d in self.rule.chars}
                for ch in self.rule.images[c]:
                    for d, cnt in prev[ch].items():
                        acc[d] += cnt
                nxt[c] = acc
            self._tables.append(nxt)
        return self._tables[k]

    def counts(self, letter: str, n: int) -> dict[str, int]:
        return self._level(n)[letter]

    def length(self, letter: str, n: int) -> int:
        return sum(self._level(n)[letter].values())

    def prefix_count(self, letter: str, n: int, prefix: int, targets: str) -> int:
        total = 0
        while True:
            if prefix <= 0:
                return total
            if prefix >= self.length(letter, n):
                return total + sum(self.counts(letter, n)[d] for d in targets)
            # n > 0 here: at n == 0 the length is 1 and both branches above fire
            for ch in self.rule.images[letter]:
                clen = self.length(ch, n - 1)
                if prefix >= clen:
                    total += sum(self.counts(ch, n - 1)[d] for d in targets)
                    prefix -= clen
                else:
                    letter, n = ch, n - 1
                    break
            else:
                raise InternalError("prefix walk exhausted an image")


_f_counter: _PrefixCounter | None = None


def f_of_n(n: int) -> int:
    """L-imbalance between the halves of the n-th hypotenuse word.

    Halves are split by letter count (lengths are even for n >= 1); the
    value is exact for any n, large words are never materialized.
    """
    if n < 1:
        raise ArgumentError(f"n must be at least 1, got {n}")
    global _f_counter
    if _f_counter is None:
        _f_counter = _PrefixCounter(sigma_til12())
    pc = _f_counter
    total_len = pc.length("H", n)
    if total_len % 2:
        raise InternalError(f"sigma^{n}(H+) has odd length {total_len}")
    first_l = pc.prefix_count("H", n, total_len // 2, "L")
    return 2 * first_l - pc.counts("H", n)["L"]


_FORBIDDEN = re.compile(r"LL|hH|[Hh]{7}")


def forbidden_subwords_check(word: Word | str) -> bool:
    """True iff the word avoids LL, H-H+ adjacency, and 7 consecutive H's."""
    letters = word.letters if isinstance(word, Word) else word
    return _FORBIDDEN.search(letters) is None


# -- exact quadratic-integer layout -------------------------------------------


def _sign_quad(A: np.ndarray, B: np.ndarray, D: int) -> np.ndarray:
    """Vectorized sign of A + B*sqrt(D) for integer arrays (exact)."""
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    quad = A * A - D * B * B  # sign(A) * sign(A + B sqrt D) factor trick below
    out = np.zeros(A.shape, dtype=np.int64)
    same = (A >= 0) & (B >= 0)
    out[same & ((A > 0) | (B > 0))] = 1
    flip = (A <= 0) & (B <= 0)
    out[flip & ((A < 0) | (B < 0))] = -1
    mixed = ~(same | flip)
    # A, B of opposite signs: |A| vs |B| sqrt(D) decides, i.e. sign of quad
    out[mixed] = np.where(np.sign(quad[mixed]) == 0, 0,
                          np.where((quad[mixed] > 0), np.sign(A[mixed]),
                                   np.sign(B[mixed])))
    return out


def _expand_segments(letters: str, seg_du: dict[str, list[int]],
                     seg_dv: dict[str, list[int]]):
    """Per-segment integer increments for a word, C-speed via repeat."""
    arr = np.frombuffer(letters.encode("ascii"), dtype=np.uint8)
    chars = sorted(seg_du)
    reps = np.zeros(arr.shape, dtype=np.int64)
    for c in chars:
        reps[arr == ord(c)] = len(seg_du[c])
    # np.repeat of per-letter increment lists: build per-letter first element
    # arrays then interleave.  All current systems have <= 2 segments per
    # letter with equal increments, which keeps this simple.
    for c in chars:
        vals_u, vals_v = seg_du[c], seg_dv[c]
        if any(x != vals_u[0] for x in vals_u) or any(x != vals_v[0] for x in vals_v):
            raise InternalError("unequal per-letter segment increments")
    du_letter = np.zeros(arr.shape, dtype=np.int64)
    dv_letter = np.zeros(arr.shape, dtype=np.int64)
    for c in chars:
        m = arr == ord(c)
        du_letter[m] = seg_du[c][0]
        dv_letter[m] = seg_dv[c][0]
    du = np.repeat(du_letter, reps)
    dv = np.repeat(dv_letter, reps)
    seg_letter = np.repeat(arr, reps)
    return du, dv, seg_letter


def _vertex_coords(du: np.ndarray, dv: np.ndarray):
    u = np.concatenate([[0], np.cumsum(du)])
    v = np.concatenate([[0], np.cumsum(dv)])
    return u, v


def _nearest_offsets(u: np.ndarray, v: np.ndarray, D: int) -> dict[int, float]:
    """Distinct nearest-vertex offsets between a word and its mirror.

    ``u, v`` are the strictly increasing side-1 vertex coordinates.  The
    mirrored side has vertices at total - x; each is matched to its
    nearest side-1 vertex.  Distinct offsets are keyed by the exact
    leg-count difference dv (which pins the offset bijectively); values
    are representative lengths.
    """
    root = math.sqrt(D)
    U, V = int(u[-1]), int(v[-1])
    fx = u.astype(np.float64) + v.astype(np.float64) * root
    s2u = U - u[::-1]
    s2v = V - v[::-1]
    s2f = fx[-1] - fx[::-1]
    idx = np.searchsorted(fx, s2f)
    idx = np.clip(idx, 1, len(fx) - 1)
    left = s2f - fx[idx - 1]
    right = fx[idx] - s2f
    take_right = right < left
    choice = np.where(take_right, idx, idx - 1)
    # near-ties decided exactly: 2*x vs (prev + next) in Z[sqrt(D)]
    close = np.abs(right - left) < 1e-6
    if close.any():
        ca = np.nonzero(close)[0]
        A = (2 * s2u[ca] - u[idx[ca] - 1] - u[idx[ca]])
        B = (2 * s2v[ca] - v[idx[ca] - 1] - v[idx[ca]])
        s = _sign_quad(A, B, D)  # >0: x is past the midpoint, next is nearer
        choice[ca] = np.where(s > 0, idx[ca], idx[ca] - 1)
    du = s2u - u[choice]
    dv = s2v - v[choice]
    # unsigned offset: flip pairs whose value is negative
    neg = _sign_quad(du, dv, D) < 0
    du[neg] *= -1
    dv[neg] *= -1
    out: dict[int, float] = {}
    for key, a in zip(dv.tolist(), du.tolist()):
        if key not in out:
            out[key] = a + key * root
    return out


# -- Til(1/2) slippage --------------------------------------------------------


@dataclass(frozen=True)
class SlippageProfile:
    n: int
    f: int
    g_at_Q: int
    distinct_offsets: tuple[float, ...]
    offset_keys: tuple[int, ...]  # exact identities behind the lengths


# Segment increments, in units where the abutting tiles have c = 4 and
# b = sqrt(17) - 1: an H covers one hypotenuse, an L covers two legs with
# a vertex in between.
_T12_SEG_DU = {"H": [4], "h": [4], "L": [-1, -1]}
_T12_SEG_DV = {"H": [0], "h": [0], "L": [1, 1]}


def slippage_til12(n: int, cap: int = DEFAULT_LETTER_CAP) -> SlippageProfile:
    """Lay the n-th word against its mirror and measure the disagreement.

    ``g_at_Q``: complete legs left of the midpoint minus complete legs of
    the mirrored side left of the midpoint (computed exactly).  The
    offsets are the distinct nearest-vertex contact lengths; c = 4 wide
    windows never recur, so the dv key already is the mod-c reduction.
    """
    w = iterate(sigma_til12(), "H", n, cap=cap)
    du, dv, seg_letter = _expand_segments(w.letters, _T12_SEG_DU, _T12_SEG_DV)
    u, v = _vertex_coords(du, dv)
    U, V = int(u[-1]), int(v[-1])
    is_leg = seg_letter == ord("L")
    # legs fully in [0, Q]: end <= Q, i.e. sign(2*end - total) <= 0
    end_u, end_v = u[1:][is_leg], v[1:][is_leg]
    start_u, start_v = u[:-1][is_leg], v[:-1][is_leg]
    side1 = int((_sign_quad(2 * end_u - U, 2 * end_v - V, 17) <= 0).sum())
    side2 = int((_sign_quad(2 * start_u - U, 2 * start_v - V, 17) >= 0).sum())
    offsets = _nearest_offsets(u, v, 17)
    keys = tuple(sorted(offsets))
    return SlippageProfile(
        n=n,
        f=f_of_n(n),
        g_at_Q=side1 - side2,
        distinct_offsets=tuple(sorted(offsets.values())),
        offset_keys=keys,
    )


# -- Til(2): bounded slippage -------------------------------------------------


def trace_letters(segments) -> str:
    """Encode traced edge segments as signed letters (upper = aligned)."""
    out = []
    for seg in segments:
        if seg.kind == "H":
            out.append("H" if seg.sign > 0 else "h")
        elif seg.kind == "L":
            out.append("L" if seg.sign > 0 else "l")
        else:
            out.append("S" if seg.sign > 0 else "s")
    return "".join(out)


def _rule_from_geometry(shape: TriangleShape, name: str, alphabet, chars: str,
                        letter_of, generations) -> SubstitutionRule1D:
    """Read one-dimensional images off the subdivided shape itself.

    ``letter_of(segment, ranks)`` maps a traced edge segment to a letter
    char.  Images are extracted by span: the word of T_{g+2} restricted to
    a letter's interval in T_g is that letter's image (substitution acts
    locally along the edge).
    """
    images: dict[str, str] = {}
    tilings = {g: build_Tn(shape, g) for g in generations}
    words = {}
    for g, t in tilings.items():
        segs = trace_edge(t, "hypotenuse")
        words[g] = [(letter_of(s), s.position, s.position + s.length)
                    for s in segs]
    tol = 1e-9 * shape.c
    for g_from, g_to in zip(generations, generations[1:]):
        for letter, lo, hi in words[g_from]:
            if letter in images:
                continue
            img = [l for (l, s0, s1) in words[g_to]
                   if s0 >= lo - tol and s1 <= hi + tol]
            images[letter] = "".join(img)
    if set(images) != set(chars):
        raise InternalError(f"{name}: derived images for {sorted(images)}, "
                            f"expected alphabet {sorted(chars)}")
    return SubstitutionRule1D(name=name, alphabet=alphabet, chars=chars,
                              images=images)


@functools.cache
def til2_rule() -> SubstitutionRule1D:
    """Hypotenuse/short-leg system of the a < b/2 exceptional shape,
    with word order read off the subdivided triangle."""
    shape = shape_from_pq(2, 1)

    def letter_of(seg):
        if seg.size_class != 1:
            raise InternalError("a small tile touches the til2 fault line")
        return "H" if seg.kind == "H" else "S"

    return _rule_from_geometry(shape, "til2", ("H", "S"), "HS",
                               letter_of, (2, 4, 6))


def _til2_counts(n: int) -> tuple[int, int]:
    h, s = 1, 0
    for _ in range(n):
        h, s = 4 * h + s, h
    return h, s


def til2_identity_check(n: int) -> bool:
    """Exact eigen-identity for the letter counts of the n-th word.

    (sqrt5 - 2) H_n - S_n = -(2 - sqrt5)^{n+1}, checked by matching the
    rational and sqrt5 parts as integers, then numerically at 50 digits.
    """
    if n < 0 or n > 40:
        raise ArgumentError(f"n must lie in 0..40, got {n}")
    h, s = _til2_counts(n)
    # (2 - sqrt5)^{n+1} = A + B*sqrt5 exactly
    A, B = 1, 0
    for _ in range(n + 1):
        A, B = 2 * A - 5 * B, 2 * B - A
    exact = (-2 * h - s == -A) and (h == -B)
    import mpmath

    with mpmath.workdps(50):
        lhs = (mpmath.sqrt(5) - 2) * h - s
        rhs = -((2 - mpmath.sqrt(5)) ** (n + 1))
        numeric = abs(lhs - rhs) < mpmath.mpf("1e-9")
    return exact and bool(numeric)


# Til(2) units: c = 1, short leg sqrt5 - 2.
_T2_SEG_DU = {"H": [1], "S": [-2]}
_T2_SEG_DV = {"H": [0], "S": [1]}


def _til2_layout(n: int, cap: int):
    w = iterate(til2_rule(), "H", n, cap=cap)
    du, dv, seg_letter = _expand_segments(w.letters, _T2_SEG_DU, _T2_SEG_DV)
    u, v = _vertex_coords(du, dv)
    return u, v, seg_letter


def til2_slippage_bound(n: int, sample_points: int | None = None,
                        cap: int = DEFAULT_LETTER_CAP) -> int:
    """Max |f_n(E)| over all vertices E: the short-leg surplus between the
    two sides of the fault line up to E.

    The function only steps at short-leg endpoints, so the exact running
    extremum over merged step events covers every vertex.  The
    ``sample_points`` parameter thins the event list for quick looks;
    exact runs leave it None.
    """
    if n == 0:
        return 0
    u, v, seg_letter = _til2_layout(n, cap)
    U, V = int(u[-1]), int(v[-1])
    is_s = seg_letter == ord("S")
    # +1 when a side-1 short leg completes (its end value), -1 when a
    # mirrored short leg completes (total - its start value)
    plus_u, plus_v = u[1:][is_s], v[1:][is_s]
    minus_u, minus_v = U - u[:-1][is_s], V - v[:-1][is_s]
    ev_u = np.concatenate([plus_u, minus_u])
    ev_v = np.concatenate([plus_v, minus_v])
    ev_d = np.concatenate([np.ones(len(plus_u), dtype=np.int64),
                           -np.ones(len(minus_u), dtype=np.int64)])
    if sample_points is not None and len(ev_u) > sample_points:
        stride = len(ev_u) // sample_points
        ev_u, ev_v, ev_d = ev_u[::stride], ev_v[::stride], ev_d[::stride]
    # merge exactly equal event positions (equal (u, v) pairs)
    K = 1 << 28
    keys = ev_u * K + ev_v  # v >= 0 and bounded well below 2^28
    order = np.argsort(ev_u.astype(np.float64) + ev_v.astype(np.float64) * SQRT5,
                       kind="stable")
    keys_sorted = keys[order]
    deltas = ev_d[order]
    boundaries = np.nonzero(np.diff(keys_sorted))[0]
    group_ends = np.concatenate([boundaries, [len(keys_sorted) - 1]])
    running = np.cumsum(deltas)[group_ends]
    return int(np.abs(running).max(initial=0))


def til2_offsets(n: int, cap: int = DEFAULT_LETTER_CAP) -> dict[int, float]:
    """Distinct nearest-vertex contact lengths across the fault line,
    keyed by the exact short-leg-count difference."""
    u, v, _ = _til2_layout(n, cap)
    return _nearest_offsets(u, v, 5)


# -- Til(1/3): dyadic fault line ----------------------------------------------


@functools.cache
def til13_rule() -> SubstitutionRule1D:
    """Three-letter system of the theta = pi/4 shape (H, medium L, small h),
    word order read off the subdivided triangle."""
    shape = shape_from_pq(1, 3)

    def letter_of(seg):
        if seg.kind == "H" and seg.size_class == 1:
            return "H"
        if seg.kind == "L" and seg.size_class == 2:
            return "L"
        if seg.kind == "H" and seg.size_class == 3:
            return "h"
        raise InternalError(
            f"unexpected fault-line segment {seg.kind}/{seg.size_class}")

    return _rule_from_geometry(shape, "til13", ("H", "L", "h"), "HLh",
                               letter_of, (2, 4, 6))


def til13_fluctuation(n: int) -> int:
    """#H - #L in the n-th hypotenuse word (exact integers, any n <= 40)."""
    if n < 0 or n > 40:
        raise ArgumentError(f"n must lie in 0..40, got {n}")
    rule = til13_rule()
    counts = {c: 0 for c in rule.chars}
    counts["H"] = 1
    for _ in range(n):
        nxt = {c: 0 for c in rule.chars}
        for c, k in counts.items():
            for ch in rule.images[c]:
                nxt[ch] += k
        counts = nxt
    return counts["H"] - counts["L"]


# Til(1/3) units: |h| = |L| = 1, |H| = 2, everything integer.
_T13_LEN = {"H": 2, "L": 1, "h": 1}


def til13_offsets(n: int, cap: int = DEFAULT_LETTER_CAP) -> dict[int, float]:
    """Nearest-vertex offsets in h-units; the fault line is integer-rigid,
    so the only possible values are 0 and 1."""
    w = iterate(til13_rule(), "H", n, cap=cap)
    arr = np.frombuffer(w.letters.encode("ascii"), dtype=np.uint8)
    steps = np.where(arr == ord("H"), 2, 1).astype(np.int64)
    x = np.concatenate([[0], np.cumsum(steps)])
    total = int(x[-1])
    mirror = total - x[::-1]
    idx = np.clip(np.searchsorted(x, mirror), 1, len(x) - 1)
    dist = np.minimum(mirror - x[idx - 1], x[idx] - mirror)
    out: dict[int, float] = {}
    for d in np.unique(dist).tolist():
        out[int(d)] = float(d)
    return out
