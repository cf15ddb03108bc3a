"""The Bruhat-Tits tree of SL2 over Q_p, worked with exact rationals.

A vertex is the homothety class of a Z_p-lattice in Q_p^2.  Every class has
a unique basis of the form ``[[p**n, r], [0, 1]]`` with ``r`` a
representative of ``Q_p / p**n Z_p`` taken in ``Z[1/p] ∩ [0, p**n)``; that
pair ``(n, r)`` is what :class:`TreeVertex` stores.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .exact_arith import (
    INF,
    Matrix,
    ValidationError,
    _vp,
    check_prime,
    elementary_divisor_valuations,
    format_rational,
    reduce_mod_power,
)

ELLIPTIC = "elliptic"
HYPERBOLIC = "hyperbolic"

CASE_I = "CaseI"
CASE_II = "CaseII"
INAPPLICABLE = "Inapplicable"

ANGLES_TREE = "automatic (tree)"


class UnsupportedIsometry(ValidationError):
    """Isometry outside the type-preserving class handled here."""


class NotHyperbolic(ValidationError):
    pass


def _lattice_class(cols, p: int) -> tuple[int, Fraction]:
    """Canonical ``(n, r)`` of the lattice spanned over Z_p by ``cols``.

    Column operations over Z_(p): clear the second row against its entry of
    least valuation, then the first-row entries left over generate
    ``p**a Z_p``.
    """
    best = None
    for idx, (x, y) in enumerate(cols):
        v = _vp(y, p)
        if v != INF and (best is None or v < best[0]):
            best = (v, idx)
    if best is None:
        raise ValidationError("lattice generators do not span Q_p^2")
    b, piv = best
    x0, y0 = cols[piv]
    a = None
    for idx, (x, y) in enumerate(cols):
        if idx == piv:
            continue
        rest = x - (y / y0) * x0
        v = _vp(rest, p)
        if v != INF and (a is None or v < a):
            a = v
    if a is None:
        raise ValidationError("lattice generators do not span Q_p^2")
    n = a - b
    return n, reduce_mod_power(x0 / y0, p, n)


@dataclass(frozen=True)
class TreeVertex:
    prime: int
    level: int
    residue: Fraction

    @classmethod
    def standard(cls, p: int) -> "TreeVertex":
        return cls(check_prime(p), 0, Fraction(0))

    @classmethod
    def from_basis(cls, basis: Matrix, p: int) -> "TreeVertex":
        """Vertex of the lattice spanned by the columns of ``basis``."""
        (a, b), (c, d) = basis.rows
        n, r = _lattice_class([(a, c), (b, d)], p)
        return cls(p, n, r)

    @property
    def basis(self) -> Matrix:
        p = self.prime
        return Matrix._raw(((Fraction(p) ** self.level, self.residue), (Fraction(0), Fraction(1))))

    @property
    def inverse_basis(self) -> Matrix:
        s = Fraction(self.prime) ** -self.level
        return Matrix._raw(((s, -self.residue * s), (Fraction(0), Fraction(1))))

    def to_json(self) -> dict:
        return {"level": self.level, "residue": format_rational(self.residue)}

    def __str__(self):
        return f"v({self.level},{format_rational(self.residue)})"


def _same_prime(v: TreeVertex, w: TreeVertex) -> int:
    if v.prime != w.prime:
        raise ValidationError(f"vertices over different primes {v.prime} and {w.prime}")
    return v.prime


def distance(v: TreeVertex, w: TreeVertex) -> int:
    p = _same_prime(v, w)
    if v == w:
        return 0
    e = elementary_divisor_valuations(v.inverse_basis * w.basis, p)
    return e[-1] - e[0]


def neighbors(v: TreeVertex) -> list[TreeVertex]:
    """The ``p + 1`` vertices adjacent to ``v``, in a fixed order."""
    p = v.prime
    (a, b), (c, d) = v.basis.rows
    out = []
    for k in range(p):
        # basis * [[p, k], [0, 1]]
        out.append(TreeVertex(p, *_lattice_class([(a * p, c * p), (a * k + b, c * k + d)], p)))
    out.append(TreeVertex(p, *_lattice_class([(a, c), (b * p, d * p)], p)))
    return out


def toward(v: TreeVertex, w: TreeVertex, t: int) -> TreeVertex:
    """The vertex at distance ``t`` from ``v`` on the geodesic to ``w``."""
    p = _same_prime(v, w)
    rel = v.inverse_basis * w.basis
    e = min(_vp(x, p) for x in rel.entries())
    rel = rel * Fraction(p) ** -e
    # rel spans a sublattice of Z_p^2 with cyclic quotient; add p^t Z_p^2
    (a, b), (c, d) = (v.basis * rel).rows
    (s, u), (z, y) = (v.basis * Fraction(p) ** t).rows
    return TreeVertex(p, *_lattice_class([(a, c), (b, d), (s, z), (u, y)], p))


def geodesic(v: TreeVertex, w: TreeVertex) -> list[TreeVertex]:
    n = distance(v, w)
    if n == 0:
        return [v]
    return [v] + [toward(v, w, t) for t in range(1, n)] + [w]


@dataclass(frozen=True)
class Classification:
    kind: str
    length: int
    trace_valuation: object  # int or INF

    @property
    def hyperbolic(self) -> bool:
        return self.kind == HYPERBOLIC


class TreeIsometry:
    """An element of GL2(Q) with even determinant valuation, acting on T_p."""

    def __init__(self, matrix: Matrix, prime: int, name: str = ""):
        check_prime(prime)
        if matrix.dim != 2:
            raise ValidationError("tree isometries are 2x2 matrices")
        dv = _vp(matrix.det(), prime)
        if dv % 2:
            raise UnsupportedIsometry("type-swapping isometry unsupported (odd determinant valuation)")
        self.matrix = matrix
        self.prime = prime
        self.name = name
        self._det_shift = dv // 2
        self._powers: dict[int, Matrix] = {}
        self._lock = threading.Lock()

    def __repr__(self):
        return f"TreeIsometry({self.matrix!r}, p={self.prime})"

    def __eq__(self, other):
        return isinstance(other, TreeIsometry) and (self.matrix, self.prime) == (other.matrix, other.prime)

    def __hash__(self):
        return hash((self.matrix, self.prime))

    def inverse(self) -> "TreeIsometry":
        return TreeIsometry(self.matrix.inverse(), self.prime, self.name + "^-1" if self.name else "")

    def __mul__(self, other: "TreeIsometry") -> "TreeIsometry":
        return TreeIsometry(self.matrix * other.matrix, self.prime)

    def conjugate(self, t: Matrix) -> "TreeIsometry":
        """``t g t^-1``."""
        return TreeIsometry(t * self.matrix * t.inverse(), self.prime)

    def power_matrix(self, k: int) -> Matrix:
        with self._lock:
            m = self._powers.get(k)
        if m is None:
            m = self.matrix**k
            with self._lock:
                self._powers[k] = m
        return m

    def apply(self, v: TreeVertex, power: int = 1) -> TreeVertex:
        if v.prime != self.prime:
            raise ValidationError("vertex and isometry over different primes")
        return TreeVertex.from_basis(self.power_matrix(power) * v.basis, self.prime)

    def displacement(self, v: TreeVertex) -> int:
        return distance(v, self.apply(v))


def classify(g: TreeIsometry) -> Classification:
    p = g.prime
    m = g.matrix * Fraction(p) ** -g._det_shift
    tv = _vp(m.trace(), p)
    if tv != INF and tv < 0:
        return Classification(HYPERBOLIC, -2 * tv, tv)
    return Classification(ELLIPTIC, 0, tv)


def descend_to_min_set(g: TreeIsometry, start: Optional[TreeVertex] = None) -> TreeVertex:
    """Walk to a neighbour of strictly smaller displacement until none exists."""
    x = start or TreeVertex.standard(g.prime)
    dx = g.displacement(x)
    while True:
        for nb in neighbors(x):
            dn = g.displacement(nb)
            if dn < dx:
                x, dx = nb, dn
                break
        else:
            return x


class Axis:
    """Oriented axis of a hyperbolic isometry; ``owner`` shifts coordinates by +ℓ."""

    def __init__(self, owner: TreeIsometry, base: TreeVertex, length: int):
        self.owner = owner
        self.base = base
        self.length = length
        self.prime = owner.prime
        window = geodesic(base, owner.apply(base))
        if len(window) != length + 1:
            raise ValidationError("base vertex is not on the axis")
        self._cache = {k: v for k, v in enumerate(window)}
        self._lock = threading.Lock()

    def vertex_at(self, k: int) -> TreeVertex:
        with self._lock:
            v = self._cache.get(k)
        if v is not None:
            return v
        q, r = divmod(k, self.length)
        with self._lock:
            root = self._cache[r]
        v = self.owner.apply(root, q)
        with self._lock:
            self._cache[k] = v
        return v

    def contains(self, x: TreeVertex) -> bool:
        return self.owner.displacement(x) == self.length

    def coordinate_of(self, y: TreeVertex) -> int:
        k = distance(self.base, y)
        if self.vertex_at(k) == y:
            return k
        if self.vertex_at(-k) == y:
            return -k
        raise ValidationError(f"{y} is not on the axis")

    def vertices(self, lo: int, hi: int) -> list[TreeVertex]:
        return [self.vertex_at(k) for k in range(lo, hi + 1)]


def axis(g: TreeIsometry) -> Axis:
    c = classify(g)
    if not c.hyperbolic:
        raise NotHyperbolic(f"{g.name or g!r} is elliptic; it has no axis")
    return Axis(g, descend_to_min_set(g), c.length)


def project(x: TreeVertex, a: Axis) -> tuple[TreeVertex, int]:
    """Nearest axis vertex to ``x`` and its axis coordinate.

    The geodesic from ``x`` to ``g x`` runs through the projection, which
    sits at distance ``(d(x, gx) - ℓ) / 2`` from ``x``.
    """
    if x.prime != a.prime:
        raise ValidationError("vertex and axis over different primes")
    gx = a.owner.apply(x)
    depth = (distance(x, gx) - a.length) // 2
    y = x if depth == 0 else toward(x, gx, depth)
    return y, a.coordinate_of(y)


def distance_to_axis(x: TreeVertex, a: Axis) -> int:
    return (a.owner.displacement(x) - a.length) // 2


@dataclass
class AxisRelation:
    kind: str
    reason: str = ""
    # coordinates on axis i and axis j of the two ends of S_ij (Case I)
    segment_i: Optional[tuple[int, int]] = None
    segment_j: Optional[tuple[int, int]] = None
    # bridge B_ij endpoints (Case II)
    bridge_i: Optional[TreeVertex] = None
    bridge_j: Optional[TreeVertex] = None
    bridge_coords: Optional[tuple[int, int]] = None
    length: int = 0
    # p_i(A_j) in axis-i coordinates and p_j(A_i) in axis-j coordinates
    footprint_ij: Optional[tuple[int, int]] = None
    footprint_ji: Optional[tuple[int, int]] = None
    angles: str = ANGLES_TREE

    def to_json(self) -> dict:
        out = {"kind": self.kind}
        if self.reason:
            out["reason"] = self.reason
        if self.kind == CASE_I:
            out.update(segment_length=self.length, segment_i=list(self.segment_i), segment_j=list(self.segment_j))
        elif self.kind == CASE_II:
            out.update(
                bridge_length=self.length,
                bridge_i=self.bridge_i.to_json(),
                bridge_j=self.bridge_j.to_json(),
                bridge_coords=list(self.bridge_coords),
            )
        if self.kind != INAPPLICABLE:
            out.update(footprint_ij=list(self.footprint_ij), footprint_ji=list(self.footprint_ji), angles=self.angles)
        return out


def safety_bound(ai: Axis, aj: Axis) -> int:
    return 64 + 4 * (ai.length + aj.length + distance(ai.base, aj.base))


def _stable_end(ai: Axis, aj: Axis, sign: int, bound: int) -> Optional[int]:
    """Axis-i coordinate where p_i(A_j(sign * k)) settles as k grows, or None.

    Along A_j the distance to A_i is convex with slopes in {-1, 0, 1}; once
    it strictly increases the ray has left A_i for good and the projection
    is frozen (gate property).  k runs through 1, 2, 4, ... up to ``bound``.
    """
    k = 1
    while k <= bound:
        x0, x1 = aj.vertex_at(sign * k), aj.vertex_at(sign * (k + 1))
        if distance_to_axis(x1, ai) > distance_to_axis(x0, ai):
            c0, c1 = project(x0, ai)[1], project(x1, ai)[1]
            if c0 == c1:
                return c0
        k *= 2
    return None


def axes_relation(ai: Axis, aj: Axis) -> AxisRelation:
    if ai.prime != aj.prime:
        raise ValidationError("axes over different primes")
    bound = safety_bound(ai, aj)
    hi = _stable_end(ai, aj, +1, bound)
    lo = _stable_end(ai, aj, -1, bound)
    if hi is None and lo is None:
        return AxisRelation(INAPPLICABLE, reason="equal axes")
    if hi is None or lo is None:
        return AxisRelation(INAPPLICABLE, reason="axes share an end (unbounded intersection)")
    a, b = min(lo, hi), max(lo, hi)
    ya = ai.vertex_at(a)
    if a < b or aj.contains(ya):
        yb = ai.vertex_at(b)
        ca, cb = aj.coordinate_of(ya), aj.coordinate_of(yb)
        return AxisRelation(
            CASE_I,
            segment_i=(a, b),
            segment_j=(ca, cb),
            length=b - a,
            footprint_ij=(a, b),
            footprint_ji=(min(ca, cb), max(ca, cb)),
        )
    yj, cj = project(ya, aj)
    return AxisRelation(
        CASE_II,
        bridge_i=ya,
        bridge_j=yj,
        bridge_coords=(a, cj),
        length=distance(ya, yj),
        footprint_ij=(a, a),
        footprint_ji=(cj, cj),
    )


@dataclass(frozen=True)
class FundamentalDomain:
    index: int
    lo: Fraction
    hi: Fraction

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    def contains(self, c) -> bool:
        return self.lo < c < self.hi

    def to_json(self) -> dict:
        return {"index": self.index, "lo": format_rational(self.lo), "hi": format_rational(self.hi)}


@dataclass
class Verdict:
    status: str  # "certified" | "inconclusive"
    reason: str = ""
    lengths: list[int] = field(default_factory=list)
    relations: dict = field(default_factory=dict)
    projections: list = field(default_factory=list)  # P_i as (lo, hi)
    domains: list[FundamentalDomain] = field(default_factory=list)
    axes: list[Axis] = field(default_factory=list)
    rank: int = 0
    discrete: bool = False

    @property
    def certified(self) -> bool:
        return self.status == "certified"

    def to_json(self) -> dict:
        out = {
            "verdict": self.status,
            "translation_lengths": self.lengths,
            "relations": [
                {"pair": [i, j], **rel.to_json()} for (i, j), rel in sorted(self.relations.items())
            ],
            "angles": ANGLES_TREE,
        }
        if self.reason:
            out["reason"] = self.reason
        if self.projections:
            out["projection_intervals"] = [list(pi) for pi in self.projections]
        if self.certified:
            out["fundamental_domains"] = [d.to_json() for d in self.domains]
            out["conclusion"] = {"free_rank": self.rank, "discrete": self.discrete}
        return out


def _check_generators(gens: Sequence[TreeIsometry]) -> list[Classification]:
    if len(gens) < 2:
        raise ValidationError("at least two generators are required")
    primes = {g.prime for g in gens}
    if len(primes) != 1:
        raise ValidationError(f"generators over mixed primes {sorted(primes)}")
    out = []
    for i, g in enumerate(gens):
        c = classify(g)
        if not c.hyperbolic:
            raise NotHyperbolic(f"generator {g.name or i} is elliptic")
        out.append(c)
    return out


def schottky_check(gens: Sequence[TreeIsometry]) -> Verdict:
    """Decide the strong Schottky criterion for hyperbolic isometries of T_p.

    Angle hypotheses are automatic in a tree, so this reduces to every pair
    of axes meeting in a bounded set (or not at all) and every union of
    footprints ``P_i`` having diameter below ``ℓ(g_i)``.
    """
    classes = _check_generators(gens)
    lengths = [c.length for c in classes]
    axes = [axis(g) for g in gens]
    n = len(gens)
    relations = {}
    for i in range(n):
        for j in range(i + 1, n):
            rel = axes_relation(axes[i], axes[j])
            relations[(i, j)] = rel
            if rel.kind == INAPPLICABLE:
                return Verdict(
                    "inconclusive",
                    reason=f"{rel.reason} (generators {i}, {j})",
                    lengths=lengths,
                    relations=relations,
                    axes=axes,
                )
    projections = []
    for i in range(n):
        spans = []
        for j in range(n):
            if j == i:
                continue
            rel = relations[(min(i, j), max(i, j))]
            spans.append(rel.footprint_ij if i < j else rel.footprint_ji)
        projections.append((min(s[0] for s in spans), max(s[1] for s in spans)))
    verdict = Verdict("inconclusive", lengths=lengths, relations=relations, projections=projections, axes=axes)
    bad = [i for i, (lo, hi) in enumerate(projections) if hi - lo >= lengths[i]]
    if bad:
        verdict.reason = "projection condition fails for generators " + ", ".join(map(str, bad))
        return verdict
    half = [Fraction(l, 2) for l in lengths]
    verdict.domains = [
        FundamentalDomain(i, Fraction(lo + hi, 2) - half[i], Fraction(lo + hi, 2) + half[i])
        for i, (lo, hi) in enumerate(projections)
    ]
    verdict.status = "certified"
    verdict.rank = n
    verdict.discrete = True  # T_p is locally compact
    return verdict


@dataclass
class PingPongSets:
    """Rays ``A_i^±`` (as coordinate half-lines) and membership in ``X_i^±``."""

    axes: list[Axis]
    domains: list[FundamentalDomain]
    _sides: dict = field(default_factory=dict, repr=False)

    @property
    def n(self) -> int:
        return len(self.axes)

    def ray(self, i: int, sign: int) -> tuple:
        d = self.domains[i]
        return (d.hi, math.inf) if sign > 0 else (-math.inf, d.lo)

    def coordinate(self, i: int, x: TreeVertex) -> int:
        return project(x, self.axes[i])[1]

    def side(self, i: int, x: TreeVertex) -> int:
        """+1 if ``x`` is in X_i^+, -1 if in X_i^-, 0 otherwise."""
        key = (i, x)
        side = self._sides.get(key)
        if side is None:
            c = self.coordinate(i, x)
            d = self.domains[i]
            side = 1 if c >= d.hi else -1 if c <= d.lo else 0
            self._sides[key] = side
        return side

    def member(self, i: int, sign: int, x: TreeVertex) -> bool:
        return self.side(i, x) == sign

    def basepoint(self) -> TreeVertex:
        """An axis-0 vertex projecting into every D_i, hence outside all X_i^±."""
        d = self.domains[0]
        return self.axes[0].vertex_at(math.floor((d.lo + d.hi) / 2))

    def to_json(self) -> dict:
        return {
            "rays": [
                {"index": i, "plus": [format_rational(d.hi), "inf"], "minus": ["-inf", format_rational(d.lo)]}
                for i, d in enumerate(self.domains)
            ]
        }


def pingpong_sets(gens: Sequence[TreeIsometry], domains: Sequence[FundamentalDomain]) -> PingPongSets:
    axes = []
    for i, (g, d) in enumerate(zip(gens, domains)):
        c = classify(g)
        if not c.hyperbolic:
            raise NotHyperbolic(f"generator {i} is elliptic")
        if d.length != c.length:
            raise ValidationError(f"domain {i} has length {d.length}, expected {c.length}")
        axes.append(axis(g))
    if len(domains) != len(gens):
        raise ValidationError("one fundamental domain per generator is required")
    return PingPongSets(axes, list(domains))
