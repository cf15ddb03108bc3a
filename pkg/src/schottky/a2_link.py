"""Links of vertices in Ã2 buildings: finite projective planes and chambers.

Classical planes PG(2, q) are generated for prime ``q``; any other plane
can be supplied as an incidence structure through
:meth:`ProjPlane.from_incidence`, which validates the plane axioms.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .exact_arith import ValidationError, format_rational, is_prime, to_rational


def _normalized_vectors(q: int) -> list[tuple[int, int, int]]:
    # first nonzero coordinate equal to 1
    out = []
    for v in itertools.product(range(q), repeat=3):
        nz = next((x for x in v if x), None)
        if nz == 1:
            out.append(v)
    return out


class ProjPlane:
    def __init__(self, order: int, points: Sequence, lines: Sequence, incident: Iterable[tuple[int, int]]):
        self.order = order
        self.points = list(points)
        self.lines = list(lines)
        self._inc = frozenset(incident)
        self._on_line = [[] for _ in self.lines]
        self._through = [[] for _ in self.points]
        for pt, ln in sorted(self._inc):
            self._on_line[ln].append(pt)
            self._through[pt].append(ln)

    @classmethod
    def from_incidence(cls, order: int, n_points: int, n_lines: int, incident) -> "ProjPlane":
        """Plane from a raw incidence list of ``(point, line)`` ids; axioms are checked."""
        plane = cls(order, range(n_points), range(n_lines), incident)
        problems = plane.axiom_violations()
        if problems:
            raise ValidationError("not a projective plane: " + problems[0])
        return plane

    def incident(self, point: int, line: int) -> bool:
        return (point, line) in self._inc

    def points_on(self, line: int) -> list[int]:
        return self._on_line[line]

    def lines_through(self, point: int) -> list[int]:
        return self._through[point]

    def joining_line(self, a: int, b: int) -> int:
        common = set(self._through[a]) & set(self._through[b])
        if a == b or len(common) != 1:
            raise ValidationError("points must be distinct")
        return common.pop()

    def axiom_violations(self) -> list[str]:
        q = self.order
        size = q * q + q + 1
        out = []
        if len(self.points) != size or len(self.lines) != size:
            out.append(f"expected {size} points and lines")
        out += [f"line {l} has {len(ps)} points" for l, ps in enumerate(self._on_line) if len(ps) != q + 1]
        out += [f"point {p} is on {len(ls)} lines" for p, ls in enumerate(self._through) if len(ls) != q + 1]
        for a, b in itertools.combinations(range(len(self.points)), 2):
            if len(set(self._through[a]) & set(self._through[b])) != 1:
                out.append(f"points {a}, {b} do not span exactly one line")
                break
        for a, b in itertools.combinations(range(len(self.lines)), 2):
            if len(set(self._on_line[a]) & set(self._on_line[b])) != 1:
                out.append(f"lines {a}, {b} do not meet in exactly one point")
                break
        return out

    def chambers(self) -> list["Chamber"]:
        return [Chamber(p, l) for p, l in sorted(self._inc)]

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "points": [list(p) if isinstance(p, tuple) else p for p in self.points],
            "lines": [list(l) if isinstance(l, tuple) else l for l in self.lines],
            "incidence": [list(pair) for pair in sorted(self._inc)],
        }


def build_plane(q: int) -> ProjPlane:
    """The Desarguesian plane PG(2, q) over the prime field of order ``q``."""
    if isinstance(q, bool) or not isinstance(q, int) or not is_prime(q):
        raise ValidationError("prime orders only")
    vecs = _normalized_vectors(q)
    inc = [
        (i, j)
        for i, pt in enumerate(vecs)
        for j, ln in enumerate(vecs)
        if (pt[0] * ln[0] + pt[1] * ln[1] + pt[2] * ln[2]) % q == 0
    ]
    return ProjPlane(q, vecs, vecs, inc)


@dataclass(frozen=True)
class Chamber:
    point: int
    line: int

    def check(self, plane: ProjPlane) -> "Chamber":
        if not plane.incident(self.point, self.line):
            raise ValidationError(f"point {self.point} is not on line {self.line}")
        return self


def opposite(plane: ProjPlane, c1: Chamber, c2: Chamber) -> bool:
    return not plane.incident(c1.point, c2.line) and not plane.incident(c2.point, c1.line)


def example8_config(plane, k: int, center: int = 0) -> list[tuple[Chamber, Chamber]]:
    """``k`` disjoint pairs among the chambers ``(p_i, L_i)``, ``L_i`` through a fixed point.

    ``plane`` may also be a prime order, in which case PG(2, q) is built.
    """
    if not isinstance(plane, ProjPlane):
        plane = build_plane(plane)
    q = plane.order
    bound = (q + 1) // 2
    if not 1 <= k <= bound:
        raise ValidationError(f"k must satisfy 1 <= k <= floor((n+1)/2) = {bound}, got {k}")
    chambers = []
    for line in plane.lines_through(center):
        pt = next(x for x in plane.points_on(line) if x != center)
        chambers.append(Chamber(pt, line))
    return [(chambers[2 * m], chambers[2 * m + 1]) for m in range(k)]


@dataclass
class Corollary2Input:
    """Isometry data: translation lengths, opposition flags, and the pairwise
    axis-intersection points given through their exact distance table."""

    lengths: list
    opposite: list  # n x n booleans; diagonal ignored
    distances: list  # m x m over the intersection points
    locally_compact: bool = False
    labels: Optional[list] = None

    def __post_init__(self):
        self.lengths = [to_rational(x) for x in self.lengths]
        self.distances = [[to_rational(x) for x in row] for row in self.distances]
        n, m = len(self.lengths), len(self.distances)
        if any(l <= 0 for l in self.lengths):
            raise ValidationError("translation lengths must be positive")
        if len(self.opposite) != n or any(len(row) != n for row in self.opposite):
            raise ValidationError("opposition matrix must be n x n")
        if m == 0 or any(len(row) != m for row in self.distances):
            raise ValidationError("missing distances")
        for a in range(m):
            if self.distances[a][a] != 0:
                raise ValidationError("distance table must have zero diagonal")
            for b in range(m):
                if self.distances[a][b] != self.distances[b][a] or self.distances[a][b] < 0:
                    raise ValidationError("distance table must be symmetric and non-negative")

    @classmethod
    def from_json(cls, data: dict) -> "Corollary2Input":
        try:
            return cls(
                lengths=data["lengths"],
                opposite=[[bool(x) for x in row] for row in data["opposite"]],
                distances=data["distances"],
                locally_compact=bool(data.get("locally_compact", False)),
                labels=data.get("labels"),
            )
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed ball-criterion input: {exc}") from exc

    def to_json(self) -> dict:
        return {
            "lengths": [format_rational(l) for l in self.lengths],
            "opposite": self.opposite,
            "distances": [[format_rational(x) for x in row] for row in self.distances],
            "locally_compact": self.locally_compact,
            **({"labels": self.labels} if self.labels else {}),
        }


@dataclass
class Corollary2Verdict:
    status: str  # "certified" | "rejected" | "inconclusive"
    reason: str = ""
    radius_bound: Fraction = Fraction(0)
    center: Optional[str] = None
    conclusions: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def certified(self) -> bool:
        return self.status == "certified"

    def to_json(self) -> dict:
        out = {"status": self.status, "radius_bound": format_rational(self.radius_bound)}
        if self.reason:
            out["reason"] = self.reason
        if self.center is not None:
            out["center"] = self.center
        if self.conclusions:
            out["conclusions"] = self.conclusions
        out["notes"] = self.notes
        return out


REALIZABILITY_NOTE = "realizability of the configuration by actual isometries is assumed, not checked"


def corollary2_check(data: Corollary2Input) -> Corollary2Verdict:
    """Opposition plus an open ball of radius min(ℓ)/2 holding all intersection points.

    Sound but incomplete: an input point serving as centre, or two points
    with their midpoint, certify; diameter >= min ℓ rejects; anything
    else is inconclusive.
    """
    n = len(data.lengths)
    bound = min(data.lengths) / 2
    verdict = Corollary2Verdict("rejected", radius_bound=bound, notes=[REALIZABILITY_NOTE])
    for i, j in itertools.combinations(range(n), 2):
        if not (data.opposite[i][j] and data.opposite[j][i]):
            verdict.reason = f"not pairwise opposite ({i + 1}, {j + 1})"
            return verdict
    dist = data.distances
    m = len(dist)
    labels = data.labels or [str(a) for a in range(m)]
    diameter = max(max(row) for row in dist)
    if diameter >= 2 * bound:
        verdict.reason = f"intersection points span {format_rational(diameter)} >= min translation length"
        return verdict
    for c in range(m):
        if max(dist[c]) < bound:
            verdict.center = labels[c]
            break
    else:
        distinct = {tuple(row) for row in dist}
        if len(distinct) <= 2:
            # two points: the geodesic midpoint is at distance diameter/2 < bound
            verdict.center = "midpoint of " + " and ".join(
                labels[next(a for a in range(m) if tuple(dist[a]) == row)] for row in sorted(distinct)
            )
        else:
            verdict.status = "inconclusive"
            verdict.reason = "no input point is a valid centre and more than two distinct points"
            return verdict
    verdict.status = "certified"
    verdict.conclusions = [f"free of rank {n}"]
    if data.locally_compact:
        verdict.conclusions.append("discrete")
    return verdict


def f_translation_vector(p: int) -> list[int]:
    """Elementary-divisor valuations of diag(1, p, 1/p): the vector by which f moves
    the standard vertex of the SL3 building."""
    from .exact_arith import Matrix, elementary_divisor_valuations

    return elementary_divisor_valuations(Matrix.diag(1, p, Fraction(1, p)), p)
