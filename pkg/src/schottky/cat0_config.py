"""Abstract configurations of axes in a CAT(0) space.

Nothing here knows any geometry.  A configuration lists translation
lengths, how each pair of axes meets (a shared segment or a bridge), the
angles at the junctions, and the footprint of every axis on every other.
The checker decides the Schottky hypotheses on that data exactly.  Angles
are exact rational multiples of pi, stored as the coefficient.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .exact_arith import ValidationError, format_rational, to_rational

PI = Fraction(1)  # angles are stored as multiples of pi

_ANGLE_RE = re.compile(r"^\s*(?:([-+]?\d+(?:/\d+)?)\s*(?:[*·]\s*)?)?pi\s*$")


def parse_angle(text) -> Fraction:
    """``"pi"``, ``"1/2·pi"``, ``"1/2*pi"`` or ``"3/4 pi"`` -> coefficient of pi."""
    if isinstance(text, Fraction):
        return text
    m = _ANGLE_RE.match(str(text))
    if not m:
        raise ValidationError(f"cannot parse angle {text!r}; expected 'pi' or 'num/den·pi'")
    return to_rational(m.group(1)) if m.group(1) else Fraction(1)


def format_angle(a: Fraction) -> str:
    return "pi" if a == 1 else f"{format_rational(a)}·pi"


@dataclass(frozen=True)
class AbstractAxis:
    id: str
    length: Fraction

    def __post_init__(self):
        if self.length <= 0:
            raise ValidationError(f"axis {self.id}: translation length must be positive")


@dataclass
class PairRelation:
    """How axes ``i`` and ``j`` meet, plus their mutual footprints.

    ``footprints[(i, j)]`` is the interval ``p_i(A_j)`` in axis-i coordinates.
    """

    i: str
    j: str
    kind: str  # "CaseI" | "CaseII"
    angles: tuple = ()
    segment_i: Optional[tuple] = None
    segment_j: Optional[tuple] = None
    bridge_length: Optional[Fraction] = None
    footprints: dict = field(default_factory=dict)

    @property
    def segment_length(self) -> Fraction:
        return abs(self.segment_i[1] - self.segment_i[0])


@dataclass
class ConfigVerdict:
    status: str  # "certified" | "rejected"
    reason: str = ""
    domains: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def certified(self) -> bool:
        return self.status == "certified"

    def to_json(self) -> dict:
        out = {"status": self.status, "checks": self.checks}
        if self.reason:
            out["reason"] = self.reason
        if self.certified:
            out["domains"] = {
                k: [format_rational(lo), format_rational(hi)] for k, (lo, hi) in sorted(self.domains.items())
            }
            out["conclusion"] = f"free of rank {len(self.domains)}"
        if self.warnings:
            out["warnings"] = self.warnings
        return out


def _interval(pair) -> tuple[Fraction, Fraction]:
    lo, hi = (to_rational(x) for x in pair)
    return (lo, hi) if lo <= hi else (hi, lo)


def check_theorem1(axes: Sequence[AbstractAxis], relations: Sequence[PairRelation]) -> ConfigVerdict:
    if len(axes) < 2:
        raise ValidationError("need at least two axes")
    by_id = {a.id: a for a in axes}
    if len(by_id) != len(axes):
        raise ValidationError("duplicate axis ids")
    rels = {}
    for r in relations:
        if r.i not in by_id or r.j not in by_id or r.i == r.j:
            raise ValidationError(f"relation names unknown or equal axes: {r.i}, {r.j}")
        rels[frozenset((r.i, r.j))] = r
    for a, b in itertools.combinations(by_id, 2):
        if frozenset((a, b)) not in rels:
            raise ValidationError(f"missing relation for pair ({a}, {b})")

    verdict = ConfigVerdict("rejected")
    for r in relations:
        if r.kind == "CaseII" and (r.bridge_length is None or r.bridge_length <= 0):
            raise ValidationError(f"pair ({r.i}, {r.j}): bridge length must be positive")
        if r.kind not in ("CaseI", "CaseII"):
            raise ValidationError(f"pair ({r.i}, {r.j}): unknown kind {r.kind!r}")
        for key in ((r.i, r.j), (r.j, r.i)):
            if key not in r.footprints:
                raise ValidationError(f"pair ({r.i}, {r.j}): footprint of {key[1]} on {key[0]} missing")

    # precondition: S_ij lies inside both footprints
    for r in relations:
        if r.kind != "CaseI":
            fp = _interval(r.footprints[(r.i, r.j)])
            if fp[0] != fp[1]:
                verdict.warnings.append(f"pair ({r.i}, {r.j}): Case II footprint is not a single point; review")
            continue
        si, sj = _interval(r.segment_i), _interval(r.segment_j)
        if si[1] - si[0] != sj[1] - sj[0]:
            verdict.reason = f"pair ({r.i}, {r.j}): segment extents differ on the two axes"
            return verdict
        for seg, key in ((si, (r.i, r.j)), (sj, (r.j, r.i))):
            fp = _interval(r.footprints[key])
            if not (fp[0] <= seg[0] and seg[1] <= fp[1]):
                verdict.reason = f"pair ({r.i}, {r.j}): segment not contained in footprint of {key[1]} on {key[0]}"
                return verdict
            if fp != seg:
                verdict.warnings.append(f"footprint of {key[1]} on {key[0]} exceeds the shared segment; review")
    verdict.checks.append("footprints consistent")

    for r in relations:
        expected = 2 if r.kind == "CaseI" else 4
        if len(r.angles) != expected:
            raise ValidationError(f"pair ({r.i}, {r.j}): {r.kind} needs {expected} angles")
        for a in r.angles:
            if a != PI:
                verdict.reason = f"angle hypothesis: pair ({r.i}, {r.j}) has angle {format_angle(a)}"
                return verdict
    verdict.checks.append("all angles equal pi")

    if len(axes) == 2:
        (r,) = relations
        if r.kind == "CaseI" and r.segment_length >= min(a.length for a in axes):
            verdict.warnings.append("two-generator case: shared segment not shorter than both translation lengths")

    for ax in axes:
        spans = []
        for other in axes:
            if other.id == ax.id:
                continue
            spans.append(_interval(rels[frozenset((ax.id, other.id))].footprints[(ax.id, other.id)]))
        lo, hi = min(s[0] for s in spans), max(s[1] for s in spans)
        if hi - lo >= ax.length:
            verdict.reason = (
                f"projection condition: footprints on {ax.id} have diameter {format_rational(hi - lo)}"
                f" >= translation length {format_rational(ax.length)}"
            )
            verdict.domains = {}
            return verdict
        mid = (lo + hi) / 2
        verdict.domains[ax.id] = (mid - ax.length / 2, mid + ax.length / 2)
    verdict.checks.append("projection condition holds on every axis")

    verdict.status = "certified"
    return verdict


def relation_from_tree(rel, i: str, j: str) -> PairRelation:
    """Convert a tree ``AxisRelation`` between axes ``i`` and ``j``; angles are pi."""
    from .bt_tree import CASE_I, CASE_II

    if rel.kind == CASE_I:
        return PairRelation(
            i, j, "CaseI",
            angles=(PI, PI),
            segment_i=tuple(Fraction(c) for c in rel.segment_i),
            segment_j=tuple(Fraction(c) for c in rel.segment_j),
            footprints={(i, j): tuple(map(Fraction, rel.footprint_ij)), (j, i): tuple(map(Fraction, rel.footprint_ji))},
        )
    if rel.kind == CASE_II:
        return PairRelation(
            i, j, "CaseII",
            angles=(PI, PI, PI, PI),
            bridge_length=Fraction(rel.length),
            footprints={(i, j): tuple(map(Fraction, rel.footprint_ij)), (j, i): tuple(map(Fraction, rel.footprint_ji))},
        )
    raise ValidationError(f"relation is {rel.kind}: {rel.reason}")


def config_from_tree(lengths, relations) -> tuple[list[AbstractAxis], list[PairRelation]]:
    """Abstract configuration of a tree run; ``relations`` keyed by index pairs."""
    axes = [AbstractAxis(f"A{k + 1}", Fraction(l)) for k, l in enumerate(lengths)]
    rels = [relation_from_tree(rel, f"A{i + 1}", f"A{j + 1}") for (i, j), rel in sorted(relations.items())]
    return axes, rels


def load_config(data: dict) -> tuple[list[AbstractAxis], list[PairRelation]]:
    """Parse the JSON configuration format (see README)."""
    try:
        axes = [AbstractAxis(str(a["id"]), to_rational(a["length"])) for a in data["axes"]]
        rels = []
        for r in data["relations"]:
            i, j = (str(x) for x in r["pair"])
            fps = {}
            for fp in r["footprints"]:
                fps[(str(fp["on"]), str(fp["of"]))] = tuple(to_rational(x) for x in fp["interval"])
            rel = PairRelation(i, j, r["kind"], angles=tuple(parse_angle(a) for a in r["angles"]), footprints=fps)
            if r["kind"] == "CaseI":
                rel.segment_i = tuple(to_rational(x) for x in r["segment"][i])
                rel.segment_j = tuple(to_rational(x) for x in r["segment"][j])
            elif "bridge_length" in r:
                rel.bridge_length = to_rational(r["bridge_length"])
            rels.append(rel)
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed configuration: {exc}") from exc
    return axes, rels


def dump_config(axes: Sequence[AbstractAxis], relations: Sequence[PairRelation]) -> dict:
    out = {"axes": [{"id": a.id, "length": format_rational(a.length)} for a in axes], "relations": []}
    for r in relations:
        rec = {
            "pair": [r.i, r.j],
            "kind": r.kind,
            "angles": [format_angle(a) for a in r.angles],
            "footprints": [
                {"on": on, "of": of, "interval": [format_rational(x) for x in iv]}
                for (on, of), iv in sorted(r.footprints.items())
            ],
        }
        if r.kind == "CaseI":
            rec["segment"] = {
                r.i: [format_rational(x) for x in r.segment_i],
                r.j: [format_rational(x) for x in r.segment_j],
            }
        else:
            rec["bridge_length"] = format_rational(r.bridge_length)
        out["relations"].append(rec)
    return out
