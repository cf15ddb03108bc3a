"""Ping-pong engine: falsification of the ping-pong hypotheses on samples.

The sets ``X_i^±`` are infinite, so they are given as predicates and the
hypotheses are tested on a seeded sample.  A clean report means no
counterexample was found, nothing more; where the containments are
theorems (the tree certificate) this is an independent sanity check.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Callable, Optional, Sequence

from .exact_arith import ValidationError

Predicate = Callable[[Any], bool]


@dataclass
class ActionUniverse:
    """Points acted on by ``generators`` (and their ``inverses``)."""

    apply: Callable[[Any, Any], Any]  # (element, point) -> point
    generators: Sequence[Any]
    inverses: Sequence[Any]
    basepoint: Any
    neighbors: Optional[Callable[[Any], Sequence[Any]]] = None
    compose: Optional[Callable[[Any, Any], Any]] = None
    identity: Any = None
    describe: Callable[[Any], Any] = str

    @property
    def n(self) -> int:
        return len(self.generators)

    def letter(self, i: int, sign: int):
        return self.generators[i] if sign > 0 else self.inverses[i]


@dataclass
class SetFamily:
    plus: Sequence[Predicate]
    minus: Sequence[Predicate]
    closed_sets: bool = False
    locally_compact: bool = False

    @property
    def n(self) -> int:
        return len(self.plus)

    def labels(self, x) -> list[str]:
        out = []
        for i in range(self.n):
            if self.plus[i](x):
                out.append(f"X{i + 1}+")
            if self.minus[i](x):
                out.append(f"X{i + 1}-")
        return out

    def in_y(self, x) -> bool:
        return any(self.plus[i](x) or self.minus[i](x) for i in range(self.n))


@dataclass
class HypothesisReport:
    checks_run: int
    samples: int
    violations: list = field(default_factory=list)
    disjointness: list = field(default_factory=list)
    nonempty: list = field(default_factory=list)
    basepoint_outside: bool = True
    discreteness: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def summary(self) -> str:
        if self.ok:
            return f"no violation found in {self.checks_run} checks"
        v = self.violations[0]
        return f"violation ({v['kind']}) at sample {v['sample']}"

    def to_json(self) -> dict:
        return {
            "checks_run": self.checks_run,
            "samples": self.samples,
            "summary": self.summary,
            "violations": self.violations,
            "disjointness": self.disjointness,
            "nonempty": self.nonempty,
            "basepoint_outside_Y": self.basepoint_outside,
            "discreteness": self.discreteness,
        }


def sample_points(universe: ActionUniverse, count: int, seed: int, radius: int = 5, word_len: int = 6) -> list:
    """Seeded sample: BFS ball around the basepoint plus images under random short words."""
    rng = random.Random(seed)
    pool, seen = [], set()

    def add(x):
        if x not in seen:
            seen.add(x)
            pool.append(x)

    add(universe.basepoint)
    if universe.neighbors is not None:
        frontier = deque([(universe.basepoint, 0)])
        cap = 8 * count
        while frontier and len(pool) < cap:
            x, r = frontier.popleft()
            if r == radius:
                continue
            for y in universe.neighbors(x):
                if y not in seen:
                    add(y)
                    frontier.append((y, r + 1))
    n = universe.n
    for _ in range(count):
        x = universe.basepoint
        last = None
        for _ in range(rng.randint(1, word_len)):
            while True:
                i, s = rng.randrange(n), rng.choice((1, -1))
                if last != (i, -s):
                    break
            last = (i, s)
            x = universe.apply(universe.letter(i, s), x)
            add(x)
    if not pool:
        raise ValidationError("empty sample source")
    if len(pool) <= count:
        return pool
    # keep the basepoint, draw the rest without replacement
    return [pool[0]] + rng.sample(pool[1:], count - 1)


def verify_hypotheses(
    universe: ActionUniverse, family: SetFamily, sample_count: int = 200, seed: int = 0
) -> HypothesisReport:
    n = family.n
    if n < 2 or universe.n != n:
        raise ValidationError("need at least two generators, one set pair each")
    if sample_count < 1:
        raise ValidationError("sample_count must be positive")
    points = sample_points(universe, sample_count, seed)
    labels = [f"X{i + 1}{s}" for i in range(n) for s in "+-"]
    preds = [pred for i in range(n) for pred in (family.plus[i], family.minus[i])]
    overlap = [[0] * (2 * n) for _ in range(2 * n)]
    violations = []
    checks = 0

    def violate(idx, kind, x, **detail):
        violations.append({"sample": idx, "kind": kind, "point": universe.describe(x), **detail})

    outside = not family.in_y(universe.basepoint)
    checks += 1
    if not outside:
        violate(-1, "cover", universe.basepoint, detail="basepoint lies in Y")

    for idx, x in enumerate(points):
        member = [pred(x) for pred in preds]
        hit = [k for k, m in enumerate(member) if m]
        for a in hit:
            for b in hit:
                overlap[a][b] += 1
        checks += 1
        if len(hit) > 1:
            violate(idx, "disjointness", x, sets=[labels[k] for k in hit])
        for i in range(n):
            g, gi = universe.generators[i], universe.inverses[i]
            checks += 2
            if not member[2 * i + 1]:
                y = universe.apply(g, x)
                if not family.plus[i](y):
                    violate(idx, "containment", x, generator=i + 1, detail=f"g{i + 1}(X \\ X{i + 1}-) not in X{i + 1}+",
                            image=universe.describe(y))
            if not member[2 * i]:
                y = universe.apply(gi, x)
                if not family.minus[i](y):
                    violate(idx, "containment", x, generator=i + 1, detail=f"g{i + 1}^-1(X \\ X{i + 1}+) not in X{i + 1}-",
                            image=universe.describe(y))
    violations.sort(key=lambda v: (v["sample"], v["kind"]))
    nonempty = [{"set": labels[k], "witnesses": overlap[k][k]} for k in range(2 * n)]
    for k in range(2 * n):
        if overlap[k][k] == 0:
            violations.append({"sample": None, "kind": "empty", "point": None, "sets": [labels[k]]})
    return HypothesisReport(
        checks_run=checks,
        samples=len(points),
        violations=violations,
        disjointness=[[overlap[a][b] if a != b else 0 for b in range(2 * n)] for a in range(2 * n)],
        nonempty=nonempty,
        basepoint_outside=outside,
        discreteness=discreteness_rationale(family),
    )


def check_action(universe: ActionUniverse, samples: Sequence[Any], seed: int = 0, trials: int = 20) -> list:
    """Spot-check ``apply(e, x) = x`` and ``apply(gh, x) = apply(g, apply(h, x))``."""
    if universe.compose is None or universe.identity is None:
        raise ValidationError("universe has no compose/identity to check")
    rng = random.Random(seed)
    elems = list(universe.generators) + list(universe.inverses)
    bad = []
    for _ in range(trials):
        x = rng.choice(samples)
        g, h = rng.choice(elems), rng.choice(elems)
        if universe.apply(universe.identity, x) != x:
            bad.append(("identity", universe.describe(x)))
        if universe.apply(universe.compose(g, h), x) != universe.apply(g, universe.apply(h, x)):
            bad.append(("compose", universe.describe(x)))
    return bad


@dataclass
class TraceStep:
    applied: tuple  # suffix of the word applied so far
    point: Any
    sets: list


@dataclass
class WordTrace:
    steps: list
    in_y: bool
    passed: bool


def trace_word(universe: ActionUniverse, family: SetFamily, word: Sequence[tuple[int, int]], x) -> WordTrace:
    """Apply ``word`` to ``x`` letter by letter, rightmost first."""
    word = tuple(word)
    steps = [TraceStep((), x, family.labels(x))]
    pt = x
    for k in range(len(word) - 1, -1, -1):
        i, s = word[k]
        pt = universe.apply(universe.letter(i, s), pt)
        steps.append(TraceStep(word[k:], pt, family.labels(pt)))
    in_y = bool(steps[-1].sets)
    return WordTrace(steps, in_y, in_y if word else not in_y)


def discreteness_rationale(family: SetFamily) -> dict:
    claim = family.closed_sets and family.locally_compact
    if claim:
        text = "sets X_i^± are closed and the space is locally compact: the generated group is discrete"
    elif not family.closed_sets:
        text = "closedness of the sets is not asserted: no discreteness claim"
    else:
        text = "space not flagged locally compact: no discreteness claim"
    return {
        "closed_sets": family.closed_sets,
        "locally_compact": family.locally_compact,
        "discrete_claimed": claim,
        "rationale": text,
    }


def tree_universe(gens, sets) -> tuple[ActionUniverse, SetFamily]:
    """Universe and set family of a certified tree configuration."""
    from .bt_tree import TreeIsometry, neighbors

    invs = [g.inverse() for g in gens]
    universe = ActionUniverse(
        apply=lambda g, x: g.apply(x),
        generators=list(gens),
        inverses=invs,
        basepoint=sets.basepoint(),
        neighbors=neighbors,
        compose=lambda g, h: g * h,
        identity=TreeIsometry(gens[0].matrix**0, gens[0].prime),
        describe=str,
    )
    n = len(gens)
    family = SetFamily(
        plus=[(lambda x, i=i: sets.member(i, 1, x)) for i in range(n)],
        minus=[(lambda x, i=i: sets.member(i, -1, x)) for i in range(n)],
        closed_sets=True,  # preimages of closed rays under a 1-Lipschitz map
        locally_compact=True,  # T_p is locally finite
    )
    return universe, family
