"""Brute-force oracle: every reduced word, evaluated exactly.

Letter ``k`` of an ``n``-generator alphabet is generator ``k // 2`` with
exponent ``+1`` (``k`` even) or ``-1`` (``k`` odd), so the alphabet order is
``g1 < g1^-1 < g2 < ... < gn^-1``.  Words print as ``"a B a a"``: lower case
is a generator, upper case its inverse.
"""

from __future__ import annotations

import itertools
import os
import string
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

from .bt_tree import TreeIsometry, TreeVertex
from .exact_arith import Matrix, ValidationError, _vp, int_valuation
from . import kernels

PARALLEL_THRESHOLD = 50_000


class ReducedWord(tuple):
    """Tuple of ``(generator index, ±1)`` with no cancelling neighbours."""

    def __new__(cls, letters=()):
        letters = tuple((int(i), int(s)) for i, s in letters)
        for (i, s), (j, t) in zip(letters, letters[1:]):
            if i == j and s == -t:
                raise ValidationError("word is not reduced")
        for _, s in letters:
            if s not in (1, -1):
                raise ValidationError("exponents must be +1 or -1")
        return super().__new__(cls, letters)

    @classmethod
    def from_codes(cls, codes: Sequence[int]) -> "ReducedWord":
        return cls((k // 2, -1 if k % 2 else 1) for k in codes)

    @classmethod
    def parse(cls, text: str) -> "ReducedWord":
        out = []
        for ch in text.split():
            idx = string.ascii_lowercase.index(ch.lower())
            out.append((idx, -1 if ch.isupper() else 1))
        return cls(out)

    def codes(self) -> tuple[int, ...]:
        return tuple(2 * i + (1 if s < 0 else 0) for i, s in self)

    def inverse(self) -> "ReducedWord":
        return ReducedWord((i, -s) for i, s in reversed(self))

    def __str__(self):
        return " ".join(
            string.ascii_lowercase[i] if s > 0 else string.ascii_uppercase[i] for i, s in self
        )

    def evaluate(self, gens: Sequence[Matrix]) -> Matrix:
        m = Matrix.identity(gens[0].dim)
        for i, s in self:
            m = m * (gens[i] if s > 0 else gens[i].inverse())
        return m


def word_count(n: int, k: int) -> int:
    return 2 * n * (2 * n - 1) ** (k - 1)


def enumerate_reduced(n: int, max_len: int) -> Iterator[ReducedWord]:
    """Every reduced word of length 1..max_len once, length-lexicographic."""
    if n < 1 or max_len < 1:
        raise ValidationError("need n >= 1 and L >= 1")
    for length in range(1, max_len + 1):
        for codes in itertools.product(range(2 * n), repeat=length):
            if all(a ^ 1 != b for a, b in zip(codes, codes[1:])):
                yield ReducedWord.from_codes(codes)


@dataclass
class OracleReport:
    words_checked: int
    counts_by_length: list[int]
    first_trivial_word: Optional[ReducedWord] = None
    trivial_count: int = 0
    min_displacement: Optional[tuple[ReducedWord, int]] = None
    min_displacement_by_length: list = field(default_factory=list)
    zero_displacement_count: Optional[int] = None
    backend: str = kernels.BACKEND

    def to_json(self) -> dict:
        out = {
            "words_checked": self.words_checked,
            "counts_by_length": self.counts_by_length,
            "first_trivial_word": None if self.first_trivial_word is None else str(self.first_trivial_word),
            "trivial_count": self.trivial_count,
        }
        if self.zero_displacement_count is not None:
            out["zero_displacement_count"] = self.zero_displacement_count
            out["min_displacement"] = (
                None
                if self.min_displacement is None
                else {"word": str(self.min_displacement[0]), "value": self.min_displacement[1]}
            )
            out["min_displacement_by_length"] = [
                None if e is None else {"length": k + 1, "word": str(e[0]), "value": e[1]}
                for k, e in enumerate(self.min_displacement_by_length)
            ]
        return out


def worker_count() -> int:
    cap = os.environ.get("SCHOTTKY_THREADS")
    n = os.cpu_count() or 1
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            pass
    return n


def _letters(gens: Sequence[Matrix], p: int = 0):
    mats, dens, dets = [], [], []
    for g in gens:
        for m in (g, g.inverse()):
            flat, den = m.integral_form()
            mats.append(flat)
            dens.append(den)
            # v_p(det(den * m)) for the integer matrix
            dets.append(_vp(m.det(), p) + m.dim * int_valuation(den, p) if p else 0)
    return mats, dens, dets


def _scan_part(args):
    return kernels.scan_words(*args)


def _merge(parts: list[dict], max_len: int, displacement: bool) -> dict:
    counts = [sum(part["counts"][k] for part in parts) for k in range(max_len)]
    trivial_by_length = [sum(part["trivial_by_length"][k] for part in parts) for k in range(max_len)]
    firsts = [part["first_trivial"] for part in parts if part["first_trivial"] is not None]
    out = {
        "counts": counts,
        "trivial_count": sum(trivial_by_length),
        "first_trivial": min(firsts, key=lambda w: (len(w), w)) if firsts else None,
    }
    if displacement:
        md = []
        for k in range(max_len):
            cands = [part["min_disp"][k] for part in parts if part["min_disp"][k] is not None]
            md.append(min(cands) if cands else None)
        out["min_disp"] = md
        out["zero_count"] = sum(part["zero_count"] for part in parts)
    return out


def _run_scan(mats, dens, dets, max_len, p, displacement, workers):
    total = sum(word_count(len(mats) // 2, k) for k in range(1, max_len + 1))
    if workers is None:
        workers = worker_count()
    if workers <= 1 or total < PARALLEL_THRESHOLD:
        return kernels.scan_words(mats, dens, dets, max_len, p, displacement)
    jobs = [(mats, dens, dets, max_len, p, displacement, [k]) for k in range(len(mats))]
    with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
        parts = list(pool.map(_scan_part, jobs))
    return _merge(parts, max_len, displacement)


def _report(raw: dict, displacement: bool) -> OracleReport:
    rep = OracleReport(
        words_checked=sum(raw["counts"]),
        counts_by_length=list(raw["counts"]),
        first_trivial_word=None if raw["first_trivial"] is None else ReducedWord.from_codes(raw["first_trivial"]),
        trivial_count=raw["trivial_count"],
    )
    if displacement:
        by_len = [None if e is None else (ReducedWord.from_codes(e[1]), e[0]) for e in raw["min_disp"]]
        rep.min_displacement_by_length = by_len
        best = None
        for e in by_len:
            if e is not None and (best is None or e[1] < best[1]):
                best = e
        rep.min_displacement = best
        rep.zero_displacement_count = raw["zero_count"]
    return rep


def freeness_check(gens: Sequence[Matrix], max_len: int, workers: Optional[int] = None) -> OracleReport:
    """Look for a reduced word of length <= max_len equal to the identity matrix."""
    if max_len < 1:
        raise ValidationError("L must be at least 1")
    if not gens:
        raise ValidationError("no generators")
    if len({g.dim for g in gens}) != 1:
        raise ValidationError("generators of mixed dimension")
    mats, dens, dets = _letters(gens)
    return _report(_run_scan(mats, dens, dets, max_len, 0, False, workers), False)


def displacement_scan(
    gens: Sequence[TreeIsometry],
    max_len: int,
    basepoint: Optional[TreeVertex] = None,
    workers: Optional[int] = None,
) -> OracleReport:
    """Distance each non-trivial reduced word moves ``basepoint`` (default: standard vertex)."""
    if max_len < 1:
        raise ValidationError("L must be at least 1")
    primes = {g.prime for g in gens}
    if len(primes) != 1:
        raise ValidationError("generators over mixed primes")
    p = primes.pop()
    mats = [g.matrix for g in gens]
    if basepoint is not None:
        if basepoint.prime != p:
            raise ValidationError("basepoint over a different prime")
        b, bi = basepoint.basis, basepoint.inverse_basis
        # d(B, wB) = d(std, B^-1 w B std)
        mats = [bi * m * b for m in mats]
    letters, dens, dets = _letters(mats, p)
    return _report(_run_scan(letters, dens, dets, max_len, p, True, workers), True)

