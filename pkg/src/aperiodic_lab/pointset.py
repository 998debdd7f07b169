"""Finite window samples of Delone sets and their canonical file format."""
from __future__ import annotations

import functools
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from .exact import QNum, as_qnum, sq_norm, zsign

__all__ = ["PointSet", "Frame", "load_pointset", "dump_pointset", "PointSetError"]

# int64 headroom: squared norms of scaled coordinates must not overflow
_INT_LIMIT = 1 << 30


class PointSetError(ValueError):
    pass


def _lex_cmp(p: Sequence[QNum], q: Sequence[QNum]) -> int:
    for x, y in zip(p, q):
        s = zsign(x.a * y.den - y.a * x.den, x.b * y.den - y.b * x.den)
        if s:
            return s
    return 0


@dataclass(frozen=True, eq=False)
class PointSet:
    """Points of a Delone set inside the closed ball ``B(0, window_radius)``.

    Build instances with :meth:`PointSet.build`, which sorts, deduplicates
    and checks window membership.  Equality is byte equality of the canonical
    JSON serialization.
    """

    d: int
    points: tuple
    window_radius: QNum
    provenance: dict = field(default_factory=dict)

    @classmethod
    def build(cls, d: int, points: Iterable[Sequence], window_radius, provenance: dict | None = None,
              clip: bool = True) -> PointSet:
        W = as_qnum(window_radius)
        if d not in (1, 2):
            raise PointSetError(f"dimension must be 1 or 2, got {d}")
        pts = []
        W2 = W * W
        for p in points:
            p = tuple(as_qnum(c) for c in p)
            if len(p) != d:
                raise PointSetError(f"point {p} has dimension {len(p)}, expected {d}")
            if sq_norm(p) > W2:
                if clip:
                    continue
                raise PointSetError(f"point {p} outside window radius {W}")
            pts.append(p)
        if all(c.b == 0 for p in pts for c in p):
            den = 1
            for p in pts:
                for c in p:
                    den = den * c.den // math.gcd(den, c.den)
            keyed = {tuple(c.a * (den // c.den) for c in p): p for p in pts}
            ordered = [keyed[k] for k in sorted(keyed)]
        else:
            ordered = sorted(set(pts), key=functools.cmp_to_key(_lex_cmp))
        return cls(d, tuple(ordered), W, dict(provenance or {}))

    def __len__(self) -> int:
        return len(self.points)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PointSet):
            return NotImplemented
        return self.to_json() == other.to_json()

    def __hash__(self) -> int:
        return hash(self.to_json())

    @cached_property
    def frame(self) -> Frame:
        return Frame(self)

    @cached_property
    def index(self) -> dict:
        return {p: i for i, p in enumerate(self.points)}

    def to_json(self) -> str:
        return dump_pointset(self)

    def recentered(self, v: Sequence) -> PointSet:
        """The sample ``X - v`` in the largest centred ball inside the old window."""
        v = tuple(as_qnum(c) for c in v)
        from .exact import sqrt_bounds

        lo, _ = sqrt_bounds(sq_norm(v))
        W = self.window_radius - QNum.from_fraction(lo)
        pts = [tuple(c - vc for c, vc in zip(p, v)) for p in self.points]
        prov = dict(self.provenance)
        prov["recentered_at"] = [str(c) for c in v]
        return PointSet.build(self.d, pts, W, prov)


class Frame:
    """Integer view of a PointSet on a common denominator.

    Coordinate ``k`` of point ``i`` is ``(A[i,k] + B[i,k]*tau) / den``.  When
    every ``B`` vanishes the set is *rational* and ``ints`` holds the scaled
    integer coordinates as an int64 array.
    """

    def __init__(self, X: PointSet) -> None:
        self.d = X.d
        self.n = len(X.points)
        den = X.window_radius.den
        for p in X.points:
            for c in p:
                den = den * c.den // math.gcd(den, c.den)
        self.den = den
        self.pairs = [tuple(v for c in p for v in (c.a * (den // c.den), c.b * (den // c.den))) for p in X.points]
        self.rational = all(c.b == 0 for p in X.points for c in p)
        self.ints = None
        if self.rational:
            flat = [pr[0::2] for pr in self.pairs]
            big = max((abs(v) for pr in flat for v in pr), default=0)
            if big < _INT_LIMIT:
                self.ints = np.array(flat, dtype=np.int64).reshape(self.n, self.d)

    def scaled(self, q: QNum) -> QNum:
        return q * self.den

    def bound_sq(self, radius: QNum) -> QNum:
        """``(radius * den)**2``, the squared radius in frame units."""
        r = radius * self.den
        return r * r

    def int_bound_sq(self, radius: QNum) -> int:
        """``floor((radius * den)**2)``; an integer squared norm is at most this iff it is within radius."""
        from .exact import q_floor

        return q_floor(self.bound_sq(radius))

    def disp_sign(self, i: int, j: int, bound: QNum) -> int:
        """Sign of ``|x_j - x_i|^2 - bound`` with ``bound`` in frame units."""
        pi, pj = self.pairs[i], self.pairs[j]
        sa = sb = 0
        for k in range(0, 2 * self.d, 2):
            a = pj[k] - pi[k]
            b = pj[k + 1] - pi[k + 1]
            sa += a * a + b * b
            sb += 2 * a * b + b * b
        return zsign(sa * bound.den - bound.a, sb * bound.den - bound.b)

    def norm_sign(self, i: int, bound: QNum) -> int:
        """Sign of ``|x_i|^2 - bound`` in frame units."""
        p = self.pairs[i]
        sa = sb = 0
        for k in range(0, 2 * self.d, 2):
            a, b = p[k], p[k + 1]
            sa += a * a + b * b
            sb += 2 * a * b + b * b
        return zsign(sa * bound.den - bound.a, sb * bound.den - bound.b)

    def displacement(self, i: int, j: int) -> tuple:
        pi, pj = self.pairs[i], self.pairs[j]
        return tuple(y - x for x, y in zip(pi, pj))

    def to_point(self, pair: Sequence[int]) -> tuple:
        return tuple(QNum(pair[k], pair[k + 1], self.den) for k in range(0, len(pair), 2))


def _provenance_jsonable(obj: Any) -> Any:
    if isinstance(obj, QNum):
        return str(obj)
    if isinstance(obj, dict):
        return {str(k): _provenance_jsonable(v) for k, v in sorted(obj.items())}
    if isinstance(obj, (list, tuple)):
        return [_provenance_jsonable(v) for v in obj]
    if isinstance(obj, (int, str, bool)) or obj is None:
        return obj
    return str(obj)


def dump_pointset(X: PointSet) -> str:
    doc = {
        "dimension": X.d,
        "window_radius": str(X.window_radius),
        "provenance": _provenance_jsonable(X.provenance),
        "points": [[str(c) for c in p] for p in X.points],
    }
    return json.dumps(doc, separators=(",", ":")) + "\n"


def load_pointset(source: str | Path) -> PointSet:
    """Parse a PointSet file, rejecting non-canonical content."""
    text = Path(source).read_text()
    try:
        doc = json.loads(text)
        d = int(doc["dimension"])
        W = QNum.parse(doc["window_radius"])
        pts = [tuple(QNum.parse(c) for c in p) for p in doc["points"]]
        prov = doc.get("provenance", {})
    except (KeyError, TypeError, ValueError) as exc:
        raise PointSetError(f"corrupt point set file {source}: {exc}") from exc
    X = PointSet.build(d, pts, W, prov, clip=False)
    if len(X.points) != len(pts) or list(X.points) != pts:
        raise PointSetError(f"{source}: points are not in canonical sorted order or contain duplicates")
    return X
