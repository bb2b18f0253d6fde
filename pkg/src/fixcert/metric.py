"""Metric spaces, finite distance matrices and axiom validators."""

import json
import math
from dataclasses import dataclass, field
from numbers import Integral, Real
from typing import Any, Callable, Optional

import numpy as np

from .errors import DomainError, FormatError
from .functions import GridFunc, PolyFunc, sup_distance

KINDS = ("ordinary", "rectangular")


@dataclass(frozen=True)
class MetricSpace:
    """A distance function together with an optional membership test.

    ``carrier`` lists the points of a finite space. For infinite spaces
    ``contains`` decides membership; if both are ``None`` every point is
    accepted.
    """

    metric: Callable[[Any, Any], float]
    kind: str = "ordinary"
    name: str = ""
    carrier: Optional[tuple] = None
    contains: Optional[Callable[[Any], bool]] = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown metric kind {self.kind!r}")

    @property
    def rectangular(self):
        return self.kind == "rectangular"

    def check_point(self, p):
        if self.carrier is not None:
            ok = any(_same(p, c) for c in self.carrier)
        elif self.contains is not None:
            ok = self.contains(p)
        else:
            ok = True
        if not ok:
            raise DomainError(f"point {p!r} is not in {self.name or 'the space'}")

    def distance(self, p, q):
        self.check_point(p)
        self.check_point(q)
        return float(self.metric(p, q))

    def __call__(self, p, q):
        return self.distance(p, q)


def _same(p, q):
    if isinstance(p, np.ndarray) or isinstance(q, np.ndarray):
        return np.array_equal(p, q)
    return p == q


def distance(space, p, q):
    return space.distance(p, q)


def discrete_space(n):
    """``{0, ..., n-1}`` with the discrete metric."""
    return MetricSpace(lambda p, q: 0.0 if p == q else 1.0,
                       name=f"discrete({n})", carrier=tuple(range(n)))


def _is_real(p):
    return isinstance(p, Real) and not isinstance(p, bool) and math.isfinite(p)


def real_line(lo=-math.inf, hi=math.inf, closed_hi=True):
    """An interval of the real line with ``|p - q|``."""
    def contains(p):
        if not _is_real(p):
            return False
        return lo <= p and (p <= hi if closed_hi else p < hi)
    return MetricSpace(lambda p, q: abs(float(p) - float(q)),
                       name=f"R[{lo}, {hi}{']' if closed_hi else ')'}", contains=contains)


def euclidean(dim):
    def contains(p):
        a = np.asarray(p)
        return a.shape == (dim,) and bool(np.all(np.isfinite(a)))
    return MetricSpace(lambda p, q: float(np.linalg.norm(np.asarray(p, float) - np.asarray(q, float))),
                       name=f"R^{dim}", contains=contains)


def sup_norm_space():
    """C[0, 1] under the sup norm, points given as PolyFunc or GridFunc."""
    return MetricSpace(sup_distance, name="C[0,1]",
                       contains=lambda p: isinstance(p, (PolyFunc, GridFunc)))


@dataclass(frozen=True)
class Violation:
    axiom: str
    points: tuple
    lhs: float
    rhs: float

    def to_dict(self):
        return {"axiom": self.axiom, "witness-points": list(self.points),
                "lhs": self.lhs, "rhs": self.rhs}


class FiniteMetric:
    """Distance matrix over the points ``0 .. n-1``.

    Construction only checks the format (square, finite, nonnegative).
    Asymmetric or otherwise invalid matrices are kept as given so that
    :func:`validate_metric` can report them; they are never repaired.
    """

    def __init__(self, dist, kind="ordinary"):
        try:
            d = np.array(dist, dtype=float)
        except (TypeError, ValueError) as exc:
            raise FormatError(f"distance matrix is not numeric: {exc}") from None
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise FormatError(f"distance matrix must be square, got shape {d.shape}")
        if not np.all(np.isfinite(d)):
            raise FormatError("distance matrix has non-finite entries")
        if np.any(d < 0):
            i, j = np.argwhere(d < 0)[0]
            raise FormatError(f"negative distance at ({i}, {j})")
        if kind not in KINDS:
            raise FormatError(f"unknown metric kind {kind!r}")
        d.setflags(write=False)
        self.dist = d
        self.kind = kind

    @property
    def n_points(self):
        return self.dist.shape[0]

    def __repr__(self):
        return f"FiniteMetric(n={self.n_points}, kind={self.kind!r})"

    @classmethod
    def from_coordinates(cls, coords, kind="ordinary"):
        x = np.asarray(coords, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        diff = x[:, None, :] - x[None, :, :]
        return cls(np.sqrt(np.sum(diff * diff, axis=-1)), kind=kind)

    @classmethod
    def from_json(cls, doc):
        if not isinstance(doc, dict):
            raise FormatError("metric document must be a JSON object")
        kind = doc.get("kind", "ordinary")
        if "dist" in doc:
            return cls(doc["dist"], kind=kind)
        if "coordinates" in doc:
            return cls.from_coordinates(doc["coordinates"], kind=kind)
        raise FormatError("metric document needs 'dist' or 'coordinates'")

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise FormatError(f"{path}: {exc}") from None
        return cls.from_json(doc)

    def to_json(self):
        return {"kind": self.kind, "dist": self.dist.tolist()}

    def contains(self, p):
        return isinstance(p, Integral) and not isinstance(p, bool) and 0 <= p < self.n_points

    def space(self):
        d = self.dist
        return MetricSpace(lambda p, q: d[p, q], kind=self.kind,
                           name=f"finite({self.n_points})", contains=self.contains)


def _basic_violations(d, atol):
    out = []
    n = d.shape[0]
    for i in range(n):
        if d[i, i] != 0:
            out.append(Violation("identity", (i,), float(d[i, i]), 0.0))
    for i, j in np.argwhere((d == 0) & ~np.eye(n, dtype=bool)):
        out.append(Violation("separation", (int(i), int(j)), 0.0, 0.0))
    iu, ju = np.triu_indices(n, 1)
    bad = np.abs(d[iu, ju] - d[ju, iu]) > atol
    for i, j in zip(iu[bad], ju[bad]):
        out.append(Violation("symmetry", (int(i), int(j)), float(d[i, j]), float(d[j, i])))
    return out


def triangle_violations(d, atol=1e-12):
    """Triples ``(x, y, z)``, ``x < z``, ``y`` distinct, with ``d[x,z] > d[x,y] + d[y,z]``."""
    n = d.shape[0]
    idx = np.arange(n)
    x, y, z = np.meshgrid(idx, idx, idx, indexing="ij")
    lhs = d[x, z]
    rhs = d[x, y] + d[y, z]
    mask = (x < z) & (y != x) & (y != z) & (lhs > rhs + atol)
    return [Violation("triangle", (int(a), int(b), int(c)), float(d[a, c]), float(d[a, b] + d[b, c]))
            for a, b, c in np.argwhere(mask)]


def quadrilateral_violations(d, atol=1e-12):
    """Quadruples ``(x, y, w, z)`` of distinct points, ``x < z``, with
    ``d[x,z] > d[x,y] + d[y,w] + d[w,z]``."""
    n = d.shape[0]
    if n < 4:
        return []
    idx = np.arange(n)
    x, y, w, z = np.meshgrid(idx, idx, idx, idx, indexing="ij")
    lhs = d[x, z]
    rhs = d[x, y] + d[y, w] + d[w, z]
    distinct = (x < z) & (y != w) & (y != x) & (y != z) & (w != x) & (w != z)
    mask = distinct & (lhs > rhs + atol)
    return [Violation("quadrilateral", (int(a), int(b), int(c), int(e)), float(d[a, e]),
                      float(d[a, b] + d[b, c] + d[c, e]))
            for a, b, c, e in np.argwhere(mask)]


def validate_metric(fm, atol=1e-12):
    """All violated ordinary-metric axiom instances; empty means valid."""
    d = fm.dist
    return _basic_violations(d, atol) + triangle_violations(d, atol)


def validate_rectangular(fm, atol=1e-12):
    """All violated rectangular-metric axiom instances; empty means valid."""
    d = fm.dist
    return _basic_violations(d, atol) + quadrilateral_violations(d, atol)


def validate(fm, atol=1e-12):
    if fm.kind == "rectangular":
        return validate_rectangular(fm, atol)
    return validate_metric(fm, atol)


def report_json(violations):
    return [v.to_dict() for v in violations]
