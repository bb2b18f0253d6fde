"""Representations of elements of C[0, 1].

Two representations are provided. :class:`PolyFunc` stores exact
coefficients in ascending powers and is what the worked examples use.
:class:`GridFunc` stores samples on a uniform grid and exists for inputs
that are not polynomials.
"""

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import DomainError


class PolyFunc:
    """Polynomial on [0, 1], coefficients in ascending powers."""

    __slots__ = ("coef",)

    def __init__(self, coef):
        c = np.atleast_1d(np.asarray(coef, dtype=float)).copy()
        if c.ndim != 1:
            raise DomainError("coefficient vector must be one-dimensional")
        if not np.all(np.isfinite(c)):
            raise DomainError("coefficients must be finite")
        c = P.polytrim(c) if c.size else np.zeros(1)
        c.setflags(write=False)
        self.coef = c

    @classmethod
    def monomial(cls, k, scale=1.0):
        c = np.zeros(k + 1)
        c[k] = scale
        return cls(c)

    @property
    def degree(self):
        return len(self.coef) - 1

    def __call__(self, t):
        # numpy's polyval is Horner's scheme
        return P.polyval(t, self.coef)

    def is_zero(self):
        return not np.any(self.coef)

    def __add__(self, other):
        return PolyFunc(P.polyadd(self.coef, _coef(other)))

    def __sub__(self, other):
        return PolyFunc(P.polysub(self.coef, _coef(other)))

    def __neg__(self):
        return PolyFunc(-self.coef)

    def __mul__(self, scalar):
        if isinstance(scalar, PolyFunc):
            return PolyFunc(P.polymul(self.coef, scalar.coef))
        return PolyFunc(self.coef * float(scalar))

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, PolyFunc):
            return NotImplemented
        return self.coef.shape == other.coef.shape and bool(np.all(self.coef == other.coef))

    def __hash__(self):
        return hash(self.coef.tobytes())

    def __repr__(self):
        return f"PolyFunc({self.coef.tolist()})"

    def to_json(self):
        return {"poly": self.coef.tolist()}


def _coef(other):
    if isinstance(other, PolyFunc):
        return other.coef
    raise TypeError(f"cannot combine PolyFunc with {type(other).__name__}")


class GridFunc:
    """Samples of a function on the uniform grid ``linspace(0, 1, n)``."""

    __slots__ = ("values",)

    def __init__(self, values):
        v = np.asarray(values, dtype=float).copy()
        if v.ndim != 1 or v.size < 2:
            raise DomainError("grid function needs at least two nodes")
        v.setflags(write=False)
        self.values = v

    @classmethod
    def from_callable(cls, fn, n=1025):
        t = np.linspace(0.0, 1.0, n)
        return cls(np.broadcast_to(fn(t), t.shape))

    @property
    def nodes(self):
        return np.linspace(0.0, 1.0, self.values.size)

    def __sub__(self, other):
        _check_grid(self, other)
        return GridFunc(self.values - other.values)

    def __add__(self, other):
        _check_grid(self, other)
        return GridFunc(self.values + other.values)

    def __mul__(self, scalar):
        return GridFunc(self.values * float(scalar))

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, GridFunc):
            return NotImplemented
        return self.values.shape == other.values.shape and bool(np.all(self.values == other.values))

    def __hash__(self):
        return hash(self.values.tobytes())

    def __repr__(self):
        return f"GridFunc(n={self.values.size})"

    def to_json(self):
        return {"grid": self.values.tolist()}


def _check_grid(a, b):
    if not isinstance(b, GridFunc) or a.values.size != b.values.size:
        raise DomainError("grid functions live on different grids")


def _critical_points(coef):
    """Real roots of the derivative that fall inside [0, 1]."""
    d = P.polyder(coef)
    d = P.polytrim(d)
    if d.size < 2 or not np.any(d):
        return np.empty(0)
    roots = P.polyroots(d)
    real = roots[np.abs(roots.imag) <= 1e-9 * np.maximum(1.0, np.abs(roots.real))].real
    return real[(real >= 0.0) & (real <= 1.0)]


def poly_sup_norm(p, start=1025, rtol=1e-12, max_nodes=2**22 + 1):
    """Sup norm of a polynomial on [0, 1].

    Evaluates on a uniform grid, starting at ``start`` nodes and doubling
    until two successive maxima agree to ``rtol``. The derivative's real
    roots in [0, 1] are added to every grid, so interior extrema are hit
    exactly instead of being approached at O(h^2).
    """
    coef = p.coef
    if not np.any(coef):
        return 0.0
    extra = _critical_points(coef)
    n = start
    prev = None
    while True:
        t = np.concatenate([np.linspace(0.0, 1.0, n), extra])
        cur = float(np.max(np.abs(P.polyval(t, coef))))
        if prev is not None and abs(cur - prev) <= rtol * max(cur, prev):
            return max(cur, prev)
        if 2 * n - 1 > max_nodes:
            return max(cur, prev if prev is not None else cur)
        prev = cur
        n = 2 * n - 1


def sup_norm(f):
    if isinstance(f, PolyFunc):
        return poly_sup_norm(f)
    if isinstance(f, GridFunc):
        return float(np.max(np.abs(f.values)))
    raise DomainError(f"no sup norm for {type(f).__name__}")


def sup_distance(a, b):
    """``max |a - b|`` over [0, 1] for two function representations."""
    if isinstance(a, PolyFunc) and isinstance(b, PolyFunc):
        return poly_sup_norm(a - b)
    if isinstance(a, GridFunc) and isinstance(b, GridFunc):
        _check_grid(a, b)
        return float(np.max(np.abs(a.values - b.values)))
    raise DomainError(
        f"sup distance needs two polynomials or two grid functions, got "
        f"{type(a).__name__} and {type(b).__name__}")
