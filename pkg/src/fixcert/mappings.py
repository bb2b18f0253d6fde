"""Selfmaps, auxiliary maps, the induced image map and class checkers.

Every class check is a finite-sample statement: a checker returns the
list of sampled pairs on which the defining inequality fails, so an
empty list means "holds on these samples" and nothing more.
"""

from dataclasses import dataclass
from itertools import combinations
from typing import Any, Callable, Optional

import numpy as np

from .errors import ControlError, DomainError, InvariantError
from .functions import GridFunc, PolyFunc
from .metric import MetricSpace, _same

# absolute slack on every inequality; equality cases must survive rounding
SLACK = 1e-12


def same_point(p, q):
    return _same(p, q)


@dataclass(frozen=True)
class SelfMap:
    apply: Callable[[Any], Any]
    space: MetricSpace
    name: str = ""

    def __call__(self, x):
        return self.apply(x)


@dataclass(frozen=True)
class AuxiliaryMap:
    """The auxiliary map ``T`` plus the hypotheses it is declared to satisfy.

    Continuity and (sub)sequential convergence are limit properties with
    no finite test. They are carried as flags so certificates can say
    which theorem they rely on. Injectivity can be spot-checked with
    :func:`check_injective`.
    """

    apply: Callable[[Any], Any]
    name: str = ""
    continuous: bool = True
    injective: bool = True
    subsequentially_convergent: bool = True
    sequentially_convergent: bool = True

    def __call__(self, x):
        return self.apply(x)

    def flags(self):
        return {
            "continuous": self.continuous,
            "injective": self.injective,
            "subsequentially_convergent": self.subsequentially_convergent,
            "sequentially_convergent": self.sequentially_convergent,
        }


def identity_map():
    return AuxiliaryMap(lambda x: x, name="id")


@dataclass(frozen=True)
class TrackedPair:
    """A point ``x`` together with its image ``z = T(x)``."""

    x: Any
    z: Any

    @classmethod
    def start(cls, T, x0):
        return cls(x0, T(x0))


def induced_apply(T, S, tp, check=True):
    """Advance ``(x, Tx)`` to ``(Sx, TSx)``.

    The z-component is the induced map applied to ``tp.z``; ``T`` is never
    inverted, the x-component is carried along instead.
    """
    if check and not same_point(T(tp.x), tp.z):
        raise InvariantError(f"tracked pair is inconsistent: T(x) != z for x={tp.x!r}")
    x1 = S(tp.x)
    return TrackedPair(x1, T(x1))


@dataclass(frozen=True)
class ControlAlpha:
    """Variable coefficient on ``T(X) x T(X)``, values in [0, 1)."""

    eval: Callable[[Any, Any], float]
    tag: str = ""

    def __call__(self, u, v):
        return self.eval(u, v)


@dataclass(frozen=True)
class ControlBeta:
    """Geraghty control ``t -> beta(t)`` in [0, 1).

    ``gamma_class`` declares membership in the Geraghty class (a limit
    property, not checked). ``nondecreasing`` is a declaration that
    :func:`fixcert.picard.geraghty_tail_Q` verifies by sampling.
    """

    eval: Callable[[float], float]
    tag: str = ""
    gamma_class: bool = True
    nondecreasing: Optional[bool] = None

    def __call__(self, t):
        return self.eval(t)


def constant_alpha(k):
    k = float(k)
    return ControlAlpha(lambda u, v: k, tag=f"const({k:g})")


def constant_beta(k):
    k = float(k)
    return ControlBeta(lambda t: k, tag=f"const({k:g})", nondecreasing=True)


def _checked(value, what, pair):
    v = float(value)
    if not (0.0 <= v < 1.0):
        raise ControlError(f"{what} returned {v!r}, outside [0, 1)", pair=pair)
    return v


def point_json(p):
    if isinstance(p, (PolyFunc, GridFunc)):
        return p.to_json()
    if isinstance(p, np.ndarray):
        return p.tolist()
    if isinstance(p, np.generic):
        return p.item()
    return p


@dataclass(frozen=True)
class Witness:
    cls: str
    x: Any
    y: Any
    lhs: float
    rhs: float

    @property
    def slack(self):
        return self.rhs - self.lhs

    def to_dict(self):
        return {"class": self.cls, "pair": {"x": point_json(self.x), "y": point_json(self.y)},
                "lhs": self.lhs, "rhs": self.rhs, "slack": self.slack}


def all_pairs(points):
    return list(combinations(points, 2))


def _images(T, S, x, y):
    Tx, Ty = T(x), T(y)
    Sx, Sy = S(x), S(y)
    return Tx, Ty, T(Sx), T(Sy)


def _scan(cls, T, S, pairs, rhs_fn):
    d = S.space.distance
    out = []
    for x, y in pairs:
        Tx, Ty, TSx, TSy = _images(T, S, x, y)
        lhs = d(TSx, TSy)
        rhs = rhs_fn(d, x, y, Tx, Ty, TSx, TSy)
        if lhs > rhs + SLACK:
            out.append(Witness(cls, x, y, lhs, rhs))
    return out


def check_weakly_contractive(T, S, alpha, pairs):
    """``d(TSx, TSy) <= alpha(Tx, Ty) d(Tx, Ty)`` on each sampled pair."""
    def rhs(d, x, y, Tx, Ty, TSx, TSy):
        return _checked(alpha(Tx, Ty), "alpha", (x, y)) * d(Tx, Ty)
    return _scan("weakly-contractive", T, S, pairs, rhs)


def check_weakly_kannan(T, S, alpha, pairs):
    """``d(TSx, TSy) <= alpha(Tx, Ty)/2 [d(Tx, TSx) + d(Ty, TSy)]``."""
    def rhs(d, x, y, Tx, Ty, TSx, TSy):
        a = _checked(alpha(Tx, Ty), "alpha", (x, y))
        return a / 2 * (d(Tx, TSx) + d(Ty, TSy))
    return _scan("weakly-kannan", T, S, pairs, rhs)


def check_geraghty(T, S, beta, pairs):
    def rhs(d, x, y, Tx, Ty, TSx, TSy):
        t = d(Tx, Ty)
        return _checked(beta(t), "beta", (x, y)) * t
    return _scan("geraghty", T, S, pairs, rhs)


def check_kannan_geraghty(T, S, beta, pairs):
    def rhs(d, x, y, Tx, Ty, TSx, TSy):
        b = _checked(beta(d(Tx, Ty)), "beta", (x, y))
        return b / 2 * (d(Tx, TSx) + d(Ty, TSy))
    return _scan("kannan-geraghty", T, S, pairs, rhs)


class _NoSamples:
    def __repr__(self):
        return "NO_SAMPLES"

    def __bool__(self):
        return False


NO_SAMPLES = _NoSamples()


def annulus_sup(alpha, image_pairs, a, b, space):
    """Largest ``alpha(u, v)`` over sampled image pairs with ``a <= d(u, v) <= b``.

    Returns :data:`NO_SAMPLES` when no pair falls in the annulus; a numeric
    default would silently bias any "sup < 1" conclusion.
    """
    if not a > 0:
        raise DomainError(f"annulus needs a > 0, got {a!r}")
    if b < a:
        raise DomainError(f"annulus needs b >= a, got a={a!r}, b={b!r}")
    best = NO_SAMPLES
    for u, v in image_pairs:
        if a <= space.distance(u, v) <= b:
            val = float(alpha(u, v))
            if best is NO_SAMPLES or val > best:
                best = val
    return best


def check_injective(T, samples):
    """Sample pairs ``p != q`` with ``T(p) == T(q)``."""
    images = [T(p) for p in samples]
    out = []
    for i, j in combinations(range(len(samples)), 2):
        if same_point(images[i], images[j]) and not same_point(samples[i], samples[j]):
            out.append((samples[i], samples[j]))
    return out


def check_self_map(S, samples):
    """Samples whose image leaves the carrier of ``S.space``."""
    bad = []
    for p in samples:
        try:
            S.space.check_point(S(p))
        except DomainError:
            bad.append(p)
    return bad
