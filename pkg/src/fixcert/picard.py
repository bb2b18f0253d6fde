"""Picard iteration on the image of the auxiliary map, with certificates.

The orbit is kept as tracked pairs ``(x_n, z_n = T x_n)``; all
diagnostics (step distances, observed ratios, window maxima, bounds)
are measured between consecutive ``z_n``.
"""

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .errors import (DegenerateStepError, DomainError, FixcertError, HypothesisError,
                     RectangularTailUnsupported, StateError, WindowError)
from .mappings import SLACK, TrackedPair, induced_apply
from .metric import MetricSpace

STEP_BELOW_TOL = "step-below-tol"
MAX_ITERS = "max-iters"
ZERO_STEP = "degenerate-zero-step"

ESTIMATING = "ESTIMATING"
CERTIFIED = "CERTIFIED"
VIOLATED = "VIOLATED"
FIXED_POINT = "FIXED_POINT"


class MapApplicationError(FixcertError):
    """Applying ``S`` or ``T`` failed during iteration."""

    def __init__(self, step, cause):
        super().__init__(f"map application failed at step {step}: {cause}")
        self.step = step


@dataclass(frozen=True)
class Orbit:
    """A finished Picard orbit.

    ``step_dists[n]`` is ``d(z_n, z_{n-1})`` and ``step_dists[0]`` is NaN, so
    indices match the iteration count.
    """

    pairs: tuple
    step_dists: np.ndarray
    space: MetricSpace
    stop_reason: str
    hypotheses: dict = field(default_factory=dict)

    @property
    def last(self):
        return len(self.pairs) - 1

    @property
    def xs(self):
        return [p.x for p in self.pairs]

    @property
    def zs(self):
        return [p.z for p in self.pairs]

    @property
    def ratios(self):
        """``r_n`` for every index, NaN where undefined."""
        d = self.step_dists
        r = np.full(d.shape, np.nan)
        if d.size > 2:
            prev, cur = d[1:-1], d[2:]
            with np.errstate(divide="ignore", invalid="ignore"):
                r[2:] = np.where(prev > 0, cur / np.where(prev > 0, prev, 1.0), np.nan)
        return r

    @property
    def exact_fixed_point(self):
        return self.stop_reason == ZERO_STEP


def iterate(S, T, x0, max_iters=100, step_tol=0.0):
    """Run ``x_{n+1} = S x_n`` while tracking ``z_n = T x_n``.

    Stops at the first zero step (a fixed point of the induced map has
    been reached exactly), when a step falls below ``step_tol``, or after
    ``max_iters`` steps.
    """
    if max_iters < 1:
        raise DomainError("max_iters must be at least 1")
    if step_tol < 0:
        raise DomainError("step_tol must be nonnegative")
    space = S.space
    space.check_point(x0)
    try:
        tp = TrackedPair.start(T, x0)
    except Exception as exc:
        raise MapApplicationError(0, exc) from exc
    pairs = [tp]
    dists = [math.nan]
    reason = MAX_ITERS
    for n in range(1, max_iters + 1):
        try:
            nxt = induced_apply(T, S, tp, check=False)
        except Exception as exc:
            raise MapApplicationError(n, exc) from exc
        d = space.distance(nxt.z, tp.z)
        pairs.append(nxt)
        dists.append(d)
        tp = nxt
        if d == 0:
            reason = ZERO_STEP
            break
        if d < step_tol:
            reason = STEP_BELOW_TOL
            break
    dists = np.array(dists)
    dists.setflags(write=False)
    hyp = T.flags() if hasattr(T, "flags") else {}
    return Orbit(tuple(pairs), dists, space, reason, hyp)


def observed_ratio(orbit, n):
    """``r_n = d(z_n, z_{n-1}) / d(z_{n-1}, z_{n-2})`` for ``n >= 2``."""
    if not 2 <= n <= orbit.last:
        raise WindowError(f"ratio index {n} outside 2..{orbit.last}")
    den = orbit.step_dists[n - 1]
    if den == 0:
        raise DegenerateStepError(f"r_{n} undefined: d(z_{n-1}, z_{n-2}) = 0")
    return float(orbit.step_dists[n] / den)


def window_max(orbit, n, m):
    """Largest observed ratio over ``r_{n-m+1} .. r_n``."""
    if m < 1:
        raise WindowError("window m must be at least 1")
    if n < m + 1:
        raise WindowError(f"window max needs n >= m + 1, got n={n}, m={m}")
    if n > orbit.last:
        raise WindowError(f"index {n} beyond orbit end {orbit.last}")
    return max(observed_ratio(orbit, j) for j in range(n - m + 1, n + 1))


def _refuse_rectangular(orbit):
    if orbit.space.rectangular:
        raise RectangularTailUnsupported()


@dataclass(frozen=True)
class TailBound:
    """Result of :func:`apriori_tail_bound`.

    ``bounds[n]`` holds ``Q/(1-Q) d(z_n, z_{n-1})`` for ``n >= N+1``.
    ``verified`` is true when every recorded ratio ``r_j``, ``j >= N+1``,
    satisfies ``r_j <= Q``; otherwise ``violations`` lists them and
    ``first_verified_anchor`` names the smallest anchor from which the
    recorded ratios do comply.
    """

    N: int
    Q: float
    bounds: dict
    verified: bool
    violations: tuple
    first_verified_anchor: Optional[int]

    @property
    def factor(self):
        return self.Q / (1.0 - self.Q)


def apriori_tail_bound(orbit, N, Q):
    _refuse_rectangular(orbit)
    if not 0.0 <= Q < 1.0:
        raise DomainError(f"uniform ratio bound Q must lie in [0, 1), got {Q!r}")
    if N < 1:
        raise DomainError("anchor N must be at least 1")
    r = orbit.ratios
    violations = tuple((j, float(r[j])) for j in range(N + 1, orbit.last + 1)
                       if not np.isnan(r[j]) and r[j] > Q + SLACK)
    # anchor N' is clean once every constrained index j >= N'+1 complies
    first = violations[-1][0] if violations else N
    factor = Q / (1.0 - Q)
    bounds = {n: factor * float(orbit.step_dists[n]) for n in range(N + 1, orbit.last + 1)}
    return TailBound(N, float(Q), bounds, not violations, violations, first)


def geraghty_tail_Q(beta, orbit, N, samples=1000):
    """``Q = beta(d(z_N, z_{N-1}))`` after checking that beta is non-decreasing
    on ``[0, d(z_N, z_{N-1})]``."""
    if not 1 <= N <= orbit.last:
        raise DomainError(f"anchor {N} outside 1..{orbit.last}")
    if getattr(beta, "nondecreasing", None) is False:
        raise HypothesisError("control is declared not non-decreasing")
    t_n = float(orbit.step_dists[N])
    ts = np.linspace(0.0, t_n, samples)
    vals = [float(beta(t)) for t in ts]
    for i in range(samples - 1):
        if vals[i + 1] < vals[i] - SLACK:
            raise HypothesisError(
                f"control decreases between t={ts[i]!r} and t={ts[i + 1]!r} "
                f"({vals[i]!r} -> {vals[i + 1]!r})")
    return float(beta(t_n))


@dataclass(frozen=True)
class MonitorState:
    m: int
    phase: str = ESTIMATING
    q_hat: Optional[float] = None
    anchor: Optional[int] = None
    checked_through: Optional[int] = None
    violations: tuple = ()
    exact_fixed_point: bool = False


def monitor_step(state, orbit, j):
    """Feed ratio index ``j`` (the new step ``k+1``) to the monitor.

    ESTIMATING waits until the window ``r_{j-m+1} .. r_j`` is available and
    anchors there. CERTIFIED checks ``r_j <= q_hat``; a failure produces a
    VIOLATED state that already carries the re-estimated window maximum
    and the new anchor ``j``. The next passing check returns to CERTIFIED.
    """
    if state.phase == FIXED_POINT:
        return state
    if orbit.step_dists[j - 1] == 0:
        return replace(state, phase=FIXED_POINT, anchor=j - 1, q_hat=0.0,
                       checked_through=j - 1, exact_fixed_point=True)
    r = observed_ratio(orbit, j)
    if state.q_hat is None:
        new = state
        if j >= state.m + 1:
            q = window_max(orbit, j, state.m)
            if q < 1.0:
                new = replace(state, phase=CERTIFIED, q_hat=q, anchor=j)
        new = replace(new, checked_through=j)
    elif r <= state.q_hat + SLACK:
        new = replace(state, phase=CERTIFIED, checked_through=j)
    else:
        q = window_max(orbit, j, state.m)
        new = replace(state, phase=VIOLATED, q_hat=q if q < 1.0 else None,
                      anchor=j, checked_through=j, violations=state.violations + (j,))
    if orbit.step_dists[j] == 0:
        new = replace(new, phase=FIXED_POINT, anchor=j, q_hat=0.0, exact_fixed_point=True)
    return new


def run_monitor(orbit, m):
    """Replay the monitor over a stored orbit; returns the state trajectory."""
    if m < 1:
        raise WindowError("window m must be at least 1")
    state = MonitorState(m)
    traj = [state]
    for j in range(2, orbit.last + 1):
        state = monitor_step(state, orbit, j)
        traj.append(state)
        if state.phase == FIXED_POINT:
            break
    if orbit.exact_fixed_point and state.phase != FIXED_POINT:
        state = replace(state, phase=FIXED_POINT, anchor=orbit.last, q_hat=0.0,
                        checked_through=orbit.last, exact_fixed_point=True)
        traj.append(state)
    return traj


@dataclass(frozen=True)
class Certificate:
    anchor: int
    m: int
    q_hat: float
    bound: float
    status: str
    checked_through: Optional[int]
    theorem_basis: str
    hypothesis_flags: dict
    violated_at: Optional[int] = None

    def to_json(self):
        return {
            "anchor": self.anchor,
            "m": self.m,
            "q_hat": self.q_hat,
            "bound": self.bound,
            "status": self.status,
            "checked_through": self.checked_through,
            "violated_at": self.violated_at,
            "theorem_basis": self.theorem_basis,
            "hypothesis_flags": self.hypothesis_flags,
        }


def _is_final(tail, q_hat, anchor):
    # the monitored condition cannot fail once a verified uniform Q sits below q_hat
    return (tail is not None and tail.verified and tail.N <= anchor
            and tail.Q <= q_hat + SLACK)


def certificate(state, orbit, tail=None):
    """Certificate for the monitor's current anchor.

    Status is ``valid-so-far`` (through ``checked_through``) unless a
    verified :class:`TailBound` with ``Q <= q_hat`` is supplied, in which
    case the monitored condition cannot fail and the status is ``final``.
    """
    _refuse_rectangular(orbit)
    flags = dict(orbit.hypotheses)
    if state.phase == FIXED_POINT:
        return Certificate(state.anchor, state.m, 0.0, 0.0, "final", state.checked_through,
                           "exact fixed point of the induced map reached", flags)
    if state.phase != CERTIFIED:
        raise StateError(f"no certificate in phase {state.phase}")
    q, n = state.q_hat, state.anchor
    bound = q / (1.0 - q) * float(orbit.step_dists[n])
    if _is_final(tail, q, n):
        return Certificate(n, state.m, q, bound, "final", state.checked_through,
                           f"uniform-tail regime with Q={tail.Q!r} <= q_hat", flags)
    return Certificate(n, state.m, q, bound, "valid-so-far", state.checked_through,
                       "conditional a posteriori estimate, monitored online", flags)


def certify_at(orbit, n, m, tail=None):
    """Anchor a certificate at step ``n`` and monitor it to the end of the orbit."""
    _refuse_rectangular(orbit)
    q = window_max(orbit, n, m)
    if q >= 1.0:
        raise HypothesisError(f"window maximum {q!r} >= 1 at n={n}; orbit not contracting")
    state = MonitorState(m, CERTIFIED, q, n, n)
    for j in range(n + 1, orbit.last + 1):
        if orbit.step_dists[j - 1] == 0:
            break
        if observed_ratio(orbit, j) > q + SLACK:
            bound = q / (1.0 - q) * float(orbit.step_dists[n])
            return Certificate(n, m, q, bound, "violated-at", j - 1,
                               "conditional a posteriori estimate, monitored online",
                               dict(orbit.hypotheses), violated_at=j)
        state = replace(state, checked_through=j)
    return certificate(state, orbit, tail)


def true_distance_to_limit(orbit, z_star):
    return np.array([orbit.space.distance(z, z_star) for z in orbit.zs])
