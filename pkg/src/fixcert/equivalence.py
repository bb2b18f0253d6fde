"""Brute-force checks of the class equivalences on finite instances.

A finite instance is a distance matrix plus lookup tables for ``T`` and
``S``. On such an instance every class inequality can be checked on all
pairs, so the control-transfer constructions (alpha -> beta and back)
can be verified exhaustively.
"""

import json
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional

import numpy as np

from .errors import ControlError, FormatError, NonInjectiveError
from .mappings import (NO_SAMPLES, AuxiliaryMap, ControlAlpha, ControlBeta, SelfMap,
                       all_pairs, check_geraghty, check_injective, check_kannan_geraghty,
                       check_weakly_contractive, check_weakly_kannan, constant_alpha,
                       constant_beta)
from .metric import FiniteMetric, validate


@dataclass(frozen=True)
class TableBeta(ControlBeta):
    """Geraghty control stored as a table over realized distances.

    ``mode="below"`` evaluates off-table abscissae at the largest entry
    ``<= t`` (the smallest entry for ``t`` below the table).
    ``mode="tail"`` evaluates at the smallest entry ``>= t`` (the last
    entry beyond the table), which keeps a tail-sup non-increasing.
    """

    abscissae: tuple = ()
    values: tuple = ()
    mode: str = "below"

    @property
    def vacuous(self):
        return not self.abscissae


def _lookup(absc, vals, mode):
    def beta(t):
        if not absc:
            return 0.0
        t = float(t)
        if mode == "below":
            i = bisect_right(absc, t) - 1
            return vals[max(i, 0)]
        i = bisect_left(absc, t)
        return vals[min(i, len(vals) - 1)]
    return beta


def table_beta(absc, vals, mode="below", tag="table", nondecreasing=None):
    absc, vals = tuple(float(a) for a in absc), tuple(float(v) for v in vals)
    return TableBeta(_lookup(absc, vals, mode), tag=tag, nondecreasing=nondecreasing,
                     abscissae=absc, values=vals, mode=mode)


class FiniteInstance:
    """Finite metric space with table-defined ``T`` and ``S``.

    Points are the indices ``0 .. n-1``; ``T[i]`` and ``S[i]`` are indices.
    Optional controls ride along for the CLI and file round trips.
    """

    def __init__(self, metric, T, S, x0=0, alpha=None, beta=None, name="instance"):
        self.metric = metric
        n = metric.n_points
        self.T = tuple(int(t) for t in T)
        self.S = tuple(int(s) for s in S)
        if len(self.T) != n or len(self.S) != n:
            raise FormatError(f"T and S tables need {n} entries")
        for tab, label in ((self.T, "T"), (self.S, "S")):
            if any(not 0 <= v < n for v in tab):
                raise FormatError(f"{label} table maps outside the carrier")
        self.x0 = int(x0)
        self.alpha = alpha
        self.beta = beta
        self.name = name
        # a constant alpha is a contraction constant on the image
        self.uniform_q = None
        self.space = metric.space()

    @property
    def n_points(self):
        return self.metric.n_points

    @property
    def points(self):
        return list(range(self.n_points))

    @property
    def injective(self):
        return len(set(self.T)) == len(self.T)

    def T_map(self):
        tab = self.T
        return AuxiliaryMap(lambda x: tab[x], name="T-table", injective=self.injective)

    def S_map(self):
        tab = self.S
        return SelfMap(lambda x: tab[x], self.space, name="S-table")

    def pairs(self):
        return all_pairs(self.points)

    def image_points(self):
        return sorted(set(self.T))

    def fixed_points(self):
        return [x for x in self.points if self.S[x] == x]

    @classmethod
    def from_json(cls, doc, name="instance"):
        if not isinstance(doc, dict):
            raise FormatError("instance document must be a JSON object")
        metric = FiniteMetric.from_json(doc)
        n = metric.n_points
        try:
            T = doc.get("T", list(range(n)))
            S = doc["S"]
        except KeyError:
            raise FormatError("instance document needs an 'S' table") from None
        controls = doc.get("controls", {}) or {}
        alpha = _alpha_from_doc(controls.get("alpha"))
        beta = _beta_from_doc(controls.get("beta"))
        inst = cls(metric, T, S, doc.get("x0", 0), alpha, beta, name=doc.get("name", name))
        if isinstance(controls.get("alpha"), (int, float)):
            inst.uniform_q = float(controls["alpha"])
        return inst

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise FormatError(f"{path}: {exc}") from None
        return cls.from_json(doc, name=str(path))

    def to_json(self):
        doc = self.metric.to_json()
        doc.update({"T": list(self.T), "S": list(self.S), "x0": self.x0})
        return doc


def _alpha_from_doc(doc):
    if doc is None:
        return None
    if isinstance(doc, (int, float)):
        return constant_alpha(doc)
    a = np.asarray(doc, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise FormatError("alpha control must be a number or a square matrix")
    return ControlAlpha(lambda u, v: float(a[u, v]), tag="matrix")


def _beta_from_doc(doc):
    if doc is None:
        return None
    if isinstance(doc, (int, float)):
        return constant_beta(doc)
    if isinstance(doc, dict) and "t" in doc and "value" in doc:
        t, v = list(doc["t"]), list(doc["value"])
        if len(t) != len(v) or sorted(t) != t:
            raise FormatError("beta table needs sorted 't' and matching 'value'")
        return table_beta(t, v, mode=doc.get("mode", "below"))
    raise FormatError("beta control must be a number or {'t': [...], 'value': [...]}")


def distance_profile(inst):
    """Sorted multiset of distances between distinct image points."""
    d = inst.metric.dist
    img = inst.image_points()
    return tuple(sorted(float(d[u, v]) for u, v in combinations(img, 2)))


def beta_from_alpha(inst, alpha):
    """``beta(t) = max{alpha(u, v) : d(u, v) = t}`` over image pairs.

    Off the realized profile beta is a right-open step function (see
    :class:`TableBeta`, ``mode="below"``). An instance with a single image
    point yields a vacuous table.
    """
    d = inst.metric.dist
    best = {}
    for u, v in combinations(inst.image_points(), 2):
        t = float(d[u, v])
        for a, b in ((u, v), (v, u)):
            val = float(alpha(a, b))
            if not 0.0 <= val < 1.0:
                raise ControlError(f"alpha({a}, {b}) = {val!r} outside [0, 1)", pair=(a, b))
            best[t] = max(best.get(t, 0.0), val)
    absc = sorted(best)
    return table_beta(absc, [best[t] for t in absc], mode="below", tag="beta-from-alpha")


def alpha_from_beta(beta, space):
    """``alpha(u, v) = beta(d(u, v))``."""
    return ControlAlpha(lambda u, v: float(beta(space.distance(u, v))), tag="alpha-from-beta")


@dataclass(frozen=True)
class BetaLift:
    beta: Optional[TableBeta]
    evidence: tuple
    ratios: tuple

    @property
    def contractive(self):
        return not self.evidence


def monotone_beta_from_map(T, f, pairs, space):
    """Tail-sup control ``beta(t) = sup{ratio : d(Tx, Ty) >= t}`` from samples.

    ``ratio`` is ``d(Tfx, Tfy) / d(Tx, Ty)``. The table is non-increasing by
    construction and ``beta(0)`` is the overall sample sup. Sampled ratios
    ``>= 1`` are returned as evidence and no control is built.
    """
    rows = []
    evidence = []
    for x, y in pairs:
        Tx, Ty = T(x), T(y)
        t = space.distance(Tx, Ty)
        if t == 0:
            continue
        ratio = space.distance(T(f(x)), T(f(y))) / t
        rows.append((t, ratio, x, y))
        if ratio >= 1.0:
            evidence.append((x, y, ratio))
    ratios = tuple((t, r) for t, r, _, _ in rows)
    if evidence or not rows:
        return BetaLift(None, tuple(evidence), ratios)
    by_t = {}
    for t, r, _, _ in rows:
        by_t[t] = max(by_t.get(t, 0.0), r)
    absc = sorted(by_t)
    vals = [by_t[t] for t in absc]
    for i in range(len(vals) - 2, -1, -1):
        vals[i] = max(vals[i], vals[i + 1])
    return BetaLift(table_beta(absc, vals, mode="tail", tag="tail-sup", nondecreasing=False),
                    (), ratios)


@dataclass(frozen=True)
class DeltaSeries:
    indices: tuple
    d: tuple
    delta: tuple
    skipped: tuple
    diagnostic: dict = field(default_factory=dict)


def delta_series(T, f, xs, ys, space, eps_grid=()):
    """``d_n = d(Tx_n, Ty_n)`` and ``Delta_n = d(Tfx_n, Tfy_n) / d_n``.

    Indices with coincident images are skipped and listed. For each ``eps``
    in ``eps_grid`` the diagnostic records ``max{d_n : Delta_n >= 1 - eps}``
    (or ``NO_SAMPLES``).
    """
    idx, ds, deltas, skipped = [], [], [], []
    for n, (x, y) in enumerate(zip(xs, ys)):
        dn = space.distance(T(x), T(y))
        if dn == 0:
            skipped.append(n)
            continue
        idx.append(n)
        ds.append(dn)
        deltas.append(space.distance(T(f(x)), T(f(y))) / dn)
    diag = {}
    for eps in eps_grid:
        hits = [dn for dn, dl in zip(ds, deltas) if dl >= 1.0 - eps]
        diag[eps] = max(hits) if hits else NO_SAMPLES
    return DeltaSeries(tuple(idx), tuple(ds), tuple(deltas), tuple(skipped), diag)


def diagonal_delta(orbit, T, S):
    """Delta along ``y_k = x_{k-1}``; entry ``k-1`` corresponds to ``r_{k+1}``."""
    xs = orbit.xs
    return delta_series(T, S, xs[1:-1], xs[:-2], orbit.space)


DIRECTIONS = ("(1)=>(3)", "(3)=>(1)", "(2)=>(4)", "(4)=>(2)")


@dataclass
class EquivalenceReport:
    name: str
    in_class: dict
    directions: dict
    seed: Optional[int] = None

    @property
    def failures(self):
        return [k for k, v in self.directions.items() if v == "fail"]

    @property
    def passed(self):
        return not self.failures

    def to_json(self):
        return {"name": self.name, "seed": self.seed, "in_class": self.in_class,
                "directions": self.directions}


def verify_pairwise_equivalence(inst, alpha, alpha_kannan, beta, beta_kannan, seed=None):
    """Run the four transfer directions on one finite instance.

    Each direction starts from a control under which the instance is in
    the source class, builds the transferred control, and checks the
    target class. A direction whose source check fails is ``vacuous``; a
    target failure is ``fail`` and points at a bug in the construction.
    """
    T, S = inst.T_map(), inst.S_map()
    collisions = check_injective(T, inst.points)
    if collisions:
        raise NonInjectiveError(
            "T is not injective on this instance; see injectivity_counterexample()",
            collisions)
    pairs = inst.pairs()
    space = inst.space

    def run(source_ok, target):
        if not source_ok:
            return "vacuous"
        return "pass" if not target() else "fail"

    in1 = not check_weakly_contractive(T, S, alpha, pairs)
    in2 = not check_weakly_kannan(T, S, alpha_kannan, pairs)
    in3 = not check_geraghty(T, S, beta, pairs)
    in4 = not check_kannan_geraghty(T, S, beta_kannan, pairs)
    dirs = {
        "(1)=>(3)": run(in1, lambda: check_geraghty(T, S, beta_from_alpha(inst, alpha), pairs)),
        "(3)=>(1)": run(in3, lambda: check_weakly_contractive(
            T, S, alpha_from_beta(beta, space), pairs)),
        "(2)=>(4)": run(in2, lambda: check_kannan_geraghty(
            T, S, beta_from_alpha(inst, alpha_kannan), pairs)),
        "(4)=>(2)": run(in4, lambda: check_weakly_kannan(
            T, S, alpha_from_beta(beta_kannan, space), pairs)),
    }
    in_class = {"(1)": in1, "(2)": in2, "(3)": in3, "(4)": in4}
    return EquivalenceReport(inst.name, in_class, dirs, seed)


# random instance generation

def _path_metric(rng, n):
    # integer weights make repeated distances common, which exercises the
    # max over equal-distance pairs in beta_from_alpha
    w = rng.integers(1, 4, size=(n, n)).astype(float)
    w = np.triu(w, 1) + np.triu(w, 1).T
    np.fill_diagonal(w, 0.0)
    for k in range(n):
        w = np.minimum(w, w[:, [k]] + w[[k], :])
    return w


def random_metric(rng, n=5):
    """Euclidean points in the unit square or a shortest-path metric."""
    if rng.random() < 0.5:
        return FiniteMetric.from_coordinates(rng.random((n, 2)))
    return FiniteMetric(_path_metric(rng, n))


def tight_contraction(d, F):
    """Matrix of ``d(Fu, Fv) / d(u, v)``; zero on the diagonal."""
    n = d.shape[0]
    out = np.zeros((n, n))
    for u, v in combinations(range(n), 2):
        out[u, v] = out[v, u] = d[F[u], F[v]] / d[u, v]
    return out


def tight_kannan(d, F):
    """Matrix of ``2 d(Fu, Fv) / (d(u, Fu) + d(v, Fv))``; inf where undefined."""
    n = d.shape[0]
    out = np.zeros((n, n))
    for u, v in combinations(range(n), 2):
        lhs = d[F[u], F[v]]
        den = d[u, F[u]] + d[v, F[v]]
        out[u, v] = out[v, u] = (2 * lhs / den) if den > 0 else (0.0 if lhs == 0 else np.inf)
    return out


def _random_contraction(rng, d, want_kannan, attempts=500):
    """Non-constant map onto 2 or 3 random targets that strictly contracts; None if not found."""
    n = d.shape[0]
    for _ in range(attempts):
        size = int(rng.integers(2, 4))
        targets = rng.choice(n, size=size, replace=False)
        F = tuple(int(t) for t in rng.choice(targets, size=n))
        if len(set(F)) == 1:
            continue
        if tight_contraction(d, F).max() >= 1 - 1e-9:
            continue
        if want_kannan and tight_kannan(d, F).max() >= 1 - 1e-9:
            continue
        return F
    return None


def _padded(rng, tight):
    # random headroom between the tight value and 1, kept strictly below 1
    return tight + rng.random(tight.shape) * (1.0 - tight) * 0.5


METRIC_REDRAWS = 20


def random_instance(rng, n=5, name="random"):
    """A random finite instance whose induced map contracts the image.

    ``T`` is a random permutation; the induced map ``F`` on the image is
    drawn by rejection until it is a strict contraction, and ``S`` is
    recovered as ``T^{-1} F T``. ``F`` is also required to satisfy the Kannan
    inequality strictly, and the controls are the tight ratios plus random
    headroom, so the instance sits in all four classes.
    """
    for _ in range(METRIC_REDRAWS):
        metric = random_metric(rng, n)
        d = metric.dist
        F = _random_contraction(rng, d, want_kannan=True)
        if F is not None:
            break
    else:
        F = tuple([int(rng.integers(n))] * n)
    perm = rng.permutation(n)
    T = tuple(int(t) for t in perm)
    Tinv = np.argsort(perm)
    S = tuple(int(Tinv[F[T[x]]]) for x in range(n))

    tc = tight_contraction(d, F)
    a1 = _padded(rng, tc)
    tk = tight_kannan(d, F)
    a2 = np.where(np.isfinite(tk) & (tk < 1.0), _padded(rng, np.minimum(tk, 1.0)),
                  rng.random(tk.shape))
    np.fill_diagonal(a1, 0.0)
    np.fill_diagonal(a2, 0.0)
    alpha = ControlAlpha(lambda u, v: float(a1[u, v]), tag="matrix")
    alpha_k = ControlAlpha(lambda u, v: float(a2[u, v]), tag="matrix")

    inst = FiniteInstance(metric, T, S, name=name)
    lift = monotone_beta_from_map(inst.T_map(), inst.S_map(), inst.pairs(), inst.space)
    beta = lift.beta if lift.beta is not None else constant_beta(0.0)
    # Kannan-Geraghty control: per-distance max of the tight Kannan ratio plus headroom
    by_t = {}
    for u, v in combinations(range(n), 2):
        t = float(d[u, v])
        val = float(tk[u, v]) if np.isfinite(tk[u, v]) else 1.0
        by_t[t] = max(by_t.get(t, 0.0), val)
    absc = sorted(by_t)
    vals = [min(v + rng.random() * (1.0 - v) * 0.5, 1.0 - 1e-9) if v < 1 else rng.random()
            for v in (by_t[t] for t in absc)]
    beta_k = table_beta(absc, vals, mode="below", tag="kannan-table")
    return inst, alpha, alpha_k, beta, beta_k


@dataclass(frozen=True)
class Counterexample:
    instance: FiniteInstance
    reports: dict
    fixed_points: tuple
    identity_T_report: tuple

    @property
    def inequalities_vacuous(self):
        return all(not r for r in self.reports.values())

    @property
    def verdict(self):
        return (f"{len(self.fixed_points)} fixed points, inequalities "
                f"{'vacuous' if self.inequalities_vacuous else 'not vacuous'}")

    def to_json(self):
        return {"fixed_points": list(self.fixed_points),
                "inequalities_hold": {k: not v for k, v in self.reports.items()},
                "identity_T_violations": len(self.identity_T_report),
                "verdict": self.verdict}


def injectivity_counterexample():
    """Constant ``T`` on a two-point discrete space with ``S = id``.

    Every class inequality reads ``0 <= 0`` under the zero control, yet
    ``S`` fixes both points. With ``T = id`` instead, the same ``S`` fails
    the weakly contractive check on the pair ``(0, 1)``.
    """
    metric = FiniteMetric([[0.0, 1.0], [1.0, 0.0]])
    inst = FiniteInstance(metric, T=(0, 0), S=(0, 1), name="injectivity-counterexample")
    T, S, pairs = inst.T_map(), inst.S_map(), inst.pairs()
    zero_a, zero_b = constant_alpha(0.0), constant_beta(0.0)
    reports = {
        "weakly-contractive": check_weakly_contractive(T, S, zero_a, pairs),
        "weakly-kannan": check_weakly_kannan(T, S, zero_a, pairs),
        "geraghty": check_geraghty(T, S, zero_b, pairs),
        "kannan-geraghty": check_kannan_geraghty(T, S, zero_b, pairs),
    }
    ident = FiniteInstance(metric, T=(0, 1), S=(0, 1))
    idrep = check_weakly_contractive(ident.T_map(), ident.S_map(), constant_alpha(0.999), pairs)
    return Counterexample(inst, reports, tuple(inst.fixed_points()), tuple(idrep))


@dataclass
class SuiteReport:
    master_seed: int
    seeds: list
    reports: list
    counterexample: Counterexample

    @property
    def instances(self):
        return len(self.reports)

    @property
    def failures(self):
        return [r for r in self.reports if not r.passed]

    @property
    def passed(self):
        return not self.failures and self.counterexample.inequalities_vacuous \
            and len(self.counterexample.fixed_points) == 2

    def to_json(self):
        counts = {k: {"pass": 0, "fail": 0, "vacuous": 0} for k in DIRECTIONS}
        for r in self.reports:
            for k, v in r.directions.items():
                counts[k][v] += 1
        return {
            "master_seed": self.master_seed,
            "instances": self.instances,
            "passes": self.instances - len(self.failures),
            "failures": [r.to_json() for r in self.failures],
            "directions": counts,
            "seeds": self.seeds,
            "injectivity_counterexample": self.counterexample.to_json(),
        }


def run_suite(seed=7, count=100, n_points=5):
    """Equivalence checks on ``count`` random instances plus the counterexample.

    Per-instance seeds are derived from the master seed, so any failing
    instance can be regenerated alone.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    seeds = [int(s) for s in np.random.SeedSequence(seed).generate_state(count)]
    reports = []
    for i, s in enumerate(seeds):
        rng = np.random.default_rng(s)
        inst, a, ak, b, bk = random_instance(rng, n_points, name=f"random-{i}")
        if validate(inst.metric):
            raise AssertionError(f"generator produced an invalid metric (seed {s})")
        reports.append(verify_pairwise_equivalence(inst, a, ak, b, bk, seed=s))
    return SuiteReport(seed, seeds, reports, injectivity_counterexample())
