"""Worked examples with closed-form oracles.

Each registry entry bundles a selfmap ``S``, an auxiliary map ``T``, a
starting point and, where known, the image of the fixed point together
with the uniform ratio constant that makes the a priori tail bound apply.
"""

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

import numpy as np

from .errors import DomainError
from .functions import GridFunc, PolyFunc, sup_norm
from .mappings import AuxiliaryMap, ControlBeta, SelfMap, constant_beta, identity_map
from .metric import discrete_space, euclidean, real_line, sup_norm_space

MAX_FACTORIAL_N = 18


def volterra_apply(p):
    """``(Jp)(t) = integral_0^t p(s) ds``.

    Exact on polynomials: the coefficient of ``t^k`` moves to ``t^{k+1}``
    divided by ``k+1``. Grid functions use cumulative trapezoid quadrature,
    which carries an O(h^2) error.
    """
    if isinstance(p, PolyFunc):
        c = p.coef
        out = np.zeros(c.size + 1)
        out[1:] = c / np.arange(1, c.size + 1)
        return PolyFunc(out)
    if isinstance(p, GridFunc):
        v = p.values
        h = 1.0 / (v.size - 1)
        out = np.concatenate([[0.0], np.cumsum((v[1:] + v[:-1]) * (h / 2))])
        return GridFunc(out)
    raise DomainError(f"Volterra operator needs a PolyFunc or GridFunc, got {type(p).__name__}")


@dataclass(frozen=True)
class NormCheck:
    max_ratio: float
    n_checked: int
    n_skipped: int
    witness_ratio: float
    ratios: tuple

    @property
    def passed(self):
        return self.max_ratio <= 0.5 + 1e-12 and self.witness_ratio >= 0.49


def volterra_norm_check(polys):
    """Check ``||J^2 p|| <= ||p|| / 2`` on samples; zero inputs are skipped.

    The witness ``p = 1`` is always evaluated and must come close to 1/2.
    """
    ratios = []
    skipped = 0
    for p in polys:
        norm = sup_norm(p)
        if norm == 0:
            skipped += 1
            continue
        ratios.append(sup_norm(volterra_apply(volterra_apply(p))) / norm)
    one = PolyFunc([1.0])
    witness = sup_norm(volterra_apply(volterra_apply(one)))
    mx = max(ratios + [witness])
    return NormCheck(mx, len(ratios), skipped, witness, tuple(ratios))


def _check_factorial_range(n):
    if n < 1:
        raise DomainError("oracle index must be at least 1")
    if n > MAX_FACTORIAL_N:
        raise DomainError(f"oracle refuses n > {MAX_FACTORIAL_N}")


def volterra_oracle(n):
    """``(d(z_n, z_{n-1}), r_n, d(z_n, 0))`` for the orbit from ``x_0 = 1``.

    ``z_n = t^{n+1}/(n+1)!``; every difference is monotone on [0, 1] so
    each sup sits at ``t = 1``. ``r_1`` is undefined and returned as None.
    """
    _check_factorial_range(n)
    step = n / math.factorial(n + 1)
    ratio = n / (n * n - 1) if n >= 2 else None
    return step, ratio, 1.0 / math.factorial(n + 1)


@dataclass(frozen=True)
class Example:
    name: str
    S: SelfMap
    T: AuxiliaryMap
    x0: Any
    description: str = ""
    z_star: Any = None
    u: Any = None
    # uniform ratio constant on the image and the anchor it holds from
    Q: Optional[float] = None
    N: int = 1
    beta: Optional[ControlBeta] = None
    lipschitz: Optional[float] = None
    interval: Optional[tuple] = None
    oracle: Optional[Callable[[int], tuple]] = field(default=None, compare=False)


def volterra_example():
    J = AuxiliaryMap(volterra_apply, name="J",
                     # compact operator: neither flag can be honestly claimed
                     subsequentially_convergent=False, sequentially_convergent=False)
    S = SelfMap(volterra_apply, sup_norm_space(), name="J")
    return Example("volterra", S, J, PolyFunc([1.0]),
                   description="S = T = Volterra integration on C[0,1], x0 = 1",
                   z_star=PolyFunc([0.0]), u=PolyFunc([0.0]), Q=0.5, N=2,
                   beta=constant_beta(0.5), oracle=volterra_oracle)


AFFINE_T = np.diag([1.0, 0.5])
AFFINE_B = np.array([1.0, 2.0])


def affine_oracle(n):
    """``(d(z_n, z_{n-1}), r_n, d(z_n, z*))`` for the affine example."""
    if n < 1:
        raise DomainError("oracle index must be at least 1")
    step = 0.75 ** (n - 1) * math.sqrt(2.0)
    return step, (0.75 if n >= 2 else None), 0.75 ** n * 4.0 * math.sqrt(2.0)


def affine_example():
    T = AuxiliaryMap(lambda x: AFFINE_T @ np.asarray(x, float), name="diag(1,1/2)")
    S = SelfMap(lambda x: 0.75 * np.asarray(x, float) + AFFINE_B, euclidean(2), name="3/4 x + b")
    u = 4.0 * AFFINE_B
    return Example("affine-r2", S, T, np.zeros(2),
                   description="T = diag(1, 1/2), S x = 3/4 x + (1, 2) on R^2, x0 = 0",
                   z_star=AFFINE_T @ u, u=u, Q=0.75, N=1, beta=constant_beta(0.75),
                   oracle=affine_oracle)


def _quadratic(y):
    return y * y / (1.0 + y)


def _radial(t):
    return t / (2.0 * (1.0 + t))


def sampled_lipschitz(f, lo, hi, n=100001):
    """Largest difference quotient of ``f`` over adjacent nodes of a uniform grid."""
    x = np.linspace(lo, hi, n)
    y = f(x)
    return float(np.max(np.abs(np.diff(y)) / np.diff(x)))


def scalar_examples():
    """The three scalar maps, keyed by registry name."""
    eighth = real_line(0.0, 1.0, closed_hi=False)
    q = SelfMap(_quadratic, real_line(0.0, 0.125), name="y^2/(1+y)")
    r = SelfMap(_radial, real_line(0.0), name="t/(2(1+t))")
    c = SelfMap(lambda x: x / 8.0, eighth, name="x/8")
    return {
        "scalar-quadratic": Example("scalar-quadratic", q, identity_map(), 0.125,
                               description="f(y) = y^2/(1+y) on [0, 1/8]",
                               z_star=0.0, u=0.0, Q=0.21, lipschitz=0.21,
                               interval=(0.0, 0.125), beta=constant_beta(0.21)),
        "scalar-radial": Example("scalar-radial", r, identity_map(), 1.0,
                               description="f(t) = t/(2(1+t)) on [0, inf)",
                               z_star=0.0, u=0.0, Q=0.5, lipschitz=0.5,
                               interval=(0.0, 10.0), beta=constant_beta(0.5)),
        "aux-eighth": Example("aux-eighth", c, AuxiliaryMap(lambda x: x / 8.0, name="x/8"), 0.5,
                            description="T(x) = x/8 on [0, 1), S = T",
                            z_star=0.0, u=0.0, Q=0.125, lipschitz=0.125,
                            interval=(0.0, 1.0), beta=constant_beta(0.125)),
    }


def discrete_counterexample():
    """Two-point discrete space, constant ``T``, identity ``S``."""
    X = discrete_space(2)
    T = AuxiliaryMap(lambda x: 0, name="const 0", injective=False)
    S = SelfMap(lambda x: x, X, name="id")
    return Example("discrete-counterexample", S, T, 0,
                   description="X = {0, 1} discrete, T = 0, S = id; two fixed points")


_BUILDERS = {
    "volterra": volterra_example,
    "affine-r2": affine_example,
    "discrete-counterexample": discrete_counterexample,
}


def example_names():
    return sorted(list(_BUILDERS) + list(scalar_examples()))


def get_example(name):
    if name in _BUILDERS:
        return _BUILDERS[name]()
    scal = scalar_examples()
    if name in scal:
        return scal[name]
    raise KeyError(f"unknown example {name!r}; known: {', '.join(example_names())}")
