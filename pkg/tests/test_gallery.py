import math

import numpy as np
import pytest

from fixcert.errors import DomainError
from fixcert.functions import GridFunc, PolyFunc, sup_distance
from fixcert.gallery import (MAX_FACTORIAL_N, affine_example, affine_oracle, discrete_counterexample,
                             example_names, get_example, sampled_lipschitz, scalar_examples,
                             volterra_apply, volterra_norm_check, volterra_oracle)
from fixcert.picard import iterate

from oracles import affine_closed_form, volterra_closed_form


class TestVolterraApply:
    def test_constant(self):
        assert volterra_apply(PolyFunc([1.0])) == PolyFunc([0, 1.0])

    def test_linear(self):
        assert volterra_apply(PolyFunc([0, 1.0])) == PolyFunc([0, 0, 0.5])

    def test_linearity(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            p, q = PolyFunc(rng.normal(size=4)), PolyFunc(rng.normal(size=6))
            a = float(rng.normal())
            lhs = volterra_apply(p + q * a)
            rhs = volterra_apply(p) + volterra_apply(q) * a
            assert sup_distance(lhs, rhs) < 1e-13

    def test_grid_quadrature_error_is_second_order(self):
        errs = []
        for n in (11, 21, 41):
            g = GridFunc.from_callable(np.cos, n)
            exact = GridFunc.from_callable(np.sin, n)
            errs.append(sup_distance(volterra_apply(g), exact))
        assert errs[0] / errs[1] == pytest.approx(4, rel=0.05)
        assert errs[1] / errs[2] == pytest.approx(4, rel=0.05)

    def test_rejects_other_types(self):
        with pytest.raises(DomainError):
            volterra_apply(3.0)


class TestNormCheck:
    def test_constant_one_attains_half(self):
        res = volterra_norm_check([PolyFunc([1.0])])
        assert res.max_ratio == 0.5 and res.passed

    def test_identity_gives_sixth(self):
        res = volterra_norm_check([PolyFunc([0, 1.0])])
        assert res.ratios == (pytest.approx(1 / 6, rel=1e-14),)

    def test_zero_skipped(self):
        res = volterra_norm_check([PolyFunc([0.0]), PolyFunc([0.0, 0.0])])
        assert res.n_skipped == 2 and res.n_checked == 0


class TestOracles:
    @pytest.mark.parametrize("n", [1, 3, 10, 18])
    def test_volterra_matches_exact_rationals(self, n):
        step, ratio, dist = volterra_oracle(n)
        ostep, oratio, odist = volterra_closed_form(n)
        assert step == pytest.approx(ostep, rel=1e-15)
        assert dist == pytest.approx(odist, rel=1e-15)
        if n == 1:
            assert ratio is None and oratio is None
        else:
            assert ratio == pytest.approx(oratio, rel=1e-15)

    def test_volterra_refuses_large_and_small(self):
        with pytest.raises(DomainError):
            volterra_oracle(MAX_FACTORIAL_N + 1)
        with pytest.raises(DomainError):
            volterra_oracle(0)

    def test_volterra_orbit_matches_oracle(self):
        from fixcert.gallery import volterra_example
        ex = volterra_example()
        orbit = iterate(ex.S, ex.T, ex.x0, max_iters=10)
        for n in range(1, 11):
            c = orbit.zs[n].coef
            assert c.size == n + 2 and not c[:-1].any()
            assert c[-1] == pytest.approx(1 / math.factorial(n + 1), rel=1e-14)
            assert orbit.step_dists[n] == pytest.approx(n / math.factorial(n + 1), rel=1e-12)

    @pytest.mark.parametrize("n", [1, 2, 5, 12])
    def test_affine(self, n):
        step, ratio, dist = affine_oracle(n)
        z, zs = affine_closed_form(n)
        zp, _ = affine_closed_form(n - 1)
        dx = [float(a - b) for a, b in zip(z, zp)]
        assert step == pytest.approx(math.hypot(*dx), rel=1e-14)
        assert dist == pytest.approx(math.hypot(*[float(a - b) for a, b in zip(z, zs)]), rel=1e-14)

    def test_affine_fixed_point(self):
        ex = affine_example()
        assert np.array_equal(ex.S(ex.u), ex.u)
        assert ex.u.tolist() == [4.0, 8.0] and ex.z_star.tolist() == [4.0, 4.0]


class TestScalarExamples:
    def test_quadratic(self):
        ex = get_example("scalar-quadratic")
        assert ex.S(0.125) == pytest.approx(1 / 72, rel=1e-15)
        L = sampled_lipschitz(ex.S.apply, *ex.interval)
        assert 0.209 < L <= 0.21

    def test_radial_orbit(self):
        ex = get_example("scalar-radial")
        orbit = iterate(ex.S, ex.T, ex.x0, max_iters=3)
        assert orbit.xs == [1.0, 0.25, pytest.approx(0.1), pytest.approx(1 / 22)]
        assert sampled_lipschitz(ex.S.apply, *ex.interval) <= 0.5

    def test_aux_ratio(self):
        ex = get_example("aux-eighth")
        orbit = iterate(ex.S, ex.T, ex.x0, max_iters=8)
        r = orbit.ratios[2:]
        assert np.all(r == 0.125)

    def test_all_scalar_orbits_respect_Q(self):
        for ex in scalar_examples().values():
            orbit = iterate(ex.S, ex.T, ex.x0, max_iters=10)
            r = orbit.ratios[2:]
            assert np.all(r[~np.isnan(r)] <= ex.Q + 1e-12), ex.name


def test_discrete_counterexample():
    ex = discrete_counterexample()
    assert [x for x in (0, 1) if ex.S(x) == x] == [0, 1]
    assert ex.T(0) == ex.T(1)


def test_registry():
    names = example_names()
    assert {"volterra", "affine-r2", "scalar-quadratic", "scalar-radial", "aux-eighth"} <= set(names)
    with pytest.raises(KeyError):
        get_example("nope")
