import json
import math

import numpy as np
import pytest

from fixcert.errors import DomainError, FormatError
from fixcert.functions import GridFunc, PolyFunc, sup_distance
from fixcert.metric import (FiniteMetric, discrete_space, distance, euclidean, real_line,
                            report_json, validate, validate_metric, validate_rectangular)

from oracles import quadrilateral_scan, triangle_scan


def test_discrete_distance():
    X = discrete_space(2)
    assert distance(X, 0, 1) == 1
    assert distance(X, 1, 1) == 0


def test_point_outside_carrier():
    with pytest.raises(DomainError):
        distance(discrete_space(2), 0, 5)
    with pytest.raises(DomainError):
        real_line(0.0, 1.0)(0.5, 2.0)


def test_euclidean_distance():
    assert distance(euclidean(2), np.zeros(2), np.ones(2)) == pytest.approx(math.sqrt(2), rel=1e-15)


def test_path_metric_is_valid():
    fm = FiniteMetric([[0, 1, 2], [1, 0, 1], [2, 1, 0]])
    assert validate_metric(fm) == []


def test_triangle_violation_reported():
    fm = FiniteMetric([[0, 1, 5], [1, 0, 1], [5, 1, 0]])
    (v,) = validate_metric(fm)
    assert v.axiom == "triangle"
    assert v.points == (0, 1, 2)
    assert (v.lhs, v.rhs) == (5.0, 2.0)


def test_report_json_shape():
    fm = FiniteMetric([[0, 1, 5], [1, 0, 1], [5, 1, 0]])
    doc = report_json(validate_metric(fm))
    assert doc == [{"axiom": "triangle", "witness-points": [0, 1, 2], "lhs": 5.0, "rhs": 2.0}]
    json.dumps(doc)


def test_asymmetry_and_zero_off_diagonal_are_reported_not_repaired():
    fm = FiniteMetric([[0, 1, 0], [2, 0, 1], [0, 1, 0]])
    axioms = {v.axiom for v in validate_metric(fm)}
    assert {"symmetry", "separation"} <= axioms
    assert fm.dist[0, 1] == 1 and fm.dist[1, 0] == 2


@pytest.mark.parametrize("bad", [
    [[0, 1], [1, 0], [1, 1]],
    [[0, -1], [-1, 0]],
    [[0, float("nan")], [1, 0]],
    [["a", 1], [1, 0]],
])
def test_format_errors(bad):
    with pytest.raises(FormatError):
        FiniteMetric(bad)


def test_random_matrices_match_exhaustive_triangle_scan():
    rng = np.random.default_rng(42)
    for _ in range(100):
        a = rng.random((6, 6))
        a = (a + a.T) / 2
        np.fill_diagonal(a, 0)
        fm = FiniteMetric(a)
        got = {v.points for v in validate_metric(fm) if v.axiom == "triangle"}
        assert got == triangle_scan(a.tolist())


def test_ordinary_metric_is_rectangular():
    rng = np.random.default_rng(1)
    for _ in range(20):
        fm = FiniteMetric.from_coordinates(rng.random((6, 2)))
        assert validate_metric(fm) == []
        assert validate_rectangular(fm) == []


def test_rectangular_but_not_ordinary():
    # d(0,1) = 3 breaks the triangle through 2, every 3-edge path is >= 3
    d = [[0, 3, 1, 2], [3, 0, 1, 2], [1, 1, 0, 2], [2, 2, 2, 0]]
    fm = FiniteMetric(d, kind="rectangular")
    assert validate(fm) == []
    assert any(v.axiom == "triangle" for v in validate_metric(fm))


def test_four_point_quadrilateral_violation():
    d = np.ones((4, 4))
    np.fill_diagonal(d, 0)
    d[0, 3] = d[3, 0] = 10
    fm = FiniteMetric(d, kind="rectangular")
    got = {v.points for v in validate_rectangular(fm)}
    assert got == quadrilateral_scan(d.tolist()) == {(0, 1, 2, 3), (0, 2, 1, 3)}


def test_single_point_is_vacuously_rectangular():
    assert validate_rectangular(FiniteMetric([[0]], kind="rectangular")) == []


def test_json_round_trip(tmp_path):
    p = tmp_path / "m.json"
    p.write_text(json.dumps({"kind": "rectangular", "dist": [[0, 2], [2, 0]]}))
    fm = FiniteMetric.load(p)
    assert fm.kind == "rectangular" and fm.n_points == 2
    assert FiniteMetric.from_json(fm.to_json()).dist.tolist() == [[0, 2], [2, 0]]


def test_json_malformed(tmp_path):
    p = tmp_path / "m.json"
    p.write_text("{not json")
    with pytest.raises(FormatError):
        FiniteMetric.load(p)
    with pytest.raises(FormatError):
        FiniteMetric.from_json({"kind": "weird", "dist": [[0]]})


class TestSupDistance:
    def test_t_vs_half_t_squared(self):
        assert sup_distance(PolyFunc([0, 1]), PolyFunc([0, 0, 0.5])) == 0.5

    def test_identity(self):
        p = PolyFunc([1, -2, 3])
        assert sup_distance(p, p) == 0

    def test_third_step(self):
        assert sup_distance(PolyFunc([0, 0, 0.5]), PolyFunc([0, 0, 0, 1 / 6])) == pytest.approx(1 / 3, rel=1e-15)

    def test_interior_maximum_is_exact(self):
        # 4 t (1 - t) peaks at t = 1/2 with value 1
        assert sup_distance(PolyFunc([0, 4, -4]), PolyFunc([0])) == pytest.approx(1.0, rel=1e-14)
        # peak at t = 1/3 is off every dyadic grid
        p = PolyFunc([0, 1, -2, 1])  # t (1 - t)^2
        assert sup_distance(p, PolyFunc([0])) == pytest.approx(4 / 27, rel=1e-14)

    def test_grid(self):
        a = GridFunc([0, 1, 2])
        b = GridFunc([0, 0.5, 0])
        assert sup_distance(a, b) == 2

    def test_mismatched_grid(self):
        with pytest.raises(DomainError):
            sup_distance(GridFunc([0, 1]), GridFunc([0, 1, 2]))
        with pytest.raises(DomainError):
            sup_distance(GridFunc([0, 1]), PolyFunc([1]))
