import math

import numpy as np
import pytest

from sirswitch import (
    EnvParams,
    InvalidParameterError,
    ModelParams,
    NotApplicableError,
    Point,
    RegionKind,
    SwitchRates,
    choose_s_min,
    degeneracy_curve_residual,
    equilibrium,
    neighborhood,
    quadrangle_abcd,
    region_g,
    region_k,
    sample_region,
    triangle,
    write_polyline_csv,
)


def test_choose_s_min_values(params_p1):
    # bounds: 0.5*12.5/4.5 = 25/18 for both environments, halved
    s_min, m = choose_s_min(params_p1)
    assert s_min == pytest.approx(25.0 / 36.0, rel=1e-12)
    assert m == pytest.approx(3.125, rel=1e-12)


def test_choose_s_min_not_applicable(params_p5):
    with pytest.raises(NotApplicableError):
        choose_s_min(params_p5)


def test_s_min_vanishes_with_immunity_loss():
    # c -> 0 collapses the susceptible floor but it stays strictly positive
    prev = np.inf
    for c in (0.5, 1e-2, 1e-5, 1e-8):
        params = ModelParams(
            plus=EnvParams(0.04, 1.0, c),
            minus=EnvParams(0.02, 1.0, c),
            N=100.0,
            rates=SwitchRates(1.0, 1.0),
        )
        s_min, m = choose_s_min(params)
        assert 0.0 < s_min < prev
        assert m > 0.0
        prev = s_min
    assert prev < 1e-7


def test_quadrangle_vertices(params_p1):
    quad = quadrangle_abcd(params_p1)
    assert quad.kind is RegionKind.QUADRANGLE
    md = quad.metadata
    assert md["i_cap"] == pytest.approx(87.5, rel=1e-12)
    s_min = md["s_min"]
    expect = np.array(
        [(s_min, 0.0), (s_min, 87.5), (12.5, 87.5), (100.0, 0.0), (s_min, 0.0)]
    )
    assert np.allclose(quad.boundary, expect, atol=1e-12)
    # the upper-right vertex sits on the hypotenuse s + i = N
    assert 12.5 + 87.5 == params_p1.N


def test_quadrangle_membership(params_p1):
    quad = quadrangle_abcd(params_p1)
    assert quad.contains(Point(50.0, 10.0))
    assert quad.contains(Point(1.0, 1.0))
    assert quad.contains(Point(12.5, 87.5))
    assert not quad.contains(Point(0.5, 10.0))
    assert not quad.contains(Point(50.0, 88.0))
    assert not quad.contains(Point(99.0, 2.0))
    assert not quad.contains(Point(50.0, -1.0))


def test_region_g_metadata(params_p1):
    g = region_g(params_p1)
    assert g.kind is RegionKind.CURVE_BOUNDED_G
    md = g.metadata
    assert md["epsilon0"] == pytest.approx(5.0, rel=1e-12)
    assert md["knee_s"] == pytest.approx(50.0, rel=1e-12)
    # curve floor at the knee, value frozen after the first run
    assert md["i_min"] == pytest.approx(1.442136505549356, rel=1e-12)
    assert md["i_min"] == pytest.approx(
        md["epsilon0"] * math.exp(-md["k"] * (md["knee_s"] - md["s_min"])), rel=1e-14
    )


def test_region_g_membership(params_p1):
    g = region_g(params_p1)
    assert g.contains(Point(50.0, 10.0))
    assert g.contains(Point(90.0, 5.0))
    assert g.contains(equilibrium(params_p1.plus, params_p1.N))
    assert g.contains(equilibrium(params_p1.minus, params_p1.N))
    # below the exponential floor near the left edge, yet inside the quadrangle
    assert not g.contains(Point(1.0, 1.0))
    assert quadrangle_abcd(params_p1).contains(Point(1.0, 1.0))
    assert not g.contains(Point(99.0, 2.0))


def test_region_g_custom_epsilon(params_p1):
    g = region_g(params_p1, epsilon0=2.0)
    assert g.metadata["epsilon0"] == 2.0
    with pytest.raises(InvalidParameterError):
        region_g(params_p1, epsilon0=0.0)
    with pytest.raises(InvalidParameterError):
        region_g(params_p1, epsilon0=1000.0)


def test_region_g_not_applicable(params_p2):
    with pytest.raises(NotApplicableError):
        region_g(params_p2)


def test_region_k_falls_back_to_g(params_p1):
    # both systems endemic: the recurrence set is region G itself
    k = region_k(params_p1)
    g = region_g(params_p1)
    assert k.kind is RegionKind.CURVE_BOUNDED_G
    assert np.array_equal(k.boundary, g.boundary)
    assert k.metadata == g.metadata


def test_region_k_plus_only(params_p2):
    k = region_k(params_p2)
    assert k.kind is RegionKind.CURVE_BOUNDED_K
    md = k.metadata
    # values frozen after the first verified construction
    assert md["s_min"] == pytest.approx(0.6944444444444444, rel=1e-12)
    assert md["knee_s"] == pytest.approx(25.0, rel=1e-12)
    assert md["epsilon0"] == pytest.approx(3.888888888888889, rel=1e-12)
    assert md["i_min"] == pytest.approx(2.123764489202878, rel=1e-12)
    assert k.contains(equilibrium(params_p2.plus, params_p2.N))


def test_region_k_not_applicable(params_p3, params_p5):
    with pytest.raises(NotApplicableError):
        region_k(params_p3)
    with pytest.raises(NotApplicableError):
        region_k(params_p5)


def test_triangle_and_neighborhood():
    tri = triangle(100.0)
    assert tri.contains(Point(50.0, 49.0))
    assert not tri.contains(Point(50.0, 51.0))
    ball = neighborhood(Point(25.0, 25.0), 2.0)
    assert ball.contains(Point(25.0, 26.9))
    assert not ball.contains(Point(25.0, 27.1))
    with pytest.raises(InvalidParameterError):
        neighborhood(Point(0.0, 0.0), -1.0)


def test_degeneracy_residual_hand_value(params_p1):
    # at (50, 10): plus ds/dt = 0 and minus di-slope = 0, leaving -10*1
    assert degeneracy_curve_residual(params_p1, Point(50.0, 10.0)) == pytest.approx(
        -10.0, abs=1e-12
    )


def test_degeneracy_residual_vanishes_at_equilibria(params_p1):
    for env in (params_p1.plus, params_p1.minus):
        eq = equilibrium(env, params_p1.N)
        assert abs(degeneracy_curve_residual(params_p1, eq)) < 1e-12


def test_degeneracy_residual_proportional(params_p4, rng):
    # parallel fields: the residual vanishes identically
    for _ in range(50):
        s = 100.0 * rng.random()
        i = (100.0 - s) * rng.random()
        assert abs(degeneracy_curve_residual(params_p4, Point(s, i))) < 1e-9


def test_degeneracy_residual_antisymmetry(rng):
    # equal b/a ratios keep the labels stable under swapping, so the swap
    # is exactly the exchange of the two fields and flips the sign
    plus = EnvParams(0.04, 1.0, 0.5)
    minus = EnvParams(0.08, 2.0, 0.3)
    rates = SwitchRates(1.0, 1.0)
    fwd = ModelParams(plus=plus, minus=minus, N=100.0, rates=rates)
    rev = ModelParams(plus=minus, minus=plus, N=100.0, rates=rates)
    assert not fwd.relabeled and not rev.relabeled
    for _ in range(20):
        s = 100.0 * rng.random()
        i = (100.0 - s) * rng.random()
        a = degeneracy_curve_residual(fwd, Point(s, i))
        b = degeneracy_curve_residual(rev, Point(s, i))
        assert a == pytest.approx(-b, abs=1e-9)


def test_sample_region_members(params_p1):
    g = region_g(params_p1)
    pts = sample_region(g, 200, seed=3)
    assert pts.shape == (200, 2)
    for s, i in pts:
        assert g.contains(Point(s, i))
    again = sample_region(g, 200, seed=3)
    assert np.array_equal(pts, again)
    other = sample_region(g, 200, seed=4)
    assert not np.array_equal(pts, other)


def test_sample_region_neighborhood():
    ball = neighborhood(Point(25.0, 25.0), 2.0)
    pts = sample_region(ball, 500, seed=0)
    d = np.hypot(pts[:, 0] - 25.0, pts[:, 1] - 25.0)
    assert np.all(d <= 2.0 + 1e-12)


def test_polyline_csv_round_trip(params_p1, tmp_path):
    g = region_g(params_p1)
    path = tmp_path / "g.csv"
    write_polyline_csv(g, path)
    lines = path.read_text().strip().split("\n")
    assert lines[0] == "s,i"
    data = np.array([[float(x) for x in ln.split(",")] for ln in lines[1:]])
    assert np.array_equal(data, g.boundary)
