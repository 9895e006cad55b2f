import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ehgeom.ambient import christoffels_second, metric
from ehgeom.curves import CircleCurve, RawCurve, arc_length_reparametrize
from ehgeom.hypersurface import (connection, curvature, embed, frame, induced_metric,
                                 scalar_curvature_u1, second_form, unit_normal)
from ehgeom.oracle import (fd_partial, fd_pullback, fd_ricci_from_metric,
                           fd_shape_operator)
from ehgeom.specfun import DomainError

SQ5 = math.sqrt(5.0)


def ellipse():
    raw = RawCurve(f=lambda x: complex(2 * math.cos(x), math.sin(x)),
                   df=lambda x: complex(-2 * math.sin(x), math.cos(x)),
                   ddf=lambda x: complex(-2 * math.cos(x), -math.sin(x)),
                   lo=0.0, hi=2 * math.pi, closed=True)
    return arc_length_reparametrize(raw)


CURVES = {"unit": CircleCurve(1.0), "r2": CircleCurve(2.0), "ellipse": ellipse()}
chart = st.tuples(st.floats(0.0, 9.0), st.floats(0.2, 3.0), st.floats(0.0, 6.28))
t_val = st.sampled_from([0.5, 1.0, 2.0])
curve_key = st.sampled_from(sorted(CURVES))


def chart_metric(curve, t):
    return lambda q: induced_metric(curve, t, q[0], q[1]).matrix()


def test_embed_unit_circle():
    assert np.allclose(embed(CURVES["unit"], 0.0, 1.0, 0.0), [1, 0, 1, 0], atol=1e-15)


@settings(max_examples=50, deadline=None)
@given(key=curve_key, q=chart)
def test_embed_u1_and_periodicity(key, q):
    c = CURVES[key]
    s, rho, phi = q
    x = embed(c, s, rho, phi)
    u, v = c.eval(s)[:2]
    assert x @ x == pytest.approx(rho * rho * (u * u + v * v + 1), rel=1e-12)
    assert np.allclose(embed(c, s, rho, phi + 2 * math.pi), x, atol=1e-12)


def test_induced_metric_example():
    h = induced_metric(CURVES["unit"], 1.0, 0.0, 1.0)
    assert h.h12 == pytest.approx(0.0, abs=1e-15)
    assert h.h13 == pytest.approx(4 / SQ5, rel=1e-14)
    assert h.h22 == pytest.approx(8 / SQ5, rel=1e-14)
    assert h.h33 == pytest.approx(8 / SQ5, rel=1e-14)
    assert h.det_h == pytest.approx(32 / SQ5, rel=1e-14)
    assert np.linalg.det(h.matrix()) == pytest.approx(h.det_h, rel=1e-12)
    assert induced_metric(CURVES["r2"], 0.0, 1.0, 0.7).h22 == pytest.approx(10.0, rel=1e-15)


@settings(max_examples=100, deadline=None)
@given(key=curve_key, q=chart, t=t_val)
def test_induced_metric_is_pullback(key, q, t):
    c = CURVES[key]
    h = induced_metric(c, t, q[0], q[1])
    pull = fd_pullback(lambda y: embed(c, *y), lambda x: metric(x, t), q)
    assert np.allclose(h.matrix(), pull, rtol=1e-8, atol=1e-8 * np.max(np.abs(pull)))
    assert h.h23 == 0.0
    assert np.linalg.det(h.matrix()) == pytest.approx(h.det_h, rel=1e-10)
    p = h.u1 / q[1] ** 2
    assert h.det_h == pytest.approx(8 * q[1] ** 6 * p * p / math.sqrt(h.u1**2 + t**4), rel=1e-13)


def test_frame_example():
    f = frame(CURVES["unit"], 1.0, 0.0, 1.0)
    assert f.Sigma == pytest.approx(1 / math.sqrt(32 / SQ5), rel=1e-14)
    assert f.D == pytest.approx(0.945741609003176, rel=1e-13)
    assert f.E == 0.0


@settings(max_examples=100, deadline=None)
@given(key=curve_key, q=chart, t=t_val)
def test_frame_orthonormal(key, q, t):
    c = CURVES[key]
    f = frame(c, t, q[0], q[1])
    h = induced_metric(c, t, q[0], q[1]).matrix()
    assert np.allclose(f.Y @ h @ f.Y.T, np.eye(3), atol=1e-12)
    assert np.allclose(f.omega @ f.Y.T, np.eye(3), atol=1e-12)
    assert f.D > 0


def test_connection_t0_and_dlogK():
    c = CURVES["r2"]
    con = connection(c, 0.0, 0.0, 1.5)
    h22 = induced_metric(c, 0.0, 0.0, 1.5).h22
    assert con.c1 == pytest.approx(1 / (1.5 * math.sqrt(h22)), rel=1e-14)
    assert con.c2 == pytest.approx(-1 / (1.5 * math.sqrt(h22)), rel=1e-14)
    assert con.omega23_zero
    assert np.all(con.forms()[1, 2] == 0)


@settings(max_examples=40, deadline=None)
@given(key=curve_key, q=chart, t=t_val)
def test_cartan_structure_equation(key, q, t):
    """d w^i = sum_j w_ij ^ w^j with d of the coframe by differences."""
    c = CURVES[key]
    s, rho, _ = q
    om = frame(c, t, s, rho).omega
    w = connection(c, t, s, rho).forms()
    # d omega^i_{ab} = d_a omega^i_b - d_b omega^i_a in the (s, rho, phi) basis
    dom = np.stack([fd_partial(lambda y: frame(c, t, y[0], y[1]).omega, np.array([s, rho, 0.0]),
                               a, 1e-4) for a in range(2)] + [np.zeros((3, 3))])
    d_omega = np.einsum("aib->iab", dom) - np.einsum("bia->iab", dom)
    conn = np.einsum("ijk,ka->ija", w, om)  # w_ij as a coordinate 1-form
    wedge = np.einsum("ija,jb->iab", conn, om) - np.einsum("ijb,ja->iab", conn, om)
    assert np.max(np.abs(d_omega - wedge)) < 1e-5


def test_curvature_example():
    cur = curvature(CURVES["unit"], 1.0, 0.0, 1.0)
    assert cur.ricci == pytest.approx((0.0894427190999916, -0.0894427190999916,
                                       -0.357770876399966), rel=1e-13)
    assert cur.S == pytest.approx(-4 / 5**1.5, rel=1e-14)


def test_curvature_t0():
    c, rho = CURVES["r2"], 0.8
    u1 = rho * rho * 5
    cur = curvature(c, 0.0, 0.0, rho)
    assert cur.ricci == pytest.approx((0.0, -1 / (2 * u1), -1 / (2 * u1)), rel=1e-14)
    assert cur.S == pytest.approx(-1 / u1, rel=1e-14)


def test_scalar_curvature_decay():
    for rho in (1e2, 1e3):
        u1 = rho * rho * 5
        assert curvature(CURVES["r2"], 1.0, 0.0, rho).S * u1 == pytest.approx(-1.0, rel=1e-6)


@settings(max_examples=100, deadline=None)
@given(key=curve_key, q=chart, t=t_val)
def test_curvature_consistency(key, q, t):
    cur = curvature(CURVES[key], t, q[0], q[1])
    R11, R22, R33 = cur.ricci
    assert R11 == pytest.approx(-cur.R1212 - cur.R1313, rel=1e-10, abs=1e-13)
    assert R22 == pytest.approx(-cur.R1212 - cur.R2323, rel=1e-10, abs=1e-13)
    assert R33 == pytest.approx(-cur.R1313 - cur.R2323, rel=1e-10, abs=1e-13)
    assert cur.S == pytest.approx(R11 + R22 + R33, abs=1e-12)
    assert cur.S == pytest.approx(scalar_curvature_u1(
        induced_metric(CURVES[key], t, q[0], q[1]).u1, t), rel=1e-12)
    assert R11 >= 0 and cur.S <= 0


def test_scalar_curvature_depends_only_on_u1():
    # u1 = rho^2 (r^2 + 1) = 5 on both
    a = curvature(CURVES["unit"], 1.0, 0.3, math.sqrt(2.5)).S
    b = curvature(CURVES["r2"], 1.0, 2.0, 1.0).S
    assert a == pytest.approx(b, abs=1e-12)


def test_ricci_matches_finite_differences(rng):
    for key, c in CURVES.items():
        for _ in range(4):
            s, rho, t = rng.uniform(0, 9), rng.uniform(0.5, 2.0), rng.choice([0.5, 1.0, 2.0])
            q = np.array([s, rho, 0.3])
            ric = fd_ricci_from_metric(chart_metric(c, t), q)
            Y = frame(c, t, s, rho).Y
            frame_ric = Y @ ric @ Y.T
            exact = np.diag(curvature(c, t, s, rho).ricci)
            assert np.max(np.abs(frame_ric - exact)) < 1e-5 * max(1.0, np.max(np.abs(exact)))


@settings(max_examples=100, deadline=None)
@given(key=curve_key, q=chart, t=t_val)
def test_unit_normal(key, q, t):
    c = CURVES[key]
    N = unit_normal(c, t, *q)
    x = embed(c, *q)
    g = metric(x, t)
    assert N @ g @ N == pytest.approx(1.0, abs=1e-10)
    J = np.stack([fd_partial(lambda y: embed(c, *y), np.array(q), i, 1e-5) for i in range(3)])
    assert np.max(np.abs(J @ g @ N)) < 1e-9 * max(1.0, np.max(np.abs(J)))


def test_unit_normal_example():
    N = unit_normal(CURVES["unit"], 1.0, 0.0, 1.0, 0.0)
    K = 4 / SQ5
    assert np.allclose(N, 0.5 * math.sqrt(K / 2) * np.array([1, 0, -1, 0]), atol=1e-15)


def test_second_form_examples():
    sf = second_form(CURVES["r2"], 1.0, 0.0, 1.0)
    assert sf.mean_H == pytest.approx(-0.75 * math.sqrt(2 / math.sqrt(26)), rel=1e-14)
    assert sf.mean_H == pytest.approx(-0.46971, abs=5e-6)
    sf1 = second_form(CURVES["unit"], 1.0, 0.0, 1.0)
    assert sf1.II_frame[1, 2] == pytest.approx(2 / (math.sqrt(2) * 5**0.75), rel=1e-13)


@settings(max_examples=60, deadline=None)
@given(s=st.floats(0.0, 6.28), rho=st.floats(0.1, 5.0), t=t_val)
def test_unit_circle_minimal(s, rho, t):
    assert second_form(CURVES["unit"], t, s, rho).mean_H == pytest.approx(0.0, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(key=curve_key, q=chart, t=t_val)
def test_second_form_structure(key, q, t):
    c = CURVES[key]
    sf = second_form(c, t, q[0], q[1])
    F = sf.II_frame
    assert np.allclose(F, F.T, atol=1e-14)
    assert np.allclose(F[0], 0.0, atol=1e-14) and F[1, 1] == pytest.approx(0.0, abs=1e-14)
    assert F[2, 2] == pytest.approx(sf.mean_H, abs=1e-12)
    assert np.trace(F) == pytest.approx(sf.mean_H, abs=1e-12)
    assert np.linalg.det(F) == pytest.approx(0.0, abs=1e-10)
    assert sf.kappas[0] == 0.0
    assert sorted(sf.kappas) == pytest.approx(sorted(np.linalg.eigvalsh(F)), abs=1e-12)
    S = curvature(c, t, q[0], q[1]).S
    # Gauss equation in a Ricci-flat ambient: 2 sigma2 = S
    assert sf.sigma2 == pytest.approx(S / 2, rel=1e-10, abs=1e-14)


def test_second_form_matches_shape_operator(rng):
    for key, c in CURVES.items():
        for _ in range(4):
            t = float(rng.choice([0.5, 1.0, 2.0]))
            q = np.array([rng.uniform(0, 9), rng.uniform(0.4, 2.5), rng.uniform(0, 6.28)])
            fd = fd_shape_operator(lambda y: embed(c, *y), lambda y: unit_normal(c, t, *y),
                                   lambda x: metric(x, t), lambda x: christoffels_second(x, t),
                                   q, 1e-4)
            exact = second_form(c, t, q[0], q[1]).II_coord
            assert np.max(np.abs(fd - exact)) < 1e-5 * np.max(np.abs(exact))


def test_chart_requires_positive_rho():
    with pytest.raises(DomainError):
        induced_metric(CURVES["unit"], 1.0, 0.0, 0.0)
    with pytest.raises(DomainError):
        curvature(CURVES["unit"], 1.0, 0.0, -1.0)
