"""Plane curves s -> u(s) + i v(s) parametrized by arc length."""

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .specfun import DomainError

MIN_SPEED = 1e-9
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(12)


@dataclass(frozen=True)
class CurveData:
    u: float
    v: float
    ud: float
    vd: float
    udd: float
    vdd: float

    @property
    def r2(self):
        return self.u * self.u + self.v * self.v

    @property
    def a(self):
        """u u' + v v', which equals r r'."""
        return self.u * self.ud + self.v * self.vd

    @property
    def b(self):
        """u v' - v u', which equals r**2 times the polar angular speed."""
        return self.u * self.vd - self.v * self.ud

    @property
    def plane_curvature(self):
        return self.ud * self.vdd - self.vd * self.udd


class PlaneCurve:
    """Base class. Subclasses implement `_eval(s)` on the fundamental domain."""

    family = "generic"
    total_length = math.inf
    closed = False

    def eval(self, s):
        if self.closed:
            s = math.fmod(s, self.total_length)
            if s < 0:
                s += self.total_length
        return self._eval(s)

    def _eval(self, s):
        raise NotImplementedError

    def point(self, s):
        u, v = self.eval(s)[:2]
        return complex(u, v)


class CircleCurve(PlaneCurve):
    """Circle |z| = r0 traversed counterclockwise (eps=1) or clockwise (eps=-1)."""

    family = "circle"
    closed = True

    def __init__(self, r0, eps=1):
        if r0 <= 0:
            raise DomainError("circle radius must be positive")
        if eps not in (1, -1):
            raise DomainError("eps must be +1 or -1")
        self.r0 = float(r0)
        self.eps = int(eps)
        self.total_length = 2.0 * math.pi * self.r0

    def _eval(self, s):
        r0, e = self.r0, self.eps
        c, sn = math.cos(s / r0), math.sin(e * s / r0)
        return (r0 * c, r0 * sn, -e * sn, e * c, -c / r0, -sn / r0)

    def to_dict(self):
        return {"family": "circle", "r0": self.r0, "eps": self.eps}


class LineCurve(PlaneCurve):
    """Straight line through `origin` with direction angle `angle`."""

    family = "line"

    def __init__(self, angle=0.0, origin=(0.0, 0.0)):
        self.angle = float(angle)
        self.origin = (float(origin[0]), float(origin[1]))

    def _eval(self, s):
        c, sn = math.cos(self.angle), math.sin(self.angle)
        return (self.origin[0] + s * c, self.origin[1] + s * sn, c, sn, 0.0, 0.0)

    def to_dict(self):
        return {"family": "line", "angle": self.angle, "origin": list(self.origin)}


@dataclass(frozen=True)
class RawCurve:
    """A regular C^2 curve in an arbitrary parameter, given as complex callables."""

    f: object
    df: object
    ddf: object
    lo: float
    hi: float
    closed: bool = False


class ReparametrizedCurve(PlaneCurve):
    """Arc-length view of a RawCurve.

    Cumulative length is tabulated on panels with 12-point Gauss-Legendre;
    s -> parameter is inverted by safeguarded Newton inside one panel.
    The unit tangent is f'/|f'|, so unit speed holds to rounding.
    """

    family = "generic-sampled"

    def __init__(self, raw, n_samples=256, tol=1e-10):
        self.raw = raw
        self.closed = raw.closed
        self.nodes = np.linspace(raw.lo, raw.hi, n_samples + 1)
        speeds = [abs(raw.df(x)) for x in self.nodes]
        worst = int(np.argmin(speeds))
        if speeds[worst] < MIN_SPEED:
            raise DomainError(f"curve is not regular near parameter {self.nodes[worst]:.6g}")
        panel = [self._panel_length(a, b) for a, b in zip(self.nodes[:-1], self.nodes[1:])]
        self.cumulative = np.concatenate([[0.0], np.cumsum(panel)])
        self.total_length = float(self.cumulative[-1])
        for x in self.nodes:
            ud, vd = self._derivs(x)[2:4]
            if abs(ud * ud + vd * vd - 1.0) > tol:
                raise DomainError(f"unit-speed check failed at parameter {x:.6g}")

    def _panel_length(self, a, b):
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        return half * sum(w * abs(self.raw.df(mid + half * x))
                          for x, w in zip(_GL_NODES, _GL_WEIGHTS))

    def param_to_arclength(self, x):
        k = int(np.clip(np.searchsorted(self.nodes, x, side="right") - 1, 0, len(self.nodes) - 2))
        return float(self.cumulative[k] + self._panel_length(self.nodes[k], x))

    def arclength_to_param(self, s):
        k = int(np.clip(np.searchsorted(self.cumulative, s, side="right") - 1,
                        0, len(self.nodes) - 2))
        a, b = self.nodes[k], self.nodes[k + 1]
        la, lb = self.cumulative[k], self.cumulative[k + 1]
        x = a + (b - a) * (s - la) / (lb - la) if lb > la else a
        lo, hi = a, b
        for _ in range(60):
            resid = la + self._panel_length(a, x) - s
            if resid > 0:
                hi = x
            else:
                lo = x
            step = resid / abs(self.raw.df(x))
            x_new = x - step
            if not lo <= x_new <= hi:
                x_new = 0.5 * (lo + hi)
            if abs(x_new - x) <= 1e-15 * max(1.0, abs(x)):
                return x_new
            x = x_new
        return x

    def _derivs(self, x):
        z, dz, ddz = self.raw.f(x), self.raw.df(x), self.raw.ddf(x)
        speed = abs(dz)
        tangent = dz / speed
        # d/ds = (1/speed) d/dx applied to the unit tangent.
        dtan = (ddz / speed - dz * (dz.real * ddz.real + dz.imag * ddz.imag) / speed**3) / speed
        return (z.real, z.imag, tangent.real, tangent.imag, dtan.real, dtan.imag)

    def _eval(self, s):
        return self._derivs(self.arclength_to_param(s))


class SampledCurve(ReparametrizedCurve):
    """Cubic spline through sample points, reparametrized by arc length."""

    def __init__(self, points, closed=None, n_samples=None, tol=1e-10):
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 4:
            raise DomainError("samples need at least 4 points of the form [u, v]")
        if closed is None:
            closed = bool(np.allclose(pts[0], pts[-1]))
        if closed and not np.allclose(pts[0], pts[-1]):
            pts = np.vstack([pts, pts[:1]])
        chord = np.linalg.norm(np.diff(pts, axis=0), axis=1)
        if np.any(chord <= 0):
            raise DomainError("repeated consecutive sample points")
        knots = np.concatenate([[0.0], np.cumsum(chord)])
        spline = CubicSpline(knots, pts[:, 0] + 1j * pts[:, 1],
                             bc_type="periodic" if closed else "not-a-knot")
        d1, d2 = spline.derivative(1), spline.derivative(2)
        self.points = pts
        raw = RawCurve(f=lambda x: complex(spline(x)), df=lambda x: complex(d1(x)),
                       ddf=lambda x: complex(d2(x)), lo=0.0, hi=float(knots[-1]), closed=closed)
        super().__init__(raw, n_samples or 4 * len(pts), tol)

    def to_dict(self):
        return {"family": "samples", "points": self.points.tolist()}


def arc_length_reparametrize(raw, n_samples=256, tol=1e-10):
    return ReparametrizedCurve(raw, n_samples, tol)


def curve_data(curve, s):
    return CurveData(*curve.eval(s))


def geodesic_curvature(curve, s):
    """Geodesic curvature of the stereographic image on the unit sphere."""
    c = curve_data(curve, s)
    return 0.5 * (c.plane_curvature * (c.r2 + 1.0) - 2.0 * c.b)


def _curve_as_raw(curve):
    def f(s):
        u, v = curve.eval(s)[:2]
        return complex(u, v)

    def df(s):
        _, _, ud, vd, _, _ = curve.eval(s)
        return complex(ud, vd)

    def ddf(s):
        return complex(*curve.eval(s)[4:6])

    if not math.isfinite(curve.total_length):
        raise DomainError("Mobius transform needs a curve of finite length")
    return f, df, ddf


def mobius_apply(A, curve, tol=1e-10, n_samples=256, pole_threshold=1e-6):
    """Image of `curve` under z -> (a z + b)/(c z + d) for unitary A, by arc length."""
    A = np.asarray(A, dtype=complex)
    if A.shape != (2, 2) or not np.allclose(A.conj().T @ A, np.eye(2), atol=1e-12):
        raise DomainError("Mobius matrix must be 2x2 unitary")
    (a, b), (c, d) = A
    det = a * d - b * c
    f, df, ddf = _curve_as_raw(curve)
    length = curve.total_length
    for s in np.linspace(0.0, length, 4 * n_samples + 1):
        if abs(c * f(s) + d) < pole_threshold:
            raise DomainError(f"curve passes through the pole of the transform near s={s:.6g}")

    def g(s):
        return (a * f(s) + b) / (c * f(s) + d)

    def dg(s):
        return det * df(s) / (c * f(s) + d) ** 2

    def ddg(s):
        w = c * f(s) + d
        return det * (ddf(s) * w - 2.0 * c * df(s) ** 2) / w**3

    raw = RawCurve(f=g, df=dg, ddf=ddg, lo=0.0, hi=length, closed=curve.closed)
    return ReparametrizedCurve(raw, n_samples, tol)


def curve_from_dict(spec):
    family = spec.get("family")
    if family == "circle":
        return CircleCurve(float(spec["r0"]), int(spec.get("eps", 1)))
    if family == "line":
        return LineCurve(float(spec.get("angle", 0.0)), tuple(spec.get("origin", (0.0, 0.0))))
    if family == "samples":
        return SampledCurve(spec["points"], spec.get("closed"))
    raise DomainError(f"unknown curve family {family!r}")


def load_curve(path):
    with open(path) as fh:
        return curve_from_dict(json.load(fh))
