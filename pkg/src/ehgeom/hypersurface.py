"""Induced geometry of the hypersurface over a plane curve.

Chart (s, rho, phi) maps to (x1 + i x2, x3 + i x4) = rho e^{i phi} (Gamma(s), 1).
All quantities depend on the curve only through its Cartesian data at s.
"""

import math
from dataclasses import dataclass

import numpy as np

from .curves import curve_data, geodesic_curvature
from .specfun import DomainError


@dataclass(frozen=True)
class InducedMetric:
    h11: float
    h12: float
    h13: float
    h22: float
    h23: float
    h33: float
    det_h: float
    u1: float

    def matrix(self):
        return np.array([[self.h11, self.h12, self.h13],
                         [self.h12, self.h22, self.h23],
                         [self.h13, self.h23, self.h33]])


@dataclass(frozen=True)
class FrameData:
    D: float
    E: float
    F: float
    Sigma: float
    Y: np.ndarray  # rows Y1, Y2, Y3 in the (d_s, d_rho, d_phi) basis
    omega: np.ndarray  # rows w1, w2, w3 in the (ds, drho, dphi) basis


@dataclass(frozen=True)
class ConnectionData:
    c1: float  # w12 = c1 w2
    c2: float  # w13 = -c2 w3
    omega23_zero: bool = True

    def forms(self):
        """w[i, j] as coefficient vectors in the coframe basis (w1, w2, w3)."""
        w = np.zeros((3, 3, 3))
        w[0, 1, 1] = self.c1
        w[1, 0, 1] = -self.c1
        w[0, 2, 2] = -self.c2
        w[2, 0, 2] = self.c2
        return w


@dataclass(frozen=True)
class CurvatureData:
    R1212: float
    R1313: float
    R2323: float
    ricci: tuple
    S: float


@dataclass(frozen=True)
class SecondForm:
    II_coord: np.ndarray
    II_frame: np.ndarray
    mean_H: float
    kappas: tuple
    sigma2: float


@dataclass(frozen=True)
class RadialQuantities:
    """Scalars of one chart point that everything else is built from."""

    rho: float
    t: float
    r2: float
    a: float
    b: float
    X: float  # rho**4 (r**2 + 1)**2 = u1**2
    root: float  # sqrt(X + t**4)
    K: float
    G: float
    H: float

    @property
    def u1(self):
        return self.rho * self.rho * (self.r2 + 1.0)

    @property
    def dlogK(self):
        return 2.0 * self.t**4 / ((self.X + self.t**4) * self.rho)

    @property
    def ddlogK(self):
        t4, q = self.t**4, self.X + self.t**4
        return -2.0 * t4 / (q * self.rho**2) - 8.0 * t4 * self.rho**2 * (self.r2 + 1.0) ** 2 / q**2

    @property
    def dlogD(self):
        return -1.0 / self.rho + 0.5 * self.dlogK

    @property
    def ddlogD(self):
        return 1.0 / self.rho**2 + 0.5 * self.ddlogK

    @property
    def dlogSigma(self):
        return -1.0 / self.rho - 0.5 * self.dlogK


def radial(curve, t, s, rho):
    if rho <= 0:
        raise DomainError("rho must be positive")
    if t < 0:
        raise DomainError("t must be nonnegative")
    c = curve_data(curve, s)
    r2 = c.r2
    X = rho**4 * (r2 + 1.0) ** 2
    root = math.sqrt(X + t**4)
    K = 2.0 * rho * rho * (r2 + 1.0) / root
    H = 2.0 * t**4 / (X * root)
    return RadialQuantities(rho=rho, t=t, r2=r2, a=c.a, b=c.b, X=X, root=root,
                            K=K, G=4.0 / K, H=H)


def embed(curve, s, rho, phi):
    u, v = curve.eval(s)[:2]
    c, sn = math.cos(phi), math.sin(phi)
    return np.array([rho * (u * c - v * sn), rho * (v * c + u * sn), rho * c, rho * sn])


def induced_metric(curve, t, s, rho):
    q = radial(curve, t, s, rho)
    K, p = q.K, q.r2 + 1.0
    return InducedMetric(
        h11=(K + q.H * rho * rho) * rho * rho,
        h12=q.a * rho * K,
        h13=q.b * rho * rho * K,
        h22=p * K,
        h23=0.0,
        h33=p * rho * rho * K,
        det_h=8.0 * rho**6 * p * p / q.root,
        u1=q.u1,
    )


def frame(curve, t, s, rho):
    h = induced_metric(curve, t, s, rho)
    sigma = rho / math.sqrt(h.det_h)
    D = h.h22 * sigma
    E = -h.h12 * sigma
    F = -(h.h13 / rho**2) * sigma
    s22, s33 = math.sqrt(h.h22), math.sqrt(h.h33)
    Y = np.array([[0.0, 1.0 / s22, 0.0],
                  [0.0, 0.0, 1.0 / s33],
                  [D, E, F]])
    omega = np.array([[-s22 * E / D, s22, 0.0],
                      [-s33 * F / D, 0.0, s33],
                      [1.0 / D, 0.0, 0.0]])
    return FrameData(D=D, E=E, F=F, Sigma=sigma, Y=Y, omega=omega)


def connection(curve, t, s, rho):
    q = radial(curve, t, s, rho)
    s22 = math.sqrt((q.r2 + 1.0) * q.K)
    return ConnectionData(c1=(1.0 / rho + 0.5 * q.dlogK) / s22, c2=q.dlogD / s22)


def curvature(curve, t, s, rho):
    q = radial(curve, t, s, rho)
    h22 = (q.r2 + 1.0) * q.K
    R1212 = (q.dlogK / rho + q.ddlogK) / (2.0 * h22)
    R2323 = -(2.0 / rho + q.dlogK) * q.dlogD / (2.0 * h22)
    R1313 = (-2.0 * q.ddlogD + q.dlogK * q.dlogD + 2.0 * q.dlogD**2) / (2.0 * h22)
    t4, X = t**4, q.X
    den = 2.0 * (X + t4) ** 1.5
    ricci = (2.0 * t4 / den, (2.0 * t4 - X) / den, (-4.0 * t4 - X) / den)
    return CurvatureData(R1212=R1212, R1313=R1313, R2323=R2323, ricci=ricci, S=sum(ricci))


def scalar_curvature_u1(u1, t):
    """Scalar curvature as a function of u1 = rho**2 (r**2 + 1) alone."""
    X = u1 * u1
    return -X / (X + t**4) ** 1.5


def unit_normal(curve, t, s, rho, phi):
    q = radial(curve, t, s, rho)
    u, v, ud, vd = curve.eval(s)[:4]
    c, sn = math.cos(phi), math.sin(phi)
    w1 = vd * c + ud * sn
    w2 = ud * c - vd * sn
    rw3 = u * w1 - v * w2
    rw4 = v * w1 + u * w2
    return 0.5 * math.sqrt(q.K / (q.r2 + 1.0)) * np.array([w1, -w2, -rw3, rw4])


def second_form(curve, t, s, rho):
    q = radial(curve, t, s, rho)
    c = curve_data(curve, s)
    pref = 0.5 * rho * math.sqrt(q.K / (q.r2 + 1.0))
    II = pref * np.array([
        [q.G * c.plane_curvature - 2.0 * q.H * rho * rho * c.b, 0.0, q.K],
        [0.0, 0.0, 0.0],
        [q.K, 0.0, 0.0],
    ])
    A = frame(curve, t, s, rho).Y
    II_frame = A @ II @ A.T
    kg = geodesic_curvature(curve, s)
    mean_H = math.sqrt(2.0 / q.root) * kg
    off = q.K / (4.0 * rho) * math.sqrt(q.K / (q.r2 + 1.0))
    disc = math.sqrt(mean_H * mean_H + 4.0 * off * off)
    kappas = (0.0, 0.5 * (mean_H + disc), 0.5 * (mean_H - disc))
    sigma2 = kappas[1] * kappas[2]
    return SecondForm(II_coord=II, II_frame=II_frame, mean_H=mean_H, kappas=kappas,
                      sigma2=sigma2)
