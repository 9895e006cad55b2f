"""Scalar Laplacian, exhaustion function and Rayleigh-quotient bounds."""

import math
from dataclasses import dataclass

import numpy as np

from .curves import curve_data
from .hypersurface import connection, induced_metric, radial
from .specfun import DomainError, mollifier_mu, quadrature, root_find

KAPPA = (6.0**6 / 5.0**5) ** 0.25


class ScalarField:
    """Scalar field with chart gradient and Hessian in (s, rho, phi)."""

    def __init__(self, jet, provenance="closed-form"):
        self._jet = jet
        self.provenance = provenance

    def jet(self, s, rho, phi):
        f, g, hess = self._jet(s, rho, phi)
        return float(f), np.asarray(g, dtype=float), np.asarray(hess, dtype=float)

    def __call__(self, s, rho, phi):
        return self.jet(s, rho, phi)[0]

    @classmethod
    def of_u1(cls, fn, d1, d2, curve):
        """Field f(u1), u1 = rho^2 (r^2 + 1), from f, f' and f''."""
        def jet(s, rho, phi):
            c = curve_data(curve, s)
            p = c.r2 + 1.0
            a = c.a
            a_s = c.ud**2 + c.vd**2 + c.u * c.udd + c.v * c.vdd
            u1 = rho * rho * p
            f0, f1, f2 = fn(u1), d1(u1), d2(u1)
            us, ur = 2.0 * a * rho * rho, 2.0 * rho * p
            hess = np.zeros((3, 3))
            hess[0, 0] = f2 * us * us + f1 * 2.0 * rho * rho * a_s
            hess[1, 1] = f2 * ur * ur + f1 * 2.0 * p
            hess[0, 1] = hess[1, 0] = f2 * us * ur + f1 * 4.0 * rho * a
            return f0, np.array([f1 * us, f1 * ur, 0.0]), hess
        return cls(jet)

    @classmethod
    def from_values(cls, fn, step=1e-4):
        """Gradient and Hessian by central differences with step step*max(1, rho)."""
        def jet(s, rho, phi):
            q = np.array([s, rho, phi], dtype=float)
            h = step * max(1.0, rho)
            E = np.eye(3) * h
            f0 = fn(*q)
            g = np.array([(fn(*(q + E[a])) - fn(*(q - E[a]))) / (2 * h) for a in range(3)])
            hess = np.empty((3, 3))
            for a in range(3):
                for b in range(3):
                    hess[a, b] = (fn(*(q + E[a] + E[b])) - fn(*(q + E[a] - E[b]))
                                  - fn(*(q - E[a] + E[b])) + fn(*(q - E[a] - E[b]))) / (4 * h * h)
            return f0, g, hess
        return cls(jet, provenance="finite-difference")


def _frame_jet(curve, t, s, rho):
    """Coefficients (D, E, F) of Y3 with their s and rho derivatives.

    D = p W, E = -a rho W, F = -b W with W = (2 sqrt(u1^2 + t^4))^(-1/2).
    """
    c = curve_data(curve, s)
    p = c.r2 + 1.0
    a, b = c.a, c.b
    a_s = c.ud**2 + c.vd**2 + c.u * c.udd + c.v * c.vdd
    b_s = c.u * c.vdd - c.v * c.udd
    u1 = rho * rho * p
    root = math.sqrt(u1 * u1 + t**4)
    W = (2.0 * root) ** -0.5
    dW = -W * u1 / (2.0 * root * root)
    W_s, W_r = dW * 2.0 * a * rho * rho, dW * 2.0 * rho * p
    coeff = np.array([p * W, -a * rho * W, -b * W])
    d_s = np.array([2.0 * a * W + p * W_s, -a_s * rho * W - a * rho * W_s, -b_s * W - b * W_s])
    d_r = np.array([p * W_r, -a * W - a * rho * W_r, -b * W_r])
    return coeff, d_s, d_r, W, W_r, p


def laplacian_scalar(field, curve, t, s, rho, phi):
    """Delta f = -(sum_i Y_i Y_i f - (c2 - c1) Y1 f), the nonnegative Laplacian."""
    if rho <= 0:
        raise DomainError("rho must be positive")
    _, g, hess = field.jet(s, rho, phi)
    (D, E, F), d_s, d_r, W, W_r, p = _frame_jet(curve, t, s, rho)
    # Y1 = Z d_rho with Z = 1/sqrt(h22) = 1/(2 rho p W)
    Z = 1.0 / (2.0 * rho * p * W)
    Z_r = -Z * (1.0 / rho + W_r / W)
    y1 = Z * g[1]
    y1y1 = Z * (Z_r * g[1] + Z * hess[1, 1])
    h33 = induced_metric(curve, t, s, rho).h33
    y2y2 = hess[2, 2] / h33
    v = np.array([D, E, F])
    y3y3 = (D * (d_s @ g) + E * (d_r @ g)) + v @ hess @ v
    con = connection(curve, t, s, rho)
    return -(y1y1 + y2y2 + y3y3 - (con.c2 - con.c1) * y1)


def gradient_norm_sq(field, curve, t, s, rho, phi):
    _, g, _ = field.jet(s, rho, phi)
    h = induced_metric(curve, t, s, rho).matrix()
    return float(g @ np.linalg.solve(h, g))


# Exhaustion


def phi_star_field(curve):
    """rho sqrt(r^2 + 1) = sqrt(u1)."""
    return ScalarField.of_u1(math.sqrt, lambda u: 0.5 / math.sqrt(u),
                             lambda u: -0.25 * u**-1.5, curve)


def laplacian_phi_star(u1, t):
    """Closed form of Delta phi*; negative everywhere, so phi* is subharmonic."""
    X, t4 = u1 * u1, t**4
    return math.sqrt(X + t4) / (2.0 * u1**1.5) * (t4 / (X + t4) - 2.0)


def grad_phi_star_sq(u1, t):
    """|grad phi*|^2 = 1/K."""
    return math.sqrt(u1 * u1 + t**4) / (2.0 * u1)


def exhaustion_phi(curve, s, rho, s0=None):
    """phi = rho sqrt(r^2 + 1) mu(rho), smooth and proper.

    s0 marks the s-extent of the compact core {rho <= 1, s <= s0} outside of
    which phi is subharmonic; it does not change the value.
    """
    if rho < 0:
        raise DomainError("rho must be nonnegative")
    if s0 is not None and s0 <= 0:
        raise DomainError("s0 must be positive")
    return rho * math.sqrt(curve_data(curve, s).r2 + 1.0) * mollifier_mu(rho)


@dataclass(frozen=True)
class SubharmonicReport:
    points: list
    subharmonic: list
    grad_sq_matches: list

    @property
    def all_ok(self):
        return all(self.subharmonic) and all(self.grad_sq_matches)


def subharmonic_report(curve, t, grid, tol=1e-9):
    """Check Delta phi* < 0 and |grad phi*|^2 = 1/K at each (s, rho) in grid."""
    field = phi_star_field(curve)
    pts, sub, grad_ok = [], [], []
    for s, rho in grid:
        if rho <= 0:
            continue
        lap = laplacian_scalar(field, curve, t, s, rho, 0.0)
        g2 = gradient_norm_sq(field, curve, t, s, rho, 0.0)
        K = radial(curve, t, s, rho).K
        pts.append((s, rho))
        sub.append(lap < 0.0)
        grad_ok.append(abs(g2 - 1.0 / K) <= tol * max(1.0, 1.0 / K))
    return SubharmonicReport(pts, sub, grad_ok)


# Rayleigh quotients


def _curve_samples(curve, n):
    """Gauss-Legendre nodes and weights over one period of a closed curve."""
    if not curve.closed:
        raise DomainError("Rayleigh quotients need a closed base curve")
    x, w = np.polynomial.legendre.leggauss(n)
    L = curve.total_length
    return 0.5 * L * (x + 1.0), 0.5 * L * w


def _p_values(curve, n_s):
    nodes, weights = _curve_samples(curve, n_s)
    return np.array([curve_data(curve, s).r2 + 1.0 for s in nodes]), weights


def _half_line(f, tol):
    """int_0^inf f(rho) d rho via rho = tan(theta)."""
    def g(th):
        c = math.cos(th)
        return f(math.tan(th)) / (c * c) if c > 0 else 0.0
    return quadrature(g, 0.0, 0.5 * math.pi, tol=tol)


def _s_integral(curve, radial_integral, n_s):
    ps, ws = _p_values(curve, n_s)
    # every integrand depends on s only through p, so reuse values for equal p
    cache = {}
    total = 0.0
    for p, w in zip(ps, ws):
        key = round(p, 14)
        if key not in cache:
            cache[key] = radial_integral(p)
        total += w * cache[key]
    return 2.0 * math.pi * total


@dataclass(frozen=True)
class RayleighResult:
    numerator: float
    denominator: float
    quotient: float
    bound: float


def laplace_rayleigh(eps, t, curve, quad_tol=1e-11, n_s=64):
    """Rayleigh quotient of f = H_eps^2, H_eps = sqrt(2)/(u1^2 + eps^4)^(1/4)."""
    if eps <= 0 or t < 0:
        raise DomainError("need eps > 0 and t >= 0")
    e4, t4 = eps**4, t**4

    def num(p):
        def f(rho):
            X = rho**4 * p * p
            return 16.0 * math.sqrt(2.0) * rho**7 * p**3 * (X + t4) ** 0.25 / (X + e4) ** 3
        return _half_line(f, quad_tol)

    def den(p):
        def f(rho):
            X = rho**4 * p * p
            return 8.0 * math.sqrt(2.0) * rho**3 * p / ((X + e4) * (X + t4) ** 0.25)
        return _half_line(f, quad_tol)

    n = _s_integral(curve, num, n_s)
    d = _s_integral(curve, den, n_s)
    return RayleighResult(n, d, n / d, 8.0 / (21.0 * eps * eps))


def laplace_rayleigh_closed_bounds(eps, curve, n_s=64):
    """(numerator upper bound, denominator lower bound), exact when t = eps."""
    ps, ws = _p_values(curve, n_s)
    inv = float(np.sum(ws / ps))
    c = 8.0 * math.sqrt(8.0) * math.pi
    return 8.0 * c * inv / (21.0 * eps**3), c * inv / eps


@dataclass(frozen=True)
class BoundConstants:
    a: float
    P_a: float
    mu: float
    M: float
    N: float
    Q: float
    kappa: float = KAPPA


def quintic_root(eps, p):
    """Q with x = Q sqrt(p) solving x (x^4 + eps^4) = 1."""
    x = root_find(lambda x: x * (x**4 + eps**4) - 1.0, 0.0, 1.0)
    return x / math.sqrt(p)


def bound_mu(eps, t, a):
    return (2.0 * math.sqrt(2.0) * (6.0 * eps**4 + t**4) / a) ** 0.2


def bound_M(eps, t, a):
    mu = bound_mu(eps, t, a)
    return 2.0 * math.sqrt(2.0) * mu**7 / ((mu**4 + eps**4) ** 1.5 * (mu**4 + t**4) ** 0.25)


def bound_N(eps, t):
    if not eps < t:
        raise DomainError("N(eps, t) needs eps < t")
    return t / (math.sqrt(2.0) * (t**4 - eps**4) ** 0.25)


def bound_constants(eps, t, a=None, r=0.0):
    if a is None:
        a = 0.01 * t
    if a <= 0:
        raise DomainError("a must be positive")
    p = r * r + 1.0
    mu = bound_mu(eps, t, a)
    return BoundConstants(a=a, P_a=mu / math.sqrt(p), mu=mu, M=bound_M(eps, t, a),
                          N=bound_N(eps, t), Q=quintic_root(eps, p))


def dirac_rayleigh_bound(eps, t, curve, a=None, n_s=64):
    """Analytic upper bound for the Dirac Rayleigh quotient of psi_eps.

    Each s contributes with weight 1/(r^2+1) to both integrals; for circles the
    weight cancels.
    """
    if not 2.0 * eps**4 < t**4:
        raise DomainError("the bound needs 2 eps^4 < t^4")
    if a is None:
        a = 0.01 * t
    ps, ws = _p_values(curve, n_s)
    e4 = eps**4
    num = den = 0.0
    for p, w in zip(ps, ws):
        bc = bound_constants(eps, t, a, math.sqrt(p - 1.0))
        sp = math.sqrt(p)
        eq = math.exp(-6.0 * bc.Q * e4 * sp)
        num += w / p * ((1.0 - eq) / (eps**3 * KAPPA**2) + eps**7 * eq)
        den += w / p * math.exp(-6.0 * bc.P_a * e4 * sp)
    N = bound_N(eps, t)
    M = bound_M(eps, t, a)
    return 9.0 * math.sqrt(2.0) * N * t / M * num / den


def dirac_rayleigh(eps, t, curve, quad_tol=1e-11, n_s=64, a=None):
    """(||psi_eps||^2, ||D psi_eps||^2, quotient) for |C|^2 = 1, plus the analytic bound."""
    if eps <= 0 or t <= 0:
        raise DomainError("need eps > 0 and t > 0")
    e4, t4 = eps**4, t**4

    def weight(rho, p):
        X = rho**4 * p * p
        minus_s = X / (X + e4) ** 1.5
        det = 8.0 * rho**6 * p * p / math.sqrt(X + t4)
        return minus_s * math.sqrt(det) * math.exp(-6.0 * e4 * rho * math.sqrt(p)), X

    def norm(p):
        return _half_line(lambda rho: weight(rho, p)[0] if rho > 0 else 0.0, quad_tol)

    def dnorm(p):
        def f(rho):
            if rho <= 0:
                return 0.0
            w, X = weight(rho, p)
            h22 = 2.0 * rho * rho * p * p / math.sqrt(X + t4)
            q = 9.0 * eps**8 / (h22 * rho * rho) * (1.0 / (X + e4) - rho * math.sqrt(p)) ** 2
            return q * w
        return _half_line(f, quad_tol)

    n = _s_integral(curve, norm, n_s)
    d = _s_integral(curve, dnorm, n_s)
    bound = dirac_rayleigh_bound(eps, t, curve, a, n_s) if 2.0 * e4 < t4 else math.inf
    return RayleighResult(n, d, d / n, bound)


def ricci_spectral_bounds(t):
    """(lower Ricci bound, upper bound for the bottom of the Laplace spectrum)."""
    if t <= 0:
        raise DomainError("t = 0 leaves the Ricci curvature unbounded below")
    return -2.0 / (t * t), 1.0 / (t * t)
