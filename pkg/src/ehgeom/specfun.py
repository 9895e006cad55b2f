"""Special functions and small numerical kernels.

The Gauss hypergeometric function is evaluated only on the real half-line
z <= 0, which is all the geometry needs (arguments of the form -u**2/t**4).
"""

import math
from functools import lru_cache

from scipy import integrate, optimize

SERIES_RADIUS = 0.9
SEAM_RADIUS = 1.1
MAX_TERMS = 20000


class DomainError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    pass


def _is_nonpositive_int(x):
    return x <= 0 and float(x).is_integer()


def gamma_fn(x):
    """Gamma function on the positive reals."""
    if x <= 0:
        raise DomainError(f"gamma_fn needs x > 0, got {x}")
    return math.gamma(x)


def _gamma_any(x):
    # Continuation coefficients may need negative non-integer arguments.
    if _is_nonpositive_int(x):
        raise DomainError(f"Gamma pole at {x}")
    return math.gamma(x)


def _series(a, b, c, z, tol):
    total = 1.0
    term = 1.0
    n = 0
    while n < MAX_TERMS:
        term *= (a + n) * (b + n) / ((c + n) * (n + 1)) * z
        total += term
        n += 1
        if term == 0.0:
            return total
        # Ratio of successive terms tends to z; bound the tail geometrically.
        ratio = abs((a + n) * (b + n) / ((c + n) * (n + 1)) * z)
        if ratio < 1.0 and abs(term) * ratio / (1.0 - ratio) < tol * max(1.0, abs(total)):
            return total
    raise ConvergenceError(f"2F1 series did not converge for z={z}")


def hyp2f1(a, b, c, z, tol=1e-15):
    """Gauss hypergeometric function 2F1(a, b; c; z) for real z <= 0.

    |z| < 0.9 sums the power series. 0.9 <= |z| <= 1.1 uses the Euler
    transform onto z/(z-1), which lands near 1/2. |z| > 1.1 uses the two-term
    continuation in 1/z.
    """
    if z > 0:
        raise DomainError(f"hyp2f1 supports z <= 0 only, got {z}")
    if _is_nonpositive_int(c):
        raise DomainError(f"c must not be a nonpositive integer, got {c}")
    if z == 0:
        return 1.0
    az = abs(z)
    if az < SERIES_RADIUS:
        return _series(a, b, c, z, tol)
    if az <= SEAM_RADIUS:
        w = z / (z - 1.0)
        return (1.0 - z) ** (-a) * _series(a, c - b, c, w, tol)
    return _continuation(a, b, c, z, tol)


def _rgamma(x):
    """1/Gamma(x), which is zero at the poles."""
    if _is_nonpositive_int(x):
        return 0.0
    return 1.0 / math.gamma(x)


def _continuation(a, b, c, z, tol):
    if float(a - b).is_integer():
        raise DomainError("continuation needs a - b non-integer")
    gc = _gamma_any(c)
    w = 1.0 / z
    first = (gc * _gamma_any(b - a) * _rgamma(b) * _rgamma(c - a)
             * (-z) ** (-a) * _series(a, a + 1 - c, a + 1 - b, w, tol))
    second = (gc * _gamma_any(a - b) * _rgamma(a) * _rgamma(c - b)
              * (-z) ** (-b) * _series(b, b + 1 - c, b + 1 - a, w, tol))
    return first + second


def hyp2f1_radial_antiderivative(x, a, t):
    """Antiderivative of (a*x**2 + t**4)**(-1/4) vanishing at x = 0."""
    if t <= 0:
        raise DomainError("t must be positive; use the elementary t = 0 form")
    if x == 0:
        return 0.0
    return (x / t) * hyp2f1(0.5, 0.25, 1.5, -a * x * x / t**4)


def quadrature(f, a, b, tol=1e-12, limit=500):
    """Adaptive Gauss-Kronrod quadrature; raises when the error estimate stays above tol."""
    value, err = integrate.quad(f, a, b, epsabs=tol, epsrel=tol, limit=limit)
    if err > max(tol, tol * abs(value)) * 10:
        raise ConvergenceError(f"quadrature error estimate {err:.3g} above tolerance {tol:.3g}")
    return value


def root_find(f, lo, hi, tol=1e-14):
    """Bracketed root of a continuous function on [lo, hi]."""
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if flo * fhi > 0:
        raise DomainError(f"no sign change on [{lo}, {hi}]")
    return optimize.brentq(f, lo, hi, xtol=tol, rtol=1e-15, maxiter=500)


def _bump(y):
    # exp(-1/y**2) underflows to zero below y ~ 0.0366; also avoids 1/0 for tiny y
    if y < 0.03:
        return 0.0
    return math.exp(-1.0 / (y * y))


def _mollifier_density(y):
    return _bump(y) * _bump(1.0 - y)


@lru_cache(maxsize=1)
def _mollifier_total():
    return quadrature(_mollifier_density, 0.0, 1.0, tol=1e-14)


def mollifier_mu(x):
    """Smooth monotone step: 0 for x <= 0, 1 for x >= 1."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    if x <= 0.5:
        return quadrature(_mollifier_density, 0.0, x, tol=1e-14) / _mollifier_total()
    return 1.0 - quadrature(_mollifier_density, x, 1.0, tol=1e-14) / _mollifier_total()
