"""Geodesic flow of the induced metric, first integrals, distance and volume growth."""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .curves import CircleCurve, curve_data
from .hypersurface import induced_metric, radial
from .specfun import DomainError, hyp2f1_radial_antiderivative, quadrature, root_find

RHO_FLOOR = 1e-6


@dataclass(frozen=True)
class GeodesicState:
    tau: float
    s: float
    rho: float
    phi: float
    sdot: float
    rhodot: float
    phidot: float

    @property
    def q(self):
        return np.array([self.s, self.rho, self.phi])

    @property
    def qdot(self):
        return np.array([self.sdot, self.rhodot, self.phidot])

    def as_vector(self):
        return np.array([self.s, self.rho, self.phi, self.sdot, self.rhodot, self.phidot])


@dataclass(frozen=True)
class FirstIntegrals:
    E: float
    M1: float
    M2: float | None  # None when the base is not a circle about the origin
    eps: int
    residual: float | None = None  # 2E - (K(r^2+1) rhodot^2 + M1 phidot + M2 sdot)


@dataclass
class Trajectory:
    tau: np.ndarray
    states: np.ndarray  # rows (s, rho, phi, sdot, rhodot, phidot)
    status: str = "ok"  # "ok" or "rho_floor"
    integrals: list = field(default_factory=list)

    def state(self, k):
        return GeodesicState(float(self.tau[k]), *map(float, self.states[k]))


def _step(rho):
    return max(1e-4, 1e-3 * rho)


def induced_christoffels(curve, t, s, rho, h_step=None):
    """Gamma[k, i, j] of the induced metric in (s, rho, phi) by Richardson differences.

    The metric does not depend on phi, so only s and rho are differenced.
    """
    h = _step(rho) if h_step is None else h_step
    if rho <= 2.0 * h:
        raise DomainError("difference step too large for this rho")

    def g(ss, rr):
        return induced_metric(curve, t, ss, rr).matrix()

    def central(fn, step):
        return (fn(step) - fn(-step)) / (2.0 * step)

    def rich(fn):
        return (4.0 * central(fn, h / 2.0) - central(fn, h)) / 3.0

    dg = np.zeros((3, 3, 3))
    dg[0] = rich(lambda d: g(s + d, rho))
    dg[1] = rich(lambda d: g(s, rho + d))
    first = 0.5 * (np.einsum("jik->ijk", dg) + dg - np.einsum("kij->ijk", dg))
    return np.einsum("kl,ijl->kij", np.linalg.inv(g(s, rho)), first)


def induced_christoffels_t0_circle(r0, eps, rho):
    """Exact Christoffels for a circle base at t = 0, where h is quadratic in rho."""
    p = r0 * r0 + 1.0
    b = eps * r0
    g = np.array([[2 * rho**2, 0.0, 2 * b * rho**2],
                  [0.0, 2 * p, 0.0],
                  [2 * b * rho**2, 0.0, 2 * p * rho**2]])
    dg = np.zeros((3, 3, 3))
    dg[1] = np.array([[4 * rho, 0.0, 4 * b * rho], [0.0, 0.0, 0.0], [4 * b * rho, 0.0, 4 * p * rho]])
    first = 0.5 * (np.einsum("jik->ijk", dg) + dg - np.einsum("kij->ijk", dg))
    return np.einsum("kl,ijl->kij", np.linalg.inv(g), first)


def geodesic_rhs(curve, t):
    def rhs(_tau, y):
        gam = induced_christoffels(curve, t, y[0], y[1])
        v = y[3:]
        return np.concatenate([v, -np.einsum("kij,i,j->k", gam, v, v)])
    return rhs


def integrate(curve, t, init, tau_end, tol=1e-10, rho_floor=RHO_FLOOR, n_out=201):
    """Adaptive DOP853 integration; stops early if rho reaches the floor."""
    if init.rho <= rho_floor:
        raise DomainError("initial rho below floor")

    def hit_floor(_tau, y):
        return y[1] - max(rho_floor, 2.5 * _step(y[1]))

    hit_floor.terminal = True
    hit_floor.direction = -1
    t_eval = np.linspace(init.tau, init.tau + tau_end, n_out)
    sol = solve_ivp(geodesic_rhs(curve, t), (init.tau, init.tau + tau_end), init.as_vector(),
                    method="DOP853", rtol=tol, atol=tol, t_eval=t_eval, events=hit_floor)
    if sol.status == -1:
        raise RuntimeError(f"geodesic integration failed: {sol.message}")
    status = "rho_floor" if sol.status == 1 else "ok"
    traj = Trajectory(tau=sol.t, states=sol.y.T, status=status)
    traj.integrals = [first_integrals(curve, t, traj.state(k)) for k in range(len(sol.t))]
    return traj


def _is_origin_circle(curve):
    return isinstance(curve, CircleCurve)


def first_integrals(curve, t, state):
    h = induced_metric(curve, t, state.s, state.rho)
    v = state.qdot
    E = 0.5 * float(v @ h.matrix() @ v)
    M1 = h.h13 * state.sdot + h.h33 * state.phidot
    c = curve_data(curve, state.s)
    eps = 1 if c.b >= 0 else -1
    if not _is_origin_circle(curve):
        return FirstIntegrals(E=E, M1=M1, M2=None, eps=eps)
    M2 = h.h11 * state.sdot + h.h13 * state.phidot
    residual = 2.0 * E - (h.h22 * state.rhodot**2 + M1 * state.phidot + M2 * state.sdot)
    return FirstIntegrals(E=E, M1=M1, M2=M2, eps=eps, residual=residual)


def _circle_radial(rho, r0, t):
    return radial(CircleCurve(r0), t, 0.0, rho)


def angular_velocities(rho, r0, t, M1, M2, eps):
    """(sdot, phidot) on a circle base from the two momenta."""
    q = _circle_radial(rho, r0, t)
    phidot = ((4.0 + q.G * q.H * rho * rho) * M1 - 4.0 * eps * M2 * r0) / (4.0 * rho * rho * q.G)
    sdot = (-eps * r0 * M1 + (r0 * r0 + 1.0) * M2) * q.K / (4.0 * rho * rho)
    return sdot, phidot


def radial_rho_dot_sq(rho, r0, t, E, M1, M2, eps):
    """Radial speed squared from energy and momenta; negative in the forbidden region."""
    p = r0 * r0 + 1.0
    q = _circle_radial(rho, r0, t)
    centrifugal = (t**4 * M1 * M1 / (rho**4 * p**3) + (M1 - eps * M2 * r0) ** 2 + M2 * M2)
    return q.root * E / (rho * rho * p * p) - centrifugal / (4.0 * rho * rho * p)


def turning_radius(r0, t, E, M1, M2, eps, rho_max=1e6):
    """Smallest rho with zero radial speed, approached from the allowed side."""
    f = lambda r: radial_rho_dot_sq(r, r0, t, E, M1, M2, eps)
    lo = 1e-8
    if f(lo) >= 0:
        return 0.0
    hi = 1e-6
    while f(hi) < 0:
        hi *= 2.0
        if hi > rho_max:
            raise DomainError("no allowed region found")
    return root_find(f, hi / 2.0 if f(hi / 2.0) < 0 else lo, hi)


def distance_to_zero_section(rho0, r0, t):
    """Length of the radial geodesic from the zero section out to rho0."""
    if t <= 0:
        raise DomainError("t must be positive; use distance_to_zero_section_t0")
    if rho0 <= 0:
        return 0.0
    u1 = rho0 * rho0 * (r0 * r0 + 1.0)
    return hyp2f1_radial_antiderivative(u1, 1.0, t) / math.sqrt(2.0)


def distance_to_zero_section_t0(rho0, r0):
    """At t = 0 the integrand is u**(-1/2)/sqrt(2), so the distance is sqrt(2 u1)."""
    return math.sqrt(2.0 * rho0 * rho0 * (r0 * r0 + 1.0))


def distance_quadrature(rho0, r0, t):
    u1 = rho0 * rho0 * (r0 * r0 + 1.0)
    return quadrature(lambda u: (u * u + t**4) ** -0.25, 0.0, u1, tol=1e-13) / math.sqrt(2.0)


def rho_at_distance(R, r0, t):
    """Inverse of distance_to_zero_section in rho0."""
    if R <= 0:
        return 0.0
    hi = 1.0
    while distance_to_zero_section(hi, r0, t) < R:
        hi *= 2.0
    return root_find(lambda r: distance_to_zero_section(r, r0, t) - R, 0.0, hi, tol=1e-14)


def closed_geodesic_params(rho0, r0, n, m, eps=1, t=1.0):
    """Momenta and energy of the torus geodesic with winding (n, m).

    Uses M1 = (m (r0^2+1)/4 + eps n r0^2) u1^2/(u1^2 + t^4) and
    M2 = r0 (n + eps M1)/(r0^2 + 1), with rhodot = 0.
    """
    if n == 0 and m == 0:
        raise DomainError("(n, m) = (0, 0) is the trivial constant curve")
    p = r0 * r0 + 1.0
    u1 = rho0 * rho0 * p
    M1 = (m * p / 4.0 + eps * n * r0 * r0) * u1 * u1 / (u1 * u1 + t**4)
    M2 = r0 / p * (n + eps * M1)
    sdot, phidot = angular_velocities(rho0, r0, t, M1, M2, eps)
    E = 0.5 * (M1 * phidot + M2 * sdot)
    if E <= 0:
        raise DomainError("inconsistent momenta: nonpositive energy")
    return M1, M2, E


@dataclass(frozen=True)
class ClosureReport:
    M1: float
    M2: float
    E: float
    sdot: float
    phidot: float
    period: float
    return_distance: float
    rho_drift: float
    rho_ddot: float


def _wrap(d, period):
    return (d + 0.5 * period) % period - 0.5 * period


def closed_geodesic_check(rho0, r0, t, n, m, eps=1, tol=1e-12):
    """Integrate the constructed torus geodesic over one period and measure the return miss."""
    M1, M2, E = closed_geodesic_params(rho0, r0, n, m, eps, t)
    sdot, phidot = angular_velocities(rho0, r0, t, M1, M2, eps)
    curve = CircleCurve(r0, eps)
    if n != 0:
        period = 2.0 * math.pi * r0 * abs(n) / abs(sdot)
    else:
        period = 2.0 * math.pi * abs(m) / abs(phidot)
    init = GeodesicState(0.0, 0.0, rho0, 0.0, sdot, 0.0, phidot)
    gam = induced_christoffels(curve, t, 0.0, rho0)
    v = init.qdot
    rho_ddot = float(-np.einsum("ij,i,j->", gam[1], v, v))
    traj = integrate(curve, t, init, period, tol=tol)
    end = traj.states[-1]
    ds = _wrap(end[0], 2.0 * math.pi * r0)
    dphi = _wrap(end[2], 2.0 * math.pi)
    miss = math.sqrt(ds * ds + (end[1] - rho0) ** 2 + dphi * dphi)
    drift = float(np.max(np.abs(traj.states[:, 1] - rho0)))
    return ClosureReport(M1, M2, E, sdot, phidot, period, miss, drift, rho_ddot)


def tube_volume(rho_R, r0, t):
    """Volume of {rho <= rho_R} over a circle of radius r0, phi over [0, 2 pi)."""
    p = r0 * r0 + 1.0
    return (4.0 * math.pi**2 * r0 * math.sqrt(8.0) / (3.0 * p)
            * ((rho_R**4 * p * p + t**4) ** 0.75 - t**3))


def tube_volume_quadrature(rho_R, r0, t):
    """Same volume from the density sqrt(det h) integrated over the chart."""
    curve = CircleCurve(r0)
    dens = quadrature(lambda r: math.sqrt(induced_metric(curve, t, 0.0, r).det_h), 0.0, rho_R,
                      tol=1e-12) if rho_R > 0 else 0.0
    return 2.0 * math.pi * curve.total_length * dens


def exponential_growth_estimate(r0, t, R_list):
    """(1/R) log vol(B_R) with B_R the tube of distance R from the zero section."""
    R_list = list(R_list)
    if any(b <= a for a, b in zip(R_list, R_list[1:])):
        raise DomainError("R_list must be strictly increasing")
    return [math.log(tube_volume(rho_at_distance(R, r0, t), r0, t)) / R for R in R_list]
