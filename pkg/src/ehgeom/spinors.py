"""Spinors on the hypersurface in the global frame (Y1, Y2, Y3).

Clifford action: Y1 -> diag(i, -i), Y2 -> [[0, i], [i, 0]], Y3 -> [[0, -1], [1, 0]].
Connection: nabla psi = d psi + 1/2 sum_{i<j} w_ij Y_i Y_j psi, with
w12 = c1 w2, w13 = -c2 w3, w23 = 0.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .curves import CircleCurve, curve_data
from .hypersurface import connection, curvature, frame, induced_metric, radial, second_form
from .specfun import DomainError, quadrature

GAMMA = np.array([
    [[1j, 0], [0, -1j]],
    [[0, 1j], [1j, 0]],
    [[0, -1], [1, 0]],
], dtype=complex)


def clifford_mul(X, psi):
    """X . psi for X given by its frame components."""
    return np.einsum("i,iab,b->a", np.asarray(X, dtype=complex), GAMMA, np.asarray(psi, dtype=complex))


def spinor_inner(a, b):
    return complex(np.vdot(b, a))


class SpinorField:
    """A spinor field with chart partials.

    `jet(s, rho, phi)` returns (psi, dpsi) with dpsi[a] the partial along
    chart coordinate a in (s, rho, phi).
    """

    def __init__(self, jet, provenance="closed-form"):
        self._jet = jet
        self.provenance = provenance

    def jet(self, s, rho, phi):
        psi, dpsi = self._jet(s, rho, phi)
        return np.asarray(psi, dtype=complex), np.asarray(dpsi, dtype=complex)

    def __call__(self, s, rho, phi):
        return self.jet(s, rho, phi)[0]

    @classmethod
    def from_values(cls, fn, step=1e-5):
        """Partials by Richardson central differences with step step*max(1, rho)."""
        def jet(s, rho, phi):
            q = np.array([s, rho, phi], dtype=float)
            h = step * max(1.0, rho)

            def central(a, d):
                qp, qm = q.copy(), q.copy()
                qp[a] += d
                qm[a] -= d
                return (np.asarray(fn(*qp)) - np.asarray(fn(*qm))) / (2.0 * d)

            dpsi = np.array([(4.0 * central(a, h / 2) - central(a, h)) / 3.0 for a in range(3)])
            return np.asarray(fn(s, rho, phi), dtype=complex), dpsi
        return cls(jet, provenance="finite-difference")

    def scaled(self, f, df):
        """f * psi for a scalar with chart gradient df."""
        def jet(s, rho, phi):
            psi, dpsi = self.jet(s, rho, phi)
            val, grad = f(s, rho, phi), np.asarray(df(s, rho, phi))
            return val * psi, val * dpsi + np.outer(grad, psi)
        return SpinorField(jet, self.provenance)


def _frame_derivatives(Y, dpsi):
    """dpsi(Y_i) for each frame vector."""
    return Y @ dpsi


def spin_cov_deriv(field, i, curve, t, s, rho, phi):
    """nabla_{Y_i} psi at one point."""
    psi, dpsi = field.jet(s, rho, phi)
    fr = frame(curve, t, s, rho)
    con = connection(curve, t, s, rho)
    out = _frame_derivatives(fr.Y, dpsi)[i]
    # w_ij(Y_k) = coefficient of w^k in w_ij
    w = con.forms()
    for a in range(3):
        for b in range(a + 1, 3):
            coeff = w[a, b, i]
            if coeff:
                out = out + 0.5 * coeff * GAMMA[a] @ (GAMMA[b] @ psi)
    return out


def dirac_frame_sum(field, curve, t, s, rho, phi):
    """D psi = sum_i Y_i . nabla_{Y_i} psi."""
    return sum(GAMMA[i] @ spin_cov_deriv(field, i, curve, t, s, rho, phi) for i in range(3))


def dirac_apply(field, curve, t, s, rho, phi):
    """D psi in explicit matrix form: sum_i g_i Y_i(psi) + i/(rho sqrt(h22)) diag(1, -1) psi."""
    psi, dpsi = field.jet(s, rho, phi)
    fr = frame(curve, t, s, rho)
    d = _frame_derivatives(fr.Y, dpsi)
    q = radial(curve, t, s, rho)
    s22 = math.sqrt((q.r2 + 1.0) * q.K)
    p1, p2 = d[:, 0], d[:, 1]
    return np.array([
        1j * p1[0] + 1j * p2[1] - p2[2],
        -1j * p2[0] + 1j * p1[1] + p1[2],
    ]) + (1j / (rho * s22)) * np.array([psi[0], -psi[1]])


def harmonic_spinor_basic(C1, C2, curve):
    """(C1, C2)/(rho sqrt(r^2+1)), harmonic for every base curve and every t."""
    C = np.array([C1, C2], dtype=complex)

    def jet(s, rho, phi):
        c = curve_data(curve, s)
        p = c.r2 + 1.0
        psi = C / (rho * math.sqrt(p))
        return psi, np.array([-(c.a / p) * psi, -psi / rho, 0 * psi])

    return SpinorField(jet)


def _beta_field(beta, B1, B2, r0, t, eps):
    phidot = eps / r0
    delta = (r0 * r0 + 1.0) * beta * phidot / 2.0
    B = np.array([B1, B2], dtype=complex)

    def jet(s, rho, phi):
        p = r0 * r0 + 1.0
        u1 = rho * rho * p
        root = math.sqrt(u1 * u1 + t**4)
        radial_part = t ** (-2.0 * delta) * (u1 + root) ** delta / rho
        phase = np.exp(1j * beta * phidot * s)
        psi = phase * radial_part * B
        dlog_rho = 2.0 * rho * p * delta / root - 1.0 / rho
        return psi, np.array([1j * beta * phidot * psi, dlog_rho * psi, 0 * psi])

    return SpinorField(jet), delta


def harmonic_spinor_beta(beta, B1, B2, r0, t, eps=1):
    """e^{i beta phi_Gamma} rho^-1 t^{-2 delta} (u1 + sqrt(u1^2 + t^4))^delta (B1, B2).

    The first-order radial system couples the two components, so the spinor is
    in the kernel only for B1 == B2.
    """
    if not (isinstance(beta, (int, np.integer)) and beta < 0):
        raise DomainError("beta must be a negative integer (beta >= 0 is not square integrable)")
    if t <= 0 or r0 <= 0:
        raise DomainError("t and r0 must be positive")
    if B1 != B2:
        raise DomainError("the radial Dirac system forces B1 == B2")
    return _beta_field(beta, B1, B2, r0, t, eps)[0]


def beta_radial_factor(beta, r0, t, rho, eps=1):
    """rho * |psi_beta| / |B|, the chi function of the radial system."""
    delta = (r0 * r0 + 1.0) * beta * (eps / r0) / 2.0
    u1 = rho * rho * (r0 * r0 + 1.0)
    return t ** (-2.0 * delta) * (u1 + math.sqrt(u1 * u1 + t**4)) ** delta


def s_eps(u1, eps):
    X = u1 * u1
    return -X / (X + eps**4) ** 1.5


def approx_spinor(eps, C1, C2, curve):
    """sqrt(-S_eps) exp(-3 eps^4 rho sqrt(r^2+1)) (C1, C2)."""
    C = np.array([C1, C2], dtype=complex)

    def jet(s, rho, phi):
        c = curve_data(curve, s)
        p = c.r2 + 1.0
        u1 = rho * rho * p
        X = u1 * u1
        amp = math.sqrt(-s_eps(u1, eps)) * math.exp(-3.0 * eps**4 * rho * math.sqrt(p))
        # The amplitude depends on (s, rho) through w = rho sqrt(p) only.
        w = rho * math.sqrt(p)
        dlog_w = (2.0 * eps**4 - X) / ((X + eps**4) * w) - 3.0 * eps**4
        dw_drho = math.sqrt(p)
        dw_ds = rho * c.a / math.sqrt(p)
        psi = amp * C
        return psi, np.array([dlog_w * dw_ds * psi, dlog_w * dw_drho * psi, 0 * psi])

    return SpinorField(jet)


def approx_spinor_dirac_closed(eps, C1, C2, curve, t, s, rho):
    """Closed form of D psi_eps."""
    q = radial(curve, t, s, rho)
    p = q.r2 + 1.0
    u1 = rho * rho * p
    s22 = math.sqrt(p * q.K)
    amp = math.sqrt(-s_eps(u1, eps)) * math.exp(-3.0 * eps**4 * rho * math.sqrt(p))
    pref = 3j * eps**4 / (rho * s22) * (1.0 / (u1 * u1 + eps**4) - rho * math.sqrt(p))
    return pref * amp * np.array([C1, -C2], dtype=complex)


# Weak Killing spinors


def wk_spinor_t0(lam, curve, t=0.0):
    """t = 0 WK spinor (e^{-i lam w}, e^{i lam w})/(rho sqrt(r^2+1)), w = sqrt(2(r^2+1)) rho."""
    if t != 0:
        raise DomainError("the explicit WK spinor exists only for t = 0")
    def jet(s, rho, phi):
        c = curve_data(curve, s)
        p = c.r2 + 1.0
        sp = math.sqrt(p)
        w = math.sqrt(2.0 * p) * rho
        e = np.exp(np.array([-1j, 1j]) * lam * w)
        psi = e / (rho * sp)
        # d/drho and d/ds of log(1/(rho sqrt p)) and of w
        dlog_rho = -1.0 / rho
        dlog_s = -c.a / p
        dw_rho = math.sqrt(2.0 * p)
        dw_s = math.sqrt(2.0) * rho * c.a / sp
        sign = np.array([-1j, 1j]) * lam
        d_rho = (dlog_rho + sign * dw_rho) * psi
        d_s = (dlog_s + sign * dw_s) * psi
        return psi, np.array([d_s, d_rho, 0 * psi])

    return SpinorField(jet)


def scalar_curvature_frame_gradient(curve, t, s, rho):
    """(Y1 S, Y2 S, Y3 S); S depends on u1 only, so only Y1 S is nonzero."""
    q = radial(curve, t, s, rho)
    p = q.r2 + 1.0
    X, t4 = q.X, t**4
    s22 = math.sqrt(p * q.K)
    y1 = -(1.0 / s22) * rho**3 * p * p * (4.0 * t4 - 2.0 * X) / (X + t4) ** 2.5
    return np.array([y1, 0.0, 0.0])


def wk_residual(field, lam, curve, t, s, rho, phi):
    """Max over frame directions of |lhs - rhs| in the WK equation (n = 3)."""
    psi = field(s, rho, phi)
    cv = curvature(curve, t, s, rho)
    S = cv.S
    dS = scalar_curvature_frame_gradient(curve, t, s, rho)
    dS_psi = clifford_mul(dS, psi)
    worst = 0.0
    for i in range(3):
        e = np.zeros(3)
        e[i] = 1.0
        lhs = spin_cov_deriv(field, i, curve, t, s, rho, phi)
        ric_x = cv.ricci[i] * e
        rhs = ((3.0 / (4.0 * S)) * dS[i] * psi + (2.0 * lam / S) * clifford_mul(ric_x, psi)
               - lam * clifford_mul(e, psi) + (1.0 / (4.0 * S)) * clifford_mul(e, dS_psi))
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst


def laplacian_scalar_curvature(u1, t):
    X, t4 = u1 * u1, t**4
    return (8.0 * t4 * t4 - 18.0 * X * t4 + X * X) / (X + t4) ** 3


@dataclass(frozen=True)
class IntegrabilityResidual:
    lhs: float
    rhs: float
    residual: float
    full_lhs: float
    full_rhs: float


def wk_integrability_residual(rho, r, t, lam):
    """Reduced identity lam^2(-12 t^8 - 2 X t^4) = (S/2)(t^8 - 6 X t^4), plus the full form.

    The full form 8 lam^2 (2 S^2 - 4|Ric|^2) = 2 S^3 + 3|dS|^2 + 4 S Delta S
    is returned scaled by (X + t^4)^3/16, which makes each side equal to the
    matching reduced side.
    """
    if rho <= 0:
        raise DomainError("rho must be positive")
    p = r * r + 1.0
    X = rho**4 * p * p
    t4 = t**4
    Q = X + t4
    S = -X / Q**1.5
    lhs = lam * lam * (-12.0 * t4 * t4 - 2.0 * X * t4)
    rhs = 0.5 * S * (t4 * t4 - 6.0 * X * t4)
    ric = np.array([2.0 * t4, 2.0 * t4 - X, -4.0 * t4 - X]) / (2.0 * Q**1.5)
    K = 2.0 * rho * rho * p / math.sqrt(Q)
    dS = -(1.0 / math.sqrt(p * K)) * rho**3 * p * p * (4.0 * t4 - 2.0 * X) / Q**2.5
    lapS = laplacian_scalar_curvature(rho * rho * p, t)
    full_lhs = 8.0 * lam * lam * (2.0 * S * S - 4.0 * float(ric @ ric))
    full_rhs = 2.0 * S**3 + 3.0 * dS * dS + 4.0 * S * lapS
    scale = Q**3 / 16.0
    return IntegrabilityResidual(lhs, rhs, lhs - rhs, full_lhs * scale, full_rhs * scale)


# Energy-momentum tensor and T-Killing transport


def energy_momentum(field, curve, t, s, rho, phi, normalized=False):
    psi = field(s, rho, phi)
    nab = [spin_cov_deriv(field, j, curve, t, s, rho, phi) for j in range(3)]
    T = np.zeros((3, 3))
    for i in range(3):
        for j in range(3):
            v = GAMMA[i] @ nab[j] + GAMMA[j] @ nab[i]
            T[i, j] = spinor_inner(v, psi).real
    if normalized:
        n2 = spinor_inner(psi, psi).real
        if n2 == 0:
            raise DomainError("normalized energy-momentum tensor needs a nonzero spinor")
        T = T / n2
    return T


def tkilling_jet_field(curve, t, s0, rho0, phi0, psi0):
    """Spinor whose first jet at one point satisfies nabla_X psi = -1/2 II(X) . psi.

    Away from the point it is extended linearly in the chart; only the value
    and first partials at (s0, rho0, phi0) are meaningful.
    """
    psi0 = np.asarray(psi0, dtype=complex)
    fr = frame(curve, t, s0, rho0)
    w = connection(curve, t, s0, rho0).forms()
    II = second_form(curve, t, s0, rho0).II_frame
    dY = np.zeros((3, 2), dtype=complex)
    for i in range(3):
        v = -0.5 * clifford_mul(II[i], psi0)
        for a in range(3):
            for b in range(a + 1, 3):
                v = v - 0.5 * w[a, b, i] * GAMMA[a] @ (GAMMA[b] @ psi0)
        dY[i] = v
    dchart = fr.omega.T @ dY  # d_a psi = sum_i w^i(d_a) dpsi(Y_i)
    q0 = np.array([s0, rho0, phi0])

    def jet(s, rho, phi):
        d = np.array([s, rho, phi]) - q0
        return psi0 + d @ dchart, dchart

    return SpinorField(jet)


def _transport_generator(curve, t, q, qdot):
    """Matrix A with d psi/d tau = A psi along a chart path."""
    s, rho = q[0], q[1]
    fr = frame(curve, t, s, rho)
    xi = fr.omega @ qdot  # frame components of the velocity
    w = connection(curve, t, s, rho).forms()
    II = second_form(curve, t, s, rho).II_frame
    A = -0.5 * np.einsum("j,jab->ab", II @ xi, GAMMA)
    for a in range(3):
        for b in range(a + 1, 3):
            A = A - 0.5 * (w[a, b] @ xi) * GAMMA[a] @ GAMMA[b]
    return A


def phi_loop(s, rho):
    return (lambda tau: np.array([s, rho, tau]), lambda tau: np.array([0.0, 0.0, 1.0]),
            2.0 * math.pi)


def rectangle_loop(s0, rho0, ds, drho):
    """Counterclockwise rectangle in the (s, rho) plane at phi = 0, unit-speed sides."""
    corners = [(s0, rho0), (s0 + ds, rho0), (s0 + ds, rho0 + drho), (s0, rho0 + drho)]
    lengths = [ds, drho, ds, drho]
    total = sum(lengths)
    edges = np.cumsum([0.0] + lengths)

    def locate(tau):
        k = min(int(np.searchsorted(edges, tau, side="right") - 1), 3)
        a, b = np.array(corners[k]), np.array(corners[(k + 1) % 4])
        direction = (b - a) / lengths[k]
        return a + direction * (tau - edges[k]), direction

    def path(tau):
        pos, _ = locate(tau)
        return np.array([pos[0], pos[1], 0.0])

    def velocity(tau):
        _, d = locate(tau)
        return np.array([d[0], d[1], 0.0])

    return path, velocity, total, edges


def tkilling_transport(curve, t, loop, psi0, tol=1e-12):
    """Integrate nabla_{gamma'} psi = -1/2 II(gamma') . psi around a closed chart loop.

    `loop` is (path, velocity, length) or (path, velocity, length, breakpoints).
    Returns (psi_final, holonomy_defect, max relative norm drift).
    """
    path, velocity, length = loop[:3]
    breaks = loop[3] if len(loop) > 3 else [0.0, length]
    psi0 = np.asarray(psi0, dtype=complex)
    y = np.concatenate([psi0.real, psi0.imag])
    n0 = np.linalg.norm(psi0)
    drift = 0.0

    def rhs(tau, yy):
        psi = yy[:2] + 1j * yy[2:]
        q = path(tau)
        if q[1] <= 0:
            raise DomainError("loop leaves the chart (rho <= 0)")
        dpsi = _transport_generator(curve, t, q, velocity(tau)) @ psi
        return np.concatenate([dpsi.real, dpsi.imag])

    for a, b in zip(breaks[:-1], breaks[1:]):
        if b <= a:
            continue
        sol = solve_ivp(rhs, (a, b), y, method="DOP853", rtol=tol, atol=tol)
        if not sol.success:
            raise RuntimeError(sol.message)
        y = sol.y[:, -1]
        norms = np.hypot(sol.y[:2], sol.y[2:])
        drift = max(drift, float(np.max(np.abs(np.linalg.norm(norms, axis=0) - n0))) / n0)
    psi = y[:2] + 1j * y[2:]
    return psi, float(np.linalg.norm(psi - psi0) / n0), drift


# Radial Dirac system


@dataclass(frozen=True)
class RadialDiracProblem:
    alpha: int
    beta: int
    lam: float
    r0: float
    t: float
    eps: int = 1

    @property
    def phidot(self):
        return self.eps / self.r0

    @property
    def delta(self):
        p = self.r0 * self.r0 + 1.0
        return (p * self.beta - self.r0 * self.r0 * self.alpha) * self.phidot / 2.0

    def _q(self, rho):
        return radial(CircleCurve(self.r0, self.eps), self.t, 0.0, rho)

    def f(self, rho):
        return (self.delta * self._q(rho).K - 1j * self.alpha) / rho

    def g(self, rho):
        return (self.delta * self._q(rho).K + 1j * self.alpha) / rho

    def sqrt_h22(self, rho):
        return math.sqrt((self.r0**2 + 1.0) * self._q(rho).K)

    def p(self, rho):
        q = self._q(rho)
        dK = q.K * q.dlogK
        return (1.0 / rho - self.delta * dK / (self.delta * q.K - 1j * self.alpha)
                - 2j * self.lam * self.sqrt_h22(rho))

    def q(self, rho):
        K = self._q(rho).K
        return -((self.delta * K) ** 2 + self.alpha**2) / rho**2

    def hartman(self, rho):
        """Re[-q - |p|^2/4]; nonnegative means |chi|^2 is concave in the Hartman sense."""
        return float((-self.q(rho) - abs(self.p(rho)) ** 2 / 4.0).real)


@dataclass(frozen=True)
class RadialDiracSolution:
    rho: np.ndarray
    chi: np.ndarray  # shape (2, n)
    hartman: np.ndarray
    concavity_min: float

    @property
    def hartman_ok(self):
        return bool(np.all(self.hartman >= 0.0))


def radial_dirac_solve(prob, rho_span, chi0, tol=1e-10, n_out=200):
    """Solve the radial Dirac eigen-system for chi = rho * R.

    chi' = M chi with M = [[-i lam sqrt(h22), f], [g, i lam sqrt(h22)]].
    chi0 gives chi at rho_span[0]. The solution carries the Hartman indicator
    along the grid and the smallest normalized second difference of |chi|^2
    in the variable log(rho).
    """
    a, b = rho_span
    if not 0 < a < b:
        raise DomainError("rho_span must satisfy 0 < start < end")

    def rhs(rho, y):
        chi = y[:2] + 1j * y[2:]
        lam_term = 1j * prob.lam * prob.sqrt_h22(rho)
        d = np.array([
            -lam_term * chi[0] + prob.f(rho) * chi[1],
            prob.g(rho) * chi[0] + lam_term * chi[1],
        ])
        return np.concatenate([d.real, d.imag])

    chi0 = np.asarray(chi0, dtype=complex)
    grid = np.geomspace(a, b, n_out)
    sol = solve_ivp(rhs, (a, b), np.concatenate([chi0.real, chi0.imag]), method="DOP853",
                    rtol=tol, atol=tol * 1e-3, t_eval=grid)
    if not sol.success:
        raise RuntimeError(f"radial Dirac integration failed near rho={sol.t[-1]:.3g}: {sol.message}")
    chi = sol.y[:2] + 1j * sol.y[2:]
    mag = np.sum(np.abs(chi) ** 2, axis=0)
    second = (mag[2:] - 2.0 * mag[1:-1] + mag[:-2]) / np.maximum(mag[1:-1], 1e-300)
    hart = np.array([prob.hartman(r) for r in sol.t]) if prob.alpha or prob.lam else np.zeros(0)
    return RadialDiracSolution(sol.t, chi, hart, float(second.min()) if second.size else 0.0)


def beta_l2_norm_sq(beta, r0, t, rho_max, eps=1, B=1.0):
    """||psi_beta||^2 over rho in (0, rho_max) with B1 = B2 = B and phi over [0, 2 pi)."""
    p = r0 * r0 + 1.0
    length = 2.0 * math.pi * r0

    def integrand(rho):
        u1 = rho * rho * p
        root = math.sqrt(u1 * u1 + t**4)
        det = 8.0 * rho**6 * p * p / root
        return beta_radial_factor(beta, r0, t, rho, eps) ** 2 / rho**2 * math.sqrt(det)

    return 2.0 * math.pi * length * 2.0 * abs(B) ** 2 * quadrature(integrand, 0.0, rho_max, tol=1e-12)


def l2_inner(a, b, curve, t, box, n=24):
    """<a, b>_{L^2} over the chart box ((s0, s1), (rho0, rho1), (phi0, phi1)) by Gauss-Legendre."""
    x, w = np.polynomial.legendre.leggauss(n)
    nodes, weights = [], []
    for lo, hi in box:
        nodes.append(0.5 * (hi - lo) * x + 0.5 * (hi + lo))
        weights.append(0.5 * (hi - lo) * w)
    total = 0j
    for s, ws in zip(nodes[0], weights[0]):
        for rho, wr in zip(nodes[1], weights[1]):
            vol = math.sqrt(np.linalg.det(induced_metric(curve, t, s, rho).matrix()))
            for phi, wp in zip(nodes[2], weights[2]):
                total += ws * wr * wp * vol * spinor_inner(a(s, rho, phi), b(s, rho, phi))
    return total
