"""HTTP service wrapping the geometry core.

Each endpoint takes a RunConfig and returns the same model the CLI prints.
Run with `uvicorn ehgeom.service:app`.
"""

import math

import numpy as np
from fastapi import FastAPI, HTTPException

from . import ambient, geodesics, oracle, spectral, spinors
from .curves import CircleCurve, curve_data, curve_from_dict
from .hypersurface import curvature, embed, frame, induced_metric, second_form, unit_normal
from .schemas import (
    BoundConstantsModel, CheckResult, DiracRayleighModel, GeodesicReport, LaplaceRayleighModel,
    RunConfig, SpectralReport, Table, VerifyReport,
)
from .specfun import ConvergenceError, DomainError

GEOMETRY_COLUMNS = ["s", "rho", "phi", "h11", "h12", "h13", "h22", "h23", "h33",
                    "ric1", "ric2", "ric3", "S", "mean_H", "sigma2"]


def build_curve(cfg):
    return curve_from_dict(cfg.curve.as_dict())


def _grid(cfg):
    for s in cfg.grid.s.values():
        for rho in cfg.grid.rho.values():
            for phi in cfg.grid.phi.values():
                yield s, rho, phi


def run_geometry(cfg: RunConfig) -> Table:
    curve = build_curve(cfg)
    rows = []
    for s, rho, phi in _grid(cfg):
        h = induced_metric(curve, cfg.t, s, rho).matrix()
        cv = curvature(curve, cfg.t, s, rho)
        sf = second_form(curve, cfg.t, s, rho)
        rows.append([s, rho, phi, h[0, 0], h[0, 1], h[0, 2], h[1, 1], h[1, 2], h[2, 2],
                     *cv.ricci, cv.S, sf.mean_H, sf.sigma2])
    return Table(columns=GEOMETRY_COLUMNS, rows=rows)


def _trajectory_table(traj):
    cols = ["tau", "s", "rho", "phi", "sdot", "rhodot", "phidot", "E", "M1", "M2"]
    rows = []
    for k in range(len(traj.tau)):
        fi = traj.integrals[k]
        rows.append([float(traj.tau[k]), *map(float, traj.states[k]), fi.E, fi.M1,
                     math.nan if fi.M2 is None else fi.M2])
    return Table(columns=cols, rows=rows)


def _drift(values):
    values = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(values)):
        return math.nan
    return float(np.max(np.abs(values - values[0])) / max(1.0, abs(values[0])))


def run_geodesic(cfg: RunConfig) -> GeodesicReport:
    g = cfg.geodesic
    curve = build_curve(cfg)
    if g.kind == "closed":
        if not isinstance(curve, CircleCurve):
            raise DomainError("closed geodesics need a circle base")
        rep = geodesics.closed_geodesic_check(g.rho, curve.r0, cfg.t, g.n, g.m, curve.eps,
                                              tol=min(cfg.tol, 1e-10))
        summary = {k: float(v) for k, v in rep.__dict__.items()}
        init = geodesics.GeodesicState(0.0, 0.0, g.rho, 0.0, rep.sdot, 0.0, rep.phidot)
        traj = geodesics.integrate(curve, cfg.t, init, rep.period, tol=cfg.tol, n_out=g.n_out)
        return GeodesicReport(kind=g.kind, status=traj.status, table=_trajectory_table(traj),
                              summary=summary)
    if g.kind == "radial":
        h22 = induced_metric(curve, cfg.t, g.s, g.rho).h22
        init = geodesics.GeodesicState(0.0, g.s, g.rho, g.phi, 0.0, -1.0 / math.sqrt(h22), 0.0)
        traj = geodesics.integrate(curve, cfg.t, init, g.tau_end, tol=cfg.tol, n_out=g.n_out)
        rho_end = float(traj.states[-1, 1])
        length = float(traj.tau[-1])
        summary = {"tau_end": length, "rho_end": rho_end}
        if traj.status == "rho_floor" and isinstance(curve, CircleCurve):
            # the last stretch below the floor is added in closed form
            summary["length_to_zero_section"] = length + geodesics.distance_to_zero_section(
                rho_end, curve.r0, cfg.t)
            summary["distance_closed_form"] = geodesics.distance_to_zero_section(
                g.rho, curve.r0, cfg.t)
    else:
        init = geodesics.GeodesicState(0.0, g.s, g.rho, g.phi, g.sdot, g.rhodot, g.phidot)
        traj = geodesics.integrate(curve, cfg.t, init, g.tau_end, tol=cfg.tol, n_out=g.n_out)
        summary = {}
    table = _trajectory_table(traj)
    for name in ("E", "M1", "M2"):
        k = table.columns.index(name)
        summary[f"{name}_drift"] = _drift([r[k] for r in table.rows])
    return GeodesicReport(kind=g.kind, status=traj.status, table=table, summary=summary)


def run_spectral(cfg: RunConfig) -> SpectralReport:
    curve = build_curve(cfg)
    sp = cfg.spectral
    dirac = []
    for eps in sp.eps_list:
        res = spectral.dirac_rayleigh(eps, cfg.t, curve, n_s=sp.n_s, a=cfg.a)
        constants = None
        bound = None
        if 2.0 * eps**4 < cfg.t**4:
            r = math.sqrt(curve_data(curve, 0.0).r2)
            bc = spectral.bound_constants(eps, cfg.t, cfg.a, r)
            constants = BoundConstantsModel(Pa=bc.P_a, mu=bc.mu, M=bc.M, N=bc.N, Q=bc.Q)
            bound = float(res.bound)
        dirac.append(DiracRayleighModel(eps=eps, t=cfg.t, norm_sq=res.numerator,
                                        dirac_norm_sq=res.denominator, quotient=res.quotient,
                                        analytic_bound=bound, constants=constants))
    ordered = sorted(dirac, key=lambda d: -d.eps)
    decreasing = all(b.quotient < a.quotient for a, b in zip(ordered, ordered[1:]))
    le = sp.laplace_eps if sp.laplace_eps is not None else cfg.eps
    lr = spectral.laplace_rayleigh(le, cfg.t, curve, n_s=sp.n_s)
    laplace = LaplaceRayleighModel(eps=le, t=cfg.t, numerator=lr.numerator,
                                   denominator=lr.denominator, quotient=lr.quotient,
                                   bound=lr.bound)
    lower = upper = None
    if cfg.t > 0:
        lower, upper = spectral.ricci_spectral_bounds(cfg.t)
    return SpectralReport(dirac=dirac, dirac_decreasing=decreasing, laplace=laplace,
                          ricci_lower=lower, mu0_upper=upper)


def run_spinor(cfg: RunConfig) -> Table:
    curve = build_curve(cfg)
    spec = cfg.spinor
    C1, C2 = complex(*spec.C1), complex(*spec.C2)
    basic = spinors.harmonic_spinor_basic(C1, C2, curve)
    approx = spinors.approx_spinor(cfg.eps, C1, C2, curve)
    wk = spinors.wk_spinor_t0(cfg.lam, curve)
    betas = []
    if isinstance(curve, CircleCurve) and cfg.t > 0:
        betas = [spinors.harmonic_spinor_beta(b, C1, C1, curve.r0, cfg.t, curve.eps)
                 for b in spec.betas]
    cols = ["s", "rho", "phi", "basic_residual",
            *[f"beta{b}_residual" for b in spec.betas],
            "psi_eps_gap", "wk_t0_residual", "holonomy_defect"]
    rows = []
    for s, rho, phi in _grid(cfg):
        row = [s, rho, phi, float(np.max(np.abs(spinors.dirac_apply(basic, curve, cfg.t, s, rho, phi))))]
        if betas:
            row += [float(np.max(np.abs(spinors.dirac_apply(f, curve, cfg.t, s, rho, phi))))
                    for f in betas]
        else:
            row += [math.nan] * len(spec.betas)
        closed = spinors.approx_spinor_dirac_closed(cfg.eps, C1, C2, curve, cfg.t, s, rho)
        row.append(float(np.max(np.abs(spinors.dirac_apply(approx, curve, cfg.t, s, rho, phi) - closed))))
        row.append(spinors.wk_residual(wk, cfg.lam, curve, 0.0, s, rho, phi))
        if spec.holonomy:
            _, defect, _ = spinors.tkilling_transport(curve, cfg.t, spinors.phi_loop(s, rho),
                                                      [C1, C2], tol=min(cfg.tol, 1e-10))
            row.append(defect)
        else:
            row.append(math.nan)
        rows.append(row)
    return Table(columns=cols, rows=rows)


def _check(name, value, threshold):
    value = float(value)
    return CheckResult(name=name, value=value, threshold=threshold,
                       passed=bool(np.isfinite(value) and value <= threshold))


def run_verify(cfg: RunConfig) -> VerifyReport:
    """Closed forms against the finite-difference oracle at a few fixed points."""
    t = cfg.t if cfg.t > 0 else 1.0
    curve = build_curve(cfg)
    checks = []
    x = np.array([0.7, -0.4, 0.9, 0.3])
    gfn = lambda y: ambient.metric(y, t)
    checks.append(_check("ambient Ricci-flat (FD)", np.max(np.abs(oracle.fd_ricci_from_metric(gfn, x))), 1e-5))
    checks.append(_check("ambient det g = 16", abs(np.linalg.det(ambient.metric(x, t)) - 16.0), 1e-9))
    checks.append(_check("ambient Christoffels vs FD",
                         np.max(np.abs(ambient.christoffels_second(x, t) - oracle.fd_christoffels(gfn, x))), 1e-8))
    pts = [(0.0, 1.0, 0.3), (0.4, 0.6, 1.1)]
    worst = {"metric": 0.0, "ricci": 0.0, "II": 0.0, "sigma2": 0.0, "lap": 0.0, "dirac": 0.0}
    for s, rho, phi in pts:
        q = np.array([s, rho, phi])
        emb = lambda y: np.asarray(embed(curve, y[0], y[1], y[2]))
        h = induced_metric(curve, t, s, rho).matrix()
        h_fd = oracle.fd_pullback(emb, gfn, q)
        worst["metric"] = max(worst["metric"], np.max(np.abs(h - h_fd)) / np.max(np.abs(h)))
        mfn = lambda y: induced_metric(curve, t, y[0], y[1]).matrix()
        ric_fd = oracle.fd_ricci_from_metric(mfn, q)
        Y = frame(curve, t, s, rho).Y
        ric = np.diag(curvature(curve, t, s, rho).ricci)
        worst["ricci"] = max(worst["ricci"], np.max(np.abs(Y @ ric_fd @ Y.T - ric)))
        nfn = lambda y: unit_normal(curve, t, y[0], y[1], y[2])
        II_fd = oracle.fd_shape_operator(emb, nfn, gfn, lambda z: ambient.christoffels_second(z, t), q)
        sf = second_form(curve, t, s, rho)
        worst["II"] = max(worst["II"], np.max(np.abs(II_fd - sf.II_coord)))
        worst["sigma2"] = max(worst["sigma2"], abs(sf.sigma2 - curvature(curve, t, s, rho).S / 2.0))
        field = spectral.phi_star_field(curve)
        lap = spectral.laplacian_scalar(field, curve, t, s, rho, phi)
        lap_fd = oracle.fd_laplacian(lambda y: field(*y), mfn, q)
        worst["lap"] = max(worst["lap"], abs(lap - lap_fd))
        sp = spinors.approx_spinor(0.7, 1.0, 1j, curve)
        worst["dirac"] = max(worst["dirac"], np.max(np.abs(
            spinors.dirac_apply(sp, curve, t, s, rho, phi) - spinors.dirac_frame_sum(sp, curve, t, s, rho, phi))))
    checks.append(_check("induced metric vs FD pullback", worst["metric"], 1e-8))
    checks.append(_check("induced Ricci vs FD", worst["ricci"], 1e-5))
    checks.append(_check("second fundamental form vs FD shape operator", worst["II"], 1e-7))
    checks.append(_check("sigma2 = S/2", worst["sigma2"], 1e-12))
    checks.append(_check("Laplacian vs FD", worst["lap"], 1e-4))
    checks.append(_check("Dirac matrix form vs frame sum", worst["dirac"], 1e-10))
    if isinstance(curve, CircleCurve):
        r0 = curve.r0
        d = geodesics.distance_to_zero_section(1.0, r0, t)
        dq = geodesics.distance_quadrature(1.0, r0, t)
        checks.append(_check("distance 2F1 vs quadrature", abs(d - dq) / dq, 1e-10))
        init = geodesics.GeodesicState(0.0, 0.0, 1.0, 0.0, 0.3, 0.1, 0.5)
        traj = geodesics.integrate(curve, t, init, 10.0, tol=min(cfg.tol, 1e-10), n_out=21)
        E = [fi.E for fi in traj.integrals]
        checks.append(_check("geodesic energy drift", _drift(E), 1e-8))
    return VerifyReport(checks=checks)


app = FastAPI(title="ehgeom", version="0.1.0")


def _guard(fn, cfg):
    try:
        return fn(cfg)
    except DomainError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    except ConvergenceError as exc:
        raise HTTPException(status_code=500, detail=str(exc)) from exc


@app.get("/health")
def health():
    return {"status": "ok"}


@app.post("/geometry", response_model=Table)
def geometry(cfg: RunConfig):
    return _guard(run_geometry, cfg)


@app.post("/geodesic", response_model=GeodesicReport)
def geodesic(cfg: RunConfig):
    return _guard(run_geodesic, cfg)


@app.post("/spectral", response_model=SpectralReport)
def spectral_report(cfg: RunConfig):
    return _guard(run_spectral, cfg)


@app.post("/spinor", response_model=Table)
def spinor(cfg: RunConfig):
    return _guard(run_spinor, cfg)


@app.post("/verify", response_model=VerifyReport)
def verify(cfg: RunConfig):
    return _guard(run_verify, cfg)
