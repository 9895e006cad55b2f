"""Finite-difference tensor calculus used as an independent cross-check.

Everything here works from raw metric or embedding callables. Nothing in this
module imports the closed-form geometry modules.
"""

import numpy as np


def default_step(coords, index, scale=1e-3):
    return scale * max(1.0, abs(float(coords[index])))


def fd_partial(f, coords, index, h=None):
    """Central difference with one Richardson step, O(h**4)."""
    x = np.asarray(coords, dtype=float)
    if h is None:
        h = default_step(x, index)

    def central(step):
        xp = x.copy()
        xm = x.copy()
        xp[index] += step
        xm[index] -= step
        return (np.asarray(f(xp)) - np.asarray(f(xm))) / (2.0 * step)

    return (4.0 * central(h / 2.0) - central(h)) / 3.0


def fd_gradient(f, coords, h=None):
    """Stack of partials; the derivative index comes first."""
    x = np.asarray(coords, dtype=float)
    return np.stack([fd_partial(f, x, i, None if h is None else h * max(1.0, abs(x[i])))
                     for i in range(len(x))])


def fd_christoffels(metric_fn, coords, h=None):
    """Gamma[k, i, j] = Gamma^k_{ij} from first derivatives of the metric."""
    x = np.asarray(coords, dtype=float)
    g = np.asarray(metric_fn(x))
    if np.any(np.linalg.eigvalsh(g) <= 0):
        raise ValueError("metric is not positive definite at this point")
    dg = fd_gradient(metric_fn, x, h)  # dg[m, i, j] = d_m g_ij
    # first[i, j, k] = 1/2 (d_j g_ik + d_i g_jk - d_k g_ij)
    first = 0.5 * (np.einsum("jik->ijk", dg) + dg - np.einsum("kij->ijk", dg))
    return np.einsum("kl,ijl->kij", np.linalg.inv(g), first)


def fd_riemann(christoffel_fn, coords, h=None):
    """R[a, b, c, d] = R^a_{bcd} = d_c Gamma^a_{db} - d_d Gamma^a_{cb} + ..."""
    x = np.asarray(coords, dtype=float)
    gam = np.asarray(christoffel_fn(x))
    dgam = fd_gradient(christoffel_fn, x, h)  # dgam[m, a, i, j] = d_m Gamma^a_ij
    term1 = np.einsum("cadb->abcd", dgam)
    term2 = np.einsum("dacb->abcd", dgam)
    term3 = np.einsum("ace,edb->abcd", gam, gam)
    term4 = np.einsum("ade,ecb->abcd", gam, gam)
    return term1 - term2 + term3 - term4


def fd_ricci(christoffel_fn, coords, h=None):
    """Ric_{bd} = R^a_{bad}."""
    return np.einsum("abad->bd", fd_riemann(christoffel_fn, coords, h))


def metric_christoffel_fn(metric_fn, h=None):
    return lambda x: fd_christoffels(metric_fn, x, h)


def fd_ricci_from_metric(metric_fn, coords, h_inner=1e-3, h_outer=1e-2):
    return fd_ricci(metric_christoffel_fn(metric_fn, h_inner), coords, h_outer)


def fd_scalar_curvature(metric_fn, coords, h_inner=1e-3, h_outer=1e-2):
    g = np.asarray(metric_fn(np.asarray(coords, dtype=float)))
    return float(np.einsum("ij,ij->", np.linalg.inv(g),
                           fd_ricci_from_metric(metric_fn, coords, h_inner, h_outer)))


def fd_pullback(embedding, ambient_metric, chart_coords, h=None):
    """Induced metric J^T g J with the Jacobian of the embedding by differences."""
    q = np.asarray(chart_coords, dtype=float)
    J = fd_gradient(embedding, q, h)  # J[i, a] = d_i x^a
    g = np.asarray(ambient_metric(np.asarray(embedding(q))))
    return J @ g @ J.T


def fd_shape_operator(embedding, normal_fn, ambient_metric, ambient_christoffels,
                      chart_coords, h=None):
    """II[i, j] = g(d_i Psi, nabla_{d_j} N) with N given on chart coordinates."""
    q = np.asarray(chart_coords, dtype=float)
    x = np.asarray(embedding(q))
    J = fd_gradient(embedding, q, h)
    dN = fd_gradient(normal_fn, q, h)  # dN[j, a] = d_j N^a
    N = np.asarray(normal_fn(q))
    gam = np.asarray(ambient_christoffels(x))
    cov = dN + np.einsum("aeb,je,b->ja", gam, J, N)
    g = np.asarray(ambient_metric(x))
    return np.einsum("ia,ab,jb->ij", J, g, cov)


def fd_laplacian(f, metric_fn, coords, h_inner=1e-3, h_outer=1e-2):
    """Positive Laplacian -1/sqrt(g) d_i (sqrt(g) g^ij d_j f)."""
    x = np.asarray(coords, dtype=float)

    def flux(y):
        g = np.asarray(metric_fn(y))
        grad = fd_gradient(f, y, h_inner)
        return np.sqrt(np.linalg.det(g)) * np.linalg.solve(g, grad)

    div = sum(fd_partial(lambda y, i=i: flux(y)[i], x, i, h_outer * max(1.0, abs(x[i])))
              for i in range(len(x)))
    return -float(div) / np.sqrt(np.linalg.det(np.asarray(metric_fn(x))))


def fd_covariant_metric(metric_fn, christoffel_fn, coords, h=None):
    """nabla_m g_ij = d_m g_ij - Gamma^k_{mi} g_kj - Gamma^k_{mj} g_ik."""
    x = np.asarray(coords, dtype=float)
    g = np.asarray(metric_fn(x))
    gam = np.asarray(christoffel_fn(x))
    dg = fd_gradient(metric_fn, x, h)
    return dg - np.einsum("kmi,kj->mij", gam, g) - np.einsum("kmj,ik->mij", gam, g)
