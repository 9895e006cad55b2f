"""Eguchi-Hanson metric on the dense chart (x1, x2, x3, x4) of C^2 minus the origin."""

from dataclasses import dataclass

import numpy as np

from .specfun import DomainError


@dataclass(frozen=True)
class Potentials:
    u1: float
    t: float
    G: float
    H: float
    K: float
    I: float
    C: float
    A1: float
    A2: float
    B1: float
    B2: float


def _coords(x):
    x = np.asarray(x, dtype=float)
    if x.shape != (4,):
        raise DomainError(f"ambient point needs 4 coordinates, got shape {x.shape}")
    u1 = float(x @ x)
    if u1 <= 0.0:
        raise DomainError("u1 must be positive (origin is singular)")
    return x, u1


def potentials(x, t):
    x, u1 = _coords(x)
    if t < 0:
        raise DomainError("t must be nonnegative")
    t4 = t**4
    root = np.sqrt(u1 * u1 + t4)
    G = 2.0 * root / u1
    H = 2.0 * t4 / (u1 * u1 * root)
    K = 2.0 * u1 / root
    I = 2.0 * t4 * (3.0 * u1 * u1 + 2.0 * t4) / (u1**3 * root**3)
    p12 = x[0] ** 2 + x[1] ** 2
    p34 = x[2] ** 2 + x[3] ** 2
    A1 = 0.5 * H * H * p34 - 0.25 * G * (2.0 * H - I * p12)
    A2 = 0.5 * H * H * p12 - 0.25 * G * (2.0 * H - I * p34)
    B1 = 0.25 * (G * (H - I * p12) + H * H * (p12 - p34))
    B2 = 0.25 * (G * (H - I * p34) + H * H * (p34 - p12))
    return Potentials(u1=u1, t=t, G=G, H=H, K=K, I=I, C=I * G - 2.0 * H * H,
                      A1=A1, A2=A2, B1=B1, B2=B2)


def _blocks(x, P):
    x1, x2, x3, x4 = x
    G1 = P.G - P.H * (x1 * x1 + x2 * x2)
    G2 = P.G - P.H * (x3 * x3 + x4 * x4)
    G3 = P.H * (x1 * x4 - x2 * x3)
    G4 = P.H * (x1 * x3 + x2 * x4)
    return G1, G2, G3, G4


def metric(x, t):
    x, _ = _coords(x)
    G1, G2, G3, G4 = _blocks(x, potentials(x, t))
    return np.array([
        [G1, 0.0, -G4, -G3],
        [0.0, G1, G3, -G4],
        [-G4, G3, G2, 0.0],
        [-G3, -G4, 0.0, G2],
    ])


def metric_inverse(x, t):
    """Closed-form inverse; the prefactor is 1/sqrt(det g) = 1/4."""
    x, _ = _coords(x)
    G1, G2, G3, G4 = _blocks(x, potentials(x, t))
    return 0.25 * np.array([
        [G2, 0.0, G4, G3],
        [0.0, G2, -G3, G4],
        [G4, -G3, G1, 0.0],
        [G3, G4, 0.0, G1],
    ])


def metric_det_factored(x, t):
    x, _ = _coords(x)
    G1, G2, G3, G4 = _blocks(x, potentials(x, t))
    return (G1 * G2 - G3 * G3 - G4 * G4) ** 2


# Base formulas. Each takes the point and its potentials and returns one symbol.
# Indices are zero-based: (0, 0, 0) is Gamma_111.

def _f111(x, P):
    return -x[0] * (2 * P.H - P.I * (x[0] ** 2 + x[1] ** 2))


def _f112(x, P):
    return x[1] * (2 * P.H - P.I * (x[0] ** 2 + x[1] ** 2))


def _f113(x, P):
    return 2 * P.I * (x[0] * x[1] * x[3] + 0.5 * x[2] * (x[0] ** 2 - x[1] ** 2))


def _f114(x, P):
    return -2 * P.I * (x[0] * x[1] * x[2] + 0.5 * x[3] * (x[1] ** 2 - x[0] ** 2))


def _f131(x, P):
    return -x[2] * (P.H - P.I * (x[0] ** 2 + x[1] ** 2))


def _f132(x, P):
    return x[3] * (P.H - P.I * (x[0] ** 2 + x[1] ** 2))


FIRST_KIND_BASE = {
    (0, 0, 0): _f111, (0, 0, 1): _f112, (0, 0, 2): _f113,
    (0, 0, 3): _f114, (0, 2, 0): _f131, (0, 2, 1): _f132,
}


def _s11(x, P):
    return x[0] * P.A1


def _s12(x, P):
    return -x[1] * P.A1


def _s13(x, P):
    return 0.5 * P.C * (x[0] * x[1] * x[3] + 0.5 * x[2] * (x[0] ** 2 - x[1] ** 2))


def _s14(x, P):
    return -0.5 * P.C * (x[0] * x[1] * x[2] + 0.5 * x[3] * (x[1] ** 2 - x[0] ** 2))


def _s33(x, P):
    return x[2] * P.A2


def _s34(x, P):
    return -x[3] * P.A2


def _s31(x, P):
    return 0.5 * P.C * (x[1] * x[2] * x[3] + 0.5 * x[0] * (x[2] ** 2 - x[3] ** 2))


def _s32(x, P):
    return -0.5 * P.C * (x[0] * x[2] * x[3] + 0.5 * x[1] * (x[3] ** 2 - x[2] ** 2))


def _s131(x, P):
    return -x[2] * P.B1


def _s132(x, P):
    return x[3] * P.B1


def _s133(x, P):
    return -x[0] * P.B2


def _s134(x, P):
    return x[1] * P.B2


# Second kind keyed as (upper, lower_i, lower_j).
SECOND_KIND_BASE = {
    (0, 0, 0): _s11, (1, 0, 0): _s12, (2, 0, 0): _s13, (3, 0, 0): _s14,
    (2, 2, 2): _s33, (3, 2, 2): _s34, (0, 2, 2): _s31, (1, 2, 2): _s32,
    (0, 0, 2): _s131, (1, 0, 2): _s132, (2, 0, 2): _s133, (3, 0, 2): _s134,
}

_BAR = (2, 3, 0, 1)


def _lower_pair_rules(pair):
    """Equalities (sign, other_pair, shift) between lower index pairs.

    A rule (sign, q, d) means Gamma[pair, k] = sign * Gamma[q, k + d] for the
    free index k, subject to the parity condition encoded in d: d = -1 only for
    odd one-based k, d = +1 only for even one-based k.
    """
    rules = []
    table = [
        ((1, 1), -1, (0, 0), 0), ((3, 3), -1, (2, 2), 0),
        ((1, 2), 1, (0, 3), 0), ((1, 3), -1, (0, 2), 0),
    ]
    for lhs, sign, rhs, d in table:
        if pair == lhs:
            rules.append((sign, rhs, d))
        if pair == rhs:
            rules.append((sign, lhs, d))
    return rules


def _shift_pairs():
    # Gamma_{12 i} = Gamma_{11 (i-1)} for even i, = -Gamma_{11 (i+1)} for odd i.
    return [((0, 1), (0, 0)), ((0, 3), (0, 2)), ((2, 3), (2, 2))]


def _generate(base, free_first):
    """Close a base table under the index relations.

    Entries map a full index triple to (sign, base_key, barred) where barred
    says the base formula is evaluated at the swapped point (x3, x4, x1, x2).
    `free_first` marks tables keyed (free, i, j) rather than (i, j, free).
    """
    def split(key):
        return (key[0], (key[1], key[2])) if free_first else (key[2], (key[0], key[1]))

    def join(free, pair):
        return (free, pair[0], pair[1]) if free_first else (pair[0], pair[1], free)

    def canon(pair):
        return tuple(sorted(pair))

    table = {}
    for key in base:
        free, pair = split(key)
        table[join(free, canon(pair))] = (1, key, False)

    changed = True
    while changed:
        changed = False
        for key, (sign, bkey, barred) in list(table.items()):
            free, pair = split(key)
            candidates = []
            for s, other, d in _lower_pair_rules(pair):
                candidates.append((join(free, canon(other)), s))
            for lhs, rhs in _shift_pairs():
                k1 = free + 1
                if pair == rhs:
                    # Gamma_{lhs,i} for even i uses Gamma_{rhs,i-1}; odd i uses -Gamma_{rhs,i+1}.
                    if k1 % 2 == 1:
                        candidates.append((join(free + 1, lhs), 1))
                    else:
                        candidates.append((join(free - 1, lhs), -1))
                if pair == lhs:
                    if k1 % 2 == 0:
                        candidates.append((join(free - 1, rhs), 1))
                    else:
                        candidates.append((join(free + 1, rhs), -1))
            bar_pair = canon((_BAR[pair[0]], _BAR[pair[1]]))
            candidates.append((join(_BAR[free], bar_pair), "bar"))
            for new_key, s in candidates:
                if new_key in table:
                    continue
                if s == "bar":
                    table[new_key] = (sign, bkey, not barred)
                else:
                    table[new_key] = (sign * s, bkey, barred)
                changed = True
    full = {}
    for key, val in table.items():
        free, pair = split(key)
        full[key] = val
        full[join(free, (pair[1], pair[0]))] = val
    return full


FIRST_KIND_TABLE = _generate(FIRST_KIND_BASE, free_first=False)
SECOND_KIND_TABLE = _generate(SECOND_KIND_BASE, free_first=True)


def _evaluate(table, base, x, t):
    x, _ = _coords(x)
    xb = x[list(_BAR)]
    P = potentials(x, t)
    Pb = potentials(xb, t)
    out = np.zeros((4, 4, 4))
    for key, (sign, bkey, barred) in table.items():
        out[key] = sign * (base[bkey](xb, Pb) if barred else base[bkey](x, P))
    return out


def christoffels_first(x, t):
    """Gamma[i, j, k] = Gamma_{ijk}, symmetric in (i, j)."""
    return _evaluate(FIRST_KIND_TABLE, FIRST_KIND_BASE, x, t)


def christoffels_second(x, t):
    """Gamma[k, i, j] = Gamma^k_{ij}, symmetric in (i, j)."""
    return _evaluate(SECOND_KIND_TABLE, SECOND_KIND_BASE, x, t)


def christoffels_second_contracted(x, t):
    """Gamma^k_{ij} = g^{kl} Gamma_{ijl}, using the closed-form inverse."""
    return np.einsum("kl,ijl->kij", metric_inverse(x, t), christoffels_first(x, t))
