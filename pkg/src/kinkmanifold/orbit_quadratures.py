"""Quadrature invariants of the first-order flow.

With ``c = (abar^2, a2, a3, 0)``, ``s_j = sqrt(1 - c_j)`` and
``F_j = s_j prod_{l != j} (c_j - c_l)``, every solution keeps

    I_k = 1/2 sum_i (-1)^beta_i sum_j c_j^k / F_j * log|(t_i - s_j)/(t_i + s_j)|

constant for k = 0, 1 and makes ``I_2 - x`` constant, where
``t_i = sqrt(1 - lambda_i)``.  The orbit constants are
``gamma2 = I_0``, ``gamma3 = I_1`` and ``gamma1 = I_2 - x``.  Everything is
kept in log space; the exponents 1/F_j can be large.

On a face ``lambda_m = c_k`` one log diverges.  The combination
``I_1 - c_k I_0`` has no ``j = k`` term and stays finite; it is the
orbit constant of the corresponding non-generic family.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import root

from .errors import DomainError, NumericalError, ValidationError
from .model_core import EllipticPoint, ModelParams
from .superpotential import SignSector

#: Largest |log ratio| kept before weighting.
LOG_CLAMP = 700.0


@dataclass(frozen=True)
class OrbitConstants:
    gamma1: float
    gamma2: float
    gamma3: float
    contacts: tuple[tuple[int, int], ...] = ()
    reduced: float | None = None

    @property
    def is_generic(self) -> bool:
        return all(math.isfinite(g) for g in (self.gamma1, self.gamma2, self.gamma3))

    def negated(self) -> "OrbitConstants":
        red = None if self.reduced is None else -self.reduced
        return OrbitConstants(-self.gamma1, -self.gamma2, -self.gamma3, self.contacts, red)


@dataclass(frozen=True)
class OrbitResidual:
    r2: float
    r3: float
    contact: bool = False

    def __iter__(self):
        yield self.r2
        yield self.r3


@dataclass(frozen=True)
class FormFactorResidual:
    r1: float
    contact: bool = False


def f_exponents(p: ModelParams) -> np.ndarray:
    """F_j(c) = sqrt(1 - c_j) prod_{l != j} (c_j - c_l), j = 1..4."""
    c = p.c
    if len(set(c.tolist())) < 4 or not np.all(c < 1.0):
        raise ValidationError("degenerate exponents: the constants c_j must be distinct and below 1")
    return np.array([math.sqrt(1.0 - c[j]) * np.prod([c[j] - c[l] for l in range(4) if l != j]) for j in range(4)])


def _weights(p: ModelParams) -> np.ndarray:
    """Rows k = 0, 1, 2 of c_j^k / F_j."""
    c = p.c
    F = f_exponents(p)
    return np.stack([np.ones(4), c, c * c]) / F


def log_ratios(t: np.ndarray, p: ModelParams, clamp: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """log|(t - s_j)/(t + s_j)| for t of shape (..., 3) and a contact mask."""
    t = np.asarray(t, dtype=float)
    s = p.s
    num = np.abs(t[..., :, None] - s)
    den = np.abs(t[..., :, None] + s)
    contact = (num == 0.0) | (den == 0.0)
    with np.errstate(divide="ignore"):
        L = np.log(num) - np.log(den)
    if clamp:
        L = np.clip(L, -LOG_CLAMP, LOG_CLAMP)
    return L, contact


def invariants_t(t: np.ndarray, eps: np.ndarray, p: ModelParams) -> np.ndarray:
    """(I_0, I_1, I_2) for signed t and constant eps; shape (..., 3)."""
    L, _ = log_ratios(t, p)
    W = _weights(p)
    per_coord = np.einsum("...ij,kj->...ik", L, W)
    return 0.5 * np.einsum("i,...ik->...k", np.asarray(eps, dtype=float), per_coord)


def reduced_invariant_t(t: np.ndarray, eps: np.ndarray, p: ModelParams, face: int, free=None) -> np.ndarray:
    """I_1 - c_face I_0 summed over the ``free`` coordinates (all by default)."""
    t = np.atleast_2d(np.asarray(t, dtype=float))
    c = p.c
    F = f_exponents(p)
    w = (c - c[face]) / F
    w[face] = 0.0
    L, _ = log_ratios(t, p)
    eps = np.asarray(eps, dtype=float).copy()
    if free is not None:
        mask = np.zeros(3, dtype=bool)
        mask[list(free)] = True
        eps[~mask] = 0.0
    return 0.5 * np.einsum("i,nij,j->n", eps, L, w)


def _t_and_eps(lam: EllipticPoint, s: SignSector) -> tuple[np.ndarray, np.ndarray]:
    arr = lam.as_array()
    if np.any(arr > 1.0):
        raise DomainError(f"lambda above 1 in {lam}")
    return np.sqrt(1.0 - arr), s.signs()


def orbit_constants_from_point(lam: EllipticPoint, x: float, s: SignSector, p: ModelParams) -> OrbitConstants:
    """Orbit constants through one sample; face contacts become +-inf sentinels."""
    t, eps = _t_and_eps(lam, s)
    L, contact = log_ratios(t, p, clamp=False)
    W = _weights(p)
    gam = np.zeros(3)
    for k in range(3):
        total = 0.0
        for i in range(3):
            for j in range(4):
                wk = eps[i] * W[k, j]
                if wk == 0.0:
                    continue
                if contact[i, j]:
                    total += -math.copysign(math.inf, wk) if t[i] == p.s[j] else math.copysign(math.inf, wk)
                else:
                    total += wk * L[i, j]
        gam[k] = 0.5 * total
    contacts = tuple((int(i), int(j)) for i, j in zip(*np.nonzero(contact)))
    reduced = None
    if contacts:
        pinned = {i for i, _ in contacts}
        faces = {j for _, j in contacts}
        if len(faces) == 1 and len(pinned) == 1:
            face = faces.pop()
            free = [i for i in range(3) if i not in pinned]
            reduced = float(reduced_invariant_t(t, eps, p, face, free)[0])
    return OrbitConstants(float(gam[2] - x), float(gam[0]), float(gam[1]), contacts, reduced)


def orbit_residual(lam: EllipticPoint, g: OrbitConstants, s: SignSector, p: ModelParams) -> OrbitResidual:
    """Log-space residuals of the two orbit equations."""
    t, eps = _t_and_eps(lam, s)
    _, contact = log_ratios(t, p)
    inv = invariants_t(t, eps, p)
    r2 = abs(2.0 * inv[0] - 2.0 * g.gamma2) if math.isfinite(g.gamma2) else math.nan
    r3 = abs(2.0 * inv[1] - 2.0 * g.gamma3) if math.isfinite(g.gamma3) else math.nan
    return OrbitResidual(r2, r3, bool(contact.any()))


def form_factor_residual(lam: EllipticPoint, x: float, g: OrbitConstants, s: SignSector, p: ModelParams) -> FormFactorResidual:
    """Log-space residual of the form-factor relation (products over j = 1..3)."""
    t, eps = _t_and_eps(lam, s)
    L, contact = log_ratios(t, p)
    W = _weights(p)
    lhs = 0.5 * float(np.sum(eps[:, None] * L[:, :3] * W[2, :3]))
    return FormFactorResidual(abs(2.0 * lhs - 2.0 * (g.gamma1 + x)), bool(contact.any()))


def seed_for_constants(
    gamma2: float,
    gamma3: float,
    eps,
    p: ModelParams,
    fixed: tuple[int, float],
    guess,
) -> np.ndarray:
    """Signed state with prescribed (gamma2, gamma3), one coordinate held fixed.

    ``fixed = (index, t value)``; ``guess`` gives starting values for the
    other two coordinates.  Used to place family members by their constants.
    """
    eps = np.asarray(eps, dtype=float)
    k, tk = fixed
    free = [i for i in range(3) if i != k]

    def fun(z):
        t = np.empty(3)
        t[k] = tk
        t[free] = z
        inv = invariants_t(t, eps, p)
        return [inv[0] - gamma2, inv[1] - gamma3]

    sol = root(fun, np.asarray(guess, dtype=float), method="hybr", options={"xtol": 1e-14})
    if np.max(np.abs(fun(sol.x))) > 1e-9 * max(1.0, abs(gamma2), abs(gamma3)):
        raise NumericalError(f"no state with gamma2={gamma2}, gamma3={gamma3} found: {sol.message}")
    t = np.empty(3)
    t[k] = tk
    t[free] = sol.x
    return t


# ---------------------------------------------------------------------------
# Constancy along integrated trajectories

#: Samples whose moving coordinates come closer than this to a log
#: singularity |t| = s_j are skipped: there the extracted constants are
#: limited by the absolute accuracy of t, not by the flow.
CONTACT_FLOOR = 1e-4


@dataclass(frozen=True)
class PieceDrift:
    """Peak-to-peak spread of the extracted constants on one trajectory piece.

    Generic trajectories report (gamma2, gamma3, gamma1 + x).  Trajectories
    on a face c_m report the reduced pair (I_1 - c_m I_0, I_2 - c_m I_1 - x)
    in ``gamma2`` and ``gamma1`` and leave ``gamma3`` as NaN.
    """

    x_lo: float
    x_hi: float
    samples: int
    gamma1: float
    gamma2: float
    gamma3: float

    @property
    def worst(self) -> float:
        vals = [v for v in (self.gamma1, self.gamma2, self.gamma3) if math.isfinite(v)]
        return max(vals) if vals else 0.0


def trajectory_invariants(traj) -> np.ndarray:
    """Per-sample constants of a trajectory, shape (n, 3), ordered (gamma1, gamma2, gamma3).

    ``traj`` is a trajectory in the signed-t chart (attributes ``t``, ``x``,
    ``eps``, ``pinned``, ``params``).  Face trajectories use the reduced
    combinations described in :class:`PieceDrift`.
    """
    p = traj.params
    t, x = np.asarray(traj.t), np.asarray(traj.x)
    eps = np.asarray(traj.eps, dtype=float).copy()
    L, _ = log_ratios(t, p)
    out = np.full((len(x), 3), np.nan)
    if np.any(traj.pinned):
        i = int(np.flatnonzero(traj.pinned)[0])
        m = int(np.argmin(np.abs(p.s - abs(t[0, i]))))
        c, F = p.c, f_exponents(p)
        W = np.stack([(c - c[m]) / F, c * (c - c[m]) / F])
        W[:, m] = 0.0
        eps[traj.pinned] = 0.0
        red = 0.5 * np.einsum("i,nij,kj->nk", eps, L, W)
        out[:, 1] = red[:, 0]
        out[:, 0] = red[:, 1] - x
    else:
        inv = 0.5 * np.einsum("i,nij,kj->nk", eps, L, _weights(p))
        out[:, 0] = inv[:, 2] - x
        out[:, 1] = inv[:, 0]
        out[:, 2] = inv[:, 1]
    return out


def piece_invariant_drift(traj, contact_floor: float = CONTACT_FLOOR) -> list[PieceDrift]:
    """Spread of the constants on each piece between face bounces and edge crossings."""
    p = traj.params
    t, x = np.asarray(traj.t), np.asarray(traj.x)
    if len(x) == 0:
        return []
    inv = trajectory_invariants(traj)
    free = ~np.asarray(traj.pinned)
    if free.any():
        d = np.min(np.abs(np.abs(t[:, free])[:, :, None] - p.s), axis=(1, 2))
    else:
        d = np.full(len(x), np.inf)
    cuts = sorted(e.x for e in traj.events if e.kind in ("face-bounce", "edge-crossing"))
    edges = [-math.inf] + cuts + [math.inf]
    out = []
    for a, b in zip(edges[:-1], edges[1:]):
        m = (x > a) & (x < b) & (d > contact_floor)
        if m.sum() < 2:
            continue
        spread = np.ptp(inv[m], axis=0)
        out.append(PieceDrift(float(x[m][0]), float(x[m][-1]), int(m.sum()), *(float(v) for v in spread)))
    return out
