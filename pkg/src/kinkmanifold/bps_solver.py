"""Piecewise first-order flow, confinement box and sampled kink trajectories.

The first-order equations are integrated in the signed variables
``t_i = +-sqrt(1 - lambda_i)`` (one per coordinate, not sorted).  In these
variables the flow reads

    dt_i/dx = -eps_i h(t_i) / f_i,   h(t) = prod_j (s_j - t)(s_j + t),

with constant ``eps_i = +-1`` and ``s = sqrt(1 - c) = (alpha, sigma2, sigma3, 1)``.
The right-hand side is smooth where the elliptic chart is not:

* a sign change of ``t_i`` is a passage through lambda = 1 (the plane
  phi1 = 0); the sector component of that coordinate flips;
* ``|t_i|`` crossing sigma3 or sigma2 while a second coordinate arrives at
  the same value is a passage through the edge F1F3 or AF2; the two sorted
  coordinates exchange their roles.

So one adaptive solve per direction covers a whole kink, and the sector
sequence is read off from the located events afterwards.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterator

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DomainError, IntegrationError, UnsupportedRegimeError, ValidationError
from .model_core import (
    EPS_NUM,
    CartesianPoint,
    EllipticPoint,
    ModelParams,
    Regime,
    SignChoice,
    classify_regime,
    coincidence_products,
)
from .superpotential import SignSector, superpotential_value, w_of_t
from .vacua import Vacuum, VacuumSet, enumerate_vacua

#: Band around a shared boundary in which coincident coordinates are treated as on the face.
EPS_FACE = 1e-9


@dataclass(frozen=True)
class IntegrationOptions:
    delta0: float = 1e-6
    rtol: float = 1e-12
    atol: float = 1e-14
    tol_vac: float = 1e-8
    tol_rhs: float = 1e-10
    x_cap: float = 200.0
    max_events: int = 64
    sample_dx: float = 0.02
    method: str = "DOP853"

    def __post_init__(self) -> None:
        for name in ("delta0", "rtol", "atol", "tol_vac", "tol_rhs", "x_cap", "sample_dx"):
            if not getattr(self, name) > 0:
                raise ValidationError(f"integration option {name} must be positive")
        if self.max_events < 1:
            raise ValidationError("max_events must be at least 1")


# ---------------------------------------------------------------------------
# Confinement box


@dataclass(frozen=True)
class ConfinementBox:
    """The box [0, a3] x [a3, a2] x [a2, 1] and the split at abar^2.

    ``split_index`` is the 0-based coordinate whose range contains abar^2
    (None when the regime has no split).
    """

    lower: tuple[float, float, float]
    upper: tuple[float, float, float]
    split_index: int | None = None
    split_value: float | None = None

    @property
    def split(self) -> dict[str, tuple[float, float]] | None:
        if self.split_index is None:
            return None
        lo, hi, v = self.lower[self.split_index], self.upper[self.split_index], self.split_value
        return {"minus": (lo, v), "zero": (v, v), "plus": (v, hi)}

    def contains(self, lam, tol: float = 1e-8) -> bool:
        a = np.atleast_2d(np.asarray(lam, dtype=float))
        return bool(np.all(a >= np.array(self.lower) - tol) and np.all(a <= np.array(self.upper) + tol))

    def exit_distance(self, lam) -> float:
        """Largest violation of the box bounds over the given samples."""
        a = np.atleast_2d(np.asarray(lam, dtype=float))
        lo = np.array(self.lower) - a
        hi = a - np.array(self.upper)
        return float(max(0.0, lo.max(), hi.max()))

    def element(self, lam, tol: float = 1e-8) -> str | None:
        """Which split element (minus, zero, plus, or mixed) the samples occupy."""
        if self.split_index is None:
            return None
        v = np.atleast_2d(np.asarray(lam, dtype=float))[:, self.split_index] - self.split_value
        if np.all(np.abs(v) <= tol):
            return "zero"
        if np.all(v <= tol):
            return "minus"
        if np.all(v >= -tol):
            return "plus"
        return "mixed"


def box_for(p: ModelParams) -> ConfinementBox:
    return ConfinementBox((0.0, p.sigma3_bar_sq, p.sigma2_bar_sq), (p.sigma3_bar_sq, p.sigma2_bar_sq, 1.0))


def effective_intervals(p: ModelParams) -> ConfinementBox:
    """Confinement box with its split along the coordinate carrying abar^2."""
    regime = classify_regime(p)
    box = box_for(p)
    ab = p.alpha_bar_sq
    if regime in (Regime.E1, Regime.H2PRIME):
        raise UnsupportedRegimeError(f"regime {regime} has no split of the confinement box")
    for i in range(3):
        if box.lower[i] < ab < box.upper[i]:
            return replace(box, split_index=i, split_value=ab)
    # abar^2 < 0: the extra ellipsoid lies outside the box.
    raise UnsupportedRegimeError(f"abar^2 = {ab} lies outside the confinement box")


def flip_rule(i: int, boundary_value: float, p: ModelParams) -> str:
    """'asymptote' at double zeros of the effective potential, 'flip' at turning points.

    ``i`` is the 1-based coordinate label.
    """
    if i not in (1, 2, 3):
        raise ValidationError("coordinate label must be 1, 2 or 3")
    ranges = {1: (-math.inf, p.sigma3_bar_sq), 2: (p.sigma3_bar_sq, p.sigma2_bar_sq), 3: (p.sigma2_bar_sq, 1.0)}
    lo, hi = ranges[i]
    v = float(boundary_value)
    if not lo - EPS_NUM <= v <= hi + EPS_NUM:
        raise ValidationError(f"value {v} outside the range of lambda{i}")
    if abs(v) <= EPS_NUM or abs(v - p.alpha_bar_sq) <= EPS_NUM:
        return "asymptote"
    if any(abs(v - b) <= EPS_NUM for b in (p.sigma3_bar_sq, p.sigma2_bar_sq, 1.0)):
        return "flip"
    raise ValidationError(f"{v} is not a boundary value for lambda{i}")


# ---------------------------------------------------------------------------
# Right-hand sides


def bps_rhs(lam: EllipticPoint, s: SignSector, p: ModelParams) -> tuple[float, float, float]:
    """dlambda_i/dx = (-1)^beta_i 2 lambda_i (lambda_i - abar^2)(lambda_i - a2)(lambda_i - a3) sqrt(1 - lambda_i) / f_i."""
    arr = lam.as_array()
    box = box_for(p)
    if not box.contains(arr, EPS_NUM):
        raise DomainError(f"{lam} lies outside the confinement box")
    faces = (0.0, p.alpha_bar_sq, p.sigma2_bar_sq, p.sigma3_bar_sq)
    sig = s.signs()
    out = np.zeros(3)
    for i in range(3):
        li = arr[i]
        num_f = [li, li - p.alpha_bar_sq, li - p.sigma2_bar_sq, li - p.sigma3_bar_sq]
        den_f = {k: li - arr[k] for k in range(3) if k != i}
        # Cancel (lambda_i - c)/(lambda_i - lambda_k) when lambda_k sits on the face c.
        for k in list(den_f):
            for j, cv in enumerate(faces):
                if abs(arr[k] - cv) <= EPS_NUM and abs(li - cv) <= EPS_FACE and num_f[j] is not None:
                    num_f[j] = None
                    del den_f[k]
                    break
        num = 2.0 * math.sqrt(max(0.0, 1.0 - li))
        for v in num_f:
            if v is not None:
                num *= v
        den = 1.0
        for v in den_f.values():
            den *= v
        if num == 0.0:
            continue
        if den == 0.0:
            raise DomainError(f"coincident coordinates off the shared faces at {lam}")
        out[i] = sig[i] * num / den
    return float(out[0]), float(out[1]), float(out[2])


class SignedFlow:
    """First-order flow in the signed t-chart for fixed eps and pinned set."""

    def __init__(self, p: ModelParams, eps, t0):
        self.p = p
        self.s = p.s
        self.eps = np.asarray(eps, dtype=float)
        if self.eps.shape != (3,) or np.any(np.abs(self.eps) != 1.0):
            raise ValidationError("eps must contain three entries equal to +-1")
        t0 = np.asarray(t0, dtype=float)
        self.pinned = np.array([self._h(v) == 0.0 for v in t0])
        self.pin_value = {i: int(np.argmin(np.abs(self.s - abs(t0[i])))) for i in range(3) if self.pinned[i]}
        self.free = [i for i in range(3) if not self.pinned[i]]
        # For each free coordinate: numerator factors j and denominator partners k
        # left after cancelling pairs against pinned coordinates.
        self.h_idx: dict[int, list[int]] = {}
        self.f_idx: dict[int, list[int]] = {}
        for i in self.free:
            hj = [j for j in range(4) if np.isfinite(self.s[j])]
            fk = [k for k in range(3) if k != i]
            for k, j in self.pin_value.items():
                if j in hj:
                    hj.remove(j)
                    fk.remove(k)
            self.h_idx[i] = hj
            self.f_idx[i] = fk

    def _h(self, t: float) -> float:
        out = 1.0
        for sj in self.s:
            if np.isfinite(sj):
                out *= (sj - t) * (sj + t)
        return out

    def rhs(self, x: float, t: np.ndarray) -> np.ndarray:
        s = self.s
        out = np.zeros(3)
        for i in self.free:
            ti = t[i]
            num = 1.0
            for j in self.h_idx[i]:
                num *= (s[j] - ti) * (s[j] + ti)
            den = 1.0
            for k in self.f_idx[i]:
                den *= (t[k] - ti) * (t[k] + ti)
            if den == 0.0:
                num, den = self._cancelled(i, t)
            out[i] = -self.eps[i] * num / den
        return out

    def _cancelled(self, i: int, t: np.ndarray) -> tuple[float, float]:
        """Exact coincidence of two free coordinates: cancel against the nearest face factor."""
        s = self.s
        ti = t[i]
        hj = list(self.h_idx[i])
        num, den = 1.0, 1.0
        for k in self.f_idx[i]:
            if (t[k] - ti) * (t[k] + ti) == 0.0:
                j = min(hj, key=lambda jj: abs(s[jj] - abs(ti)))
                hj.remove(j)
            else:
                den *= (t[k] - ti) * (t[k] + ti)
        for j in hj:
            num *= (s[j] - ti) * (s[j] + ti)
        return num, den


# ---------------------------------------------------------------------------
# Conversions in the signed chart


def t_to_lambda(t: np.ndarray) -> np.ndarray:
    """Sorted elliptic coordinates for unsorted signed t (shape (..., 3))."""
    return np.sort(1.0 - np.asarray(t) ** 2, axis=-1)


def t_to_cartesian(t: np.ndarray, p: ModelParams, sign2=1.0, sign3=1.0) -> np.ndarray:
    t = np.atleast_2d(np.asarray(t, dtype=float))
    s2, s3 = p.sigma2_sq, p.sigma3_sq
    g2, g3 = p.sigma2, p.sigma3
    phi1 = t[:, 0] * t[:, 1] * t[:, 2] / (g2 * g3)
    # Factored differences keep coordinates pinned at sigma exactly on the plane.
    r2 = np.prod((t - g2) * (t + g2), axis=1) / (s2 * (s2 - s3))
    r3 = np.prod((t - g3) * (t + g3), axis=1) / (s3 * (s3 - s2))
    phi2 = np.asarray(sign2) * np.sqrt(np.clip(r2, 0.0, None))
    phi3 = np.asarray(sign3) * np.sqrt(np.clip(r3, 0.0, None))
    return np.stack([phi1, phi2, phi3], axis=1)


def lambda_to_t(lam: EllipticPoint, p: ModelParams) -> np.ndarray:
    """Nonnegative t for each coordinate; values on a face snap to the exact s_j."""
    c, s = p.c, p.s
    out = np.empty(3)
    for i, v in enumerate(lam.as_array()):
        if v > 1.0 + EPS_NUM:
            raise DomainError(f"lambda{i + 1} = {v} exceeds 1")
        hit = [j for j in range(4) if abs(v - c[j]) <= EPS_NUM]
        out[i] = s[hit[0]] if hit else math.sqrt(max(0.0, 1.0 - v))
    return out


def slot_order(t: np.ndarray) -> np.ndarray:
    """Permutation taking unsorted coordinates to ascending-lambda slots."""
    return np.argsort(-np.abs(t), kind="stable")


def slot_sector(t: np.ndarray, eps: np.ndarray) -> SignSector:
    order = slot_order(t)
    signs = [eps[i] * (1.0 if t[i] >= 0 else -1.0) for i in order]
    return SignSector.from_signs(signs)


# ---------------------------------------------------------------------------
# Trajectory containers


@dataclass(frozen=True)
class TrajectoryEvent:
    x: float
    kind: str  # face-bounce | edge-crossing | vacuum-asymptote | x-cap
    coordinate: int | None = None  # 1-based sorted coordinate label
    value: float | None = None
    name: str | None = None
    unsorted: int | None = None

    def tag(self) -> str:
        if self.kind == "face-bounce":
            return f"face-bounce({self.coordinate},{self.value:g})"
        if self.kind == "edge-crossing":
            return f"edge-crossing({self.name})"
        return self.kind


@dataclass
class TrajectoryPiece:
    sector: SignSector
    x: np.ndarray
    lam: np.ndarray
    phi: np.ndarray
    start_event: TrajectoryEvent
    end_event: TrajectoryEvent

    def samples(self) -> Iterator[tuple[float, EllipticPoint, CartesianPoint]]:
        for x, l, f in zip(self.x, self.lam, self.phi):
            yield float(x), EllipticPoint.from_array(l), CartesianPoint.from_array(f)


@dataclass
class KinkTrajectory:
    params: ModelParams
    eps: np.ndarray
    pinned: np.ndarray
    x0: float
    x: np.ndarray
    t: np.ndarray
    lam: np.ndarray
    phi: np.ndarray
    events: list[TrajectoryEvent]
    pieces: list[TrajectoryPiece]
    start_vacuum: Vacuum | None
    end_vacuum: Vacuum | None
    sub_box: str | None
    phi_signs0: tuple[float, float] = (1.0, 1.0)
    _solutions: list = field(default_factory=list, repr=False)
    flow: SignedFlow | None = field(default=None, repr=False)

    @property
    def complete(self) -> bool:
        return self.start_vacuum is not None and self.end_vacuum is not None

    @property
    def x_span(self) -> float:
        return float(self.x[-1] - self.x[0]) if len(self.x) else 0.0

    @property
    def is_empty(self) -> bool:
        return len(self.x) == 0

    def t_at(self, x) -> np.ndarray:
        """Dense-output state at positions ``x`` (shape (n, 3))."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.empty((len(x), 3))
        for lo, hi, sol in self._solutions:
            m = (x >= lo) & (x <= hi)
            if np.any(m):
                out[m] = sol(x[m]).T
        return out

    def phi_signs_at(self, x) -> tuple[np.ndarray, np.ndarray]:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        s2 = np.full(len(x), self.phi_signs0[0])
        s3 = np.full(len(x), self.phi_signs0[1])
        for ev in self.events:
            if ev.kind != "edge-crossing":
                continue
            flip = np.where(x > ev.x, -1.0, 1.0) if ev.x >= self.x0 else np.where(x < ev.x, -1.0, 1.0)
            if ev.name == "AF2":
                s2 = s2 * flip
            else:
                s3 = s3 * flip
        return s2, s3

    def resample(self, dx: float) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """(x, t, lambda, phi) on a uniform grid of step close to ``dx``."""
        if self.is_empty:
            return self.x, self.t, self.lam, self.phi
        n = max(2, int(math.ceil(self.x_span / dx)) + 1)
        xs = np.linspace(self.x[0], self.x[-1], n)
        ts = self.t_at(xs)
        s2, s3 = self.phi_signs_at(xs)
        return xs, ts, t_to_lambda(ts), t_to_cartesian(ts, self.params, s2, s3)

    def rhs_t(self, t: np.ndarray) -> np.ndarray:
        flow = self.flow or SignedFlow(self.params, self.eps, self.t[0])
        return np.array([flow.rhs(0.0, row) for row in np.atleast_2d(t)])

    def superpotential_t(self, t: np.ndarray) -> np.ndarray:
        return np.sum(self.eps * w_of_t(np.atleast_2d(t), self.params), axis=1)

    def energy_superpotential(self) -> float:
        """Energy as the superpotential change between the two ends."""
        w = self.superpotential_t(self.t[[0, -1]])
        return float(w[-1] - w[0])

    def energy_piecewise(self) -> float:
        """Sum over pieces of the sorted-sector superpotential differences."""
        total = 0.0
        for piece in self.pieces:
            a = superpotential_value(EllipticPoint.from_array(piece.lam[0]), piece.sector, self.params).value
            b = superpotential_value(EllipticPoint.from_array(piece.lam[-1]), piece.sector, self.params).value
            total += b - a
        return total

    def edge_crossings(self) -> list[TrajectoryEvent]:
        return [e for e in self.events if e.kind == "edge-crossing"]

    def sector_sequence(self) -> list[SignSector]:
        return [piece.sector for piece in self.pieces]


# ---------------------------------------------------------------------------
# Integration


def _vacuum_table(p: ModelParams) -> tuple[VacuumSet, np.ndarray]:
    vs = enumerate_vacua(p)
    return vs, np.array([v.elliptic.as_array() for v in vs.vacua])


def _make_events(flow: SignedFlow, vac_lams: np.ndarray, opts: IntegrationOptions):
    p = flow.p
    events = []
    labels = []
    for i in flow.free:
        for name, target in (("plane", 0.0), ("F1F3", p.sigma3), ("F1F3", -p.sigma3), ("AF2", p.sigma2), ("AF2", -p.sigma2)):

            def ev(x, t, i=i, target=target):
                return t[i] - target

            ev.terminal = False
            events.append(ev)
            labels.append((name, i, target))

    def vac(x, t):
        lam = t_to_lambda(t)
        dist = np.min(np.max(np.abs(vac_lams - lam), axis=1))
        speed = np.max(np.abs(2.0 * t * flow.rhs(x, t)))
        return max(dist / opts.tol_vac, speed / opts.tol_rhs) - 1.0

    vac.terminal = True
    vac.direction = -1
    events.append(vac)
    labels.append(("vacuum", None, None))
    return events, labels


def _solve_direction(flow: SignedFlow, t0: np.ndarray, x0: float, sign: float, vac_lams, opts: IntegrationOptions):
    events, labels = _make_events(flow, vac_lams, opts)
    sol = solve_ivp(
        flow.rhs,
        (x0, x0 + sign * opts.x_cap),
        t0,
        method=opts.method,
        rtol=opts.rtol,
        atol=opts.atol,
        events=events,
        dense_output=True,
    )
    if sol.status == -1:
        raise IntegrationError(f"integration failed: {sol.message}")
    found = []
    for (name, i, target), xe in zip(labels, sol.t_events):
        for xv in xe:
            if name == "vacuum":
                continue
            if sign < 0 and xv == x0:
                continue  # the forward pass already reports events at the seed
            found.append((float(xv), name, i, target))
    reached = len(sol.t_events[-1]) > 0
    return sol, found, reached


def _vacuum_at(vs: VacuumSet, lam: np.ndarray, tol: float) -> Vacuum | None:
    v, d = vs.nearest(EllipticPoint.from_array(lam))
    return v if d <= tol else None


def trace_orbit(
    t0,
    eps,
    p: ModelParams,
    x0: float = 0.0,
    opts: IntegrationOptions | None = None,
    phi_signs: tuple[float, float] = (1.0, 1.0),
    both_directions: bool = True,
) -> KinkTrajectory:
    """Integrate the signed flow through ``t0`` in both directions until vacua are reached."""
    opts = opts or IntegrationOptions()
    t0 = np.asarray(t0, dtype=float)
    eps = np.asarray(eps, dtype=float)
    if np.any(np.abs(t0) > 1.0 + EPS_NUM):
        raise DomainError("seed lies outside the confinement box (|t| > 1)")
    flow = SignedFlow(p, eps, t0)
    vs, vac_lams = _vacuum_table(p)
    raw_events = []
    solutions = []
    fwd, ev_f, reached_f = _solve_direction(flow, t0, x0, 1.0, vac_lams, opts)
    raw_events += ev_f
    solutions.append((x0, float(fwd.t[-1]), fwd.sol))
    if both_directions:
        bwd, ev_b, reached_b = _solve_direction(flow, t0, x0, -1.0, vac_lams, opts)
        raw_events += ev_b
        solutions.append((float(bwd.t[-1]), x0, bwd.sol))
        x_lo = float(bwd.t[-1])
    else:
        reached_b = True
        x_lo = x0
    x_hi = float(fwd.t[-1])
    if len(raw_events) > opts.max_events:
        raise IntegrationError(f"more than {opts.max_events} events along the trajectory")

    traj = KinkTrajectory(
        params=p,
        eps=eps,
        pinned=flow.pinned.copy(),
        x0=x0,
        x=np.empty(0),
        t=np.empty((0, 3)),
        lam=np.empty((0, 3)),
        phi=np.empty((0, 3)),
        events=[],
        pieces=[],
        start_vacuum=None,
        end_vacuum=None,
        sub_box=None,
        phi_signs0=(float(phi_signs[0]), float(phi_signs[1])),
        _solutions=solutions,
        flow=flow,
    )
    traj.events = _classify_events(raw_events, traj, p)
    n = max(2, int(math.ceil((x_hi - x_lo) / opts.sample_dx)) + 1)
    xs = np.linspace(x_lo, x_hi, n)
    traj.x = xs
    traj.t = traj.t_at(xs)
    s2, s3 = traj.phi_signs_at(xs)
    traj.lam = t_to_lambda(traj.t)
    traj.phi = t_to_cartesian(traj.t, p, s2, s3)
    if reached_b:
        traj.start_vacuum = _vacuum_at(vs, traj.lam[0], 10 * opts.tol_vac)
    if reached_f:
        traj.end_vacuum = _vacuum_at(vs, traj.lam[-1], 10 * opts.tol_vac)
    traj.pieces = _build_pieces(traj)
    try:
        traj.sub_box = effective_intervals(p).element(traj.lam)
    except UnsupportedRegimeError:
        traj.sub_box = None
    return traj


def _classify_events(raw, traj: KinkTrajectory, p: ModelParams) -> list[TrajectoryEvent]:
    """Tag located zero crossings; edge crossings need a partner at the same edge."""
    out = []
    for xv, name, i, target in sorted(raw):
        t = traj.t_at([xv])[0]
        order = list(slot_order(t))
        slot = order.index(i)
        if name == "plane":
            out.append(TrajectoryEvent(xv, "face-bounce", slot + 1, 1.0, None, i))
            continue
        sigma = abs(target)
        partners = [k for k in range(3) if k != i and abs(abs(t[k]) - sigma) <= 1e-6]
        if not partners:
            continue
        # Both coordinates of the pair cross the same value; report the edge once.
        if any(e.kind == "edge-crossing" and e.name == name and abs(e.x - xv) <= 1e-6 for e in out):
            continue
        out.append(TrajectoryEvent(xv, "edge-crossing", None, sigma**2, name, i))
    return out


def _build_pieces(traj: KinkTrajectory) -> list[TrajectoryPiece]:
    xs = traj.x
    start = TrajectoryEvent(float(xs[0]), "vacuum-asymptote" if traj.start_vacuum else "x-cap")
    end = TrajectoryEvent(float(xs[-1]), "vacuum-asymptote" if traj.end_vacuum else "x-cap")
    cuts = [start] + [e for e in traj.events if xs[0] < e.x < xs[-1]] + [end]
    pieces = []
    for a, b in zip(cuts[:-1], cuts[1:]):
        m = (xs >= a.x) & (xs <= b.x)
        xm = np.concatenate([[a.x], xs[m], [b.x]])
        xm = np.unique(xm)
        tm = traj.t_at(xm)
        xmid = 0.5 * (a.x + b.x)
        s2, s3 = traj.phi_signs_at([xmid])
        mid = traj.t_at([xmid])[0]
        pieces.append(
            TrajectoryPiece(
                sector=slot_sector(mid, traj.eps),
                x=xm,
                lam=t_to_lambda(tm),
                phi=t_to_cartesian(tm, traj.params, s2, s3),
                start_event=a,
                end_event=b,
            )
        )
    return pieces


def integrate_kink(
    start: EllipticPoint,
    seed_sector: SignSector,
    p: ModelParams,
    opts: IntegrationOptions | None = None,
    signs: SignChoice | None = None,
) -> KinkTrajectory:
    """Integrate forward from ``start`` (normally a small offset from a vacuum).

    The sector fixes (-1)^beta at the start.  Coordinates placed exactly on
    a face value stay there (the non-generic families).  The Cartesian octant
    at the start is taken from ``signs`` (default all positive).
    """
    opts = opts or IntegrationOptions()
    box = box_for(p)
    if not box.contains(start.as_array(), EPS_NUM):
        raise DomainError(f"start point {start} lies outside the confinement box")
    signs = signs or SignChoice()
    t0 = lambda_to_t(start, p)
    eps = seed_sector.signs().copy()
    if signs.s1 < 0:
        t0, eps = -t0, -eps
    vs, vac_lams = _vacuum_table(p)
    if np.min(np.max(np.abs(vac_lams - start.as_array()), axis=1)) == 0.0:
        return _empty_trajectory(p, eps, t0, vs, start)
    return _forward(t0, eps, p, opts, (signs.s2, signs.s3), vs, start)


def _forward(t0, eps, p, opts, phi_signs, vs, start) -> KinkTrajectory:
    # A one-sided solve covers both the escape from the start vacuum and the
    # arrival at the end vacuum, so it gets the budget of both half-lines.
    opts = replace(opts, x_cap=2.0 * opts.x_cap)
    traj = trace_orbit(t0, eps, p, 0.0, opts, phi_signs, both_directions=False)
    v, d = vs.nearest(start)
    if d <= max(10 * opts.delta0, 1e-4):
        traj.start_vacuum = v
        traj.pieces = _build_pieces(traj)
    return traj


def _empty_trajectory(p, eps, t0, vs, start) -> KinkTrajectory:
    v, _ = vs.nearest(start)
    return KinkTrajectory(
        params=p,
        eps=np.asarray(eps, dtype=float),
        pinned=np.zeros(3, dtype=bool),
        x0=0.0,
        x=np.empty(0),
        t=np.empty((0, 3)),
        lam=np.empty((0, 3)),
        phi=np.empty((0, 3)),
        events=[],
        pieces=[],
        start_vacuum=v,
        end_vacuum=v,
        sub_box=None,
    )


def seed_near_vacuum(v: Vacuum, offsets, p: ModelParams) -> EllipticPoint:
    """Vacuum point displaced by ``offsets`` (one entry per coordinate), clipped into the box."""
    lam = v.elliptic.as_array() + np.asarray(offsets, dtype=float)
    box = box_for(p)
    lam = np.clip(lam, box.lower, box.upper)
    return EllipticPoint.from_array(lam)


def bps_identity_residual(traj: KinkTrajectory, u_floor: float = 1e-8) -> float:
    """Max of |kinetic density - U| / max(U, u_floor) along the samples.

    The floor keeps the measure relative where U is resolved; in the
    exponential tails U itself is at round-off level (about 1e-15 absolute).
    """
    from .model_core import potential_elliptic

    p = traj.params
    rhs = traj.rhs_t(traj.t)
    lam = 1.0 - traj.t**2
    f = coincidence_products(lam)
    den = (lam - p.sigma2_bar_sq) * (lam - p.sigma3_bar_sq)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(rhs == 0.0, 0.0, f * rhs**2 / den)
    kin = 0.5 * terms.sum(axis=1)
    u = potential_elliptic(traj.lam, p)
    ok = np.all(np.isfinite(terms), axis=1)
    if not np.any(ok):
        return 0.0
    return float(np.max(np.abs(kin[ok] - u[ok]) / np.maximum(u[ok], u_floor)))
