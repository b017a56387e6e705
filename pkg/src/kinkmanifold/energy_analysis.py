"""Energies, densities, sum rules, stability and lumps of the H1 kink families.

Family members are generated by the signed-chart solver from a seed point
on the surface (or in the open box region) that carries the family.  The
closed-form energies come in two variants:

``reference``
    the reference expressions in terms of A = alpha^5/5 - alpha^3,
    B = 1/5 - alpha^2 and S_k = sigma_k^5/5 - sigma_k^3;
``itinerary``
    the superpotential bookkeeping along the actual path of each family,
    built from w(1), w(alpha), w(sigma3), w(sigma2) where w is the
    single-coordinate superpotential in the t variable.

The two variants agree only for the pair Ts2_v1v2 / Ts2_v3; numeric energies
of integrated members follow the itinerary variant.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .bps_solver import (
    IntegrationOptions,
    KinkTrajectory,
    TrajectoryEvent,
    lambda_to_t,
    t_to_lambda,
    trace_orbit,
)
from .errors import IncompleteTrajectoryError, NumericalError, UnsupportedRegimeError, ValidationError
from .model_core import (
    EllipticPoint,
    ModelParams,
    Regime,
    classify_regime,
    coincidence_products,
    metric_array,
    potential_elliptic,
)
from .orbit_quadratures import invariants_t, seed_for_constants
from .superpotential import SignSector, w_of_t

DEFAULT_THETA = 0.02
DEFAULT_WINDOW = 5


class FamilyLabel(str, enum.Enum):
    TE_v1v3 = "TE_v1v3"
    NE_v3 = "NE_v3"
    Ts3_v1v2 = "Ts3_v1v2"
    Ns3_v2 = "Ns3_v2"
    Ts2_v1v2 = "Ts2_v1v2"
    Ts2_v3 = "Ts2_v3"
    Ts2_v2v3 = "Ts2_v2v3"
    TH_v2v3 = "TH_v2v3"
    T_v1v2 = "T_v1v2"
    T_v3 = "T_v3"
    T_v2v3 = "T_v2v3"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def parse(cls, text: str) -> "FamilyLabel":
        try:
            return cls(text)
        except ValueError:
            raise ValidationError(f"unknown family {text!r}; choose from {[f.value for f in cls]}") from None


def _lerp(a: float, b: float, u: float) -> float:
    return a + u * (b - a)


@dataclass(frozen=True)
class FamilyInfo:
    label: FamilyLabel
    group: str
    surface: str | None
    seed: Callable[[ModelParams, float], tuple[float, float, float]]
    sector: tuple[int, int, int]
    endpoints: tuple[str, str]
    expected_stable: bool
    lumps_reported: int | None = None

    @property
    def generic(self) -> bool:
        return self.surface is None

    @property
    def topological(self) -> bool:
        return self.endpoints[0] != self.endpoints[1]


def _catalogue() -> dict[FamilyLabel, FamilyInfo]:
    F = FamilyLabel

    def s(p):
        return p.sigma2_bar_sq, p.sigma3_bar_sq, p.alpha_bar_sq

    def te(p, u):
        a2, a3, ab = s(p)
        return (0.0, _lerp(a3, ab, u), _lerp(a2, 1.0, u))

    def ne(p, u):
        a2, a3, ab = s(p)
        return (0.0, _lerp(ab, a2, u), _lerp(a2, 1.0, u))

    def ts3(p, u):
        a2, a3, ab = s(p)
        return (_lerp(0.0, a3, u), a3, _lerp(a2, 1.0, u))

    def ns3(p, u):
        a2, a3, ab = s(p)
        return (a3, _lerp(ab, a2, u), _lerp(a2, 1.0, u))

    def ts2(p, u):
        a2, a3, ab = s(p)
        return (_lerp(0.0, a3, u), _lerp(a3, ab, u), a2)

    def ts2_23(p, u):
        a2, a3, ab = s(p)
        return (_lerp(0.0, a3, u), a2, _lerp(a2, 1.0, u))

    def th(p, u):
        a2, a3, ab = s(p)
        return (_lerp(0.0, a3, u), ab, _lerp(a2, 1.0, u))

    def b1(p, u):
        a2, a3, ab = s(p)
        return (_lerp(0.0, a3, u), _lerp(a3, ab, u), _lerp(a2, 1.0, u))

    def b2(p, u):
        a2, a3, ab = s(p)
        return (_lerp(0.0, a3, u), _lerp(ab, a2, u), _lerp(a2, 1.0, u))

    rows = [
        FamilyInfo(F.TE_v1v3, "A1", "lambda1=0", te, (0, 0, 0), ("v1", "v3"), True),
        FamilyInfo(F.NE_v3, "A1", "lambda1=0", ne, (0, 0, 0), ("v3", "v3"), False),
        FamilyInfo(F.Ts3_v1v2, "A2", "lambda2=a3", ts3, (0, 0, 0), ("v1", "v2"), False),
        FamilyInfo(F.Ns3_v2, "A2", "lambda1=a3", ns3, (0, 0, 0), ("v2", "v2"), False),
        FamilyInfo(F.Ts2_v1v2, "A3", "lambda3=a2", ts2, (0, 0, 0), ("v1", "v2"), True),
        FamilyInfo(F.Ts2_v3, "A3", "lambda3=a2", ts2, (0, 1, 0), ("v3", "v3"), False, 3),
        FamilyInfo(F.Ts2_v2v3, "A3", "lambda2=a2", ts2_23, (0, 0, 0), ("v2", "v3"), False),
        FamilyInfo(F.TH_v2v3, "A4", "lambda2=abar2", th, (0, 0, 0), ("v2", "v3"), True, 2),
        FamilyInfo(F.T_v1v2, "B1", None, b1, (0, 0, 0), ("v1", "v2"), True),
        FamilyInfo(F.T_v3, "B1", None, b1, (0, 1, 0), ("v3", "v3"), False, 4),
        FamilyInfo(F.T_v2v3, "B2", None, b2, (0, 0, 0), ("v2", "v3"), False),
    ]
    return {r.label: r for r in rows}


FAMILIES: dict[FamilyLabel, FamilyInfo] = _catalogue()


def _require_h1(p: ModelParams) -> None:
    if classify_regime(p) is not Regime.H1:
        raise UnsupportedRegimeError("the family catalogue is defined for regime H1 only")


def family_seed(label: FamilyLabel, p: ModelParams, member: float = 0.5) -> tuple[np.ndarray, np.ndarray]:
    """(t, eps) of a seed point; ``member`` in (0, 1) moves along the free directions."""
    _require_h1(p)
    if not 0.0 < member < 1.0:
        raise ValidationError("member must lie strictly between 0 and 1")
    info = FAMILIES[FamilyLabel(label)]
    lam = EllipticPoint(*info.seed(p, member))
    return lambda_to_t(lam, p), SignSector(*info.sector).signs()


def family_member(
    label: FamilyLabel,
    p: ModelParams,
    member: float = 0.5,
    gamma: tuple[float, float, float] | None = None,
    opts: IntegrationOptions | None = None,
) -> KinkTrajectory:
    """Integrate one member of a family.

    Generic (three-parameter) families can be selected by their orbit
    constants ``gamma = (gamma1, gamma2, gamma3)``; the seed is then the
    point of the orbit on the sheet t3 = sigma2 / 2, placed at
    x = I_2(seed) - gamma1.
    """
    label = FamilyLabel(label)
    t0, eps = family_seed(label, p, member)
    x0 = 0.0
    if gamma is not None:
        if not FAMILIES[label].generic:
            raise ValidationError("orbit constants select members of generic families only")
        g1, g2, g3 = gamma
        t0 = _seed_from_gamma(label, g2, g3, eps, p)
        x0 = float(invariants_t(t0, eps, p)[2] - g1)
    return trace_orbit(t0, eps, p, x0, opts)


def _seed_from_gamma(label: FamilyLabel, g2: float, g3: float, eps, p: ModelParams) -> np.ndarray:
    fixed = (2, 0.5 * p.sigma2)
    last: Exception | None = None
    for u in (0.5, 0.25, 0.75, 0.1, 0.9, 0.02, 0.98):
        guess = family_seed(label, p, u)[0][:2]
        try:
            return seed_for_constants(g2, g3, eps, p, fixed, guess)
        except NumericalError as exc:  # try the next starting point
            last = exc
    raise NumericalError(f"no {label} member with gamma2={g2}, gamma3={g3}") from last


# ---------------------------------------------------------------------------
# Densities and energies


@dataclass(frozen=True)
class TrajectorySample:
    x: float
    lam: EllipticPoint
    dlam_dx: tuple[float, float, float]


def energy_density(sample: TrajectorySample, p: ModelParams) -> float:
    """1/2 sum g_jj (dlambda_j/dx)^2 + U at an interior sample."""
    lam = sample.lam.as_array()
    g = metric_array(lam, p)
    kin = 0.5 * float(np.sum(g * np.asarray(sample.dlam_dx) ** 2))
    return kin + float(potential_elliptic(lam, p))


def density_along(traj: KinkTrajectory, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(kinetic, potential) densities on signed-chart states of ``traj``.

    The kinetic term is evaluated as 1/2 sum f_j (dt_j/dx)^2 / ((lambda_j - a2)(lambda_j - a3)),
    which stays finite on the faces used by the non-generic families.
    """
    p = traj.params
    t = np.atleast_2d(t)
    dt = traj.rhs_t(t)
    lam = 1.0 - t * t
    f = coincidence_products(lam)
    den = (lam - p.sigma2_bar_sq) * (lam - p.sigma3_bar_sq)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(dt == 0.0, 0.0, f * dt * dt / den)
    kin = 0.5 * terms.sum(axis=1)
    u = np.asarray(potential_elliptic(t_to_lambda(t), p), dtype=float)
    bad = ~np.isfinite(kin)
    kin[bad] = u[bad]  # exact coincidence: use the first-order identity
    return kin, u


@dataclass
class EnergyProfile:
    x: np.ndarray
    eps: np.ndarray
    total: float
    lump_count: int | None = None
    theta: float = DEFAULT_THETA
    window: int = DEFAULT_WINDOW


def energy_profile(traj: KinkTrajectory, dx: float = 0.02, theta: float = DEFAULT_THETA, window: int = DEFAULT_WINDOW) -> EnergyProfile:
    xs, ts, _, _ = traj.resample(dx)
    kin, u = density_along(traj, ts)
    eps = np.clip(kin + u, 0.0, None)
    prof = EnergyProfile(xs, eps, float(np.trapezoid(eps, xs)), None, theta, window)
    prof.lump_count = count_lumps(prof, theta, window)
    return prof


@dataclass(frozen=True)
class NumericEnergy:
    quadrature: float
    superpotential: float
    richardson_error: float

    @property
    def relative_gap(self) -> float:
        return abs(self.quadrature - self.superpotential) / abs(self.superpotential)

    @property
    def value(self) -> float:
        return self.quadrature


def trajectory_energy_numeric(traj: KinkTrajectory, p: ModelParams | None = None, dx: float = 0.02) -> NumericEnergy:
    """Energy by quadrature of the density and by superpotential differences.

    The quadrature uses the trapezoid rule on a uniform grid of the dense
    solution at steps dx and dx/2; the Richardson difference is reported.
    """
    if not traj.complete:
        raise IncompleteTrajectoryError("trajectory does not connect two vacua")
    coarse = energy_profile(traj, dx).total
    fine = energy_profile(traj, dx / 2).total
    rich = fine + (fine - coarse) / 3.0
    return NumericEnergy(float(rich), float(traj.energy_piecewise()), float(abs(fine - coarse)))


def _wvals(p: ModelParams) -> dict[str, float]:
    return {
        "w1": float(w_of_t(1.0, p)),
        "wa": float(w_of_t(p.alpha, p)),
        "w3": float(w_of_t(p.sigma3, p)),
        "w2": float(w_of_t(p.sigma2, p)),
    }


def family_energy_closed_form(label: FamilyLabel, p: ModelParams, form: str = "reference") -> float:
    """Closed-form energy of a family at ``p`` (regime H1)."""
    _require_h1(p)
    label = FamilyLabel(label)
    if form == "reference":
        a, s2, s3 = p.alpha, p.sigma2, p.sigma3
        A = a**5 / 5 - a**3
        B = 0.2 - p.alpha_sq
        S2 = s2**5 / 5 - s2**3
        S3 = s3**5 / 5 - s3**3
        table = {
            FamilyLabel.TE_v1v3: (2 / 3) * (A - S3 - 2 * S2),
            FamilyLabel.NE_v3: (4 / 3) * (-S2 - A),
            FamilyLabel.Ts3_v1v2: (2 / 3) * (A - B - 2 * S2),
            FamilyLabel.Ns3_v2: (4 / 3) * (-A - S2),
            FamilyLabel.Ts2_v1v2: (2 / 3) * (B - A),
            FamilyLabel.Ts2_v3: (4 / 3) * (B - A),
            FamilyLabel.Ts2_v2v3: (2 / 3) * (S3 - 2 * A - B),
            FamilyLabel.TH_v2v3: (2 / 3) * (S3 - B - 2 * S2),
            FamilyLabel.T_v1v2: (2 / 3) * (A - B - 2 * S2),
            FamilyLabel.T_v3: (4 / 3) * (A - B - S2),
            FamilyLabel.T_v2v3: (2 / 3) * (S3 - B - 2 * S2 - 2 * A),
        }
    elif form == "itinerary":
        w = _wvals(p)
        w1, wa, w3, w2 = w["w1"], w["wa"], w["w3"], w["w2"]
        table = {
            FamilyLabel.TE_v1v3: (w3 - wa) - 2 * w2,
            FamilyLabel.NE_v3: -2 * wa - 2 * w2,
            FamilyLabel.Ts3_v1v2: (w1 - wa) - 2 * w2,
            FamilyLabel.Ns3_v2: -2 * wa - 2 * w2,
            FamilyLabel.Ts2_v1v2: w1 - wa,
            FamilyLabel.Ts2_v3: 2 * (w1 - wa),
            FamilyLabel.Ts2_v2v3: (w1 - w3) - 2 * wa,
            FamilyLabel.TH_v2v3: (w1 - w3) - 2 * w2,
            FamilyLabel.T_v1v2: (w1 - wa) - 2 * w2,
            FamilyLabel.T_v3: 2 * (w1 - wa) - 2 * w2,
            FamilyLabel.T_v2v3: (w1 - w3) - 2 * wa - 2 * w2,
        }
    else:
        raise ValidationError(f"unknown closed-form variant {form!r}")
    return float(table[label])


@dataclass(frozen=True)
class SumRuleResult:
    rule_id: int
    lhs: float
    rhs: float

    @property
    def residual(self) -> float:
        return abs(self.lhs - self.rhs)

    @property
    def relative_residual(self) -> float:
        return self.residual / max(abs(self.lhs), abs(self.rhs), 1e-300)


SUM_RULES = {
    1: "2E[Ts2_v1v2] = E[Ts2_v3]",
    2: "E[T_v1v2] = E[Ts3_v1v2]",
    3: "2E[T_v2v3] = E[NE_v3] + E[TH_v2v3] + E[Ts2_v2v3]",
    4: "2E[T_v3] = E[TE_v1v3] + E[TH_v2v3] - 3E[Ts2_v1v2]",
}

#: Variant of rule 4 that holds for the energies along the actual paths.
RULE_4_PATH = "2E[T_v3] = E[TE_v1v3] + E[TH_v2v3] + 3E[Ts2_v1v2]"


def evaluate_sum_rules(E: dict[FamilyLabel, float]) -> list[SumRuleResult]:
    F = FamilyLabel
    return [
        SumRuleResult(1, 2 * E[F.Ts2_v1v2], E[F.Ts2_v3]),
        SumRuleResult(2, E[F.T_v1v2], E[F.Ts3_v1v2]),
        SumRuleResult(3, 2 * E[F.T_v2v3], E[F.NE_v3] + E[F.TH_v2v3] + E[F.Ts2_v2v3]),
        SumRuleResult(4, 2 * E[F.T_v3], E[F.TE_v1v3] + E[F.TH_v2v3] - 3 * E[F.Ts2_v1v2]),
    ]


def rule4_path_variant(E: dict[FamilyLabel, float]) -> SumRuleResult:
    F = FamilyLabel
    return SumRuleResult(4, 2 * E[F.T_v3], E[F.TE_v1v3] + E[F.TH_v2v3] + 3 * E[F.Ts2_v1v2])


def closed_form_energies(p: ModelParams, form: str = "reference") -> dict[FamilyLabel, float]:
    return {f: family_energy_closed_form(f, p, form) for f in FamilyLabel}


def numeric_energies(p: ModelParams, labels=None, opts: IntegrationOptions | None = None) -> dict[FamilyLabel, float]:
    labels = list(labels) if labels is not None else list(FamilyLabel)
    return {f: trajectory_energy_numeric(family_member(f, p, opts=opts)).value for f in labels}


def check_sum_rules(p: ModelParams, energies: dict[FamilyLabel, float] | None = None, form: str = "reference") -> list[SumRuleResult]:
    """The four sum rules with closed-form (default) or supplied energies."""
    _require_h1(p)
    E = energies if energies is not None else closed_form_energies(p, form)
    return evaluate_sum_rules(E)


# ---------------------------------------------------------------------------
# Stability and lumps


@dataclass(frozen=True)
class StabilityVerdict:
    tag: str
    crossings: tuple[TrajectoryEvent, ...] = field(default=())

    @property
    def stable(self) -> bool:
        return self.tag == "stable"


def classify_stability(traj: KinkTrajectory, p: ModelParams | None = None) -> StabilityVerdict:
    """Unstable iff the orbit crosses the edge F1F3 or AF2."""
    crossings = tuple(traj.edge_crossings())
    return StabilityVerdict("unstable" if crossings else "stable", crossings)


def smooth(values: np.ndarray, window: int) -> np.ndarray:
    """Centred moving average; the window shrinks at the ends."""
    if window <= 1:
        return np.asarray(values, dtype=float)
    v = np.asarray(values, dtype=float)
    kernel = np.ones(window)
    num = np.convolve(v, kernel, mode="same")
    den = np.convolve(np.ones_like(v), kernel, mode="same")
    return num / den


def count_lumps(profile: EnergyProfile, theta: float = DEFAULT_THETA, window: int = DEFAULT_WINDOW) -> int:
    """Strict local maxima of the smoothed density above theta * max."""
    if not 0.0 < theta < 1.0:
        raise ValidationError("theta must lie in (0, 1)")
    if window < 1:
        raise ValidationError("window must be a positive sample count")
    e = smooth(profile.eps, window)
    if len(e) < 3 or not np.any(e > 0):
        return 0
    thr = theta * float(e.max())
    mid = e[1:-1]
    peaks = (mid > e[:-2]) & (mid > e[2:]) & (mid > thr)
    return int(np.count_nonzero(peaks))


def euler_lagrange_residual(traj: KinkTrajectory, dx: float = 0.005, resolve_floor: float = 1e-10) -> float:
    """Sup-norm of phi'' - grad U by central differences on the Cartesian samples.

    Stencils touching a sample where a moving coordinate lies within
    ``resolve_floor`` of sigma2 or sigma3 are skipped: there the Cartesian
    components behave like square roots of numbers below double-precision
    resolution (the exponential tails at the vacua).  Stencils straddling a
    focal-edge crossing are skipped too: those points lie on the boundary
    of the coordinate box, where two square-root factors vanish together.
    """
    from .model_core import potential_gradient_cartesian

    p = traj.params
    xs, ts, _, phi = traj.resample(dx)
    h = xs[1] - xs[0]
    free = ~traj.pinned
    d = np.abs(np.abs(ts[:, free])[:, :, None] - np.array([p.sigma2, p.sigma3]))
    unresolved = np.any(d < resolve_floor, axis=(1, 2)) if free.any() else np.zeros(len(xs), dtype=bool)
    acc = (phi[2:] - 2 * phi[1:-1] + phi[:-2]) / h**2
    res = np.max(np.abs(acc - potential_gradient_cartesian(phi[1:-1], p)), axis=1)
    ok = ~(unresolved[:-2] | unresolved[1:-1] | unresolved[2:])
    for ev in traj.edge_crossings():
        ok &= ~((xs[:-2] <= ev.x) & (ev.x <= xs[2:]))
    return float(res[ok].max()) if np.any(ok) else 0.0
