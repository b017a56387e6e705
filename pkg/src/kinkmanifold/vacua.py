"""Vacuum manifolds of the three-field model and N-field vacuum counting.

Elliptic vacua are the points of the closed coordinate box at which every
Staeckel term vanishes: each lambda_i sits at a zero of
``F(z) = z^2 (z - a2)(z - a3)(z - abar2)^2`` lying in its own range.  The
Cartesian orbit follows from the sign freedom of the nonzero components.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .model_core import (
    CartesianPoint,
    EllipticPoint,
    ModelParams,
    Regime,
    SignChoice,
    classify_regime,
    elliptic_to_cartesian,
    potential_cartesian,
    potential_elliptic,
)

#: Upper bound on the number of alpha-holes handled by the brute-force counter.
MAX_HOLES = 12

_ZERO_TOL = 1e-12

# Vanishing pattern of (phi1, phi2, phi3) -> stabilizer tag.  The named
# subgroups are those of the three-field regimes; any other pattern
# (which only appears at the degenerate point abar^2 = 1) gets an explicit
# product name.
_STABILIZER_NAMES = {
    (False, True, True): "H1",
    (False, True, False): "H3",
    (False, False, True): "H4",
    (True, True, True): "G",
    (False, False, False): "1",
}


def stabilizer_tag(phi: CartesianPoint) -> str:
    """Subgroup of Z2^3 fixing ``phi``, named from which components vanish."""
    zeros = tuple(abs(v) <= _ZERO_TOL for v in phi.as_array())
    if zeros in _STABILIZER_NAMES:
        return _STABILIZER_NAMES[zeros]
    return "x".join("Z2" if z else "1" for z in zeros)


def stabilizer_order(tag: str) -> int:
    if tag == "G":
        return 8
    if tag in ("H1",):
        return 4
    if tag in ("H3", "H4"):
        return 2
    if tag == "1":
        return 1
    return 2 ** tag.split("x").count("Z2")


@dataclass(frozen=True)
class Vacuum:
    name: str
    elliptic: EllipticPoint
    stabilizer: str
    cartesian_orbit: tuple[CartesianPoint, ...]

    @property
    def orbit_size(self) -> int:
        return len(self.cartesian_orbit)


@dataclass(frozen=True)
class VacuumSet:
    regime: Regime
    vacua: tuple[Vacuum, ...]

    @property
    def cartesian_count(self) -> int:
        return sum(v.orbit_size for v in self.vacua)

    def by_name(self, name: str) -> Vacuum:
        for v in self.vacua:
            if v.name == name:
                return v
        raise KeyError(name)

    def nearest(self, lam: EllipticPoint) -> tuple[Vacuum, float]:
        """Closest elliptic vacuum (max-norm) and its distance."""
        x = lam.as_array()
        dists = [float(np.max(np.abs(v.elliptic.as_array() - x))) for v in self.vacua]
        k = int(np.argmin(dists))
        return self.vacua[k], dists[k]


def cartesian_orbit(lam: EllipticPoint, p: ModelParams) -> tuple[CartesianPoint, ...]:
    """Distinct sign images of the Cartesian point(s) above ``lam``."""
    seen: dict[tuple[float, ...], CartesianPoint] = {}
    for signs in itertools.product((1, -1), repeat=3):
        phi = elliptic_to_cartesian(lam, SignChoice(*signs), p)
        arr = phi.as_array()
        arr[np.abs(arr) <= _ZERO_TOL] = 0.0
        key = tuple(np.round(arr, 12) + 0.0)
        seen.setdefault(key, CartesianPoint.from_array(arr))
    return tuple(seen[k] for k in sorted(seen, reverse=True))


def _elliptic_candidates(p: ModelParams) -> list[tuple[float, float, float]]:
    a2, a3, ab = p.sigma2_bar_sq, p.sigma3_bar_sq, p.alpha_bar_sq
    zeros = sorted({0.0, a3, a2, ab})
    r1 = [z for z in zeros if z <= a3]
    r2 = [z for z in zeros if a3 <= z <= a2]
    r3 = [z for z in zeros if a2 <= z <= 1.0]
    out = []
    for trip in itertools.product(r1, r2, r3):
        if not trip[0] <= trip[1] <= trip[2]:
            continue
        # Coincident coordinates are kept only when the divided difference
        # still vanishes (a higher-order zero of F at a shared endpoint).
        if potential_elliptic(np.array(trip), p) <= _ZERO_TOL:
            out.append(trip)
    return out


def enumerate_vacua(p: ModelParams) -> VacuumSet:
    """All vacua of the model at ``p`` with stabilizers and Cartesian orbits."""
    regime = classify_regime(p)
    cands = _elliptic_candidates(p)
    base = (0.0, p.sigma3_bar_sq, p.sigma2_bar_sq)
    rest = [c for c in cands if c != base]
    rest.sort(key=lambda t: (-t[0], -t[1], -t[2]))
    ordered = [base] + rest
    # Distinct elliptic points can share a Cartesian orbit only if they
    # coincide, so dedupe on the orbit itself as a safety net.
    vacua = []
    seen: set[tuple] = set()
    for trip in ordered:
        lam = EllipticPoint(*trip)
        orbit = cartesian_orbit(lam, p)
        key = tuple(sorted(tuple(np.round(q.as_array(), 10)) for q in orbit))
        if key in seen:
            continue
        seen.add(key)
        vacua.append(Vacuum(f"v{len(vacua) + 1}", lam, stabilizer_tag(orbit[0]), orbit))
    return VacuumSet(regime, tuple(vacua))


def gradient_norm_fd(phi: CartesianPoint, p: ModelParams, h: float = 1e-6) -> float:
    """Max-norm of the central-difference gradient of U at ``phi``."""
    x = phi.as_array()
    g = np.empty(3)
    for i in range(3):
        e = np.zeros(3)
        e[i] = h
        g[i] = (potential_cartesian(x + e, p) - potential_cartesian(x - e, p)) / (2 * h)
    return float(np.max(np.abs(g)))


# ---------------------------------------------------------------------------
# N-field counting


def count_vacua_single_alpha(N: int, j: int) -> int:
    """Closed-form Cartesian vacuum count 4 + (j-1) 2^(N-1) for one hole in L_j."""
    if N < 2 or not 1 <= j <= N:
        raise ValidationError("need N >= 2 and 1 <= j <= N")
    return 4 + (j - 1) * 2 ** (N - 1)


@dataclass(frozen=True)
class GeneralModelSpec:
    """N-field model with alpha-holes.

    ``sigma_bar_sq`` lists sigma_bar_2^2 > ... > sigma_bar_N^2 in (0, 1).
    ``alpha_holes[i]`` holds the hole values placed in interval L_{i+1},
    where L_1 = (0, sigma_bar_N^2), L_k = (sigma_bar_{N-k+2}^2, sigma_bar_{N-k+1}^2)
    and L_N = (sigma_bar_2^2, 1).
    """

    N: int
    sigma_bar_sq: tuple[float, ...]
    alpha_holes: tuple[tuple[float, ...], ...] = field(default=())

    def __post_init__(self) -> None:
        if self.N < 2:
            raise ValidationError("N must be at least 2")
        sb = tuple(float(v) for v in self.sigma_bar_sq)
        if len(sb) != self.N - 1:
            raise ValidationError(f"need {self.N - 1} sigma_bar values, got {len(sb)}")
        if any(not 0.0 < v < 1.0 for v in sb) or any(a <= b for a, b in zip(sb, sb[1:])):
            raise ValidationError("sigma_bar_sq must be strictly decreasing inside (0, 1)")
        holes = tuple(tuple(float(v) for v in h) for h in self.alpha_holes)
        holes = holes + ((),) * (self.N - len(holes))
        if len(holes) != self.N:
            raise ValidationError("alpha_holes has more entries than intervals")
        bounds = self.interval_bounds_of(sb)
        for i, hs in enumerate(holes):
            lo, hi = bounds[i]
            if len(set(hs)) != len(hs):
                raise ValidationError(f"repeated alpha-hole in L{i + 1}")
            for v in hs:
                if not lo < v < hi:
                    raise ValidationError(f"alpha-hole {v} outside L{i + 1} = ({lo}, {hi})")
        if sum(len(h) for h in holes) > MAX_HOLES:
            raise ValidationError(f"at most {MAX_HOLES} alpha-holes are supported")
        object.__setattr__(self, "sigma_bar_sq", sb)
        object.__setattr__(self, "alpha_holes", holes)

    @staticmethod
    def interval_bounds_of(sb: tuple[float, ...]) -> list[tuple[float, float]]:
        edges = [0.0] + sorted(sb) + [1.0]
        return list(zip(edges[:-1], edges[1:]))

    @property
    def block_bounds(self) -> list[tuple[float, float]]:
        """Coordinate ranges of lambda_1 .. lambda_N."""
        edges = [-np.inf] + sorted(self.sigma_bar_sq) + [1.0]
        return list(zip(edges[:-1], edges[1:]))

    @classmethod
    def single_hole(cls, N: int, j: int) -> "GeneralModelSpec":
        """Evenly spaced couplings with one hole in the middle of L_j."""
        sb = tuple(1.0 - k / N for k in range(1, N))
        bounds = cls.interval_bounds_of(sb)
        lo, hi = bounds[j - 1]
        holes = tuple((0.5 * (lo + hi),) if i == j - 1 else () for i in range(N))
        return cls(N, sb, holes)


@dataclass(frozen=True)
class GeneralCount:
    elliptic_count: int
    cartesian_count: int
    per_q: tuple[int, ...]


def _general_vacua(spec: GeneralModelSpec) -> list[tuple[tuple[float, ...], int]]:
    """(elliptic point, number of filled holes) for every vacuum."""
    holes = {v for hs in spec.alpha_holes for v in hs}
    choices = []
    for k, (lo, hi) in enumerate(spec.block_bounds):
        vals = {v for v in holes if lo <= v <= hi}
        if k == 0:
            vals.add(0.0)
        vals.update(e for e in (lo, hi) if np.isfinite(e) and e < 1.0)
        choices.append(sorted(vals))
    out = []
    for pt in itertools.product(*choices):
        if all(a < b for a, b in zip(pt, pt[1:])):
            out.append((pt, sum(1 for v in pt if v in holes)))
    return out


def count_vacua_general(spec: GeneralModelSpec) -> GeneralCount:
    """Brute-force count of elliptic and Cartesian vacua of the N-field model.

    Each block takes one of its zeros (end points, holes, and 0 for the
    first block); assignments must be strictly increasing.  The Cartesian
    multiplicity is 2^(number of nonzero fields), where field m vanishes
    exactly when some coordinate equals sigma_bar_m^2 (sigma_bar_1^2 = 1).
    """
    planes = (1.0,) + spec.sigma_bar_sq
    vac = _general_vacua(spec)
    per_q = [0] * (spec.N + 1)
    cart = 0
    for pt, q in vac:
        per_q[q] += 1
        nonzero = sum(1 for s in planes if s not in pt)
        cart += 2**nonzero
    return GeneralCount(len(vac), cart, tuple(per_q[1:]))
