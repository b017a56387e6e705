"""Model parameters, regimes, the Cartesian/elliptic charts and the potential.

The internal space carries Jacobi elliptic coordinates defined by the
couplings ``a3 = 1 - sigma3^2 < a2 = 1 - sigma2^2 < 1``.  The three
coordinates are the roots of

    P(z) = (1-z)(a2-z)(a3-z) - phi1^2 (a2-z)(a3-z)
           - phi2^2 (1-z)(a3-z) - phi3^2 (1-z)(a2-z) = prod_i (lambda_i - z)

and interlace as ``lambda1 <= a3 <= lambda2 <= a2 <= lambda3 <= 1``.

The potential is a Staeckel sum ``U = 1/2 sum_i F(lambda_i) / f_i(lambda)``
with ``f_i = prod_{k != i} (lambda_i - lambda_k)`` and
``F(z) = z^2 (z - a2)(z - a3)(z - abar2)^2``.  Such a sum is the divided
difference ``F[lambda1, lambda2, lambda3]``, i.e. a combination of complete
homogeneous symmetric polynomials of the roots.  Those only need the
elementary symmetric functions, which are linear in ``phi_i^2``, so the
potential is evaluated without root finding and without any 0/0 on faces
or edges of the chart.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import ConditioningError, DomainError, SingularChartError, ValidationError

#: Absolute tolerance for clamping radicands and detecting face contact.
EPS_NUM = 1e-12

#: Tolerance on root ordering before a conditioning error is raised.
ORDER_TOL = 1e-9


@dataclass(frozen=True)
class ModelParams:
    """Couplings of the three-field model.

    ``sigma2_sq`` and ``sigma3_sq`` lie in (0, 1) with ``sigma2_sq < sigma3_sq``;
    ``alpha_bar_sq`` is any real number.
    """

    sigma2_sq: float
    sigma3_sq: float
    alpha_bar_sq: float

    def __post_init__(self) -> None:
        vals = (self.sigma2_sq, self.sigma3_sq, self.alpha_bar_sq)
        if not all(isinstance(v, (int, float, np.floating)) for v in vals):
            raise ValidationError("couplings must be real numbers")
        if not all(math.isfinite(float(v)) for v in vals):
            raise ValidationError("couplings must be finite")
        if not 0.0 < self.sigma2_sq < 1.0 or not 0.0 < self.sigma3_sq < 1.0:
            raise ValidationError("sigma2_sq and sigma3_sq must lie in (0, 1)")
        if not self.sigma2_sq < self.sigma3_sq:
            raise ValidationError("need sigma2_sq < sigma3_sq (so that a3 < a2)")

    @property
    def sigma2_bar_sq(self) -> float:
        return 1.0 - self.sigma2_sq

    @property
    def sigma3_bar_sq(self) -> float:
        return 1.0 - self.sigma3_sq

    @property
    def alpha_sq(self) -> float:
        return 1.0 - self.alpha_bar_sq

    @property
    def sigma2(self) -> float:
        return math.sqrt(self.sigma2_sq)

    @property
    def sigma3(self) -> float:
        return math.sqrt(self.sigma3_sq)

    @property
    def alpha(self) -> float:
        """sqrt(1 - abar^2); NaN when abar^2 > 1."""
        return math.sqrt(self.alpha_sq) if self.alpha_sq >= 0.0 else math.nan

    @property
    def c(self) -> np.ndarray:
        """The constant vector (abar^2, a2, a3, 0)."""
        return np.array([self.alpha_bar_sq, self.sigma2_bar_sq, self.sigma3_bar_sq, 0.0])

    @property
    def s(self) -> np.ndarray:
        """sqrt(1 - c_j) = (alpha, sigma2, sigma3, 1), each from its own square root."""
        return np.array([self.alpha, self.sigma2, self.sigma3, 1.0])

    def as_tuple(self) -> tuple[float, float, float]:
        return (float(self.sigma2_sq), float(self.sigma3_sq), float(self.alpha_bar_sq))


class Regime(enum.Enum):
    E1 = "E1"
    E2 = "E2"
    H1 = "H1"
    H2 = "H2"
    H2PRIME = "H2prime"

    @property
    def interval(self) -> str:
        return {"E1": "L0", "E2": "L1", "H1": "L2", "H2": "L3", "H2prime": "{1}"}[self.value]

    def __str__(self) -> str:
        return self.value


def classify_regime(p: ModelParams) -> Regime:
    """Regime from the position of abar^2 relative to 0 < a3 < a2 < 1.

    Negative abar^2 puts the extra zero on an ellipsoid outside the unit one,
    which behaves like the E2 case with the two ellipsoids exchanged.
    """
    ab, a2, a3 = p.alpha_bar_sq, p.sigma2_bar_sq, p.sigma3_bar_sq
    if ab in (0.0, a3, a2) or ab > 1.0:
        return Regime.E1
    if ab == 1.0:
        return Regime.H2PRIME
    if ab < a3:
        return Regime.E2
    if ab < a2:
        return Regime.H1
    return Regime.H2


def is_regime_boundary(p: ModelParams, tol: float = EPS_NUM) -> bool:
    """True when abar^2 sits within ``tol`` of one of 0, a3, a2, 1."""
    ab = p.alpha_bar_sq
    return any(abs(ab - v) <= tol for v in (0.0, p.sigma3_bar_sq, p.sigma2_bar_sq, 1.0))


@dataclass(frozen=True)
class EllipticPoint:
    lambda1: float
    lambda2: float
    lambda3: float

    def as_array(self) -> np.ndarray:
        return np.array([self.lambda1, self.lambda2, self.lambda3], dtype=float)

    @classmethod
    def from_array(cls, a: Iterable[float]) -> "EllipticPoint":
        l1, l2, l3 = (float(v) for v in a)
        return cls(l1, l2, l3)

    def boundary_contacts(self, p: ModelParams, tol: float = EPS_NUM) -> tuple[tuple[int, float], ...]:
        """(coordinate index, face value) pairs within ``tol`` of a range endpoint."""
        faces = {0: (p.sigma3_bar_sq,), 1: (p.sigma3_bar_sq, p.sigma2_bar_sq), 2: (p.sigma2_bar_sq, 1.0)}
        lam = self.as_array()
        return tuple((i, v) for i, vals in faces.items() for v in vals if abs(lam[i] - v) <= tol)

    def on_boundary(self, p: ModelParams, tol: float = EPS_NUM) -> bool:
        return bool(self.boundary_contacts(p, tol))


@dataclass(frozen=True)
class CartesianPoint:
    phi1: float
    phi2: float
    phi3: float

    def as_array(self) -> np.ndarray:
        return np.array([self.phi1, self.phi2, self.phi3], dtype=float)

    @classmethod
    def from_array(cls, a: Iterable[float]) -> "CartesianPoint":
        x, y, z = (float(v) for v in a)
        return cls(x, y, z)


@dataclass(frozen=True)
class SignChoice:
    s1: int = 1
    s2: int = 1
    s3: int = 1

    def __post_init__(self) -> None:
        if any(v not in (1, -1) for v in (self.s1, self.s2, self.s3)):
            raise ValidationError("sign components must be +1 or -1")

    @classmethod
    def of(cls, phi: CartesianPoint | np.ndarray) -> "SignChoice":
        a = phi.as_array() if isinstance(phi, CartesianPoint) else np.asarray(phi, dtype=float)
        return cls(*(1 if v >= 0 else -1 for v in a))

    def as_array(self) -> np.ndarray:
        return np.array([self.s1, self.s2, self.s3], dtype=float)


def check_range(lam: EllipticPoint, p: ModelParams, tol: float = EPS_NUM) -> None:
    """Raise DomainError unless ``lam`` lies in the closed coordinate ranges."""
    l1, l2, l3 = lam.lambda1, lam.lambda2, lam.lambda3
    a2, a3 = p.sigma2_bar_sq, p.sigma3_bar_sq
    if not (l1 <= a3 + tol and a3 - tol <= l2 <= a2 + tol and a2 - tol <= l3 <= 1.0 + tol):
        raise DomainError(f"elliptic point {lam} outside the coordinate ranges")


# ---------------------------------------------------------------------------
# Elementary symmetric functions of the roots and the cubic inversion


def symmetric_from_phi(phi: np.ndarray, p: ModelParams) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(e1, e2, e3) of the elliptic coordinates, from Cartesian fields.

    ``phi`` has shape (..., 3).  The roots satisfy
    ``z^3 - e1 z^2 + e2 z - e3 = 0``.
    """
    phi = np.asarray(phi, dtype=float)
    a2, a3 = p.sigma2_bar_sq, p.sigma3_bar_sq
    q1, q2, q3 = phi[..., 0] ** 2, phi[..., 1] ** 2, phi[..., 2] ** 2
    e1 = (1.0 + a2 + a3) - (q1 + q2 + q3)
    e2 = (a2 + a3 + a2 * a3) - q1 * (a2 + a3) - q2 * (1.0 + a3) - q3 * (1.0 + a2)
    e3 = a2 * a3 * (1.0 - q1) - q2 * a3 - q3 * a2
    return e1, e2, e3


def symmetric_from_lambda(lam: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    lam = np.asarray(lam, dtype=float)
    l1, l2, l3 = lam[..., 0], lam[..., 1], lam[..., 2]
    return l1 + l2 + l3, l1 * l2 + l1 * l3 + l2 * l3, l1 * l2 * l3


def _cubic_real_roots(e1: float, e2: float, e3: float) -> np.ndarray:
    """Sorted real roots of z^3 - e1 z^2 + e2 z - e3 by the trigonometric method."""
    b, c, d = -e1, e2, -e3
    shift = -b / 3.0
    pp = c - b * b / 3.0
    qq = 2.0 * b**3 / 27.0 - b * c / 3.0 + d
    if pp >= 0.0:
        # Triple root (or round-off around it): all roots collapse.
        y = np.cbrt(-qq)
        roots = np.array([y, y, y]) + shift
    else:
        m = 2.0 * math.sqrt(-pp / 3.0)
        arg = 3.0 * qq / (pp * m)
        theta = math.acos(min(1.0, max(-1.0, arg))) / 3.0
        roots = m * np.cos(theta - 2.0 * math.pi * np.arange(3) / 3.0) + shift
    # One Newton step per root sharpens well-separated roots; skipped near
    # double roots where the derivative vanishes.
    for k in range(3):
        z = roots[k]
        f = ((z - e1) * z + e2) * z - e3
        df = (3.0 * z - 2.0 * e1) * z + e2
        if abs(df) > 1e-6:
            roots[k] = z - f / df
    return np.sort(roots)


def cartesian_to_elliptic(phi: CartesianPoint, p: ModelParams) -> EllipticPoint:
    """Ordered elliptic coordinates of a Cartesian point."""
    e1, e2, e3 = symmetric_from_phi(phi.as_array(), p)
    lam = _cubic_real_roots(float(e1), float(e2), float(e3))
    a2, a3 = p.sigma2_bar_sq, p.sigma3_bar_sq
    scale = max(1.0, abs(lam[0]))
    tol = ORDER_TOL * scale
    lo = (-math.inf, a3, a2)
    hi = (a3, a2, 1.0)
    for i in range(3):
        if lam[i] < lo[i] - tol or lam[i] > hi[i] + tol:
            raise ConditioningError(f"root ordering violated for phi={phi}: lambda={lam}")
        lam[i] = min(max(lam[i], lo[i]), hi[i])
    return EllipticPoint.from_array(lam)


def radicands(lam: np.ndarray, p: ModelParams) -> np.ndarray:
    """The three squared Cartesian components for elliptic coordinates ``lam``."""
    lam = np.asarray(lam, dtype=float)
    s2, s3 = p.sigma2_sq, p.sigma3_sq
    a2, a3 = p.sigma2_bar_sq, p.sigma3_bar_sq
    r1 = np.prod(1.0 - lam, axis=-1) / (s2 * s3)
    r2 = -np.prod(a2 - lam, axis=-1) / (s2 * (s3 - s2))
    r3 = -np.prod(a3 - lam, axis=-1) / (s3 * (s2 - s3))
    return np.stack([r1, r2, r3], axis=-1)


def elliptic_to_cartesian(lam: EllipticPoint, s: SignChoice, p: ModelParams) -> CartesianPoint:
    """Cartesian point in the octant selected by ``s``."""
    r = radicands(lam.as_array(), p)
    if np.any(r < -EPS_NUM):
        raise DomainError(f"negative radicand {r} for {lam}: coordinates out of range")
    mags = np.sqrt(np.clip(r, 0.0, None))
    return CartesianPoint.from_array(mags * s.as_array())


def metric_coefficients(lam: EllipticPoint, p: ModelParams) -> tuple[float, float, float]:
    """Diagonal metric g_jj = -1/4 f_j / ((l_j - 1)(l_j - a2)(l_j - a3))."""
    g = metric_array(lam.as_array(), p)
    return float(g[0]), float(g[1]), float(g[2])


def metric_array(lam: np.ndarray, p: ModelParams) -> np.ndarray:
    """Vectorised metric for arrays of shape (..., 3); raises on faces and edges."""
    lam = np.asarray(lam, dtype=float)
    a2, a3 = p.sigma2_bar_sq, p.sigma3_bar_sq
    f = coincidence_products(lam)
    den = (lam - 1.0) * (lam - a2) * (lam - a3)
    if np.any(np.abs(f) <= EPS_NUM) or np.any(np.abs(den) <= EPS_NUM):
        raise SingularChartError("metric evaluated on a face or edge of the elliptic chart")
    return -0.25 * f / den


def coincidence_products(lam: np.ndarray) -> np.ndarray:
    """f_i = prod_{k != i} (lambda_i - lambda_k) for arrays of shape (..., 3)."""
    lam = np.asarray(lam, dtype=float)
    l1, l2, l3 = lam[..., 0], lam[..., 1], lam[..., 2]
    return np.stack([(l1 - l2) * (l1 - l3), (l2 - l1) * (l2 - l3), (l3 - l1) * (l3 - l2)], axis=-1)


# ---------------------------------------------------------------------------
# Potentials


def numerator_coefficients(p: ModelParams, alpha_factor: bool = True) -> np.ndarray:
    """Ascending coefficients of F(z) = z^2 (z-a2)(z-a3) [(z-abar2)^2]."""
    roots = [0.0, 0.0, p.sigma2_bar_sq, p.sigma3_bar_sq]
    if alpha_factor:
        roots += [p.alpha_bar_sq, p.alpha_bar_sq]
    return npoly.polyfromroots(roots)


def _complete_homogeneous(e1, e2, e3, kmax: int):
    """h_0..h_kmax of three variables and their partials with respect to e1, e2, e3."""
    e1 = np.asarray(e1, dtype=float)
    zero = np.zeros_like(e1)
    one = np.ones_like(e1)
    h = [one]
    dh = [(zero, zero, zero)]
    for k in range(1, kmax + 1):
        hk = e1 * h[k - 1]
        d1, d2, d3 = h[k - 1] + e1 * dh[k - 1][0], e1 * dh[k - 1][1], e1 * dh[k - 1][2]
        if k >= 2:
            hk = hk - e2 * h[k - 2]
            d1, d2, d3 = d1 - e2 * dh[k - 2][0], d2 - h[k - 2] - e2 * dh[k - 2][1], d3 - e2 * dh[k - 2][2]
        if k >= 3:
            hk = hk + e3 * h[k - 3]
            d1, d2, d3 = d1 + e3 * dh[k - 3][0], d2 + e3 * dh[k - 3][1], d3 + h[k - 3] + e3 * dh[k - 3][2]
        h.append(hk)
        dh.append((d1, d2, d3))
    return h, dh


def _divided_difference(coeffs: np.ndarray, e1, e2, e3, gradient: bool = False):
    """F[l1, l2, l3] from the elementary symmetric functions (and d/de)."""
    n = len(coeffs) - 1
    h, dh = _complete_homogeneous(e1, e2, e3, max(n - 2, 0))
    val = np.zeros_like(np.asarray(e1, dtype=float))
    g1 = np.zeros_like(val)
    g2 = np.zeros_like(val)
    g3 = np.zeros_like(val)
    for k in range(2, n + 1):
        val = val + coeffs[k] * h[k - 2]
        if gradient:
            g1 = g1 + coeffs[k] * dh[k - 2][0]
            g2 = g2 + coeffs[k] * dh[k - 2][1]
            g3 = g3 + coeffs[k] * dh[k - 2][2]
    if gradient:
        return val, (g1, g2, g3)
    return val


def potential_elliptic(lam: EllipticPoint | np.ndarray, p: ModelParams, alpha_factor: bool = True):
    """U in elliptic coordinates (float for a point, array for stacked input).

    With ``alpha_factor=False`` the (lambda_i - abar^2)^2 factor is dropped,
    which gives the undeformed three-field potential.
    """
    arr = lam.as_array() if isinstance(lam, EllipticPoint) else np.asarray(lam, dtype=float)
    e1, e2, e3 = symmetric_from_lambda(arr)
    u = 0.5 * _divided_difference(numerator_coefficients(p, alpha_factor), e1, e2, e3)
    return float(u) if np.ndim(u) == 0 else u


def potential_cartesian(phi: CartesianPoint | np.ndarray, p: ModelParams, alpha_factor: bool = True):
    """The same potential as a function of the Cartesian fields (degree 8)."""
    arr = phi.as_array() if isinstance(phi, CartesianPoint) else np.asarray(phi, dtype=float)
    e1, e2, e3 = symmetric_from_phi(arr, p)
    u = 0.5 * _divided_difference(numerator_coefficients(p, alpha_factor), e1, e2, e3)
    return float(u) if np.ndim(u) == 0 else u


def potential_gradient_cartesian(phi: np.ndarray, p: ModelParams, alpha_factor: bool = True) -> np.ndarray:
    """Analytic gradient dU/dphi for arrays of shape (..., 3)."""
    phi = np.asarray(phi, dtype=float)
    a2, a3 = p.sigma2_bar_sq, p.sigma3_bar_sq
    e1, e2, e3 = symmetric_from_phi(phi, p)
    _, (g1, g2, g3) = _divided_difference(numerator_coefficients(p, alpha_factor), e1, e2, e3, gradient=True)
    k2 = np.array([a2 + a3, 1.0 + a3, 1.0 + a2])
    k3 = np.array([a2 * a3, a3, a2])
    g1, g2, g3 = (np.asarray(g)[..., None] for g in (g1, g2, g3))
    # de1/dphi = -2 phi, de2/dphi = -2 phi k2, de3/dphi = -2 phi k3
    return 0.5 * (-2.0 * phi) * (g1 + g2 * k2 + g3 * k3)


def potential_mstb3_cartesian(phi: CartesianPoint | np.ndarray, p: ModelParams):
    """Undeformed potential 1/2(|phi|^2 - 1)^2 + 1/2 s2 phi2^2 + 1/2 s3 phi3^2."""
    arr = phi.as_array() if isinstance(phi, CartesianPoint) else np.asarray(phi, dtype=float)
    r2 = np.sum(arr**2, axis=-1)
    u = 0.5 * (r2 - 1.0) ** 2 + 0.5 * p.sigma2_sq * arr[..., 1] ** 2 + 0.5 * p.sigma3_sq * arr[..., 2] ** 2
    return float(u) if np.ndim(u) == 0 else u
