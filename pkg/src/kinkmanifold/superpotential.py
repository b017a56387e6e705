"""Superpotential of the model and the sign-sector bookkeeping.

Each coordinate contributes ``W_i = (1/15) (-1)^beta_i P2(lambda_i) sqrt(1 - lambda_i)``
with ``P2(z) = 2d + d z - 3 z^2`` and ``d = 5 abar^2 - 4``.  In the variable
``t = sqrt(1 - lambda)`` the same function is the odd quintic
``w(t) = -alpha^2 t + (1 + alpha^2) t^3 / 3 - t^5 / 5``, whose derivative
``-(1 - t^2)(alpha^2 - t^2)`` is what the first-order flow uses.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SingularChartError, ValidationError
from .model_core import EPS_NUM, EllipticPoint, ModelParams, metric_array, potential_elliptic


@dataclass(frozen=True)
class SignSector:
    beta1: int = 0
    beta2: int = 0
    beta3: int = 0

    def __post_init__(self) -> None:
        if any(b not in (0, 1) for b in self.as_tuple()):
            raise ValidationError("sector components must be 0 or 1")

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.beta1, self.beta2, self.beta3)

    def signs(self) -> np.ndarray:
        """(-1)^beta_i as a float array."""
        return np.array([1.0 - 2.0 * b for b in self.as_tuple()])

    def flipped(self, *indices: int) -> "SignSector":
        b = list(self.as_tuple())
        for i in indices:
            b[i] = 1 - b[i]
        return SignSector(*b)

    @classmethod
    def from_signs(cls, signs) -> "SignSector":
        return cls(*(0 if v > 0 else 1 for v in signs))

    @classmethod
    def parse(cls, text: str) -> "SignSector":
        digits = [c for c in text if c in "01"]
        if len(digits) != 3:
            raise ValidationError(f"cannot parse sign sector {text!r}")
        return cls(*(int(c) for c in digits))

    @staticmethod
    def all() -> list["SignSector"]:
        return [SignSector(*b) for b in itertools.product((0, 1), repeat=3)]

    def __str__(self) -> str:
        return "({},{},{})".format(*self.as_tuple())


@dataclass(frozen=True)
class SuperpotentialValue:
    value: float
    per_coordinate: tuple[float, float, float]


def p2(lambda_i: float, p: ModelParams) -> float:
    d = 5.0 * p.alpha_bar_sq - 4.0
    return 2.0 * d + d * lambda_i - 3.0 * lambda_i**2


def w_of_t(t, p: ModelParams):
    """Single-coordinate superpotential in the variable t = +-sqrt(1 - lambda)."""
    t = np.asarray(t, dtype=float)
    a = p.alpha_sq
    return -a * t + (1.0 + a) * t**3 / 3.0 - t**5 / 5.0


def dw_dt(t, p: ModelParams):
    t = np.asarray(t, dtype=float)
    return -(1.0 - t * t) * (p.alpha_sq - t * t)


def superpotential_value(lam: EllipticPoint, s: SignSector, p: ModelParams) -> SuperpotentialValue:
    arr = lam.as_array()
    if np.any(arr > 1.0 + EPS_NUM):
        raise DomainError(f"lambda above 1 in {lam}")
    t = np.sqrt(np.clip(1.0 - arr, 0.0, None))
    parts = s.signs() * np.array([p2(v, p) for v in arr]) * t / 15.0
    return SuperpotentialValue(float(parts.sum()), tuple(float(v) for v in parts))


def superpotential_gradient(lam: EllipticPoint, s: SignSector, p: ModelParams) -> tuple[float, float, float]:
    """dW/dlambda_i = (-1)^beta_i lambda_i (lambda_i - abar^2) / (2 sqrt(1 - lambda_i))."""
    arr = lam.as_array()
    if np.any(arr >= 1.0):
        raise SingularChartError("superpotential gradient is singular at lambda_i = 1")
    g = s.signs() * arr * (arr - p.alpha_bar_sq) / (2.0 * np.sqrt(1.0 - arr))
    return float(g[0]), float(g[1]), float(g[2])


def w_pde_residuals(lam: np.ndarray, p: ModelParams) -> np.ndarray:
    """Vectorised PDE residual |2U - sum g_ii^-1 (dW/dlambda_i)^2| / max(1, 2U)."""
    lam = np.atleast_2d(np.asarray(lam, dtype=float))
    g = metric_array(lam, p)
    if np.any(lam >= 1.0):
        raise SingularChartError("superpotential gradient is singular at lambda_i = 1")
    dw = lam * (lam - p.alpha_bar_sq) / (2.0 * np.sqrt(1.0 - lam))
    rhs = np.sum(dw**2 / g, axis=-1)
    two_u = 2.0 * potential_elliptic(lam, p)
    return np.abs(two_u - rhs) / np.maximum(1.0, two_u)


def verify_w_pde(lam: EllipticPoint, p: ModelParams) -> float:
    """Residual of 2U = sum g_ii^-1 (dW/dlambda_i)^2 at an interior point."""
    return float(w_pde_residuals(lam.as_array()[None, :], p)[0])


def sector_from_t(t: np.ndarray, eps: np.ndarray) -> SignSector:
    """Sector (-1)^beta_i = eps_i sign(t_i) of a state in the signed-t chart."""
    signs = [e * (1.0 if v >= 0 else -1.0) for e, v in zip(eps, t)]
    return SignSector.from_signs(signs)


def w_total_t(t: np.ndarray, eps: np.ndarray, p: ModelParams) -> float:
    """Superpotential sum_i eps_i w(t_i); equals superpotential_value in the matching sector."""
    return float(np.sum(np.asarray(eps) * w_of_t(np.asarray(t), p)))


__all__ = [
    "SignSector",
    "SuperpotentialValue",
    "p2",
    "w_of_t",
    "dw_dt",
    "superpotential_value",
    "superpotential_gradient",
    "verify_w_pde",
    "w_pde_residuals",
    "sector_from_t",
    "w_total_t",
]
