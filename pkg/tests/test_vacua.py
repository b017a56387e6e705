from __future__ import annotations

import itertools
import math

import numpy as np
import pytest

from kinkmanifold.errors import ValidationError
from kinkmanifold.model_core import ModelParams, Regime, cartesian_to_elliptic, potential_elliptic
from kinkmanifold.vacua import (
    MAX_HOLES,
    GeneralModelSpec,
    count_vacua_general,
    count_vacua_single_alpha,
    enumerate_vacua,
    gradient_norm_fd,
    stabilizer_order,
)

REGIME_PARAMS = {
    Regime.E1: ModelParams(0.25, 0.5, 2.0),
    Regime.E2: ModelParams(0.25, 0.5, 0.3),
    Regime.H1: ModelParams(0.25, 0.5, 0.6),
    Regime.H2: ModelParams(0.25, 0.5, 0.9),
    Regime.H2PRIME: ModelParams(0.25, 0.5, 1.0),
}


def test_h1_example(p_h1):
    vs = enumerate_vacua(p_h1)
    assert vs.regime is Regime.H1
    lams = {tuple(np.round(v.elliptic.as_array(), 12)) for v in vs.vacua}
    assert lams == {(0.0, 0.5, 0.75), (0.5, 0.6, 0.75), (0.0, 0.6, 0.75)}
    orbit = {tuple(np.round(q.as_array(), 6)) for q in vs.by_name("v3").cartesian_orbit}
    assert orbit == {(s1 * 0.894427, 0.0, s3 * 0.316228) for s1 in (1, -1) for s3 in (1, -1)}
    assert vs.cartesian_count == 8


def test_e1_example():
    vs = enumerate_vacua(REGIME_PARAMS[Regime.E1])
    assert vs.cartesian_count == 2
    assert {tuple(q.as_array()) for q in vs.vacua[0].cartesian_orbit} == {(1.0, 0.0, 0.0), (-1.0, 0.0, 0.0)}


def test_h2prime_origin():
    vs = enumerate_vacua(REGIME_PARAMS[Regime.H2PRIME])
    origin = [v for v in vs.vacua if v.orbit_size == 1]
    assert len(origin) == 1
    assert np.allclose(origin[0].cartesian_orbit[0].as_array(), 0.0)
    assert origin[0].stabilizer == "G"


@pytest.mark.parametrize("regime, count", [(Regime.E1, 2), (Regime.E2, 4), (Regime.H1, 8), (Regime.H2, 12)])
def test_regime_counts(regime, count):
    assert enumerate_vacua(REGIME_PARAMS[regime]).cartesian_count == count


@pytest.mark.parametrize("regime", list(REGIME_PARAMS))
def test_vacuum_invariants(regime):
    p = REGIME_PARAMS[regime]
    for v in enumerate_vacua(p).vacua:
        assert abs(potential_elliptic(v.elliptic, p)) < 1e-12
        assert v.orbit_size * stabilizer_order(v.stabilizer) == 8
        for q in v.cartesian_orbit:
            assert gradient_norm_fd(q, p) < 1e-8
            back = cartesian_to_elliptic(q, p).as_array()
            assert np.max(np.abs(back - v.elliptic.as_array())) < 1e-9


def test_vacua_are_all_zeros_on_a_grid(p_h1):
    # Independent oracle: scan a grid of the closed box for zeros of U.
    a2, a3 = p_h1.sigma2_bar_sq, p_h1.sigma3_bar_sq
    g1 = np.linspace(0, a3, 41)
    g2 = np.linspace(a3, a2, 41)
    g3 = np.linspace(a2, 1, 41)
    pts = np.array(list(itertools.product(g1, g2, g3)))
    pts = pts[(pts[:, 0] < pts[:, 1]) & (pts[:, 1] < pts[:, 2])]
    u = potential_elliptic(pts, p_h1)
    zeros = {tuple(np.round(q, 9)) for q in pts[u < 1e-14]}
    known = {tuple(np.round(v.elliptic.as_array(), 9)) for v in enumerate_vacua(p_h1).vacua}
    assert zeros == known


def test_count_single_alpha_formula():
    assert [count_vacua_single_alpha(3, j) for j in (1, 2, 3)] == [4, 8, 12]
    with pytest.raises(ValidationError):
        count_vacua_single_alpha(3, 4)


@pytest.mark.parametrize("j, regime", [(1, Regime.E2), (2, Regime.H1), (3, Regime.H2)])
def test_general_matches_three_field(j, regime):
    spec = GeneralModelSpec.single_hole(3, j)
    res = count_vacua_general(spec)
    hole = spec.alpha_holes[j - 1][0]
    p = ModelParams(1 - spec.sigma_bar_sq[0], 1 - spec.sigma_bar_sq[1], hole)
    assert enumerate_vacua(p).regime is regime
    assert res.cartesian_count == count_vacua_single_alpha(3, j) == enumerate_vacua(p).cartesian_count


def test_general_no_holes():
    for N in (2, 3, 5):
        res = count_vacua_general(GeneralModelSpec(N, tuple(1 - k / N for k in range(1, N))))
        assert res.elliptic_count == 1 and res.cartesian_count == 2


def test_general_one_hole_in_l2():
    assert count_vacua_general(GeneralModelSpec.single_hole(3, 2)).elliptic_count == 3


def _exhaustive(spec: GeneralModelSpec) -> tuple[int, int]:
    """Independent oracle: try every assignment of zero values to coordinates."""
    holes = [v for hs in spec.alpha_holes for v in hs]
    zeros = sorted(set([0.0, *spec.sigma_bar_sq, *holes]))
    edges = [-math.inf] + sorted(spec.sigma_bar_sq) + [1.0]
    planes = [1.0, *spec.sigma_bar_sq]
    ell = cart = 0
    for pt in itertools.product(zeros, repeat=spec.N):
        if not all(edges[k] <= pt[k] <= edges[k + 1] for k in range(spec.N)):
            continue
        if not all(a < b for a, b in zip(pt, pt[1:])):
            continue
        ell += 1
        cart += 2 ** sum(1 for s in planes if s not in pt)
    return ell, cart


def test_general_two_holes_oracle():
    spec = GeneralModelSpec(3, (0.75, 0.5), ((0.2,), (0.6,), ()))
    res = count_vacua_general(spec)
    assert (res.elliptic_count, res.cartesian_count) == _exhaustive(spec)
    assert res.elliptic_count == 1 + sum(res.per_q)


@pytest.mark.parametrize("N", [2, 3, 4, 5])
def test_general_single_hole_oracle(N):
    for j in range(1, N + 1):
        spec = GeneralModelSpec.single_hole(N, j)
        res = count_vacua_general(spec)
        assert (res.elliptic_count, res.cartesian_count) == _exhaustive(spec)
        assert res.elliptic_count == j + 1


def test_general_validation():
    with pytest.raises(ValidationError):
        GeneralModelSpec(3, (0.5, 0.75))
    with pytest.raises(ValidationError):
        GeneralModelSpec(3, (0.75, 0.5), ((0.6,),))
    with pytest.raises(ValidationError):
        GeneralModelSpec(3, (0.75, 0.5), ((0.1, 0.1),))
    too_many = tuple(0.01 + 0.001 * k for k in range(MAX_HOLES + 1))
    with pytest.raises(ValidationError):
        GeneralModelSpec(3, (0.75, 0.5), (too_many,))
