import cmath
import math
import random
from fractions import Fraction

import numpy as np
import pytest

from qkzbench.chain import ModelConfig
from qkzbench.correspond import (
    build_lax,
    check_correspondence,
    classical_hamiltonians,
    correspondence_targets,
    diagonalize_sector,
    match_distance,
    momenta_from_eigenvalues,
    velocity_scale,
)
from qkzbench.errors import MatchFailure
from qkzbench.tensor import all_sectors, sector_dimension
from qkzbench.verify import elementary_symmetric

ETA = Fraction(1, 2)
HBAR = Fraction(1, 3)
X3 = (Fraction(0), Fraction(2, 5), Fraction(9, 7))
G2 = (Fraction(2), Fraction(3))

CFG = ModelConfig.rational(2, 3, ETA, HBAR, X3, G2)
TCFG2 = ModelConfig.trigonometric(
    2, 2, Fraction(2), Fraction(5, 4), (Fraction(1), Fraction(3, 2)), G2
)


def test_single_site_sectors():
    cfg = ModelConfig.rational(2, 1, ETA, HBAR, (Fraction(0),), G2)
    for a, M in ((1, (1, 0)), (2, (0, 1))):
        (st,) = diagonalize_sector(cfg, M)
        assert st.eigenvalues[0] == complex(G2[a - 1])
        assert st.residuals == [0.0]


def test_one_dimensional_sector_sum_rule():
    cfg = ModelConfig.rational(2, 2, ETA, HBAR, X3[:2], G2)
    (st,) = diagonalize_sector(cfg, (2, 0))
    assert abs(sum(st.eigenvalues) - 2 * complex(G2[0])) < 1e-12


def test_sector_eigenvalue_sums():
    # every joint eigenstate satisfies the sum rule: sum_i lambda_i = 7
    states = diagonalize_sector(CFG, (2, 1), rng=random.Random(3))
    assert len(states) == sector_dimension((2, 1))
    for st in states:
        assert abs(sum(st.eigenvalues) - 7) < 1e-10


def test_eigenstate_counts():
    rng = random.Random(3)
    for M in all_sectors(2, 3):
        assert len(diagonalize_sector(CFG, M, rng=rng)) == sector_dimension(M)


def test_diagonalize_rejects_bad_tol():
    with pytest.raises(ValueError):
        diagonalize_sector(CFG, (2, 1), tol=0)


# ------------------------------------------------------------------ momenta

def test_single_site_momentum():
    cfg = ModelConfig.rational(2, 1, ETA, HBAR, (Fraction(0),), G2)
    (st,) = diagonalize_sector(cfg, (1, 0))
    mom = momenta_from_eigenvalues(cfg, st)
    assert abs(mom.momenta[0] - cmath.log(2) / float(ETA)) < 1e-12
    assert mom.branch == "principal"


def test_momentum_velocity_consistency():
    # eta e^{eta p_i} prod (x_i - x_j + eta)/(x_i - x_j) = xdot_i = eta lambda_i
    states = diagonalize_sector(CFG, (2, 1), rng=random.Random(3))
    eta = float(ETA)
    for st in states:
        mom = momenta_from_eigenvalues(CFG, st)
        for i, (p, lam, xdot) in enumerate(
            zip(mom.momenta, st.eigenvalues, mom.velocities), start=1
        ):
            factor = 1.0
            for j in range(1, 4):
                if j != i:
                    d = CFG.x[i - 1] - CFG.x[j - 1]
                    factor *= float((d + ETA) / d)
            assert abs(eta * cmath.exp(eta * p) * factor - xdot) < 1e-10
            assert abs(xdot - eta * lam) < 1e-12


def test_velocity_scale_flavors():
    assert velocity_scale(CFG) == ETA
    assert velocity_scale(TCFG2) == (Fraction(2) - Fraction(1, 2)) / 2


# ---------------------------------------------------------------------- Lax

def test_lax_single_site():
    cfg = ModelConfig.rational(2, 1, ETA, HBAR, (Fraction(0),), G2)
    (st,) = diagonalize_sector(cfg, (0, 1))
    mom = momenta_from_eigenvalues(cfg, st)
    L = build_lax(cfg, mom.velocities)
    assert L.entries.shape == (1, 1)
    assert abs(L.entries[0, 0] - 3) < 1e-12
    h = classical_hamiltonians(L)
    assert abs(h[0] - 3) < 1e-12


def test_classical_hamiltonians_trace_and_det():
    states = diagonalize_sector(CFG, (1, 2), rng=random.Random(5))
    mom = momenta_from_eigenvalues(CFG, states[0])
    L = build_lax(CFG, mom.velocities)
    h = classical_hamiltonians(L)
    assert abs(h[0] - np.trace(L.entries)) < 1e-10
    assert abs(h[-1] - np.linalg.det(L.entries)) < 1e-10


def test_lax_spectrum_invariant_under_relabeling():
    # renaming the particles conjugates L by a permutation matrix
    states = diagonalize_sector(CFG, (2, 1), rng=random.Random(5))
    mom = momenta_from_eigenvalues(CFG, states[0])
    L = build_lax(CFG, mom.velocities)
    perm = [2, 0, 1]
    x_perm = tuple(CFG.x[p] for p in perm)
    cfg_perm = ModelConfig.rational(2, 3, ETA, HBAR, x_perm, G2)
    v_perm = [mom.velocities[p] for p in perm]
    L2 = build_lax(cfg_perm, v_perm)
    s1 = sorted(np.linalg.eigvals(L.entries), key=lambda z: (z.real, z.imag))
    s2 = sorted(np.linalg.eigvals(L2.entries), key=lambda z: (z.real, z.imag))
    # the repeated target eigenvalue makes L defective, so double-precision
    # spectra carry an eps^(1/2) splitting; similarity itself is exact
    assert max(abs(a - b) for a, b in zip(s1, s2)) < 1e-6
    assert np.allclose(
        sorted(np.abs(np.linalg.eigvals(L.entries))),
        sorted(np.abs(np.linalg.eigvals(L2.entries))),
        atol=1e-6,
    )


# ------------------------------------------------------------------ matching

def test_match_distance_exact_assignment():
    vals = [1 + 0j, 2 + 0j, 3 + 0j]
    assert match_distance(vals, [3 + 0j, 1 + 0j, 2 + 0j]) == 0.0
    assert match_distance(vals, [1 + 0j, 2 + 0j, 3.5 + 0j]) == 0.5


def test_match_distance_size_mismatch():
    with pytest.raises(MatchFailure):
        match_distance([1 + 0j], [1 + 0j, 2 + 0j])


# ----------------------------------------------------------- correspondence

def test_rational_targets_are_twist_multiset():
    assert correspondence_targets(CFG, (2, 1)) == [G2[0], G2[0], G2[1]]


def test_trig_targets_are_strings():
    t = TCFG2.t
    assert correspondence_targets(TCFG2, (2, 0)) == [
        G2[0] / t,
        G2[0] * t,
    ]


def test_string_centers_multiply_to_power():
    # prod_alpha g t^{2 alpha - M + 1} = g^M for every length, exactly
    g, t = Fraction(5, 3), Fraction(7, 2)
    for m in range(1, 6):
        prod = Fraction(1)
        for alpha in range(m):
            prod *= g * t ** (2 * alpha - m + 1)
        assert prod == g**m


def test_correspondence_rational_all_sectors():
    rng = random.Random(7)
    for M in all_sectors(2, 3):
        rep = check_correspondence(CFG, M, tol=1e-8, rng=rng)
        assert rep.passed, (M, rep.worst)
        assert len(rep.rows) == sector_dimension(M)
        for row in rep.rows:
            assert row.match_distance <= 1e-8
            assert row.hamiltonian_deviation <= 1e-8


def test_correspondence_trig_string_example():
    # sector (2, 0) at t = 2: the string is {g_1/2, 2 g_1} = {1, 4}
    rep = check_correspondence(TCFG2, (2, 0), tol=1e-8, rng=random.Random(7))
    assert rep.passed
    (row,) = rep.rows
    assert [round(z.real, 6) for z in row.target] == [1.0, 4.0]
    assert row.match_distance <= 1e-8


def test_correspondence_velocity_trace_identity():
    # sum_i xdot_i / scale = sum_a g_a M_a within 1e-10
    rng = random.Random(9)
    scale = complex(velocity_scale(CFG))
    for M in all_sectors(2, 3):
        rep = check_correspondence(CFG, M, rng=rng)
        expect = sum(float(g) * m for g, m in zip(G2, M))
        for row in rep.rows:
            total = sum(row.velocities) / scale
            assert abs(total - expect) < 1e-10


def test_correspondence_invariants_match_energy_levels():
    # the classical invariants sit on the level set e_d(multiset)
    rng = random.Random(11)
    targets = correspondence_targets(CFG, (2, 1))
    rep = check_correspondence(CFG, (2, 1), rng=rng)
    for row in rep.rows:
        for d in range(1, 4):
            e_d = float(elementary_symmetric(targets, d))
            assert abs(row.invariants[d - 1] - e_d) < 1e-8
            # and the reported spectrum reproduces them
            got = elementary_symmetric(row.lax_spectrum, d)
            assert abs(got - e_d) < 1e-8
