import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from trispin import entanglement as ent
from trispin import spectra as sp
from trispin.errors import DimensionLimit, NotPSD


def _random_rdm(rng):
    """Random state with the symmetric two-site structure."""
    while True:
        r1, r2, r3 = rng.uniform(0, 1, 3)
        tot = r1 + 2 * r2 + r3
        r1, r2, r3 = r1 / tot, r2 / tot, r3 / tot
        rp = rng.uniform(-1, 1) * math.sqrt(r1 * r3)
        rm = rng.uniform(-1, 1) * r2
        rdm = ent.TwoSiteRDM(r1, r2, r3, rp, rm)
        if np.linalg.eigvalsh(rdm.matrix())[0] >= 0:
            return rdm


@given(st.integers(0, 2**31 - 1))
def test_formula_matches_explicit_partial_transpose(seed):
    rdm = _random_rdm(np.random.default_rng(seed))
    ev_formula = np.sort(ent.pt_eigenvalues(rdm))
    ev_explicit = np.linalg.eigvalsh(ent.partial_transpose(rdm.matrix()))
    assert np.allclose(ev_formula, ev_explicit, atol=1e-12)
    assert ent.log_negativity(rdm) == pytest.approx(ent.log_negativity_matrix(rdm.matrix()), abs=1e-12)


def test_clamp_near_separable():
    rdm = ent.TwoSiteRDM(0.25, 0.25, 0.25, 0.0, 0.0)
    assert ent.log_negativity(rdm) == 0.0
    assert ent.log_negativity_matrix(np.eye(4) / 4 + 1e-15) == 0.0


def test_not_psd_rejected():
    with pytest.raises(NotPSD):
        ent.TwoSiteRDM(0.5, 0.0, 0.5, 0.0, 0.3).check()
    with pytest.raises(NotPSD):
        ent.concurrence(np.diag([1.5, -0.5, 0, 0]))


def test_thermo_values():
    assert ent.logneg_thermo(1.0) == pytest.approx(0.05711, abs=1e-4)
    assert ent.logneg_thermo(0.0) == 0.0
    assert ent.logneg_thermo(0.9875) == pytest.approx(0.0226, abs=5e-4)
    assert ent.logneg_thermo(1e6) < 1e-5


@given(st.floats(-4, 4))
def test_thermo_symmetry(b):
    assert ent.logneg_thermo(b) == pytest.approx(ent.logneg_thermo(-b), abs=1e-8)


def test_rdm_from_expectations_matches_trace():
    gs = sp.cluster_ground_state(0.5, 12)
    traced = ent.reduced_density_matrix(gs, [1, 3])
    from_ev = ent.two_site_rdm(gs, 1, 3).matrix()
    assert np.allclose(traced, from_ev, atol=1e-12)


def test_finite_sums_match_exact_for_multiple_of_four():
    for n in (8, 12):
        for b in (0.5, 0.9875, 1.2):
            assert ent.logneg_finite(b, n, method="sums") == pytest.approx(
                ent.logneg_finite(b, n, method="exact"), abs=1e-9)


def test_finite_branch_labels():
    assert [ent.finite_branch(n) for n in (6, 7, 8, 10)] == ["even_a", "odd", "even_b", "even_a"]


def test_finite_sums_need_bridge_pair():
    with pytest.raises(ValueError):
        ent.logneg_finite(0.5, 10, pair=(1, 4))
    with pytest.raises(DimensionLimit):
        ent.logneg_finite(0.5, 22, method="exact")


def test_concurrence_reference_states():
    bell = np.array([1, 0, 0, 1]) / math.sqrt(2)
    assert ent.concurrence(np.outer(bell, bell)) == pytest.approx(1.0)
    assert ent.concurrence(np.diag([1.0, 0, 0, 0])) == pytest.approx(0.0)
    for p in (0.0, 0.2, 1 / 3, 0.5, 0.9, 1.0):
        assert ent.concurrence(ent.werner_state(p)) == pytest.approx(max(0.0, (3 * p - 1) / 2), abs=1e-10)


@given(st.integers(0, 2**31 - 1))
def test_pure_state_concurrence_formula(seed):
    r = np.random.default_rng(seed)
    p = r.standard_normal(4) + 1j * r.standard_normal(4)
    p /= np.linalg.norm(p)
    expected = 2 * abs(p[0] * p[3] - p[1] * p[2])
    assert ent.concurrence(np.outer(p, p.conj())) == pytest.approx(expected, abs=1e-9)


def test_average_concurrence_matches_outcome_enumeration():
    gs = sp.cluster_ground_state(0.4, 7)
    rng = np.random.default_rng(0)
    sc = ent.MeasurementScheme(rng.uniform(0, 3, (7, 2)), (1, 5))
    p, states = ent.outcome_distribution(gs, sc)
    ref = sum(pi * ent.concurrence(np.outer(s, s.conj())) for pi, s in zip(p, states) if pi > 1e-14)
    assert ent.average_concurrence(gs, sc) == pytest.approx(ref, abs=1e-9)


def test_prescribed_scheme_at_zero_field():
    n = 10
    gs = sp.cluster_ground_state(0.0, n)
    for L in (3, 5, 7, 9):
        assert ent.localisable_prescribed(0.0, n, L, gs) == pytest.approx(1.0, abs=1e-9)
    assert ent.prescribed_scheme(n, 5).labels() == "TXZZTZZZZZ"
    with pytest.raises(ValueError):
        ent.prescribed_scheme(n, 4)


def test_grid_search_on_ghz():
    ghz = np.zeros(8)
    ghz[0] = ghz[7] = 1 / math.sqrt(2)
    r = ent.localisable_optimize(ghz, (0, 2), "grid_bruteforce")
    assert r.value == pytest.approx(1.0, abs=1e-9)
    assert r.scheme.labels() in ("TXT", "TYT")


def test_annealing_is_seeded_and_bounded():
    gs = sp.cluster_ground_state(0.6, 8)
    sc = ent.prescribed_scheme(8, 5)
    a = ent.localisable_optimize(gs, sc.targets, budget=300, restarts=2, seed=5, init=sc)
    b = ent.localisable_optimize(gs, sc.targets, budget=300, restarts=2, seed=5, init=sc)
    assert a.value == b.value
    assert a.value >= ent.average_concurrence(gs, sc) - 1e-12
    assert a.value <= 1 + 1e-12
    assert 0 < a.acceptance_rate <= 1 and a.proposed == 600


def test_fit_lengths():
    assert ent.fit_lengths(16) == [3, 5, 7, 9]
    assert ent.e_infinity(0.6) == pytest.approx(0.8 ** 0.5)
    assert ent.e_infinity(1.5) == 0.0


def test_zero_expectations_give_maximally_mixed():
    ev = {"z": 0.0, "zz": 0.0, "pp": 0.0, "pm": 0.0}
    rdm = ent.rdm_from_expectations(ev)
    assert (rdm.rho1, rdm.rho2, rdm.rho3) == pytest.approx((0.25, 0.25, 0.25))
    assert np.allclose(rdm.matrix(), np.eye(4) / 4)


def test_bell_pair_negativity_and_product_state():
    bell = np.array([0, 1, 1, 0]) / math.sqrt(2)
    assert ent.log_negativity_matrix(np.outer(bell, bell)) == pytest.approx(1.0)
    rdm = ent.TwoSiteRDM(0.0, 0.5, 0.0, 0.0, 0.5)
    assert ent.log_negativity(rdm) == pytest.approx(1.0)
    assert ent.log_negativity_matrix(np.diag([0, 0, 1.0, 0])) == pytest.approx(0.0)
    assert ent.concurrence(np.diag([0, 0, 1.0, 0])) == 0.0


def test_unit_field_trace_norm():
    ev = {"z": -2 / math.pi, "zz": 16 / (3 * math.pi**2), "pp": -4 / (3 * math.pi**2),
          "pm": -2 / (3 * math.pi**2)}
    rdm = ent.rdm_from_expectations(ev)
    assert ent.trace_norm_pt(rdm) == pytest.approx(0.5 + 16 / (3 * math.pi**2), abs=1e-12)


def test_negativity_onset_and_large_field():
    assert ent.logneg_thermo(0.99) > 0
    for b in (1e6, -1e6):
        assert ent.logneg_thermo(b) <= 1e-5


def test_nearest_neighbour_pair_unentangled():
    for b in (0.0, 0.5, 0.9875, 1.2):
        gs = sp.cluster_ground_state(b, 12)
        assert ent.logneg_finite(b, 12, pair=(1, 2), method="exact", gs=gs) == pytest.approx(0.0, abs=1e-10)


def test_odd_branch_trends_to_limit():
    b = 0.9875
    limit = ent.logneg_thermo(b)
    vals = [ent.logneg_finite(b, n) for n in range(9, 21, 2)]
    gaps = [abs(v - limit) for v in vals]
    assert all(g1 > g2 for g1, g2 in zip(gaps, gaps[1:]))


def test_prescribed_scheme_near_critical_field():
    b = 0.99
    gs = sp.cluster_ground_state(b, 14)
    target = 0.9 * (1 - b * b) ** 0.25
    for L in range(3, 14, 2):
        assert ent.localisable_prescribed(b, 14, L, gs) >= target


def test_prescribed_scheme_levels_off():
    b, n = 0.6, 14
    gs = sp.cluster_ground_state(b, n)
    vals = [ent.localisable_prescribed(b, n, L, gs) for L in range(3, 14, 2)]
    assert abs(vals[-1] - (1 - b * b) ** 0.25) <= 0.05
    # the ring is symmetric under L -> n + 2 - L, so the decrease runs to the half ring
    half = [v for L, v in zip(range(3, 14, 2), vals) if L <= n // 2 + 1]
    assert all(x >= y - 1e-12 for x, y in zip(half, half[1:]))


def test_product_state_has_no_localisable_entanglement():
    up = np.zeros(1 << 5)
    up[0] = 1
    rng = np.random.default_rng(3)
    for _ in range(5):
        sc = ent.MeasurementScheme(rng.uniform(0, 3, (5, 2)), (0, 4))
        assert ent.average_concurrence(up, sc) == pytest.approx(0.0, abs=1e-12)


def test_annealing_beats_grid_and_prescribed_on_seven_sites():
    n = 7
    gs = sp.cluster_ground_state(0.5, n)
    angles = np.zeros((n, 2))
    angles[1] = ent.X_BASIS
    prescribed = ent.MeasurementScheme(angles, (0, n - 1))
    grid = ent.localisable_optimize(gs, (0, n - 1), "grid_bruteforce")
    ann = ent.localisable_optimize(gs, (0, n - 1), budget=3000, restarts=4, init=prescribed)
    assert ann.value >= grid.value - 1e-3
    assert ann.value >= ent.average_concurrence(gs, prescribed) - 1e-12


def test_measurement_outcomes_complete():
    gs = sp.cluster_ground_state(0.7, 8)
    rng = np.random.default_rng(21)
    for _ in range(3):
        sc = ent.MeasurementScheme(rng.uniform(0, 3, (8, 2)), (2, 6))
        p, states = ent.outcome_distribution(gs, sc)
        assert np.sum(p) == pytest.approx(1.0, abs=1e-10)
        for pi, s in zip(p, states):
            if pi > 1e-14:
                assert np.linalg.norm(s) == pytest.approx(1.0, abs=1e-10)


def test_pt_formula_on_ten_thousand_states():
    rng = np.random.default_rng(10_000)
    worst = 0.0
    for _ in range(10_000):
        rdm = _random_rdm(rng)
        a = np.sort(ent.pt_eigenvalues(rdm))
        b = np.linalg.eigvalsh(ent.partial_transpose(rdm.matrix()))
        worst = max(worst, float(np.max(np.abs(a - b))))
        assert ent.trace_norm_pt(rdm) >= 1 - 1e-12
    assert worst <= 1e-12
