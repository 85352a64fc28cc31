import math

import numpy as np
import pytest

from trispin import hamiltonian as ham
from trispin import spectra as sp
from trispin.errors import DimensionLimit, GridEmpty
from trispin.hamiltonian import Boundary, ChainModel, HamiltonianSpec


def test_cluster_gap_small():
    for n in (6, 8):
        r = sp.diagonalize(ham.chain_hamiltonian(ChainModel.CLUSTER, {"B": 0}, n))
        assert r.e0 == pytest.approx(-n, abs=1e-10)
        assert r.gap == pytest.approx(2, abs=1e-10)
        assert r.degeneracy == 1


def test_dense_and_iterative_agree():
    h = ham.chain_hamiltonian(ChainModel.ISING3SPIN, {"lambda1": 1, "lambda3": 0.4, "bx": 0.7}, 10)
    d = sp.diagonalize(h, k=4, method="dense")
    i = sp.diagonalize(h, k=4, method="iterative")
    assert np.allclose(d.eigenvalues[:4], i.eigenvalues[:4], atol=1e-9)
    assert abs(np.vdot(d.ground_state, i.ground_state)) == pytest.approx(1, abs=1e-8)
    assert i.residual <= sp.RESIDUAL_TOL


def test_complex_hamiltonian_iterative():
    h = ham.chiral_hamiltonian(0.5, [(0, 1, 2), (1, 2, 3), (2, 3, 4), (3, 4, 5)], 6)
    d = sp.diagonalize(h, method="dense")
    i = sp.diagonalize(h, k=4, method="iterative")
    assert i.e0 == pytest.approx(d.e0, abs=1e-9)


def test_degenerate_levels_expand_k():
    r = sp.diagonalize(HamiltonianSpec(3, "open", ()), k=2, method="iterative")
    assert r.degeneracy >= 2
    r = sp.diagonalize(HamiltonianSpec(3, "open", ()), method="dense")
    assert r.degeneracy == 8 and math.isnan(r.gap)


def test_limits():
    with pytest.raises(DimensionLimit):
        sp.diagonalize(HamiltonianSpec(21, "open", ()), method="iterative")
    with pytest.raises(DimensionLimit):
        sp.diagonalize(HamiltonianSpec(15, "open", ()), method="dense")
    with pytest.raises(ValueError):
        sp.diagonalize(HamiltonianSpec(3, "open", ()), method="magic")


def test_variational_bound(rng):
    h = ham.chain_hamiltonian(ChainModel.ISING3SPIN, {"lambda1": 1, "lambda3": 1, "bx": 0.5}, 8)
    e0 = sp.diagonalize(h).e0
    for _ in range(5):
        v = rng.standard_normal(256)
        assert sp.variational_energy(h, v) >= e0 - 1e-12


def test_classical_energies_match_configurations():
    n = 12
    for l1, l3 in [(1, 0.3), (0.2, 1), (-1, 0.5), (1, -1), (-0.3, -0.9)]:
        h = ham.chain_hamiltonian(ChainModel.ISING3SPIN, {"lambda1": l1, "lambda3": l3}, n)
        diag = np.real(np.diag(ham.to_sparse(h).toarray()))
        e = sp.classical_energies(l1, l3)
        for name in ("neel", "period3", "ferro"):
            for conf in sp.classical_configurations(name, n, l3):
                idx = int("".join("0" if up else "1" for up in conf), 2)
                assert diag[idx] / n == pytest.approx(e[name]), (name, l1, l3)


def test_classifier_labels():
    C = sp.classify_classical_phase
    assert C(1, 0).label is sp.Phase.NEEL_PERIOD2
    assert C(0.1, 1).label is sp.Phase.PERIOD3_FAMILY
    assert C(-1, 0.5).label is sp.Phase.FERROMAGNETIC
    assert C(1.5, 1).label is sp.Phase.BOUNDARY_FIRSTORDER
    assert C(0, 1).label is sp.Phase.PERIOD3_FAMILY
    assert C(0, 0).label is sp.Phase.UNCLASSIFIED


def test_order_parameters_across_transition():
    rows = sp.order_parameter_sweep(1.0, 0.0, [0.0, 0.5, 50.0], 10)
    sf_pi = [r[3] for r in rows]
    assert sf_pi[0] == pytest.approx(1.0, abs=1e-9)
    assert sf_pi[0] > sf_pi[1] > sf_pi[2]
    assert rows[2][5] == pytest.approx(-1, abs=1e-3)
    with pytest.raises(GridEmpty):
        sp.order_parameter_sweep(1, 0, [], 8)


def test_period3_structure_factor():
    row, r = sp.order_parameter_point(0.0, 1.0, 0.0, 12)
    assert r.degeneracy == 4
    assert row[4] > 0.3 and row[3] < row[4]


def test_cluster_ground_state_phase_fixed():
    gs = sp.cluster_ground_state(0.3, 8)
    i = int(np.argmax(np.abs(gs)))
    assert gs[i].imag == 0 and gs[i].real > 0
    assert np.linalg.norm(gs) == pytest.approx(1)


def test_open_boundary_ground_state():
    h = ham.chain_hamiltonian(ChainModel.CLUSTER, {"B": 0}, 8, Boundary.OPEN)
    r = sp.diagonalize(h)
    assert r.e0 == pytest.approx(-6) and r.degeneracy == 4


def test_chiral_triangle_ground_doublet():
    r = sp.diagonalize(ham.chiral_hamiltonian(1.0, [(0, 1, 2)], 3), method="dense")
    assert r.e0 == pytest.approx(-2 * math.sqrt(3))
    assert r.degeneracy == 2


def test_zero_hamiltonian_fully_degenerate():
    r = sp.diagonalize(HamiltonianSpec(4, "periodic", ()), method="dense")
    assert np.allclose(r.eigenvalues, 0) and r.degeneracy == 16


def test_classifier_boundary_and_period3_energies():
    lab = sp.classify_classical_phase(0, -1)
    assert lab.label is sp.Phase.PERIOD3_FAMILY and lab.energy_per_site == pytest.approx(-1)
    assert sp.classify_classical_phase(1, 0).energy_per_site == pytest.approx(-1)
    assert sp.classify_classical_phase(3, 2).label is sp.Phase.BOUNDARY_FIRSTORDER


def test_neel_structure_factor_falls_with_field():
    grid = np.linspace(0.0, 1.0, 6)
    rows = sp.order_parameter_sweep(1.0, 0.0, grid, 12)
    sf = [r[3] for r in rows]
    assert sf[0] == max(sf)
    assert all(a > b for a, b in zip(sf, sf[1:]))


@pytest.mark.parametrize("n", [6, 9, 12])
def test_three_spin_ground_manifold_degenerate(n):
    _, r = sp.order_parameter_point(0.0, 1.0, 0.0, n)
    assert r.degeneracy >= 2


def test_strong_field_polarises_against_x():
    row, _ = sp.order_parameter_point(1.0, 1.0, 50.0, 9)
    assert row[5] <= -0.999


@pytest.mark.parametrize("n", [8, 10, 12])
def test_cluster_gap_away_from_critical_field(n):
    for b in (0.0, 0.3, -0.5, 0.7, 1.4, -2.0):
        r = sp.diagonalize(ham.chain_hamiltonian(ChainModel.CLUSTER, {"B": b}, n))
        assert r.gap >= 0.05, (n, b)


def test_ground_state_energy_is_variational_minimum():
    for model, params in ((ChainModel.CLUSTER, {"B": 0.4}),
                          (ChainModel.ISING3SPIN, {"lambda1": 0.5, "lambda3": 1, "bx": 0.8})):
        for n in (9, 12):
            h = ham.chain_hamiltonian(model, params, n)
            r = sp.diagonalize(h)
            assert sp.variational_energy(h, r.ground_state) == pytest.approx(r.e0, abs=1e-9)
