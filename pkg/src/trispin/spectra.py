"""Ground states, gaps and the classical phase classifier of the Ising/three-spin chain."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import scipy.sparse.linalg as spla

from . import kernels
from .errors import ConvergenceFailure, DimensionLimit, GridEmpty
from .hamiltonian import (
    MAX_APPLY_SITES,
    MAX_DENSE_SITES,
    Boundary,
    ChainModel,
    HamiltonianSpec,
    apply,
    chain_hamiltonian,
    to_sparse,
)

SEED = 0x5EED
DENSE_CUTOFF = 10  # dense eigh up to this many sites when method="auto"
MAX_ITERATIVE_SITES = 20
RESIDUAL_TOL = 1e-9


@dataclass
class SpectrumResult:
    eigenvalues: np.ndarray
    ground_state: np.ndarray
    gap: float
    degeneracy: int
    states: np.ndarray = field(repr=False, default=None)
    residual: float = 0.0
    method: str = "dense"

    @property
    def e0(self):
        return float(self.eigenvalues[0])


def _degeneracy(evals):
    e0 = evals[0]
    tol = 1e-8 * max(1.0, abs(e0))
    return int(np.sum(evals - e0 <= tol))


def _result(evals, vecs, method, residual=0.0):
    order = np.argsort(evals)
    evals = np.asarray(evals)[order]
    vecs = vecs[:, order]
    d = _degeneracy(evals)
    gap = float(evals[d] - evals[0]) if d < len(evals) else math.nan
    gs = vecs[:, 0] / np.linalg.norm(vecs[:, 0])
    return SpectrumResult(evals, gs, gap, d, vecs, residual, method)


def _linear_operator(h: HamiltonianSpec):
    compiled = h.compiled()
    dim = 1 << h.n_sites
    dtype = np.float64 if np.all(compiled[2].imag == 0) else np.complex128

    def mv(v):
        v = np.ascontiguousarray(np.ravel(v), dtype=dtype)
        out = np.zeros(dim, dtype=dtype)
        return kernels.apply_pauli_sum(compiled[0], compiled[1], compiled[2], v, out)

    return spla.LinearOperator((dim, dim), matvec=mv, dtype=dtype)


def diagonalize(h: HamiltonianSpec, k: int = 6, method: str = "auto", tol: float = 1e-12,
                seed: int = SEED) -> SpectrumResult:
    """Lowest ``k`` eigenpairs (all of them for the dense path).

    ``method`` is ``"dense"`` (``n <= 14``), ``"iterative"`` (``n <= 20``,
    implicitly restarted Lanczos on the matrix-free operator, seeded start
    vector) or ``"auto"`` (dense up to 10 sites). If the lowest ``k`` levels
    are all degenerate ``k`` is doubled until a gap is visible.
    """
    n = h.n_sites
    dim = 1 << n
    if method == "auto":
        method = "dense" if n <= DENSE_CUTOFF else "iterative"
    if method == "dense":
        if n > MAX_DENSE_SITES:
            raise DimensionLimit(f"dense diagonalization limited to n <= {MAX_DENSE_SITES}")
        m = to_sparse(h).toarray()
        evals, vecs = np.linalg.eigh(m)
        return _result(evals, vecs, "dense")
    if method != "iterative":
        raise ValueError(f"unknown method {method!r}")
    if n > MAX_ITERATIVE_SITES:
        raise DimensionLimit(f"iterative diagonalization limited to n <= {MAX_ITERATIVE_SITES}")
    if not h.canonical(tol=0.0).terms:
        return _result(np.zeros(min(k, dim)), np.eye(dim, min(k, dim)), "iterative")
    op = _linear_operator(h)
    rng = np.random.default_rng(seed)
    v0 = rng.standard_normal(dim)
    if op.dtype == np.complex128:
        v0 = v0 + 1j * rng.standard_normal(dim)
    kk = min(k, dim - 2)
    while True:
        try:
            evals, vecs = spla.eigsh(op, k=kk, which="SA", v0=v0, tol=tol,
                                     ncv=min(dim - 1, max(2 * kk + 1, 20)), maxiter=dim * 10)
        except spla.ArpackNoConvergence as exc:
            raise ConvergenceFailure(f"Lanczos did not converge: {exc}", residual=math.inf) from None
        res = max(np.linalg.norm(op @ vecs[:, i] - evals[i] * vecs[:, i]) for i in range(kk))
        if res > RESIDUAL_TOL:
            raise ConvergenceFailure(f"residual {res:.3g} above {RESIDUAL_TOL}", residual=res)
        out = _result(evals, vecs, "iterative", res)
        if out.degeneracy < kk or kk >= min(64, dim - 2):
            return out
        kk = min(2 * kk, dim - 2)


def ground_state(h: HamiltonianSpec, method="auto"):
    r = diagonalize(h, k=2, method=method)
    return r.ground_state


def cluster_ground_state(b, n, boundary=Boundary.PERIODIC, method="auto"):
    """Ground state of ``sum X Z X + b Z`` on ``n`` sites (real vector)."""
    h = chain_hamiltonian(ChainModel.CLUSTER, {"B": b}, n, boundary)
    r = diagonalize(h, k=2, method=method)
    gs = r.ground_state
    # fix the overall phase so the largest component is real positive
    i = int(np.argmax(np.abs(gs)))
    gs = gs * (abs(gs[i]) / gs[i])
    return gs


# --- classical phases -----------------------------------------------------

class Phase(str, Enum):
    FERROMAGNETIC = "ferromagnetic"
    NEEL_PERIOD2 = "neel_period2"
    PERIOD3_FAMILY = "period3_family"
    BOUNDARY_FIRSTORDER = "boundary_firstorder"
    POLARIZED_X = "polarized_x"
    UNCLASSIFIED = "unclassified"


@dataclass(frozen=True)
class PhaseLabel:
    label: Phase
    order_parameters: dict

    @property
    def energy_per_site(self):
        return self.order_parameters["energy_per_site"]


def classical_energies(lambda1, lambda3):
    """Per-site energies of the three candidate classical orders."""
    return {
        "neel": -lambda1,
        "period3": -lambda1 / 3 - abs(lambda3),
        "ferro": lambda1 - abs(lambda3),
    }


def classify_classical_phase(lambda1: float, lambda3: float, tol=1e-12) -> PhaseLabel:
    """Classical ground-state order of ``lambda1 ZZ + lambda3 ZZZ`` (no transverse field).

    Ties between the ferromagnet and the period-3 states (``lambda1 = 0``)
    are labelled ``period3_family``, which includes the ferromagnetic member.
    """
    e = classical_energies(lambda1, lambda3)
    scale = max(1.0, abs(lambda1), abs(lambda3))
    params = {f"energy_{k}": v for k, v in e.items()}
    emin = min(e.values())
    params["energy_per_site"] = emin
    if lambda1 == 0 and lambda3 == 0:
        return PhaseLabel(Phase.UNCLASSIFIED, params)
    if lambda1 > 0 and abs(2 * lambda1 - 3 * abs(lambda3)) <= tol * scale:
        return PhaseLabel(Phase.BOUNDARY_FIRSTORDER, params)
    close = [k for k, v in e.items() if v - emin <= tol * scale]
    if "period3" in close:
        label = Phase.PERIOD3_FAMILY
    elif "neel" in close:
        label = Phase.NEEL_PERIOD2
    else:
        label = Phase.FERROMAGNETIC
    return PhaseLabel(label, params)


def classical_configurations(name, n, lambda3=1.0):
    """Representative basis configurations (Z = +1 is ``True``) of a classical order."""
    if name == "neel":
        return [np.array([s % 2 == 0 for s in range(n)]), np.array([s % 2 == 1 for s in range(n)])]
    sign = lambda3 <= 0  # lambda3 < 0 prefers Z Z Z = +1
    if name == "ferro":
        return [np.full(n, sign)]
    if name == "period3":
        return [np.array([(s - k) % 3 == 0 for s in range(n)]) ^ (not sign) for k in range(3)]
    raise ValueError(name)


# --- sweeps ----------------------------------------------------------------

def _zz_profile(n, gs):
    """``(1/n) sum_i <Z_i Z_{i+r}>`` for ``r = 0..n-1`` (periodic)."""
    xs = np.zeros(n, dtype=np.uint64)
    gs = np.ascontiguousarray(gs, dtype=np.complex128)
    acc = np.zeros(n)
    for i in range(n):
        zi = np.array(
            [(1 << (n - 1 - i)) ^ (1 << (n - 1 - (i + r) % n)) for r in range(n)], dtype=np.uint64
        )
        acc += kernels.pauli_expectations(xs, zi, gs).real
    return acc / n


def structure_factors(gs, n):
    prof = _zz_profile(n, gs)
    r = np.arange(n)
    sf_pi = float(np.real(np.sum(np.exp(1j * np.pi * r) * prof)) / n)
    sf_2pi3 = float(np.real(np.sum(np.exp(2j * np.pi / 3 * r) * prof)) / n)
    return sf_pi, sf_2pi3


def magnetization_x(gs, n):
    xs = np.array([1 << (n - 1 - s) for s in range(n)], dtype=np.uint64)
    zs = np.zeros(n, dtype=np.uint64)
    vals = kernels.pauli_expectations(xs, zs, np.ascontiguousarray(gs, dtype=np.complex128))
    return float(np.mean(vals.real))


SWEEP_HEADER = ("bx", "e0", "gap", "sf_pi", "sf_2pi3", "mx")


def order_parameter_point(lambda1, lambda3, bx, n, method="auto"):
    h = chain_hamiltonian(ChainModel.ISING3SPIN, {"lambda1": lambda1, "lambda3": lambda3, "bx": bx}, n)
    r = diagonalize(h, k=6, method=method)
    sf_pi, sf_2pi3 = structure_factors(r.ground_state, n)
    return (float(bx), r.e0, r.gap, sf_pi, sf_2pi3, magnetization_x(r.ground_state, n)), r


def order_parameter_sweep(lambda1, lambda3, bx_grid, n, method="auto", mapper=map):
    """Rows ``(bx, e0, gap, sf_pi, sf_2pi3, mx)`` on a periodic chain.

    Structure factors are ``S(q) = (1/n) sum_r e^{iqr} <Z_i Z_{i+r}>`` with
    the correlator averaged over ``i``, so a ground state that breaks
    translation symmetry gives the same values as any of its translates.
    """
    grid = list(bx_grid)
    if not grid:
        raise GridEmpty("empty Bx grid")
    if n > MAX_DENSE_SITES and method == "dense":
        raise DimensionLimit("dense sweep limited to n <= 14")
    if n > MAX_APPLY_SITES:
        raise DimensionLimit("sweep too large")
    return list(mapper(lambda bx: order_parameter_point(lambda1, lambda3, bx, n, method)[0], grid))


def variational_energy(h, v):
    v = np.asarray(v, dtype=complex)
    return float(np.vdot(v, apply(h, v)).real / np.vdot(v, v).real)
