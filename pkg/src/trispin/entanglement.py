"""Two-site reduced states, logarithmic negativity, concurrence and localisable entanglement.

Two-qubit basis order is ``|up up>, |up down>, |down up>, |down down>``.
The partial transpose acts on the second qubit.

Concurrence uses the Wootters construction: with ``R = rho (Y x Y) rho* (Y x Y)``
and ``mu_1 >= ... >= mu_4`` the eigenvalues of ``R``
(computed as squared singular values of ``sqrt(rho) (Y x Y) sqrt(rho)*``),
``C = max(0, sqrt(mu_1) - sqrt(mu_2) - sqrt(mu_3) - sqrt(mu_4))``.
For a pure unnormalised pair amplitude ``p`` this reduces to
``2 |p00 p11 - p01 p10| / |p|^2``.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .correlations import (
    bridge_expectations,
    correlation_length,
    expectations,
    two_point,
)
from .errors import DimensionLimit, InsufficientData, NotPSD, SiteOutOfRange
from .spectra import SEED, cluster_ground_state

PSD_TOL = 1e-10
CLAMP_TOL = 1e-12


# --- reduced states ------------------------------------------------------------

@dataclass(frozen=True)
class TwoSiteRDM:
    rho1: float
    rho2: float
    rho3: float
    rho_plus: float
    rho_minus: float
    source: str = "analytic_integrals"

    def matrix(self):
        m = np.diag([self.rho1, self.rho2, self.rho2, self.rho3]).astype(float)
        m[0, 3] = m[3, 0] = self.rho_plus
        m[1, 2] = m[2, 1] = self.rho_minus
        return m

    @property
    def trace(self):
        return self.rho1 + 2 * self.rho2 + self.rho3

    def check(self, tol=PSD_TOL):
        if abs(self.trace - 1) > tol:
            raise NotPSD(f"trace {self.trace!r} differs from 1", eigenvalue=math.nan)
        ev = np.linalg.eigvalsh(self.matrix())
        if ev[0] < -tol:
            raise NotPSD(f"negative eigenvalue {ev[0]:.3g}", eigenvalue=float(ev[0]))
        return self


def rdm_from_expectations(ev, source="analytic_integrals") -> TwoSiteRDM:
    """Symmetric two-site state from ``z``, ``zz``, ``pp`` (``<s+ s+>``) and ``pm`` (``<s+ s->``)."""
    z, zz = float(ev["z"]), float(ev["zz"])
    rdm = TwoSiteRDM(
        (1 + 2 * z + zz) / 4,
        (1 - zz) / 4,
        (1 - 2 * z + zz) / 4,
        float(ev["pp"]),
        float(ev["pm"]),
        source,
    )
    return rdm.check()


def reduced_density_matrix(gs, sites):
    """Reduced density matrix of ``sites`` (in the given order) from a pure state."""
    gs = np.asarray(gs, dtype=complex)
    n = len(gs).bit_length() - 1
    sites = list(sites)
    for s in sites:
        if not 0 <= s < n:
            raise SiteOutOfRange(f"site {s} outside [0, {n})")
    rest = [s for s in range(n) if s not in sites]
    t = np.transpose(gs.reshape((2,) * n), sites + rest).reshape(1 << len(sites), -1)
    return t @ t.conj().T


def pair_expectations(gs, a, b):
    """``z`` (site ``a``), ``zz``, ``pp`` and ``pm`` for sites ``a``, ``b`` of a state."""
    strings = [((a, "Z"),), ((a, "Z"), (b, "Z")), ((a, "X"), (b, "X")), ((a, "Y"), (b, "Y")),
               ((a, "X"), (b, "Y")), ((a, "Y"), (b, "X"))]
    z, zz, xx, yy, xy, yx = expectations(gs, strings).real
    # s+ = (X + iY)/2, s- = (X - iY)/2
    pp = (xx - yy + 1j * (xy + yx)) / 4
    pm = (xx + yy - 1j * (xy - yx)) / 4
    return {"z": z, "zz": zz, "pp": pp.real, "pm": pm.real, "pp_imag": pp.imag, "pm_imag": pm.imag}


def two_site_rdm(gs, a, b) -> TwoSiteRDM:
    """Symmetry-reduced two-site state from measured expectation values."""
    return rdm_from_expectations(pair_expectations(gs, a, b), source="traced_from_state")


# --- negativity -----------------------------------------------------------------

def pt_eigenvalues(rdm: TwoSiteRDM):
    s = rdm.rho1 + rdm.rho3
    disc = math.sqrt(max(s * s - 4 * (rdm.rho1 * rdm.rho3 - rdm.rho_minus**2), 0.0))
    return np.array([(s + disc) / 2, (s - disc) / 2, rdm.rho2 + rdm.rho_plus, rdm.rho2 - rdm.rho_plus])


def trace_norm_pt(rdm: TwoSiteRDM) -> float:
    return float(np.sum(np.abs(pt_eigenvalues(rdm))))


def _clamped_log2(total):
    return 0.0 if total <= 1 + CLAMP_TOL else math.log2(total)


def log_negativity(rdm: TwoSiteRDM) -> float:
    """``log2 sum |lambda_i|`` over the partial-transpose eigenvalues, clamped at 0."""
    return _clamped_log2(trace_norm_pt(rdm))


def partial_transpose(rho):
    r = np.asarray(rho).reshape(2, 2, 2, 2)
    return r.transpose(0, 3, 2, 1).reshape(4, 4)


def log_negativity_matrix(rho) -> float:
    """Negativity of an arbitrary two-qubit density matrix via explicit partial transpose."""
    ev = np.linalg.eigvalsh(partial_transpose(rho))
    return _clamped_log2(float(np.sum(np.abs(ev))))


def logneg_thermo(b: float) -> float:
    """Bridge-pair negativity of the infinite cluster chain."""
    return log_negativity(rdm_from_expectations(bridge_expectations(b)))


def finite_branch(n: int) -> str:
    if n % 2:
        return "odd"
    return "even_a" if (n + 2) % 4 == 0 else "even_b"


def logneg_finite(b: float, n: int, pair=(1, 3), method="sums", sector="ns", gs=None) -> float:
    """Bridge-pair negativity on a ring of ``n`` sites.

    ``method="sums"`` replaces the integrals by the ring momentum sums on
    the given ``sector`` grid (antiperiodic by default; valid for the
    bridge pair only). ``method="exact"`` traces the exact ground state
    (``n <= 20``) and takes the explicit partial transpose. ``pair`` is
    1-based.
    """
    a, c = pair[0] - 1, pair[1] - 1
    if method == "sums":
        if (c - a) % n != 2:
            raise ValueError("momentum sums cover the bridge pair only; use method='exact'")
        return log_negativity(rdm_from_expectations(bridge_expectations(b, n, sector), "ring_sums"))
    if method != "exact":
        raise ValueError(f"unknown method {method!r}")
    if gs is None:
        if n > 20:
            raise DimensionLimit("exact ground states limited to n <= 20")
        gs = cluster_ground_state(b, n)
    return log_negativity_matrix(reduced_density_matrix(gs, [a, c]))


# --- concurrence -----------------------------------------------------------------

_YY = np.kron(np.array([[0, -1j], [1j, 0]]), np.array([[0, -1j], [1j, 0]]))


def concurrence(rho, tol=PSD_TOL) -> float:
    rho = np.asarray(rho, dtype=complex)
    ev = np.linalg.eigvalsh((rho + rho.conj().T) / 2)
    if ev[0] < -tol:
        raise NotPSD(f"negative eigenvalue {ev[0]:.3g}", eigenvalue=float(ev[0]))
    # sqrt(mu_i) are the singular values of sqrt(rho) (Y x Y) sqrt(rho)*; this
    # avoids square roots of round-off sized eigenvalues for rank-deficient rho
    w, v = np.linalg.eigh((rho + rho.conj().T) / 2)
    root = (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T
    s = np.linalg.svd(root @ _YY @ root.conj(), compute_uv=False)
    return float(max(0.0, s[0] - s[1] - s[2] - s[3]))


def werner_state(p):
    bell = np.array([0, 1, -1, 0]) / math.sqrt(2)
    return p * np.outer(bell, bell) + (1 - p) * np.eye(4) / 4


# --- measurement schemes ----------------------------------------------------------

def basis_matrix(theta, phi):
    """Rows are ``<m+|``, ``<m-|`` for the basis with Bloch angles ``(theta, phi)``."""
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    e = complex(math.cos(phi), math.sin(phi))
    plus = np.array([c, e * s])
    minus = np.array([s, -e * c])
    return np.array([plus.conj(), minus.conj()])


X_BASIS = (math.pi / 2, 0.0)
Y_BASIS = (math.pi / 2, math.pi / 2)
Z_BASIS = (0.0, 0.0)


@dataclass
class MeasurementScheme:
    """Per-site measurement angles ``(theta, phi)``; target sites are left unmeasured."""

    angles: np.ndarray
    targets: tuple

    def __post_init__(self):
        self.angles = np.array(self.angles, dtype=float).reshape(-1, 2)
        a, b = (int(t) for t in self.targets)
        if a == b:
            raise ValueError("targets must be two distinct sites")
        n = len(self.angles)
        if not (0 <= a < n and 0 <= b < n):
            raise SiteOutOfRange("target outside chain")
        if not np.all(np.isfinite(self.angles)):
            raise ValueError("angles must be finite")
        self.targets = (a, b)

    @property
    def n_sites(self):
        return len(self.angles)

    @property
    def measured(self):
        return [s for s in range(self.n_sites) if s not in self.targets]

    def copy(self):
        return MeasurementScheme(self.angles.copy(), self.targets)

    def labels(self):
        """Named bases where the angles match X, Y or Z; ``T`` marks targets."""
        out = []
        for s in range(self.n_sites):
            if s in self.targets:
                out.append("T")
                continue
            th, ph = self.angles[s]
            name = "?"
            for lab, (t0, p0) in (("X", X_BASIS), ("Y", Y_BASIS), ("Z", Z_BASIS)):
                if abs(math.cos(th) - math.cos(t0)) < 1e-9 and (
                    abs(math.sin(th)) < 1e-9 or abs(np.exp(1j * ph) - np.exp(1j * p0)) < 1e-9
                ):
                    name = lab
            out.append(name)
        return "".join(out)


def prescribed_scheme(n: int, L: int) -> MeasurementScheme:
    """``sigma_x`` on site 1 (0-based), ``sigma_z`` elsewhere; targets ``0`` and ``L - 1``."""
    if L % 2 == 0 or L < 3 or L > n - 1:
        raise ValueError(f"L must be odd with 3 <= L <= n - 1, got L={L}, n={n}")
    angles = np.zeros((n, 2))
    angles[1] = X_BASIS
    return MeasurementScheme(angles, (0, L - 1))


def rotate_into_scheme(gs, scheme: MeasurementScheme):
    psi = np.array(gs, dtype=np.complex128)
    n = scheme.n_sites
    for s in scheme.measured:
        kernels.rotate_site(psi, n, s, basis_matrix(*scheme.angles[s]))
    return psi


def average_concurrence(gs, scheme: MeasurementScheme) -> float:
    """Outcome-averaged concurrence of the target pair (exact enumeration of outcomes)."""
    psi = rotate_into_scheme(gs, scheme)
    a, b = scheme.targets
    return kernels.pair_concurrence_sum(psi, scheme.n_sites, a, b) / float(np.vdot(psi, psi).real)


def outcome_distribution(gs, scheme: MeasurementScheme):
    """Outcome probabilities and normalised post-measurement pair states (small ``n``)."""
    psi = rotate_into_scheme(gs, scheme)
    n = scheme.n_sites
    a, b = scheme.targets
    rest = scheme.measured
    t = np.transpose(psi.reshape((2,) * n), rest + [a, b]).reshape(-1, 4)
    p = np.sum(np.abs(t) ** 2, axis=1)
    states = np.divide(t, np.sqrt(p)[:, None], out=np.zeros_like(t), where=p[:, None] > 0)
    return p, states


def localisable_prescribed(b: float, n: int, L: int, gs=None) -> float:
    if gs is None:
        gs = cluster_ground_state(b, n)
    return average_concurrence(gs, prescribed_scheme(n, L))


def e_infinity(b):
    return (1 - b * b) ** 0.25 if abs(b) < 1 else 0.0


# --- optimisation -------------------------------------------------------------------

@dataclass
class OptimizeResult:
    value: float
    scheme: MeasurementScheme
    method: str
    proposed: int = 0
    accepted: int = 0
    restart_values: list = field(default_factory=list)
    budget_exhausted: bool = False

    @property
    def acceptance_rate(self):
        return self.accepted / self.proposed if self.proposed else 0.0


GRID_POINTS = 24


def _pauli_seed(gs, targets, n):
    """Best product of X/Y/Z bases (exhaustive; small ``n``)."""
    import itertools

    measured = [s for s in range(n) if s not in targets]
    best = (-1.0, None)
    for combo in itertools.product((X_BASIS, Y_BASIS, Z_BASIS), repeat=len(measured)):
        angles = np.zeros((n, 2))
        for s, ang in zip(measured, combo):
            angles[s] = ang
        sc = MeasurementScheme(angles, targets)
        v = average_concurrence(gs, sc)
        if v > best[0] + 1e-12:
            best = (v, sc)
    return best


def _grid_bruteforce(gs, targets, n, points=GRID_POINTS):
    value, scheme = _pauli_seed(gs, targets, n)
    thetas = np.linspace(0, math.pi, points)
    phis = np.linspace(0, 2 * math.pi, points, endpoint=False)
    grid = [(t, p) for t in thetas for p in phis]
    improved = True
    sweeps = 0
    while improved:
        improved = False
        sweeps += 1
        for s in scheme.measured:
            # rotate all other sites once, then scan site s
            others = scheme.copy()
            base = np.array(gs, dtype=np.complex128)
            for o in others.measured:
                if o != s:
                    kernels.rotate_site(base, n, o, basis_matrix(*others.angles[o]))
            best_local = (value, tuple(scheme.angles[s]))
            for ang in grid:
                psi = base.copy()
                kernels.rotate_site(psi, n, s, basis_matrix(*ang))
                v = kernels.pair_concurrence_sum(psi, n, *targets)
                if v > best_local[0] + 1e-12:
                    best_local = (v, ang)
            if best_local[0] > value + 1e-12:
                value = best_local[0]
                scheme.angles[s] = best_local[1]
                improved = True
    return OptimizeResult(value, scheme, "grid_bruteforce", proposed=sweeps)


def _anneal_once(gs, targets, n, steps, rng, init_angles, t0=0.5, decay=0.995, sigma=0.3):
    angles = init_angles.copy()
    measured = [s for s in range(n) if s not in targets]
    mats = {s: basis_matrix(*angles[s]) for s in measured}
    psi = np.array(gs, dtype=np.complex128)
    for s in measured:
        kernels.rotate_site(psi, n, s, mats[s])
    cur = kernels.pair_concurrence_sum(psi, n, *targets)
    best, best_angles = cur, angles.copy()
    accepted = 0
    last_improvement = 0
    temp = t0
    for k in range(steps):
        s = measured[int(rng.integers(len(measured)))]
        new = angles[s] + rng.normal(0.0, sigma, size=2)
        m_new = basis_matrix(*new)
        step = m_new @ mats[s].conj().T
        kernels.rotate_site(psi, n, s, step)
        val = kernels.pair_concurrence_sum(psi, n, *targets)
        delta = val - cur
        if delta >= 0 or rng.random() < math.exp(delta / temp):
            angles[s] = new
            mats[s] = m_new
            cur = val
            accepted += 1
            if cur > best + 1e-12:
                best, best_angles = cur, angles.copy()
                last_improvement = k
        else:
            kernels.rotate_site(psi, n, s, step.conj().T)
        temp *= decay
        if temp < 1e-300:
            temp = 1e-300
    best_angles[:, 0] = np.mod(best_angles[:, 0], 2 * math.pi)
    best_angles[:, 1] = np.mod(best_angles[:, 1], 2 * math.pi)
    return best, best_angles, accepted, last_improvement


def localisable_optimize(gs, pair, method="annealing", budget=200_000, seed=SEED,
                         restarts=8, init=None, threads=1) -> OptimizeResult:
    """Maximise the average pair concurrence over local projective measurements.

    ``pair`` holds 0-based target sites. ``grid_bruteforce`` (``n <= 7``)
    seeds with the best Pauli-basis product and then refines one site at a
    time on a ``24 x 24`` angle grid until no site improves. ``annealing``
    runs ``restarts`` independent chains of ``budget`` steps each, with
    ``T_k = 0.5 * 0.995^k`` and Gaussian angle proposals (0.3 rad) on one
    random site; chain 0 starts from ``init`` when given. Both results are
    lower bounds on the localisable entanglement.
    """
    gs = np.ascontiguousarray(gs, dtype=np.complex128)
    n = len(gs).bit_length() - 1
    targets = (int(pair[0]), int(pair[1]))
    if method == "grid_bruteforce":
        if n > 7:
            raise DimensionLimit("grid search limited to n <= 7")
        return _grid_bruteforce(gs, targets, n)
    if method != "annealing":
        raise ValueError(f"unknown method {method!r}")
    if n > 16:
        raise DimensionLimit("annealing limited to n <= 16")
    children = np.random.SeedSequence(seed).spawn(restarts)

    def run(i):
        rng = np.random.default_rng(children[i])
        if i == 0 and init is not None:
            start = np.array(init.angles, dtype=float)
        else:
            start = np.column_stack([rng.uniform(0, math.pi, n), rng.uniform(0, 2 * math.pi, n)])
        return _anneal_once(gs, targets, n, budget, rng, start)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            runs = list(ex.map(run, range(restarts)))
    else:
        runs = [run(i) for i in range(restarts)]
    vals = [r[0] for r in runs]
    k = int(np.argmax(vals))
    best, angles, _, last = runs[k]
    scheme = MeasurementScheme(angles, targets)
    value = average_concurrence(gs, scheme)
    return OptimizeResult(
        value, scheme, "annealing",
        proposed=budget * restarts,
        accepted=sum(r[2] for r in runs),
        restart_values=vals,
        budget_exhausted=bool(budget and last >= 0.9 * budget),
    )


# --- length sweep ---------------------------------------------------------------------

ENTLENGTH_HEADER = ("B", "xi_corr", "xi_ent", "infinite_flag")


def fit_lengths(n):
    """Odd ``L`` with ``3 <= L <= n/2 + 1`` (separations up to half the ring)."""
    return [L for L in range(3, n // 2 + 2) if L % 2 == 1]


@dataclass
class LengthRow:
    b: float
    xi_corr: float
    xi_ent: float
    infinite_flag: bool
    corr_values: dict
    ent_values: dict
    corr_fit: object = None
    ent_fit: object = None

    def csv_row(self):
        return (self.b, self.xi_corr, self.xi_ent, int(self.infinite_flag))


def entanglement_length_point(b, n=16, method="auto", budget=2000, restarts=4, seed=SEED,
                              lengths=None):
    """Correlation and entanglement lengths from one ground state.

    ``method="auto"`` uses the prescribed scheme for ``|B| < 1`` and
    annealing seeded with it otherwise; ``"annealing"`` always anneals
    (seeded with the prescribed scheme, so the values never drop below it).
    """
    lengths = fit_lengths(n) if lengths is None else list(lengths)
    gs = cluster_ground_state(b, n)
    corr = {L: two_point(gs, 0, L - 1, "z", "z", connected=True) for L in lengths}
    ent = {}
    for L in lengths:
        sc = prescribed_scheme(n, L)
        if method == "prescribed" or (method == "auto" and abs(b) < 1):
            ent[L] = average_concurrence(gs, sc)
        else:
            ent[L] = localisable_optimize(gs, sc.targets, "annealing", budget, seed, restarts, init=sc).value
    try:
        cfit = correlation_length(corr, "correlation")
        xi_c = cfit.xi
    except InsufficientData:  # all correlators vanish (e.g. B = 0)
        cfit, xi_c = None, 0.0
    efit = correlation_length(ent, "entanglement")
    return LengthRow(float(b), xi_c, efit.xi, efit.infinite, corr, ent, cfit, efit)
