"""Correlators, correlation lengths, block entropy and the cluster-chain integrals.

``psi_chi_integrals`` evaluates the thermodynamic-limit integrals

    psi_ab = 1/(4 pi) int_{-2pi}^{2pi} sin r / w(r) * sin(d r / 2) dr
    chi_ab = 1/(4 pi) int_{-2pi}^{2pi} (B + cos r) / w(r) * cos(d r / 2) dr

with ``w(r) = sqrt(B^2 + 1 + 2 B cos r)`` and ``d = b - a``. On a ring of
``N`` sites the same quantities are momentum sums; ``psi_chi_sums`` gives
them on the antiperiodic (``q = 2 pi (m + 1/2) / N``) or periodic
(``q = 2 pi m / N``) grid with ``r = 2 q``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from . import kernels
from .errors import BadBlock, InsufficientData, QuadratureFailure, SiteOutOfRange
from .hamiltonian import PAULI_LABELS, PauliTerm

QUAD_TOL = 1e-10
INFINITE_SLOPE = 1e-3
CENSUS_THRESHOLD = 1e-8


# --- Pauli expectations ------------------------------------------------------

def _n_sites(gs):
    dim = len(gs)
    n = dim.bit_length() - 1
    if 1 << n != dim:
        raise ValueError(f"state length {dim} is not a power of two")
    return n


def string_masks(ops, n):
    """``(x, z, phase)`` of ``prod P_s`` for ``ops`` = iterable of ``(site, label)``."""
    return PauliTerm(1.0, tuple(ops)).masks(n)


def expectations(gs, strings):
    """``<gs| P |gs>`` for each Pauli string (sequence of ``(site, label)`` tuples)."""
    gs = np.ascontiguousarray(gs, dtype=np.complex128)
    n = _n_sites(gs)
    if not strings:
        return np.zeros(0)
    masks = [string_masks(s, n) for s in strings]
    xs = np.array([m[0] for m in masks], dtype=np.uint64)
    zs = np.array([m[1] for m in masks], dtype=np.uint64)
    ph = np.array([m[2] for m in masks])
    vals = ph * kernels.pauli_expectations(xs, zs, gs)
    return vals


def pauli_expectation(gs, ops):
    return complex(expectations(gs, [tuple(ops)])[0])


def _check_site(s, n):
    if not 0 <= s < n:
        raise SiteOutOfRange(f"site {s} outside [0, {n})")


def two_point(gs, a, b, alpha, beta, connected=False):
    """``<s_a^alpha s_b^beta>`` (minus ``<s_a^alpha><s_b^beta>`` when connected)."""
    n = _n_sites(gs)
    _check_site(a, n)
    _check_site(b, n)
    if a == b:
        raise SiteOutOfRange("two_point needs distinct sites")
    alpha, beta = alpha.upper(), beta.upper()
    vals = expectations(gs, [((a, alpha), (b, beta)), ((a, alpha),), ((b, beta),)]).real
    return float(vals[0] - vals[1] * vals[2]) if connected else float(vals[0])


@dataclass
class CorrelatorTable:
    pairs: list
    values: dict = field(default_factory=dict)
    connected: bool = False

    def get(self, pair, alpha, beta):
        return self.values[(pair, alpha, beta)]


def correlator_table(gs, pairs, connected=False):
    """All nine ``(alpha, beta)`` correlators for each site pair."""
    n = _n_sites(gs)
    strings = []
    for a, b in pairs:
        _check_site(a, n)
        _check_site(b, n)
        for al in PAULI_LABELS:
            for be in PAULI_LABELS:
                strings.append(((a, al), (b, be)))
    singles = [((s, p),) for s in range(n) for p in PAULI_LABELS]
    vals = expectations(gs, strings).real
    one = dict(zip([(s[0][0], s[0][1]) for s in singles], expectations(gs, singles).real))
    table = CorrelatorTable(list(pairs), {}, connected)
    k = 0
    for a, b in pairs:
        for al in PAULI_LABELS:
            for be in PAULI_LABELS:
                v = vals[k]
                if connected:
                    v -= one[(a, al)] * one[(b, be)]
                table.values[((a, b), al.lower(), be.lower())] = float(v)
                k += 1
    return table


# --- integrals and sums -------------------------------------------------------

def _psi_integrand(r, b, d):
    return math.sin(r) * math.sin(d * r / 2) / math.sqrt(max(b * b + 1 + 2 * b * math.cos(r), 0.0))


def _chi_integrand(r, b, d):
    w = math.sqrt(max(b * b + 1 + 2 * b * math.cos(r), 0.0))
    return (b + math.cos(r)) * math.cos(d * r / 2) / w


def _quad(f, b, d):
    # breakpoints at r = +-pi, 0 isolate the square-root zero at |B| = 1
    # the error estimate below is the acceptance test; quad's own roundoff
    # warning at the cusp is redundant with it
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(
            f, -2 * math.pi, 2 * math.pi, args=(b, d), points=(-math.pi, 0.0, math.pi),
            epsabs=1e-13, epsrel=1e-13, limit=400,
        )
    if not err <= QUAD_TOL:
        raise QuadratureFailure(f"quadrature error estimate {err:.3g} above {QUAD_TOL}", error_estimate=err)
    return val / (4 * math.pi)


def psi_chi_integrals(b: float, separation: int):
    """Thermodynamic-limit ``(psi_ab, chi_ab)`` for ``b - a = separation``."""
    b = float(b)
    d = int(separation)
    return _quad(_psi_integrand, b, d), _quad(_chi_integrand, b, d)


def momentum_grid(n_sites, sector="ns"):
    m = np.arange(n_sites)
    shift = 0.5 if sector == "ns" else 0.0 if sector == "periodic" else None
    if shift is None:
        raise ValueError("sector must be 'ns' or 'periodic'")
    return 2 * np.pi * (m + shift) / n_sites


def psi_chi_sums(b: float, separation: int, n_sites: int, sector="ns"):
    """Finite-ring ``(psi_ab, chi_ab)``: the integrals with ``(1/4pi) int dr -> (1/N) sum_q``."""
    q = momentum_grid(n_sites, sector)
    r = 2 * q
    w = np.sqrt(np.maximum(b * b + 1 + 2 * b * np.cos(r), 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        psi_t = np.where(w > 0, np.sin(r) / w, 0.0) * np.sin(separation * r / 2)
        chi_t = np.where(w > 0, (b + np.cos(r)) / w, 0.0) * np.cos(separation * r / 2)
    return float(np.mean(psi_t)), float(np.mean(chi_t))


def czz_analytic(b: float, a: int, c: int) -> float:
    """Connected thermodynamic ``C^zz_ab = psi_ab^2 - chi_ab^2``."""
    psi, chi = psi_chi_integrals(b, c - a)
    return psi * psi - chi * chi


def bridge_expectations(b: float, n_sites=None, sector="ns"):
    """The four bridge-pair expectation values from ``psi``/``chi``.

    ``n_sites=None`` uses the integrals, otherwise the ring sums.
    """
    if n_sites is None:
        _, chi00 = psi_chi_integrals(b, 0)
        psi13, chi13 = psi_chi_integrals(b, 2)
    else:
        _, chi00 = psi_chi_sums(b, 0, n_sites, sector)
        psi13, chi13 = psi_chi_sums(b, 2, n_sites, sector)
    z = -chi00
    return {
        "z": z,
        "zz": chi00 * chi00 + psi13 * psi13 - chi13 * chi13,
        "pp": 0.5 * psi13 * z,
        "pm": 0.5 * chi13 * z,
        "psi13": psi13,
        "chi13": chi13,
        "chi00": chi00,
    }


# --- length fits ---------------------------------------------------------------

@dataclass(frozen=True)
class LengthEstimate:
    xi: float
    infinite: bool
    fit_window: tuple
    residual: float
    slope: float
    excluded: tuple = ()


def correlation_length(values, kind="correlation", window=None, threshold=INFINITE_SLOPE, min_points=4):
    """Fit ``log|value|`` against ``L``; ``xi = -1 / slope``.

    Non-positive values are dropped from the fit and listed in ``excluded``.
    The estimate is flagged infinite when ``|slope| <= threshold`` or the
    retained values never decrease. ``kind`` is recorded only for labelling.
    """
    if kind not in ("correlation", "entanglement"):
        raise ValueError(f"unknown kind {kind!r}")
    items = sorted((int(k), float(v)) for k, v in values.items())
    if window is not None:
        lo, hi = window
        items = [(k, v) for k, v in items if lo <= k <= hi]
    kept = [(k, v) for k, v in items if v > 0 and math.isfinite(v)]
    excluded = tuple(k for k, v in items if not (v > 0 and math.isfinite(v)))
    if len(kept) < min_points:
        raise InsufficientData(f"need {min_points} positive values, got {len(kept)}")
    ls = np.array([k for k, _ in kept], dtype=float)
    ys = np.log(np.array([v for _, v in kept]))
    coef, res, *_ = np.polyfit(ls, ys, 1, full=True)
    slope = float(coef[0])
    resid = float(math.sqrt(res[0] / len(ls))) if len(res) else 0.0
    vals = np.array([v for _, v in kept])
    nondecreasing = bool(np.all(np.diff(vals) >= 0))
    infinite = abs(slope) <= threshold or nondecreasing or slope > 0
    xi = math.inf if infinite else -1.0 / slope
    return LengthEstimate(xi, infinite, (int(ls[0]), int(ls[-1])), resid, slope, excluded)


# --- entropy -------------------------------------------------------------------

def block_spectrum(gs, L):
    n = _n_sites(gs)
    if not 1 <= L < n:
        raise BadBlock(f"block length {L} outside [1, {n})")
    m = np.asarray(gs, dtype=complex).reshape(1 << L, 1 << (n - L))
    s = np.linalg.svd(m, compute_uv=False)
    return s * s


def block_entropy(gs, L: int) -> float:
    """Von Neumann entropy (bits) of the first ``L`` sites."""
    p = block_spectrum(gs, L)
    p = p[p > 1e-12]
    return float(-np.sum(p * np.log2(p)))


# --- census --------------------------------------------------------------------

def _window_strings(start, labels):
    return tuple((start + k, p) for k, p in enumerate(labels) if p != "I")


def correlation_census(gs, n_window: int, samples: int, seed=0, start=0,
                       threshold=CENSUS_THRESHOLD):
    """Fraction of random ``{I, X, Y, Z}`` window strings with ``|<P>| > threshold``."""
    n = _n_sites(gs)
    if start + n_window > n:
        raise SiteOutOfRange("census window does not fit in the chain")
    rng = np.random.default_rng(seed)
    draws = rng.integers(0, 4, size=(samples, n_window))
    labels = np.array(list("IXYZ"))[draws]
    strings = [_window_strings(start, row) for row in labels]
    vals = np.abs(expectations(gs, strings))
    return float(np.mean(vals > threshold))


def census_exhaustive(gs, n_window: int, start=0, threshold=CENSUS_THRESHOLD):
    """Exact fraction over all ``4^n_window`` strings."""
    import itertools

    strings = [_window_strings(start, lab) for lab in itertools.product("IXYZ", repeat=n_window)]
    vals = np.abs(expectations(gs, strings))
    return float(np.mean(vals > threshold))


def binomial_sigma(p, samples):
    return math.sqrt(p * (1 - p) / samples)
