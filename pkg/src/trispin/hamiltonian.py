"""Pauli-string Hamiltonians and the model builders.

A :class:`HamiltonianSpec` is a list of weighted Pauli strings on ``n``
sites; dense and sparse matrices and the matrix-free ``apply`` are derived
from it. Sites are 0-based here and 1-based in the text format.

Basis convention: site ``s`` is bit ``n - 1 - s`` of the basis index, so
site 0 is the leftmost tensor factor, and ``|0> = |up>`` has ``Z = +1``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
import scipy.sparse as sp

from . import kernels
from .errors import (
    BadTriple,
    DimensionLimit,
    SiteOutOfRange,
    TooFewSites,
    TrispinError,
    VariantMismatch,
)

MAX_DENSE_SITES = 14
MAX_APPLY_SITES = 24

PAULI_LABELS = ("X", "Y", "Z")


class Boundary(str, Enum):
    PERIODIC = "periodic"
    OPEN = "open"


@dataclass(frozen=True)
class PauliTerm:
    """``coefficient * prod_s P_s``; ``operators`` is a sorted tuple of ``(site, label)``."""

    coefficient: complex
    operators: tuple = ()

    def __post_init__(self):
        ops = self.operators
        if isinstance(ops, dict):
            ops = ops.items()
        ops = tuple(sorted((int(s), str(p).upper()) for s, p in ops))
        sites = [s for s, _ in ops]
        if len(set(sites)) != len(sites):
            raise ValueError(f"repeated site in Pauli string {ops}")
        for s, p in ops:
            if p not in PAULI_LABELS:
                raise ValueError(f"unknown Pauli label {p!r}")
            if s < 0:
                raise SiteOutOfRange(f"negative site {s}")
        object.__setattr__(self, "operators", ops)

    @classmethod
    def of(cls, coefficient, *pairs):
        """``PauliTerm.of(0.5, (0, "X"), (2, "X"))``."""
        return cls(coefficient, tuple(pairs))

    @property
    def string(self):
        return self.operators

    @property
    def sites(self):
        return tuple(s for s, _ in self.operators)

    def label(self, n):
        chars = ["I"] * n
        for s, p in self.operators:
            chars[s] = p
        return "".join(chars)

    def masks(self, n):
        """``(x_mask, z_mask, phase)`` with ``P = phase * X^x Z^z``."""
        x = z = 0
        ny = 0
        for s, p in self.operators:
            bit = 1 << (n - 1 - s)
            if p == "X":
                x |= bit
            elif p == "Z":
                z |= bit
            else:
                x |= bit
                z |= bit
                ny += 1
        return x, z, 1j**ny


def pauli_strings_commute(a: PauliTerm, b: PauliTerm) -> bool:
    da = dict(a.operators)
    clashes = sum(1 for s, p in b.operators if s in da and da[s] != p)
    return clashes % 2 == 0


@dataclass(frozen=True)
class HamiltonianSpec:
    n_sites: int
    boundary: Boundary = Boundary.PERIODIC
    terms: tuple = ()

    def __post_init__(self):
        if self.n_sites < 1:
            raise ValueError("n_sites must be positive")
        object.__setattr__(self, "boundary", Boundary(self.boundary))
        terms = tuple(self.terms)
        for t in terms:
            for s in t.sites:
                if s >= self.n_sites:
                    raise SiteOutOfRange(f"site {s} outside [0, {self.n_sites})")
        object.__setattr__(self, "terms", terms)

    def __add__(self, other):
        if other.n_sites != self.n_sites:
            raise ValueError("site count mismatch")
        return HamiltonianSpec(self.n_sites, self.boundary, self.terms + other.terms)

    def scaled(self, s):
        return HamiltonianSpec(
            self.n_sites, self.boundary,
            tuple(PauliTerm(s * t.coefficient, t.operators) for t in self.terms),
        )

    def canonical(self, tol=0.0):
        """Merge repeated strings; drop terms with ``|c| <= tol``. Order is by string."""
        acc = {}
        for t in self.terms:
            acc[t.operators] = acc.get(t.operators, 0) + complex(t.coefficient)
        keys = sorted(acc, key=lambda ops: (len(ops), ops))
        terms = tuple(PauliTerm(acc[k], k) for k in keys if abs(acc[k]) > tol)
        return HamiltonianSpec(self.n_sites, self.boundary, terms)

    def realified(self, tol=1e-12):
        """Drop imaginary residue ``<= tol * max(1, |c|)`` from coefficients."""
        terms = []
        for t in self.terms:
            c = complex(t.coefficient)
            if abs(c.imag) <= tol * max(1.0, abs(c)):
                c = complex(c.real, 0.0)
            terms.append(PauliTerm(c, t.operators))
        return HamiltonianSpec(self.n_sites, self.boundary, tuple(terms))

    def is_hermitian(self, tol=1e-12):
        return all(abs(c.imag) <= tol for c in (complex(t.coefficient) for t in self.canonical().terms))

    def compiled(self):
        """Arrays ``(xs, zs, cs)`` for the kernels, duplicates merged."""
        can = self.canonical()
        n = self.n_sites
        xs = np.empty(len(can.terms), dtype=np.uint64)
        zs = np.empty(len(can.terms), dtype=np.uint64)
        cs = np.empty(len(can.terms), dtype=np.complex128)
        for k, t in enumerate(can.terms):
            x, z, ph = t.masks(n)
            xs[k], zs[k], cs[k] = x, z, ph * complex(t.coefficient)
        return xs, zs, cs

    @property
    def is_real_operator(self):
        """True when every matrix element is real (allows real-arithmetic solvers)."""
        _, _, cs = self.compiled()
        return bool(np.all(cs.imag == 0))

    def translated(self, shift):
        n = self.n_sites
        return HamiltonianSpec(
            n, self.boundary,
            tuple(PauliTerm(t.coefficient, tuple(((s + shift) % n, p) for s, p in t.operators))
                  for t in self.terms),
        )

    def to_text(self):
        return to_text(self)

    def __len__(self):
        return len(self.terms)


# --- matrices -------------------------------------------------------------

def to_sparse(h: HamiltonianSpec, max_sites=MAX_APPLY_SITES):
    n = h.n_sites
    if n > max_sites:
        raise DimensionLimit(f"sparse matrix limited to n <= {max_sites}, got {n}")
    dim = 1 << n
    xs, zs, cs = h.compiled()
    real = bool(np.all(cs.imag == 0))
    idx = np.arange(dim, dtype=np.uint64)
    # off-diagonal structure is shared between strings with equal x mask
    mat = sp.csr_matrix((dim, dim), dtype=float if real else complex)
    for x in np.unique(xs):
        sel = xs == x
        diag = np.zeros(dim, dtype=float if real else complex)
        for z, c in zip(zs[sel], cs[sel]):
            parity = np.bitwise_count(idx & z) & 1
            diag += (c.real if real else c) * (1 - 2 * parity.astype(float))
        rows = (idx ^ x).astype(np.int64)
        mat = mat + sp.csr_matrix((diag, (rows, idx.astype(np.int64))), shape=(dim, dim))
    return mat.tocsr()


def to_matrix(h: HamiltonianSpec):
    """Dense ``2^n x 2^n`` complex matrix (``n <= 14``)."""
    if h.n_sites > MAX_DENSE_SITES:
        raise DimensionLimit(f"dense matrix limited to n <= {MAX_DENSE_SITES}, got {h.n_sites}")
    return to_sparse(h).toarray().astype(complex)


def apply(h: HamiltonianSpec, v, out=None, compiled=None):
    """``H v`` term by term without building the matrix (``n <= 24``)."""
    n = h.n_sites
    if n > MAX_APPLY_SITES:
        raise DimensionLimit(f"apply limited to n <= {MAX_APPLY_SITES}, got {n}")
    v = np.asarray(v)
    if v.shape != (1 << n,):
        raise ValueError(f"state length {v.shape} does not match 2^{n}")
    xs, zs, cs = compiled if compiled is not None else h.compiled()
    if np.iscomplexobj(v) or np.any(cs.imag != 0):
        v = np.ascontiguousarray(v, dtype=np.complex128)
    else:
        v = np.ascontiguousarray(v, dtype=np.float64)
    if out is None:
        out = np.zeros_like(v)
    else:
        out[:] = 0
    return kernels.apply_pauli_sum(xs, zs, cs, v, out)


def expectation(h: HamiltonianSpec, v):
    v = np.asarray(v, dtype=complex)
    return complex(np.vdot(v, apply(h, v))).real


def pauli_matrix(label):
    return {
        "I": np.eye(2, dtype=complex),
        "X": np.array([[0, 1], [1, 0]], dtype=complex),
        "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
        "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    }[label]


def term_matrix(term: PauliTerm, n):
    """Dense Kronecker-product matrix of one term (small ``n``; used as an oracle)."""
    ops = dict(term.operators)
    m = np.array([[1.0 + 0j]])
    for s in range(n):
        m = np.kron(m, pauli_matrix(ops.get(s, "I")))
    return complex(term.coefficient) * m


# --- text format ----------------------------------------------------------

_HEADER = "HAMILTONIAN"


def to_text(h: HamiltonianSpec) -> str:
    lines = [f"{_HEADER} n_sites={h.n_sites} boundary={h.boundary.value}"]
    for t in h.terms:
        c = complex(t.coefficient)
        ops = " ".join(f"{s + 1}:{p}" for s, p in t.operators)
        lines.append(f"{c.real!r} {c.imag!r}" + (f" {ops}" if ops else ""))
    return "\n".join(lines) + "\n"


def from_text(text: str) -> HamiltonianSpec:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or not lines[0].startswith(_HEADER):
        raise TrispinError("missing HAMILTONIAN header line")
    meta = dict(tok.split("=", 1) for tok in lines[0].split()[1:])
    n = int(meta["n_sites"])
    boundary = meta.get("boundary", "periodic")
    terms = []
    for ln in lines[1:]:
        parts = ln.split()
        c = complex(float(parts[0]), float(parts[1]))
        ops = []
        for tok in parts[2:]:
            site, p = tok.split(":")
            ops.append((int(site) - 1, p))
        terms.append(PauliTerm(c, tuple(ops)))
    return HamiltonianSpec(n, boundary, tuple(terms))


# --- builders -------------------------------------------------------------

def _get(c, name, j):
    """Coupling ``name`` at 1-based cyclic index ``j`` from a CouplingSet or mapping."""
    if hasattr(c, "get") and hasattr(c, "variant"):
        return c.get(name, j)
    if name in c:
        return c[name]
    return c[f"{name}_{(j - 1) % 3 + 1}"]


def _bosonic_block(c, jj, a, b, d):
    """One ``j`` of the bosonic sum on sites ``a = j``, ``b = j+1``, ``d = j+2``."""
    out = [
        PauliTerm(_get(c, "A", jj)),
        PauliTerm(_get(c, "B", jj), ((a, "Z"),)),
        PauliTerm(_get(c, "lambda1", jj), ((a, "Z"), (b, "Z"))),
        PauliTerm(_get(c, "lambda2", jj), ((a, "X"), (b, "X"))),
        PauliTerm(_get(c, "lambda2", jj), ((a, "Y"), (b, "Y"))),
    ]
    if d is not None:
        out += [
            PauliTerm(_get(c, "lambda3", jj), ((a, "Z"), (b, "Z"), (d, "Z"))),
            PauliTerm(_get(c, "lambda4", jj), ((a, "X"), (b, "Z"), (d, "X"))),
            PauliTerm(_get(c, "lambda4", jj), ((a, "Y"), (b, "Z"), (d, "Y"))),
        ]
    return out


def _variant(c):
    v = getattr(c, "variant", None)
    return getattr(v, "value", v)


def triangle_hamiltonian(c) -> HamiltonianSpec:
    """Three-site periodic Hamiltonian from a bosonic or fermionic CouplingSet.

    The ``j`` sum is emitted literally (so the site-independent three-spin
    term appears three times); call ``.canonical()`` to merge.
    """
    variant = _variant(c)
    terms = []
    if variant == "bosonic":
        for j in range(3):
            terms += _bosonic_block(c, j + 1, j, (j + 1) % 3, (j + 2) % 3)
    elif variant == "fermionic":
        zzz = ((0, "Z"), (1, "Z"), (2, "Z"))
        mu3 = _get(c, "mu3", 1)
        for j in range(3):
            a, b, d = j, (j + 1) % 3, (j + 2) % 3
            mu1 = _get(c, "mu1", j + 1)
            mu2 = _get(c, "mu2", j + 1)
            mu4 = _get(c, "mu4", j + 1)
            terms += [
                PauliTerm(mu1),
                PauliTerm(-mu1, ((a, "Z"), (b, "Z"))),
                PauliTerm(mu3, ((a, "Z"),)),
                PauliTerm(-mu3, zzz),
                PauliTerm(mu2, ((a, "X"), (b, "X"))),
                PauliTerm(mu2, ((a, "Y"), (b, "Y"))),
                PauliTerm(mu4, ((a, "X"), (b, "Z"), (d, "X"))),
                PauliTerm(mu4, ((a, "Y"), (b, "Z"), (d, "Y"))),
            ]
    else:
        raise VariantMismatch(f"triangle_hamiltonian needs a bosonic or fermionic set, got {variant}")
    return HamiltonianSpec(3, Boundary.PERIODIC, tuple(terms))


_LEVI_CIVITA = [
    (("X", "Y", "Z"), 1), (("Y", "Z", "X"), 1), (("Z", "X", "Y"), 1),
    (("X", "Z", "Y"), -1), (("Z", "Y", "X"), -1), (("Y", "X", "Z"), -1),
]


def _check_triple(tri, n):
    if len(tri) != 3 or len(set(tri)) != 3 or any(not 0 <= s < n for s in tri):
        raise BadTriple(f"triangle {tri} must be three distinct sites in [0, {n})")


def chiral_hamiltonian(f, triangles, n) -> HamiltonianSpec:
    """``F * sum sigma_i . (sigma_j x sigma_k)`` over the given ordered triples."""
    terms = []
    for tri in triangles:
        tri = tuple(int(s) for s in tri)
        _check_triple(tri, n)
        i, j, k = tri
        for (l, m, q), sign in _LEVI_CIVITA:
            terms.append(PauliTerm(sign * f, ((i, l), (j, m), (k, q))))
    return HamiltonianSpec(n, Boundary.PERIODIC, tuple(terms))


def third_order_triangle_hamiltonian(c) -> HamiltonianSpec:
    """Triangle Hamiltonian from third-order ``E``, ``F`` (Zeeman terms dropped).

    Bonds are taken in the circulation ``(0,1), (1,2), (2,0)``.
    """
    if _variant(c) != "complex3rd":
        raise VariantMismatch("third_order_triangle_hamiltonian needs the E/F set")
    e, f = complex(c["E"]), complex(c["F"])
    terms = []
    for i in range(3):
        j = (i + 1) % 3
        terms += [PauliTerm(e, ((i, "X"), (j, "Y"))), PauliTerm(-e, ((i, "Y"), (j, "X")))]
    chiral = chiral_hamiltonian(f, [(0, 1, 2)], 3)
    return HamiltonianSpec(3, Boundary.PERIODIC, tuple(terms) + chiral.terms)


def chiral_ground_states(omega=None):
    """The two ``E = -2 sqrt(3) F`` chirality eigenstates on one triangle.

    ``omega`` defaults to ``exp(2 pi i / 3)``; the result is a ``(8, 2)``
    array of the ``S_z = +1/2`` and ``-1/2`` states.
    """
    w = np.exp(2j * np.pi / 3) if omega is None else omega
    up, dn = 0, 1

    def idx(*bits):
        return int("".join(str(b) for b in bits), 2)

    plus = np.zeros(8, complex)
    plus[idx(up, up, dn)] = 1
    plus[idx(up, dn, up)] = w
    plus[idx(dn, up, up)] = w**2
    minus = np.zeros(8, complex)
    minus[idx(dn, dn, up)] = -1
    minus[idx(dn, up, dn)] = -w
    minus[idx(up, dn, dn)] = -(w**2)
    return np.stack([plus, minus], axis=1) / math.sqrt(3)


class ChainModel(str, Enum):
    ISING3SPIN = "ising3spin"
    CLUSTER = "cluster"
    GENERAL_HAM1 = "general_ham1"


def _wrap(i, n, periodic):
    if periodic:
        return i % n
    return i if 0 <= i < n else None


def chain_hamiltonian(model, params, n, boundary=Boundary.PERIODIC) -> HamiltonianSpec:
    """Chain Hamiltonians.

    ``ising3spin``: ``sum_i lambda1 Z_i Z_{i+1} + lambda3 Z_i Z_{i+1} Z_{i+2}
    + bx X_i`` (keys ``lambda1``, ``lambda3``, ``bx``; optional ``lambda_nnn``
    adds ``Z_i Z_{i+2}``).

    ``cluster``: ``sum_i X_{i-1} Z_i X_{i+1} + B Z_i`` (key ``B``).

    ``general_ham1``: the bosonic triangle form slid along the chain, with
    coupling index ``(i mod 3) + 1`` at starting site ``i``; ``params`` is a
    bosonic CouplingSet or an equivalent mapping.

    Open boundaries drop every term that would wrap around.
    """
    model = ChainModel(model)
    boundary = Boundary(boundary)
    if n < 3:
        raise TooFewSites(f"chain models need n >= 3, got {n}")
    periodic = boundary is Boundary.PERIODIC
    terms = []

    def add(coeff, *pairs):
        if coeff == 0:
            return
        sites = [_wrap(s, n, periodic) for s, _ in pairs]
        if any(s is None for s in sites):
            return
        terms.append(PauliTerm(coeff, tuple((s, p) for s, (_, p) in zip(sites, pairs))))

    if model is ChainModel.ISING3SPIN:
        l1 = float(params.get("lambda1", 0.0))
        l3 = float(params.get("lambda3", 0.0))
        bx = float(params.get("bx", params.get("Bx", 0.0)))
        nnn = float(params.get("lambda_nnn", 0.0))
        for i in range(n):
            add(l1, (i, "Z"), (i + 1, "Z"))
            add(l3, (i, "Z"), (i + 1, "Z"), (i + 2, "Z"))
            add(nnn, (i, "Z"), (i + 2, "Z"))
            add(bx, (i, "X"))
    elif model is ChainModel.CLUSTER:
        b = float(params.get("B", params.get("b", 0.0)))
        for i in range(n):
            add(1.0, (i - 1, "X"), (i, "Z"), (i + 1, "X"))
            add(b, (i, "Z"))
    else:
        if _variant(params) not in (None, "bosonic"):
            raise VariantMismatch("general_ham1 uses the bosonic coupling set")
        for i in range(n):
            jj = i % 3 + 1
            for t in _bosonic_block(params, jj, 0, 1, 2):
                offsets = [{0: i, 1: i + 1, 2: i + 2}[s] for s in t.sites]
                add(t.coefficient, *[(o, p) for o, (_, p) in zip(offsets, t.operators)])
    return HamiltonianSpec(n, boundary, tuple(terms))


def cluster_stabilizers(n, boundary=Boundary.PERIODIC):
    """The commuting ``X_{i-1} Z_i X_{i+1}`` strings of the ``B = 0`` cluster chain."""
    return chain_hamiltonian(ChainModel.CLUSTER, {"B": 0.0}, n, boundary).terms


def random_spec(n, n_terms, rng, max_weight=3):
    """Random real-coefficient Pauli sum (test helper)."""
    terms = []
    for _ in range(n_terms):
        w = int(rng.integers(0, max_weight + 1))
        sites = rng.choice(n, size=min(w, n), replace=False)
        ops = tuple((int(s), PAULI_LABELS[int(rng.integers(3))]) for s in sites)
        terms.append(PauliTerm(float(rng.normal()), ops))
    return HamiltonianSpec(n, Boundary.PERIODIC, tuple(terms))


def all_pauli_strings(sites):
    """Every assignment of ``{I, X, Y, Z}`` to ``sites`` as ``PauliTerm`` with coefficient 1."""
    for labels in itertools.product("IXYZ", repeat=len(sites)):
        yield PauliTerm(1.0, tuple((s, p) for s, p in zip(sites, labels) if p != "I"))
