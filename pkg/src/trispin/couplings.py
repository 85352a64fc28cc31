"""Effective spin couplings of the two-species Mott insulator on a triangle.

All formulas are closed forms in the tunneling amplitudes ``J`` and the
collisional energies ``U``; the energy unit is whatever the caller uses.
Sites are labelled 1, 2, 3 and indices wrap cyclically (``j + 3 == j``).

Sign of the species-swap companion term ``(up <-> down)`` per coupling:

=========  ======
coupling   sign
=========  ======
A_j        ``+``
B_j        ``-``
lambda1_j  ``+``
lambda2_j  ``+``
lambda3    ``-``
lambda4_j  ``-``
=========  ======
"""
from __future__ import annotations

import csv
import io
import json
import math
import re
import warnings
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import ConfigError, NonUniformTunneling, VariantMismatch, ZeroCollision
from .hamiltonian import HamiltonianSpec, PauliTerm

MOTT_RATIO_WARNING = 0.3

# plateau preset: U_upup = U_downdown = 2.12 U_updown keeps lambda1 near zero.
PLATEAU_RATIO = 2.12


class Statistics(str, Enum):
    BOSONIC = "bosonic"
    FERMIONIC = "fermionic"


class MottRegimeWarning(UserWarning):
    pass


def _triple(values, name):
    vals = tuple(complex(v) for v in values)
    if len(vals) != 3:
        raise ValueError(f"{name} needs three link amplitudes, got {len(vals)}")
    return vals


@dataclass(frozen=True)
class LatticeParams:
    """Tunneling and collisional parameters of one triangle.

    ``j_up[k]`` is the amplitude on link ``k+1`` (between sites ``k+1`` and
    ``k+2``). Fermionic parameters ignore ``u_upup`` and ``u_downdown``.
    """

    j_up: tuple
    j_down: tuple
    u_upup: float = 1.0
    u_downdown: float = 1.0
    u_updown: float = 1.0
    statistics: Statistics = Statistics.BOSONIC

    def __post_init__(self):
        object.__setattr__(self, "j_up", _triple(self.j_up, "j_up"))
        object.__setattr__(self, "j_down", _triple(self.j_down, "j_down"))
        object.__setattr__(self, "statistics", Statistics(self.statistics))

    @classmethod
    def uniform(cls, j_up, j_down, u=1.0, statistics=Statistics.BOSONIC, **kw):
        kw.setdefault("u_upup", u)
        kw.setdefault("u_downdown", u)
        kw.setdefault("u_updown", u)
        return cls((j_up,) * 3, (j_down,) * 3, statistics=statistics, **kw)

    def collisions(self):
        if self.statistics is Statistics.FERMIONIC:
            return (self.u_updown,)
        return (self.u_upup, self.u_downdown, self.u_updown)

    @property
    def mott_ratio(self):
        jmax = max(abs(j) for j in self.j_up + self.j_down)
        umin = min(abs(u) for u in self.collisions())
        return math.inf if umin == 0 else jmax / umin

    @property
    def outside_mott_regime(self):
        return self.mott_ratio > MOTT_RATIO_WARNING

    def swapped(self):
        """Exchange the two species (tunneling and same-species collisions)."""
        return LatticeParams(
            self.j_down, self.j_up, self.u_downdown, self.u_upup, self.u_updown,
            self.statistics,
        )

    def scaled(self, s):
        return LatticeParams(
            tuple(s * j for j in self.j_up), tuple(s * j for j in self.j_down),
            self.u_upup, self.u_downdown, self.u_updown, self.statistics,
        )

    def conjugated(self):
        return LatticeParams(
            tuple(j.conjugate() for j in self.j_up),
            tuple(j.conjugate() for j in self.j_down),
            self.u_upup, self.u_downdown, self.u_updown, self.statistics,
        )


class Variant(str, Enum):
    BOSONIC = "bosonic"
    FERMIONIC = "fermionic"
    COMPLEX2 = "complex2nd"
    COMPLEX3 = "complex3rd"


# Couplings that do not carry a site index.
SCALAR_COUPLINGS = {"lambda3", "mu3", "A", "B", "C", "D", "E", "F"}

_KEY_ORDER = {
    Variant.BOSONIC: ["A", "B", "lambda1", "lambda2", "lambda3", "lambda4"],
    Variant.FERMIONIC: ["mu1", "mu2", "mu3", "mu4"],
    Variant.COMPLEX2: ["A", "B", "C", "D"],
    Variant.COMPLEX3: ["E", "F"],
}


@dataclass(frozen=True)
class CouplingSet:
    """Named effective couplings.

    Site-indexed couplings are stored under ``"<name>_<j>"`` (``j`` in 1..3).
    ``lambda3`` and ``mu3`` are site independent and stored without index;
    ``get(name, j)`` returns the scalar for any ``j``. For the bosonic
    variant ``A`` and ``B`` are site indexed; for the complex variants they
    are scalars.
    """

    variant: Variant
    values: dict = field(default_factory=dict)
    mott_warning: bool = False

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))

    def get(self, name, j=None):
        if name in self.values:
            return self.values[name]
        if j is None:
            raise KeyError(name)
        return self.values[f"{name}_{(j - 1) % 3 + 1}"]

    def __getitem__(self, key):
        return self.values[key]

    def keys(self):
        out = []
        for base in _KEY_ORDER[self.variant]:
            if base in self.values:
                out.append(base)
            else:
                out.extend(f"{base}_{j}" for j in (1, 2, 3) if f"{base}_{j}" in self.values)
        return out

    def is_real(self, name, tol=1e-12):
        v = complex(self.values[name])
        return abs(v.imag) <= tol * max(1.0, abs(v))

    def real_flags(self):
        return {k: self.is_real(k) for k in self.keys()}

    def as_real(self):
        """Copy with every value converted to float (raises if any is complex)."""
        bad = [k for k in self.keys() if not self.is_real(k)]
        if bad:
            raise ValueError(f"complex couplings: {bad}")
        return CouplingSet(
            self.variant, {k: complex(v).real for k, v in self.values.items()},
            self.mott_warning,
        )

    def to_json(self):
        def enc(v):
            v = complex(v)
            return v.real if v.imag == 0 else {"re": v.real, "im": v.imag}

        return json.dumps(
            {
                "variant": self.variant.value,
                "mott_warning": self.mott_warning,
                "values": {k: enc(self.values[k]) for k in self.keys()},
            },
            indent=2,
        )

    def csv_header(self):
        return self.keys()

    def csv_row(self):
        return [format_complex(self.values[k]) for k in self.keys()]

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.csv_header())
        w.writerow(self.csv_row())
        return buf.getvalue()


def format_complex(v):
    """``re+imi`` notation with 17 significant digits; plain real if imag == 0."""
    v = complex(v)
    if v.imag == 0:
        return format(v.real, ".17g")
    return f"{v.real:.17g}{v.imag:+.17g}i"


def parse_complex(text):
    text = text.strip().replace(" ", "")
    if text.endswith("i") or text.endswith("j"):
        return complex(text[:-1] + "j")
    return complex(float(text))


def _require_nonzero(*us):
    for u in us:
        if u == 0:
            raise ZeroCollision("collisional coupling U must be nonzero")


def _maybe_real(value):
    value = complex(value)
    return value.real if value.imag == 0 else value


def _finish(variant, values, p):
    warn = p.outside_mott_regime
    if warn:
        warnings.warn(
            f"max|J|/min|U| = {p.mott_ratio:.3g} exceeds {MOTT_RATIO_WARNING}; "
            "perturbative couplings may be unreliable",
            MottRegimeWarning,
            stacklevel=3,
        )
    return CouplingSet(variant, {k: _maybe_real(v) for k, v in values.items()}, warn)


def _bosonic_half(ja, jb, uaa, uab):
    """Species-``a`` terms of the bosonic couplings (``b`` is the other species).

    Returns the pieces to the left of each ``(up <-> down)`` symbol.
    """
    tri = ja[0] * ja[1] * ja[2]
    out = {}
    for j in range(3):
        jp1, jp2 = (j + 1) % 3, (j + 2) % 3
        out[f"A_{j + 1}"] = (
            -tri * (9 / (2 * uaa**2) + 3 / (2 * uab**2) + 3 / (uab * uaa))
            - ja[j] ** 2 * (1 / uaa + 1 / (2 * uab))
        )
        out[f"B_{j + 1}"] = (
            -(ja[j] ** 2 + ja[jp2] ** 2) / uaa
            - tri / uaa * (1 / uab + 9 / (2 * uaa))
        )
        out[f"lambda1_{j + 1}"] = (
            -tri * (9 / (2 * uaa**2) - 1 / (2 * uab**2) - 1 / (uab * uaa))
            - ja[j] ** 2 * (1 / uaa - 1 / (2 * uab))
        )
        out[f"lambda2_{j + 1}"] = (
            -jb[j] * ja[jp1] * ja[jp2] * (3 / (2 * uab**2) + 1 / (2 * uaa**2) + 1 / (uab * uaa))
            - ja[j] * jb[j] / (2 * uab)
        )
        out[f"lambda4_{j + 1}"] = (
            -ja[j] * ja[jp1] * jb[jp2] / uaa * (1 / (2 * uaa) + 1 / uab)
        )
    out["lambda3"] = -tri / uaa * (3 / (2 * uaa) - 1 / uab)
    return out


_SWAP_SIGN = {"A": 1, "B": -1, "lambda1": 1, "lambda2": 1, "lambda3": -1, "lambda4": -1}


def bosonic_couplings(p: LatticeParams) -> CouplingSet:
    if p.statistics is not Statistics.BOSONIC:
        raise VariantMismatch("bosonic_couplings needs bosonic parameters")
    _require_nonzero(p.u_upup, p.u_downdown, p.u_updown)
    up = _bosonic_half(p.j_up, p.j_down, p.u_upup, p.u_updown)
    down = _bosonic_half(p.j_down, p.j_up, p.u_downdown, p.u_updown)
    values = {}
    for key in up:
        base = key.split("_")[0]
        values[key] = up[key] + _SWAP_SIGN[base] * down[key]
    return _finish(Variant.BOSONIC, values, p)


def fermionic_couplings(p: LatticeParams) -> CouplingSet:
    if p.statistics is not Statistics.FERMIONIC:
        raise VariantMismatch("fermionic_couplings needs fermionic parameters")
    u = p.u_updown
    _require_nonzero(u)
    ju, jd = p.j_up, p.j_down
    values = {}
    for j in range(3):
        jp1, jp2 = (j + 1) % 3, (j + 2) % 3
        values[f"mu1_{j + 1}"] = -(ju[j] ** 2 + jd[j] ** 2) / (2 * u)
        values[f"mu2_{j + 1}"] = ju[j] * jd[j] / u
        values[f"mu4_{j + 1}"] = 3 / (2 * u**2) * (
            ju[j] * ju[jp1] * jd[jp2] - jd[j] * jd[jp1] * ju[jp2]
        )
    values["mu3"] = -(ju[0] * ju[1] * ju[2] - jd[0] * jd[1] * jd[2]) / (2 * u**2)
    return _finish(Variant.FERMIONIC, values, p)


def _uniform_link(js, name):
    if any(abs(j - js[0]) > 1e-15 * max(1.0, abs(js[0])) for j in js):
        raise NonUniformTunneling(f"{name} must be equal on all three links")
    return js[0]


def complex_couplings(p: LatticeParams, order="second") -> CouplingSet:
    """Complex-tunneling couplings of a uniform triangle.

    ``order="second"`` gives ``A, B, C, D`` (insensitive to tunneling
    phases); ``order="third"`` gives the time-reversal-odd ``E`` and ``F``,
    which are real when the tunneling amplitudes are purely imaginary.
    """
    ju = _uniform_link(p.j_up, "j_up")
    jd = _uniform_link(p.j_down, "j_down")
    if order == "second":
        _require_nonzero(p.u_upup, p.u_downdown, p.u_updown)
        au, ad = abs(ju) ** 2, abs(jd) ** 2
        values = {
            "A": -au / p.u_upup - ad / p.u_downdown - (au + ad) / (2 * p.u_updown),
            "B": -au / (2 * p.u_upup) + ad / (2 * p.u_downdown),
            "C": -au / p.u_upup - ad / p.u_downdown + (au + ad) / (2 * p.u_updown),
            "D": (ju * jd.conjugate() + ju.conjugate() * jd) / (2 * p.u_updown),
        }
        return _finish(Variant.COMPLEX2, values, p)
    if order == "third":
        u = p.u_updown
        _require_nonzero(u)
        values = {
            "E": 1j * ju * jd * (ju + jd) / (2 * u**2),
            "F": 1j * ju * jd * (ju - jd) / (2 * u**2),
        }
        # purely imaginary inputs give real E, F: drop float residue
        values = {
            k: (v.real if abs(v.imag) <= 1e-14 * max(1.0, abs(v)) else v)
            for k, v in values.items()
        }
        return _finish(Variant.COMPLEX3, values, p)
    raise ValueError(f"order must be 'second' or 'third', not {order!r}")


def effective_couplings(p: LatticeParams) -> CouplingSet:
    if p.statistics is Statistics.FERMIONIC:
        return fermionic_couplings(p)
    return bosonic_couplings(p)


# --- Raman rotation -------------------------------------------------------

_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True)
class RamanRotation:
    theta: float
    phi: float

    def matrix(self):
        c, s = math.cos(self.theta), math.sin(self.theta)
        e = complex(math.cos(self.phi), math.sin(self.phi))
        return np.array([[c, e * s], [s, -e * c]], dtype=complex)

    def conjugate_pauli(self, label):
        """Coefficients ``r_Q`` with ``g P g^dagger = sum_Q r_Q Q`` for Q in X, Y, Z."""
        g = self.matrix()
        rotated = g @ _PAULI[label] @ g.conj().T
        return {q: np.trace(_PAULI[q] @ rotated).real / 2 for q in "XYZ"}


def raman_rotate(h: HamiltonianSpec, r: RamanRotation, tol=1e-12) -> HamiltonianSpec:
    """Conjugate every single-site Pauli of ``h`` by ``g(phi, theta)``."""
    images = {label: r.conjugate_pauli(label) for label in "XYZ"}
    terms = []
    for term in h.terms:
        expanded = [(complex(term.coefficient), ())]
        for site, label in term.operators:
            nxt = []
            for coeff, ops in expanded:
                for q, w in images[label].items():
                    if abs(w) > tol:
                        nxt.append((coeff * w, ops + ((site, q),)))
            expanded = nxt
        for coeff, ops in expanded:
            terms.append(PauliTerm(coeff, ops))
    out = HamiltonianSpec(h.n_sites, h.boundary, tuple(terms)).canonical(tol=tol)
    return out.realified(tol)


# --- key-value config -----------------------------------------------------

_LINE = re.compile(r"^\s*([A-Za-z0-9_.\-]+)\s*[=:]?\s*(.*?)\s*$")


def read_keyvalue(text):
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _LINE.match(line)
        if not m or not m.group(2):
            raise ConfigError(f"line {lineno}: expected 'key = value'", key=line)
        out[m.group(1)] = m.group(2)
    return out


def lattice_params_from_mapping(cfg):
    """Build LatticeParams from keys ``j_up_1..3``, ``j_down_1..3``, ``u_*``, ``statistics``.

    ``j_up`` / ``j_down`` set all three links at once.
    """
    def links(species):
        base = cfg.get(f"j_{species}")
        vals = []
        for k in (1, 2, 3):
            key = f"j_{species}_{k}"
            if key in cfg:
                vals.append(_num(cfg, key))
            elif base is not None:
                vals.append(_num(cfg, f"j_{species}"))
            else:
                raise ConfigError(f"missing {key}", key=key)
        return tuple(vals)

    known = {f"j_{s}_{k}" for s in ("up", "down") for k in (1, 2, 3)}
    known |= {"j_up", "j_down", "u", "u_upup", "u_downdown", "u_updown", "statistics"}
    unknown = sorted(set(cfg) - known)
    if unknown:
        raise ConfigError(f"unknown key {unknown[0]!r}", key=unknown[0])
    u = float(_num(cfg, "u").real) if "u" in cfg else 1.0
    kw = {}
    for key in ("u_upup", "u_downdown", "u_updown"):
        kw[key] = float(_num(cfg, key).real) if key in cfg else u
    stats = str(cfg.get("statistics", "bosonic")).strip().lower()
    if stats not in ("bosonic", "fermionic"):
        raise ConfigError(f"statistics must be bosonic or fermionic, not {stats!r}", key="statistics")
    return LatticeParams(links("up"), links("down"), statistics=stats, **kw)


def _num(cfg, key):
    v = cfg[key]
    if isinstance(v, (int, float, complex)):
        return complex(v)
    try:
        return parse_complex(str(v))
    except ValueError:
        raise ConfigError(f"{key}: not a number: {v!r}", key=key) from None


def load_lattice_params(path):
    with open(path) as fh:
        return lattice_params_from_mapping(read_keyvalue(fh.read()))
