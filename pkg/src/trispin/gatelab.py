"""Gates from integrated coupling schedules, and the pointer ladder.

A schedule ``(L0, ..., L4)`` generates ``U = exp(-i sum_k L_k H_k)`` with
unit-strength shapes. On two sites ``(0, 1)``::

    H0 = Z0 + Z1,  H1 = Z0 Z1,  H2 = (X0 X1 + Y0 Y1) / 2

and on a triangle ``(0, 1, 2)`` whose middle site is the control::

    H0 = Z0 + Z1 + Z2,  H1 = Z0 Z1 + Z1 Z2 + Z0 Z2,  H2 = (X0 X2 + Y0 Y2) / 2
    H3 = Z0 Z1 Z2,      H4 = (X0 Z1 X2 + Y0 Z1 Y2) / 2

With these shapes the CP and C2P rows are exact up to a global phase; the
SWAP row gives ``SWAP . diag(1, -i, -i, 1)`` and the cSWAP row the
controlled version of the same.

Ladder layout: ``2 n`` qubits, auxiliary row ``a_0 .. a_{n-1}`` first,
register row ``r_0 .. r_{n-1}`` after it. Triangles are
``(r_c, a_c, r_{c+1})`` with the auxiliary qubit as control.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg, optimize

from . import kernels
from .errors import PointerLost, ScheduleShapeMismatch, TrispinError
from .hamiltonian import HamiltonianSpec, PauliTerm, to_matrix

TWO_PI = 2 * math.pi
POINTER_TOL = 1e-9


def reduce_angle(v):
    """Map to ``(-pi, pi]``."""
    r = math.fmod(v, TWO_PI)
    if r > math.pi:
        r -= TWO_PI
    elif r <= -math.pi:
        r += TWO_PI
    return r


@dataclass(frozen=True)
class LambdaSchedule:
    l0: float = 0.0
    l1: float = 0.0
    l2: float = 0.0
    l3: float = 0.0
    l4: float = 0.0

    def __post_init__(self):
        for name in ("l0", "l1", "l2", "l3", "l4"):
            object.__setattr__(self, name, reduce_angle(float(getattr(self, name))))

    @property
    def values(self):
        return (self.l0, self.l1, self.l2, self.l3, self.l4)

    def __add__(self, other):
        return LambdaSchedule(*(a + b for a, b in zip(self.values, other.values)))

    @property
    def needs_triangle(self):
        return self.l3 != 0 or self.l4 != 0


P = math.pi
GATE_TABLE = {
    "CP": LambdaSchedule(-P / 4, P / 4, 0, 0, 0),
    "C2P": LambdaSchedule(P / 8, -P / 8, 0, P / 8, 0),
    "SWAP": LambdaSchedule(0, 0, P / 2, 0, 0),
    "CSWAP": LambdaSchedule(0, 0, P / 4, 0, -P / 4),
}
GATE_SITES = {"CP": 2, "C2P": 3, "SWAP": 2, "CSWAP": 3}

# SWAP row plus a Z Z term that cancels its diag(1, -i, -i, 1) phase
EXACT_SWAP = LambdaSchedule(0, P / 4, P / 2, 0, 0)
# controlled-S between two sites (phase i on |11>) up to a global phase
CONTROLLED_S = LambdaSchedule(P / 8, -P / 8, 0, 0, 0)


def _shapes(sites):
    def t(*pairs):
        return PauliTerm(1.0, pairs)

    if sites == 2:
        return [
            [t((0, "Z")), t((1, "Z"))],
            [t((0, "Z"), (1, "Z"))],
            [PauliTerm(0.5, ((0, "X"), (1, "X"))), PauliTerm(0.5, ((0, "Y"), (1, "Y")))],
            [],
            [],
        ]
    return [
        [t((0, "Z")), t((1, "Z")), t((2, "Z"))],
        [t((0, "Z"), (1, "Z")), t((1, "Z"), (2, "Z")), t((0, "Z"), (2, "Z"))],
        [PauliTerm(0.5, ((0, "X"), (2, "X"))), PauliTerm(0.5, ((0, "Y"), (2, "Y")))],
        [t((0, "Z"), (1, "Z"), (2, "Z"))],
        [PauliTerm(0.5, ((0, "X"), (1, "Z"), (2, "X"))), PauliTerm(0.5, ((0, "Y"), (1, "Z"), (2, "Y")))],
    ]


def schedule_generator(s: LambdaSchedule, sites: int) -> HamiltonianSpec:
    """``sum_k L_k H_k`` as a Pauli sum."""
    if sites not in (2, 3):
        raise ScheduleShapeMismatch("schedules act on 2 or 3 sites")
    if sites == 2 and s.needs_triangle:
        raise ScheduleShapeMismatch("L3 and L4 need three sites")
    terms = []
    for lam, shape in zip(s.values, _shapes(sites)):
        terms += [PauliTerm(lam * t.coefficient, t.operators) for t in shape]
    return HamiltonianSpec(sites, "open", tuple(terms))


def schedule_to_unitary(s: LambdaSchedule, sites: int):
    return linalg.expm(-1j * to_matrix(schedule_generator(s, sites)))


# --- reference gates and phase stripping ------------------------------------------------

def controlled_phase():
    return np.diag([1, 1, 1, -1]).astype(complex)


def controlled_controlled_phase():
    d = np.ones(8, complex)
    d[7] = -1
    return np.diag(d)


def swap_gate():
    m = np.zeros((4, 4), complex)
    for i, j in ((0, 0), (1, 2), (2, 1), (3, 3)):
        m[i, j] = 1
    return m


def controlled_swap_middle():
    """Swap sites 0 and 2 when the middle site 1 is ``|1>``."""
    m = np.zeros((8, 8), complex)
    for i in range(8):
        b0, b1, b2 = (i >> 2) & 1, (i >> 1) & 1, i & 1
        j = (b2 << 2) | (b1 << 1) | b0 if b1 else i
        m[j, i] = 1
    return m


def swap_extra_phase():
    """The ``diag(1, -i, -i, 1)`` phase carried by the SWAP row."""
    return np.diag([1, -1j, -1j, 1])


def cswap_extra_phase():
    """Controlled ``diag(1, -i, -i, 1)`` on sites 0, 2 with site 1 as control."""
    d = np.ones(8, complex)
    for i in range(8):
        b0, b1, b2 = (i >> 2) & 1, (i >> 1) & 1, i & 1
        if b1 and b0 != b2:
            d[i] = -1j
    return np.diag(d)


REFERENCE = {
    "CP": (controlled_phase, None),
    "C2P": (controlled_controlled_phase, None),
    "SWAP": (swap_gate, swap_extra_phase),
    "CSWAP": (controlled_swap_middle, cswap_extra_phase),
}


def _local_phase_diag(phases, nq):
    d = np.ones(1 << nq, complex)
    for i in range(1 << nq):
        for q in range(nq):
            if (i >> (nq - 1 - q)) & 1:
                d[i] *= np.exp(1j * phases[q])
    return d


@dataclass
class PhaseFit:
    global_phase: float
    local_phases: tuple
    distance: float


def strip_phases(u, g) -> PhaseFit:
    """Fit ``u ~ e^{i a} D(b) g`` with ``D(b)`` a product of single-qubit z-phases.

    Returns the fitted phases and ``max |u - e^{i a} D(b) g|``.
    """
    u = np.asarray(u, complex)
    g = np.asarray(g, complex)
    dim = u.shape[0]
    nq = dim.bit_length() - 1
    # seed from the entries where g is largest in each row
    rows = np.arange(dim)
    cols = np.argmax(np.abs(g), axis=1)
    ratio = u[rows, cols] / g[rows, cols]
    a0 = float(np.angle(ratio[0]))
    b0 = [float(np.angle(ratio[1 << (nq - 1 - q)] / ratio[0])) for q in range(nq)]

    def resid(p):
        m = np.exp(1j * p[0]) * _local_phase_diag(p[1:], nq)[:, None] * g
        d = (u - m).ravel()
        return np.concatenate([d.real, d.imag])

    sol = optimize.least_squares(resid, np.array([a0] + b0), xtol=1e-15, ftol=1e-15, gtol=1e-15)
    p = sol.x
    m = np.exp(1j * p[0]) * _local_phase_diag(p[1:], nq)[:, None] * g
    dist = float(np.max(np.abs(u - m)))
    return PhaseFit(reduce_angle(p[0]), tuple(reduce_angle(x) for x in p[1:]), dist)


@dataclass
class GateReport:
    gate: str
    distance: float
    fit: PhaseFit
    extra_phase: np.ndarray = field(repr=False, default=None)
    unitarity: float = 0.0
    passed: bool = False


def verify_gate(name: str, tol=1e-9) -> GateReport:
    """Compare a table row with its target gate after removing the declared extra phase."""
    key = name.upper().replace("²", "2").replace("^", "")
    if key not in GATE_TABLE:
        raise TrispinError(f"unknown gate {name!r}; expected one of {sorted(GATE_TABLE)}")
    u = schedule_to_unitary(GATE_TABLE[key], GATE_SITES[key])
    target_fn, extra_fn = REFERENCE[key]
    extra = extra_fn() if extra_fn else np.eye(u.shape[0])
    fit = strip_phases(u @ extra.conj().T, target_fn())
    unit = float(np.max(np.abs(u @ u.conj().T - np.eye(u.shape[0]))))
    return GateReport(key, fit.distance, fit, extra, unit, fit.distance <= tol and unit <= 1e-10)


def swap_like(u, tol=1e-9):
    """``|01> <-> |10>`` with unit modulus and ``|00>``, ``|11>`` fixed up to phases."""
    ok = abs(abs(u[2, 1]) - 1) <= tol and abs(abs(u[1, 2]) - 1) <= tol
    ok &= abs(abs(u[0, 0]) - 1) <= tol and abs(abs(u[3, 3]) - 1) <= tol
    return bool(ok)


# --- state-vector helpers ------------------------------------------------------------------

def apply_unitary(psi, n, sites, u):
    """Apply a ``2^k x 2^k`` unitary to ``sites`` (in that order) of an ``n``-qubit state."""
    k = len(sites)
    t = psi.reshape((2,) * n)
    t = np.moveaxis(t, list(sites), list(range(k)))
    shape = t.shape
    t = (u @ t.reshape(1 << k, -1)).reshape(shape)
    t = np.moveaxis(t, list(range(k)), list(sites))
    return np.ascontiguousarray(t).reshape(-1)


def rotation_matrix(axis, angle):
    c, s = math.cos(angle / 2), math.sin(angle / 2)
    axis = axis.lower()
    if axis == "x":
        return np.array([[c, -1j * s], [-1j * s, c]])
    if axis == "y":
        return np.array([[c, -s], [s, c]], dtype=complex)
    if axis == "z":
        return np.diag([c - 1j * s, c + 1j * s])
    raise ValueError(f"unknown axis {axis!r}")


# --- ladder ------------------------------------------------------------------------------------

MASKS = ("rungs", "diag", "tri_even", "tri_odd", "aux_alpha", "aux_beta", "reg_alpha", "reg_beta")


def mask_groups(mask, n):
    """Qubit groups (ladder indices) a mask acts on."""
    a = list(range(n))
    r = [n + c for c in range(n)]
    if mask == "rungs":
        return [(a[c], r[c]) for c in range(n)]
    if mask == "diag":
        return [(a[c], r[c + 1]) for c in range(n - 1)]
    if mask in ("tri_even", "tri_odd"):
        p = 0 if mask == "tri_even" else 1
        return [(r[c], a[c], r[c + 1]) for c in range(p, n - 1, 2)]
    if mask in ("aux_alpha", "reg_alpha", "aux_beta", "reg_beta"):
        row = a if mask.startswith("aux") else r
        start = 0 if mask.endswith("alpha") else 1
        return [(row[c], row[c + 1]) for c in range(start, n - 1, 2)]
    raise TrispinError(f"unknown mask {mask!r}")


@dataclass(frozen=True)
class PointerInit:
    column: int

    def text(self):
        return f"POINTER {self.column}"


@dataclass(frozen=True)
class ApplySchedule:
    schedule: LambdaSchedule
    mask: str
    label: str = ""

    def text(self):
        vals = " ".join(repr(v) for v in self.schedule.values)
        tail = f" # {self.label}" if self.label else ""
        return f"SCHEDULE {vals} MASK {self.mask}{tail}"


@dataclass(frozen=True)
class GlobalSwap:
    mask: str  # alpha | beta
    row: str = "aux"

    def text(self):
        return f"SWAP {self.mask} {self.row}"


@dataclass(frozen=True)
class GlobalRotation:
    axis: str
    angle: float
    row: str = "reg"

    def text(self):
        return f"ROTATE {self.axis} {self.angle!r} {self.row}"


@dataclass(frozen=True)
class Measure:
    def text(self):
        return "MEASURE"


@dataclass
class PulseProgram:
    instructions: list = field(default_factory=list)

    def to_text(self):
        return "\n".join(i.text() for i in self.instructions) + "\n"

    @classmethod
    def from_text(cls, text):
        out = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            label = raw.split("#", 1)[1].strip() if "#" in raw else ""
            if not line:
                continue
            tok = line.split()
            op = tok[0].upper()
            try:
                if op == "POINTER":
                    out.append(PointerInit(int(tok[1])))
                elif op == "SCHEDULE":
                    k = tok.index("MASK")
                    out.append(ApplySchedule(LambdaSchedule(*map(float, tok[1:k])), tok[k + 1], label))
                elif op == "SWAP":
                    out.append(GlobalSwap(tok[1], tok[2] if len(tok) > 2 else "aux"))
                elif op == "ROTATE":
                    out.append(GlobalRotation(tok[1], float(tok[2]), tok[3] if len(tok) > 3 else "reg"))
                elif op == "MEASURE":
                    out.append(Measure())
                else:
                    raise ValueError(op)
            except (ValueError, IndexError):
                raise TrispinError(f"line {lineno}: cannot parse {raw!r}") from None
        return cls(out)


@dataclass
class LadderState:
    n_columns: int
    psi: np.ndarray
    pointer_column: int = -1
    syndromes: list = field(default_factory=list)

    @classmethod
    def initial(cls, n_columns, register=None, pointer=None):
        """Auxiliary row ``|0...0>`` (or pointer at ``pointer``), register as given."""
        if n_columns > 8:
            raise TrispinError("ladder simulation limited to 8 columns")
        n = n_columns
        reg = np.zeros(1 << n, complex)
        if register is None:
            reg[0] = 1
        else:
            reg = np.asarray(register, complex).copy()
            reg /= np.linalg.norm(reg)
        aux = np.zeros(1 << n, complex)
        col = -1 if pointer is None else int(pointer)
        aux[0 if pointer is None else 1 << (n - 1 - col)] = 1
        return cls(n, np.kron(aux, reg), col)

    @property
    def n_qubits(self):
        return 2 * self.n_columns

    def aux_distribution(self):
        n = self.n_columns
        return np.sum(np.abs(self.psi.reshape(1 << n, 1 << n)) ** 2, axis=1)

    def check_pointer(self, allow_empty=False):
        """Assert the auxiliary row is one classical one-hot configuration; return its column."""
        n = self.n_columns
        p = self.aux_distribution()
        k = int(np.argmax(p))
        if p[k] < 1 - POINTER_TOL:
            raise PointerLost(f"auxiliary row is not classical (max probability {p[k]:.3g})")
        if k == 0 and allow_empty:
            return -1
        if bin(k).count("1") != 1:
            raise PointerLost(f"auxiliary configuration {k:0{n}b} is not one-hot")
        return n - 1 - (k.bit_length() - 1)

    def register_state(self):
        """Register amplitudes for the current auxiliary configuration."""
        n = self.n_columns
        p = self.aux_distribution()
        k = int(np.argmax(p))
        block = self.psi.reshape(1 << n, 1 << n)[k]
        return block / np.linalg.norm(block)


@dataclass
class StepReport:
    index: int
    instruction: object
    pointer_column: int
    ok: bool
    message: str = ""


def _apply_instruction(state: LadderState, ins):
    n = state.n_columns
    nq = 2 * n
    psi = state.psi
    if isinstance(ins, PointerInit):
        if state.check_pointer(allow_empty=True) != -1:
            raise PointerLost("pointer already initialised")
        x = np.array([[0, 1], [1, 0]], complex)
        psi = apply_unitary(psi, nq, [ins.column], x)
    elif isinstance(ins, ApplySchedule):
        groups = mask_groups(ins.mask, n)
        if not groups:
            return psi
        u = schedule_to_unitary(ins.schedule, len(groups[0]))
        for grp in groups:
            psi = apply_unitary(psi, nq, grp, u)
    elif isinstance(ins, GlobalSwap):
        u = schedule_to_unitary(EXACT_SWAP, 2)
        for grp in mask_groups(f"{ins.row}_{ins.mask}", n):
            psi = apply_unitary(psi, nq, grp, u)
    elif isinstance(ins, GlobalRotation):
        m = rotation_matrix(ins.axis, ins.angle)
        cols = range(n) if ins.row == "aux" else range(n, 2 * n)
        psi = np.ascontiguousarray(psi, dtype=np.complex128)
        for q in cols:
            kernels.rotate_site(psi, nq, q, m)
    elif isinstance(ins, Measure):
        col = state.check_pointer()
        bits = []
        p = state.aux_distribution()
        for c in range(n):
            if c % 2 != col % 2:
                mask = 1 << (n - 1 - c)
                prob1 = sum(p[k] for k in range(1 << n) if k & mask)
                bits.append((c, int(prob1 > 0.5)))
        state.syndromes.append(bits)
    else:
        raise TrispinError(f"unknown instruction {ins!r}")
    return psi


def run_program(program, initial: LadderState, check=True):
    """Run instructions in order; the pointer invariant is checked after each one.

    Returns ``(final_state, reports)``.
    """
    state = LadderState(initial.n_columns, initial.psi.copy(), initial.pointer_column, [])
    reports = []
    instructions = program.instructions if isinstance(program, PulseProgram) else list(program)
    for i, ins in enumerate(instructions):
        state.psi = _apply_instruction(state, ins)
        if check:
            try:
                state.pointer_column = state.check_pointer(allow_empty=False)
            except PointerLost as exc:
                reports.append(StepReport(i, ins, -1, False, str(exc)))
                exc.reports = reports
                raise
        reports.append(StepReport(i, ins, state.pointer_column, True))
    return state, reports


# --- compiled operations ----------------------------------------------------------------------

def pointer_moves(src, dst, n):
    """Auxiliary ``alpha``/``beta`` swaps carrying the pointer from ``src`` to ``dst``."""
    out = []
    p = src
    while p != dst:
        right = dst > p
        if right:
            kind = "alpha" if p % 2 == 0 else "beta"
            p += 1
        else:
            kind = "alpha" if p % 2 == 1 else "beta"
            p -= 1
        out.append(GlobalSwap(kind, "aux"))
    return out


def targeted_z():
    """CP on every rung: Z on the register qubit beside the pointer."""
    return [ApplySchedule(GATE_TABLE["CP"], "rungs", "targeted Z")]


def sandwich(axis, angle):
    """``U Z U^dagger`` on the register qubit beside the pointer, ``U = exp(-i angle/2 sigma_axis)``."""
    return [
        GlobalRotation(axis, -angle, "reg"),
        ApplySchedule(GATE_TABLE["CP"], "rungs", "targeted Z"),
        GlobalRotation(axis, angle, "reg"),
    ]


def triangle_mask(c):
    return "tri_even" if c % 2 == 0 else "tri_odd"


def exact_cswap(c):
    """Controlled-SWAP of ``r_c``, ``r_{c+1}`` by ``a_c`` with the extra phase removed."""
    return [
        ApplySchedule(GATE_TABLE["CSWAP"], triangle_mask(c), "cSWAP"),
        ApplySchedule(CONTROLLED_S, "rungs", "cSWAP phase fix"),
        ApplySchedule(CONTROLLED_S, "diag", "cSWAP phase fix"),
        ApplySchedule(GATE_TABLE["C2P"], triangle_mask(c), "cSWAP phase fix"),
    ]


def targeted_cp_program(pointer_col, a_col, b_col, n):
    """Instructions realising CZ between register columns ``a_col`` and ``b_col``.

    Same-parity columns are first split by a pointer-controlled SWAP that
    moves ``a`` one column over; register ``alpha``/``beta`` swaps then bring
    the pair together, the pointer visits the left column for a C2P on that
    triangle, and everything is undone in reverse. The pointer ends where it
    started.
    """
    if a_col == b_col or not (0 <= a_col < n and 0 <= b_col < n and 0 <= pointer_col < n):
        raise TrispinError("targeted CP needs two distinct valid columns")
    prog = []
    p = pointer_col
    pos_a, pos_b = a_col, b_col
    reparity = None
    if (pos_a - pos_b) % 2 == 0:
        c = pos_a if pos_a + 1 < n and pos_a + 1 != pos_b else pos_a - 1
        prog += pointer_moves(p, c, n)
        p = c
        prog += exact_cswap(c)
        reparity = c
        pos_a = c + 1 if pos_a == c else c
    lo, hi = sorted((pos_a, pos_b))
    routing = []
    kind = "alpha" if lo % 2 == 0 else "beta"
    while hi - lo > 1:
        routing.append(GlobalSwap(kind, "reg"))
        lo, hi = lo + 1, hi - 1
        kind = "beta" if kind == "alpha" else "alpha"
    prog += routing
    prog += pointer_moves(p, lo, n)
    p = lo
    prog.append(ApplySchedule(GATE_TABLE["C2P"], triangle_mask(lo), "C2P"))
    prog += list(reversed(routing))
    if reparity is not None:
        prog += pointer_moves(p, reparity, n)
        p = reparity
        prog += exact_cswap(reparity)
    prog += pointer_moves(p, pointer_col, n)
    return prog


def targeted_cp(state: LadderState, pointer_col, a_col, b_col):
    """Apply CZ between register columns ``a_col``, ``b_col``; returns ``(state, trace)``."""
    prog = targeted_cp_program(pointer_col, a_col, b_col, state.n_columns)
    out, _ = run_program(prog, state)
    return out, prog


# --- abstract circuits and random programs ------------------------------------------------------

@dataclass(frozen=True)
class AbstractOp:
    kind: str  # move | z | cp | sandwich
    args: tuple = ()


def abstract_apply(reg, n, op, pointer):
    """Effect of an abstract operation on the bare register; returns ``(reg, pointer)``."""
    if op.kind == "move":
        return reg, op.args[0]
    if op.kind == "z":
        return apply_unitary(reg, n, [pointer], np.diag([1, -1]).astype(complex)), pointer
    if op.kind == "sandwich":
        axis, angle = op.args
        u = rotation_matrix(axis, angle)
        g = u @ np.diag([1, -1]) @ u.conj().T
        return apply_unitary(reg, n, [pointer], g), pointer
    if op.kind == "cp":
        a, b = op.args
        return apply_unitary(reg, n, [a, b], controlled_phase()), pointer
    raise TrispinError(f"unknown abstract op {op.kind!r}")


def compile_op(op, pointer, n):
    if op.kind == "move":
        return pointer_moves(pointer, op.args[0], n)
    if op.kind == "z":
        return targeted_z()
    if op.kind == "sandwich":
        return sandwich(*op.args)
    if op.kind == "cp":
        return targeted_cp_program(pointer, op.args[0], op.args[1], n)
    raise TrispinError(f"unknown abstract op {op.kind!r}")


def random_abstract_program(n, length, rng):
    ops = []
    for _ in range(length):
        k = int(rng.integers(4))
        if k == 0:
            ops.append(AbstractOp("move", (int(rng.integers(n)),)))
        elif k == 1:
            ops.append(AbstractOp("z"))
        elif k == 2:
            a, b = rng.choice(n, size=2, replace=False)
            ops.append(AbstractOp("cp", (int(a), int(b))))
        else:
            axis = "xyz"[int(rng.integers(3))]
            ops.append(AbstractOp("sandwich", (axis, float(rng.uniform(-math.pi, math.pi)))))
    return ops


def compare_with_abstract(ops, n, pointer, register):
    """Run ``ops`` on the ladder and on the bare register; return the fidelity and the ladder state."""
    state = LadderState.initial(n, register, pointer)
    reg = state.register_state()
    p = pointer
    prog = []
    for op in ops:
        prog += compile_op(op, p, n)
        reg, p = abstract_apply(reg, n, op, p)
    final, _ = run_program(prog, state)
    if final.pointer_column != p:
        raise PointerLost(f"pointer ended at {final.pointer_column}, expected {p}")
    fid = float(abs(np.vdot(reg, final.register_state())) ** 2)
    return fid, final, prog


# --- superlattice -------------------------------------------------------------------------------

def v_off(x, y, k):
    """Offset potential ``cos(kx) sin(ky/sqrt3) sin(ky/sqrt3 - kx) sin(ky/sqrt3 + kx)``."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    u = k * y / math.sqrt(3)
    return np.cos(k * x) * np.sin(u) * np.sin(u - k * x) * np.sin(u + k * x)


def superlattice_pattern(xs, ys, k):
    """``V_off`` sampled on the grid ``xs x ys`` (rows follow ``ys``)."""
    gx, gy = np.meshgrid(np.asarray(xs, float), np.asarray(ys, float))
    return v_off(gx, gy, k)


def standing_wave_period(wavelength, theta):
    """Period ``lambda / (2 sin(theta / 2))`` of two beams crossing at ``theta``."""
    return wavelength / (2 * math.sin(theta / 2))


def row_shift(k):
    """Shift in ``y`` that reverses the sign of ``V_off`` (half its period)."""
    return math.sqrt(3) * math.pi / k
