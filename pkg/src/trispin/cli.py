"""Command-line front end: every sweep writes a CSV table.

Options can come from a flat ``key = value`` file given with ``--config``;
flags on the command line override it. Keys use the flag names with
underscores (``bx_max = 2``). ``--threads`` (or ``TRISPIN_THREADS``) sets
the worker count for grid sweeps; rows are always emitted in grid order.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import correlations as corr
from . import couplings as cp
from . import entanglement as ent
from . import gatelab as gl
from . import hamiltonian as ham
from . import spectra as sp
from .errors import ConfigError, PointerLost, TrispinError

DEFAULT_SEED = sp.SEED


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message, key="argv")


# --- parameters ----------------------------------------------------------------

def _bool(v):
    if isinstance(v, bool):
        return v
    s = str(v).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {v!r}")


def _floats(v):
    if isinstance(v, (list, tuple)):
        return [float(x) for x in v]
    return [float(x) for x in str(v).replace(",", " ").split()]


def _ints(v):
    if isinstance(v, (list, tuple)):
        return [int(x) for x in v]
    return [int(x) for x in str(v).replace(",", " ").split()]


# name -> (type, default, help)
COMMON = {
    "output": (str, "-", "output file ('-' for stdout)"),
    "threads": (int, None, "worker threads (default: TRISPIN_THREADS or all cores)"),
    "seed": (int, DEFAULT_SEED, "random seed"),
}

COMMANDS = {
    "couplings-sweep": (
        "effective couplings over a square grid of J_up/U, J_down/U",
        {
            "statistics": (str, "bosonic", "bosonic or fermionic"),
            "preset": (str, "uniform", "uniform (all U equal) or plateau (U_upup = U_downdown = 2.12 U_updown)"),
            "u": (float, 1.0, "U_updown (and the same-species U for the uniform preset)"),
            "j_min": (float, -0.1, "smallest J/U"),
            "j_max": (float, 0.1, "largest J/U"),
            "steps": (int, 21, "grid points per axis"),
        },
    ),
    "phase-diagram": (
        "classical phase labels on a (lambda1, lambda3) grid, optionally checked by exact diagonalisation",
        {
            "l1_min": (float, -1.0, ""), "l1_max": (float, 1.0, ""),
            "l3_min": (float, -1.0, ""), "l3_max": (float, 1.0, ""),
            "steps": (int, 11, "grid points per axis"),
            "n": (int, 0, "chain length for the exact ground energy (0 skips it)"),
        },
    ),
    "spectrum": (
        "low-lying levels of a chain, or an order-parameter sweep in bx",
        {
            "model": (str, "ising3spin", "ising3spin, cluster or general_ham1"),
            "hamiltonian": (str, None, "Hamiltonian text file (overrides --model)"),
            "n": (int, 12, "sites"),
            "boundary": (str, "periodic", "periodic or open"),
            "lambda1": (float, 1.0, ""), "lambda3": (float, 0.0, ""),
            "bx": (float, 0.0, ""), "b": (float, 0.0, "cluster-chain field"),
            "k": (int, 6, "levels"),
            "method": (str, "auto", "auto, dense or iterative"),
            "sweep": (_bool, False, "sweep bx and emit order parameters"),
            "bx_min": (float, 0.0, ""), "bx_max": (float, 2.0, ""), "steps": (int, 21, ""),
        },
    ),
    "entropy": (
        "block entropy of the ising3spin ground state against bx",
        {
            "n": (int, 12, ""), "l": (int, 6, "block length"),
            "lambda1": (float, 0.0, ""), "lambda3": (float, 1.0, ""),
            "bx_min": (float, 0.0, ""), "bx_max": (float, 2.0, ""), "steps": (int, 201, ""),
            "method": (str, "auto", ""),
        },
    ),
    "correlations": (
        "connected zz correlators of the cluster chain, (B, L, value) rows",
        {
            "b": (_floats, [0.25, 0.5, 0.75, 1.5], "fields (comma separated)"),
            "n": (int, 16, "ring length (0 for the thermodynamic integrals)"),
            "lengths": (_ints, None, "L values (default: odd L up to n/2 + 1)"),
            "source": (str, "ed", "ed or analytic"),
        },
    ),
    "entlength": (
        "correlation and entanglement lengths of the cluster chain",
        {
            "b": (_floats, [0.25, 0.5, 0.75, 1.5], "fields (comma separated)"),
            "n": (int, 16, ""),
            "method": (str, "auto", "auto, prescribed or annealing"),
            "budget": (int, 2000, "annealing steps per restart"),
            "restarts": (int, 4, "annealing restarts"),
        },
    ),
    "logneg": (
        "thermodynamic log-negativity of the bridge pair",
        {"b_min": (float, -3.0, ""), "b_max": (float, 3.0, ""), "steps": (int, 601, "")},
    ),
    "logneg-finite": (
        "finite-ring log-negativity of the bridge pair by branch",
        {
            "b": (float, 0.9875, ""),
            "n_min": (int, 6, ""), "n_max": (int, 20, ""),
            "method": (str, "sums", "sums or exact"),
        },
    ),
    "locent": (
        "localisable entanglement of the cluster chain",
        {
            "b": (float, 0.6, ""), "n": (int, 14, ""),
            "lengths": (_ints, None, "odd L values (default 3, 5, ..., n-1)"),
            "method": (str, "prescribed", "prescribed, annealing or grid_bruteforce"),
            "budget": (int, 2000, ""), "restarts": (int, 4, ""),
        },
    ),
    "gates-verify": (
        "check the schedule table against its target gates",
        {"gate": (str, "all", "CP, C2P, SWAP, CSWAP or all"), "tol": (float, 1e-9, "")},
    ),
    "ladder-run": (
        "run a pulse program on the ladder, or random programs against the abstract circuit",
        {
            "program": (str, None, "program text file"),
            "columns": (int, 5, "ladder columns"),
            "random": (int, 0, "number of random programs to compare"),
            "length": (int, 10, "instructions per random program"),
        },
    ),
    "superlattice": (
        "offset potential of the superlattice on a grid",
        {
            "k": (float, 1.0, "wave number"),
            "x_max": (float, 2 * math.pi, ""), "y_max": (float, 2 * math.pi, ""),
            "points": (int, 64, "grid points per axis"),
            "wavelength": (float, None, "laser wavelength (adds the period to stderr)"),
            "theta": (float, None, "beam crossing angle"),
        },
    ),
}


def build_parser():
    p = _Parser(prog="trispin", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name, (help_text, opts) in COMMANDS.items():
        s = sub.add_parser(name, help=help_text, description=help_text)
        s.add_argument("--config", default=None, help="key = value file")
        for key, (typ, default, h) in {**COMMON, **opts}.items():
            # a bare boolean flag means true
            extra = {"nargs": "?", "const": "true"} if typ is _bool else {}
            s.add_argument("--" + key.replace("_", "-"), dest=key, default=None,
                           help=f"{h} (default {default!r})".strip(), **extra)
    return p


def resolve(command, args_ns):
    """Defaults, then the config file, then flags."""
    _, opts = COMMANDS[command]
    table = {**COMMON, **opts}
    cfg = {}
    if args_ns.config:
        with open(args_ns.config) as fh:
            cfg = cp.read_keyvalue(fh.read())
    for key in cfg:
        if key.replace("-", "_") not in table:
            raise ConfigError(f"{command}.{key}: unknown key", key=f"{command}.{key}")
    out = {}
    for key, (typ, default, _) in table.items():
        raw = getattr(args_ns, key, None)
        if raw is None:
            raw = cfg.get(key, cfg.get(key.replace("_", "-")))
        if raw is None:
            out[key] = default
            continue
        try:
            out[key] = typ(raw)
        except (TypeError, ValueError):
            raise ConfigError(f"{command}.{key}: bad value {raw!r}", key=f"{command}.{key}") from None
    if out["threads"] is None:
        env = os.environ.get("TRISPIN_THREADS")
        try:
            out["threads"] = int(env) if env else (os.cpu_count() or 1)
        except ValueError:
            raise ConfigError(f"TRISPIN_THREADS: bad value {env!r}", key="TRISPIN_THREADS") from None
    if out["threads"] < 1:
        raise ConfigError("threads must be >= 1", key=f"{command}.threads")
    return out


# --- output --------------------------------------------------------------------

def fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v) + 0.0, ".17g")  # + 0.0 folds -0 into 0
    return str(v)


def expand(header, rows):
    """Split complex cells into ``name_re``, ``name_im`` columns."""
    cplx = [any(isinstance(r[i], complex) for r in rows) for i in range(len(header))]
    h = []
    for name, c in zip(header, cplx):
        h += [f"{name}_re", f"{name}_im"] if c else [name]
    out = []
    for r in rows:
        line = []
        for v, c in zip(r, cplx):
            if c:
                v = complex(v)
                line += [v.real, v.imag]
            else:
                line.append(v)
        out.append(line)
    return h, out


def write_csv(stream, header, rows):
    header, rows = expand(list(header), [list(r) for r in rows])
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])


def ordered_map(fn, items, threads):
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


def linspace(lo, hi, steps):
    if steps < 1:
        raise ConfigError("steps must be >= 1", key="steps")
    return [float(x) for x in np.linspace(lo, hi, steps)]


# --- commands --------------------------------------------------------------------

def cmd_couplings_sweep(o):
    stats = o["statistics"].lower()
    if stats not in ("bosonic", "fermionic"):
        raise ConfigError("statistics must be bosonic or fermionic", key="couplings-sweep.statistics")
    if o["preset"] not in ("uniform", "plateau"):
        raise ConfigError("preset must be uniform or plateau", key="couplings-sweep.preset")
    u = o["u"]
    same = cp.PLATEAU_RATIO * u if o["preset"] == "plateau" else u
    grid = linspace(o["j_min"], o["j_max"], o["steps"])
    pts = [(a, b) for a in grid for b in grid]

    def point(jj):
        p = cp.LatticeParams.uniform(jj[0] * u, jj[1] * u, u, stats, u_upup=same, u_downdown=same)
        return jj, cp.effective_couplings(p)

    res = ordered_map(point, pts, o["threads"])
    keys = res[0][1].keys()
    rows = [[a, b, int(c.mott_warning)] + [c[k] for k in keys] for (a, b), c in res]
    return ["j_up", "j_down", "mott_warning"] + keys, rows


def cmd_phase_diagram(o):
    l1s = linspace(o["l1_min"], o["l1_max"], o["steps"])
    l3s = linspace(o["l3_min"], o["l3_max"], o["steps"])
    pts = [(a, b) for a in l1s for b in l3s]
    n = o["n"]

    def point(x):
        lab = sp.classify_classical_phase(*x)
        row = [x[0], x[1], lab.label.value] + [lab.order_parameters[f"energy_{k}"] for k in ("neel", "period3", "ferro")]
        if n:
            h = ham.chain_hamiltonian(ham.ChainModel.ISING3SPIN, {"lambda1": x[0], "lambda3": x[1], "bx": 0.0}, n)
            row.append(sp.diagonalize(h, k=2).e0 / n)
        return row

    header = ["lambda1", "lambda3", "label", "e_neel", "e_period3", "e_ferro"] + (["ed_e0_per_site"] if n else [])
    return header, ordered_map(point, pts, o["threads"])


def _chain_from(o):
    if o["hamiltonian"]:
        with open(o["hamiltonian"]) as fh:
            return ham.from_text(fh.read())
    model = ham.ChainModel(o["model"])
    params = {
        ham.ChainModel.ISING3SPIN: {"lambda1": o["lambda1"], "lambda3": o["lambda3"], "bx": o["bx"]},
        ham.ChainModel.CLUSTER: {"B": o["b"]},
    }.get(model)
    if params is None:
        raise ConfigError("general_ham1 needs a coupling set; pass a Hamiltonian file", key="spectrum.model")
    return ham.chain_hamiltonian(model, params, o["n"], ham.Boundary(o["boundary"]))


def cmd_spectrum(o):
    if o["sweep"]:
        grid = linspace(o["bx_min"], o["bx_max"], o["steps"])
        rows = sp.order_parameter_sweep(
            o["lambda1"], o["lambda3"], grid, o["n"], o["method"],
            mapper=lambda f, g: ordered_map(f, g, o["threads"]),
        )
        return list(sp.SWEEP_HEADER), rows
    r = sp.diagonalize(_chain_from(o), k=o["k"], method=o["method"])
    return ["index", "energy"], [[i, e] for i, e in enumerate(r.eigenvalues[: o["k"]])]


def cmd_entropy(o):
    grid = linspace(o["bx_min"], o["bx_max"], o["steps"])

    def point(bx):
        h = ham.chain_hamiltonian(
            ham.ChainModel.ISING3SPIN, {"lambda1": o["lambda1"], "lambda3": o["lambda3"], "bx": bx}, o["n"]
        )
        return [bx, corr.block_entropy(sp.ground_state(h, o["method"]), o["l"])]

    return ["bx", "entropy"], ordered_map(point, grid, o["threads"])


def cmd_correlations(o):
    n = o["n"]
    lengths = o["lengths"] or ent.fit_lengths(n if n else 16)
    if o["source"] not in ("ed", "analytic"):
        raise ConfigError("source must be ed or analytic", key="correlations.source")
    if o["source"] == "ed" and not n:
        raise ConfigError("exact correlators need n > 0", key="correlations.n")

    def point(b):
        if o["source"] == "analytic":
            return [[b, L, corr.czz_analytic(b, 0, L - 1)] for L in lengths]
        gs = sp.cluster_ground_state(b, n)
        return [[b, L, corr.two_point(gs, 0, L - 1, "z", "z", connected=True)] for L in lengths]

    rows = [r for block in ordered_map(point, o["b"], o["threads"]) for r in block]
    return ["B", "L", "value"], rows


def cmd_entlength(o):
    def point(b):
        return ent.entanglement_length_point(
            b, o["n"], o["method"], o["budget"], o["restarts"], o["seed"]
        ).csv_row()

    return list(ent.ENTLENGTH_HEADER), ordered_map(point, o["b"], o["threads"])


def cmd_logneg(o):
    grid = linspace(o["b_min"], o["b_max"], o["steps"])
    return ["B", "E_N"], ordered_map(lambda b: [b, ent.logneg_thermo(b)], grid, o["threads"])


def cmd_logneg_finite(o):
    ns = list(range(max(5, o["n_min"]), o["n_max"] + 1))

    def point(n):
        return [n, ent.finite_branch(n), ent.logneg_finite(o["b"], n, method=o["method"])]

    return ["n", "branch", "E_N"], ordered_map(point, ns, o["threads"])


def cmd_locent(o):
    n = o["n"]
    lengths = o["lengths"] or list(range(3, n, 2))
    gs = sp.cluster_ground_state(o["b"], n)

    def point(L):
        sc = ent.prescribed_scheme(n, L)
        if o["method"] == "prescribed":
            return [L, ent.average_concurrence(gs, sc), "prescribed"]
        r = ent.localisable_optimize(gs, sc.targets, o["method"], o["budget"], o["seed"], o["restarts"],
                                     init=sc if o["method"] == "annealing" else None)
        return [L, r.value, r.method]

    return ["L", "value", "method"], [point(L) for L in lengths]


def cmd_gates_verify(o, out):
    names = list(gl.GATE_TABLE) if o["gate"].lower() == "all" else [o["gate"]]
    ok = True
    for name in names:
        r = gl.verify_gate(name, o["tol"])
        ok &= r.passed
        phases = " ".join(format(x, ".6g") for x in r.fit.local_phases)
        out.write(f"{'PASS' if r.passed else 'FAIL'} dist={r.distance:.3e} gate={r.gate} "
                  f"global_phase={r.fit.global_phase:.6g} local_phases=[{phases}]\n")
    return 0 if ok else 1


def cmd_ladder_run(o, out):
    if o["program"]:
        with open(o["program"]) as fh:
            prog = gl.PulseProgram.from_text(fh.read())
        state = gl.LadderState.initial(o["columns"])
        failure = None
        try:
            _, reports = gl.run_program(prog, state)
        except PointerLost as exc:
            reports, failure = exc.reports, exc
        for r in reports:
            out.write(f"step {r.index} {'OK' if r.ok else 'FAIL'} pointer={r.pointer_column} :: {r.instruction.text()}\n")
        if failure is not None:
            raise failure
        return 0
    if o["random"] < 1:
        raise ConfigError("give --program or --random N", key="ladder-run.program")
    rows = []
    for s in range(o["random"]):
        rng = np.random.default_rng([o["seed"], s])
        n = o["columns"]
        ops = gl.random_abstract_program(n, o["length"], rng)
        reg = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
        fid, _, prog = gl.compare_with_abstract(ops, n, int(rng.integers(n)), reg)
        rows.append([s, len(prog), fid])
    write_csv(out, ["program", "instructions", "fidelity"], rows)
    return 0


def cmd_superlattice(o, out):
    k = o["k"]
    xs = np.linspace(0, o["x_max"], o["points"])
    ys = np.linspace(0, o["y_max"], o["points"])
    v = gl.superlattice_pattern(xs, ys, k)
    rows = [[x, y, v[j, i]] for j, y in enumerate(ys) for i, x in enumerate(xs)]
    write_csv(out, ["x", "y", "v_off"], rows)
    if o["wavelength"] is not None and o["theta"] is not None:
        d = gl.standing_wave_period(o["wavelength"], o["theta"])
        sys.stderr.write(json.dumps({"period": d}) + "\n")
    return 0


TABLE_COMMANDS = {
    "couplings-sweep": cmd_couplings_sweep,
    "phase-diagram": cmd_phase_diagram,
    "spectrum": cmd_spectrum,
    "entropy": cmd_entropy,
    "correlations": cmd_correlations,
    "entlength": cmd_entlength,
    "logneg": cmd_logneg,
    "logneg-finite": cmd_logneg_finite,
    "locent": cmd_locent,
}
STREAM_COMMANDS = {
    "gates-verify": cmd_gates_verify,
    "ladder-run": cmd_ladder_run,
    "superlattice": cmd_superlattice,
}


def run(argv=None, stdout=None):
    stdout = stdout or sys.stdout
    args = build_parser().parse_args(argv)
    o = resolve(args.command, args)
    out = stdout if o["output"] == "-" else open(o["output"], "w", newline="")
    try:
        if args.command in TABLE_COMMANDS:
            header, rows = TABLE_COMMANDS[args.command](o)
            write_csv(out, header, rows)
            return 0
        return STREAM_COMMANDS[args.command](o, out)
    finally:
        if out is not stdout:
            out.close()


def error_payload(exc):
    d = {"error": type(exc).__name__, "message": str(exc)}
    for attr in ("key", "residual", "error_estimate", "eigenvalue"):
        if getattr(exc, attr, None) is not None:
            d[attr] = getattr(exc, attr)
    return d


def main(argv=None):
    try:
        code = run(argv)
    except (TrispinError, ValueError, OSError, KeyError) as exc:
        sys.stderr.write(json.dumps(error_payload(exc), default=str) + "\n")
        return 2
    return code


if __name__ == "__main__":
    sys.exit(main())
