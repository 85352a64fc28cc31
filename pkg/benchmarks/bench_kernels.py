"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--n 16] [--repeat 5]

Both backends are imported directly, so the choice made by
``trispin.kernels`` at import time does not matter here. Each row reports
the best of ``--repeat`` runs and checks that the two results agree.
"""
import argparse
import timeit

import numpy as np

from trispin import _kernels_py as py
from trispin import hamiltonian as ham
from trispin.hamiltonian import ChainModel

try:
    from trispin import _kernels_cy as cy
except ImportError:
    cy = None


def _cases(n, rng):
    h = ham.chain_hamiltonian(ChainModel.ISING3SPIN, {"lambda1": 1.0, "lambda3": 0.7, "bx": 0.4}, n)
    xs, zs, cs = h.compiled()
    dim = 1 << n
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    v /= np.linalg.norm(v)
    strings = ham.random_spec(n, 200, rng).compiled()
    m = np.linalg.qr(rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))[0]

    def apply(mod):
        out = np.zeros(dim, complex)
        mod.apply_pauli_sum(xs, zs, cs, v, out)
        return out

    def expect(mod):
        return np.asarray(mod.pauli_expectations(strings[0], strings[1], v))

    def rotate(mod):
        w = v.copy()
        for s in range(n):
            mod.rotate_site(w, n, s, m)
        return w

    small = min(n, 12)
    w = v[: 1 << small] / np.linalg.norm(v[: 1 << small])

    def conc(mod):
        return np.array([mod.pair_concurrence_sum(w, small, 0, small - 1)])

    return {"apply_pauli_sum": apply, "pauli_expectations": expect,
            "rotate_site (all sites)": rotate, "pair_concurrence_sum": conc}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=16)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    cases = _cases(args.n, rng)
    print(f"n = {args.n}, best of {args.repeat}")
    print(f"{'kernel':26s} {'python [ms]':>12s} {'cython [ms]':>12s} {'speedup':>8s}  agree")
    for name, fn in cases.items():
        t_py = min(timeit.repeat(lambda: fn(py), number=1, repeat=args.repeat)) * 1e3
        if cy is None:
            print(f"{name:26s} {t_py:12.3f} {'n/a':>12s}")
            continue
        t_cy = min(timeit.repeat(lambda: fn(cy), number=1, repeat=args.repeat)) * 1e3
        ok = np.allclose(fn(py), fn(cy), atol=1e-10)
        print(f"{name:26s} {t_py:12.3f} {t_cy:12.3f} {t_py / t_cy:8.1f}  {ok}")


if __name__ == "__main__":
    main()
