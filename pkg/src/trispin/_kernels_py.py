"""Pure numpy versions of the compiled kernels in ``_kernels_cy.pyx``.

Same signatures, same bit convention. Used when the extension is not built
or when ``TRISPIN_KERNELS=python`` is set.
"""
from functools import lru_cache

import numpy as np


@lru_cache(maxsize=8)
def _index_tables(dim):
    idx = np.arange(dim, dtype=np.uint64)
    parity = (np.bitwise_count(idx) & 1).astype(bool)
    return idx, parity


def _signs(idx, parity, z):
    return np.where(parity[idx & np.uint64(z)], -1.0, 1.0)


def apply_pauli_sum(xs, zs, cs, v, out):
    dim = v.shape[0]
    if out.shape[0] != dim:
        raise ValueError("output length mismatch")
    idx, parity = _index_tables(dim)
    real = not np.iscomplexobj(out)
    for x, z, c in zip(xs, zs, cs):
        src = idx ^ np.uint64(x)
        coeff = c.real if real else c
        out += coeff * _signs(src, parity, z) * v[src]


def pauli_expectations(xs, zs, v):
    dim = v.shape[0]
    idx, parity = _index_tables(dim)
    res = np.empty(len(xs), dtype=np.complex128)
    for t, (x, z) in enumerate(zip(xs, zs)):
        src = idx ^ np.uint64(x)
        res[t] = np.vdot(v, _signs(src, parity, z) * v[src])
    return res


def rotate_site(psi, n, site, m):
    view = psi.reshape(1 << site, 2, -1)
    a = view[:, 0, :].copy()
    b = view[:, 1, :]
    view[:, 0, :] = m[0, 0] * a + m[0, 1] * b
    view[:, 1, :] = m[1, 0] * a + m[1, 1] * b


def pair_concurrence_sum(psi, n, a, b):
    t = np.moveaxis(psi.reshape((2,) * n), (a, b), (n - 2, n - 1)).reshape(-1, 4)
    return float(np.sum(2.0 * np.abs(t[:, 0] * t[:, 3] - t[:, 1] * t[:, 2])))
